from dataclasses import dataclass

import numpy as np

from align.pooling import cosine_grads
from shared.exceptions import DataValidationError


@dataclass
class SaliencyParams:
    """One query vector per saliency head (S x C); attention logits are scaled by `scale`."""
    queries: np.ndarray
    scale: float | None = None

    def __post_init__(self):
        self.queries = np.array(self.queries, dtype=np.float64)
        if self.queries.ndim != 2 or self.queries.shape[0] < 1:
            raise DataValidationError(f'saliency queries must be S x C with S >= 1, got shape {self.queries.shape}')
        if self.scale is None:
            self.scale = 1.0 / np.sqrt(self.queries.shape[1])

    @classmethod
    def zeros(cls, heads: int, dim: int) -> 'SaliencyParams':
        """Zero queries give uniform attention, i.e. exact average pooling"""
        return cls(np.zeros((heads, dim)))

    @property
    def heads(self) -> int:
        return self.queries.shape[0]


def attention(seq: np.ndarray, params: SaliencyParams) -> np.ndarray:
    """S x T softmax weights over time"""
    logits = params.scale * (params.queries @ seq.T)
    logits = logits - logits.max(axis=1, keepdims=True)
    weights = np.exp(logits)
    return weights / weights.sum(axis=1, keepdims=True)


def multi_saliency(seq: np.ndarray, params: SaliencyParams) -> np.ndarray:
    """S x C descriptor: row s is the attention-weighted sum of frames for head s."""
    seq = np.asarray(seq, dtype=np.float64)
    if seq.shape[1] != params.queries.shape[1]:
        raise DataValidationError(f'frame dim {seq.shape[1]} does not match saliency dim {params.queries.shape[1]}')
    return attention(seq, params) @ seq


def multi_saliency_backward(seq: np.ndarray, params: SaliencyParams,
                            grad_descriptor: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Gradients of a loss w.r.t. the frames and the head queries, given dL/d(descriptor)."""
    weights = attention(seq, params)
    grad_seq = weights.T @ grad_descriptor
    grad_weights = grad_descriptor @ seq.T
    grad_logits = weights * (grad_weights - np.sum(grad_weights * weights, axis=1, keepdims=True))
    grad_queries = params.scale * grad_logits @ seq
    grad_seq += params.scale * grad_logits.T @ params.queries
    return grad_seq, grad_queries


def descriptor_similarity(first: np.ndarray, second: np.ndarray) -> float:
    """Mean over heads of the row-wise cosine"""
    return descriptor_similarity_grads(first, second)[0]


def descriptor_similarity_grads(first: np.ndarray, second: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
    heads = first.shape[0]
    total = 0.0
    grad_first = np.zeros_like(first)
    grad_second = np.zeros_like(second)
    for row in range(heads):
        value, grad_a, grad_b = cosine_grads(first[row], second[row])
        total += value
        grad_first[row] = grad_a / heads
        grad_second[row] = grad_b / heads
    return total / heads, grad_first, grad_second
