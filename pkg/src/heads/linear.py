from dataclasses import dataclass

import numpy as np

from core.rng import RngStream, as_generator
from shared.exceptions import DataValidationError, LabelRangeError, ShapeError


@dataclass(frozen=True)
class LinearHead:
    """Affine classifier: logits = W x + b, W is C_out x D."""
    W: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        W = np.array(self.W, dtype=np.float64)
        b = np.array(self.b, dtype=np.float64)
        if W.ndim != 2 or b.shape != (W.shape[0],):
            raise ShapeError(f'head weights {W.shape} and bias {b.shape} do not match')
        if not (np.all(np.isfinite(W)) and np.all(np.isfinite(b))):
            raise DataValidationError('head has non-finite entries')
        W.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, 'W', W)
        object.__setattr__(self, 'b', b)

    @classmethod
    def random(cls, n_out: int, dim: int, rng: RngStream | np.random.Generator, std: float = 0.01) -> 'LinearHead':
        generator = as_generator(rng)
        return cls(generator.normal(0.0, std, (n_out, dim)), np.zeros(n_out))

    @property
    def n_out(self) -> int:
        return self.W.shape[0]

    @property
    def dim(self) -> int:
        return self.W.shape[1]

    def params(self) -> dict[str, np.ndarray]:
        return {'W': self.W, 'b': self.b}


def linear_forward(head: LinearHead, x: np.ndarray) -> np.ndarray:
    """Wx + b for a vector, or row-wise for an N x D batch"""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != head.dim:
        raise ShapeError(f'input shape {x.shape} does not match head weights {head.W.shape}')
    return x @ head.W.T + head.b


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - np.max(logits, axis=-1, keepdims=True)
    weights = np.exp(shifted)
    return weights / np.sum(weights, axis=-1, keepdims=True)


def softmax_xent(logits: np.ndarray, label: int) -> tuple[float, np.ndarray]:
    """Cross-entropy of one sample and its gradient w.r.t. the logits."""
    logits = np.asarray(logits, dtype=np.float64)
    if not 0 <= label < logits.shape[0]:
        raise LabelRangeError(f'label {label} out of range for {logits.shape[0]} classes')
    shifted = logits - np.max(logits)
    log_norm = np.log(np.sum(np.exp(shifted)))
    loss = float(log_norm - shifted[label])
    grad = np.exp(shifted - log_norm)
    grad[label] -= 1.0
    return loss, grad


def mean_softmax_xent(logits: np.ndarray, labels: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean cross-entropy over an N x K batch; the gradient already carries the 1/N."""
    labels = np.asarray(labels, dtype=np.int64)
    count, classes = logits.shape
    if labels.shape != (count,):
        raise ShapeError(f'{count} logit rows but labels of shape {labels.shape}')
    if labels.size and (labels.min() < 0 or labels.max() >= classes):
        raise LabelRangeError(f'labels must lie in [0, {classes})')
    shifted = logits - np.max(logits, axis=1, keepdims=True)
    log_norm = np.log(np.sum(np.exp(shifted), axis=1))
    rows = np.arange(count)
    loss = float(np.mean(log_norm - shifted[rows, labels]))
    grad = np.exp(shifted - log_norm[:, None])
    grad[rows, labels] -= 1.0
    return loss, grad / count


def dropout_mask(rng: RngStream | np.random.Generator, p: float, dim: int | tuple[int, ...]) -> np.ndarray:
    """Inverted dropout: each entry is 0 with probability p, else 1 / (1 - p)."""
    if not 0.0 <= p < 1.0:
        raise DataValidationError(f'dropout rate must be in [0, 1), got {p}')
    if p == 0.0:
        return np.ones(dim)
    keep = as_generator(rng).random(dim) >= p
    return keep / (1.0 - p)
