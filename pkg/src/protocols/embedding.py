import hashlib
from dataclasses import dataclass

import numpy as np

from core.rng import RngStream, as_generator
from shared.exceptions import DataValidationError, ShapeError


@dataclass(frozen=True)
class EmbeddingParams:
    """Per-frame affine map f(x) = W_e x + b_e, applied to every frame independently."""
    W_e: np.ndarray
    b_e: np.ndarray

    def __post_init__(self):
        W_e = np.array(self.W_e, dtype=np.float64)
        b_e = np.array(self.b_e, dtype=np.float64)
        if W_e.ndim != 2 or W_e.shape[0] < 1 or b_e.shape != (W_e.shape[0],):
            raise ShapeError(f'embedding weights {W_e.shape} and bias {b_e.shape} do not match')
        if not (np.all(np.isfinite(W_e)) and np.all(np.isfinite(b_e))):
            raise DataValidationError('embedding has non-finite entries')
        W_e.setflags(write=False)
        b_e.setflags(write=False)
        object.__setattr__(self, 'W_e', W_e)
        object.__setattr__(self, 'b_e', b_e)

    @classmethod
    def random(cls, c_in: int, dim: int, rng: RngStream | np.random.Generator) -> 'EmbeddingParams':
        generator = as_generator(rng)
        return cls(generator.normal(0.0, 1.0 / np.sqrt(c_in), (dim, c_in)), np.zeros(dim))

    @property
    def dim(self) -> int:
        return self.W_e.shape[0]

    @property
    def input_dim(self) -> int:
        return self.W_e.shape[1]

    def params(self) -> dict[str, np.ndarray]:
        return {'W_e': self.W_e, 'b_e': self.b_e}

    def fingerprint(self) -> str:
        digest = hashlib.sha256()
        digest.update(self.W_e.tobytes())
        digest.update(self.b_e.tobytes())
        return digest.hexdigest()


def embed(params: EmbeddingParams, frames: np.ndarray) -> np.ndarray:
    """T x C_in frames to T x C embedded frames"""
    if frames.shape[-1] != params.input_dim:
        raise ShapeError(f'frames of shape {frames.shape} do not match embedding input dim {params.input_dim}')
    return frames @ params.W_e.T + params.b_e


def embed_backward(frames: np.ndarray, grad_embedded: np.ndarray) -> dict[str, np.ndarray]:
    """Embedding gradients from dL/d(embedded frames); works for one sequence or a stacked batch of rows."""
    return {'W_e': grad_embedded.T @ frames, 'b_e': grad_embedded.sum(axis=0)}
