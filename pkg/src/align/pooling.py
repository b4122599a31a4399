import numpy as np

from shared.exceptions import DegenerateInputError


def mean_pool(seq: np.ndarray) -> np.ndarray:
    """Average over the temporal dimension (rows)."""
    seq = np.asarray(seq, dtype=np.float64)
    if seq.ndim != 2 or seq.shape[0] < 1:
        raise DegenerateInputError(f'mean_pool expects a T x C matrix with T >= 1, got shape {seq.shape}')
    return seq.mean(axis=0)


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    norm_a = np.linalg.norm(a)
    norm_b = np.linalg.norm(b)
    if norm_a == 0.0 or norm_b == 0.0:
        raise DegenerateInputError('cosine of a zero-norm vector is undefined')
    value = float(np.dot(a, b) / (norm_a * norm_b))
    return min(1.0, max(-1.0, value))


def cosine_grads(a: np.ndarray, b: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
    """cos(a, b) with its gradients w.r.t. a and b (unclipped, for backpropagation)."""
    norm_a = np.linalg.norm(a)
    norm_b = np.linalg.norm(b)
    if norm_a == 0.0 or norm_b == 0.0:
        raise DegenerateInputError('cosine of a zero-norm vector is undefined')
    unit_a = a / norm_a
    unit_b = b / norm_b
    value = float(np.dot(unit_a, unit_b))
    return value, (unit_b - value * unit_a) / norm_a, (unit_a - value * unit_b) / norm_b


def unit_rows(matrix: np.ndarray, name: str = 'sequence') -> tuple[np.ndarray, np.ndarray]:
    """Row-normalized copy of a matrix and the row norms; zero rows are an error."""
    norms = np.linalg.norm(matrix, axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise DegenerateInputError(f'zero-norm frame at index {int(zero[0])}', name)
    return matrix / norms[:, None], norms
