"""
Hard-path dynamic time warping over cosine frame distances.

The accumulated cost follows A(i, j) = d(i, j) + min(A(i-1, j), A(i, j-1), A(i-1, j-1)).
Backtracking prefers the diagonal predecessor, then vertical (i-1, j), then horizontal.
"""
from dataclasses import dataclass

import numpy as np

from align.pooling import unit_rows
from shared.exceptions import DataValidationError, SizeGuardError


BRUTEFORCE_LIMIT = 36
STEPS = ((1, 1), (1, 0), (0, 1))


@dataclass(frozen=True)
class DistanceMatrix:
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise DataValidationError(f'distance matrix must be non-empty 2-D, got shape {values.shape}')
        if not np.all(np.isfinite(values)):
            raise DataValidationError('distance matrix contains non-finite values')
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


@dataclass(frozen=True)
class AlignmentPath:
    steps: tuple[tuple[int, int], ...]

    def __len__(self):
        return len(self.steps)

    def is_admissible(self, rows: int, cols: int) -> bool:
        if not self.steps or self.steps[0] != (0, 0) or self.steps[-1] != (rows - 1, cols - 1):
            return False
        for (i0, j0), (i1, j1) in zip(self.steps, self.steps[1:]):
            if (i1 - i0, j1 - j0) not in STEPS:
                return False
        return True

    def cost(self, distances: DistanceMatrix) -> float:
        return float(sum(distances.values[i, j] for i, j in self.steps))


def frame_distance_matrix(q: np.ndarray, s: np.ndarray) -> DistanceMatrix:
    """d(i, j) = 1 - cos(q_i, s_j)"""
    unit_q, _ = unit_rows(np.asarray(q, dtype=np.float64), 'query')
    unit_s, _ = unit_rows(np.asarray(s, dtype=np.float64), 'support')
    return DistanceMatrix(np.clip(1.0 - unit_q @ unit_s.T, 0.0, 2.0))


def accumulated_cost(distances: DistanceMatrix) -> np.ndarray:
    d = distances.values
    rows, cols = d.shape
    acc = np.full((rows, cols), np.inf)
    for i in range(rows):
        for j in range(cols):
            if i == 0 and j == 0:
                acc[i, j] = d[0, 0]
                continue
            best = np.inf
            if i > 0 and j > 0:
                best = acc[i - 1, j - 1]
            if i > 0:
                best = min(best, acc[i - 1, j])
            if j > 0:
                best = min(best, acc[i, j - 1])
            acc[i, j] = d[i, j] + best
    return acc


def backtrack(acc: np.ndarray) -> AlignmentPath:
    """Optimal path recovered from the last cell backwards.

    Ties between predecessors go to the diagonal, then the vertical (i - 1, j), then the
    horizontal (i, j - 1) cell. The order applies while walking back, so on flat costs the
    forward path takes its straight edge steps first and finishes on the diagonal.
    """
    i, j = acc.shape[0] - 1, acc.shape[1] - 1
    steps = [(i, j)]
    while i > 0 or j > 0:
        candidates = []
        if i > 0 and j > 0:
            candidates.append((i - 1, j - 1))
        if i > 0:
            candidates.append((i - 1, j))
        if j > 0:
            candidates.append((i, j - 1))
        best = candidates[0]
        for cell in candidates[1:]:
            if acc[cell] < acc[best]:
                best = cell
        i, j = best
        steps.append(best)
    return AlignmentPath(tuple(reversed(steps)))


def dtw(distances: DistanceMatrix) -> tuple[float, AlignmentPath]:
    acc = accumulated_cost(distances)
    return float(acc[-1, -1]), backtrack(acc)


def dtw_bruteforce(distances: DistanceMatrix) -> float:
    """Minimum path sum over every admissible path; test oracle for small matrices."""
    rows, cols = distances.shape
    if rows * cols > BRUTEFORCE_LIMIT:
        raise SizeGuardError(f'{rows}x{cols} matrix is too large to enumerate (limit {BRUTEFORCE_LIMIT} cells)')
    d = distances.values

    def walk(i: int, j: int) -> float:
        if (i, j) == (rows - 1, cols - 1):
            return d[i, j]
        best = np.inf
        for di, dj in STEPS:
            if i + di < rows and j + dj < cols:
                best = min(best, walk(i + di, j + dj))
        return d[i, j] + best

    return float(walk(0, 0))


def otam_similarity(q_emb: np.ndarray, s_emb: np.ndarray, normalize: bool = False) -> float:
    """Negative DTW cost of the frame distance matrix; 0 is the maximum."""
    cost, path = dtw(frame_distance_matrix(q_emb, s_emb))
    if normalize:
        cost = cost / len(path)
    return -cost


def path_cost_grads(q: np.ndarray, s: np.ndarray, path: AlignmentPath,
                    normalize: bool = False) -> tuple[float, np.ndarray, np.ndarray]:
    """Cost along a fixed path and its gradients w.r.t. both frame matrices."""
    unit_q, norms_q = unit_rows(q, 'query')
    unit_s, norms_s = unit_rows(s, 'support')
    grad_q = np.zeros_like(q)
    grad_s = np.zeros_like(s)
    cost = 0.0
    weight = 1.0 / len(path) if normalize else 1.0
    for i, j in path.steps:
        value = float(np.dot(unit_q[i], unit_s[j]))
        cost += 1.0 - value
        grad_q[i] -= weight * (unit_s[j] - value * unit_q[i]) / norms_q[i]
        grad_s[j] -= weight * (unit_q[i] - value * unit_s[j]) / norms_s[j]
    return cost * weight, grad_q, grad_s
