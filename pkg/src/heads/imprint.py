from dataclasses import dataclass

import numpy as np

from heads.linear import LinearHead, linear_forward
from shared.exceptions import CoverageError, DataValidationError, DegenerateInputError


@dataclass(frozen=True)
class ImprintedHead:
    """Frozen base head followed by a novel head that reads the base logits."""
    base: LinearHead
    novel: LinearHead

    def logits(self, features: np.ndarray) -> np.ndarray:
        return linear_forward(self.novel, linear_forward(self.base, features))

    def predict(self, features: np.ndarray) -> int:
        return int(np.argmax(self.logits(features)))


def class_means(vectors: np.ndarray, labels: np.ndarray, n_way: int) -> np.ndarray:
    """Per-class mean of row vectors; every class 0..n_way-1 must be present."""
    labels = np.asarray(labels, dtype=np.int64)
    outside = labels[(labels < 0) | (labels >= n_way)]
    if outside.size:
        raise DataValidationError(f'support label {int(outside[0])} is outside 0..{n_way - 1}')
    means = np.zeros((n_way, vectors.shape[1]))
    for k in range(n_way):
        rows = vectors[labels == k]
        if rows.shape[0] == 0:
            raise CoverageError(f'class {k} has no support sample')
        means[k] = rows.mean(axis=0)
    return means


def imprint(support_logits: list[tuple[np.ndarray, int]], n_way: int) -> LinearHead:
    """Novel head whose row k is the L2-normalized mean support logit of class k; zero bias."""
    vectors = np.array([np.asarray(z, dtype=np.float64) for z, _ in support_logits])
    labels = np.array([k for _, k in support_logits], dtype=np.int64)
    if vectors.ndim != 2:
        raise CoverageError('no support logits given')
    means = class_means(vectors, labels, n_way)
    norms = np.linalg.norm(means, axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise DegenerateInputError(f'mean support logit of class {int(zero[0])} has zero norm')
    return LinearHead(means / norms[:, None], np.zeros(n_way))
