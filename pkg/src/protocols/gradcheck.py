"""Central finite-difference checks of the hand-derived gradients."""
from typing import Callable

import numpy as np

from align.saliency import SaliencyParams
from core.feature_schemas import FeatureSequence
from harness.episodes import Episode
from protocols.embedding import EmbeddingParams
from protocols.episode_losses import classification_loss, metric_episode_loss
from protocols.method_schemas import Method


FD_STEP = 1e-5


def numeric_grad(loss: Callable[[np.ndarray], float], x: np.ndarray, h: float = FD_STEP) -> np.ndarray:
    grad = np.zeros_like(x)
    for index in np.ndindex(x.shape):
        shifted = x.copy()
        shifted[index] = x[index] + h
        upper = loss(shifted)
        shifted[index] = x[index] - h
        lower = loss(shifted)
        grad[index] = (upper - lower) / (2.0 * h)
    return grad


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    scale = max(np.linalg.norm(analytic), np.linalg.norm(numeric), 1e-12)
    return float(np.linalg.norm(analytic - numeric) / scale)


def max_param_error(loss_and_grads: Callable[[dict[str, np.ndarray]], tuple[float, dict[str, np.ndarray]]],
                    params: dict[str, np.ndarray], h: float = FD_STEP) -> float:
    """Worst relative error over all parameter blocks"""
    _, grads = loss_and_grads(params)
    worst = 0.0
    for name in params:
        def loss(value, name=name):
            return loss_and_grads({**params, name: value})[0]
        worst = max(worst, relative_error(grads[name], numeric_grad(loss, params[name], h)))
    return worst


def random_episode(generator: np.random.Generator, n_way: int = 3, k_shot: int = 2,
                   frames: int = 4, c_in: int = 5) -> Episode:
    support = []
    for label in range(n_way):
        for shot in range(k_shot):
            seq = FeatureSequence(f's{label}_{shot}', label, generator.standard_normal((frames, c_in)))
            support.append((seq, label))
    query_label = int(generator.integers(n_way))
    query = FeatureSequence('q', query_label, generator.standard_normal((frames, c_in)))
    return Episode(support=tuple(support), query=(query, query_label), class_map=tuple(range(n_way)))


def classification_grad_error(generator: np.random.Generator, cosine_head: bool = False, dropout_p: float = 0.5,
                              n: int = 6, c_in: int = 5, dim: int = 4, classes: int = 3) -> float:
    pooled = generator.standard_normal((n, c_in))
    labels = generator.integers(classes, size=n)
    mask = (generator.random((n, dim)) >= dropout_p) / (1.0 - dropout_p) if dropout_p > 0.0 else None
    params = {
        'W_e': generator.standard_normal((dim, c_in)),
        'b_e': generator.standard_normal(dim),
        'W': generator.standard_normal((classes, dim)),
        'b': generator.standard_normal(classes),
    }
    return max_param_error(lambda p: classification_loss(p, pooled, labels, mask, cosine_head, 2.0), params)


def metric_grad_error(method: Method | str, generator: np.random.Generator, tau: float = 2.0,
                      dim: int = 4, heads: int = 2, normalize: bool = False) -> float:
    """OTAM-lite is checked with its DTW paths frozen at the starting point."""
    method = Method(method)
    episode = random_episode(generator)
    c_in = episode.query_frames.shape[1]
    params = {'W_e': generator.standard_normal((dim, c_in)), 'b_e': generator.standard_normal(dim)}
    if method == Method.cmn_lite:
        params['queries'] = generator.standard_normal((heads, dim))

    def split(p):
        saliency = SaliencyParams(p['queries']) if 'queries' in p else None
        return EmbeddingParams(p['W_e'], p['b_e']), saliency

    embedding, saliency = split(params)
    _, _, paths = metric_episode_loss(method, embedding, saliency, episode, tau, normalize)

    def loss_and_grads(p):
        emb, sal = split(p)
        loss, grads, _ = metric_episode_loss(method, emb, sal, episode, tau, normalize, paths)
        return loss, grads

    return max_param_error(loss_and_grads, params)
