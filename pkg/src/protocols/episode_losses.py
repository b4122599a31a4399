"""
Losses with hand-derived gradients.

Every metric method scores the query against each class representative, scales the
scores by tau and applies softmax cross-entropy. Gradients flow back to the embedded
frames and from there through the per-frame affine map. OTAM-lite treats its DTW
paths as fixed index sets during the backward pass.
"""
from typing import Callable

import numpy as np

from align.dtw import AlignmentPath, dtw, frame_distance_matrix, path_cost_grads
from align.pooling import cosine_grads, unit_rows
from align.saliency import SaliencyParams, descriptor_similarity_grads, multi_saliency, multi_saliency_backward
from harness.episodes import Episode
from heads.linear import mean_softmax_xent, softmax_xent
from protocols.embedding import EmbeddingParams, embed, embed_backward
from protocols.method_schemas import Method
from shared.exceptions import DataValidationError


Backward = Callable[[np.ndarray], tuple[np.ndarray, list[np.ndarray], dict[str, np.ndarray]]]


def _class_counts(labels: np.ndarray, n_way: int) -> np.ndarray:
    return np.bincount(labels, minlength=n_way).astype(np.float64)


def _mean_pool_scores(query_emb, support_emb, labels, n_way) -> tuple[np.ndarray, Backward]:
    counts = _class_counts(labels, n_way)
    pooled_query = query_emb.mean(axis=0)
    prototypes = np.zeros((n_way, query_emb.shape[1]))
    for emb, label in zip(support_emb, labels):
        prototypes[label] += emb.mean(axis=0) / counts[label]

    sims = np.zeros(n_way)
    grads_query = []
    grads_proto = []
    for k in range(n_way):
        sims[k], grad_q, grad_p = cosine_grads(pooled_query, prototypes[k])
        grads_query.append(grad_q)
        grads_proto.append(grad_p)

    def backward(grad_sims):
        grad_pooled = sum(grad_sims[k] * grads_query[k] for k in range(n_way))
        grad_query = np.tile(grad_pooled / query_emb.shape[0], (query_emb.shape[0], 1))
        grad_support = []
        for emb, label in zip(support_emb, labels):
            share = grad_sims[label] * grads_proto[label] / (counts[label] * emb.shape[0])
            grad_support.append(np.tile(share, (emb.shape[0], 1)))
        return grad_query, grad_support, {}

    return sims, backward


def _saliency_scores(query_emb, support_emb, labels, n_way, saliency: SaliencyParams) -> tuple[np.ndarray, Backward]:
    counts = _class_counts(labels, n_way)
    query_desc = multi_saliency(query_emb, saliency)
    prototypes = np.zeros((n_way,) + query_desc.shape)
    for emb, label in zip(support_emb, labels):
        prototypes[label] += multi_saliency(emb, saliency) / counts[label]

    sims = np.zeros(n_way)
    grads_query = []
    grads_proto = []
    for k in range(n_way):
        sims[k], grad_q, grad_p = descriptor_similarity_grads(query_desc, prototypes[k])
        grads_query.append(grad_q)
        grads_proto.append(grad_p)

    def backward(grad_sims):
        grad_desc = sum(grad_sims[k] * grads_query[k] for k in range(n_way))
        grad_query, grad_queries = multi_saliency_backward(query_emb, saliency, grad_desc)
        grad_support = []
        for emb, label in zip(support_emb, labels):
            grad_emb, grad_q = multi_saliency_backward(emb, saliency, grad_sims[label] * grads_proto[label] / counts[label])
            grad_support.append(grad_emb)
            grad_queries = grad_queries + grad_q
        return grad_query, grad_support, {'queries': grad_queries}

    return sims, backward


def _alignment_scores(query_emb, support_emb, labels, n_way, normalize: bool,
                      paths: list[AlignmentPath] | None) -> tuple[np.ndarray, Backward, list[AlignmentPath]]:
    counts = _class_counts(labels, n_way)
    if paths is None:
        paths = [dtw(frame_distance_matrix(query_emb, emb))[1] for emb in support_emb]

    sims = np.zeros(n_way)
    cached = []
    for emb, label, path in zip(support_emb, labels, paths):
        cost, grad_q, grad_s = path_cost_grads(query_emb, emb, path, normalize)
        sims[label] -= cost / counts[label]
        cached.append((grad_q, grad_s))

    def backward(grad_sims):
        grad_query = np.zeros_like(query_emb)
        grad_support = []
        for (grad_q, grad_s), label in zip(cached, labels):
            grad_cost = -grad_sims[label] / counts[label]
            grad_query += grad_cost * grad_q
            grad_support.append(grad_cost * grad_s)
        return grad_query, grad_support, {}

    return sims, backward, paths


def metric_scores(method: Method | str, embedding: EmbeddingParams, saliency: SaliencyParams | None,
                  episode: Episode, normalize: bool = False,
                  paths: list[AlignmentPath] | None = None) -> tuple[np.ndarray, Backward, list[AlignmentPath] | None]:
    """Similarity of the query to every class representative, with a backward closure."""
    method = Method(method)
    query_emb = embed(embedding, episode.query_frames)
    support_emb = [embed(embedding, frames) for frames in episode.support_frames]
    labels = episode.support_labels

    if method == Method.meta_baseline:
        sims, backward = _mean_pool_scores(query_emb, support_emb, labels, episode.n_way)
        return sims, backward, None
    if method == Method.cmn_lite:
        if saliency is None:
            raise DataValidationError('cmn-lite needs saliency parameters')
        sims, backward = _saliency_scores(query_emb, support_emb, labels, episode.n_way, saliency)
        return sims, backward, None
    if method == Method.otam_lite:
        return _alignment_scores(query_emb, support_emb, labels, episode.n_way, normalize, paths)
    raise DataValidationError(f'{method.value} is not a metric method')


def metric_episode_loss(method: Method | str, embedding: EmbeddingParams, saliency: SaliencyParams | None,
                        episode: Episode, tau: float, normalize: bool = False,
                        paths: list[AlignmentPath] | None = None
                        ) -> tuple[float, dict[str, np.ndarray], list[AlignmentPath] | None]:
    """Cross-entropy over tau-scaled similarities and gradients w.r.t. W_e, b_e (and saliency queries)."""
    sims, backward, paths = metric_scores(method, embedding, saliency, episode, normalize, paths)
    loss, grad_logits = softmax_xent(tau * sims, episode.query_label)
    grad_query, grad_support, extra = backward(tau * grad_logits)

    grads = embed_backward(episode.query_frames, grad_query)
    for frames, grad_emb in zip(episode.support_frames, grad_support):
        support_grads = embed_backward(frames, grad_emb)
        grads['W_e'] = grads['W_e'] + support_grads['W_e']
        grads['b_e'] = grads['b_e'] + support_grads['b_e']
    grads.update(extra)
    return loss, grads, paths


def cosine_logits(features: np.ndarray, weights: np.ndarray, tau: float):
    """tau * cos(w_k, f_n) for an N x D batch against K x D weights, with a backward closure."""
    unit_f, norms_f = unit_rows(features, 'features')
    unit_w, norms_w = unit_rows(weights, 'classifier weights')
    cos = unit_f @ unit_w.T

    def backward(grad_logits):
        grad_cos = tau * grad_logits
        grad_f = (grad_cos @ unit_w - np.sum(grad_cos * cos, axis=1, keepdims=True) * unit_f) / norms_f[:, None]
        grad_w = (grad_cos.T @ unit_f - np.sum(grad_cos * cos, axis=0)[:, None] * unit_w) / norms_w[:, None]
        return grad_f, grad_w

    return tau * cos, backward


def classification_loss(params: dict[str, np.ndarray], pooled: np.ndarray, labels: np.ndarray,
                        mask: np.ndarray | None = None, cosine_head: bool = False,
                        tau: float = 1.0) -> tuple[float, dict[str, np.ndarray]]:
    """Base-class cross-entropy: embed -> mean pool -> (dropout) -> head.

    `pooled` holds the time-averaged raw frames of each sample (N x C_in); averaging
    commutes with the per-frame affine map, so embedding the averages equals
    mean-pooling the embedded frames.
    """
    features = pooled @ params['W_e'].T + params['b_e']
    hidden = features if mask is None else features * mask

    if cosine_head:
        logits, backward = cosine_logits(hidden, params['W'], tau)
        loss, grad_logits = mean_softmax_xent(logits, labels)
        grad_hidden, grad_W = backward(grad_logits)
        grad_b = np.zeros_like(params['b'])
    else:
        logits = hidden @ params['W'].T + params['b']
        loss, grad_logits = mean_softmax_xent(logits, labels)
        grad_hidden = grad_logits @ params['W']
        grad_W = grad_logits.T @ hidden
        grad_b = grad_logits.sum(axis=0)

    grad_features = grad_hidden if mask is None else grad_hidden * mask
    grads = embed_backward(pooled, grad_features)
    grads.update({'W': grad_W, 'b': grad_b})
    return loss, grads
