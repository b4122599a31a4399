import numpy as np

from core.rng import RngStream, as_generator
from harness.episodes import Episode
from heads.imprint import ImprintedHead, class_means, imprint
from heads.linear import LinearHead, linear_forward
from heads.trainer import train_head
from protocols.embedding import embed
from protocols.episode_losses import metric_scores
from protocols.method_schemas import Method, MethodConfig
from protocols.model import TrainedModel


def pooled_features(model: TrainedModel, episode: Episode) -> tuple[np.ndarray, np.ndarray]:
    """Mean-pooled embeddings of the support set (n*k x C) and of the query (C)"""
    support = np.array([embed(model.embedding, frames).mean(axis=0) for frames in episode.support_frames])
    query = embed(model.embedding, episode.query_frames).mean(axis=0)
    return support, query


def adapt_and_predict(model: TrainedModel, episode: Episode, cfg: MethodConfig,
                      rng: RngStream | np.random.Generator) -> int:
    """Predicted local label of the episode query. Never modifies the model."""
    method = model.method
    if model.config.is_metric:
        sims, _, _ = metric_scores(method, model.embedding, model.saliency, episode, cfg.dtw_normalize)
        return int(np.argmax(sims))

    generator = as_generator(rng)
    labels = episode.support_labels
    support, query = pooled_features(model, episode)

    if method == Method.baseline:
        init = LinearHead.random(episode.n_way, support.shape[1], generator)
        head = train_head(support, labels, init, cfg.iters_adapt, cfg.lr_adapt, 0.0, generator)
        return int(np.argmax(linear_forward(head, query)))

    if method == Method.baseline_plus:
        support_logits = linear_forward(model.base_head, support)
        if cfg.use_imprint:
            init = imprint(list(zip(support_logits, labels.tolist())), episode.n_way)
        else:
            init = LinearHead.random(episode.n_way, support_logits.shape[1], generator)
        head = train_head(support_logits, labels, init, cfg.iters_adapt, cfg.lr_adapt, 0.0, generator)
        return ImprintedHead(model.base_head, head).predict(query)

    # cosine classifier: templates are the normalized class-mean features
    templates = class_means(support, labels, episode.n_way)
    templates = templates / np.linalg.norm(templates, axis=1, keepdims=True)
    return int(np.argmax(templates @ query))
