import logging
from typing import Callable

import numpy as np

from align.saliency import SaliencyParams
from config import DEFAULT_TAU
from core.feature_schemas import Manifest, Split
from core.manifest_io import load_split
from core.rng import RngStream
from harness.episodes import SplitData, check_capacity, sample_episode
from harness.evaluator import accuracy_vector
from heads.imprint import class_means
from heads.linear import LinearHead, dropout_mask, mean_softmax_xent
from heads.optim import AdamState, adam_step
from protocols.embedding import EmbeddingParams
from protocols.episode_losses import classification_loss, cosine_logits, metric_episode_loss
from protocols.method_schemas import CLASSIFIER_METHODS, Init, Method, MethodConfig
from protocols.model import TrainedModel
from shared.exceptions import CapacityError, DataValidationError, LeakageError


logger = logging.getLogger(__name__)

# substream tags of one training run
STAGE_INIT = 0
STAGE_HEAD = 1
STAGE_BATCHES = 2
STAGE_EPISODES = 3
STAGE_VALIDATION = 4
STAGE_PRETRAIN = 5

PRETRAIN_LR = 1e-3


class BestCheckpoint:
    """Keeps the parameters with the best validation accuracy (earliest wins ties)."""

    def __init__(self):
        self.score = -np.inf
        self.params: dict[str, np.ndarray] | None = None
        self.rounds_without_gain = 0

    def offer(self, score: float, params: dict[str, np.ndarray]) -> bool:
        if score > self.score:
            self.score = score
            self.params = dict(params)
            self.rounds_without_gain = 0
            return True
        self.rounds_without_gain += 1
        return False


def pooled_dataset(split: SplitData) -> tuple[np.ndarray, np.ndarray, list[int]]:
    """Time-averaged raw frames (N x C_in), local labels and the global class id of each label"""
    class_ids = sorted(split)
    pooled = []
    labels = []
    for label, class_id in enumerate(class_ids):
        for seq in split[class_id]:
            pooled.append(seq.frames.mean(axis=0))
            labels.append(label)
    return np.array(pooled), np.array(labels, dtype=np.int64), class_ids


def validation_split(manifest: Manifest, cfg: MethodConfig) -> SplitData | None:
    if cfg.val_episodes == 0:
        return None
    split = load_split(manifest, Split.val)
    try:
        check_capacity(split, cfg.n_way, cfg.k_shot)
    except CapacityError as exc:
        logger.warning('validation disabled: %s', exc.message)
        return None
    return split


def validation_seed(cfg: MethodConfig) -> int:
    return RngStream(cfg.seed).child(STAGE_VALIDATION).stream_id


def _validate(model: TrainedModel, cfg: MethodConfig, split: SplitData) -> float:
    return float(accuracy_vector(model, cfg, split, cfg.val_episodes, validation_seed(cfg)).mean())


def fit_classifier(pooled: np.ndarray, labels: np.ndarray, n_classes: int, embedding: EmbeddingParams,
                   cfg: MethodConfig, steps: int, lr: float, rng: RngStream, dropout_p: float,
                   cosine_head: bool = False,
                   validate: Callable[[dict[str, np.ndarray]], float] | None = None) -> dict[str, np.ndarray]:
    """Joint Adam training of the embedding and a base head on mini-batches of pooled samples."""
    head = LinearHead.random(n_classes, embedding.dim, rng.child(STAGE_HEAD), std=1.0 / np.sqrt(embedding.dim))
    params = {**embedding.params(), **head.params()}
    generator = rng.child(STAGE_BATCHES).generator()
    state = AdamState(lr=lr)
    best = BestCheckpoint()
    batch_size = min(cfg.batch_size, len(labels))

    for step in range(1, steps + 1):
        batch = generator.choice(len(labels), batch_size, replace=False)
        mask = dropout_mask(generator, dropout_p, (batch_size, embedding.dim)) if dropout_p > 0.0 else None
        loss, grads = classification_loss(params, pooled[batch], labels[batch], mask, cosine_head, cfg.tau)
        params = adam_step(state, params, grads)

        if validate is not None and (step % cfg.eval_every == 0 or step == steps):
            score = validate(params)
            best.offer(score, params)
            logger.info('step %d: loss %.4f, validation accuracy %.4f', step, loss, score)
        elif step % cfg.eval_every == 0:
            logger.info('step %d: loss %.4f', step, loss)

    return best.params if best.params is not None else params


def _classifier_model(cfg: MethodConfig, params: dict[str, np.ndarray]) -> TrainedModel:
    return TrainedModel(
        config=cfg,
        embedding=EmbeddingParams(params['W_e'], params['b_e']),
        base_head=LinearHead(params['W'], params['b']),
    )


def train_classification(manifest: Manifest, cfg: MethodConfig, embedding: EmbeddingParams | None = None) -> TrainedModel:
    """Base training of a classifier method on every train-split sample."""
    if cfg.method_kind not in CLASSIFIER_METHODS:
        raise DataValidationError(f'{cfg.method_kind.value} is not a classifier method')
    pooled, labels, class_ids = pooled_dataset(load_split(manifest, Split.train))
    if len(labels) == 0:
        raise CapacityError('train split is empty')

    root = RngStream(cfg.seed)
    if embedding is None:
        embedding = EmbeddingParams.random(manifest.feature_dim, cfg.embed_dim, root.child(STAGE_INIT))

    val = validation_split(manifest, cfg)
    validate = None
    if val is not None:
        def validate(params):
            return _validate(_classifier_model(cfg, params), cfg, val)

    logger.info('training %s on %d samples of %d classes', cfg.method_kind.value, len(labels), len(class_ids))
    params = fit_classifier(pooled, labels, len(class_ids), embedding, cfg, cfg.train_steps, cfg.lr_base, root,
                            cfg.dropout_p, cfg.method_kind == Method.cosine_classifier, validate)
    return _classifier_model(cfg, params)


def _metric_model(cfg: MethodConfig, params: dict[str, np.ndarray], scale: float | None) -> TrainedModel:
    saliency = SaliencyParams(params['queries'], scale) if 'queries' in params else None
    return TrainedModel(config=cfg, embedding=EmbeddingParams(params['W_e'], params['b_e']), saliency=saliency)


def meta_train(manifest: Manifest, cfg: MethodConfig, embedding: EmbeddingParams | None = None) -> TrainedModel:
    """Episodic training of a metric method, one query per episode."""
    if not cfg.is_metric:
        raise DataValidationError(f'{cfg.method_kind.value} is not a metric method')
    train = load_split(manifest, Split.train)
    if len(train) < cfg.n_way:
        raise CapacityError(f'train split has {len(train)} classes, {cfg.n_way} required')

    root = RngStream(cfg.seed)
    if embedding is None:
        embedding = EmbeddingParams.random(manifest.feature_dim, cfg.embed_dim, root.child(STAGE_INIT))
    params = embedding.params()
    scale = None
    if cfg.method_kind == Method.cmn_lite:
        saliency = SaliencyParams.zeros(cfg.saliency_heads, embedding.dim)
        params['queries'] = saliency.queries
        scale = saliency.scale

    val = validation_split(manifest, cfg)
    state = AdamState(lr=cfg.lr_base)
    best = BestCheckpoint()

    for epoch in range(cfg.epochs):
        losses = []
        for index in range(cfg.episodes_per_epoch):
            episode = sample_episode(train, cfg.n_way, cfg.k_shot, root.child(STAGE_EPISODES, epoch, index))
            model = _metric_model(cfg, params, scale)
            loss, grads, _ = metric_episode_loss(cfg.method_kind, model.embedding, model.saliency, episode,
                                                 cfg.tau, cfg.dtw_normalize)
            params = adam_step(state, params, grads)
            losses.append(loss)

        if val is None:
            logger.info('epoch %d: loss %.4f', epoch, float(np.mean(losses)))
            continue
        score = _validate(_metric_model(cfg, params, scale), cfg, val)
        best.offer(score, params)
        logger.info('epoch %d: loss %.4f, validation accuracy %.4f', epoch, float(np.mean(losses)), score)
        if best.rounds_without_gain >= cfg.patience:
            logger.info('early stop after epoch %d', epoch)
            break

    return _metric_model(cfg, best.params if best.params is not None else params, scale)


def pretrain_embedding(pretrain_manifest: Manifest, cfg: MethodConfig, benchmark_manifest: Manifest) -> EmbeddingParams:
    """Classification pretraining on classes disjoint from the benchmark; the head is discarded."""
    overlap = sorted(set(pretrain_manifest.class_ids()) & set(benchmark_manifest.class_ids()))
    if overlap:
        raise LeakageError(f'pretrain classes overlap the benchmark: {overlap}')

    root = RngStream(cfg.seed)
    embedding = EmbeddingParams.random(benchmark_manifest.feature_dim, cfg.embed_dim, root.child(STAGE_INIT))
    split = {}
    for split_name in Split:
        split.update(load_split(pretrain_manifest, split_name))
    if not split:
        return embedding

    pooled, labels, class_ids = pooled_dataset(split)
    logger.info('pretraining embedding on %d samples of %d classes', len(labels), len(class_ids))
    params = fit_classifier(pooled, labels, len(class_ids), embedding, cfg, cfg.pretrain_steps, PRETRAIN_LR,
                            root.child(STAGE_PRETRAIN), 0.0)
    return EmbeddingParams(params['W_e'], params['b_e'])


def template_loss(manifest: Manifest, embedding: EmbeddingParams, tau: float = DEFAULT_TAU) -> float:
    """Train-split cross-entropy of cosine scores against the class-mean templates of a frozen embedding.

    Nothing is fitted, so the value depends on the embedding alone; lower means a more useful init.
    """
    pooled, labels, class_ids = pooled_dataset(load_split(manifest, Split.train))
    features = pooled @ embedding.W_e.T + embedding.b_e
    templates = class_means(features, labels, len(class_ids))
    logits, _ = cosine_logits(features, templates, tau)
    return mean_softmax_xent(logits, labels)[0]


def train_model(manifest: Manifest, cfg: MethodConfig, pretrain_manifest: Manifest | None = None) -> TrainedModel:
    embedding = None
    if Init(cfg.init) == Init.pretrained:
        if pretrain_manifest is None:
            raise DataValidationError('init "pretrained" needs a pretrain manifest')
        embedding = pretrain_embedding(pretrain_manifest, cfg, manifest)
    if cfg.is_metric:
        return meta_train(manifest, cfg, embedding)
    return train_classification(manifest, cfg, embedding)
