import hashlib
import json
from enum import Enum

from pydantic import BaseModel, Field, root_validator

from config import DEFAULT_ADAPT_ITERS, DEFAULT_DROPOUT, DEFAULT_EMBED_DIM, DEFAULT_SALIENCY_HEADS, DEFAULT_TAU


class Method(str, Enum):
    meta_baseline = 'meta-baseline'
    cmn_lite = 'cmn-lite'
    otam_lite = 'otam-lite'
    baseline = 'baseline'
    baseline_plus = 'baseline-plus'
    cosine_classifier = 'cosine-classifier'


METRIC_METHODS = (Method.meta_baseline, Method.cmn_lite, Method.otam_lite)
CLASSIFIER_METHODS = (Method.baseline, Method.baseline_plus, Method.cosine_classifier)


class Init(str, Enum):
    scratch = 'scratch'
    pretrained = 'pretrained'


class MethodConfig(BaseModel):
    """Training and adaptation settings of one method.

    lr_base defaults to 1e-3 from scratch, and to 1e-4 (classifier methods) or
    1e-5 (metric methods) when the embedding starts from pretrained weights.
    dropout_p defaults to 0.5 for baseline-plus and 0 for every other method.
    """
    method: Method
    n_way: int = Field(5, ge=2)
    k_shot: int = Field(1, ge=1)
    tau: float = Field(DEFAULT_TAU, gt=0.0)
    lr_base: float | None = Field(None, gt=0.0)
    lr_adapt: float = Field(1e-3, gt=0.0)
    iters_adapt: int = Field(DEFAULT_ADAPT_ITERS, ge=0)
    dropout_p: float | None = Field(None, ge=0.0, lt=1.0)
    init: Init = Init.scratch
    seed: int = Field(0, ge=0, le=(1 << 64) - 1)

    embed_dim: int = Field(DEFAULT_EMBED_DIM, ge=1)
    saliency_heads: int = Field(DEFAULT_SALIENCY_HEADS, ge=1)
    dtw_normalize: bool = False
    use_imprint: bool = True

    # classification training
    batch_size: int = Field(32, ge=1)
    train_steps: int = Field(500, ge=0)
    eval_every: int = Field(100, ge=1)
    pretrain_steps: int = Field(300, ge=0)

    # episodic training
    epochs: int = Field(10, ge=0)
    episodes_per_epoch: int = Field(200, ge=1)

    # validation-based model selection
    val_episodes: int = Field(200, ge=0)
    patience: int = Field(3, ge=1)

    class Config:
        frozen = True
        use_enum_values = True

    @root_validator(skip_on_failure=True)
    def resolve_defaults(cls, values):
        method = Method(values['method'])
        if values.get('lr_base') is None:
            if Init(values['init']) == Init.scratch:
                values['lr_base'] = 1e-3
            elif method in CLASSIFIER_METHODS:
                values['lr_base'] = 1e-4
            else:
                values['lr_base'] = 1e-5
        if values.get('dropout_p') is None:
            values['dropout_p'] = DEFAULT_DROPOUT if method == Method.baseline_plus else 0.0
        elif method == Method.cosine_classifier and values['dropout_p'] > 0.0:
            raise ValueError('cosine-classifier is trained without dropout')
        return values

    @property
    def method_kind(self) -> Method:
        return Method(self.method)

    @property
    def is_metric(self) -> bool:
        return self.method_kind in METRIC_METHODS

    def payload(self) -> dict:
        data = self.dict()
        return {key: (value.value if isinstance(value, Enum) else value) for key, value in data.items()}

    def fingerprint(self) -> str:
        canonical = json.dumps(self.payload(), sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(canonical.encode('utf-8')).hexdigest()[:16]
