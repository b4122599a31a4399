from dataclasses import dataclass

from align.saliency import SaliencyParams
from heads.linear import LinearHead
from protocols.embedding import EmbeddingParams
from protocols.method_schemas import CLASSIFIER_METHODS, Method, MethodConfig
from shared.exceptions import DataValidationError


@dataclass(frozen=True)
class TrainedModel:
    """Embedding plus the method-specific parts: a base head for classifier methods, saliency for cmn-lite."""
    config: MethodConfig
    embedding: EmbeddingParams
    base_head: LinearHead | None = None
    saliency: SaliencyParams | None = None

    def __post_init__(self):
        method = self.config.method_kind
        if (self.base_head is not None) != (method in CLASSIFIER_METHODS):
            raise DataValidationError(f'base head presence does not match method {method.value}')
        if (self.saliency is not None) != (method == Method.cmn_lite):
            raise DataValidationError(f'saliency presence does not match method {method.value}')

    @property
    def method(self) -> Method:
        return self.config.method_kind

    @property
    def fingerprint(self) -> str:
        return self.config.fingerprint()
