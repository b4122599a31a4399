from typing import Any, Type, TypeVar

from pydantic import BaseModel, ValidationError

from shared.exceptions import DataValidationError


ModelT = TypeVar('ModelT', bound=BaseModel)


class OutputDataDTO(BaseModel):
    """
    Command result printed to stdout
    """
    success: bool = True
    data: Any = None
    details: Any = None


def parse_model(model_cls: Type[ModelT], data: dict, location: str | None = None) -> ModelT:
    """Builds a pydantic model, reporting field errors as DataValidationError"""
    if not isinstance(data, dict):
        raise DataValidationError('JSON object expected', location)
    try:
        return model_cls(**data)
    except ValidationError as exc:
        problems = '; '.join(f'{".".join(str(part) for part in error["loc"])}: {error["msg"]}' for error in exc.errors())
        raise DataValidationError(f'invalid {model_cls.__name__}: {problems}', location)
