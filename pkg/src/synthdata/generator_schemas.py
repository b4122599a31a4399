from pydantic import BaseModel, Field, validator

from config import DEFAULT_FEATURE_DIM, DEFAULT_FRAME_COUNT, DEFAULT_PROTOTYPE_LENGTH


class GeneratorSpec(BaseModel):
    """Parameters of a synthetic benchmark"""
    n_classes_per_split: tuple[int, int, int] = (64, 12, 24)
    videos_per_class: int = Field(100, ge=1)
    c_in: int = Field(DEFAULT_FEATURE_DIM, ge=1)
    t: int = Field(DEFAULT_FRAME_COUNT, ge=1)
    prototype_length: int = Field(DEFAULT_PROTOTYPE_LENGTH, ge=1)
    noise_sigma: float = Field(0.1, ge=0.0)
    warp_strength: float = Field(0.0, ge=0.0, le=1.0)
    seed: int = Field(0, ge=0, le=(1 << 64) - 1)
    pretrain_classes: int = Field(0, ge=0)

    # time-constant components; temporal pooling keeps only these and the trajectory residual
    class_offset: float = Field(0.0, ge=0.0)
    offset_channels: int | None = Field(None, ge=1)
    video_offset: float = Field(0.0, ge=0.0)

    class Config:
        frozen = True

    @validator('n_classes_per_split')
    def non_negative_splits(cls, value):
        if any(count < 0 for count in value):
            raise ValueError('class counts must be non-negative')
        return value

    @validator('prototype_length')
    def prototype_covers_frames(cls, value, values):
        if 't' in values and value < values['t']:
            raise ValueError(f'prototype_length must be >= t ({values["t"]})')
        return value

    @validator('offset_channels')
    def offset_fits_channels(cls, value, values):
        if value is not None and 'c_in' in values and value > values['c_in']:
            raise ValueError(f'offset_channels must be <= c_in ({values["c_in"]})')
        return value
