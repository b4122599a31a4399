from dataclasses import dataclass
from enum import Enum

import numpy as np
from pydantic import BaseModel, Field, root_validator

from shared.exceptions import DataValidationError


@dataclass(frozen=True)
class FeatureSequence:
    """Per-frame feature vectors of one video: T rows (time) x C_in columns."""
    video_id: str
    class_id: int
    frames: np.ndarray

    def __post_init__(self):
        frames = np.array(self.frames, dtype=np.float64)
        if frames.ndim != 2:
            raise DataValidationError(f'frames must be a T x C_in matrix, got shape {frames.shape}', self.video_id)
        if frames.shape[0] < 1 or frames.shape[1] < 1:
            raise DataValidationError(f'frames must have T >= 1 and C_in >= 1, got shape {frames.shape}', self.video_id)
        if not np.all(np.isfinite(frames)):
            raise DataValidationError('frames contain non-finite values', self.video_id)
        if self.class_id < 0:
            raise DataValidationError(f'class_id must be >= 0, got {self.class_id}', self.video_id)
        frames.setflags(write=False)
        object.__setattr__(self, 'frames', frames)

    @property
    def frame_count(self) -> int:
        return self.frames.shape[0]

    @property
    def feature_dim(self) -> int:
        return self.frames.shape[1]


class Split(str, Enum):
    train = 'train'
    val = 'val'
    test = 'test'


class ClassEntry(BaseModel):
    class_id: int = Field(..., ge=0)
    class_name: str

    class Config:
        frozen = True


class VideoEntry(BaseModel):
    video_id: str
    class_id: int = Field(..., ge=0)
    file_path: str
    split: Split

    class Config:
        frozen = True
        use_enum_values = True


class Manifest(BaseModel):
    """Dataset description: classes, videos and their split assignment.

    `root_dir` is where relative file paths resolve; it is set on load and never serialized.
    """
    frame_count: int = Field(..., ge=1)
    feature_dim: int = Field(..., ge=1)
    classes: list[ClassEntry]
    videos: list[VideoEntry]
    root_dir: str | None = None

    class Config:
        frozen = True

    @root_validator(skip_on_failure=True)
    def check_splits(cls, values):
        known = {entry.class_id for entry in values['classes']}
        if len(known) != len(values['classes']):
            raise DataValidationError('duplicate class_id in classes')

        split_classes: dict[str, set[int]] = {split.value: set() for split in Split}
        for video in values['videos']:
            if video.class_id not in known:
                raise DataValidationError(f'class_id {video.class_id} is not listed in classes', video.video_id)
            split_classes[Split(video.split).value].add(video.class_id)

        offending = set()
        names = [split.value for split in Split]
        for i, first in enumerate(names):
            for second in names[i + 1:]:
                offending |= split_classes[first] & split_classes[second]
        if offending:
            raise DataValidationError(f'class sets of splits overlap, offending class_ids: {sorted(offending)}')
        return values

    def payload(self) -> dict:
        """Serializable content in fixed field order"""
        return {
            'frame_count': self.frame_count,
            'feature_dim': self.feature_dim,
            'classes': [{'class_id': c.class_id, 'class_name': c.class_name} for c in self.classes],
            'videos': [
                {
                    'video_id': v.video_id,
                    'class_id': v.class_id,
                    'file_path': v.file_path,
                    'split': Split(v.split).value,
                }
                for v in self.videos
            ],
        }

    def videos_in(self, split: Split | str) -> list[VideoEntry]:
        split = Split(split).value
        return [v for v in self.videos if Split(v.split).value == split]

    def class_ids_in(self, split: Split | str) -> list[int]:
        return sorted({v.class_id for v in self.videos_in(split)})

    def class_ids(self) -> list[int]:
        return sorted(c.class_id for c in self.classes)
