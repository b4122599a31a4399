from collections import Counter
from dataclasses import dataclass

import numpy as np

from core.feature_schemas import FeatureSequence
from core.rng import RngStream, as_generator
from shared.exceptions import CapacityError, DataValidationError


SplitData = dict[int, list[FeatureSequence]]


@dataclass(frozen=True)
class Episode:
    """One n-way k-shot task with a single query. class_map[k] is the global class of local label k."""
    support: tuple[tuple[FeatureSequence, int], ...]
    query: tuple[FeatureSequence, int]
    class_map: tuple[int, ...]

    def __post_init__(self):
        n_way = len(self.class_map)
        if len(set(self.class_map)) != n_way:
            raise DataValidationError(f'episode classes are not distinct: {self.class_map}')
        counts = Counter(label for _, label in self.support)
        if set(counts) != set(range(n_way)) or len(set(counts.values())) != 1:
            raise DataValidationError(f'unbalanced support labels: {dict(sorted(counts.items()))}')
        if not 0 <= self.query[1] < n_way:
            raise DataValidationError(f'query label {self.query[1]} out of range')
        if self.query[0].video_id in {seq.video_id for seq, _ in self.support}:
            raise DataValidationError('query video appears in the support set', self.query[0].video_id)

    @property
    def n_way(self) -> int:
        return len(self.class_map)

    @property
    def k_shot(self) -> int:
        return len(self.support) // self.n_way

    @property
    def support_labels(self) -> np.ndarray:
        return np.array([label for _, label in self.support], dtype=np.int64)

    @property
    def support_frames(self) -> list[np.ndarray]:
        return [seq.frames for seq, _ in self.support]

    @property
    def query_frames(self) -> np.ndarray:
        return self.query[0].frames

    @property
    def query_label(self) -> int:
        return self.query[1]


def check_capacity(split: SplitData, n_way: int, k_shot: int) -> None:
    if len(split) < n_way:
        raise CapacityError(f'split has {len(split)} classes, {n_way} required (short by {n_way - len(split)})')
    for class_id, videos in split.items():
        if len(videos) < k_shot + 1:
            raise CapacityError(
                f'class {class_id} has {len(videos)} videos, {k_shot + 1} required '
                f'(short by {k_shot + 1 - len(videos)})'
            )


def sample_episode(split: SplitData, n_way: int, k_shot: int,
                   rng: RngStream | np.random.Generator) -> Episode:
    """Uniform classes without replacement, uniform videos without replacement inside each class."""
    check_capacity(split, n_way, k_shot)
    generator = as_generator(rng)
    class_ids = sorted(split)
    chosen = [class_ids[i] for i in generator.choice(len(class_ids), n_way, replace=False)]
    query_label = int(generator.integers(n_way))

    support = []
    query = None
    for label, class_id in enumerate(chosen):
        videos = split[class_id]
        need = k_shot + 1 if label == query_label else k_shot
        picked = generator.choice(len(videos), need, replace=False)
        support.extend((videos[i], label) for i in picked[:k_shot])
        if label == query_label:
            query = (videos[picked[k_shot]], label)
    return Episode(support=tuple(support), query=query, class_map=tuple(chosen))
