import logging

from core.feature_schemas import Manifest, Split
from core.rng import RngStream
from shared.exceptions import CapacityError, DataValidationError


logger = logging.getLogger(__name__)


def build_splits(full_manifest: Manifest, class_counts: tuple[int, int, int],
                 caps: dict[Split, int | None] | None = None, seed: int = 0) -> Manifest:
    """Deterministic disjoint class partition with optional per-class video caps.

    A train cap of 100 mimics the original few-shot Kinetics split; no cap keeps every
    training video, the complete-benchmark setting.
    """
    if any(count < 0 for count in class_counts):
        raise DataValidationError(f'class counts must be non-negative, got {class_counts}')
    caps = caps or {}
    class_ids = full_manifest.class_ids()
    needed = sum(class_counts)
    if needed > len(class_ids):
        raise CapacityError(f'{needed} classes requested, manifest has {len(class_ids)} (short by {needed - len(class_ids)})')

    generator = RngStream(seed).generator()
    order = [class_ids[i] for i in generator.permutation(len(class_ids))]
    assignment = {}
    start = 0
    for split, count in zip(Split, class_counts):
        for class_id in order[start:start + count]:
            assignment[class_id] = split
        start += count

    by_class = {}
    for video in full_manifest.videos:
        if video.class_id in assignment:
            by_class.setdefault(video.class_id, []).append(video)

    videos = []
    for class_id in sorted(by_class):
        split = assignment[class_id]
        members = by_class[class_id]
        cap = caps.get(split)
        if cap is not None and len(members) > cap:
            keep = sorted(generator.choice(len(members), cap, replace=False).tolist())
            members = [members[i] for i in keep]
        videos.extend(video.copy(update={'split': split.value}) for video in members)

    classes = [entry for entry in full_manifest.classes if entry.class_id in assignment]
    logger.info('split %d classes into %s with caps %s', needed, class_counts,
                {split.value: cap for split, cap in caps.items()})
    return Manifest(
        frame_count=full_manifest.frame_count,
        feature_dim=full_manifest.feature_dim,
        classes=classes,
        videos=videos,
        root_dir=full_manifest.root_dir,
    )
