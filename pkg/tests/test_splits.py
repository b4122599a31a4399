from collections import Counter

import pytest

from core.feature_schemas import ClassEntry, Manifest, Split, VideoEntry
from harness.splits import build_splits
from shared.exceptions import CapacityError, DataValidationError


def full_manifest(classes: int = 100, videos: int = 20) -> Manifest:
    return Manifest(
        frame_count=4,
        feature_dim=3,
        classes=[ClassEntry(class_id=c, class_name=f'class_{c}') for c in range(classes)],
        videos=[VideoEntry(video_id=f'c{c}_v{n}', class_id=c, file_path=f'features/c{c}_v{n}.fsvf', split='train')
                for c in range(classes) for n in range(videos)],
    )


def test_partition_is_exact_and_disjoint():
    manifest = build_splits(full_manifest(), (64, 12, 24), seed=3)
    train, val, test = (set(manifest.class_ids_in(split)) for split in Split)
    assert (len(train), len(val), len(test)) == (64, 12, 24)
    assert not (train & val or train & test or val & test)
    assert train | val | test == set(range(100))
    assert len(manifest.videos) == 100 * 20


def test_train_cap():
    manifest = build_splits(full_manifest(), (64, 12, 24), {Split.train: 10}, seed=3)
    train_counts = Counter(video.class_id for video in manifest.videos_in(Split.train))
    assert set(train_counts.values()) == {10}
    assert len(manifest.videos_in(Split.test)) == 24 * 20


def test_cap_above_class_size_keeps_everything():
    manifest = build_splits(full_manifest(classes=10, videos=5), (4, 3, 3), {Split.train: 100})
    assert len(manifest.videos_in(Split.train)) == 4 * 5


def test_no_cap_and_cap_use_the_same_classes():
    uncapped = build_splits(full_manifest(), (64, 12, 24), seed=5)
    capped = build_splits(full_manifest(), (64, 12, 24), {Split.train: 10}, seed=5)
    for split in Split:
        assert uncapped.class_ids_in(split) == capped.class_ids_in(split)


def test_same_seed_same_manifest():
    first = build_splits(full_manifest(), (64, 12, 24), {Split.train: 10}, seed=1)
    second = build_splits(full_manifest(), (64, 12, 24), {Split.train: 10}, seed=1)
    other = build_splits(full_manifest(), (64, 12, 24), {Split.train: 10}, seed=2)
    assert first.payload() == second.payload()
    assert first.payload() != other.payload()


def test_unused_classes_are_dropped():
    manifest = build_splits(full_manifest(classes=30), (10, 5, 5), seed=0)
    assert len(manifest.classes) == 20
    assert {video.class_id for video in manifest.videos} == {entry.class_id for entry in manifest.classes}


def test_too_many_classes_requested():
    with pytest.raises(CapacityError, match='short by 1'):
        build_splits(full_manifest(), (64, 12, 25))


def test_negative_counts():
    with pytest.raises(DataValidationError):
        build_splits(full_manifest(), (64, -1, 24))
