"""
Synthetic benchmark: every class is a smooth random trajectory (the prototype) and
every video samples T of its rows through a random monotone time warp plus Gaussian noise.
The warp produces exactly the temporal misalignment that DTW is meant to undo.
"""
import logging
from pathlib import Path

import numpy as np

from config import FEATURE_FILE_SUFFIX, MANIFEST_NAME, PRETRAIN_MANIFEST_NAME
from core.feature_io import write_feature_file
from core.feature_schemas import ClassEntry, FeatureSequence, Manifest, Split, VideoEntry
from core.manifest_io import save_manifest
from core.rng import RngStream
from shared.exceptions import DataValidationError
from synthdata.generator_schemas import GeneratorSpec


logger = logging.getLogger(__name__)

PROTOTYPE_TAG = 0
VIDEO_TAG = 1
OFFSET_TAG = 2


def gen_class_prototype(rng: RngStream, c_in: int, length: int) -> np.ndarray:
    """Cumulative sum of unit-variance steps, standardized per column (length x c_in)."""
    if c_in < 1 or length < 1:
        raise DataValidationError(f'c_in and length must be >= 1, got c_in={c_in}, length={length}')
    steps = rng.generator().standard_normal((length, c_in))
    if length == 1:
        return steps
    trajectory = np.cumsum(steps, axis=0)
    trajectory = trajectory - trajectory.mean(axis=0)
    std = trajectory.std(axis=0)
    std[std == 0.0] = 1.0
    return trajectory / std


def gen_class_offset(rng: RngStream, c_in: int, scale: float, channels: int | None = None) -> np.ndarray:
    """Constant class signature: N(0, scale^2) on the first `channels` inputs, zero elsewhere."""
    offset = np.zeros(c_in)
    channels = c_in if channels is None else channels
    offset[:channels] = rng.generator().normal(0.0, scale, channels)
    return offset


def uniform_positions(length: int, frame_count: int) -> np.ndarray:
    return np.linspace(0.0, length - 1, frame_count)


def strictly_increasing(indices: np.ndarray, length: int) -> np.ndarray:
    """Pushes rounded indices apart so they are strictly increasing inside [0, length - 1]."""
    indices = indices.copy()
    count = len(indices)
    for t in range(1, count):
        indices[t] = max(indices[t], indices[t - 1] + 1)
    for t in range(count):
        indices[t] = min(indices[t], length - count + t)
    return indices


def warp_indices(length: int, frame_count: int, warp_strength: float, generator: np.random.Generator) -> np.ndarray:
    """Frame indices of one video: uniform spacing blended with a random monotone sample."""
    positions = uniform_positions(length, frame_count)
    if warp_strength > 0.0:
        random_positions = np.sort(generator.uniform(0.0, length - 1, frame_count))
        positions = (1.0 - warp_strength) * positions + warp_strength * random_positions
    return strictly_increasing(np.rint(positions).astype(np.int64), length)


def gen_video(proto: np.ndarray, spec: GeneratorSpec, rng: RngStream,
              video_id: str = 'video', class_id: int = 0) -> FeatureSequence:
    if proto.shape[0] != spec.prototype_length:
        raise DataValidationError(f'prototype has {proto.shape[0]} rows, expected {spec.prototype_length}')
    generator = rng.generator()
    indices = warp_indices(spec.prototype_length, spec.t, spec.warp_strength, generator)
    frames = proto[indices]
    if spec.noise_sigma > 0.0:
        frames = frames + generator.normal(0.0, spec.noise_sigma, frames.shape)
    if spec.video_offset > 0.0:
        frames = frames + generator.normal(0.0, spec.video_offset, proto.shape[1])
    return FeatureSequence(video_id=video_id, class_id=class_id, frames=frames)


def class_layout(spec: GeneratorSpec) -> tuple[dict[Split, list[int]], list[int]]:
    """Class ids per split, then the extra pretraining class ids"""
    layout = {}
    next_id = 0
    for split, count in zip(Split, spec.n_classes_per_split):
        layout[split] = list(range(next_id, next_id + count))
        next_id += count
    return layout, list(range(next_id, next_id + spec.pretrain_classes))


def _write_classes(spec: GeneratorSpec, class_splits: list[tuple[int, Split]], out_dir: Path) -> Manifest:
    root = RngStream(spec.seed)
    classes = []
    videos = []
    for class_id, split in class_splits:
        classes.append(ClassEntry(class_id=class_id, class_name=f'synthetic_{class_id:04d}'))
        proto = gen_class_prototype(root.child(PROTOTYPE_TAG, class_id), spec.c_in, spec.prototype_length)
        if spec.class_offset > 0.0:
            proto = proto + gen_class_offset(root.child(OFFSET_TAG, class_id), spec.c_in, spec.class_offset,
                                             spec.offset_channels)
        for number in range(spec.videos_per_class):
            video_id = f'c{class_id:04d}_v{number:04d}'
            seq = gen_video(proto, spec, root.child(VIDEO_TAG, class_id, number), video_id, class_id)
            file_path = Path('features').joinpath(video_id).with_suffix(FEATURE_FILE_SUFFIX)
            write_feature_file(seq, out_dir.joinpath(file_path))
            videos.append(VideoEntry(video_id=video_id, class_id=class_id, file_path=file_path.as_posix(), split=split))
    return Manifest(frame_count=spec.t, feature_dim=spec.c_in, classes=classes, videos=videos,
                    root_dir=str(out_dir.resolve()))


def gen_benchmark(spec: GeneratorSpec, out_dir: Path) -> Manifest:
    """Writes feature files and manifests; the pretrain manifest only when pretrain_classes > 0."""
    out_dir = Path(out_dir)
    layout, pretrain_ids = class_layout(spec)

    benchmark = [(class_id, split) for split, ids in layout.items() for class_id in ids]
    manifest = _write_classes(spec, benchmark, out_dir)
    save_manifest(manifest, out_dir.joinpath(MANIFEST_NAME))
    logger.info('generated %d videos of %d classes in %s', len(manifest.videos), len(manifest.classes), out_dir)

    if pretrain_ids:
        pretrain = _write_classes(spec, [(class_id, Split.train) for class_id in pretrain_ids], out_dir)
        save_manifest(pretrain, out_dir.joinpath(PRETRAIN_MANIFEST_NAME))
        logger.info('generated pretrain set of %d classes', len(pretrain_ids))

    return manifest
