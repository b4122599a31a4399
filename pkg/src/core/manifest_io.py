import logging
import os
from pathlib import Path

from core.feature_io import read_feature_file
from core.feature_schemas import FeatureSequence, Manifest, Split, VideoEntry
from shared.common_schemas import parse_model
from shared.exceptions import DataValidationError, FeatureFormatError, FeatureIOError
from shared.file_transporter import load_json, save_json


logger = logging.getLogger(__name__)


def save_manifest(manifest: Manifest, path: Path) -> None:
    save_json(Path(path), manifest.payload())


def load_manifest(path: Path, check_files: bool = True) -> Manifest:
    """Loads a manifest, checks split disjointness and that every feature file exists."""
    path = Path(path)
    if not path.is_file():
        raise FeatureIOError('manifest does not exist', str(path))

    data = load_json(path)
    if not isinstance(data, dict):
        raise FeatureFormatError('manifest is not a JSON object', str(path))

    missing = [key for key in ('frame_count', 'feature_dim', 'classes', 'videos') if key not in data]
    if missing:
        raise FeatureFormatError(f'manifest misses fields: {missing}', str(path))

    manifest = parse_model(Manifest, {**data, 'root_dir': str(path.resolve().parent)}, str(path))

    if check_files:
        for video in manifest.videos:
            if not resolve_video_path(manifest, video).is_file():
                raise DataValidationError(f'feature file does not exist: {video.file_path}', video.video_id)
    return manifest


def resolve_video_path(manifest: Manifest, video: VideoEntry) -> Path:
    file_path = Path(video.file_path)
    if file_path.is_absolute() or manifest.root_dir is None:
        return file_path
    return Path(manifest.root_dir).joinpath(file_path)


def load_split(manifest: Manifest, split: Split | str) -> dict[int, list[FeatureSequence]]:
    """Reads all sequences of a split, grouped by class_id in manifest order."""
    grouped: dict[int, list[FeatureSequence]] = {}
    for video in manifest.videos_in(split):
        seq = read_feature_file(resolve_video_path(manifest, video), video_id=video.video_id, class_id=video.class_id)
        if seq.frame_count != manifest.frame_count or seq.feature_dim != manifest.feature_dim:
            raise DataValidationError(
                f'sequence shape ({seq.frame_count}, {seq.feature_dim}) does not match manifest '
                f'({manifest.frame_count}, {manifest.feature_dim})',
                video.video_id,
            )
        grouped.setdefault(video.class_id, []).append(seq)
    logger.debug('loaded %d classes of split %s', len(grouped), Split(split).value)
    return {class_id: grouped[class_id] for class_id in sorted(grouped)}


def rebase_manifest(manifest: Manifest, new_root: Path) -> Manifest:
    """Same manifest with file paths rewritten relative to `new_root`"""
    new_root = Path(new_root).resolve()
    videos = []
    for video in manifest.videos:
        absolute = resolve_video_path(manifest, video).resolve()
        relative = Path(os.path.relpath(absolute, new_root)).as_posix()
        videos.append(video.copy(update={'file_path': relative}))
    return manifest.copy(update={'videos': videos, 'root_dir': str(new_root)})
