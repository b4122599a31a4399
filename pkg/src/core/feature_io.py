"""
FSVF feature files.

Layout (little-endian): magic b'FSVF', u32 version = 1, u32 T, u32 C_in,
then T * C_in float32 values, row t contiguous.
"""
import struct
from pathlib import Path

import numpy as np

from core.feature_schemas import FeatureSequence
from shared.exceptions import DataValidationError, FeatureFormatError, FeatureIOError, FeatureLengthError


MAGIC = b'FSVF'
VERSION = 1
HEADER = struct.Struct('<4sIII')


def encode_feature_sequence(seq: FeatureSequence) -> bytes:
    with np.errstate(over='ignore'):
        payload = seq.frames.astype('<f4')
    if not np.all(np.isfinite(payload)):
        raise DataValidationError('frames are not representable in single precision', seq.video_id)
    return HEADER.pack(MAGIC, VERSION, seq.frame_count, seq.feature_dim) + payload.tobytes(order='C')


def decode_feature_sequence(data: bytes, video_id: str, class_id: int = 0) -> FeatureSequence:
    if len(data) < 4 or data[:4] != MAGIC:
        raise FeatureFormatError(f'bad magic {data[:4]!r}, expected {MAGIC!r}', video_id)
    if len(data) < HEADER.size:
        raise FeatureLengthError(f'truncated header: expected {HEADER.size} bytes, got {len(data)}', video_id)

    _, version, frame_count, feature_dim = HEADER.unpack_from(data)
    if version != VERSION:
        raise FeatureFormatError(f'unsupported version {version}, expected {VERSION}', video_id)

    expected = frame_count * feature_dim * 4
    actual = len(data) - HEADER.size
    if actual != expected:
        raise FeatureLengthError(f'payload length mismatch: expected {expected} bytes, got {actual}', video_id)

    frames = np.frombuffer(data, dtype='<f4', offset=HEADER.size).reshape(frame_count, feature_dim)
    return FeatureSequence(video_id=video_id, class_id=class_id, frames=frames.astype(np.float64))


def write_feature_file(seq: FeatureSequence, path: Path) -> None:
    data = encode_feature_sequence(seq)
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
    except OSError as exc:
        raise FeatureIOError(f'cannot write feature file: {exc.strerror}', str(path)) from exc


def read_feature_file(path: Path, video_id: str | None = None, class_id: int = 0) -> FeatureSequence:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise FeatureIOError(f'cannot read feature file: {exc.strerror}', str(path)) from exc
    return decode_feature_sequence(data, video_id or path.stem, class_id)
