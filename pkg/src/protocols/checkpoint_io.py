"""
FSVM model checkpoints.

Layout (little-endian): magic b'FSVM', u32 version = 1, u32 block count, then per block
u16 name length, UTF-8 name, u32 rows, u32 cols, rows * cols float64 values row-major;
finally u32 config length and the UTF-8 JSON of the method config with its fingerprint.
"""
import json
import struct
from pathlib import Path

import numpy as np

from align.saliency import SaliencyParams
from heads.linear import LinearHead
from protocols.embedding import EmbeddingParams
from protocols.method_schemas import MethodConfig
from protocols.model import TrainedModel
from shared.common_schemas import parse_model
from shared.exceptions import FeatureFormatError, FeatureIOError, FeatureLengthError


MAGIC = b'FSVM'
VERSION = 1
REQUIRED_BLOCKS = ('embedding.W_e', 'embedding.b_e')


def _blocks(model: TrainedModel) -> list[tuple[str, np.ndarray]]:
    blocks = [('embedding.W_e', model.embedding.W_e), ('embedding.b_e', model.embedding.b_e[None, :])]
    if model.base_head is not None:
        blocks += [('base_head.W', model.base_head.W), ('base_head.b', model.base_head.b[None, :])]
    if model.saliency is not None:
        blocks += [('saliency.queries', model.saliency.queries),
                   ('saliency.scale', np.array([[model.saliency.scale]]))]
    return blocks


def encode_checkpoint(model: TrainedModel) -> bytes:
    blocks = _blocks(model)
    parts = [MAGIC, struct.pack('<II', VERSION, len(blocks))]
    for name, values in blocks:
        encoded = name.encode('utf-8')
        parts.append(struct.pack('<H', len(encoded)) + encoded)
        parts.append(struct.pack('<II', *values.shape))
        parts.append(np.ascontiguousarray(values, dtype='<f8').tobytes())
    config = dict(model.config.payload(), fingerprint=model.fingerprint)
    encoded_config = json.dumps(config, sort_keys=True).encode('utf-8')
    parts.append(struct.pack('<I', len(encoded_config)) + encoded_config)
    return b''.join(parts)


class _Reader:
    def __init__(self, data: bytes, location: str):
        self.data = data
        self.offset = 0
        self.location = location

    def take(self, size: int) -> bytes:
        if self.offset + size > len(self.data):
            raise FeatureLengthError(
                f'checkpoint truncated: expected {self.offset + size} bytes, got {len(self.data)}', self.location)
        chunk = self.data[self.offset:self.offset + size]
        self.offset += size
        return chunk

    def unpack(self, fmt: str) -> tuple:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def decode_checkpoint(data: bytes, location: str = 'checkpoint') -> TrainedModel:
    reader = _Reader(data, location)
    magic = data[:4]
    if magic != MAGIC:
        raise FeatureFormatError(f'bad magic {magic!r}, expected {MAGIC!r}', location)
    reader.take(4)
    version, count = reader.unpack('<II')
    if version != VERSION:
        raise FeatureFormatError(f'unsupported checkpoint version {version}', location)

    blocks = {}
    for _ in range(count):
        (name_length,) = reader.unpack('<H')
        name = reader.take(name_length).decode('utf-8')
        rows, cols = reader.unpack('<II')
        blocks[name] = np.frombuffer(reader.take(rows * cols * 8), dtype='<f8').reshape(rows, cols).astype(np.float64)
    (config_length,) = reader.unpack('<I')
    try:
        config_data = json.loads(reader.take(config_length).decode('utf-8'))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FeatureFormatError(f'unreadable config: {exc}', location) from exc
    if not isinstance(config_data, dict):
        raise FeatureFormatError('config is not a JSON object', location)
    fingerprint = config_data.pop('fingerprint', None)
    config = parse_model(MethodConfig, config_data, location)
    if fingerprint is not None and fingerprint != config.fingerprint():
        raise FeatureFormatError('config fingerprint does not match the stored config', location)
    missing = [name for name in REQUIRED_BLOCKS if name not in blocks]
    if missing:
        raise FeatureFormatError(f'checkpoint misses parameter blocks: {missing}', location)

    base_head = None
    if 'base_head.W' in blocks:
        base_head = LinearHead(blocks['base_head.W'], blocks['base_head.b'][0])
    saliency = None
    if 'saliency.queries' in blocks:
        saliency = SaliencyParams(blocks['saliency.queries'], float(blocks['saliency.scale'][0, 0]))
    return TrainedModel(
        config=config,
        embedding=EmbeddingParams(blocks['embedding.W_e'], blocks['embedding.b_e'][0]),
        base_head=base_head,
        saliency=saliency,
    )


def save_checkpoint(model: TrainedModel, path: Path) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(encode_checkpoint(model))
    except OSError as exc:
        raise FeatureIOError(f'cannot write checkpoint: {exc.strerror}', str(path)) from exc


def load_checkpoint(path: Path) -> TrainedModel:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise FeatureIOError(f'cannot read checkpoint: {exc.strerror}', str(path)) from exc
    return decode_checkpoint(data, str(path))
