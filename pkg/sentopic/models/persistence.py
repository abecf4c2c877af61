"""
Model file format

    offset  size  field
    0       8     magic b"SNTRBM\\x00\\x01"
    8       4     format version, uint32 little-endian (1)
    12      4     K, uint32
    16      4     H, uint32
    20      4     S, uint32 (0 in RS mode)
    24      1     mode flag, uint8 (0 = RS, 1 = joint)
    25      3     padding, zero
    28      ...   float64 little-endian blocks, row-major: W (K*H),
                  U (S*H, joint only), a (K), b (H), c (S, joint only)
    ...     4     metadata length n, uint32
    ...     n     metadata, UTF-8 JSON with sorted keys

Round trips are bit-exact.
"""
import json
import struct
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import numpy as np

from sentopic.core.errors import DataError
from sentopic.schemas.model import ModelParams

MAGIC = b"SNTRBM\x00\x01"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<8sIIIIB3x")
_LENGTH = struct.Struct("<I")
_FLOAT = np.dtype("<f8")


def dumps_params(params: ModelParams, metadata: Optional[Dict[str, Any]] = None) -> bytes:
    header = _HEADER.pack(MAGIC, FORMAT_VERSION, params.K, params.H, params.S, int(params.is_joint))
    body = b"".join(np.ascontiguousarray(block, dtype=_FLOAT).tobytes() for block in params.blocks().values())
    meta = json.dumps(metadata or {}, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return header + body + _LENGTH.pack(len(meta)) + meta


def loads_params(data: bytes) -> Tuple[ModelParams, Dict[str, Any]]:
    if len(data) < _HEADER.size or data[:8] != MAGIC:
        raise DataError("not a sentopic model file (bad magic)")
    magic, version, K, H, S, joint = _HEADER.unpack_from(data, 0)
    if version != FORMAT_VERSION:
        raise DataError(f"unsupported model format version {version}")
    if bool(joint) != (S > 0):
        raise DataError(f"mode flag {joint} inconsistent with S={S}")

    shapes = [("W", (K, H))]
    if joint:
        shapes.append(("U", (S, H)))
    shapes += [("a", (K,)), ("b", (H,))]
    if joint:
        shapes.append(("c", (S,)))

    offset = _HEADER.size
    blocks = {}
    for name, shape in shapes:
        count = int(np.prod(shape))
        end = offset + count * _FLOAT.itemsize
        if end > len(data):
            raise DataError(f"model file truncated in block {name}")
        blocks[name] = np.frombuffer(data, dtype=_FLOAT, count=count, offset=offset).reshape(shape).astype(np.float64)
        offset = end

    if offset + _LENGTH.size > len(data):
        raise DataError("model file truncated before metadata")
    (meta_length,) = _LENGTH.unpack_from(data, offset)
    offset += _LENGTH.size
    if offset + meta_length > len(data):
        raise DataError("model file truncated in metadata")
    try:
        metadata = json.loads(data[offset:offset + meta_length].decode("utf-8")) if meta_length else {}
    except ValueError as exc:
        raise DataError(f"unreadable model metadata: {exc}") from exc
    return ModelParams(**blocks), metadata


def save_params(params: ModelParams, path: Path, metadata: Optional[Dict[str, Any]] = None) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(dumps_params(params, metadata))


def load_params(path: Path) -> ModelParams:
    return load_params_with_metadata(path)[0]


def load_params_with_metadata(path: Path) -> Tuple[ModelParams, Dict[str, Any]]:
    return loads_params(Path(path).read_bytes())
