"""Binary model files.

Layout (all integers little-endian)::

    b"MTCN" | u16 version | u32 header length | header (ModelConfig JSON, UTF-8)
    | u32 tensor count
    | per tensor: u16 name length | name | u8 ndim | u32 extents… | float32 data
    | u32 CRC-32 of every preceding byte
"""

from __future__ import annotations

import logging
import struct
import zlib
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from app.errors import BadMagicError, ChecksumError, ModelFileError, TruncatedModelError, VersionMismatchError
from app.model.config import ModelConfig
from app.model.network import Model, build_model

logger = logging.getLogger(__name__)

MAGIC = b"MTCN"
FORMAT_VERSION = 1
_FLOAT = np.dtype("<f4")


def encode_model(model: Model) -> bytes:
    header = model.config.model_dump_json().encode("utf-8")
    parts = [MAGIC, struct.pack("<HI", FORMAT_VERSION, len(header)), header]
    parts.append(struct.pack("<I", len(model.params)))
    for name, value in model.params.items():
        encoded_name = name.encode("utf-8")
        parts.append(struct.pack("<H", len(encoded_name)))
        parts.append(encoded_name)
        parts.append(struct.pack("<B", value.ndim))
        parts.append(struct.pack(f"<{value.ndim}I", *value.shape))
        parts.append(np.ascontiguousarray(value, dtype=_FLOAT).tobytes())
    body = b"".join(parts)
    return body + struct.pack("<I", zlib.crc32(body) & 0xFFFFFFFF)


def save_model(model: Model, path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_model(model))
    logger.info("Saved model to %s", path)


class _Reader:
    def __init__(self, data: bytes, start: int) -> None:
        self._data = data
        self.offset = start

    def take(self, size: int) -> bytes:
        end = self.offset + size
        if end > len(self._data):
            raise TruncatedModelError(f"model file ends early at byte {len(self._data)}; expected {end}")
        chunk = self._data[self.offset : end]
        self.offset = end
        return chunk

    def unpack(self, fmt: str) -> tuple[int, ...]:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def decode_model(data: bytes) -> Model:
    """Parse a model file; nothing is built unless every check passes."""

    if data[: len(MAGIC)] != MAGIC:
        if len(data) < len(MAGIC) and MAGIC.startswith(data):
            raise TruncatedModelError("model file is shorter than its magic number")
        raise BadMagicError("not a model file (bad magic bytes)")
    if len(data) < len(MAGIC) + 2:
        raise TruncatedModelError("model file ends inside the version field")
    (version,) = struct.unpack_from("<H", data, len(MAGIC))
    if version != FORMAT_VERSION:
        raise VersionMismatchError(f"model format version {version} is not supported (expected {FORMAT_VERSION})")
    if len(data) < len(MAGIC) + 2 + 4:
        raise TruncatedModelError("model file ends before the checksum")

    body, (stored_crc,) = data[:-4], struct.unpack("<I", data[-4:])
    reader = _Reader(body, len(MAGIC) + 2)
    (header_length,) = reader.unpack("<I")
    header = reader.take(header_length)
    (count,) = reader.unpack("<I")
    tensors: dict[str, np.ndarray] = {}
    for _ in range(count):
        (name_length,) = reader.unpack("<H")
        name = reader.take(name_length).decode("utf-8", errors="replace")
        (ndim,) = reader.unpack("<B")
        shape = reader.unpack(f"<{ndim}I")
        size = int(np.prod(shape, dtype=np.int64))
        raw = reader.take(size * _FLOAT.itemsize)
        tensors[name] = np.frombuffer(raw, dtype=_FLOAT).reshape(shape).astype(np.float32)

    if reader.offset != len(body) or zlib.crc32(body) & 0xFFFFFFFF != stored_crc:
        raise ChecksumError("model file checksum mismatch")

    try:
        config = ModelConfig.model_validate_json(header)
    except ValidationError as exc:
        raise ModelFileError(f"model header is not a valid configuration: {exc.error_count()} error(s)") from exc

    model = build_model(config)
    if list(tensors) != list(model.params):
        raise ModelFileError("model tensors do not match the topology in the header")
    for name, value in tensors.items():
        if value.shape != model.params[name].shape:
            raise ModelFileError(f"tensor {name} has shape {value.shape}, expected {model.params[name].shape}")
        model.params[name][...] = value
    return model


def load_model(path: Path) -> Model:
    return decode_model(Path(path).read_bytes())
