"""Binary portable graymap (P5) reading and writing, plus Pillow import of microscope formats."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from app.errors import HeaderError, ImageFormatError, MagicNumberError, TruncatedImageError

PGM_MAGIC = b"P5"
PILLOW_SUFFIXES = frozenset({".tif", ".tiff", ".png"})


@dataclass(frozen=True, slots=True, eq=False)
class GrayImage:
    """Decoded grayscale pixels; ``is_16bit`` images still need :func:`to_8bit`."""

    pixels: np.ndarray
    is_16bit: bool
    maxval: int = 255


def _parse_header(data: bytes) -> tuple[int, int, int, int]:
    """Return ``(width, height, maxval, payload offset)``."""

    if data[:2] != PGM_MAGIC:
        raise MagicNumberError(f"not a binary graymap: magic {data[:2]!r}, expected {PGM_MAGIC!r}")

    values: list[int] = []
    pos = 2
    size = len(data)
    while len(values) < 3:
        if pos >= size:
            raise HeaderError("graymap header ends before width, height and maxval")
        byte = data[pos : pos + 1]
        if byte.isspace():
            pos += 1
            continue
        if byte == b"#":
            newline = data.find(b"\n", pos)
            pos = size if newline < 0 else newline + 1
            continue
        start = pos
        while pos < size and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
            pos += 1
        token = data[start:pos]
        if not token.isdigit():
            raise HeaderError(f"graymap header field {token!r} is not a decimal number")
        values.append(int(token))

    if pos >= size or not data[pos : pos + 1].isspace():
        raise HeaderError("graymap header must end with a single whitespace byte")
    width, height, maxval = values
    if width < 1 or height < 1:
        raise HeaderError(f"graymap dimensions must be positive, got {width}x{height}")
    if not 1 <= maxval <= 65535:
        raise HeaderError(f"graymap maxval must be in [1, 65535], got {maxval}")
    return width, height, maxval, pos + 1


def decode_pgm(data: bytes) -> GrayImage:
    width, height, maxval, offset = _parse_header(data)
    wide = maxval > 255
    dtype = np.dtype(">u2") if wide else np.dtype("u1")
    needed = width * height * dtype.itemsize
    if len(data) - offset < needed:
        raise TruncatedImageError(f"graymap payload has {len(data) - offset} bytes, expected {needed}")
    pixels = np.frombuffer(data, dtype=dtype, count=width * height, offset=offset).reshape(height, width)
    pixels = pixels.astype(np.uint16 if wide else np.uint8)
    return GrayImage(pixels=pixels, is_16bit=wide, maxval=maxval)


def load_image(path: Path) -> GrayImage:
    """Read a binary graymap (8-bit or 16-bit)."""

    return decode_pgm(Path(path).read_bytes())


def encode_pgm(pixels: np.ndarray) -> bytes:
    matrix = np.asarray(pixels)
    if matrix.ndim != 2:
        raise ImageFormatError(f"graymap pixels must be a 2-D matrix, got shape {matrix.shape}")
    height, width = matrix.shape
    if matrix.dtype == np.uint8:
        maxval, payload = 255, matrix.tobytes()
    elif matrix.dtype == np.uint16:
        maxval, payload = 65535, matrix.astype(">u2").tobytes()
    else:
        raise ImageFormatError(f"graymap pixels must be uint8 or uint16, got {matrix.dtype}")
    return f"P5\n{width} {height}\n{maxval}\n".encode("ascii") + payload


def save_image(path: Path, pixels: np.ndarray) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_pgm(pixels))


def load_with_pillow(path: Path) -> GrayImage:
    """Import a single-channel TIFF/PNG (e.g. 14-bit CCD frames stored as 16-bit)."""

    with Image.open(path) as img:
        if img.mode == "L":
            return GrayImage(pixels=np.array(img, dtype=np.uint8), is_16bit=False)
        if img.mode in {"I;16", "I;16L", "I;16B", "I"}:
            raw = np.array(img)
            return GrayImage(pixels=np.clip(raw, 0, 65535).astype(np.uint16), is_16bit=True, maxval=65535)
        raise ImageFormatError(f"{path}: only single-channel grayscale images are supported, got mode {img.mode}")


def read_any(path: Path) -> GrayImage:
    """Dispatch on suffix: Pillow for TIFF/PNG, the graymap parser otherwise."""

    if Path(path).suffix.lower() in PILLOW_SUFFIXES:
        return load_with_pillow(path)
    return load_image(path)
