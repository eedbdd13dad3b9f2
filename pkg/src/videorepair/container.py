"""Bit-exact tensor container ("VRTC") used for every on-disk and on-wire tensor.

Layout, frozen at version 1:

    magic   4 bytes  b"VRTC"
    version u8       1
    dtype   u8       0 = uint8, 1 = float32 little-endian
    ndim    u8
    dims    ndim x u32 little-endian
    payload row-major bytes, innermost axis is the last listed dim

Videos are stored as (T, H, W, C) uint8, masks as (T, H, W) uint8 and
noise volumes as (T, C, h, w) float32.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import FileFormatError

MAGIC = b"VRTC"
VERSION = 1

_DTYPE_CODES = {0: np.dtype(np.uint8), 1: np.dtype("<f4")}
_CODE_FOR_KIND = {np.dtype(np.uint8): 0, np.dtype("<f4"): 1}


def encode(array: np.ndarray) -> bytes:
    """Serialize ``array`` to container bytes.

    Only uint8 and little-endian float32 payloads are representable.
    """
    arr = np.ascontiguousarray(array)
    if arr.dtype == np.float32:
        arr = arr.astype("<f4", copy=False)
    dtype = np.dtype(arr.dtype)
    if dtype not in _CODE_FOR_KIND:
        raise FileFormatError(f"unsupported dtype {dtype}; container holds u8 or f32")
    if arr.ndim == 0 or arr.ndim > 255:
        raise FileFormatError(f"unsupported ndim {arr.ndim}")
    header = MAGIC + struct.pack("<BBB", VERSION, _CODE_FOR_KIND[dtype], arr.ndim)
    dims = struct.pack(f"<{arr.ndim}I", *arr.shape)
    return header + dims + arr.tobytes()


def decode(blob: bytes) -> np.ndarray:
    """Parse container bytes back into an ndarray; inverse of :func:`encode`."""
    if len(blob) < 7 or blob[:4] != MAGIC:
        raise FileFormatError("bad container magic")
    version, dtype_code, ndim = struct.unpack_from("<BBB", blob, 4)
    if version != VERSION:
        raise FileFormatError(f"unsupported container version {version}")
    if dtype_code not in _DTYPE_CODES:
        raise FileFormatError(f"unknown dtype code {dtype_code}")
    offset = 7
    if len(blob) < offset + 4 * ndim:
        raise FileFormatError("truncated dims")
    dims = struct.unpack_from(f"<{ndim}I", blob, offset)
    offset += 4 * ndim
    dtype = _DTYPE_CODES[dtype_code]
    expected = int(np.prod(dims, dtype=np.int64)) * dtype.itemsize
    payload = blob[offset:]
    if len(payload) != expected:
        raise FileFormatError(
            f"payload size {len(payload)} does not match dims {dims} ({expected} bytes)"
        )
    return np.frombuffer(payload, dtype=dtype).reshape(dims).copy()


def write(path: str | Path, array: np.ndarray) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode(array))
    return path


def read(path: str | Path) -> np.ndarray:
    path = Path(path)
    if not path.is_file():
        raise FileFormatError(f"no container file at {path}")
    return decode(path.read_bytes())
