"""Binary container for named parameter arrays.

Layout (all integers little-endian):

    magic b"TCP1" | version u16 | preamble_len u32 | preamble utf-8 json
    count u32 | entries...

    entry: name_len u16 | name utf-8 | dtype u8 (0=f32, 1=f64) |
           ndim u8 | dims u32 * ndim | raw little-endian values

Round-trips are bit-exact; the preamble carries whatever structured
metadata the caller needs to rebuild the consumer (model config, epoch,
provenance).
"""

from __future__ import annotations

import json
import struct

import numpy as np

MAGIC = b"TCP1"
FORMAT_VERSION = 1

_DTYPE_TAGS = {np.dtype("float32"): 0, np.dtype("float64"): 1}
_TAG_DTYPES = {0: np.dtype("<f4"), 1: np.dtype("<f8")}


class CheckpointError(Exception):
    pass


def save_arrays(path, arrays: dict[str, np.ndarray], preamble: dict | None = None) -> None:
    preamble_bytes = json.dumps(preamble or {}, sort_keys=True).encode("utf-8")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<H", FORMAT_VERSION))
        f.write(struct.pack("<I", len(preamble_bytes)))
        f.write(preamble_bytes)
        f.write(struct.pack("<I", len(arrays)))
        for name, arr in arrays.items():
            if arr.dtype not in _DTYPE_TAGS:
                raise CheckpointError(f"unsupported dtype {arr.dtype} for entry {name!r}")
            name_b = name.encode("utf-8")
            f.write(struct.pack("<H", len(name_b)))
            f.write(name_b)
            f.write(struct.pack("<BB", _DTYPE_TAGS[arr.dtype], arr.ndim))
            f.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
            f.write(np.ascontiguousarray(arr).astype(arr.dtype.newbyteorder("<")).tobytes())


def load_arrays(path) -> tuple[dict[str, np.ndarray], dict]:
    with open(path, "rb") as f:
        if f.read(4) != MAGIC:
            raise CheckpointError(f"not a checkpoint file: {path}")
        (version,) = struct.unpack("<H", f.read(2))
        if version != FORMAT_VERSION:
            raise CheckpointError(f"unsupported checkpoint version {version}")
        (plen,) = struct.unpack("<I", f.read(4))
        preamble = json.loads(f.read(plen).decode("utf-8"))
        (count,) = struct.unpack("<I", f.read(4))
        arrays: dict[str, np.ndarray] = {}
        for _ in range(count):
            (nlen,) = struct.unpack("<H", f.read(2))
            name = f.read(nlen).decode("utf-8")
            tag, ndim = struct.unpack("<BB", f.read(2))
            shape = struct.unpack(f"<{ndim}I", f.read(4 * ndim))
            dtype = _TAG_DTYPES[tag]
            n = int(np.prod(shape, dtype=np.int64)) if ndim else 1
            data = np.frombuffer(f.read(n * dtype.itemsize), dtype=dtype)
            arrays[name] = data.reshape(shape).astype(dtype.newbyteorder("="))
        return arrays, preamble
