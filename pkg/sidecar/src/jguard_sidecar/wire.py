"""Writer for the JGEMB1 embedding wire format consumed by the core.

Layout: magic bytes "JGEMB1", little-endian u32 record count, u32
dimension, then per record a u16 id byte-length, the UTF-8 id, and
dimension IEEE-754 f32 values.
"""

from __future__ import annotations

import os
import struct

import numpy as np

MAGIC = b"JGEMB1"


def write_embeddings(path: str | os.PathLike, ids: list[str], matrix: np.ndarray) -> None:
    matrix = np.asarray(matrix, dtype=np.float32)
    if matrix.ndim != 2 or matrix.shape[0] != len(ids):
        raise ValueError("matrix must be 2-D with one row per id")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<II", len(ids), matrix.shape[1]))
        for i, rec_id in enumerate(ids):
            raw = rec_id.encode("utf-8")
            if len(raw) > 0xFFFF:
                raise ValueError(f"id too long: {rec_id!r}")
            f.write(struct.pack("<H", len(raw)))
            f.write(raw)
            f.write(matrix[i].astype("<f4").tobytes())
