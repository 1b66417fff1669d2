"""Encoder embedding records: binary wire format and deterministic
pseudo-embeddings for running the pipeline without an encoder.

Wire format ("JGEMB1"): magic bytes, then little-endian u32 record count,
u32 dimension, then per record a u16 id byte length, the UTF-8 id, and
dimension f32 values.
"""

from __future__ import annotations

import hashlib
import os
import struct

import numpy as np

from .errors import DuplicateId, ModelFormatError, NumericError, UnknownId

MAGIC = b"JGEMB1"


def save_embeddings(path: str | os.PathLike, ids: list[str], matrix: np.ndarray) -> None:
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


def load_embeddings(path: str | os.PathLike) -> tuple[list[str], np.ndarray]:
    """Read a JGEMB1 file into (ids, float32 matrix), exact 32-bit values."""
    with open(path, "rb") as f:
        data = f.read()
    if data[: len(MAGIC)] != MAGIC:
        raise ModelFormatError(f"{path}: bad magic, not a JGEMB1 embedding file")
    off = len(MAGIC)
    if len(data) < off + 8:
        raise ModelFormatError(f"{path}: truncated header")
    count, dim = struct.unpack_from("<II", data, off)
    off += 8
    ids: list[str] = []
    matrix = np.empty((count, dim), dtype=np.float32)
    row_bytes = 4 * dim
    for i in range(count):
        if len(data) < off + 2:
            raise ModelFormatError(f"{path}: truncated record {i}")
        (id_len,) = struct.unpack_from("<H", data, off)
        off += 2
        if len(data) < off + id_len + row_bytes:
            raise ModelFormatError(f"{path}: truncated record {i}")
        ids.append(data[off:off + id_len].decode("utf-8"))
        off += id_len
        matrix[i] = np.frombuffer(data, dtype="<f4", count=dim, offset=off)
        off += row_bytes
    if off != len(data):
        raise ModelFormatError(f"{path}: {len(data) - off} trailing bytes")
    if len(set(ids)) != len(ids):
        seen = set()
        for rec_id in ids:
            if rec_id in seen:
                raise DuplicateId(rec_id)
            seen.add(rec_id)
    if not np.all(np.isfinite(matrix)):
        raise NumericError(f"{path}: embedding values must be finite")
    return ids, matrix


def embedding_map(ids: list[str], matrix: np.ndarray) -> dict[str, np.ndarray]:
    return {rec_id: np.asarray(matrix[i], dtype=np.float64) for i, rec_id in enumerate(ids)}


def lookup(emb: dict[str, np.ndarray], article_id: str) -> np.ndarray:
    try:
        return emb[article_id]
    except KeyError:
        raise UnknownId(f"no embedding for article id {article_id!r}") from None


def pseudo_embed(article_id: str, d: int, seed: int, tag: str = "") -> np.ndarray:
    """Unit-norm vector derived from sha256(seed, tag, id); stable across
    processes and platforms."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    digest = hashlib.sha256(f"{seed}:{tag}:{article_id}".encode("utf-8")).digest()
    entropy = int.from_bytes(digest[:16], "little")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))
    v = rng.standard_normal(d)
    return v / np.linalg.norm(v)


def pseudo_embedding_map(ids: list[str], d: int, seed: int, tag: str = "") -> dict[str, np.ndarray]:
    return {rec_id: pseudo_embed(rec_id, d, seed, tag) for rec_id in ids}
