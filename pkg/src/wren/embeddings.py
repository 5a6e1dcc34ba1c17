"""Binary embedding files.

Layout (all little-endian):

    header: magic "WEMB" (4 bytes), version u32, count u64, dim u32
    record: id_len u32, passage_id UTF-8, dim x float32

Embeddings are produced externally; this module only moves them around.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import InputError, SchemaError

MAGIC = b"WEMB"
VERSION = 1
_HEADER = struct.Struct("<4sIQI")
_IDLEN = struct.Struct("<I")


def write_embeddings(path, records, dim: int) -> int:
    """Write (passage_id, vector) records; returns the count written.

    The count is back-patched into the header, so ``records`` may be a
    generator of unknown length.
    """
    path = Path(path)
    count = 0
    with open(path, "wb") as f:
        f.write(_HEADER.pack(MAGIC, VERSION, 0, dim))
        for passage_id, vector in records:
            vector = np.asarray(vector, dtype=np.float32)
            if vector.shape != (dim,):
                raise InputError(
                    f"embedding for {passage_id!r} has shape {vector.shape}, expected ({dim},)"
                )
            encoded = passage_id.encode("utf-8")
            f.write(_IDLEN.pack(len(encoded)))
            f.write(encoded)
            f.write(vector.tobytes())
            count += 1
        f.seek(0)
        f.write(_HEADER.pack(MAGIC, VERSION, count, dim))
    return count


def read_header(path):
    with open(path, "rb") as f:
        raw = f.read(_HEADER.size)
    if len(raw) < _HEADER.size:
        raise SchemaError(f"{path}: truncated embedding file header")
    magic, version, count, dim = _HEADER.unpack(raw)
    if magic != MAGIC:
        raise SchemaError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise SchemaError(f"{path}: unsupported embedding file version {version}")
    return count, dim


def read_embeddings(path):
    """Stream (passage_id, float32 vector) records."""
    count, dim = read_header(path)
    vec_bytes = dim * 4
    with open(path, "rb") as f:
        f.seek(_HEADER.size)
        for i in range(count):
            raw = f.read(_IDLEN.size)
            if len(raw) < _IDLEN.size:
                raise SchemaError(f"{path}: truncated at record {i}")
            (id_len,) = _IDLEN.unpack(raw)
            passage_id = f.read(id_len).decode("utf-8")
            payload = f.read(vec_bytes)
            if len(payload) < vec_bytes:
                raise SchemaError(f"{path}: truncated vector at record {i}")
            yield passage_id, np.frombuffer(payload, dtype="<f4").copy()


def read_all(path):
    """Load a whole embedding file as (ids, matrix)."""
    count, dim = read_header(path)
    ids = []
    matrix = np.empty((count, dim), dtype=np.float32)
    for i, (passage_id, vector) in enumerate(read_embeddings(path)):
        ids.append(passage_id)
        matrix[i] = vector
    return ids, matrix
