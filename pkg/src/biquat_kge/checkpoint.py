"""Checkpoint file format for model parameters.

Layout: an 8-byte little-endian unsigned length, the UTF-8 JSON header of
that length with keys {format_version, k, n_entities, n_relations, mode,
seed}, then the three tables (entities, rel_translate, rel_rotate) as
contiguous little-endian float64, each table's vectors storing the 8
component rows in (w_r, w_i, x_r, x_i, y_r, y_i, z_r, z_i) order.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .exceptions import CorruptHeaderError, FormatVersionError
from .model import MODES, ModelParameters

FORMAT_VERSION = 1

_HEADER_KEYS = ("format_version", "k", "n_entities", "n_relations", "mode", "seed")


def checkpoint_bytes(params: ModelParameters) -> bytes:
    """Serialize parameters; identical parameters give identical bytes."""
    header = json.dumps(
        {
            "format_version": FORMAT_VERSION,
            "k": params.k,
            "n_entities": params.n_entities,
            "n_relations": params.n_relations,
            "mode": params.mode,
            "seed": params.seed,
        },
        sort_keys=True,
        separators=(",", ":"),
    ).encode("utf-8")
    chunks = [struct.pack("<Q", len(header)), header]
    for table in params.arrays():
        chunks.append(np.ascontiguousarray(table, dtype="<f8").tobytes())
    return b"".join(chunks)


def save_checkpoint(params: ModelParameters, path) -> None:
    with open(path, "wb") as handle:
        handle.write(checkpoint_bytes(params))


def load_checkpoint(path) -> ModelParameters:
    """Parse a checkpoint; the round trip through save is byte-exact."""
    with open(path, "rb") as handle:
        blob = handle.read()
    if len(blob) < 8:
        raise CorruptHeaderError("file shorter than the length prefix")
    (header_len,) = struct.unpack("<Q", blob[:8])
    if len(blob) < 8 + header_len:
        raise CorruptHeaderError("file truncated inside the header")
    try:
        header = json.loads(blob[8:8 + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptHeaderError(f"unreadable header: {exc}") from exc
    missing = [key for key in _HEADER_KEYS if key not in header]
    if missing:
        raise CorruptHeaderError(f"header is missing keys {missing}")
    if header["format_version"] != FORMAT_VERSION:
        raise FormatVersionError(
            f"unsupported format_version {header['format_version']!r}")
    if header["mode"] not in MODES:
        raise FormatVersionError(f"unknown mode {header['mode']!r}")

    n_entities, n_relations, k = (int(header[key]) for key in
                                  ("n_entities", "n_relations", "k"))
    width = 8 * k
    counts = (n_entities, n_relations, n_relations)
    expected = sum(counts) * width * 8
    payload = blob[8 + header_len:]
    if len(payload) != expected:
        raise FormatVersionError(
            f"header promises {expected} payload bytes, file has {len(payload)}")
    tables = []
    offset = 0
    for count in counts:
        nbytes = count * width * 8
        flat = np.frombuffer(payload, dtype="<f8", count=count * width,
                             offset=offset)
        tables.append(flat.astype(np.float64).reshape(count, 8, k))
        offset += nbytes
    return ModelParameters(
        n_entities=n_entities,
        n_relations=n_relations,
        k=k,
        mode=header["mode"],
        seed=int(header["seed"]),
        entities=tables[0],
        rel_translate=tables[1],
        rel_rotate=tables[2],
    )
