"""Flat binary dumps of snapshot weight tables, for run checkpointing.

Layout (little-endian):

    magic     8 bytes   b"MBSNAPv1"
    kind      u8        0 = qualitative, 1 = real-valued
    width     u8        entry width in bytes (8)
    n         u32       literal count
    param     f64       derivation tolerance (qual) or threshold (real)
    q         f64       fixed discount; 0 means empirical schedule (real only)
    t         u64       observations folded in so far
    has_w     u8        0 = uninitialized (no matrix follows)
    matrix    n*n entries, row-major:
                  qual: u64 with 0xFFFF_FFFF_FFFF_FFFF standing for infinity
                  real: f64

An optional trailing block ``b"NAMES\\0" + utf-8 comma-joined query names``
restores the alphabet's names; without it the loader assigns defaults.
"""

from __future__ import annotations

import struct

import numpy as np

from .alphabet import Sigma
from .snapshot_qual import INF, QualSnapshot
from .snapshot_real import RealSnapshot

MAGIC = b"MBSNAPv1"
_SENTINEL = 0xFFFF_FFFF_FFFF_FFFF
_HEADER = struct.Struct("<8sBBIddQB")


class CheckpointError(ValueError):
    """Raised for malformed checkpoint files; carries the failing byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


def save_snapshot(path, snapshot: QualSnapshot | RealSnapshot) -> None:
    if isinstance(snapshot, QualSnapshot):
        kind, param, q, t = 0, snapshot.delta, 0.0, int(snapshot.initialized)
    elif isinstance(snapshot, RealSnapshot):
        if isinstance(snapshot.tau, np.ndarray):
            raise ValueError("only scalar-threshold snapshots can be checkpointed")
        kind, param, q, t = 1, snapshot.tau, snapshot.q or 0.0, snapshot.n_obs
    else:
        raise TypeError(f"cannot checkpoint {type(snapshot).__name__}")
    sigma = snapshot.sigma
    blob = bytearray()
    blob += _HEADER.pack(MAGIC, kind, 8, sigma.n_literals, param, q, t, int(snapshot.initialized))
    if snapshot.initialized:
        if kind == 0:
            finite = np.nan_to_num(snapshot.w, posinf=0).astype(np.uint64)
            encoded = np.where(np.isinf(snapshot.w), np.uint64(_SENTINEL), finite)
            blob += encoded.astype("<u8").tobytes()
        else:
            blob += snapshot.w.astype("<f8").tobytes()
    blob += b"NAMES\0" + ",".join(sigma.names).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(bytes(blob))


def load_snapshot(path) -> QualSnapshot | RealSnapshot:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _HEADER.size:
        raise CheckpointError("truncated header", len(blob))
    magic, kind, width, n, param, q, t, has_w = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise CheckpointError("bad magic", 0)
    if width != 8:
        raise CheckpointError(f"unsupported entry width {width}", 9)
    if kind not in (0, 1):
        raise CheckpointError(f"unknown snapshot kind {kind}", 8)
    if n < 2 or n % 2:
        raise CheckpointError(f"invalid literal count {n}", 10)
    offset = _HEADER.size
    matrix = None
    if has_w:
        need = n * n * 8
        if len(blob) < offset + need:
            raise CheckpointError("truncated matrix", len(blob))
        raw = blob[offset:offset + need]
        offset += need
        if kind == 0:
            encoded = np.frombuffer(raw, dtype="<u8").reshape(n, n)
            matrix = np.where(encoded == _SENTINEL, INF, encoded.astype(float))
        else:
            matrix = np.frombuffer(raw, dtype="<f8").reshape(n, n).astype(float)

    names = None
    tail = blob[offset:]
    if tail:
        if not tail.startswith(b"NAMES\0"):
            raise CheckpointError("unexpected trailing bytes", offset)
        text = tail[len(b"NAMES\0"):].decode("utf-8")
        names = tuple(text.split(",")) if text else ()
        if len(names) != n // 2 - 1:
            raise CheckpointError("name count does not match literal count", offset)
    sigma = Sigma(n // 2 - 1, names)

    if kind == 0:
        snap: QualSnapshot | RealSnapshot = QualSnapshot(sigma, delta=param)
        snap.w = matrix
    else:
        snap = RealSnapshot(sigma, tau=param, q=q if q else None)
        snap.w = matrix
        snap.n_obs = t
    return snap
