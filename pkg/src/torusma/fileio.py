"""Binary snapshot formats for fields (CMAF) and metrics (CMMF), plus traces.

CMAF: magic "CMAF", version u16 = 1, n u16, N u32, flag u8 (0 real, 1
complex), then row-major samples as little-endian float64 (real) or
interleaved re/im pairs (complex).  Axis order x1, y1, ..., xn, yn with the
last axis fastest.

CMMF: magic "CMMF", version u16 = 1, n u16, N u32, then per-point
lower-triangle complex entries (j >= k, row by row), little-endian float64
pairs, same axis order.
"""

from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path

import numpy as np

from .geometry import HermitianMetricField
from .grid import Grid, PeriodicScalarField
from .solver import ContinuityStep, ContinuityTrace

FIELD_MAGIC = b"CMAF"
METRIC_MAGIC = b"CMMF"
VERSION = 1
_FIELD_HEADER = struct.Struct("<4sHHIB")
_METRIC_HEADER = struct.Struct("<4sHHI")

TRACE_FIELDS = (
    "t", "newton_iters", "residual_sup", "eig_min", "eig_max",
    "sup_phi", "sup_grad_phi", "sup_third",
)


class SnapshotFormatError(ValueError):
    """Malformed or truncated snapshot file."""


def write_field(path: str | Path, f: PeriodicScalarField) -> None:
    grid = f.grid
    flag = 0 if f.is_real else 1
    header = _FIELD_HEADER.pack(FIELD_MAGIC, VERSION, grid.n, grid.N, flag)
    if flag == 0:
        payload = np.ascontiguousarray(f.values.real, dtype="<f8").tobytes()
    else:
        payload = np.ascontiguousarray(f.values, dtype="<c16").tobytes()
    Path(path).write_bytes(header + payload)


def read_field(path: str | Path) -> PeriodicScalarField:
    raw = Path(path).read_bytes()
    if len(raw) < _FIELD_HEADER.size:
        raise SnapshotFormatError(f"{path}: truncated header")
    magic, version, n, N, flag = _FIELD_HEADER.unpack_from(raw)
    if magic != FIELD_MAGIC:
        raise SnapshotFormatError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise SnapshotFormatError(f"{path}: unsupported version {version}")
    if flag not in (0, 1):
        raise SnapshotFormatError(f"{path}: bad real/complex flag {flag}")
    grid = Grid(n=n, N=N)
    body = raw[_FIELD_HEADER.size:]
    dtype = "<f8" if flag == 0 else "<c16"
    expected = grid.num_points * np.dtype(dtype).itemsize
    if len(body) != expected:
        raise SnapshotFormatError(
            f"{path}: payload is {len(body)} bytes, expected {expected}"
        )
    values = np.frombuffer(body, dtype=dtype).reshape(grid.shape)
    if flag == 0:
        return PeriodicScalarField(grid, values.astype(complex), is_real=True)
    return PeriodicScalarField(grid, values.astype(complex), is_real=False)


def write_metric(path: str | Path, g: HermitianMetricField) -> None:
    grid = g.grid
    header = _METRIC_HEADER.pack(METRIC_MAGIC, VERSION, grid.n, grid.N)
    tri = [(j, k) for j in range(grid.n) for k in range(j + 1)]
    stacked = np.stack([g.mats[..., j, k] for j, k in tri], axis=-1)
    payload = np.ascontiguousarray(stacked, dtype="<c16").tobytes()
    Path(path).write_bytes(header + payload)


def read_metric(path: str | Path) -> HermitianMetricField:
    raw = Path(path).read_bytes()
    if len(raw) < _METRIC_HEADER.size:
        raise SnapshotFormatError(f"{path}: truncated header")
    magic, version, n, N = _METRIC_HEADER.unpack_from(raw)
    if magic != METRIC_MAGIC:
        raise SnapshotFormatError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise SnapshotFormatError(f"{path}: unsupported version {version}")
    grid = Grid(n=n, N=N)
    tri = [(j, k) for j in range(grid.n) for k in range(j + 1)]
    body = raw[_METRIC_HEADER.size:]
    expected = grid.num_points * len(tri) * 16
    if len(body) != expected:
        raise SnapshotFormatError(
            f"{path}: payload is {len(body)} bytes, expected {expected}"
        )
    stacked = np.frombuffer(body, dtype="<c16").reshape(grid.shape + (len(tri),))
    mats = np.empty(grid.shape + (grid.n, grid.n), dtype=complex)
    for idx, (j, k) in enumerate(tri):
        mats[..., j, k] = stacked[..., idx]
        if j != k:
            mats[..., k, j] = np.conj(stacked[..., idx])
    return HermitianMetricField(grid, mats)


def write_trace(path: str | Path, trace: ContinuityTrace) -> None:
    Path(path).write_text(json.dumps(trace.to_json_records(), indent=2))


def read_trace(path: str | Path) -> ContinuityTrace:
    try:
        records = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SnapshotFormatError(f"{path}: corrupt trace JSON ({exc})") from exc
    if not isinstance(records, list):
        raise SnapshotFormatError(f"{path}: trace must be a JSON array")
    steps = []
    for rec in records:
        missing = [k for k in TRACE_FIELDS if k not in rec]
        if missing:
            raise SnapshotFormatError(f"{path}: trace record missing {missing}")
        steps.append(ContinuityStep(**{k: rec[k] for k in TRACE_FIELDS}))
    return ContinuityTrace(steps)


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    h.update(Path(path).read_bytes())
    return h.hexdigest()
