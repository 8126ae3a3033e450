"""Persistence: field snapshot files, norm CSVs, and JSON reports.

Snapshot format ("fourier-series-coeffs-v1"): an 8-byte magic, a
length-prefixed JSON header carrying (n, box_length, components,
convention), then the coefficient triples (c1, c2, c3) as little-endian
complex128 in lexicographic signed-m order.  Writing is deterministic,
so write -> read -> write is byte-identical.
"""

from __future__ import annotations

import dataclasses
import json
import struct

import numpy as np
import scipy.fft as sfft

from .spectral import Grid, SpectralVectorField, make_grid

MAGIC = b"SVFC0001"
CONVENTION = "fourier-series-coeffs-v1"


def write_field(path, f: SpectralVectorField) -> None:
    header = json.dumps(
        {
            "convention": CONVENTION,
            "n": f.grid.n,
            "box_length": f.grid.box_length,
            "components": 3,
        },
        sort_keys=True,
    ).encode()
    # lexicographic m order: ascending m1, then m2, then m3, triples innermost
    shifted = sfft.fftshift(f.coeffs, axes=(1, 2, 3))
    payload = np.ascontiguousarray(
        shifted.transpose(1, 2, 3, 0).astype("<c16")
    ).tobytes()
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        fh.write(payload)


def read_field(path) -> SpectralVectorField:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != MAGIC:
            raise ValueError(f"{path}: not a field snapshot (bad magic {magic!r})")
        (hlen,) = struct.unpack("<I", fh.read(4))
        header = json.loads(fh.read(hlen).decode())
        if header.get("convention") != CONVENTION:
            raise ValueError(f"{path}: unsupported convention {header.get('convention')!r}")
        n = int(header["n"])
        grid = make_grid(n, float(header["box_length"]))
        raw = np.frombuffer(fh.read(), dtype="<c16")
    if raw.size != 3 * n**3:
        raise ValueError(f"{path}: payload holds {raw.size} values, expected {3 * n ** 3}")
    arr = raw.reshape(n, n, n, 3).transpose(3, 0, 1, 2)
    coeffs = sfft.ifftshift(arr, axes=(1, 2, 3)).astype(np.complex128)
    return SpectralVectorField(grid, coeffs)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def norms_csv_text(series, extra_sigmas) -> str:
    """Pinned norm CSV: t,l2,x_m1,x_0,x_1[,x_<sigma>...],gevrey,hdot1."""
    extras = sorted(s for s in extra_sigmas if s not in (-1.0, 0.0, 1.0))
    header = (
        ["t", "l2", "x_m1", "x_0", "x_1"]
        + [f"x_{s:g}" for s in extras]
        + ["gevrey", "hdot1"]
    )
    lines = [",".join(header)]
    for s in series:
        row = [
            _fmt(s.t),
            _fmt(s.l2),
            _fmt(s.x[-1.0]),
            _fmt(s.x[0.0]),
            _fmt(s.x[1.0]),
        ]
        row += [_fmt(s.x[sig]) for sig in extras]
        row += [_fmt(s.gevrey_xm1), _fmt(s.hdot1)]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def extras_csv_text(series) -> str:
    """Companion series the split/analyticity verifiers consume."""
    header = ["t", "gevrey_analytic", "gevrey_x1_analytic", "i_lam", "j_lam"]
    lines = [",".join(header)]
    for s in series:
        lines.append(
            ",".join(
                [
                    _fmt(s.t),
                    _fmt(s.gevrey_xm1_analytic),
                    _fmt(s.gevrey_x1_analytic),
                    _fmt(s.i_lam),
                    _fmt(s.j_lam),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def bands_csv_text(times, w_l2, w_x1, v_l2) -> str:
    header = ["t", "w_l2", "w_x1", "v_l2"]
    lines = [",".join(header)]
    for i in range(len(times)):
        lines.append(
            ",".join([_fmt(times[i]), _fmt(w_l2[i]), _fmt(w_x1[i]), _fmt(v_l2[i])])
        )
    return "\n".join(lines) + "\n"


def read_csv_columns(path) -> dict:
    with open(path, "r") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    header = lines[0].split(",")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    return {name: data[:, i] for i, name in enumerate(header)}


def to_jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(dataclasses.asdict(obj))
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, float) and (obj != obj or obj in (float("inf"), float("-inf"))):
        return repr(obj)
    return obj


def dump_json(path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(to_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")
