"""Snapshot files: one JSON header line plus raw little-endian float64 payload.

The header records the system name, truncation, simulation time, byte order,
and the coefficient layout (shape and real/complex flag).  Complex arrays are
stored as interleaved (real, imag) float64 pairs.  Write followed by read is
bit-exact.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ConfigError

MAGIC = "magflow-snapshot"
VERSION = 1


def write_snapshot(path, coeffs: np.ndarray, system: str, truncation: int,
                   time: float) -> None:
    arr = np.ascontiguousarray(coeffs)
    if arr.dtype == np.complex128:
        payload = arr.view(np.float64)
        is_complex = True
    elif arr.dtype == np.float64:
        payload = arr
        is_complex = False
    else:
        payload = arr.astype(np.float64)
        is_complex = False
    if payload.dtype.byteorder == ">":  # pragma: no cover - big-endian hosts
        payload = payload.astype("<f8")
    header = {
        "magic": MAGIC,
        "version": VERSION,
        "system": system,
        "truncation": int(truncation),
        "time": float(time),
        "endianness": "little",
        "layout": {
            "dtype": "float64",
            "complex": is_complex,
            "shape": list(arr.shape),
        },
        "payload_bytes": int(payload.nbytes),
    }
    with open(path, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode("utf-8"))
        fh.write(b"\n")
        fh.write(payload.tobytes())


def read_snapshot(path):
    """Return (header dict, coefficient array); validates header vs payload."""
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"snapshot file not found: {path}")
    with open(p, "rb") as fh:
        line = fh.readline()
        try:
            header = json.loads(line.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ConfigError(f"corrupt snapshot header in {path}: {exc}") from None
        payload = fh.read()
    if header.get("magic") != MAGIC:
        raise ConfigError(f"{path} is not a snapshot file")
    if header["payload_bytes"] != len(payload):
        raise ConfigError(
            f"{path}: declared payload {header['payload_bytes']} bytes, "
            f"found {len(payload)}"
        )
    flat = np.frombuffer(payload, dtype="<f8")
    shape = tuple(header["layout"]["shape"])
    if header["layout"]["complex"]:
        arr = flat.view(np.complex128).reshape(shape)
    else:
        arr = flat.reshape(shape)
    return header, arr.copy()
