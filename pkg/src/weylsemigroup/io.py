"""JSON and CSV helpers for the command line and the data emitters."""

from __future__ import annotations

import csv
import json
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import numpy as np


def matrix_to_json(m: np.ndarray) -> list:
    """Complex matrix as nested lists of ``[re, im]`` pairs."""
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(obj) -> np.ndarray:
    """Inverse of :func:`matrix_to_json`; plain real entries are accepted too."""
    arr = np.asarray(obj, dtype=float)
    if arr.ndim == 3 and arr.shape[-1] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    if arr.ndim == 2:
        return arr.astype(complex)
    raise ValueError(f"cannot read a matrix from an array of shape {arr.shape}")


def complex_list(v) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex)]


def package_version() -> str:
    try:
        return version("weylsemigroup")
    except PackageNotFoundError:
        return "unknown"


def write_csv(path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def write_sidecar(path, meta: dict) -> Path:
    """Write ``<path>.json`` with run metadata next to a CSV file."""
    side = Path(str(path) + ".json")
    meta = {"version": package_version(), **meta}
    side.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return side
