"""Hot-path kernels with two interchangeable backends.

`_core` is a compiled extension covering the per-step fused table update,
batched segment replay, and action selection; `_pure` is a NumPy twin with
identical signatures and semantics. The default backend is chosen once at
import: the compiled module when available, else the pure fallback. Set
EFQL_KERNELS=pure|compiled|auto to override; "compiled" fails loudly if the
extension is missing. benchmarks/bench_kernels.py compares the two.
"""

from __future__ import annotations

import os
from typing import NamedTuple

import numpy as np

from . import _pure

try:
    from . import _core
except ImportError:
    _core = None

_requested = os.environ.get("EFQL_KERNELS", "auto").lower()
if _requested == "compiled" and _core is None:
    raise ImportError(
        "EFQL_KERNELS=compiled but the efql.kernels._core extension is not built; "
        "reinstall the package or use EFQL_KERNELS=pure"
    )
if _requested == "pure":
    _active = _pure
elif _requested in ("auto", "compiled"):
    _active = _core if _core is not None else _pure
else:
    raise ValueError(f"EFQL_KERNELS must be auto, compiled or pure, got {_requested!r}")

BACKEND: str = _active.BACKEND_NAME


def default_backend():
    """Backend module selected at import time."""
    return _active


def get_backend(name: str):
    """Fetch a backend by name ("pure" or "compiled")."""
    if name == "pure":
        return _pure
    if name == "compiled":
        if _core is None:
            raise ImportError("compiled kernel extension is not built")
        return _core
    raise ValueError(f"unknown backend {name!r}")


def available_backends() -> tuple[str, ...]:
    return ("pure", "compiled") if _core is not None else ("pure",)


class StateLayout(NamedTuple):
    """Flattened state-partition arrays in the form the kernels consume."""

    centers: np.ndarray          # per-dimension centers, concatenated
    offsets: np.ndarray          # int64 (D+1,), slice bounds into centers
    inv_two_sigma_sq: np.ndarray  # (D,)
    lo: np.ndarray               # (D,)
    hi: np.ndarray               # (D,)


class ActionLayout(NamedTuple):
    centers: np.ndarray
    inv_two_sigma_sq: float
    lo: float
    hi: float


def state_layout(sp) -> StateLayout:
    centers = np.ascontiguousarray(np.concatenate([d.centers for d in sp.dims]))
    counts = [d.centers.size for d in sp.dims]
    offsets = np.zeros(len(counts) + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    inv = np.array([1.0 / (2.0 * d.sigma * d.sigma) for d in sp.dims], dtype=np.float64)
    lo = np.array([d.range_lo for d in sp.dims], dtype=np.float64)
    hi = np.array([d.range_hi for d in sp.dims], dtype=np.float64)
    return StateLayout(centers, offsets, inv, lo, hi)


def action_layout(ap) -> ActionLayout:
    return ActionLayout(
        np.ascontiguousarray(ap.centers),
        1.0 / (2.0 * ap.sigma * ap.sigma),
        float(ap.range_lo),
        float(ap.range_hi),
    )
