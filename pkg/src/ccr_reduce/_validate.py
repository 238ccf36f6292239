"""Input validation helpers."""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .errors import InvalidArgument


def as_vector(v, dim: int | None = None, *, name: str = "vector", dtype=float) -> np.ndarray:
    arr = np.asarray(v, dtype=dtype)
    if arr.ndim != 1:
        raise InvalidArgument(f"{name} must be one-dimensional, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise InvalidArgument(f"{name} has length {arr.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgument(f"{name} contains non-finite entries")
    return arr


def as_columns(m, dim: int | None = None, *, name: str = "basis", dtype=float) -> np.ndarray:
    """Coerce to a 2-D array of column vectors; a 1-D input becomes one column."""
    arr = np.asarray(m, dtype=dtype)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise InvalidArgument(f"{name} must be two-dimensional, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise InvalidArgument(f"{name} has {arr.shape[0]} rows, expected {dim}")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgument(f"{name} contains non-finite entries")
    return arr


def as_square(m, *, name: str = "matrix"):
    if sp.issparse(m):
        m = sp.csr_matrix(m, dtype=float)
    else:
        m = np.asarray(m, dtype=float)
        if m.ndim != 2:
            raise InvalidArgument(f"{name} must be two-dimensional, got shape {m.shape}")
    if m.shape[0] != m.shape[1]:
        raise InvalidArgument(f"{name} must be square, got shape {m.shape}")
    return m


def check_antisymmetric(m, *, name: str = "form") -> None:
    diff = m + m.T
    bad = abs(diff).max() if sp.issparse(diff) else np.max(np.abs(diff), initial=0.0)
    if bad != 0:
        raise InvalidArgument(f"{name} is not antisymmetric (max |F + F^T| = {bad:g})")


def check_same(a, b, what: str = "ambient space") -> None:
    if a is not b and a != b:
        raise InvalidArgument(f"{what} mismatch")


def positive_int(n, *, name: str) -> int:
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidArgument(f"{name} must be a positive integer, got {n!r}")
    return int(n)
