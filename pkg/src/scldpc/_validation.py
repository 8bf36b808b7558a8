"""Input validation helpers shared by the public functions."""

from __future__ import annotations

import numbers

import numpy as np

STAR = -1


def check_binary_matrix(B, name="B", allow_empty=False) -> np.ndarray:
    """Return ``B`` as a 2-D ``int8`` array after checking it is a 0/1 grid.

    Parameters
    ----------
    B : array_like
        Candidate binary matrix.
    name : str
        Name used in error messages.
    allow_empty : bool
        Accept matrices with zero rows.

    Returns
    -------
    numpy.ndarray
        Validated copy with dtype ``int8``.
    """
    arr = np.asarray(B)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got ndim={arr.ndim}")
    if not allow_empty and (arr.shape[0] < 1 or arr.shape[1] < 1):
        raise ValueError(f"{name} must have at least one row and one column")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError(f"{name} entries must be 0 or 1")
    return arr.astype(np.int8, copy=True)


def check_partition_matrix(P, name="P") -> np.ndarray:
    """Return ``P`` as an ``int8`` array with entries in {0, 1, STAR}."""
    arr = np.asarray(P)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must be a non-empty 2-D array")
    if not np.isin(arr, (0, 1, STAR)).all():
        raise ValueError(f"{name} entries must be 0, 1 or {STAR} (absent edge)")
    return arr.astype(np.int8, copy=True)


def check_positive_int(value, name, minimum=1) -> int:
    """Validate an integer parameter that must be at least ``minimum``."""
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_permutation(perm, n, name="perm") -> np.ndarray:
    """Validate that ``perm`` is a permutation of ``range(n)``."""
    arr = np.asarray(perm)
    if arr.ndim != 1 or arr.shape[0] != n:
        raise ValueError(f"{name} must have length {n}")
    if not np.issubdtype(arr.dtype, np.integer):
        raise ValueError(f"{name} must contain integers")
    if not np.array_equal(np.sort(arr), np.arange(n)):
        raise ValueError(f"{name} is not a permutation of 0..{n - 1}")
    return arr.astype(np.intp)


def check_probability_vector(x, name="x") -> np.ndarray:
    """Check that every entry of ``x`` lies in [0, 1]."""
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0) or np.any(arr > 1):
        raise ValueError(f"{name} entries must lie in [0, 1]")
    return arr
