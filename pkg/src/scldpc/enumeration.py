"""Column distributions and traversal of nonequivalent binary matrices.

Two ``gamma x kappa`` binary matrices are equivalent when one is obtained from
the other by row and column permutations.  Column permutations are factored
out by working with column distributions (histograms of column types); the
remaining row-permutation symmetry acts on the distribution by permuting the
bits of each type.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from math import comb
from typing import Iterable, Iterator

import numpy as np

from ._validation import check_binary_matrix, check_positive_int

__all__ = [
    "column_type",
    "column_distribution",
    "distribution_to_matrix",
    "enumerate_distributions",
    "count_distributions",
    "row_permutation_action",
    "orbit",
    "canonicalize",
    "is_representative",
    "enumerate_nonequivalent",
    "count_nonequivalent",
    "class_counts",
    "has_constant_row",
    "filter_nonconstant_rows",
    "count_filtered",
    "equivalent_bruteforce",
    "overlap_equivalence_check",
]


def column_type(col) -> int:
    """Integer value of a binary column with the top entry most significant.

    >>> column_type([1, 1, 0])
    6
    """
    t = 0
    for bit in np.asarray(col).ravel():
        if bit not in (0, 1):
            raise ValueError("column entries must be 0 or 1")
        t = (t << 1) | int(bit)
    return t


def column_distribution(B) -> np.ndarray:
    """Histogram ``n`` of column types; ``n[t]`` counts columns of type ``t``.

    >>> B = [[0, 1, 0, 1, 1], [0, 1, 1, 1, 1], [1, 1, 0, 1, 0]]
    >>> column_distribution(B).tolist()
    [0, 1, 1, 0, 0, 0, 1, 2]
    """
    B = check_binary_matrix(B, allow_empty=True)
    gamma = B.shape[0]
    weights = 1 << np.arange(gamma - 1, -1, -1, dtype=np.int64)
    types = weights @ B.astype(np.int64) if gamma else np.zeros(B.shape[1], np.int64)
    return np.bincount(types, minlength=1 << gamma).astype(np.int64)


def _gamma_of(n) -> int:
    size = len(n)
    gamma = size.bit_length() - 1
    if size < 2 or (1 << gamma) != size:
        raise ValueError(f"distribution length {size} is not a power of two >= 2")
    return gamma


def distribution_to_matrix(n) -> np.ndarray:
    """Binary matrix whose columns appear in ascending type order.

    The inverse of :func:`column_distribution` up to column order.
    """
    n = np.asarray(n, dtype=np.int64)
    if np.any(n < 0):
        raise ValueError("distribution entries must be nonnegative")
    gamma = _gamma_of(n)
    types = np.repeat(np.arange(n.size), n)
    shifts = np.arange(gamma - 1, -1, -1)[:, None]
    return ((types[None, :] >> shifts) & 1).astype(np.int8)


def enumerate_distributions(kappa: int, gamma: int) -> Iterator[tuple]:
    """Yield every column distribution of a ``gamma x kappa`` binary matrix.

    Compositions of ``kappa`` into ``2**gamma`` nonnegative parts are produced
    by the stars-and-bars recursion, lexicographically ascending in
    ``(n_0, n_1, ...)``.
    """
    kappa = check_positive_int(kappa, "kappa", minimum=0)
    gamma = check_positive_int(gamma, "gamma")

    def rec(parts, remaining):
        if parts == 1:
            yield (remaining,)
            return
        for k in range(remaining + 1):
            for rest in rec(parts - 1, remaining - k):
                yield (k,) + rest

    yield from rec(1 << gamma, kappa)


def count_distributions(kappa: int, gamma: int) -> int:
    """Number of column distributions, ``C(kappa + 2**gamma - 1, kappa)``."""
    kappa = check_positive_int(kappa, "kappa", minimum=0)
    gamma = check_positive_int(gamma, "gamma")
    return comb(kappa + (1 << gamma) - 1, kappa)


@lru_cache(maxsize=None)
def row_permutation_action(perm: tuple) -> tuple:
    """Map on column types induced by moving row ``i`` to row ``perm[i]``.

    Returns a tuple ``m`` with ``m[t]`` the type of a column of type ``t``
    after the rows are permuted.
    """
    gamma = len(perm)
    if sorted(perm) != list(range(gamma)):
        raise ValueError(f"{perm} is not a permutation")
    out = []
    for t in range(1 << gamma):
        u = 0
        for i in range(gamma):
            if (t >> (gamma - 1 - i)) & 1:
                u |= 1 << (gamma - 1 - perm[i])
        out.append(u)
    return tuple(out)


def orbit(n) -> list:
    """All distributions reachable from ``n`` by row permutations (deduplicated)."""
    n = tuple(int(v) for v in n)
    gamma = _gamma_of(n)
    seen = []
    for perm in itertools.permutations(range(gamma)):
        act = row_permutation_action(perm)
        m = [0] * len(n)
        for t, c in enumerate(n):
            m[act[t]] = c
        m = tuple(m)
        if m not in seen:
            seen.append(m)
    return seen


# Order in which a 3-row distribution is compared when picking the orbit
# minimum.  Reading the weight-1 types first and the weight-2 types in the
# order (6, 5, 3) makes the minimum coincide with the closed-form branch
# conditions used by ``enumerate_nonequivalent``.
_KEY_ORDER = {3: (0, 1, 2, 4, 6, 5, 3, 7)}


def _key(n, gamma):
    order = _KEY_ORDER.get(gamma)
    return tuple(n) if order is None else tuple(n[i] for i in order)


def canonicalize(n) -> tuple:
    """Canonical representative of the row-permutation orbit of ``n``.

    The representative is the lexicographic minimum over the orbit.  For
    ``gamma = 3`` entries are compared in the order
    ``(n0, n1, n2, n4, n6, n5, n3, n7)``; otherwise in natural order.

    Examples
    --------
    >>> canonicalize([1, 2, 1, 0])
    (1, 1, 2, 0)
    """
    n = tuple(int(v) for v in n)
    gamma = _gamma_of(n)
    return min(orbit(n), key=lambda m: _key(m, gamma))


def is_representative(n) -> bool:
    """Closed-form membership test for the canonical set (``gamma`` in {1, 2, 3})."""
    gamma = _gamma_of(n)
    if gamma == 1:
        return True
    if gamma == 2:
        return n[1] <= n[2]
    if gamma == 3:
        n1, n2, n3, n4, n5, n6 = n[1], n[2], n[3], n[4], n[5], n[6]
        return (
            (n1 < n2 < n4)
            or (n1 == n2 < n4 and n6 <= n5)
            or (n1 < n2 == n4 and n5 <= n3)
            or (n1 == n2 == n4 and n6 <= n5 <= n3)
        )
    return tuple(n) == canonicalize(n)


def enumerate_nonequivalent(kappa: int, gamma: int) -> Iterator[tuple]:
    """Yield one distribution per equivalence class of ``gamma x kappa`` matrices.

    Items come out in the stars-and-bars order of
    :func:`enumerate_distributions`.  ``gamma`` up to 3 uses closed-form
    membership tests; larger ``gamma`` falls back to orbit minimisation.
    """
    for n in enumerate_distributions(kappa, gamma):
        if is_representative(n):
            yield n


def class_counts(kappa: int):
    """Closed-form class sizes ``(a, b, c)`` for ``gamma = 3``.

    ``a`` counts orbits fixed by every row permutation, ``b`` orbits with a
    stabiliser of order two and ``c`` orbits with a trivial stabiliser.
    """
    kappa = check_positive_int(kappa, "kappa", minimum=0)
    a = sum(kappa - 3 * s + 1 for s in range(kappa // 3 + 1) for _ in range(s + 1))
    b = sum(comb(kappa - 2 * s + 3, 3) for s in range(kappa // 2 + 1) for _ in range(s + 1)) - a
    total = comb(kappa + 7, 7)
    c, rem = divmod(total - 3 * b - a, 6)
    assert rem == 0
    return a, b, c


def count_nonequivalent(kappa: int, gamma: int) -> int:
    """Number of equivalence classes of ``gamma x kappa`` binary matrices.

    Closed forms for ``gamma`` in {1, 2, 3}; exact integers throughout.
    """
    kappa = check_positive_int(kappa, "kappa", minimum=0)
    gamma = check_positive_int(gamma, "gamma")
    if gamma == 1:
        return kappa + 1
    if gamma == 2:
        twice = sum(kappa - 2 * i + 1 for i in range(kappa // 2 + 1)) + comb(kappa + 3, 3)
        return twice // 2
    if gamma == 3:
        return sum(class_counts(kappa))
    raise ValueError("closed-form counts are available for gamma <= 3 only")


def has_constant_row(n) -> bool:
    """True if the matrix of distribution ``n`` has an all-zero or all-one row."""
    gamma = _gamma_of(n)
    present = [t for t, c in enumerate(n) if c > 0]
    if not present:
        return True
    for i in range(gamma):
        bits = {(t >> (gamma - 1 - i)) & 1 for t in present}
        if len(bits) == 1:
            return True
    return False


def filter_nonconstant_rows(stream: Iterable, gamma: int | None = None) -> Iterator[tuple]:
    """Drop distributions whose matrix has an all-zero or all-one row."""
    for n in stream:
        if gamma is not None and len(n) != 1 << gamma:
            raise ValueError(f"distribution {n} does not match gamma={gamma}")
        if not has_constant_row(n):
            yield tuple(n)


def count_filtered(kappa: int, gamma: int) -> int:
    """Closed-form number of nonequivalent matrices without constant rows."""
    if gamma == 2:
        return count_nonequivalent(kappa, 2) - 2 * kappa - 1
    if gamma == 3:
        return count_nonequivalent(kappa, 3) - 2 * count_nonequivalent(kappa, 2) + kappa + 1
    raise ValueError("filtered counts are available for gamma in {2, 3}")


def equivalent_bruteforce(A, B) -> bool:
    """Exhaustive equivalence test over all row permutations of ``A``."""
    A = check_binary_matrix(A, "A")
    B = check_binary_matrix(B, "B")
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch: {A.shape} vs {B.shape}")
    target = column_distribution(B)
    for perm in itertools.permutations(range(A.shape[0])):
        if np.array_equal(column_distribution(A[list(perm)]), target):
            return True
    return False


def _overlaps(B):
    gamma = B.shape[0]
    out = {}
    for d in range(1, gamma + 1):
        for S in itertools.combinations(range(gamma), d):
            out[S] = int(np.all(B[list(S)] == 1, axis=0).sum())
    return out


def overlap_equivalence_check(A, B) -> bool:
    """True iff ``A`` and ``B`` share every overlap parameter (all row subsets).

    This holds exactly when the two matrices differ by a column permutation.
    """
    A = check_binary_matrix(A, "A")
    B = check_binary_matrix(B, "B")
    if A.shape != B.shape:
        return False
    return _overlaps(A) == _overlaps(B)
