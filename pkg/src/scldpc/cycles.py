"""Counting length-6 (and length-4) cycles in proto, lifted and coupled graphs.

Lifted counts use the circulant power condition: a proto 6-cycle through
rows ``a, b, c`` and columns ``j1, j2, j3`` lifts to ``z`` cycles when the
alternating sum of its six circulant powers vanishes mod ``z`` and to none
otherwise.  Coupled codes are handled through the one- and two-replica
windows, whose counts determine the full count for any coupling length.
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass

import numba
import numpy as np

from ._validation import check_binary_matrix, check_partition_matrix, check_positive_int
from .construct import (
    CBMatrix,
    couple_partition,
    coupled_power_matrix,
    replica_windows,
)

__all__ = [
    "CycleReport",
    "overlap_parameters",
    "a_term",
    "count_c6_proto",
    "count_c6_lifted",
    "count_c4_lifted",
    "count_c6_sc",
    "count_c6_sc_proto",
    "count_c6_bruteforce",
    "closed_form_local_c6",
    "cycle_report",
]


@dataclass(frozen=True)
class CycleReport:
    """Cycle counts of one coupled lifted code."""

    proto_cycles6: int
    lifted_cycles6: int
    lifted_cycles4: int
    z: int

    def to_dict(self):
        return asdict(self)


def overlap_parameters(B, max_degree: int = 3) -> dict:
    """Overlap parameters ``t_S`` for all row subsets ``S`` of size ``1..max_degree``.

    Keys are sorted tuples of 0-based row indices.
    """
    B = check_binary_matrix(B, allow_empty=True).astype(bool)
    gamma = B.shape[0]
    out = {}
    for d in range(1, min(max_degree, gamma) + 1):
        for S in itertools.combinations(range(gamma), d):
            out[S] = int(np.logical_and.reduce(B[list(S)], axis=0).sum())
    return out


def a_term(t123: int, t12: int, t13: int, t23: int) -> int:
    """Number of 6-cycles through three fixed rows, from their overlaps.

    Row 1 is the pivot: the cycle uses one column shared by rows 1 and 2,
    one shared by rows 1 and 3 and one shared by rows 2 and 3, all distinct.
    """
    if min(t123, t12, t13, t23) < 0:
        raise ValueError("overlap parameters must be nonnegative")

    def pos(x):
        return max(x, 0)

    return (
        t123 * pos(t123 - 1) * pos(t23 - 2)
        + t123 * (t13 - t123) * pos(t23 - 1)
        + (t12 - t123) * t123 * pos(t23 - 1)
        + (t12 - t123) * (t13 - t123) * t23
    )


def count_c6_proto(B) -> int:
    """Number of 6-cycles in the Tanner graph of a binary proto-matrix."""
    t = overlap_parameters(B, 3)
    gamma = np.asarray(B).shape[0]
    total = 0
    for a, b, c in itertools.combinations(range(gamma), 3):
        total += a_term(t[(a, b, c)], t[(a, b)], t[(a, c)], t[(b, c)])
    return total


@numba.njit(cache=True)
def _c6_kernel(B, C, z):
    g, k = B.shape
    tot = 0
    for a in range(g):
        for b in range(a + 1, g):
            for c in range(b + 1, g):
                # columns: j1 shared by (a, c), j2 by (a, b), j3 by (b, c)
                for j1 in range(k):
                    if B[a, j1] == 0 or B[c, j1] == 0:
                        continue
                    for j2 in range(k):
                        if j2 == j1 or B[a, j2] == 0 or B[b, j2] == 0:
                            continue
                        base = C[a, j1] - C[a, j2] + C[b, j2] - C[c, j1]
                        for j3 in range(k):
                            if j3 == j1 or j3 == j2 or B[b, j3] == 0 or B[c, j3] == 0:
                                continue
                            if (base - C[b, j3] + C[c, j3]) % z == 0:
                                tot += 1
    return tot


@numba.njit(cache=True)
def _c4_kernel(B, C, z):
    g, k = B.shape
    tot = 0
    for a in range(g):
        for b in range(a + 1, g):
            for j1 in range(k):
                if B[a, j1] == 0 or B[b, j1] == 0:
                    continue
                for j2 in range(j1 + 1, k):
                    if B[a, j2] == 0 or B[b, j2] == 0:
                        continue
                    if (C[a, j1] - C[a, j2] + C[b, j2] - C[b, j1]) % z == 0:
                        tot += 1
    return tot


def _lifted_inputs(B, C, z):
    B = check_binary_matrix(B, allow_empty=True)
    C = np.asarray(C, dtype=np.int64)
    if C.shape != B.shape:
        raise ValueError(f"power matrix shape {C.shape} does not match proto {B.shape}")
    z = check_positive_int(z, "z")
    return B, np.where(B == 1, C, 0).astype(np.int64), z


def count_c6_lifted(B, C, z: int) -> int:
    """Number of 6-cycles after lifting ``B`` with circulant powers ``C``.

    Every proto 6-cycle whose alternating power sum is ``0 mod z`` yields
    ``z`` lifted cycles, so the result is always a multiple of ``z``.
    """
    B, C, z = _lifted_inputs(B, C, z)
    return int(_c6_kernel(B, C, z)) * z


def count_c4_lifted(B, C, z: int) -> int:
    """Number of 4-cycles after circulant lifting (zero means girth at least 6)."""
    B, C, z = _lifted_inputs(B, C, z)
    return int(_c4_kernel(B, C, z)) * z


def _replica_combine(f1: int, f2: int, l: int) -> int:
    return l * f1 + (l - 1) * (f2 - 2 * f1)


def count_c6_sc(P, C, z: int, l: int) -> int:
    """Lifted 6-cycle count of the coupled code defined by ``P``.

    Uses ``F = l F(R1) + (l - 1) (F(R2) - 2 F(R1))`` where ``R1`` and ``R2``
    are the lifted one- and two-replica windows.  ``l = 1`` falls back to a
    direct count of the single window.

    Parameters
    ----------
    P : array_like
        Partitioning matrix (``gamma x kappa``).
    C : array_like
        Per-replica power matrix of the same shape.
    z : int
        Circulant size.
    l : int
        Coupling length.
    """
    P = check_partition_matrix(P)
    C = np.asarray(C, dtype=np.int64)
    if C.shape != P.shape:
        raise ValueError(f"power matrix shape {C.shape} does not match P {P.shape}")
    l = check_positive_int(l, "l")
    g, k = P.shape
    if l == 1:
        return count_c6_lifted(couple_partition(P, 1), coupled_power_matrix(C, 1), z)
    B2 = couple_partition(P, 2)
    C2 = coupled_power_matrix(C, 2)
    Q1, Q2 = replica_windows(B2, g, k)
    C1w, C2w = replica_windows(C2, g, k)
    f1 = count_c6_lifted(Q1, C1w, z)
    f2 = count_c6_lifted(Q2, C2w, z)
    return _replica_combine(f1, f2, l)


def count_c6_sc_proto(P, l: int) -> int:
    """Protograph analogue of :func:`count_c6_sc` (6-cycles of the coupled proto-matrix)."""
    P = check_partition_matrix(P)
    l = check_positive_int(l, "l")
    g, k = P.shape
    if l == 1:
        return count_c6_proto(couple_partition(P, 1))
    Q1, Q2 = replica_windows(couple_partition(P, 2), g, k)
    return _replica_combine(count_c6_proto(Q1), count_c6_proto(Q2), l)


def cycle_report(P, C, z: int, l: int) -> CycleReport:
    """Proto and lifted cycle counts of a coupled code in one record."""
    P = check_partition_matrix(P)
    return CycleReport(
        proto_cycles6=count_c6_sc_proto(P, l),
        lifted_cycles6=count_c6_sc(P, C, z, l),
        lifted_cycles4=count_c4_lifted(couple_partition(P, l), coupled_power_matrix(C, l), z),
        z=int(z),
    )


@numba.njit(cache=True)
def _walk_cycles6(cn_ptr, cn_adj, vn_ptr, vn_adj, n_checks):
    # Enumerate closed walks c0 v0 c1 v1 c2 v2 c0 with distinct checks and
    # variables, anchored at their smallest check c0.  Each undirected cycle
    # is then seen exactly twice (once per direction).
    found = 0
    for c0 in range(n_checks):
        for p0 in range(cn_ptr[c0], cn_ptr[c0 + 1]):
            v0 = cn_adj[p0]
            for q1 in range(vn_ptr[v0], vn_ptr[v0 + 1]):
                c1 = vn_adj[q1]
                if c1 <= c0:
                    continue
                for p1 in range(cn_ptr[c1], cn_ptr[c1 + 1]):
                    v1 = cn_adj[p1]
                    if v1 == v0:
                        continue
                    for q2 in range(vn_ptr[v1], vn_ptr[v1 + 1]):
                        c2 = vn_adj[q2]
                        if c2 <= c0 or c2 == c1:
                            continue
                        for p2 in range(cn_ptr[c2], cn_ptr[c2 + 1]):
                            v2 = cn_adj[p2]
                            if v2 == v0 or v2 == v1:
                                continue
                            # close the walk: v2 must touch c0
                            for q3 in range(vn_ptr[v2], vn_ptr[v2 + 1]):
                                if vn_adj[q3] == c0:
                                    found += 1
                                    break
    return found


def count_c6_bruteforce(H, max_edges: int = 200_000) -> int:
    """Count 6-cycles by direct walk enumeration on the expanded graph.

    Independent of the overlap and power-sum formulas; intended as a test
    oracle for small graphs.

    Parameters
    ----------
    H : CBMatrix or array_like
        Lifted code or an explicit binary parity-check matrix.
    max_edges : int
        Refuse graphs with more edges than this.
    """
    if isinstance(H, CBMatrix):
        rows, cols = H.edges()
        n_checks, n_vars = H.shape
    else:
        Hd = check_binary_matrix(H, "H", allow_empty=True)
        rows, cols = np.nonzero(Hd)
        n_checks, n_vars = Hd.shape
    if rows.size > max_edges:
        raise ValueError(f"graph has {rows.size} edges, above the oracle limit {max_edges}")
    order = np.lexsort((cols, rows))
    r, c = rows[order], cols[order]
    cn_ptr = np.searchsorted(r, np.arange(n_checks + 1)).astype(np.int64)
    cn_adj = c.astype(np.int64)
    order = np.lexsort((rows, cols))
    r, c = rows[order], cols[order]
    vn_ptr = np.searchsorted(c, np.arange(n_vars + 1)).astype(np.int64)
    vn_adj = r.astype(np.int64)
    walks = int(_walk_cycles6(cn_ptr, cn_adj, vn_ptr, vn_adj, n_checks))
    assert walks % 2 == 0
    return walks // 2


def closed_form_local_c6(gamma_l: int, kappa: int, nu: int, scheme: str) -> int:
    """Closed-form 6-cycle count of the balanced or unbalanced local proto-matrix.

    Supported cases are ``gamma_l = 3`` with any ``nu < kappa`` and
    ``gamma_l = 4`` with ``nu`` a multiple of four.
    """
    if nu >= kappa or nu < 0:
        raise ValueError("need 0 <= nu < kappa")
    if scheme not in ("balanced", "unbalanced"):
        raise ValueError(f"unknown local scheme {scheme!r}")
    if gamma_l == 3:
        if scheme == "unbalanced":
            return (kappa - nu) * (kappa - nu - 1) * (kappa - 2)
        a, b = divmod(nu, 3)
        t123 = kappa - nu
        t12 = kappa - 2 * a - b
        t13 = kappa - 2 * a - int(b > 0)
        t23 = kappa - 2 * a - int(b > 1)
        return a_term(t123, t12, t13, t23)
    if gamma_l == 4:
        if nu % 4:
            raise ValueError("gamma_l = 4 closed forms need nu divisible by 4")
        if scheme == "unbalanced":
            return 3 * (kappa - nu) * (kappa - nu - 1) * (kappa - 2) + kappa * (kappa - 1) * (kappa - 2)
        q = nu // 4
        t3 = kappa - 3 * q
        t2 = kappa - 2 * q
        return (
            4 * t3 * (t3 - 1) * (t2 - 2)
            + 4 * t3 * q * (t2 - 1)
            + 4 * q * t3 * (t2 - 1)
            + 4 * q * q * t2
        )
    raise ValueError("closed forms exist for gamma_l in {3, 4} only")
