"""Proto-matrices, partitioning, coupling and circulant lifting.

A partitioning matrix ``P`` is stored as a small integer array whose entries
are ``0`` (edge goes to the component matrix ``B0``), ``1`` (edge goes to
``B1``) or :data:`STAR` (no edge).  The coupling memory is fixed to one, so a
coupled code is fully described by ``P``, the coupling length ``l`` and a
power matrix for the circulant lifting.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._validation import (
    STAR,
    check_binary_matrix,
    check_partition_matrix,
    check_permutation,
    check_positive_int,
)

__all__ = [
    "STAR",
    "CBMatrix",
    "apply_partition",
    "couple",
    "couple_partition",
    "power_matrix",
    "coupled_power_matrix",
    "lift",
    "lift_coupled",
    "replica_windows",
    "cutting_vector",
    "build_local",
    "assemble_locality",
    "split_rows",
    "permute",
]


@dataclass(frozen=True)
class CBMatrix:
    """Circulant-based sparse parity-check matrix.

    Every nonzero block is a ``z x z`` identity shifted left by ``power``:
    row ``r`` of the block has its one in column ``(r + power) mod z``.

    Attributes
    ----------
    row_groups, col_groups : int
        Number of block rows and block columns.
    z : int
        Circulant size.
    nonzeros : numpy.ndarray
        ``(n, 3)`` integer array of ``(row_group, col_group, power)``
        triples, sorted row-major.
    """

    row_groups: int
    col_groups: int
    z: int
    nonzeros: np.ndarray = field(repr=False)

    def __post_init__(self):
        nz = np.asarray(self.nonzeros, dtype=np.int64).reshape(-1, 3)
        if nz.size:
            if nz[:, 0].min() < 0 or nz[:, 0].max() >= self.row_groups:
                raise ValueError("row group index out of range")
            if nz[:, 1].min() < 0 or nz[:, 1].max() >= self.col_groups:
                raise ValueError("column group index out of range")
            if nz[:, 2].min() < 0 or nz[:, 2].max() >= self.z:
                raise ValueError("circulant power must lie in [0, z)")
            keys = nz[:, 0] * self.col_groups + nz[:, 1]
            if np.unique(keys).size != keys.size:
                raise ValueError("duplicate circulant at the same block position")
            nz = nz[np.argsort(keys, kind="stable")]
        nz.setflags(write=False)
        object.__setattr__(self, "nonzeros", nz)

    @property
    def shape(self):
        """Expanded bit dimensions ``(row_groups * z, col_groups * z)``."""
        return (self.row_groups * self.z, self.col_groups * self.z)

    @property
    def n_edges(self) -> int:
        return int(self.nonzeros.shape[0]) * self.z

    def proto(self) -> np.ndarray:
        """Binary block-support matrix."""
        B = np.zeros((self.row_groups, self.col_groups), dtype=np.int8)
        B[self.nonzeros[:, 0], self.nonzeros[:, 1]] = 1
        return B

    def powers(self) -> np.ndarray:
        """Dense power matrix with ``-1`` where no circulant is present."""
        C = np.full((self.row_groups, self.col_groups), -1, dtype=np.int64)
        C[self.nonzeros[:, 0], self.nonzeros[:, 1]] = self.nonzeros[:, 2]
        return C

    def edges(self):
        """Expanded edge list as ``(check_index, variable_index)`` arrays."""
        z = self.z
        r = np.arange(z, dtype=np.int64)
        rg = self.nonzeros[:, 0][:, None]
        cg = self.nonzeros[:, 1][:, None]
        pw = self.nonzeros[:, 2][:, None]
        checks = (rg * z + r[None, :]).ravel()
        variables = (cg * z + (r[None, :] + pw) % z).ravel()
        return checks, variables

    def to_dense(self) -> np.ndarray:
        """Expanded 0/1 parity-check matrix (only sensible for small codes)."""
        H = np.zeros(self.shape, dtype=np.int8)
        rows, cols = self.edges()
        H[rows, cols] = 1
        return H

    def __eq__(self, other):
        if not isinstance(other, CBMatrix):
            return NotImplemented
        return (
            (self.row_groups, self.col_groups, self.z)
            == (other.row_groups, other.col_groups, other.z)
            and np.array_equal(self.nonzeros, other.nonzeros)
        )

    __hash__ = None


def apply_partition(P):
    """Split a partitioning matrix into its component matrices.

    Parameters
    ----------
    P : array_like
        Entries in {0, 1, STAR}.

    Returns
    -------
    B0, B1 : numpy.ndarray
        ``B0[i, j] = 1`` iff ``P[i, j] == 0`` and ``B1[i, j] = 1`` iff
        ``P[i, j] == 1``.
    """
    P = check_partition_matrix(P)
    return (P == 0).astype(np.int8), (P == 1).astype(np.int8)


def couple(B0, B1, l: int) -> np.ndarray:
    """Stack ``l`` replicas of ``[B0; B1]`` along the block diagonal.

    The result has shape ``((l + 1) * gamma, l * kappa)``.  Replica ``r``
    (0-based) occupies column block ``r`` with ``B0`` in row block ``r`` and
    ``B1`` in row block ``r + 1``.
    """
    B0 = check_binary_matrix(B0, "B0")
    B1 = check_binary_matrix(B1, "B1")
    if B0.shape != B1.shape:
        raise ValueError(f"B0 and B1 shapes differ: {B0.shape} vs {B1.shape}")
    l = check_positive_int(l, "l")
    g, k = B0.shape
    out = np.zeros(((l + 1) * g, l * k), dtype=np.int8)
    for r in range(l):
        out[r * g:(r + 1) * g, r * k:(r + 1) * k] = B0
        out[(r + 1) * g:(r + 2) * g, r * k:(r + 1) * k] = B1
    return out


def couple_partition(P, l: int) -> np.ndarray:
    """Coupled proto-matrix of a partitioning matrix (``couple ∘ apply_partition``)."""
    return couple(*apply_partition(P), l)


def power_matrix(gamma: int, kappa: int, alpha: int, z: int) -> np.ndarray:
    """Power matrix ``c[i, j] = alpha * i * j mod z`` with 1-based ``i, j``."""
    gamma = check_positive_int(gamma, "gamma")
    kappa = check_positive_int(kappa, "kappa")
    z = check_positive_int(z, "z")
    i = np.arange(1, gamma + 1, dtype=np.int64)[:, None]
    j = np.arange(1, kappa + 1, dtype=np.int64)[None, :]
    return (int(alpha) * i * j) % z


def coupled_power_matrix(C, l: int) -> np.ndarray:
    """Tile a base power matrix so that every replica reuses it.

    Block ``(r, c)`` of the result equals ``C`` for every row block ``r`` and
    column block ``c``; the band structure of the coupled proto-matrix then
    selects which blocks carry circulants.
    """
    C = np.asarray(C, dtype=np.int64)
    return np.tile(C, (l + 1, l))


def lift(proto, C, z: int) -> CBMatrix:
    """Replace each proto-matrix one by a ``z x z`` circulant of power ``C[i, j]``.

    Examples
    --------
    >>> H = lift([[1]], [[2]], 3)
    >>> H.to_dense()
    array([[0, 0, 1],
           [1, 0, 0],
           [0, 1, 0]], dtype=int8)
    """
    z = check_positive_int(z, "z")
    B = check_binary_matrix(proto, "proto", allow_empty=True)
    C = np.asarray(C, dtype=np.int64)
    if C.shape != B.shape:
        raise ValueError(f"power matrix shape {C.shape} does not match proto {B.shape}")
    rows, cols = np.nonzero(B)
    powers = np.mod(C[rows, cols], z)
    nz = np.stack([rows, cols, powers], axis=1) if rows.size else np.zeros((0, 3), np.int64)
    return CBMatrix(B.shape[0], B.shape[1], z, nz)


def lift_coupled(P, C, z: int, l: int) -> CBMatrix:
    """Lift the coupled code defined by ``P`` with the per-replica power matrix ``C``.

    ``C`` must have the shape of ``P``; it is reused by every replica.
    """
    P = check_partition_matrix(P)
    C = np.asarray(C, dtype=np.int64)
    if C.shape != P.shape:
        raise ValueError(f"power matrix shape {C.shape} does not match P {P.shape}")
    return lift(couple_partition(P, l), coupled_power_matrix(C, l), z)


def replica_windows(coupled, gamma: int, kappa: int):
    """Return the one- and two-replica windows of a coupled matrix.

    Works for binary coupled proto-matrices and for tiled power matrices
    alike since it only slices.

    Parameters
    ----------
    coupled : numpy.ndarray
        ``((l + 1) gamma, l kappa)`` array with ``l >= 2``.
    gamma, kappa : int
        Base dimensions.

    Returns
    -------
    W1 : numpy.ndarray
        First replica with its ``2 gamma`` incident rows, shape ``(2g, k)``.
    W2 : numpy.ndarray
        First two replicas with their ``3 gamma`` incident rows, shape
        ``(3g, 2k)``.
    """
    coupled = np.asarray(coupled)
    rows, cols = coupled.shape
    if cols % kappa or rows != (cols // kappa + 1) * gamma:
        raise ValueError("array is not a memory-one coupled matrix of the given base size")
    if cols // kappa < 2:
        raise ValueError("replica windows need a coupling length of at least 2")
    return coupled[: 2 * gamma, :kappa].copy(), coupled[: 3 * gamma, : 2 * kappa].copy()


def cutting_vector(gamma: int, kappa: int, zeta) -> np.ndarray:
    """Partitioning matrix defined by a cutting vector.

    Row ``i`` holds ``zeta[i]`` zeros followed by ones, i.e. ``p[i, j] = 0``
    iff the 0-based column index satisfies ``j < zeta[i]``.

    Parameters
    ----------
    gamma, kappa : int
        Matrix dimensions.
    zeta : sequence of int
        Strictly ascending with ``0 < zeta[0]`` and ``zeta[-1] <= kappa + 1``;
        any value of at least ``kappa`` yields an all-zero row.

    Examples
    --------
    >>> cutting_vector(2, 4, [1, 3])
    array([[0, 1, 1, 1],
           [0, 0, 0, 1]], dtype=int8)
    """
    gamma = check_positive_int(gamma, "gamma")
    kappa = check_positive_int(kappa, "kappa")
    zeta = np.asarray(zeta, dtype=np.int64)
    if zeta.shape != (gamma,):
        raise ValueError(f"zeta must have length gamma={gamma}")
    if np.any(np.diff(zeta) <= 0):
        raise ValueError("zeta must be strictly ascending")
    if zeta[0] <= 0 or zeta[-1] > kappa + 1:
        raise ValueError(f"zeta entries must lie in [1, kappa + 1 = {kappa + 1}]")
    j = np.arange(kappa)[None, :]
    return np.where(j < zeta[:, None], 0, 1).astype(np.int8)


def build_local(gamma_l: int, kappa: int, nu: int, scheme: str = "balanced") -> np.ndarray:
    """Local-code proto-matrix with ``nu`` zeros, never two in one column.

    Parameters
    ----------
    gamma_l : int
        Number of local check rows.
    kappa : int
        Number of columns.
    nu : int
        Number of zeros (absent edges), ``0 <= nu < kappa``.
    scheme : {"balanced", "unbalanced", "regular"}
        ``"unbalanced"`` puts all zeros at the end of the first row.
        ``"balanced"`` writes ``nu = a * gamma_l + b`` and lays out
        ``[1 | S(gamma_l, b) | Q(a; gamma_l) | ... | Q(a; 1)]`` where ``S``
        places one zero on each of the first ``b`` diagonal positions and
        ``Q(a; k)`` is ``a`` columns with a zero in row ``k``.
        ``"regular"`` requires ``nu == 0``.

    Returns
    -------
    numpy.ndarray
        ``(gamma_l, kappa)`` binary matrix.
    """
    gamma_l = check_positive_int(gamma_l, "gamma_l")
    kappa = check_positive_int(kappa, "kappa")
    nu = check_positive_int(nu, "nu", minimum=0)
    if nu >= kappa:
        raise ValueError(f"nu={nu} must be smaller than kappa={kappa}")
    B = np.ones((gamma_l, kappa), dtype=np.int8)
    if scheme == "regular":
        if nu:
            raise ValueError("the regular local code has no zeros (nu must be 0)")
        return B
    if scheme == "unbalanced":
        B[0, kappa - nu:] = 0
        return B
    if scheme != "balanced":
        raise ValueError(f"unknown local scheme {scheme!r}")
    a, b = divmod(nu, gamma_l)
    col = kappa - nu
    for r in range(b):
        B[r, col + r] = 0
    col += b
    for row in range(gamma_l - 1, -1, -1):
        B[row, col:col + a] = 0
        col += a
    return B


def assemble_locality(P_C, B_L) -> np.ndarray:
    """Stack coupling rows over local rows.

    Local rows live entirely in ``B0``: a one of ``B_L`` becomes a ``0``
    entry of ``P`` and a zero of ``B_L`` becomes an absent edge.
    """
    P_C = check_partition_matrix(P_C, "P_C")
    if np.any(P_C == STAR):
        raise ValueError("coupling rows must be binary")
    B_L = np.asarray(B_L)
    if B_L.size == 0:
        return P_C
    B_L = check_binary_matrix(B_L, "B_L")
    if B_L.shape[1] != P_C.shape[1]:
        raise ValueError("P_C and B_L must have the same number of columns")
    local = np.where(B_L == 1, 0, STAR).astype(np.int8)
    return np.vstack([P_C, local])


def split_rows(P):
    """Return ``(gamma_c, gamma_l)`` for a partitioning matrix.

    Coupling rows are the leading rows that contain both a 0 and a 1; local
    rows are the trailing rows that contain no 1.

    Raises
    ------
    ValueError
        If rows are not ordered coupling-first or a row fits neither role.
    """
    P = check_partition_matrix(P)
    mixed = (P == 0).any(axis=1) & (P == 1).any(axis=1)
    no_one = ~(P == 1).any(axis=1)
    gamma_c = int(np.argmin(mixed)) if not mixed.all() else P.shape[0]
    if not no_one[gamma_c:].all():
        raise ValueError("rows must be ordered as coupling rows then local rows")
    return gamma_c, P.shape[0] - gamma_c


def permute(P, row_perm, col_perm) -> np.ndarray:
    """Apply row and column permutations: ``out[row_perm[i], col_perm[j]] = P[i, j]``."""
    P = np.asarray(P)
    rp = check_permutation(row_perm, P.shape[0], "row_perm")
    cp = check_permutation(col_perm, P.shape[1], "col_perm")
    out = np.empty_like(P)
    out[np.ix_(rp, cp)] = P
    return out
