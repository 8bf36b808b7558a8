"""Protograph EXIT analysis on the binary-input AWGN channel.

Mutual information between a bit and a Gaussian LLR of variance ``s**2``
(mean ``s**2 / 2``) is ``J(s)``.  Two models are available:

``"exact"``
    ``J`` obtained by numerically integrating ``1 - E[log2(1 + exp(-L))]``
    and tabulated once per process; ``J^{-1}`` is read from two inverse
    tables (one in ``sqrt(I)`` for small arguments, one in ``-log(1 - I)``
    near one), so both directions cost a table lookup.
``"tenbrink"``
    The widely used piecewise polynomial/exponential fit and its piecewise
    inverse.  The pair is not a precise inverse of each other (round-trip
    error of several percent), so it is kept for comparison only.

Thresholds are found by bisection on the noise standard deviation ``sigma``
with flooding EXIT updates over the protograph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numba
import numpy as np
from scipy.interpolate import CubicSpline

from ._validation import check_binary_matrix, check_partition_matrix, check_positive_int

__all__ = [
    "ThresholdResult",
    "ExitProtograph",
    "j_fun",
    "j_inv",
    "vn_update",
    "cn_update",
    "exit_converges",
    "threshold",
    "boundary_protograph",
    "proxy_global_threshold",
    "regular_threshold",
    "sigma_to_snr_db",
]

X_MAX = 1.0 - 1e-12
_S_STEP = 1e-3
_S_MAX = 20.0
_U_STEP = 1e-4
_V_STEP = 1e-3
_I_SPLIT = 0.99

MODELS = {"exact": 0, "tenbrink": 1}


@lru_cache(maxsize=1)
def _tables():
    """Forward and inverse lookup tables for the exact J function.

    ``1 - J`` is integrated on a coarse grid and refined with cubic splines
    of ``J`` and of ``log(1 - J)``; the inverse tables are then read off the
    refined forward tables.
    """
    coarse = np.arange(0.0, _S_MAX + 0.005, 0.01)
    x = np.linspace(-20.0, 20.0, 4001)
    w = np.exp(-0.5 * x * x) * ((x[1] - x[0]) / math.sqrt(2 * math.pi))
    llr = 0.5 * coarse[:, None] ** 2 + coarse[:, None] * x[None, :]
    one_minus = (w[None, :] * np.logaddexp(0.0, -llr)).sum(axis=1) / math.log(2.0)
    one_minus[0] = 1.0
    one_minus = np.minimum.accumulate(np.clip(one_minus, 1e-300, 1.0))

    s = np.arange(0.0, _S_MAX + _S_STEP / 2, _S_STEP)
    jt = np.clip(CubicSpline(coarse, 1.0 - one_minus)(s), 0.0, 1.0)
    jt[0] = 0.0
    lt = CubicSpline(coarse, -np.log(one_minus))(s)
    jt = np.maximum.accumulate(jt)
    lt = np.maximum.accumulate(lt)

    u = np.arange(0.0, math.sqrt(_I_SPLIT) + 2 * _U_STEP, _U_STEP)
    inv_u = np.interp(u * u, jt, s)
    v0 = -math.log(1.0 - _I_SPLIT)
    v = np.arange(v0, -math.log(1.0 - X_MAX) + 2 * _V_STEP, _V_STEP)
    inv_v = np.interp(v, lt, s)
    return jt, inv_u, inv_v, v0


@numba.njit(cache=True)
def _j_tb(s):
    if s <= 0.0:
        return 0.0
    if s <= 1.6363:
        return -0.0421061 * s ** 3 + 0.209252 * s ** 2 - 0.00640081 * s
    if s < 10.0:
        return 1.0 - math.exp(0.00181491 * s ** 3 - 0.142675 * s ** 2 - 0.0822054 * s + 0.0549608)
    return 1.0


@numba.njit(cache=True)
def _jinv_tb(x):
    if x <= 0.0:
        return 0.0
    if x > 1.0 - 1e-12:
        x = 1.0 - 1e-12
    if x <= 0.3646:
        return 1.09542 * x * x + 0.214217 * x + 2.33727 * math.sqrt(x)
    return -0.706692 * math.log(0.386013 * (1.0 - x)) + 1.75017 * x


@numba.njit(cache=True)
def _j(s, model, jt, inv_u, inv_v, v0):
    if model == 1:
        return _j_tb(s)
    if s <= 0.0:
        return 0.0
    p = s / 1e-3
    i = int(p)
    if i >= jt.shape[0] - 1:
        return jt[jt.shape[0] - 1]
    f = p - i
    return jt[i] * (1.0 - f) + jt[i + 1] * f


@numba.njit(cache=True)
def _jinv(x, model, jt, inv_u, inv_v, v0):
    if model == 1:
        return _jinv_tb(x)
    if x <= 0.0:
        return 0.0
    if x > 1.0 - 1e-12:
        x = 1.0 - 1e-12
    if x < 0.99:
        p = math.sqrt(x) / 1e-4
        i = int(p)
        f = p - i
        return inv_u[i] * (1.0 - f) + inv_u[i + 1] * f
    p = (-math.log(1.0 - x) - v0) / 1e-3
    i = int(p)
    if i >= inv_v.shape[0] - 1:
        return inv_v[inv_v.shape[0] - 1]
    f = p - i
    return inv_v[i] * (1.0 - f) + inv_v[i + 1] * f


@numba.njit(cache=True)
def _j_array(s, model, jt, inv_u, inv_v, v0):
    out = np.empty(s.shape[0])
    for k in range(s.shape[0]):
        out[k] = _j(s[k], model, jt, inv_u, inv_v, v0)
    return out


@numba.njit(cache=True)
def _jinv_array(x, model, jt, inv_u, inv_v, v0):
    out = np.empty(x.shape[0])
    for k in range(x.shape[0]):
        out[k] = _jinv(x[k], model, jt, inv_u, inv_v, v0)
    return out


def _model_id(model):
    try:
        return MODELS[model]
    except KeyError:
        raise ValueError(f"unknown J model {model!r}; choose from {sorted(MODELS)}") from None


def j_fun(s, model: str = "exact"):
    """Mutual information ``J(s)`` of a consistent Gaussian LLR with std ``s``.

    Parameters
    ----------
    s : float or array_like
        Nonnegative.
    model : {"exact", "tenbrink"}

    Returns
    -------
    float or numpy.ndarray
    """
    arr = np.asarray(s, dtype=float)
    if np.any(arr < 0) or np.any(~np.isfinite(arr)):
        raise ValueError("j_fun expects finite nonnegative arguments")
    out = _j_array(arr.ravel(), _model_id(model), *_tables()).reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def j_inv(x, model: str = "exact"):
    """Inverse of :func:`j_fun` on ``[0, 1)``; arguments above ``1 - 1e-12`` are clamped."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(arr >= 1) or np.any(~np.isfinite(arr)):
        raise ValueError("j_inv expects arguments in [0, 1)")
    out = _jinv_array(arr.ravel(), _model_id(model), *_tables()).reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def vn_update(s_ch: float, incoming=(), model: str = "exact") -> float:
    """Variable-to-check EXIT value ``J(sqrt(sum J^-1(I_i)^2 + s_ch^2))``."""
    inc = np.atleast_1d(np.asarray(incoming, dtype=float))
    if np.any(inc < 0) or np.any(inc > 1):
        raise ValueError("incoming EXIT values must lie in [0, 1]")
    inc = np.minimum(inc, X_MAX)
    total = float(np.sum(np.square(j_inv(inc, model)))) if inc.size else 0.0
    return j_fun(math.sqrt(total + float(s_ch) ** 2), model)


def cn_update(incoming=(), model: str = "exact") -> float:
    """Check-to-variable EXIT value ``1 - J(sqrt(sum J^-1(1 - I_i)^2))``.

    A degree-one check (no incoming values) returns ``1 - 1e-12``.
    """
    inc = np.atleast_1d(np.asarray(incoming, dtype=float))
    if np.any(inc < 0) or np.any(inc > 1):
        raise ValueError("incoming EXIT values must lie in [0, 1]")
    out = 1.0 - vn_update(0.0, 1.0 - inc, model)
    return min(out, X_MAX)


@numba.njit(cache=True)
def _converges(er, ec, n_cols, sigma, max_iter, eps, stall_tol, model, jt, inv_u, inv_v, v0):
    """Flooding EXIT recursion; returns (converged, sweeps used)."""
    n_edges = er.shape[0]
    n_rows = 0
    for e in range(n_edges):
        if er[e] + 1 > n_rows:
            n_rows = er[e] + 1
    s_ch2 = 4.0 / (sigma * sigma)
    c2v = np.zeros(n_edges)
    lc = np.zeros(n_edges)
    lv = np.zeros(n_edges)
    v_sum = np.zeros(n_cols)
    c_sum = np.zeros(n_rows)
    prev = np.zeros(n_cols)
    for it in range(max_iter + 1):
        v_sum[:] = s_ch2
        for e in range(n_edges):
            t = _jinv(c2v[e], model, jt, inv_u, inv_v, v0)
            lc[e] = t * t
            v_sum[ec[e]] += lc[e]
        if it > 0:
            done = True
            change = 0.0
            for v in range(n_cols):
                app = _j(math.sqrt(v_sum[v]), model, jt, inv_u, inv_v, v0)
                if app < 1.0 - eps:
                    done = False
                d = abs(app - prev[v])
                if d > change:
                    change = d
                prev[v] = app
            if done:
                return True, it
            if change < stall_tol:
                return False, it
        if it == max_iter:
            break
        c_sum[:] = 0.0
        for e in range(n_edges):
            x = _j(math.sqrt(max(v_sum[ec[e]] - lc[e], 0.0)), model, jt, inv_u, inv_v, v0)
            t = _jinv(1.0 - x, model, jt, inv_u, inv_v, v0)
            lv[e] = t * t
            c_sum[er[e]] += lv[e]
        for e in range(n_edges):
            y = 1.0 - _j(math.sqrt(max(c_sum[er[e]] - lv[e], 0.0)), model, jt, inv_u, inv_v, v0)
            c2v[e] = min(y, 1.0 - 1e-12)
    return False, max_iter


class ExitProtograph:
    """Edge lists of a binary proto-matrix prepared for the EXIT recursion.

    Parameters
    ----------
    B : array_like
        Binary proto-matrix (coupled or not).  Columns without edges are
        allowed; they only see the channel.
    """

    def __init__(self, B):
        B = check_binary_matrix(B)
        self.shape = B.shape
        rows, cols = np.nonzero(B)
        self.edge_rows = rows.astype(np.int64)
        self.edge_cols = cols.astype(np.int64)

    @property
    def n_edges(self) -> int:
        return int(self.edge_rows.size)

    def converges(self, sigma, max_iter=2000, eps=1e-6, stall_tol=1e-10, model="exact"):
        """Run the recursion at noise level ``sigma``; returns ``(converged, sweeps)``."""
        if not sigma > 0:
            raise ValueError("sigma must be positive")
        ok, it = _converges(
            self.edge_rows, self.edge_cols, self.shape[1], float(sigma),
            int(max_iter), float(eps), float(stall_tol), _model_id(model), *_tables(),
        )
        return bool(ok), int(it)


@dataclass(frozen=True)
class ThresholdResult:
    """Outcome of a threshold bisection.

    Attributes
    ----------
    sigma : float
        Midpoint of the final bracket.
    iterations : int
        EXIT sweeps used at the lower bracket end (the last converging point).
    converged : bool
        True when a valid bracket was found and narrowed to ``tol``.
    bracket_width : float
        Final ``sigma_hi - sigma_lo``.
    """

    sigma: float
    iterations: int
    converged: bool
    bracket_width: float

    @property
    def snr_db(self) -> float:
        return sigma_to_snr_db(self.sigma)


def sigma_to_snr_db(sigma: float) -> float:
    """SNR in dB of unit-energy BPSK at noise std ``sigma`` (``-20 log10 sigma``)."""
    return -20.0 * math.log10(sigma)


def exit_converges(proto, sigma: float, max_iter: int = 2000, eps: float = 1e-6,
                   model: str = "exact", stall_tol: float = 1e-10) -> bool:
    """True iff every VN a-posteriori EXIT value reaches ``1 - eps`` within ``max_iter`` sweeps.

    ``stall_tol`` stops early (as a failure) once the largest change of any
    a-posteriori value in one sweep drops below it; set it to 0 to disable.
    """
    return ExitProtograph(proto).converges(sigma, max_iter, eps, stall_tol, model)[0]


def threshold(proto, tol: float = 1e-4, *, bracket=(0.3, 1.5), max_iter: int = 2000,
              eps: float = 1e-6, model: str = "exact", stall_tol: float = 1e-10) -> ThresholdResult:
    """EXIT threshold ``sigma*`` of a protograph by bisection.

    The initial bracket is widened automatically (down to 0.01, up to 3)
    until the recursion converges at the lower end and fails at the upper
    end.

    Raises
    ------
    RuntimeError
        If no valid bracket exists inside ``[0.01, 3]``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    g = ExitProtograph(proto)
    run = lambda s: g.converges(s, max_iter, eps, stall_tol, model)  # noqa: E731
    lo, hi = map(float, bracket)
    ok, it_lo = run(lo)
    while not ok:
        if lo <= 0.01:
            raise RuntimeError("EXIT recursion fails even at sigma = 0.01")
        hi, lo = lo, max(lo / 2.0, 0.01)
        ok, it_lo = run(lo)
    while run(hi)[0]:
        if hi >= 3.0:
            raise RuntimeError("EXIT recursion converges even at sigma = 3")
        lo, hi = hi, min(hi * 1.5, 3.0)
        it_lo = run(lo)[1]
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        ok, it = run(mid)
        if ok:
            lo, it_lo = mid, it
        else:
            hi = mid
    return ThresholdResult(0.5 * (lo + hi), it_lo, True, hi - lo)


def boundary_protograph(P, side: str = "left") -> np.ndarray:
    """Protograph seen by the first (``"left"``) or last (``"right"``) replica.

    The left boundary replica meets only the ``B0`` band of each mixed row,
    the right one only the ``B1`` band.  Rows without a 1 (local rows and
    all-zero rows) or without a 0 touch a single replica and are kept whole
    on both sides.
    """
    P = check_partition_matrix(P)
    zeros, ones = P == 0, P == 1
    if side == "left":
        keep, alt = zeros, ones
    elif side == "right":
        keep, alt = ones, zeros
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    use_alt = ~keep.any(axis=1)
    return np.where(use_alt[:, None], alt, keep).astype(np.int8)


def proxy_global_threshold(P, tol: float = 1e-4, side: str = "left", **kwargs) -> float:
    """Threshold of a boundary protograph of ``P``, a lower bound for the coupled code.

    With ``side="left"`` and a ``P`` whose rows all contain a 0 this is the
    threshold of the ``B0`` protograph.

    Raises
    ------
    ValueError
        If the boundary protograph has an empty row or column.
    """
    B = boundary_protograph(P, side)
    if not B.any(axis=1).all() or not B.any(axis=0).all():
        raise ValueError("boundary protograph has an empty row or column; the proxy is undefined")
    return threshold(B, tol, **kwargs).sigma


def regular_threshold(d_v: int, d_c: int, tol: float = 1e-4, **kwargs) -> float:
    """Threshold of the all-ones ``d_v x d_c`` protograph ((d_v, d_c)-regular ensemble)."""
    d_v = check_positive_int(d_v, "d_v", minimum=2)
    d_c = check_positive_int(d_c, "d_c", minimum=2)
    if d_c <= d_v:
        raise ValueError("need d_c > d_v")
    return threshold(np.ones((d_v, d_c), dtype=np.int8), tol, **kwargs).sigma
