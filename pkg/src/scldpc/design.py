"""Joint cycle/threshold design of partitioning matrices.

The search walks the nonequivalent column distributions, scores each
candidate by its lifted 6-cycle count and an EXIT threshold, and keeps the
Pareto list: candidates sorted by cycle count are retained only when they
raise the best threshold seen so far.  The first member is the cycle-driven
(CD) design and the last the threshold-driven (TD) design.

With locality the threshold of the full coupled code is replaced during the
search by the threshold of a boundary protograph, and the short list that
survives is re-scored with the coupled threshold.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np
from joblib import Parallel, delayed
from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import STAR, check_partition_matrix, check_positive_int
from .construct import (
    assemble_locality,
    build_local,
    couple_partition,
    cutting_vector,
    power_matrix,
    split_rows,
)
from .cycles import count_c6_proto, count_c6_sc, count_c6_sc_proto
from .enumeration import (
    column_distribution,
    distribution_to_matrix,
    enumerate_nonequivalent,
    filter_nonconstant_rows,
)
from .exit_chart import proxy_global_threshold, sigma_to_snr_db, threshold

__all__ = [
    "DesignCandidate",
    "ParetoList",
    "pareto_filter",
    "evaluate_partition",
    "pareto_design",
    "locality_design",
    "with_local_rows",
    "local_scheme_select",
    "baseline_cv",
    "baseline_oo",
    "CandidateScorer",
    "ParetoDesigner",
    "LocalityDesigner",
]

log = logging.getLogger(__name__)


def _serialize(P) -> str:
    sym = {0: "0", 1: "1", STAR: "*"}
    return ";".join("".join(sym[int(v)] for v in row) for row in np.asarray(P))


@dataclass
class DesignCandidate:
    """A partitioning matrix with its cycle counts and thresholds.

    Attributes
    ----------
    distribution : tuple
        Column distribution of the coupling rows.
    P : numpy.ndarray
        Full partitioning matrix (coupling rows, then local rows if any).
    proto_cycles6, lifted_cycles6 : int
        6-cycle counts of the coupled protograph and of the lifted code.
    threshold : float or None
        EXIT threshold ``sigma*`` of the coupled code.
    proxy_threshold : float or None
        Boundary-protograph threshold used as the search objective with
        locality.
    """

    distribution: tuple
    P: np.ndarray
    proto_cycles6: int
    lifted_cycles6: int
    threshold: float | None = None
    proxy_threshold: float | None = None
    tag: str = ""

    @property
    def threshold_snr_db(self) -> float | None:
        return None if self.threshold is None else sigma_to_snr_db(self.threshold)

    @property
    def P_serialized(self) -> str:
        return _serialize(self.P)

    def to_dict(self) -> dict:
        return {
            "column_distribution": " ".join(str(v) for v in self.distribution),
            "P_serialized": self.P_serialized,
            "cycles6_proto": self.proto_cycles6,
            "cycles6_lifted": self.lifted_cycles6,
            "threshold_sigma": self.threshold,
            "threshold_snr_db": self.threshold_snr_db,
            "proxy_threshold": self.proxy_threshold,
            "tag": self.tag,
        }


@dataclass
class ParetoList:
    """Ordered Pareto list; ``candidates[0]`` is CD and ``candidates[-1]`` is TD."""

    candidates: list
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.candidates:
            raise ValueError("a Pareto list needs at least one member")
        cyc = [c.lifted_cycles6 for c in self.candidates]
        thr = [c.threshold for c in self.candidates]
        if any(t is None for t in thr):
            raise ValueError("every Pareto member needs a threshold")
        if any(b <= a for a, b in zip(cyc, cyc[1:])):
            raise ValueError("cycle counts must increase strictly along the list")
        if any(b <= a for a, b in zip(thr, thr[1:])):
            raise ValueError("thresholds must increase strictly along the list")
        n = len(self.candidates)
        for i, c in enumerate(self.candidates):
            c.tag = "CD" if i == 0 else ("TD" if i == n - 1 else "interior")

    def __len__(self):
        return len(self.candidates)

    def __iter__(self):
        return iter(self.candidates)

    def __getitem__(self, i):
        return self.candidates[i]

    @property
    def cd(self) -> DesignCandidate:
        return self.candidates[0]

    @property
    def td(self) -> DesignCandidate:
        return self.candidates[-1]

    def to_rows(self) -> list[dict]:
        return [{"rank": i, **c.to_dict()} for i, c in enumerate(self.candidates)]


def pareto_filter(cycles: Sequence, thresholds: Sequence, min_gain: float = 0.0) -> list:
    """Indices kept by the running-maximum rule.

    Item ``i`` is kept when ``thresholds[i] > best + min_gain`` where ``best``
    is the largest threshold kept so far (initially 0).

    Raises
    ------
    ValueError
        If ``cycles`` is not ascending or the lengths differ.

    Examples
    --------
    >>> pareto_filter([1, 2, 3], [0.5, 0.4, 0.6])
    [0, 2]
    """
    cycles = list(cycles)
    thresholds = list(thresholds)
    if len(cycles) != len(thresholds):
        raise ValueError("cycles and thresholds must have the same length")
    if any(b < a for a, b in zip(cycles, cycles[1:])):
        raise ValueError("cycle counts must be sorted ascending")
    if min_gain < 0:
        raise ValueError("min_gain must be nonnegative")
    keep, best = [], 0.0
    for i, t in enumerate(thresholds):
        if t > best + min_gain:
            keep.append(i)
            best = t
    return keep


def _coupled_threshold(P, l, tol, model):
    try:
        return threshold(couple_partition(P, l), tol, model=model).sigma
    except RuntimeError as exc:
        warnings.warn(f"threshold failed for P={_serialize(P)}: {exc}", RuntimeWarning)
        return None


def _proxy(P, tol, model, side):
    try:
        return proxy_global_threshold(P, tol, side=side, model=model)
    except (RuntimeError, ValueError) as exc:
        warnings.warn(f"proxy threshold failed for P={_serialize(P)}: {exc}", RuntimeWarning)
        return None


def _map(fn, items, n_jobs):
    if n_jobs == 1:
        return [fn(*it) for it in items]
    return Parallel(n_jobs=n_jobs)(delayed(fn)(*it) for it in items)


def _cycles(P, C, z, l):
    return count_c6_sc_proto(P, l), count_c6_sc(P, C, z, l)


def evaluate_partition(P, z: int, l: int, alpha: int, tol: float = 1e-4, *,
                       gamma_c: int | None = None, with_threshold: bool = True,
                       model: str = "exact") -> DesignCandidate:
    """Cycle counts and coupled threshold of a single partitioning matrix.

    ``gamma_c`` is the number of coupling rows used for the reported column
    distribution; by default all rows of a binary ``P``, otherwise the
    leading rows found by :func:`split_rows`.
    """
    P = check_partition_matrix(P)
    if gamma_c is None:
        gamma_c = P.shape[0] if not np.any(P == STAR) else split_rows(P)[0]
    C = power_matrix(P.shape[0], P.shape[1], alpha, z)
    proto, lifted = _cycles(P, C, z, l)
    thr = _coupled_threshold(P, l, tol, model) if with_threshold else None
    return DesignCandidate(tuple(column_distribution(P[:gamma_c]).tolist()), P, proto, lifted, thr)


def _sort_key(c: DesignCandidate, score: str):
    s = getattr(c, score)
    return (c.lifted_cycles6, -s, c.distribution)


def _filter_candidates(cands, score, min_gain):
    cands = sorted((c for c in cands if getattr(c, score) is not None),
                   key=lambda c: _sort_key(c, score))
    keep = pareto_filter([c.lifted_cycles6 for c in cands],
                         [getattr(c, score) for c in cands], min_gain)
    return [cands[i] for i in keep]


def _score_thresholds(cands, fn, n_jobs, patience, attr):
    """Fill ``attr`` in sorted order, optionally stopping after ``patience`` misses."""
    if patience is None:
        vals = _map(fn, [(c.P,) for c in cands], n_jobs)
        for c, v in zip(cands, vals):
            setattr(c, attr, v)
        return cands
    best, misses, done = 0.0, 0, []
    for i, c in enumerate(cands):
        v = fn(c.P)
        setattr(c, attr, v)
        done.append(c)
        if v is not None and v > best:
            best, misses = v, 0
        else:
            misses += 1
        tie_open = i + 1 < len(cands) and cands[i + 1].lifted_cycles6 == c.lifted_cycles6
        if misses >= patience and not tie_open:
            log.info("early exit after %d of %d candidates", i + 1, len(cands))
            break
    return done


def pareto_design(gamma: int, kappa: int, z: int, l: int, alpha: int, tol: float = 1e-4, *,
                  min_gain: float | None = None, patience: int | None = None,
                  model: str = "exact", n_jobs: int = 1,
                  candidates: Iterable | None = None) -> ParetoList:
    """Pareto list of binary partitioning matrices for a coupled code without locality.

    Every nonequivalent ``gamma x kappa`` matrix is scored by its lifted
    6-cycle count and coupled EXIT threshold.  Candidates are sorted by
    ``(cycles, -threshold, distribution)`` and filtered with
    :func:`pareto_filter`.

    Parameters
    ----------
    gamma, kappa : int
        Shape of the partitioning matrix.
    z, l, alpha : int
        Circulant size, coupling length and power-matrix multiplier.
    tol : float
        Bisection tolerance of each threshold.
    min_gain : float, optional
        Threshold margin of the filter.  Defaults to ``tol`` so that
        differences below the bisection resolution do not lengthen the list.
    patience : int, optional
        Stop scoring after this many consecutive candidates fail to raise
        the best threshold.  Off by default.
    candidates : iterable of tuple, optional
        Column distributions to search instead of the full nonequivalent set.
    """
    gamma = check_positive_int(gamma, "gamma")
    kappa = check_positive_int(kappa, "kappa")
    l = check_positive_int(l, "l", minimum=2)
    min_gain = tol if min_gain is None else min_gain
    C = power_matrix(gamma, kappa, alpha, z)
    dists = list(candidates) if candidates is not None else list(enumerate_nonequivalent(kappa, gamma))
    if not dists:
        raise ValueError("empty candidate set")
    mats = [distribution_to_matrix(n) for n in dists]
    counts = _map(_cycles, [(P, C, z, l) for P in mats], n_jobs)
    cands = [DesignCandidate(tuple(int(v) for v in n), P, p, f)
             for n, P, (p, f) in zip(dists, mats, counts)]
    cands.sort(key=lambda c: (c.lifted_cycles6, c.distribution))
    cands = _score_thresholds(cands, lambda P: _coupled_threshold(P, l, tol, model),
                              n_jobs, patience, "threshold")
    members = _filter_candidates(cands, "threshold", min_gain)
    params = dict(gamma=gamma, kappa=kappa, z=z, l=l, alpha=alpha, tol=tol, model=model)
    return ParetoList(members, params)


def locality_design(gamma_c: int, gamma_l: int, kappa: int, z: int, l: int, alpha: int,
                    scheme: str = "regular", nu: int = 0, tol: float = 1e-4, *,
                    min_gain: float | None = None, proxy_tol: float = 1e-5,
                    proxy_min_gain: float = 0.0, side: str = "right",
                    model: str = "exact", n_jobs: int = 1,
                    candidates: Iterable | None = None) -> ParetoList:
    """Pareto list for a coupled code with sub-block locality.

    The coupling rows range over nonequivalent ``gamma_c x kappa`` matrices
    without constant rows; the local rows are ``build_local(gamma_l, kappa,
    nu, scheme)``.  Cycles are counted on the full lifted code.  The search
    objective is the boundary-protograph threshold of ``side``; the Pareto
    list it yields is then re-scored with coupled thresholds and filtered
    again, so the returned list is Pareto in the coupled threshold.

    Parameters
    ----------
    scheme : {"regular", "balanced", "unbalanced"}
        Local-row layout; ``"regular"`` requires ``nu = 0``.
    min_gain : float, optional
        Margin of the final filter on coupled thresholds (default ``tol``).
    proxy_tol, proxy_min_gain : float
        Bisection tolerance and filter margin of the proxy search.  Proxy
        values of neighbouring candidates often differ by less than
        ``1e-4``, so they are resolved more finely than the final scores.
    side : {"right", "left"}
        Boundary replica whose protograph serves as the proxy.  The right
        boundary pairs the ``B1`` band with the local rows.
    """
    gamma_c = check_positive_int(gamma_c, "gamma_c")
    gamma_l = check_positive_int(gamma_l, "gamma_l", minimum=0)
    l = check_positive_int(l, "l", minimum=2)
    min_gain = tol if min_gain is None else min_gain
    B_L = build_local(gamma_l, kappa, nu, scheme) if gamma_l else np.zeros((0, kappa), np.int8)
    C = power_matrix(gamma_c + gamma_l, kappa, alpha, z)
    if candidates is None:
        candidates = filter_nonconstant_rows(enumerate_nonequivalent(kappa, gamma_c))
    dists = [tuple(int(v) for v in n) for n in candidates]
    if not dists:
        raise ValueError("empty candidate set")
    mats = [assemble_locality(distribution_to_matrix(n), B_L) for n in dists]
    counts = _map(_cycles, [(P, C, z, l) for P in mats], n_jobs)
    proxies = _map(_proxy, [(P, proxy_tol, model, side) for P in mats], n_jobs)
    cands = [DesignCandidate(n, P, p, f, proxy_threshold=q)
             for n, P, (p, f), q in zip(dists, mats, counts, proxies)]
    short = _filter_candidates(cands, "proxy_threshold", proxy_min_gain)
    thr = _map(_coupled_threshold, [(c.P, l, tol, model) for c in short], n_jobs)
    for c, t in zip(short, thr):
        c.threshold = t
    members = _filter_candidates(short, "threshold", min_gain)
    params = dict(gamma_c=gamma_c, gamma_l=gamma_l, kappa=kappa, z=z, l=l, alpha=alpha,
                  scheme=scheme, nu=nu, tol=tol, proxy_tol=proxy_tol, model=model, side=side)
    return ParetoList(members, params)


def with_local_rows(candidate: DesignCandidate, B_L, z: int, l: int, alpha: int,
                    tol: float = 1e-4, *, model: str = "exact") -> DesignCandidate:
    """Re-evaluate a design with its local rows replaced by ``B_L``."""
    gamma_c = len(candidate.distribution).bit_length() - 1
    P = assemble_locality(candidate.P[:gamma_c], B_L)
    out = evaluate_partition(P, z, l, alpha, tol, gamma_c=gamma_c, model=model)
    return replace(out, distribution=candidate.distribution, tag=candidate.tag)


def local_scheme_select(gamma_l: int, kappa: int, nu: int, objective: str = "cycles", *,
                        tol: float = 1e-4, model: str = "exact") -> str:
    """Choose the balanced or unbalanced local layout for an objective.

    ``objective="cycles"`` compares protograph 6-cycle counts (ties go to
    the unbalanced layout); ``objective="threshold"`` compares EXIT
    thresholds of the local protographs.

    Examples
    --------
    >>> local_scheme_select(3, 11, 8, "cycles")
    'unbalanced'
    >>> local_scheme_select(4, 13, 8, "cycles")
    'balanced'
    """
    if gamma_l not in (3, 4):
        raise ValueError(f"gamma_l must be 3 or 4, got {gamma_l}")
    bal = build_local(gamma_l, kappa, nu, "balanced")
    unb = build_local(gamma_l, kappa, nu, "unbalanced")
    if objective == "cycles":
        return "unbalanced" if count_c6_proto(unb) <= count_c6_proto(bal) else "balanced"
    if objective == "threshold":
        tb = threshold(bal, tol, model=model).sigma
        tu = threshold(unb, tol, model=model).sigma
        return "balanced" if tb >= tu else "unbalanced"
    raise ValueError(f"objective must be 'cycles' or 'threshold', got {objective!r}")


def baseline_cv(gamma: int, kappa: int, zeta, z: int, l: int, alpha: int, tol: float = 1e-4,
                *, B_L=None, model: str = "exact") -> DesignCandidate:
    """Cutting-vector partition, optionally stacked over local rows ``B_L``."""
    P = cutting_vector(gamma, kappa, zeta)
    if B_L is not None and np.asarray(B_L).size:
        P = assemble_locality(P, B_L)
    return evaluate_partition(P, z, l, alpha, tol, gamma_c=gamma, model=model)


def _row_balanced(n, kappa):
    P = distribution_to_matrix(n)
    zeros = (P == 0).sum(axis=1)
    return bool(np.all((zeros == kappa // 2) | (zeros == (kappa + 1) // 2)))


def baseline_oo(gamma: int, kappa: int, z: int, l: int, alpha: int, tol: float = 1e-4,
                *, B_L=None, model: str = "exact") -> DesignCandidate:
    """Partition minimising coupled protograph 6-cycles among row-balanced matrices.

    Row-balanced means every row splits its ``kappa`` entries as evenly as
    possible between the two bands.  The protograph count is taken on the
    coupling rows alone; ties are broken by the lifted count of the full
    code (with ``B_L`` if given), then by distribution order.
    """
    space = [n for n in enumerate_nonequivalent(kappa, gamma) if _row_balanced(n, kappa)]
    if not space:
        raise ValueError("no row-balanced partition exists")
    proto = [count_c6_sc_proto(distribution_to_matrix(n), l) for n in space]
    best = min(proto)
    ties = [n for n, p in zip(space, proto) if p == best]
    has_local = B_L is not None and np.asarray(B_L).size
    gamma_all = gamma + (np.asarray(B_L).shape[0] if has_local else 0)
    C = power_matrix(gamma_all, kappa, alpha, z)

    def full(n):
        P = distribution_to_matrix(n)
        return assemble_locality(P, B_L) if has_local else P

    winner = min(ties, key=lambda n: (count_c6_sc(full(n), C, z, l), n))
    out = evaluate_partition(full(winner), z, l, alpha, tol, gamma_c=gamma, model=model)
    return replace(out, distribution=tuple(int(v) for v in winner))


class CandidateScorer(TransformerMixin, BaseEstimator):
    """Map column distributions to ``[proto_cycles6, lifted_cycles6, threshold]`` rows.

    Parameters
    ----------
    z, l, alpha : int
        Lifting and coupling parameters.
    local_rows : array_like, optional
        Local-row matrix stacked under every candidate.
    tol : float
        Threshold bisection tolerance; ``None`` skips thresholds (NaN column).
    """

    def __init__(self, z=67, l=5, alpha=6, local_rows=None, tol=1e-4, model="exact", n_jobs=1):
        self.z = z
        self.l = l
        self.alpha = alpha
        self.local_rows = local_rows
        self.tol = tol
        self.model = model
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        X = np.asarray(X)
        if X.ndim != 2:
            raise ValueError("X must be a 2-D array of column distributions")
        self.n_features_in_ = X.shape[1]
        return self

    def _matrix(self, n):
        P = distribution_to_matrix(n)
        if self.local_rows is not None and np.asarray(self.local_rows).size:
            P = assemble_locality(P, self.local_rows)
        return P

    def transform(self, X):
        X = np.asarray(X, dtype=np.int64)
        if X.ndim != 2 or X.shape[1] != getattr(self, "n_features_in_", X.shape[1]):
            raise ValueError("X does not match the fitted number of types")
        mats = [self._matrix(n) for n in X]
        C = power_matrix(mats[0].shape[0], mats[0].shape[1], self.alpha, self.z)
        counts = _map(_cycles, [(P, C, self.z, self.l) for P in mats], self.n_jobs)
        if self.tol is None:
            thr = [np.nan] * len(mats)
        else:
            thr = _map(_coupled_threshold, [(P, self.l, self.tol, self.model) for P in mats],
                       self.n_jobs)
        return np.array([[p, f, np.nan if t is None else t] for (p, f), t in zip(counts, thr)])


class ParetoDesigner(BaseEstimator):
    """Estimator wrapper around :func:`pareto_design`.

    ``fit`` ignores ``X`` unless it is given, in which case its rows are the
    column distributions to search.  Results land in ``pareto_list_``,
    ``cd_`` and ``td_``.
    """

    def __init__(self, gamma=3, kappa=11, z=67, l=5, alpha=6, tol=1e-4, min_gain=None,
                 patience=None, model="exact", n_jobs=1):
        self.gamma = gamma
        self.kappa = kappa
        self.z = z
        self.l = l
        self.alpha = alpha
        self.tol = tol
        self.min_gain = min_gain
        self.patience = patience
        self.model = model
        self.n_jobs = n_jobs

    def fit(self, X=None, y=None):
        cands = None if X is None else [tuple(int(v) for v in row) for row in np.asarray(X)]
        self.pareto_list_ = pareto_design(
            self.gamma, self.kappa, self.z, self.l, self.alpha, self.tol,
            min_gain=self.min_gain, patience=self.patience, model=self.model,
            n_jobs=self.n_jobs, candidates=cands)
        self.cd_ = self.pareto_list_.cd
        self.td_ = self.pareto_list_.td
        return self


class LocalityDesigner(BaseEstimator):
    """Estimator wrapper around :func:`locality_design`."""

    def __init__(self, gamma_c=3, gamma_l=2, kappa=11, z=67, l=5, alpha=6, scheme="regular",
                 nu=0, tol=1e-4, min_gain=None, side="right", model="exact", n_jobs=1):
        self.gamma_c = gamma_c
        self.gamma_l = gamma_l
        self.kappa = kappa
        self.z = z
        self.l = l
        self.alpha = alpha
        self.scheme = scheme
        self.nu = nu
        self.tol = tol
        self.min_gain = min_gain
        self.side = side
        self.model = model
        self.n_jobs = n_jobs

    def fit(self, X=None, y=None):
        cands = None if X is None else [tuple(int(v) for v in row) for row in np.asarray(X)]
        self.pareto_list_ = locality_design(
            self.gamma_c, self.gamma_l, self.kappa, self.z, self.l, self.alpha,
            self.scheme, self.nu, self.tol, min_gain=self.min_gain, side=self.side,
            model=self.model, n_jobs=self.n_jobs, candidates=cands)
        self.cd_ = self.pareto_list_.cd
        self.td_ = self.pareto_list_.td
        return self
