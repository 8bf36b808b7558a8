"""Monte Carlo bit-error-rate estimation over the BPSK/AWGN channel.

The all-zero codeword is transmitted (valid for any linear code with a
symmetric channel and decoder).  Each frame draws its noise from its own
generator seeded by ``(seed, snr_index, frame_index)``, so results do not
depend on how frames are distributed over workers.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numba
import numpy as np
from joblib import Parallel, delayed

from ._validation import check_partition_matrix
from .construct import CBMatrix, lift, split_rows

__all__ = [
    "SimConfig",
    "BerPoint",
    "TannerGraph",
    "snr_to_sigma",
    "sigma_to_snr",
    "bp_decode",
    "wilson_interval",
    "simulate_ber",
    "local_code",
    "simulate_local_ber",
    "code_rate",
]

LLR_CLIP = 30.0


def snr_to_sigma(snr_db, rate=None):
    """Noise standard deviation for a given SNR in dB.

    With ``rate=None`` the SNR is the symbol SNR ``1 / sigma**2`` of
    unit-energy BPSK, i.e. ``sigma = 10**(-snr_db / 20)``.  With a code
    rate the SNR is read as ``Eb/N0`` and ``sigma**2 = 1 / (2 rate 10**(snr_db / 10))``.
    """
    snr_db = np.asarray(snr_db, dtype=float)
    if np.any(~np.isfinite(snr_db)):
        raise ValueError("SNR values must be finite")
    if rate is None:
        out = 10.0 ** (-snr_db / 20.0)
    else:
        if not 0 < rate <= 1:
            raise ValueError("rate must lie in (0, 1]")
        out = np.sqrt(1.0 / (2.0 * rate * 10.0 ** (snr_db / 10.0)))
    return float(out) if out.ndim == 0 else out


def sigma_to_snr(sigma, rate=None):
    """Inverse of :func:`snr_to_sigma`."""
    sigma = np.asarray(sigma, dtype=float)
    if rate is None:
        out = -20.0 * np.log10(sigma)
    else:
        out = 10.0 * np.log10(1.0 / (2.0 * rate * sigma ** 2))
    return float(out) if out.ndim == 0 else out


def code_rate(H: CBMatrix, exact: bool = False) -> float:
    """Design rate ``1 - (#nonempty checks) / n``, or ``1 - rank / n`` over GF(2) when ``exact``."""
    n = H.shape[1]
    if not exact:
        rows = np.unique(H.edges()[0])
        return 1.0 - rows.size / n
    return 1.0 - _gf2_rank(H.to_dense()) / n


def _gf2_rank(A):
    A = (np.asarray(A) % 2).astype(np.uint8)
    rows, cols = A.shape
    packed = np.packbits(A, axis=1)
    rank = 0
    for c in range(cols):
        byte, bit = divmod(c, 8)
        mask = np.uint8(0x80 >> bit)
        pivots = np.nonzero(packed[rank:, byte] & mask)[0]
        if pivots.size == 0:
            continue
        p = rank + pivots[0]
        if p != rank:
            packed[[rank, p]] = packed[[p, rank]]
        others = np.nonzero(packed[:, byte] & mask)[0]
        others = others[others != rank]
        packed[others] ^= packed[rank]
        rank += 1
        if rank == rows:
            break
    return rank


class TannerGraph:
    """Edge indexing of a lifted code for the message-passing decoder."""

    def __init__(self, H: CBMatrix):
        if not isinstance(H, CBMatrix):
            raise TypeError("expected a CBMatrix")
        self.H = H
        self.n_checks, self.n_vars = H.shape
        checks, variables = H.edges()
        order = np.lexsort((variables, checks))
        self.edge_check = checks[order].astype(np.int64)
        self.edge_var = variables[order].astype(np.int64)
        self.check_ptr = np.searchsorted(self.edge_check, np.arange(self.n_checks + 1)).astype(np.int64)
        self.var_edges = np.argsort(self.edge_var, kind="stable").astype(np.int64)
        self.var_ptr = np.searchsorted(self.edge_var[self.var_edges], np.arange(self.n_vars + 1)).astype(np.int64)

    def decode(self, llr, max_iter: int = 100):
        """Flooding sum-product decoding; see :func:`bp_decode`."""
        llr = np.asarray(llr, dtype=np.float64)
        if llr.shape != (self.n_vars,):
            raise ValueError(f"expected {self.n_vars} LLRs, got shape {llr.shape}")
        bits, ok, it = _bp(self.check_ptr, self.edge_var, self.var_ptr, self.var_edges,
                           llr, int(max_iter))
        return bits, bool(ok), int(it)


@numba.njit(cache=True)
def _syndrome_ok(check_ptr, edge_var, bits):
    for c in range(check_ptr.shape[0] - 1):
        s = 0
        for e in range(check_ptr[c], check_ptr[c + 1]):
            s ^= bits[edge_var[e]]
        if s:
            return False
    return True


@numba.njit(cache=True)
def _bp(check_ptr, edge_var, var_ptr, var_edges, llr, max_iter):
    n_edges = edge_var.shape[0]
    n_vars = llr.shape[0]
    v2c = np.empty(n_edges)
    c2v = np.zeros(n_edges)
    t = np.empty(n_edges)
    bits = np.zeros(n_vars, dtype=np.uint8)
    lim = math.tanh(LLR_CLIP / 2.0)
    for v in range(n_vars):
        bits[v] = 1 if llr[v] < 0 else 0
    if _syndrome_ok(check_ptr, edge_var, bits):
        return bits, True, 0
    for e in range(n_edges):
        v2c[e] = llr[edge_var[e]]
    for it in range(1, max_iter + 1):
        # check update with leave-one-out products (no division)
        for c in range(check_ptr.shape[0] - 1):
            a, b = check_ptr[c], check_ptr[c + 1]
            if b - a == 0:
                continue
            prod = 1.0
            for e in range(a, b):
                t[e] = math.tanh(0.5 * v2c[e])
                c2v[e] = prod
                prod *= t[e]
            prod = 1.0
            for e in range(b - 1, a - 1, -1):
                x = c2v[e] * prod
                prod *= t[e]
                if x > lim:
                    x = lim
                elif x < -lim:
                    x = -lim
                c2v[e] = 2.0 * math.atanh(x)
        # variable update and tentative decision
        for v in range(n_vars):
            tot = llr[v]
            for k in range(var_ptr[v], var_ptr[v + 1]):
                tot += c2v[var_edges[k]]
            bits[v] = 1 if tot < 0 else 0
            for k in range(var_ptr[v], var_ptr[v + 1]):
                e = var_edges[k]
                m = tot - c2v[e]
                if m > LLR_CLIP:
                    m = LLR_CLIP
                elif m < -LLR_CLIP:
                    m = -LLR_CLIP
                v2c[e] = m
        if _syndrome_ok(check_ptr, edge_var, bits):
            return bits, True, it
    return bits, False, max_iter


def bp_decode(H, llr, max_iter: int = 100):
    """Decode channel LLRs (positive favours bit 0) with flooding sum-product.

    Parameters
    ----------
    H : CBMatrix or TannerGraph
    llr : array_like
        One LLR per code bit.
    max_iter : int
        Iteration cap; decoding stops early once every check is satisfied.

    Returns
    -------
    bits : numpy.ndarray
        Hard decisions (uint8).
    converged : bool
        True if the decisions satisfy every parity check.
    iterations : int
        Iterations used (0 if the channel decisions were already a codeword).
    """
    graph = H if isinstance(H, TannerGraph) else TannerGraph(H)
    return graph.decode(llr, max_iter)


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054):
    """Wilson score interval for a binomial proportion (95 % by default)."""
    if trials <= 0:
        return 0.0, 1.0
    p = successes / trials
    denom = 1.0 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


@dataclass
class SimConfig:
    """Parameters of a BER sweep.

    Attributes
    ----------
    snr_db : list of float
        SNR points in dB.
    max_frames : int
        Frame cap per point.
    min_frame_errors : int
        Stop a point once this many frame errors have been observed.
    max_iter : int
        Decoder iteration cap.
    seed : int
        Root seed of all noise streams.
    rate : float or None
        If given, SNR values are read as ``Eb/N0`` for this code rate;
        otherwise as the symbol SNR ``1 / sigma**2``.
    n_jobs : int
        Worker processes (results do not depend on it).
    batch_size : int
        Frames per scheduled task.
    """

    snr_db: list = field(default_factory=lambda: [2.0])
    max_frames: int = 10_000
    min_frame_errors: int = 50
    max_iter: int = 100
    seed: int = 0
    rate: float | None = None
    n_jobs: int = 1
    batch_size: int = 64

    def __post_init__(self):
        self.snr_db = [float(s) for s in np.atleast_1d(self.snr_db)]
        if not all(math.isfinite(s) for s in self.snr_db):
            raise ValueError("SNR values must be finite")
        if self.min_frame_errors < 1:
            raise ValueError("min_frame_errors must be at least 1")
        if self.max_frames < 1 or self.max_iter < 1 or self.batch_size < 1:
            raise ValueError("max_frames, max_iter and batch_size must be positive")


@dataclass(frozen=True)
class BerPoint:
    """Aggregated statistics of one SNR point."""

    snr_db: float
    bit_errors: int
    bits_simulated: int
    frame_errors: int
    frames_simulated: int
    ber: float
    ci_lo: float
    ci_hi: float
    hit_max_frames: bool

    @property
    def half_width(self) -> float:
        """Half the width of the 95 % Wilson interval."""
        return 0.5 * (self.ci_hi - self.ci_lo)

    def to_dict(self):
        return asdict(self)


def _frame_rng(seed, point, frame):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(point), int(frame)])))


def _run_frames(graph, sigma, seed, point, frames, max_iter):
    out = np.empty((len(frames), 2), dtype=np.int64)
    n = graph.n_vars
    for k, f in enumerate(frames):
        noise = _frame_rng(seed, point, f).standard_normal(n)
        y = 1.0 + sigma * noise
        llr = 2.0 * y / (sigma * sigma)
        bits, _, _ = graph.decode(llr, max_iter)
        errs = int(bits.sum())
        out[k] = errs, int(errs > 0)
    return out


def _simulate_graph(graph: TannerGraph, config: SimConfig):
    points = []
    with Parallel(n_jobs=config.n_jobs) as pool:
        for p, snr in enumerate(config.snr_db):
            sigma = snr_to_sigma(snr, config.rate)
            bit_err = frame_err = frames = 0
            next_frame = 0
            done = False
            while not done and next_frame < config.max_frames:
                n_tasks = max(1, config.n_jobs if config.n_jobs > 0 else 1)
                chunks = []
                for _ in range(n_tasks):
                    stop = min(next_frame + config.batch_size, config.max_frames)
                    if stop > next_frame:
                        chunks.append(range(next_frame, stop))
                    next_frame = stop
                results = pool(
                    delayed(_run_frames)(graph, sigma, config.seed, p, list(ch), config.max_iter)
                    for ch in chunks
                )
                # consume frames in index order so the stopping point is worker independent
                for res in results:
                    for be, fe in res:
                        bit_err += int(be)
                        frame_err += int(fe)
                        frames += 1
                        if frame_err >= config.min_frame_errors:
                            done = True
                            break
                    if done:
                        break
            n_bits = frames * graph.n_vars
            lo, hi = wilson_interval(bit_err, n_bits)
            points.append(BerPoint(
                snr_db=snr, bit_errors=bit_err, bits_simulated=n_bits,
                frame_errors=frame_err, frames_simulated=frames,
                ber=bit_err / n_bits if n_bits else 0.0,
                ci_lo=lo, ci_hi=hi, hit_max_frames=not done,
            ))
    return points


def simulate_ber(code: CBMatrix, config: SimConfig | None = None):
    """BER of a lifted code under global BP decoding, one :class:`BerPoint` per SNR."""
    config = config or SimConfig()
    return _simulate_graph(TannerGraph(code), config)


def local_code(P, C, z: int) -> CBMatrix:
    """Lifted local code of one replica: the local rows of ``P`` with their powers.

    Parameters
    ----------
    P : array_like
        Partitioning matrix whose trailing rows are local rows.
    C : array_like
        Per-replica power matrix of the same shape as ``P``.
    z : int
        Circulant size.
    """
    P = check_partition_matrix(P)
    gamma_c, gamma_l = split_rows(P)
    if gamma_l == 0:
        raise ValueError("P has no local rows")
    C = np.asarray(C, dtype=np.int64)
    B_L = (P[gamma_c:] == 0).astype(np.int8)
    return lift(B_L, C[gamma_c:], z)


def simulate_local_ber(P, C, z: int, config: SimConfig | None = None):
    """BER of decoding a single replica with its local checks only."""
    return simulate_ber(local_code(P, C, z), config)
