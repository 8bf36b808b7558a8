import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from oracles import bisect_threshold
from scldpc.construct import STAR, couple_partition
from scldpc.enumeration import distribution_to_matrix
from scldpc.exit_chart import (
    ExitProtograph,
    boundary_protograph,
    cn_update,
    exit_converges,
    j_fun,
    j_inv,
    proxy_global_threshold,
    regular_threshold,
    sigma_to_snr_db,
    threshold,
    vn_update,
)


def j_quad(s):
    """Direct quadrature of 1 - E[log2(1 + e^-L)], L ~ N(s^2/2, s^2)."""
    if s == 0:
        return 0.0
    mu, sd = s * s / 2, s

    def f(x):
        return np.exp(-((x - mu) ** 2) / (2 * sd * sd)) / (math.sqrt(2 * math.pi) * sd) * np.logaddexp(0, -x) / math.log(2)

    val, _ = integrate.quad(f, mu - 12 * sd, mu + 12 * sd, limit=200)
    return 1 - val


@pytest.mark.parametrize("s", [0.05, 0.3, 1.0, 1.7, 2.5, 4.0, 6.0, 9.0])
def test_exact_j_matches_quadrature(s):
    assert j_fun(s) == pytest.approx(j_quad(s), abs=2e-6)


def test_j_endpoints_and_monotonicity():
    assert j_fun(0.0) == 0.0
    s = np.linspace(0, 15, 400)
    v = j_fun(s)
    assert np.all(np.diff(v) > 0)
    assert v[-1] > 0.9999


@given(st.floats(0.02, 8.0))
@settings(max_examples=200)
def test_j_inverse_round_trip(s):
    assert j_inv(j_fun(s)) == pytest.approx(s, rel=1e-4)


def test_tenbrink_close_to_exact():
    s = np.linspace(0.1, 6, 50)
    assert np.max(np.abs(j_fun(s, "tenbrink") - j_fun(s))) < 5e-3


def test_j_rejects_bad_arguments():
    with pytest.raises(ValueError):
        j_fun(-1.0)
    with pytest.raises(ValueError):
        j_inv(1.0)
    with pytest.raises(ValueError):
        j_fun(1.0, model="other")


def test_node_updates():
    assert vn_update(0.0) == 0.0
    assert vn_update(1.2) == pytest.approx(j_fun(1.2))
    assert cn_update() == pytest.approx(1.0, abs=1e-9)
    assert cn_update([1.0, 1.0]) == pytest.approx(1.0, abs=1e-6)
    assert cn_update([0.0, 0.9]) == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(ValueError):
        vn_update(1.0, [1.5])


def test_regular_3_6_threshold():
    # the (3,6)-regular ensemble threshold on the BI-AWGN channel is 0.8809
    assert regular_threshold(3, 6) == pytest.approx(0.8809, abs=1e-3)


def test_regular_thresholds_decrease_with_check_degree():
    vals = [regular_threshold(3, dc, tol=1e-3) for dc in (4, 5, 6, 8)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_threshold_brackets_converge_and_fail():
    B = np.ones((3, 6), dtype=np.int8)
    r = threshold(B, 1e-4)
    assert r.converged and r.bracket_width <= 1e-4
    assert exit_converges(B, r.sigma - 1e-3)
    assert not exit_converges(B, r.sigma + 1e-3)
    ref = bisect_threshold(lambda s: exit_converges(B, s))
    assert abs(ref - r.sigma) < 1e-4


def test_threshold_expands_bracket():
    B = np.ones((3, 6), dtype=np.int8)
    r = threshold(B, 1e-3, bracket=(0.95, 1.0))
    assert r.sigma == pytest.approx(0.8809, abs=2e-3)


def test_coupling_improves_threshold():
    P = distribution_to_matrix((0, 1, 2, 2, 2, 2, 2, 0))
    coupled = threshold(couple_partition(P, 5), 1e-3).sigma
    assert coupled > regular_threshold(3, 11, tol=1e-3)


def test_boundary_protographs():
    P = np.array([[0, 1, 1], [1, 0, 0], [0, STAR, 0]])
    assert boundary_protograph(P, "left").tolist() == [[1, 0, 0], [0, 1, 1], [1, 0, 1]]
    assert boundary_protograph(P, "right").tolist() == [[0, 1, 1], [1, 0, 0], [1, 0, 1]]
    with pytest.raises(ValueError):
        boundary_protograph(P, "middle")


def test_all_zero_partition_gives_block_threshold():
    P = np.zeros((3, 6), dtype=np.int8)
    assert proxy_global_threshold(P, 1e-3) == pytest.approx(regular_threshold(3, 6, tol=1e-3), abs=1e-3)


@pytest.mark.parametrize("n", [(0, 1, 2, 2, 2, 2, 2, 0), (4, 0, 0, 2, 2, 0, 0, 3), (1, 1, 2, 2, 2, 2, 1, 0)])
@pytest.mark.parametrize("side", ["left", "right"])
def test_proxy_is_lower_bound(n, side):
    P = distribution_to_matrix(n)
    P = np.vstack([P, np.zeros((2, P.shape[1]), dtype=np.int8)])
    coupled = threshold(couple_partition(P, 5), 1e-3).sigma
    assert proxy_global_threshold(P, 1e-3, side=side) <= coupled + 1e-3


def test_proxy_rejects_empty_rows():
    with pytest.raises(ValueError):
        proxy_global_threshold(np.array([[1, 0], [1, 0]]))


def test_protograph_with_degree_one_columns():
    g = ExitProtograph([[1, 1, 1, 0], [1, 1, 0, 1]])
    assert g.n_edges == 6
    ok, it = g.converges(0.3)
    assert isinstance(ok, bool) and it >= 0


def test_snr_conversion():
    assert sigma_to_snr_db(1.0) == 0.0
    assert sigma_to_snr_db(0.5) == pytest.approx(6.0206, abs=1e-4)
