import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import c6_dense, c6_three_rows, coupled_dense, lifted_dense
from scldpc.construct import (
    STAR,
    build_local,
    couple_partition,
    coupled_power_matrix,
    lift,
    lift_coupled,
    power_matrix,
)
from scldpc.cycles import (
    a_term,
    closed_form_local_c6,
    count_c4_lifted,
    count_c6_bruteforce,
    count_c6_lifted,
    count_c6_proto,
    count_c6_sc,
    count_c6_sc_proto,
    cycle_report,
    overlap_parameters,
)


def test_overlap_parameters_example():
    B = np.array([[1, 1, 0, 1], [1, 1, 1, 0], [0, 1, 1, 1]])
    t = overlap_parameters(B)
    assert t[(0,)] == 3 and t[(0, 1)] == 2 and t[(0, 1, 2)] == 1


def test_a_term_small_cases():
    assert a_term(0, 1, 1, 1) == 1
    assert a_term(1, 1, 1, 1) == 0
    assert a_term(0, 2, 2, 2) == 8


def test_all_ones_count():
    # K_{3,k}: choose an ordered triple of distinct columns for the three row pairs
    for k in range(3, 7):
        assert count_c6_proto(np.ones((3, k), dtype=np.int8)) == k * (k - 1) * (k - 2)


@given(st.integers(2, 5), st.integers(2, 6), st.data())
@settings(max_examples=60, deadline=None)
def test_proto_count_matches_walk_oracle(g, k, data):
    bits = data.draw(st.lists(st.integers(0, 1), min_size=g * k, max_size=g * k))
    B = np.array(bits, dtype=np.int8).reshape(g, k)
    assert count_c6_proto(B) == c6_dense(B)


def test_three_row_oracle_agrees_on_random_batch():
    rng = np.random.default_rng(0)
    batch = rng.integers(0, 2, (200, 3, 6))
    ref = c6_three_rows(batch)
    assert [count_c6_proto(B) for B in batch] == ref.tolist()


@given(st.integers(1, 3), st.integers(2, 4), st.sampled_from([3, 5, 7]), st.data())
@settings(max_examples=40, deadline=None)
def test_lifted_count_matches_dense_oracle(g, k, z, data):
    g += 1
    B = np.array(data.draw(st.lists(st.integers(0, 1), min_size=g * k, max_size=g * k))).reshape(g, k)
    C = np.array(data.draw(st.lists(st.integers(0, z - 1), min_size=g * k, max_size=g * k))).reshape(g, k)
    n = count_c6_lifted(B, C, z)
    assert n % z == 0
    assert n == c6_dense(lifted_dense(B, C, z))


def test_zero_powers_lift_every_cycle():
    B = np.ones((3, 4), dtype=np.int8)
    assert count_c6_lifted(B, np.zeros((3, 4), int), 5) == 5 * count_c6_proto(B)


def test_four_cycles_of_girth_six_family():
    C = power_matrix(3, 11, 6, 67)
    assert count_c4_lifted(np.ones((3, 11)), C, 67) == 0
    assert count_c4_lifted(np.ones((2, 2)), np.zeros((2, 2), int), 3) == 3


@given(st.integers(2, 3), st.integers(2, 4), st.integers(1, 4), st.sampled_from([3, 5, 7]), st.data())
@settings(max_examples=30, deadline=None)
def test_replica_formula_matches_direct_count(g, k, l, z, data):
    vals = data.draw(st.lists(st.sampled_from([0, 1, STAR]), min_size=g * k, max_size=g * k))
    P = np.array(vals, dtype=np.int8).reshape(g, k)
    C = np.array(data.draw(st.lists(st.integers(0, z - 1), min_size=g * k, max_size=g * k))).reshape(g, k)
    direct = c6_dense(lifted_dense(coupled_dense(P, l), np.tile(C, (l + 1, l)), z))
    assert count_c6_sc(P, C, z, l) == direct
    assert count_c6_sc_proto(P, l) == c6_dense(coupled_dense(P, l))


def test_bruteforce_walker_matches_formula_on_setup1():
    from scldpc.enumeration import distribution_to_matrix

    P = distribution_to_matrix((0, 1, 2, 2, 2, 2, 2, 0))
    C = power_matrix(3, 11, 6, 67)
    H = lift_coupled(P, C, 67, 3)
    assert count_c6_bruteforce(H) == count_c6_sc(P, C, 67, 3)


def test_bruteforce_accepts_dense_and_caps_size():
    H = lifted_dense(np.ones((3, 3)), np.array([[0, 0, 0], [0, 1, 2], [0, 2, 1]]), 3)
    assert count_c6_bruteforce(H) == c6_dense(H)
    big = lift(np.ones((3, 40)), np.zeros((3, 40), int), 50)
    with pytest.raises(ValueError):
        count_c6_bruteforce(big, max_edges=100)


def test_cycle_report_fields():
    P = np.array([[0, 1, 1, 0], [1, 0, 1, 0], [0, 0, 1, 1]])
    C = power_matrix(3, 4, 2, 7)
    rep = cycle_report(P, C, 7, 3)
    assert rep.lifted_cycles6 == count_c6_sc(P, C, 7, 3)
    assert set(rep.to_dict()) == {"proto_cycles6", "lifted_cycles6", "lifted_cycles4", "z"}


@pytest.mark.parametrize("scheme", ["balanced", "unbalanced"])
@pytest.mark.parametrize("kappa", range(4, 16))
def test_closed_form_local_gamma3(scheme, kappa):
    for nu in range(kappa):
        B = build_local(3, kappa, nu, scheme)
        assert closed_form_local_c6(3, kappa, nu, scheme) == count_c6_proto(B)


@pytest.mark.parametrize("scheme", ["balanced", "unbalanced"])
def test_closed_form_local_gamma4(scheme):
    for kappa in range(5, 16):
        for nu in range(0, kappa, 4):
            B = build_local(4, kappa, nu, scheme)
            assert closed_form_local_c6(4, kappa, nu, scheme) == count_c6_proto(B)


def test_closed_form_examples():
    assert closed_form_local_c6(3, 11, 8, "unbalanced") == 54
    assert closed_form_local_c6(3, 11, 8, "balanced") == 135
    with pytest.raises(ValueError):
        closed_form_local_c6(4, 13, 7, "balanced")


def test_shape_mismatch_rejected():
    with pytest.raises(ValueError):
        count_c6_sc(np.zeros((2, 3)), np.zeros((2, 2)), 5, 2)
