import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import all_binary, canonical_key
from scldpc.enumeration import (
    canonicalize,
    class_counts,
    column_distribution,
    count_distributions,
    count_filtered,
    count_nonequivalent,
    distribution_to_matrix,
    enumerate_distributions,
    enumerate_nonequivalent,
    equivalent_bruteforce,
    filter_nonconstant_rows,
    has_constant_row,
    is_representative,
    orbit,
    overlap_equivalence_check,
)


def burnside_count(kappa, gamma):
    """Orbit count of column multisets under row permutations (Burnside)."""
    total = 0
    for perm in itertools.permutations(range(gamma)):
        # a row permutation fixes a multiset iff it is constant on cycles of the
        # induced action on column types; count multisets supported by cycles
        types = range(1 << gamma)

        def act(t):
            u = 0
            for i in range(gamma):
                if (t >> (gamma - 1 - i)) & 1:
                    u |= 1 << (gamma - 1 - perm[i])
            return u

        seen, cycle_lens = set(), []
        for t in types:
            if t in seen:
                continue
            n, u = 0, t
            while u not in seen:
                seen.add(u)
                u = act(u)
                n += 1
            cycle_lens.append(n)
        # number of solutions of sum(len_c * x_c) = kappa
        ways = np.zeros(kappa + 1, dtype=object)
        ways[0] = 1
        for c in cycle_lens:
            for s in range(c, kappa + 1):
                ways[s] += ways[s - c]
        total += ways[kappa]
    fact = 1
    for i in range(2, gamma + 1):
        fact *= i
    return total // fact


def test_column_distribution_example():
    B = [[0, 1, 0, 1, 1], [0, 1, 1, 1, 1], [1, 1, 0, 1, 0]]
    assert column_distribution(B).tolist() == [0, 1, 1, 0, 0, 0, 1, 2]


@given(st.lists(st.integers(0, 3), min_size=4, max_size=4))
def test_distribution_roundtrip(n):
    if sum(n) == 0:
        return
    assert column_distribution(distribution_to_matrix(n)).tolist() == n


@pytest.mark.parametrize("gamma,kappa", [(1, 4), (2, 3), (2, 6), (3, 4)])
def test_enumerate_distributions_complete_and_ordered(gamma, kappa):
    items = list(enumerate_distributions(kappa, gamma))
    assert len(items) == count_distributions(kappa, gamma) == comb(kappa + (1 << gamma) - 1, kappa)
    assert items == sorted(items)
    assert len(set(items)) == len(items)
    assert all(sum(n) == kappa for n in items)


@pytest.mark.parametrize("gamma", [1, 2, 3])
@pytest.mark.parametrize("kappa", [0, 1, 2, 5, 9, 14])
def test_closed_forms_match_burnside(gamma, kappa):
    assert count_nonequivalent(kappa, gamma) == burnside_count(kappa, gamma)


def test_class_counts_example():
    assert class_counts(11) == (60, 1452, 4568)


@pytest.mark.parametrize("kappa", [1, 3, 6, 8])
def test_representatives_are_orbit_minima(kappa):
    reps = list(enumerate_nonequivalent(kappa, 3))
    assert len(reps) == count_nonequivalent(kappa, 3)
    assert all(canonicalize(n) == n for n in reps)
    classes = {canonicalize(n) for n in enumerate_distributions(kappa, 3)}
    assert classes == set(reps)


@given(st.lists(st.integers(0, 3), min_size=8, max_size=8), st.permutations(range(3)))
@settings(max_examples=100)
def test_canonicalize_invariant_under_row_permutation(n, perm):
    M = distribution_to_matrix(n)
    if M.shape[1] == 0:
        return
    moved = column_distribution(M[list(perm)])
    assert canonicalize(moved) == canonicalize(n)
    assert is_representative(canonicalize(n))


def test_orbit_sizes_divide_group_order():
    for n in enumerate_distributions(3, 3):
        assert 6 % len(orbit(n)) == 0


@pytest.mark.parametrize("gamma,kappa", [(2, 3), (2, 4), (3, 3)])
def test_enumeration_against_bruteforce_canonical_keys(gamma, kappa):
    keys = {canonical_key(M) for M in all_binary(gamma, kappa)}
    reps = [canonical_key(distribution_to_matrix(n)) for n in enumerate_nonequivalent(kappa, gamma)]
    assert len(reps) == len(set(reps)) == len(keys)
    assert set(reps) == keys


def test_gamma4_falls_back_to_orbit_minimum():
    reps = list(enumerate_nonequivalent(2, 4))
    assert len(reps) == burnside_count(2, 4)


@pytest.mark.parametrize("gamma,kappa", [(2, 5), (2, 9), (3, 5), (3, 8), (3, 11)])
def test_filtered_counts(gamma, kappa):
    stream = filter_nonconstant_rows(enumerate_nonequivalent(kappa, gamma), gamma)
    assert sum(1 for _ in stream) == count_filtered(kappa, gamma)


def test_has_constant_row():
    assert has_constant_row((0, 0, 2, 1))
    assert not has_constant_row((1, 0, 0, 1))
    with pytest.raises(ValueError):
        list(filter_nonconstant_rows([(1, 0, 0, 1)], gamma=3))


def test_equivalence_oracles_agree():
    rng = np.random.default_rng(3)
    for _ in range(50):
        A = rng.integers(0, 2, (3, 5))
        B = A[rng.permutation(3)][:, rng.permutation(5)]
        assert equivalent_bruteforce(A, B)
        assert overlap_equivalence_check(A, A[:, rng.permutation(5)])
        C = rng.integers(0, 2, (3, 5))
        assert equivalent_bruteforce(A, C) == (canonical_key(A) == canonical_key(C))


def test_overlap_check_detects_row_swap():
    A = np.array([[1, 1, 0], [0, 0, 1]])
    assert not overlap_equivalence_check(A, A[::-1])
    assert equivalent_bruteforce(A, A[::-1])


def test_invalid_inputs():
    with pytest.raises(ValueError):
        count_nonequivalent(3, 4)
    with pytest.raises(ValueError):
        column_distribution([[0, 2]])
    with pytest.raises(ValueError):
        canonicalize([1, 2, 3])
