import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles as O
from kgkms import fixtures as F
from kgkms.errors import VerificationFailed
from kgkms.skeleton import Skeleton
from kgkms.spectral import (brute_force_dependent, common_pf_vector, coordinatewise_irreducible,
                            critical_components, exact_spectral_radius, factorize, rational_independence,
                            spectral_radius, summarize)


@st.composite
def nonneg_matrix(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    vals = draw(st.lists(st.integers(0, 5), min_size=n * n, max_size=n * n))
    return np.array(vals, dtype=float).reshape(n, n)


@given(nonneg_matrix())
@settings(max_examples=80, deadline=None)
def test_radius_matches_eigensolver(m):
    assert spectral_radius(m) == pytest.approx(O.radius_eig(m), rel=1e-8, abs=1e-8)


def test_exact_radius():
    a1, a2 = F.skeleton("four_vertex").matrices
    assert exact_spectral_radius(a1) == 8 and exact_spectral_radius(a2) == 12
    assert exact_spectral_radius([[2, 1], [0, 3]]) == 3
    assert exact_spectral_radius([[0, 0], [0, 0]]) == 0
    assert exact_spectral_radius([[1, 1], [1, 0]]) is None  # golden ratio


@pytest.mark.parametrize("seed", range(15))
def test_common_pf_vector_of_polynomial_family(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 5)
    M = np.zeros((n, n), dtype=np.int64)
    for a in range(n):
        M[a, (a + 1) % n] = 1
        for b in range(n):
            M[a, b] += rng.random() < 0.3
    mats = [M + M @ M, 2 * M]
    x, rhos = common_pf_vector(mats)
    assert np.allclose(x, O.pf_vector_eig(M), atol=1e-9)
    for m, r in zip(mats, rhos):
        assert r == pytest.approx(O.radius_eig(m), rel=1e-10)
        assert np.abs(m @ x - r * x).max() <= 1e-9 * r


def test_common_pf_vector_failure():
    # both irreducible, with different Perron vectors
    mats = [np.array([[1, 1], [1, 1]]), np.array([[1, 2], [1, 1]])]
    with pytest.raises(VerificationFailed):
        common_pf_vector(mats)


def test_coordinatewise_irreducible():
    s = F.skeleton("four_vertex")
    assert not coordinatewise_irreducible(s.matrices)
    assert coordinatewise_irreducible([np.array([[0, 1], [1, 0]]), np.array([[1, 1], [1, 1]])])


@given(st.integers(1, 10**6))
@settings(max_examples=60, deadline=None)
def test_factorize_reconstructs(n):
    f = factorize(n)
    assert math.prod(p ** e for p, e in f.items()) == n
    assert all(all(p % q for q in range(2, int(p ** 0.5) + 1)) for p in f)


def test_independence_examples():
    assert rational_independence([8, 12]).independent is True
    v = rational_independence([4, 8])
    assert v.status == "dependent" and v.witness == {"k": 2, "c": 2, "d": 3}
    assert rational_independence([1, 2]).status == "dependent"
    assert rational_independence([2, 4, 8]).status == "dependent"
    assert rational_independence([2, 3, 5]).independent is True
    # three exponent rows over the two primes 2, 3
    assert rational_independence([6, 12, 18]).status == "dependent"


def test_independence_floats_are_heuristic():
    v = rational_independence([2.5, 6.25])
    assert v.status == "dependent" and not v.authoritative
    w = rational_independence([math.sqrt(2), 3.1])
    assert w.status == "independent" and not w.authoritative


def test_pairs_against_perfect_powers_small():
    for m in range(1, 120):
        for n in range(1, 120):
            assert (rational_independence([m, n]).independent is False) == O.logs_dependent(m, n), (m, n)
            if m > 1 and n > 1:
                assert brute_force_dependent(m, n) == O.logs_dependent(m, n), (m, n)


@given(st.integers(2, 10**6), st.integers(2, 10**6))
@settings(max_examples=200, deadline=None)
def test_dependence_witness(m, n):
    v = rational_independence([m, n])
    if v.status == "dependent":
        w = v.witness
        assert w["k"] ** w["c"] == m and w["k"] ** w["d"] == n
    else:
        assert not O.logs_dependent(m, n)


def test_four_vertex_summary():
    s = F.skeleton("four_vertex")
    S = summarize(s)
    assert S.rho_exact == (8, 12)
    assert S.rho_C_exact == {0: (2, 6), 1: (8, 12)}
    assert S.K == {0: set(), 1: {0, 1}}
    assert critical_components(S) == {0: [1], 1: [1]}
    assert S.independence.independent is True
