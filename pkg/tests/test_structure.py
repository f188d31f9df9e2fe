import random
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles as O
from kgkms import fixtures as F
from kgkms.errors import AssumptionFailed, HypothesisViolation
from kgkms.skeleton import Skeleton
from kgkms.structure import (decompose, hereditary_closure, is_block_upper_triangular, is_forwards_hereditary,
                             is_hereditary, is_irreducible, order_vertices, reachability, remove_hereditary,
                             subgraph, tarjan_scc, validate_two_component)


@st.composite
def adjacency(draw, max_n=8):
    n = draw(st.integers(1, max_n))
    bits = draw(st.lists(st.booleans(), min_size=n * n, max_size=n * n))
    return np.array(bits, dtype=bool).reshape(n, n)


@given(adjacency())
@settings(max_examples=80, deadline=None)
def test_reachability_matches_floyd_warshall(adj):
    assert (reachability(adj) == O.reach_fw(adj)).all()


@given(adjacency())
@settings(max_examples=80, deadline=None)
def test_tarjan_matches_mutual_reachability(adj):
    assert {frozenset(c) for c in tarjan_scc(adj)} == O.scc_partition(adj)


def test_irreducible_edge_cases():
    assert not is_irreducible(np.zeros((1, 1)))
    assert is_irreducible(np.ones((1, 1)))
    assert not is_irreducible(np.array([[1, 1], [0, 1]]))
    assert is_irreducible(np.array([[0, 1], [1, 0]]))


def test_four_vertex_components_and_heredity():
    s = F.skeleton("four_vertex")
    d = decompose(s)
    nt = [s.names(c.vertices) for c in d.nontrivial]
    assert nt == [["u"], ["x"]]
    assert d.component_of(1).trivial and d.component_of(2).trivial
    assert is_hereditary(d, [3]) and not is_hereditary(d, [0])
    assert is_forwards_hereditary(d, [0]) and not is_forwards_hereditary(d, [3])
    assert hereditary_closure(d, [1]) == {1, 2, 3}


def test_four_vertex_order_and_depths():
    # hand computation: v is fed by u directly, w only through v
    s = F.skeleton("four_vertex")
    o = order_vertices(s)
    assert s.names(o.order) == ["u", "v", "w", "x"]
    assert o.levels[0].depth == {1: 1, 2: 2}
    assert [b.kind for b in o.blocks] == ["component", "connector", "component"]
    assert all(is_block_upper_triangular(m, o) for m in s.matrices)


def test_block_check_rejects_bad_order():
    s = F.skeleton("four_vertex")
    o = order_vertices(s)
    from dataclasses import replace
    swapped = replace(o, order=(3, 1, 2, 0))
    assert not is_block_upper_triangular(s.matrices[0], swapped)


def test_strict_ordering_rejects_sources():
    s = F.skeleton("uvw")
    with pytest.raises(HypothesisViolation):
        order_vertices(s)
    o = order_vertices(s, strict=False)
    assert not o.within_hypotheses and o.notes


@pytest.mark.parametrize("seed", range(40))
def test_random_families_are_block_triangular(seed):
    mats, comps = O.random_commuting_family(random.Random(seed))
    s = Skeleton.from_matrices(mats)
    o = order_vertices(s)
    assert sorted(o.order) == list(range(s.n))
    assert all(is_block_upper_triangular(m, o) for m in s.matrices)
    assert {frozenset(c.vertices) for c in decompose(s).nontrivial} == {frozenset(c) for c in comps}


def test_subgraph_warns_off_heredity():
    s = F.skeleton("four_vertex")
    with pytest.warns(UserWarning):
        subgraph(s, [0, 3])
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        q = remove_hereditary(s, [3])
    assert q.vertices == ("u", "v", "w")
    with pytest.raises(HypothesisViolation):
        remove_hereditary(s, [0])


def test_two_component_report():
    s = F.skeleton("four_vertex")
    rep = validate_two_component(s)
    assert s.names(rep.C) == ["u"] and s.names(rep.D) == ["x"]
    assert rep.C_forwards_hereditary and rep.D_hereditary
    with pytest.raises(AssumptionFailed) as info:
        validate_two_component(F.skeleton("three_component"))
    assert info.value.tag == "two_components"
