import math

import numpy as np
import pytest

from kgkms import fixtures as F
from kgkms.classifier import (beta_lower_bound, classify_minimal, color_closure, critical_reduction, lift,
                              phase_report)
from kgkms.errors import NotHereditary
from kgkms.kms import make_dynamics, preferred_dynamics, subinvariance_check
from kgkms.skeleton import Skeleton
from kgkms.spectral import summarize

BETA_C = math.log(6) / math.log(12)


@pytest.fixture(scope="module")
def fig1():
    return phase_report(F.skeleton("four_vertex"))


def by_prov(rep, prov):
    (r,) = [r for r in rep.regimes if r.provenance == prov]
    return r


def test_four_vertex_regimes(fig1):
    assert fig1.complete
    assert fig1.beta_c == pytest.approx(BETA_C, abs=1e-15)
    one = by_prov(fig1, "dominant_plus_lifted")
    assert one.dimension == 3
    assert one.simplex["quotient"]["dimension"] == 2
    psi = one.states[0]
    assert np.abs(psi.m - np.array([3, 1, 12, 8]) / 24).max() <= 1e-12
    flags = {f["vertex"]: f["factors_through_graph_algebra"] for f in one.flags}
    assert flags == {"u": False, "v": False, "w": True}
    assert all(f["graph"] == ["u", "v", "w"] for f in one.flags)


def test_sigma_prime_is_injective(fig1):
    # the dominant state and the three lifted extreme states are affinely independent
    one = by_prov(fig1, "dominant_plus_lifted")
    pts = np.array([st.m for st in one.states])
    assert pts.shape == (4, 4)
    aug = np.hstack([pts, np.ones((4, 1))])
    assert np.linalg.matrix_rank(aug) == 4
    s = F.skeleton("four_vertex")
    dyn = preferred_dynamics(s)
    for st in one.states:
        assert subinvariance_check(s, dyn, st.m).ok
        assert st.m.sum() == pytest.approx(1.0)


def test_second_critical_point(fig1):
    st = by_prov(fig1, "second_critical_point").states[0]
    assert st.beta == pytest.approx(BETA_C)
    assert abs(st.m[1]) <= 1e-9 and abs(st.m[2]) <= 1e-9
    assert np.allclose(st.m, [1, 0, 0, 0])
    assert st.ck_flag is False
    mid = by_prov(fig1, "lifted_quotient_simplex")
    assert mid.dimension == 2 and mid.contains(0.9) and not mid.contains(1.0)
    assert fig1.regime_at(0.5)[0].provenance == "open"


def test_critical_upstream_critical_upstream():
    s = F.skeleton("critical_upstream")
    rep = phase_report(s)
    one = by_prov(rep, "critical_component_minimal")
    assert one.dimension == 0
    assert np.allclose(one.states[0].m, [1, 0, 0, 0])
    assert by_prov(rep, "beta_lower_bound").dimension == -1
    red = critical_reduction(s, (0,), 0)
    assert red.quotient.vertices == ("u",) and not red.vacuous
    assert beta_lower_bound(s, (0,))["beta_min"] == 1.0


def test_classify_minimal_matches_direct_state():
    s = F.skeleton("critical_upstream")
    summary = summarize(s)
    mr = classify_minimal(s, (0,), 0, preferred_dynamics(s))
    direct = lift(summary.pf_vectors[0], (0,), s.n)
    assert np.allclose(mr.state.m, direct)
    assert mr.unique
    assert subinvariance_check(s, preferred_dynamics(s), mr.state.m).ok


def test_vacuous_reduction():
    # colour 2 is the identity, so the red closure of u is u itself
    s = Skeleton.from_matrices([[[1, 1], [0, 1]], [[2, 0], [0, 2]]], ["u", "v"])
    step = critical_reduction(s, (0,), 1)
    assert step.vacuous
    assert color_closure(s, (0,), 1) == {0}


def test_non_hereditary_closure_rejected():
    # H_1 = {u, w}, but u reaches v through a red edge
    a1 = [[1, 0, 1], [0, 1, 0], [0, 0, 0]]
    a2 = [[2, 1, 1], [0, 0, 0], [0, 0, 1]]
    s = Skeleton.from_matrices([a1, a2], ["u", "v", "w"])
    assert color_closure(s, (0,), 0) == {0, 2}
    with pytest.raises(NotHereditary):
        critical_reduction(s, (0,), 0)


def test_single_vertex_one_regime():
    rep = phase_report(F.skeleton("single_vertex"))
    assert len(rep.regimes) == 1
    (r,) = rep.regimes
    assert r.contains(1.0) and r.contains(7.0) and not r.contains(0.5)
    assert r.dimension == 0


def test_three_components_incomplete():
    rep = phase_report(F.skeleton("three_component"))
    assert not rep.complete
    assert rep.to_dict()["status"] == "INCOMPLETE"
    assert len(rep.sections["per_component"]) == 3


def test_dumbbell_dominant():
    rep = phase_report(F.skeleton("dumbbell"))
    one = by_prov(rep, "dominant_plus_lifted")
    assert one.dimension == 1
    s = F.skeleton("dumbbell")
    psi = one.states[0].m
    for a, rho in zip(s.float_matrices(), (3, 4)):
        assert np.abs(a @ psi - rho * psi).max() <= 1e-12
