import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kgkms import fixtures as F
from kgkms import path2 as P
from kgkms.errors import BoundExceeded, ConcreteGraphError, EndpointMismatch, NotBijective, NotComposable
from kgkms.kms import kms1_dominant_state
from kgkms.skeleton import path_count

R = (math.log(8), math.log(12))


@pytest.fixture(scope="module")
def g1():
    return F.concrete("four_vertex")


@pytest.fixture(scope="module")
def g2():
    return F.concrete("uvw")


@pytest.fixture(scope="module")
def g1_shuffled():
    return P.squares_from_skeleton(F.skeleton("four_vertex"), random.Random(7))


def loops_doc(**over):
    doc = {
        "vertices": ["v"],
        "edges": [{"id": "a", "color": "blue", "range": "v", "source": "v"},
                  {"id": "b", "color": "red", "range": "v", "source": "v"}],
        "squares": [{"blue_in": "a", "red_in": "b", "red_out": "b", "blue_out": "a"}],
    }
    doc.update(over)
    return doc


def test_single_vertex_square_valid():
    g = P.parse(loops_doc())
    assert g.skeleton().matrices[0].tolist() == [[1]]
    assert g.normal_form(["b", "a"]).word == ("a", "b")


def test_missing_square():
    with pytest.raises(NotBijective):
        P.parse(loops_doc(squares=[]))


def test_endpoint_mismatch():
    doc = {
        "vertices": ["u", "v"],
        "edges": [{"id": "a", "color": "blue", "range": "u", "source": "u"},
                  {"id": "b", "color": "red", "range": "u", "source": "u"},
                  {"id": "c", "color": "blue", "range": "v", "source": "v"},
                  {"id": "d", "color": "red", "range": "v", "source": "v"}],
        "squares": [{"blue_in": "a", "red_in": "b", "red_out": "d", "blue_out": "c"},
                    {"blue_in": "c", "red_in": "d", "red_out": "b", "blue_out": "a"}],
    }
    with pytest.raises((EndpointMismatch, NotComposable)):
        P.parse(doc)


def test_three_colours_rejected():
    doc = loops_doc()
    doc["edges"].append({"id": "c", "color": 3, "range": "v", "source": "v"})
    with pytest.raises(ConcreteGraphError):
        P.parse(doc)


def test_four_vertex_fixture_matches_skeleton(g1):
    s = F.skeleton("four_vertex")
    assert [m.tolist() for m in g1.skeleton().matrices] == [m.tolist() for m in s.matrices]
    prod = path_count(s, (1, 1))
    br = {}
    rb = {}
    for (b, r), (r2, b2) in g1.theta.items():
        key = (g1.edges[b].range, g1.edges[r].source)
        br[key] = br.get(key, 0) + 1
        key = (g1.edges[r2].range, g1.edges[b2].source)
        rb[key] = rb.get(key, 0) + 1
    for v in range(4):
        for w in range(4):
            assert br.get((v, w), 0) == rb.get((v, w), 0) == prod[v, w]


def test_not_composable(g1):
    blue_u = g1.edges_at(0, P.BLUE)[0]
    bad = [e for e in g1.edges_at(3, P.RED)][0]
    with pytest.raises(NotComposable):
        g1.normal_form([blue_u, bad] if g1.edges[blue_u].source != 3 else [bad, blue_u])


def random_word(g, rng, length):
    v = rng.randrange(g.n)
    word = []
    for _ in range(length):
        e = rng.choice(g.edges_at(v, rng.randrange(2)) or g.edges_at(v, 0) or g.edges_at(v, 1))
        word.append(e)
        v = g.edges[e].source
    return word


@given(st.integers(0, 10**6), st.integers(2, 5))
@settings(max_examples=40, deadline=None)
def test_normal_form_confluent(seed, length):
    g = F.concrete("four_vertex")
    rng = random.Random(seed)
    word = random_word(g, rng, length)
    ref = g.normal_form(word)
    for k in range(10):
        assert g.normal_form(word, rng=random.Random(seed + k)) == ref
    nb = sum(g.edges[e].color == P.BLUE for e in word)
    assert ref.degree == (nb, length - nb)


def test_single_pair_uses_inverse_square(g1):
    (b, r), (r2, b2) = sorted(g1.theta.items())[5]
    assert g1.normal_form([r2, b2]).word == (b, r)
    assert g1.normal_form([b, r]).word == (b, r)


@pytest.mark.parametrize("n", [(0, 0), (1, 0), (0, 1), (1, 1), (2, 1), (1, 2), (0, 3)])
def test_enumeration_counts(g1, n):
    counts = path_count(F.skeleton("four_vertex"), n)
    for v in range(4):
        paths = g1.enumerate_paths(v, n)
        assert len(set(paths)) == len(paths) == counts[v].sum()
        for w in range(4):
            assert sum(p.source == w for p in paths) == counts[v, w]
    assert g1.enumerate_paths(0, (0, 0)) == [g1.vertex(0)]


def test_bound(g1):
    with pytest.raises(BoundExceeded):
        g1.enumerate_paths(0, (5, 5), bound=8)


@given(st.integers(0, 10**6))
@settings(max_examples=30, deadline=None)
def test_factor_concat_round_trip(seed):
    g = F.concrete("four_vertex")
    rng = random.Random(seed)
    lam = g.normal_form(random_word(g, rng, 4))
    n = (rng.randint(0, lam.degree[0]), rng.randint(0, lam.degree[1]))
    mu, nu = g.factor(lam, n)
    assert mu.degree == n and g.concat(mu, nu) == lam


def test_lambda_min_basic(g1):
    lam = g1.normal_form(random_word(g1, random.Random(3), 3))
    assert g1.lambda_min(lam, lam) == [(g1.vertex(lam.source), g1.vertex(lam.source))]
    b1, b2 = g1.edges_at(0, P.BLUE)[:2]
    assert g1.lambda_min(g1.edge_path(b1), g1.edge_path(b2)) == []
    assert g1.lambda_min(g1.edge_path(g1.edges_at(0, P.BLUE)[0]), g1.edge_path(g1.edges_at(3, P.RED)[0])) == []


def test_lambda_min_blue_red_brute_force(g1):
    # every degree-(1,1) path at u starting with blue e and with red f
    for e in g1.edges_at(0, P.BLUE)[:4]:
        for f in g1.edges_at(0, P.RED)[:6]:
            pairs = g1.lambda_min(g1.edge_path(e), g1.edge_path(f))
            expect = set()
            for sig in g1.enumerate_paths(0, (1, 1)):
                rf, _ = g1.red_first(sig)
                if sig.blue[0] == e and rf[0] == f:
                    expect.add(sig)
            got = {g1.concat(g1.edge_path(e), eta) for eta, _ in pairs}
            assert got == expect
            for eta, zeta in pairs:
                assert g1.concat(g1.edge_path(e), eta) == g1.concat(g1.edge_path(f), zeta)


def test_exhaustive_colour_sets_without_sources(g1):
    for v in range(4):
        for col in (P.BLUE, P.RED):
            assert P.is_exhaustive(g1, v, g1.edges_at(v, col))
        assert not P.is_exhaustive(g1, v, [])


def test_absolute_source_vacuous(g2):
    assert P.is_exhaustive(g2, 2, [])
    assert P.exhaustive_check(g2, 2, [])["vacuous"]
    assert not P.exhaustive_check(g2, 0, [])["exhaustive"]


def test_exhaustive_matches_enumeration(g2):
    rng = random.Random(11)
    for v in (0, 1):
        at = g2.edges_at(v, P.BLUE) + g2.edges_at(v, P.RED)
        cases = [at, g2.edges_at(v, P.BLUE), g2.edges_at(v, P.RED)]
        cases += [rng.sample(at, rng.randint(1, len(at))) for _ in range(12)]
        for E in cases:
            exact = P.is_exhaustive(g2, v, E)
            brute = P.is_exhaustive_bruteforce(g2, v, E, bound=3)
            assert exact == brute, (v, sorted(E))


def test_exhaustive_matches_enumeration_four_vertex(g1):
    rng = random.Random(5)
    for v in (1, 2):
        at = g1.edges_at(v, P.BLUE) + g1.edges_at(v, P.RED)
        for _ in range(6):
            E = rng.sample(at, rng.randint(1, len(at)))
            assert P.is_exhaustive(g1, v, E) == P.is_exhaustive_bruteforce(g1, v, E, bound=2)


def test_gap_value_routes_agree(g2):
    for v in (0, 1):
        for E in (g2.edges_at(v, P.BLUE), g2.edges_at(v, P.RED), g2.edges_at(v, P.BLUE) + g2.edges_at(v, P.RED)):
            if not E:
                continue
            for eps in np.eye(3):
                val = P.gap_projection_value(g2, eps, 1.0, R, v, E)
                assert val.difference <= 1e-9


def test_gap_value_telescopes(g2):
    eps = np.array([0.2, 0.3, 0.5])
    from kgkms.kms import resolvent_product
    m = resolvent_product(g2.skeleton().float_matrices(), np.exp(-np.array(R)), eps)
    E = g2.edges_at(0, P.BLUE)
    val = P.gap_projection_value(g2, eps, 1.0, R, 0, E)
    expect = m[0] - sum(math.exp(-R[0]) * m[g2.edges[e].source] for e in E)
    assert val.inclusion_exclusion == pytest.approx(expect, abs=1e-12)


def test_gap_value_lower_bound(g2):
    E = g2.edges_at(0, P.BLUE) + g2.edges_at(0, P.RED)
    val = P.gap_projection_value(g2, np.array([1.0, 0, 0]), 1.0, R, 0, E)
    assert val.direct >= 1.0 - 1e-12 and val.inclusion_exclusion >= 1.0 - 1e-9


def psi_m():
    return kms1_dominant_state(F.skeleton("four_vertex"), [3]).m


def test_spot_check_trivial_pairs(g1):
    phi = P.DiagonalState(psi_m(), 1.0, R)
    q = g1.vertex(0)
    assert P.product_value(g1, phi, (q, q), (q, q)) == pytest.approx(psi_m()[0])
    e = g1.edge_path(g1.edges_at(0, P.BLUE)[0])
    s_e = g1.vertex(e.source)
    lhs = P.product_value(g1, phi, (e, s_e), (s_e, e))
    assert lhs == pytest.approx(math.exp(-R[0]) * psi_m()[e.source])


def test_spot_check_and_negative_control(g1):
    rep = P.kms_spot_check(g1, psi_m(), 1.0, R, samples=100)
    assert rep.max_violation <= 1e-8
    bad = psi_m().copy()
    bad[0] -= 0.05
    bad[3] += 0.05
    rep = P.kms_spot_check(g1, bad, 1.0, R, samples=20)
    assert rep.max_violation > 1e-2
    # worst gap: colour 1 at w, m_w - (12/8) m_x drops by (12/8) * 0.05
    assert rep.positivity_violation == pytest.approx(0.075, abs=1e-12)
    assert rep.kms_violation <= 1e-8


def test_values_do_not_depend_on_theta(g1, g1_shuffled):
    assert g1.theta != g1_shuffled.theta
    for g in (g1, g1_shuffled):
        rep = P.kms_spot_check(g, psi_m(), 1.0, R, samples=40, seed=2)
        assert rep.max_violation <= 1e-8
    eps = np.array([0.1, 0.2, 0.3, 0.4])
    for v in range(4):
        E = g1.edges_at(v, P.BLUE)
        a = P.gap_projection_value(g1, eps, 1.5, R, v, E)
        b = P.gap_projection_value(g1_shuffled, eps, 1.5, R, v, E)
        assert a.direct == pytest.approx(b.direct, rel=1e-12)
        E = g1.edges_at(v, P.BLUE) + g1.edges_at(v, P.RED)
        a = P.gap_projection_value(g1, eps, 1.5, R, v, E)
        b = P.gap_projection_value(g1_shuffled, eps, 1.5, R, v, E)
        assert a.inclusion_exclusion == pytest.approx(b.inclusion_exclusion, rel=1e-12)


def test_partial_mixed_sets_depend_on_theta(g1, g1_shuffled):
    # |Lambda^min(e, f)| for one blue e and one red f is fixed by theta
    eps = np.array([0.1, 0.2, 0.3, 0.4])
    seen = set()
    for v in range(4):
        for k in range(3):
            E = g1.edges_at(v, P.BLUE)[:1] + g1.edges_at(v, P.RED)[k:k + 2]
            for g in (g1, g1_shuffled):
                val = P.gap_projection_value(g, eps, 1.5, R, v, E)
                assert val.difference <= 1e-9
                seen.add((v, k, g is g1, round(val.direct, 12)))
    per_theta = {}
    for v, k, which, val in seen:
        per_theta.setdefault((v, k), set()).add(val)
    assert any(len(vals) > 1 for vals in per_theta.values())
