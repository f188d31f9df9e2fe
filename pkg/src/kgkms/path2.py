"""Concrete 2-graphs: coloured edges plus the factorization bijection

    theta(e, f) = (f', e')    e, e' blue;  f, f' red;  e f = f' e'.

Paths are stored in blue-first normal form.  Everything here is exact
combinatorics except the two state evaluations, which are compared
against each other.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from pathlib import Path as _FsPath
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BoundExceeded,
    ConcreteGraphError,
    EndpointMismatch,
    NotBijective,
    NotComposable,
    TailBoundFailure,
)
from .kms import Dynamics, certified_series, resolvent_product
from .skeleton import Skeleton, commutator_violations

BLUE, RED = 0, 1
_COLOR_NAMES = {"blue": BLUE, "red": RED, 1: BLUE, 2: RED, "1": BLUE, "2": RED}


@dataclass(frozen=True)
class Edge:
    id: str
    color: int
    range: int
    source: int


@dataclass(frozen=True)
class Path:
    """Blue-first normal form; a vertex is the path with no edges."""

    blue: tuple[str, ...]
    red: tuple[str, ...]
    range: int
    source: int

    @property
    def degree(self) -> tuple[int, int]:
        return (len(self.blue), len(self.red))

    @property
    def word(self) -> tuple[str, ...]:
        return self.blue + self.red

    def is_vertex(self) -> bool:
        return not self.blue and not self.red


class ConcreteTwoGraph:
    """Edges of two colours with a validated square bijection."""

    def __init__(self, vertices: Sequence[str], edges: Iterable[Edge], theta: dict):
        self.vertices = tuple(vertices)
        self.edges = {e.id: e for e in edges}
        self.theta = dict(theta)
        self.theta_inv = {v: k for k, v in self.theta.items()}
        n = len(self.vertices)
        self._into = [[[] for _ in range(n)] for _ in range(2)]
        self._out = [[[] for _ in range(n)] for _ in range(2)]
        for e in sorted(self.edges.values(), key=lambda e: e.id):
            self._into[e.color][e.range].append(e.id)
            self._out[e.color][e.source].append(e.id)
        self._path_cache: dict = {}

    # -- basic access --------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.vertices)

    def edges_at(self, v: int, color: int) -> list[str]:
        """Edges of ``color`` with range ``v``."""
        return self._into[color][v]

    def edges_from(self, v: int, color: int) -> list[str]:
        """Edges of ``color`` with source ``v``."""
        return self._out[color][v]

    def skeleton(self) -> Skeleton:
        mats = [np.zeros((self.n, self.n), dtype=np.int64) for _ in range(2)]
        for e in self.edges.values():
            mats[e.color][e.range, e.source] += 1
        return Skeleton.from_matrices(mats, self.vertices).with_certificate()

    def vertex(self, v: int) -> Path:
        return Path((), (), v, v)

    def edge_path(self, eid: str) -> Path:
        e = self.edges[eid]
        if e.color == BLUE:
            return Path((eid,), (), e.range, e.source)
        return Path((), (eid,), e.range, e.source)

    def to_dict(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [
                {"id": e.id, "color": "blue" if e.color == BLUE else "red",
                 "range": self.vertices[e.range], "source": self.vertices[e.source]}
                for e in sorted(self.edges.values(), key=lambda e: e.id)
            ],
            "squares": [
                {"blue_in": b, "red_in": r, "red_out": r2, "blue_out": b2}
                for (b, r), (r2, b2) in sorted(self.theta.items())
            ],
        }

    # -- rewriting -----------------------------------------------------

    def check_composable(self, word: Sequence[str]) -> None:
        for a, b in zip(word, word[1:]):
            if a not in self.edges or b not in self.edges:
                raise NotComposable(f"unknown edge in {list(word)}")
            if self.edges[a].source != self.edges[b].range:
                raise NotComposable(f"s({a}) != r({b})")
        for a in word:
            if a not in self.edges:
                raise NotComposable(f"unknown edge {a!r}")

    def _sort(self, word: list[str], blue_first: bool, rng: random.Random | None = None) -> list[str]:
        """Bubble colours into place with theta^{-1} (blue first) or theta (red first)."""
        word = list(word)
        lead, trail = (BLUE, RED) if blue_first else (RED, BLUE)
        table = self.theta_inv if blue_first else self.theta
        color = lambda x: self.edges[x].color
        while True:
            spots = [i for i in range(len(word) - 1) if color(word[i]) == trail and color(word[i + 1]) == lead]
            if not spots:
                return word
            i = rng.choice(spots) if rng is not None else spots[0]
            a, b = table[(word[i], word[i + 1])]
            word[i], word[i + 1] = a, b

    def normal_form(self, word: Sequence[str], v: int | None = None, rng: random.Random | None = None) -> Path:
        """Blue-first normal form of a composable edge word (``v`` for the empty word)."""
        word = list(word)
        if not word:
            if v is None:
                raise NotComposable("empty word needs a vertex")
            return self.vertex(v)
        self.check_composable(word)
        out = self._sort(word, True, rng)
        nb = sum(1 for x in out if self.edges[x].color == BLUE)
        return Path(tuple(out[:nb]), tuple(out[nb:]), self.edges[out[0]].range, self.edges[out[-1]].source)

    def red_first(self, p: Path) -> tuple[tuple[str, ...], tuple[str, ...]]:
        out = self._sort(list(p.word), False)
        nr = len(p.red)
        return tuple(out[:nr]), tuple(out[nr:])

    def concat(self, p: Path, q: Path) -> Path:
        if p.source != q.range:
            raise NotComposable("source of the first path differs from range of the second")
        if p.is_vertex():
            return q
        if q.is_vertex():
            return p
        word = list(p.blue) + self._sort(list(p.red) + list(q.blue), True) + list(q.red)
        nb = len(p.blue) + len(q.blue)
        return Path(tuple(word[:nb]), tuple(word[nb:]), p.range, q.source)

    def factor(self, lam: Path, n: tuple[int, int]) -> tuple[Path, Path]:
        """``lam = mu nu`` with ``d(mu) = n``."""
        a, c = n
        p, q = lam.degree
        if a > p or c > q or a < 0 or c < 0:
            raise ValueError(f"cannot factor degree {lam.degree} at {n}")
        mid = self._sort(list(lam.blue[a:]) + list(lam.red[:c]), False)
        mu_red, nu_blue = mid[:c], mid[c:]
        mu_blue = lam.blue[:a]
        mu_w = tuple(mu_blue) + tuple(mu_red)
        nu_w = tuple(nu_blue) + lam.red[c:]
        mid_v = (self.edges[mu_w[-1]].source if mu_w else lam.range)
        mu = Path(tuple(mu_blue), tuple(mu_red), lam.range, mid_v)
        nu = Path(tuple(nu_blue), lam.red[c:], mid_v, lam.source)
        return mu, nu

    def initial_edge(self, lam: Path, color: int) -> str | None:
        """``lam(0, e_color)``, or ``None`` when that coordinate of the degree is 0."""
        if color == BLUE:
            return lam.blue[0] if lam.blue else None
        if not lam.red:
            return None
        if not lam.blue:
            return lam.red[0]
        return self.red_first(lam)[0][0]

    # -- enumeration ---------------------------------------------------

    def _words_from_range(self, v: int, color: int, length: int) -> list[tuple[tuple[str, ...], int]]:
        out = [((), v)]
        for _ in range(length):
            nxt = []
            for w, end in out:
                for e in self.edges_at(end, color):
                    nxt.append((w + (e,), self.edges[e].source))
            out = nxt
        return out

    def enumerate_paths(self, v: int, n: Sequence[int], bound: int = 8) -> list[Path]:
        """All paths with range ``v`` and degree ``n``."""
        n = (int(n[0]), int(n[1]))
        if n[0] + n[1] > bound:
            raise BoundExceeded(f"|n| = {n[0] + n[1]} exceeds bound {bound}")
        key = (v, n)
        if key in self._path_cache:
            return self._path_cache[key]
        out = []
        for bw, mid in self._words_from_range(v, BLUE, n[0]):
            for rw, end in self._words_from_range(mid, RED, n[1]):
                out.append(Path(bw, rw, v, end))
        self._path_cache[key] = out
        return out

    def extensions(self, lam: Path, n: Sequence[int], bound: int = 8) -> list[tuple[Path, Path]]:
        """``(eta, lam eta)`` for every ``eta`` in ``s(lam) Lambda^n``."""
        return [(eta, self.concat(lam, eta)) for eta in self.enumerate_paths(lam.source, n, bound)]

    def lambda_min(self, mu: Path, nu: Path, bound: int = 8) -> list[tuple[Path, Path]]:
        """Pairs ``(eta, zeta)`` with ``mu eta = nu zeta`` of degree ``d(mu) v d(nu)``."""
        if mu.range != nu.range:
            return []
        m = (max(mu.degree[0], nu.degree[0]), max(mu.degree[1], nu.degree[1]))
        ext = (m[0] - mu.degree[0], m[1] - mu.degree[1])
        out = []
        for eta, lam in self.extensions(mu, ext, bound):
            head, zeta = self.factor(lam, nu.degree)
            if head == nu:
                out.append((eta, zeta))
        return out

    # -- random paths --------------------------------------------------

    def random_path_to(self, x: int, n: Sequence[int], rng: random.Random, tries: int = 50) -> Path | None:
        """A random path with source ``x`` and degree ``n`` (built backwards)."""
        for _ in range(tries):
            red, cur, ok = [], x, True
            for _ in range(n[1]):
                opts = self.edges_from(cur, RED)
                if not opts:
                    ok = False
                    break
                e = rng.choice(opts)
                red.append(e)
                cur = self.edges[e].range
            if not ok:
                continue
            blue = []
            for _ in range(n[0]):
                opts = self.edges_from(cur, BLUE)
                if not opts:
                    ok = False
                    break
                e = rng.choice(opts)
                blue.append(e)
                cur = self.edges[e].range
            if ok:
                return Path(tuple(reversed(blue)), tuple(reversed(red)), cur, x)
        return None

    def random_path_from(self, v: int, n: Sequence[int], rng: random.Random, tries: int = 50) -> Path | None:
        """A random path with range ``v`` and degree ``n``."""
        for _ in range(tries):
            blue, cur, ok = [], v, True
            for _ in range(n[0]):
                opts = self.edges_at(cur, BLUE)
                if not opts:
                    ok = False
                    break
                e = rng.choice(opts)
                blue.append(e)
                cur = self.edges[e].source
            red = []
            for _ in range(n[1] if ok else 0):
                opts = self.edges_at(cur, RED)
                if not opts:
                    ok = False
                    break
                e = rng.choice(opts)
                red.append(e)
                cur = self.edges[e].source
            if ok:
                return Path(tuple(blue), tuple(red), v, cur)
        return None


# -- construction and validation ------------------------------------------

def _vertex_index(vertices: Sequence[str], v) -> int:
    if isinstance(v, int) and not isinstance(v, bool):
        return v
    try:
        return list(vertices).index(str(v))
    except ValueError:
        raise ConcreteGraphError(f"unknown vertex {v!r}") from None


def parse(raw: dict, vertices: Sequence[str] | None = None) -> ConcreteTwoGraph:
    """Build and validate a concrete 2-graph from its JSON document."""
    if "k" in raw and raw["k"] != 2:
        raise ConcreteGraphError("concrete graphs are supported for k = 2 only")
    verts = list(raw.get("vertices") or vertices or [])
    edges = []
    for e in raw["edges"]:
        col = _COLOR_NAMES.get(e["color"])
        if col is None:
            raise ConcreteGraphError(f"edge {e['id']!r} has colour {e['color']!r}; only two colours are supported")
        for end in ("range", "source"):
            if not isinstance(e[end], int) and str(e[end]) not in verts:
                verts.append(str(e[end]))
        edges.append(Edge(str(e["id"]), col, _vertex_index(verts, e["range"]), _vertex_index(verts, e["source"])))
    ids = [e.id for e in edges]
    if len(set(ids)) != len(ids):
        raise ConcreteGraphError("edge ids must be unique")
    theta = {}
    for sq in raw["squares"]:
        key = (str(sq["blue_in"]), str(sq["red_in"]))
        if key in theta:
            raise NotBijective(f"square {key} listed twice")
        theta[key] = (str(sq["red_out"]), str(sq["blue_out"]))
    g = ConcreteTwoGraph(verts, edges, theta)
    validate_squares(g)
    return g


def load(path) -> ConcreteTwoGraph:
    with open(_FsPath(path), encoding="utf-8") as fh:
        return parse(json.load(fh))


def _composable_pairs(g: ConcreteTwoGraph, first: int, second: int) -> set[tuple[str, str]]:
    out = set()
    for a in g.edges.values():
        if a.color != first:
            continue
        for b in g.edges_at(a.source, second):
            out.add((a.id, b))
    return out


def validate_squares(g: ConcreteTwoGraph) -> ConcreteTwoGraph:
    """theta must be a total, endpoint-preserving bijection from blue-red to red-blue pairs."""
    dom = _composable_pairs(g, BLUE, RED)
    cod = _composable_pairs(g, RED, BLUE)
    for (b, r), (r2, b2) in g.theta.items():
        for x, col in ((b, BLUE), (r, RED), (r2, RED), (b2, BLUE)):
            if x not in g.edges:
                raise ConcreteGraphError(f"square mentions unknown edge {x!r}")
            if g.edges[x].color != col:
                raise ConcreteGraphError(f"edge {x!r} has the wrong colour for its square slot")
        if (b, r) not in dom:
            raise NotComposable(f"square input ({b}, {r}) is not composable")
        if (r2, b2) not in cod:
            raise NotComposable(f"square output ({r2}, {b2}) is not composable")
        if g.edges[b].range != g.edges[r2].range or g.edges[r].source != g.edges[b2].source:
            raise EndpointMismatch(f"square ({b}, {r}) -> ({r2}, {b2}) changes range or source")
    missing = dom - set(g.theta)
    if missing:
        raise NotBijective(f"theta undefined on {len(missing)} composable pairs, e.g. {sorted(missing)[0]}")
    images = list(g.theta.values())
    if len(set(images)) != len(images):
        raise NotBijective("theta is not injective")
    if set(images) != cod:
        raise NotBijective(f"theta misses {len(cod - set(images))} red-blue pairs")
    mats = [np.zeros((g.n, g.n), dtype=np.int64) for _ in range(2)]
    for e in g.edges.values():
        mats[e.color][e.range, e.source] += 1
    if commutator_violations(mats):
        raise NotBijective("derived vertex matrices do not commute")
    return g


def squares_from_skeleton(s: Skeleton, rng: random.Random | None = None,
                          names: Sequence[str] = ("b", "r")) -> ConcreteTwoGraph:
    """A concrete 2-graph realizing a commuting pair, with edge ids like ``b.u.v.0``.

    For each (range, source) the blue-red and red-blue pairs are matched in
    sorted order, or in random order when ``rng`` is given.  Any such
    matching is a valid 2-graph.
    """
    if s.k != 2:
        raise ConcreteGraphError("concrete graphs are supported for k = 2 only")
    edges = []
    for col, m in enumerate(s.matrices):
        for v in range(s.n):
            for w in range(s.n):
                for c in range(int(m[v, w])):
                    edges.append(Edge(f"{names[col]}.{s.vertices[v]}.{s.vertices[w]}.{c}", col, v, w))
    g = ConcreteTwoGraph(s.vertices, edges, {})
    theta = {}
    for v in range(s.n):
        for w in range(s.n):
            dom = [(e, f) for e in g.edges_at(v, BLUE) for f in g.edges_at(g.edges[e].source, RED)
                   if g.edges[f].source == w]
            cod = [(f, e) for f in g.edges_at(v, RED) for e in g.edges_at(g.edges[f].source, BLUE)
                   if g.edges[e].source == w]
            if len(dom) != len(cod):
                raise NotBijective("vertex matrices do not commute")
            if rng is not None:
                rng.shuffle(cod)
            theta.update(zip(dom, cod))
    out = ConcreteTwoGraph(s.vertices, edges, theta)
    validate_squares(out)
    return out


# -- exhaustive sets --------------------------------------------------------

def _first_edge_families(g: ConcreteTwoGraph, color: int, cap: int = 100000) -> list[set[frozenset]]:
    """For each vertex ``u``, the sets ``F(mu) = {(mu f)(0, e_other) : f}`` over
    monochromatic paths ``mu`` of colour ``color`` with range ``u`` (least fixed point)."""
    other = 1 - color
    table = g.theta if color == BLUE else g.theta_inv

    def transport(e: str, R: frozenset) -> frozenset:
        # (e f')(0, e_other) for f' in R
        return frozenset(table[(e, f)][0] for f in R)

    fam = [{frozenset(g.edges_at(u, other))} for u in range(g.n)]
    changed = True
    while changed:
        changed = False
        for e in g.edges.values():
            if e.color != color:
                continue
            for R in list(fam[e.source]):
                T = transport(e.id, R)
                if T not in fam[e.range]:
                    fam[e.range].add(T)
                    changed = True
                    if sum(len(f) for f in fam) > cap:
                        raise BoundExceeded("exhaustiveness fixed point grew too large")
    return fam


def is_exhaustive(g: ConcreteTwoGraph, v: int, E: Iterable[str]) -> bool:
    """Exact test that every nontrivial path at ``v`` meets ``E`` in the ``Lambda^min`` sense.

    Paths with both colours are decided by their degree-(1,1) prefix.  A
    monochromatic path ``b mu`` meets ``E`` iff ``b`` is in ``E`` or some
    extension by one edge of the other colour starts in ``E``; the sets of
    such starting edges range over a finite family computed as a fixed point.
    """
    E = set(E)
    for e in E:
        if e not in g.edges or g.edges[e].range != v:
            raise ConcreteGraphError(f"{e!r} is not an edge at {g.vertices[v]}")
    blue_at, red_at = g.edges_at(v, BLUE), g.edges_at(v, RED)
    if not blue_at and not red_at:
        return True  # absolute source: vacuous, only E = {} is possible
    for sigma in g.enumerate_paths(v, (1, 1)):
        if sigma.blue[0] not in E and g.initial_edge(sigma, RED) not in E:
            return False
    for color, at in ((BLUE, blue_at), (RED, red_at)):
        fam = _first_edge_families(g, color)
        table = g.theta if color == BLUE else g.theta_inv
        for b in at:
            if b in E:
                continue
            for R in fam[g.edges[b].source]:
                hits = {table[(b, f)][0] for f in R}
                if not hits & E:
                    return False
    return True


def is_exhaustive_bruteforce(g: ConcreteTwoGraph, v: int, E: Iterable[str], bound: int = 4) -> bool:
    """Definition checked on every path at ``v`` with ``0 < |d| <= bound``."""
    E = [g.edge_path(e) for e in E]
    for p in range(bound + 1):
        for q in range(bound + 1 - p):
            if p == q == 0:
                continue
            for lam in g.enumerate_paths(v, (p, q), bound=bound + 2):
                if not any(g.lambda_min(lam, e, bound=bound + 2) for e in E):
                    return False
    return True


def exhaustive_check(g: ConcreteTwoGraph, v: int, E: Iterable[str]) -> dict:
    E = list(E)
    vacuous = not g.edges_at(v, BLUE) and not g.edges_at(v, RED)
    return {"vertex": g.vertices[v], "exhaustive": is_exhaustive(g, v, E), "vacuous": vacuous}


# -- state evaluation ------------------------------------------------------

@dataclass
class GapValue:
    inclusion_exclusion: float
    direct: float
    tail: float

    @property
    def difference(self) -> float:
        return abs(self.inclusion_exclusion - self.direct)

    def to_dict(self) -> dict:
        return {"inclusion_exclusion": self.inclusion_exclusion, "direct": self.direct,
                "difference": self.difference, "tail_bound": self.tail}


def gap_projection_value(g: ConcreteTwoGraph, eps, beta: float, r: Sequence[float], v: int,
                         E: Iterable[str], tail_target: float = 1e-12) -> GapValue:
    """``phi_eps(prod_{e in E} (q_v - t_e t_e^*))`` evaluated two ways.

    (a) expand the product; only subsets with at most one edge of each
        colour survive, and a blue-red pair contributes its minimal common
        extensions; vertex values come from the closed-form resolvent.
    (b) sum ``Delta_lam = e^{-beta r.d(lam)} eps_{s(lam)}`` over the paths at
        ``v`` that start with no edge of ``E``, grouped by their initial
        segment; the tails are certified power series.
    """
    E = list(E)
    Eset = set(E)
    for e in E:
        if g.edges[e].range != v:
            raise ConcreteGraphError(f"{e!r} is not an edge at {g.vertices[v]}")
    eps = np.asarray(eps, dtype=float)
    s = g.skeleton()
    A = s.float_matrices()
    w = np.exp(-beta * np.asarray(r, dtype=float))
    from .kms import check_supercritical
    check_supercritical(s, Dynamics(tuple(float(x) for x in r)), beta)
    m = resolvent_product(A, w, eps)
    E1 = [e for e in E if g.edges[e].color == BLUE]
    E2 = [e for e in E if g.edges[e].color == RED]
    val_a = m[v]
    val_a -= sum(w[0] * m[g.edges[e].source] for e in E1)
    val_a -= sum(w[1] * m[g.edges[f].source] for f in E2)
    for e in E1:
        for f in E2:
            for eta, _ in g.lambda_min(g.edge_path(e), g.edge_path(f)):
                val_a += w[0] * w[1] * m[eta.source]
    blue_sum = certified_series([A[0]], [w[0]], eps, tail_target)
    red_sum = certified_series([A[1]], [w[1]], eps, tail_target)
    full = certified_series(A, w, eps, tail_target)
    val_b = eps[v]
    tail = 0.0
    for b in g.edges_at(v, BLUE):
        if b not in Eset:
            val_b += w[0] * blue_sum.value[g.edges[b].source]
            tail += w[0] * blue_sum.tail
    for f in g.edges_at(v, RED):
        if f not in Eset:
            val_b += w[1] * red_sum.value[g.edges[f].source]
            tail += w[1] * red_sum.tail
    for sigma in g.enumerate_paths(v, (1, 1)):
        if sigma.blue[0] in Eset or g.initial_edge(sigma, RED) in Eset:
            continue
        val_b += w[0] * w[1] * full.value[sigma.source]
        tail += w[0] * w[1] * full.tail
    if tail > 1e3 * tail_target * max(1, len(g.edges)):
        raise TailBoundFailure(f"certified tail {tail:.3e} is too large")
    return GapValue(float(val_a), float(val_b), float(tail))


@dataclass
class DiagonalState:
    """``phi(t_mu t_nu^*) = [mu = nu] e^{-beta r.d(mu)} m_{s(mu)}``."""

    m: np.ndarray
    beta: float
    r: tuple[float, ...]

    def value(self, mu: Path, nu: Path) -> float:
        if mu != nu:
            return 0.0
        return float(math.exp(-self.beta * (self.r[0] * mu.degree[0] + self.r[1] * mu.degree[1])) * self.m[mu.source])


def product_value(g: ConcreteTwoGraph, phi: DiagonalState, a: tuple[Path, Path], b: tuple[Path, Path]) -> float:
    """``phi((t_mu t_nu^*)(t_sig t_tau^*))`` via ``t_nu^* t_sig = sum t_eta t_zeta^*``."""
    mu, nu = a
    sig, tau = b
    total = 0.0
    for eta, zeta in g.lambda_min(nu, sig):
        total += phi.value(g.concat(mu, eta), g.concat(tau, zeta))
    return total


@dataclass
class SpotCheckReport:
    samples: int
    kms_violation: float
    positivity_violation: float
    normalization_violation: float
    worst_pair: tuple | None = None

    @property
    def max_violation(self) -> float:
        return max(self.kms_violation, self.positivity_violation, self.normalization_violation)

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "kms_identity_violation": self.kms_violation,
            "positivity_violation": self.positivity_violation,
            "normalization_violation": self.normalization_violation,
            "max_violation": self.max_violation,
        }


def _random_spanning_pair(g: ConcreteTwoGraph, rng: random.Random, max_deg: int):
    degs = [(p, q) for p in range(max_deg + 1) for q in range(max_deg + 1 - p)]
    for _ in range(200):
        x = rng.randrange(g.n)
        mu = g.random_path_to(x, rng.choice(degs), rng)
        nu = g.random_path_to(x, rng.choice(degs), rng)
        if mu is None or nu is None:
            continue
        mode = rng.randrange(3)
        if mode == 0:
            sig, tau = nu, mu
        elif mode == 1:
            sig = g.random_path_from(nu.range, rng.choice(degs), rng)
            if sig is None:
                continue
            tau = g.random_path_to(sig.source, rng.choice(degs), rng)
        else:
            y = rng.randrange(g.n)
            sig = g.random_path_to(y, rng.choice(degs), rng)
            tau = g.random_path_to(y, rng.choice(degs), rng)
        if sig is None or tau is None:
            continue
        return (mu, nu), (sig, tau)
    raise ConcreteGraphError("could not sample spanning elements")


def kms_spot_check(g: ConcreteTwoGraph, m, beta: float, r: Sequence[float], samples: int = 200,
                   seed: int = 0, max_deg: int = 2) -> SpotCheckReport:
    """Sample the KMS condition and the state axioms for a diagonal functional.

    The identity ``phi(ab) = e^{-beta r.(d(mu)-d(nu))} phi(ba)`` is checked on
    random spanning pairs.  It holds for every diagonal functional of this
    form, so the report also measures positivity on the gap projections
    ``q_v - sum_{e in v Lambda^{e_i}} t_e t_e^*`` and their products, and the
    normalization ``sum_v m_v = 1``.
    """
    phi = DiagonalState(np.asarray(m, dtype=float), beta, tuple(r))
    rng = random.Random(seed)
    worst, worst_pair = 0.0, None
    for _ in range(samples):
        a, b = _random_spanning_pair(g, rng, max_deg)
        lhs = product_value(g, phi, a, b)
        d_mu, d_nu = a[0].degree, a[1].degree
        scale = math.exp(-beta * (r[0] * (d_mu[0] - d_nu[0]) + r[1] * (d_mu[1] - d_nu[1])))
        rhs = scale * product_value(g, phi, b, a)
        viol = abs(lhs - rhs)
        if viol > worst:
            worst, worst_pair = viol, (a, b)
    pos = 0.0
    w = [math.exp(-beta * ri) for ri in r]
    for v in range(g.n):
        gaps = []
        for col in (BLUE, RED):
            at = g.edges_at(v, col)
            if at:
                gaps.append(phi.m[v] - w[col] * sum(phi.m[g.edges[e].source] for e in at))
        for val in gaps:
            pos = max(pos, -val)
        if len(gaps) == 2:
            prod = (phi.m[v]
                    - w[0] * sum(phi.m[g.edges[e].source] for e in g.edges_at(v, BLUE))
                    - w[1] * sum(phi.m[g.edges[f].source] for f in g.edges_at(v, RED))
                    + w[0] * w[1] * sum(phi.m[sig.source] for sig in g.enumerate_paths(v, (1, 1))))
            pos = max(pos, -prod)
    norm = abs(float(phi.m.sum()) - 1.0)
    return SpotCheckReport(samples, float(worst), float(pos), float(norm), worst_pair)
