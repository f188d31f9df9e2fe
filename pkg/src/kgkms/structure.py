"""Component structure of a skeleton: SCCs, reachability, hereditary sets,
and the vertex order that block-triangularizes every vertex matrix at once.

Reachability follows the path convention: ``v <= w`` iff some path has
range ``v`` and source ``w``.  With matrices stored row = range,
column = source this is a walk ``v -> w`` along nonzero entries ``M[v, w]``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import AssumptionFailed, HypothesisViolation
from .skeleton import Skeleton, sinks_sources


def tarjan_scc(adj: np.ndarray) -> list[list[int]]:
    """Strongly connected components of ``adj`` (iterative Tarjan).

    Components come out in reverse topological order of the condensation;
    callers that want a canonical order sort afterwards.
    """
    n = adj.shape[0]
    succ = [np.flatnonzero(adj[v]).tolist() for v in range(n)]
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    out: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] >= 0:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, pos = work[-1]
            if pos < len(succ[v]):
                work[-1] = (v, pos + 1)
                w = succ[v][pos]
                if index[w] < 0:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                out.append(sorted(comp))
    return out


def reachability(adj: np.ndarray) -> np.ndarray:
    """Reflexive-transitive closure by depth-first search from every vertex."""
    n = adj.shape[0]
    succ = [np.flatnonzero(adj[v]).tolist() for v in range(n)]
    reach = np.zeros((n, n), dtype=bool)
    for v in range(n):
        seen = reach[v]
        seen[v] = True
        todo = [v]
        while todo:
            u = todo.pop()
            for w in succ[u]:
                if not seen[w]:
                    seen[w] = True
                    todo.append(w)
    return reach


def is_irreducible(m: np.ndarray) -> bool:
    """Irreducibility of a nonnegative square matrix; the 1x1 zero matrix is reducible."""
    m = np.asarray(m)
    if m.shape[0] == 0:
        return False
    if m.shape[0] == 1:
        return bool(m[0, 0] > 0)
    return bool(reachability(m > 0).all())


@dataclass(frozen=True)
class Component:
    vertices: tuple[int, ...]
    trivial: bool

    def __contains__(self, v) -> bool:
        return v in self.vertices

    def __len__(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class Decomposition:
    """SCC partition plus the reachability relation ``reach[v, w] = (v <= w)``."""

    vertices: tuple[str, ...]
    components: tuple[Component, ...]
    comp_of: tuple[int, ...]
    reach: np.ndarray

    @property
    def nontrivial(self) -> list[Component]:
        return [c for c in self.components if not c.trivial]

    def component_of(self, v: int) -> Component:
        return self.components[self.comp_of[v]]

    def names(self, idx: Iterable[int]) -> list[str]:
        return [self.vertices[i] for i in idx]

    def to_dict(self) -> dict:
        return {
            "components": [
                {"vertices": self.names(c.vertices), "trivial": c.trivial}
                for c in self.components
            ]
        }


def decompose(s: Skeleton) -> Decomposition:
    """Components listed by smallest member vertex, for a reproducible order."""
    adj = s.union_adjacency()
    comps = sorted(tarjan_scc(adj), key=min)
    comp_of = [0] * s.n
    out = []
    for ci, c in enumerate(comps):
        for v in c:
            comp_of[v] = ci
        trivial = len(c) == 1 and not adj[c[0], c[0]]
        out.append(Component(tuple(c), trivial))
    reach = reachability(adj)
    reach.setflags(write=False)
    return Decomposition(s.vertices, tuple(out), tuple(comp_of), reach)


def _as_set(S) -> set[int]:
    return {int(v) for v in S}


def is_hereditary(d: Decomposition, S) -> bool:
    """``v in S`` and ``v <= w`` imply ``w in S``."""
    S = _as_set(S)
    if not S:
        return True
    inside = np.zeros(len(d.vertices), dtype=bool)
    inside[list(S)] = True
    return not d.reach[np.ix_(inside, ~inside)].any()


def is_forwards_hereditary(d: Decomposition, S) -> bool:
    """``v in S`` and ``w <= v`` imply ``w in S``."""
    S = _as_set(S)
    if not S:
        return True
    inside = np.zeros(len(d.vertices), dtype=bool)
    inside[list(S)] = True
    return not d.reach[np.ix_(~inside, inside)].any()


def hereditary_closure(d: Decomposition, S) -> set[int]:
    S = sorted(_as_set(S))
    if not S:
        return set()
    return set(np.flatnonzero(d.reach[S].any(axis=0)).tolist())


def subgraph(s: Skeleton, S, d: Decomposition | None = None) -> Skeleton:
    """The skeleton of ``S Lambda S``, vertices kept in input order.

    Warns when ``S`` is neither hereditary nor forwards hereditary, since the
    restriction then need not be a k-graph.
    """
    idx = sorted(_as_set(S))
    if d is None:
        d = decompose(s)
    if not (is_hereditary(d, idx) or is_forwards_hereditary(d, idx)):
        warnings.warn(
            f"{s.names(idx)} is neither hereditary nor forwards hereditary; "
            "the restriction may not be a k-graph",
            stacklevel=2,
        )
    mats = [m[np.ix_(idx, idx)] for m in s.matrices]
    return Skeleton.from_matrices(mats, s.names(idx))


def remove_hereditary(s: Skeleton, H, d: Decomposition | None = None) -> Skeleton:
    """The graph obtained by deleting a hereditary set ``H`` and all paths touching it."""
    H = _as_set(H)
    if d is None:
        d = decompose(s)
    if not is_hereditary(d, H):
        raise HypothesisViolation(
            f"{s.names(sorted(H))} is not hereditary", "hereditary", s.names(sorted(H))
        )
    return subgraph(s, [v for v in range(s.n) if v not in H], d)


def color_reach(s: Skeleton, j: int) -> np.ndarray:
    """``[v, w]`` true iff some path of degree in ``N e_j`` goes from ``w`` to ``v``."""
    return reachability(s.matrices[j] > 0)


# -- simultaneous block-triangular order ---------------------------------

@dataclass(frozen=True)
class Block:
    kind: str  # "component" or "connector"
    level: int
    vertices: tuple[int, ...]


@dataclass(frozen=True)
class Level:
    remaining: tuple[int, ...]
    components: tuple[tuple[int, ...], ...]
    connectors: tuple[int, ...]
    depth: dict = field(default_factory=dict)


@dataclass(frozen=True)
class VertexOrdering:
    """Permutation under which every ``A_j`` is block upper triangular.

    ``order[p]`` is the vertex placed at position ``p``.  Component blocks
    carry the component vertex matrices on the diagonal; connector blocks
    consist of trivial vertices and are strictly upper triangular.
    """

    vertices: tuple[str, ...]
    order: tuple[int, ...]
    blocks: tuple[Block, ...]
    levels: tuple[Level, ...]
    within_hypotheses: bool
    notes: tuple[str, ...] = ()

    @property
    def boundaries(self) -> list[int]:
        out, pos = [0], 0
        for b in self.blocks:
            pos += len(b.vertices)
            out.append(pos)
        return out

    def permutation_matrix(self) -> np.ndarray:
        n = len(self.order)
        p = np.zeros((n, n), dtype=np.int64)
        p[np.arange(n), list(self.order)] = 1
        return p

    def apply(self, m: np.ndarray) -> np.ndarray:
        o = list(self.order)
        return np.asarray(m)[np.ix_(o, o)]

    def to_dict(self) -> dict:
        name = lambda idx: [self.vertices[i] for i in idx]
        return {
            "order": name(self.order),
            "blocks": [
                {"kind": b.kind, "level": b.level, "vertices": name(b.vertices)}
                for b in self.blocks
            ],
            "boundaries": self.boundaries,
            "within_hypotheses": self.within_hypotheses,
            "notes": list(self.notes),
        }


def is_block_upper_triangular(m: np.ndarray, ordering: VertexOrdering) -> bool:
    """Exact check: nothing below the diagonal blocks, connector blocks strictly upper."""
    pm = ordering.apply(m)
    bounds = ordering.boundaries
    block_of = np.empty(len(ordering.order), dtype=int)
    for bi in range(len(ordering.blocks)):
        block_of[bounds[bi]:bounds[bi + 1]] = bi
    rows, cols = np.nonzero(pm)
    for r, c in zip(rows, cols):
        if block_of[r] > block_of[c]:
            return False
        if block_of[r] == block_of[c] and ordering.blocks[block_of[r]].kind == "connector" and r >= c:
            return False
    return True


def check_ordering_hypotheses(s: Skeleton, d: Decomposition) -> list[tuple[str, object]]:
    """Failures of: nontrivial components coordinatewise irreducible; no sinks or sources."""
    out = []
    for c in d.nontrivial:
        idx = list(c.vertices)
        for j, m in enumerate(s.matrices):
            if not is_irreducible(m[np.ix_(idx, idx)]):
                out.append(("coordinatewise_irreducible", {"component": s.names(idx), "color": j + 1}))
                break
    rep = sinks_sources(s)
    for v in rep.sources:
        out.append(("no_sources", v))
    for v in rep.sinks:
        out.append(("no_sinks", v))
    return out


def order_vertices(s: Skeleton, d: Decomposition | None = None, strict: bool = True) -> VertexOrdering:
    """Order vertices level by level: forwards-hereditary components, then the
    trivial vertices they alone reach, then recurse on what is left.

    Connector vertices are sorted by their depth ``i_v`` (longest chain of
    connector edges leading back towards the level's components), ties
    broken by input order.  With ``strict`` the standing hypotheses
    (coordinatewise irreducible components, no sinks or sources) are
    enforced; otherwise the ordering is produced and tagged.
    """
    if d is None:
        d = decompose(s)
    failures = check_ordering_hypotheses(s, d)
    if failures and strict:
        tag, witness = failures[0]
        raise HypothesisViolation(
            f"ordering hypothesis {tag!r} fails at {witness}", tag, witness
        )
    adj = s.union_adjacency()
    reach = d.reach
    remaining = list(range(s.n))
    order: list[int] = []
    blocks: list[Block] = []
    levels: list[Level] = []
    level = 0
    while remaining:
        rset = set(remaining)
        comps_here = sorted({d.comp_of[v] for v in remaining}, key=lambda ci: min(d.components[ci].vertices))
        top = []
        for ci in comps_here:
            c = d.components[ci]
            if c.trivial:
                continue
            others = [w for w in remaining if d.comp_of[w] != ci]
            if not any(reach[w, v] for w in others for v in c.vertices):
                top.append(c.vertices)
        top_set = {v for c in top for v in c}
        nontrivial_here = [v for v in remaining if not d.component_of(v).trivial]
        conn = [
            v for v in remaining
            if v not in top_set
            and all(u in top_set for u in nontrivial_here if reach[u, v])
        ]
        if not top and not conn:
            raise HypothesisViolation("ordering made no progress", "progress", s.names(remaining))
        depth: dict[int, int] = {}
        conn_set = set(conn)

        def depth_of(v: int) -> int:
            if v in depth:
                return depth[v]
            best = 1 if any(adj[u, v] for u in top_set) else 0
            for u in conn:
                if u != v and adj[u, v]:
                    best = max(best, 1 + depth_of(u))
            depth[v] = best
            return best

        for v in conn:
            depth_of(v)
        conn_sorted = sorted(conn, key=lambda v: (depth[v], v))
        for c in top:
            blocks.append(Block("component", level, tuple(c)))
            order.extend(c)
        if conn_sorted:
            blocks.append(Block("connector", level, tuple(conn_sorted)))
            order.extend(conn_sorted)
        levels.append(Level(tuple(remaining), tuple(tuple(c) for c in top), tuple(conn_sorted), dict(depth)))
        removed = top_set | conn_set
        remaining = [v for v in remaining if v not in removed]
        level += 1
    notes = tuple(f"{tag}: {w}" for tag, w in failures)
    if failures:
        notes = ("outside ordering hypotheses",) + notes
    return VertexOrdering(s.vertices, tuple(order), tuple(blocks), tuple(levels), not failures, notes)


# -- two-component setting -----------------------------------------------

@dataclass(frozen=True)
class TwoComponentReport:
    C: tuple[int, ...]
    D: tuple[int, ...]
    others: tuple[int, ...]
    C_forwards_hereditary: bool
    D_hereditary: bool
    monochromatic_paths: bool

    def to_dict(self, names: Sequence[str]) -> dict:
        nm = lambda idx: [names[i] for i in idx]
        return {
            "C": nm(self.C),
            "D": nm(self.D),
            "others": nm(self.others),
            "C_forwards_hereditary": self.C_forwards_hereditary,
            "D_hereditary": self.D_hereditary,
            "monochromatic_paths": self.monochromatic_paths,
        }


def validate_two_component(s: Skeleton, d: Decomposition | None = None) -> TwoComponentReport:
    """Check the two-component standing assumptions and derive their consequences.

    Assumptions: exactly two nontrivial components; both coordinatewise
    irreducible; the upstream component ``C`` reaches every vertex.
    Consequences verified directly: ``C`` forwards hereditary, ``D``
    hereditary, and every vertex outside ``C u D`` receives a monochromatic
    path of each colour from ``C`` and emits one of each colour into ``D``.
    """
    if d is None:
        d = decompose(s)
    nt = d.nontrivial
    if len(nt) != 2:
        raise AssumptionFailed("two_components", [s.names(c.vertices) for c in nt],
                               f"expected 2 nontrivial components, found {len(nt)}")
    for c in nt:
        idx = list(c.vertices)
        for j, m in enumerate(s.matrices):
            if not is_irreducible(m[np.ix_(idx, idx)]):
                raise AssumptionFailed("coordinatewise_irreducible",
                                       {"component": s.names(idx), "color": j + 1})
    a, b = nt
    a_up = d.reach[a.vertices[0], b.vertices[0]]
    b_up = d.reach[b.vertices[0], a.vertices[0]]
    C, D = (a, b) if a_up or not b_up else (b, a)
    c0 = C.vertices[0]
    unreached = [v for v in range(s.n) if not d.reach[c0, v]]
    if unreached:
        raise AssumptionFailed("upstream_component_reaches_all", s.names(unreached),
                               f"C={s.names(C.vertices)} does not reach {s.names(unreached)}")
    cfh = is_forwards_hereditary(d, C.vertices)
    dh = is_hereditary(d, D.vertices)
    others = [v for v in range(s.n) if v not in C and v not in D]
    mono = True
    for j in range(s.k):
        cr = color_reach(s, j)
        for v in others:
            if not any(cr[c, v] for c in C.vertices) or not any(cr[v, x] for x in D.vertices):
                raise AssumptionFailed("monochromatic_paths", {"vertex": s.vertices[v], "color": j + 1})
    return TwoComponentReport(tuple(C.vertices), tuple(D.vertices), tuple(others), cfh, dh, mono)
