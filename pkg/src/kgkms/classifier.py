"""Phase reports: which KMS_beta states exist for the preferred dynamics,
assembled from the critical-component reductions, the dominant-component
decomposition and the boundary simplices of quotient graphs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import AssumptionFailed, HypothesisViolation, NotHereditary
from .kms import (
    Dynamics,
    KmsStateVector,
    SimplexDescription,
    check_supercritical,
    extend_pf_eigenvector,
    kms1_dominant_state,
    m_to_epsilon,
    preferred_dynamics,
    simplex,
    subinvariance_check,
)
from .skeleton import SKELETON_DISCLAIMER, Skeleton, absolute_sources, sinks_sources
from .spectral import SpectralSummary, Verdict, rational_independence, summarize
from .structure import (
    Decomposition,
    color_reach,
    decompose,
    hereditary_closure,
    is_hereditary,
    is_irreducible,
    order_vertices,
    subgraph,
    validate_two_component,
)

DEFAULT_SUPERCRITICAL_BETA = 2.0


# -- reductions -----------------------------------------------------------

@dataclass
class ReductionStep:
    """Every KMS_1 state factors through the Toeplitz algebra of ``Lambda \\ H``."""

    component: tuple[int, ...]
    color: int
    H_j: tuple[int, ...]
    H: tuple[int, ...]
    quotient: Skeleton | None
    vacuous: bool
    justification: str

    def to_dict(self, names) -> dict:
        nm = lambda idx: [names[i] for i in idx]
        return {
            "component": nm(self.component),
            "color": self.color + 1,
            "H_j": nm(self.H_j),
            "removed": nm(self.H),
            "quotient_vertices": None if self.quotient is None else list(self.quotient.vertices),
            "vacuous": self.vacuous,
            "justification": self.justification,
        }


def _component_tuple(d: Decomposition, C) -> tuple[int, ...]:
    C = tuple(sorted(int(v) for v in C))
    comp = d.component_of(C[0])
    if tuple(comp.vertices) != C or comp.trivial:
        raise HypothesisViolation(f"{list(C)} is not a nontrivial component", "nontrivial_component", list(C))
    return C


def _require_irreducible(s: Skeleton, C: Sequence[int]) -> None:
    for i, m in enumerate(s.matrices):
        if not is_irreducible(m[np.ix_(list(C), list(C))]):
            raise HypothesisViolation(f"component {s.names(C)} is not coordinatewise irreducible",
                                      "coordinatewise_irreducible",
                                      {"component": s.names(C), "color": i + 1})


def color_closure(s: Skeleton, C: Sequence[int], j: int) -> set[int]:
    """``H_j = {w : C Lambda^{N e_j} w nonempty}`` (contains ``C``)."""
    cr = color_reach(s, j)
    return set(np.flatnonzero(cr[list(C)].any(axis=0)).tolist())


def critical_reduction(s: Skeleton, C, j: int, d: Decomposition | None = None,
                       summary: SpectralSummary | None = None) -> ReductionStep:
    """Remove ``H = H_j \\ C`` when ``C`` is ``j``-critical and ``H_j`` hereditary.

    When ``H`` is empty nothing is removed and the step is vacuous.
    """
    if d is None:
        d = decompose(s)
    if summary is None:
        summary = summarize(s, d)
    C = _component_tuple(d, C)
    _require_irreducible(s, C)
    ci = summary.component_index(C)
    if not summary.critical[(ci, j)]:
        raise HypothesisViolation(f"{s.names(C)} is not {j + 1}-critical", "critical", {"component": s.names(C), "color": j + 1})
    Hj = color_closure(s, C, j)
    H = tuple(sorted(Hj - set(C)))
    if not H:
        return ReductionStep(C, j, tuple(sorted(Hj)), (), s, True,
                             "nothing outside C receives a path of this colour from C")
    if not is_hereditary(d, Hj):
        raise NotHereditary(f"H_{j + 1} = {s.names(sorted(Hj))} is not hereditary",
                            "hereditary", s.names(sorted(Hj)))
    quotient = subgraph(s, [v for v in range(s.n) if v not in set(H)], d)
    return ReductionStep(C, j, tuple(sorted(Hj)), H, quotient, False,
                         f"{s.names(C)} is {j + 1}-critical and H_{j + 1} is hereditary")


def beta_lower_bound(s: Skeleton, C, d: Decomposition | None = None,
                     summary: SpectralSummary | None = None) -> dict | None:
    """``beta >= 1`` for every KMS_beta state when ``C`` is critical for some colour,
    coordinatewise irreducible and has hereditary closure everything."""
    if d is None:
        d = decompose(s)
    if summary is None:
        summary = summarize(s, d)
    C = _component_tuple(d, C)
    ci = summary.component_index(C)
    if not summary.K[ci] or not summary.irreducible[ci]:
        return None
    if hereditary_closure(d, C) != set(range(s.n)):
        return None
    return {"beta_min": 1.0, "component": s.names(C), "critical_colors": sorted(j + 1 for j in summary.K[ci])}


@dataclass
class MinimalReport:
    component: tuple[int, ...]
    color: int
    K: tuple[int, ...]
    killed_gap_colors: tuple[int, ...]
    retained_gap_colors: tuple[int, ...]
    factors_through_graph_algebra: bool
    state: KmsStateVector
    unique: bool | None
    conditions: list[str]

    def to_dict(self, names) -> dict:
        return {
            "component": [names[i] for i in self.component],
            "color": self.color + 1,
            "critical_colors": [j + 1 for j in self.K],
            "gap_projections_killed_for_colors": [j + 1 for j in self.killed_gap_colors],
            "gap_projections_nonzero_for_colors": [j + 1 for j in self.retained_gap_colors],
            "factors_through_graph_algebra_of_component": self.factors_through_graph_algebra,
            "unique": self.unique,
            "state": self.state.to_dict(),
            "conditions": list(self.conditions),
        }


def _independence_conditions(verdict: Verdict, what: str) -> tuple[bool | None, list[str]]:
    if verdict.authoritative and verdict.status == "independent":
        return True, []
    if verdict.authoritative and verdict.status == "dependent":
        return None, [f"{what} are rationally dependent: uniqueness not established"]
    return None, [f"requires rational independence of {what}: {verdict.status} ({verdict.method}, non-authoritative)"]


def lift(vec, idx: Sequence[int], n: int) -> np.ndarray:
    out = np.zeros(n)
    out[list(idx)] = vec
    return out


def classify_minimal(s: Skeleton, C, j: int, dyn: Dynamics | None = None,
                     d: Decomposition | None = None,
                     summary: SpectralSummary | None = None) -> MinimalReport:
    """KMS_1 states when ``C`` is ``j``-critical and every vertex receives a
    ``j``-coloured path from ``C``: they factor through ``Lambda_C`` and kill
    the gap projections of the critical colours; with independent log radii
    the state is unique, with vertex vector the Perron-Frobenius vector of ``C``.
    """
    if d is None:
        d = decompose(s)
    if summary is None:
        summary = summarize(s, d)
    if dyn is None:
        dyn = preferred_dynamics(summary)
    C = _component_tuple(d, C)
    _require_irreducible(s, C)
    ci = summary.component_index(C)
    if not summary.critical[(ci, j)]:
        raise HypothesisViolation(f"{s.names(C)} is not {j + 1}-critical", "critical",
                                  {"component": s.names(C), "color": j + 1})
    Hj = color_closure(s, C, j)
    if Hj != set(range(s.n)):
        missing = sorted(set(range(s.n)) - Hj)
        raise HypothesisViolation(f"H_{j + 1} misses {s.names(missing)}", "color_closure_everything", s.names(missing))
    K = tuple(sorted(summary.K[ci]))
    retained = tuple(i for i in range(s.k) if i not in K)
    rhoC = [e if e is not None else r for e, r in zip(summary.rho_C_exact[ci], summary.rho_C[ci])]
    unique, conds = _independence_conditions(rational_independence(rhoC), "ln rho(A_C,i)")
    m = lift(summary.pf_vectors[ci], C, s.n)
    full_K = len(K) == s.k
    state = KmsStateVector(1.0, dyn.r, s.vertices, m, m_to_epsilon(s, dyn, 1.0, m),
                           "critical_component_minimal", True if full_K else None, list(conds))
    if retained:
        conds = conds + [f"gap projections for colours {[i + 1 for i in retained]} do not vanish (given independence)"]
    return MinimalReport(C, j, K, K, retained, full_K, state, unique, conds)


def factorization_flags(target: Skeleton, sx: SimplexDescription) -> list[dict]:
    """Per extreme point: does the state factor through the graph algebra of ``target``?

    True exactly when the boundary vector is supported on absolute sources.
    ``graph`` names the vertex set of ``target``; a state lifted from a
    quotient graph factors through that quotient's algebra, not the whole one.
    """
    srcs = set(absolute_sources(target))
    out = []
    for v, eps in zip(sx.vertices, sx.extreme_eps):
        support = set(np.flatnonzero(eps > 0).tolist())
        out.append({"vertex": v, "graph": list(target.vertices),
                    "factors_through_graph_algebra": bool(support) and support <= srcs})
    return out


def gaps_vanish(s: Skeleton, dyn: Dynamics, beta: float, m, tol: float = 1e-9) -> bool:
    """``m = e^{-beta r_i} A_i m`` for every colour, so every gap ``q_v - sum t_e t_e^*`` has value 0."""
    m = np.asarray(m, dtype=float)
    w = dyn.weights(beta)
    return all(float(np.abs(m - wi * (a @ m)).max()) <= tol for a, wi in zip(s.float_matrices(), w))


# -- reports --------------------------------------------------------------

@dataclass
class Regime:
    lo: float
    hi: float
    lo_closed: bool
    hi_closed: bool
    description: str
    provenance: str
    dimension: int | None = None
    simplex: dict | None = None
    states: list[KmsStateVector] = field(default_factory=list)
    flags: list | None = None
    conditions: list[str] = field(default_factory=list)
    sample_beta: float | None = None

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, beta: float) -> bool:
        lo_ok = beta > self.lo or (self.lo_closed and beta == self.lo)
        hi_ok = beta < self.hi or (self.hi_closed and beta == self.hi)
        return lo_ok and hi_ok

    def to_dict(self) -> dict:
        hi = None if math.isinf(self.hi) else self.hi
        lo = None if math.isinf(self.lo) else self.lo
        d = {
            "beta": {"lo": lo, "hi": hi, "lo_closed": self.lo_closed, "hi_closed": self.hi_closed},
            "description": self.description,
            "provenance": self.provenance,
            "dimension": self.dimension,
            "conditions": list(self.conditions),
        }
        if self.sample_beta is not None:
            d["sample_beta"] = self.sample_beta
        if self.simplex is not None:
            d["simplex"] = self.simplex
        if self.states:
            d["states"] = [st.to_dict() for st in self.states]
        if self.flags is not None:
            d["factorization_flags"] = self.flags
        return d


@dataclass
class PhaseReport:
    vertices: tuple[str, ...]
    regimes: list[Regime]
    beta_c: float | None
    complete: bool
    dynamics: Dynamics | None
    notes: list[str] = field(default_factory=list)
    sections: dict = field(default_factory=dict)

    def regime_at(self, beta: float) -> list[Regime]:
        return [r for r in self.regimes if r.contains(beta)]

    def to_dict(self) -> dict:
        return {
            "status": "COMPLETE" if self.complete else "INCOMPLETE",
            "beta_c": self.beta_c,
            "dynamics": None if self.dynamics is None else self.dynamics.to_dict(),
            "regimes": [r.to_dict() for r in self.regimes],
            "notes": list(self.notes),
            **self.sections,
        }


def _supercritical_regime(s: Skeleton, dyn: Dynamics, beta: float) -> Regime:
    sx = simplex(s, dyn, beta)
    return Regime(
        1.0, math.inf, False, False,
        f"beta > 1: simplex of KMS_beta states of dimension {s.n - 1}, parametrized by eps . y^beta = 1",
        "supercritical_simplex",
        dimension=s.n - 1,
        simplex=sx.to_dict(),
        flags=factorization_flags(s, sx),
        sample_beta=beta,
    )


def _lifted_states(s: Skeleton, quotient_idx: Sequence[int], sx: SimplexDescription, dyn: Dynamics,
                   beta: float, provenance: str) -> list[KmsStateVector]:
    out = []
    for m in sx.extreme_m:
        full = lift(m, quotient_idx, s.n)
        out.append(KmsStateVector(beta, dyn.r, s.vertices, full, m_to_epsilon(s, dyn, beta, full), provenance))
    return out


def two_component_phase_report(s: Skeleton, dyn: Dynamics | None = None,
                               d: Decomposition | None = None,
                               summary: SpectralSummary | None = None,
                               beta_sample: float | None = None) -> PhaseReport:
    """Regimes for a graph with two nontrivial components ``C`` (upstream) and ``D``."""
    if d is None:
        d = decompose(s)
    tc = validate_two_component(s, d)
    if summary is None:
        summary = summarize(s, d)
    if dyn is None:
        dyn = preferred_dynamics(summary)
    C, D = tc.C, tc.D
    ci = summary.component_index(C)
    KC = sorted(summary.K[ci])
    notes = []
    regimes: list[Regime] = []
    b_sup = beta_sample if beta_sample is not None and beta_sample > 1 else DEFAULT_SUPERCRITICAL_BETA
    regimes.append(_supercritical_regime(s, dyn, b_sup))
    indep_full, full_conds = _independence_conditions(summary.independence, "ln rho(A_i)")
    beta_c = None
    if KC:
        bound = beta_lower_bound(s, C, d, summary)
        applicable = [j for j in KC if color_closure(s, C, j) == set(range(s.n))]
        if applicable:
            mr = classify_minimal(s, C, applicable[0], dyn, d, summary)
            desc = (f"beta = 1: every KMS_1 state factors through the component {s.names(C)}; "
                    + ("unique state" if mr.unique else "unique state if the log radii are independent"))
            if mr.factors_through_graph_algebra:
                desc += "; it factors through the graph algebra of the component"
            regimes.append(Regime(1.0, 1.0, True, True, desc, "critical_component_minimal",
                                  dimension=0 if mr.unique else None, states=[mr.state],
                                  conditions=mr.conditions))
        else:
            regimes.append(Regime(1.0, 1.0, True, True,
                                  "beta = 1: no critical colour j has H_j = all vertices; classification left open",
                                  "open", conditions=["open case"]))
        if bound is not None:
            regimes.append(Regime(-math.inf, 1.0, False, False,
                                  "beta < 1: no KMS_beta states", "beta_lower_bound", dimension=-1))
    else:
        rest = [v for v in range(s.n) if v not in set(D)]
        quotient = subgraph(s, rest, d)
        ext = extend_pf_eigenvector(s, D, d)
        psi = kms1_dominant_state(s, D, dyn, d, ext)
        psi.conditions = list(full_conds)
        sx1 = simplex(quotient, dyn, 1.0)
        lifted = _lifted_states(s, rest, sx1, dyn, 1.0, "lifted_from_quotient")
        flags = factorization_flags(quotient, sx1)
        dim = len(rest)
        regimes.append(Regime(
            1.0, 1.0, True, True,
            f"beta = 1: simplex of dimension {dim} spanned by the dominant state and "
            f"the {quotient.n - 1}-dimensional simplex lifted from the quotient by D",
            "dominant_plus_lifted",
            dimension=dim,
            simplex={"quotient": sx1.to_dict(), "dominant_state": psi.to_dict()},
            states=[psi] + lifted,
            flags=flags,
            conditions=list(full_conds),
        ))
        rhoC = [e if e is not None else r for e, r in zip(summary.rho_C_exact[ci], summary.rho_C[ci])]
        beta_c = max(math.log(p) / r for p, r in zip(rhoC, dyn.r) if p > 0)
        mid = 0.5 * (beta_c + 1.0)
        sxm = simplex(quotient, dyn, mid)
        regimes.append(Regime(
            beta_c, 1.0, False, False,
            f"beta_c < beta < 1: simplex of dimension {quotient.n - 1} lifted from the quotient by D",
            "lifted_quotient_simplex",
            dimension=quotient.n - 1,
            simplex=sxm.to_dict(),
            states=_lifted_states(s, rest, sxm, dyn, mid, "lifted_from_quotient"),
            flags=factorization_flags(quotient, sxm),
            sample_beta=mid,
        ))
        unique, conds = _independence_conditions(rational_independence(rhoC), "ln rho(A_C,i)")
        mC = lift(summary.pf_vectors[ci], C, s.n)
        st = KmsStateVector(beta_c, dyn.r, s.vertices, mC, m_to_epsilon(s, dyn, beta_c, mC),
                            "second_critical_point", gaps_vanish(s, dyn, beta_c, mC), list(conds))
        regimes.append(Regime(
            beta_c, beta_c, True, True,
            "beta = beta_c: unique KMS state, vanishing off C",
            "second_critical_point", dimension=0 if unique else None, states=[st], conditions=conds))
        regimes.append(Regime(-math.inf, beta_c, False, False,
                              "beta < beta_c: not classified", "open", conditions=["outside the analysed range"]))
    rep = sinks_sources(s)
    if rep.has_sinks_or_sources:
        notes.append("graph has sinks or sources; the beta <= 1 analysis assumes neither")
    notes.append(SKELETON_DISCLAIMER)
    return PhaseReport(s.vertices, regimes, beta_c, True, dyn, notes,
                       {"two_component": tc.to_dict(s.vertices)})


def _single_vertex_report(s: Skeleton, dyn: Dynamics, summary: SpectralSummary, beta_sample) -> PhaseReport:
    b_sup = beta_sample if beta_sample is not None and beta_sample >= 1 else DEFAULT_SUPERCRITICAL_BETA
    states = [KmsStateVector(b, dyn.r, s.vertices, np.ones(1), m_to_epsilon(s, dyn, b, np.ones(1)), prov,
                             gaps_vanish(s, dyn, b, np.ones(1)))
              for b, prov in ((1.0, "irreducible_critical"), (b_sup, "supercritical_simplex"))]
    regime = Regime(1.0, math.inf, True, False,
                    "beta >= 1: unique KMS_beta state, m = 1 at the single vertex",
                    "single_vertex", dimension=0, states=states, sample_beta=b_sup)
    return PhaseReport(s.vertices, [regime], None, True, dyn,
                       ["beta < 1: no KMS_beta states", SKELETON_DISCLAIMER])


def _one_component_report(s: Skeleton, dyn: Dynamics, summary: SpectralSummary, beta_sample) -> PhaseReport:
    if s.n == 1:
        return _single_vertex_report(s, dyn, summary, beta_sample)
    b_sup = beta_sample if beta_sample is not None and beta_sample > 1 else DEFAULT_SUPERCRITICAL_BETA
    regimes = [_supercritical_regime(s, dyn, b_sup)]
    x = summary.pf_vectors[0]
    unique, conds = _independence_conditions(summary.independence, "ln rho(A_i)")
    st = KmsStateVector(1.0, dyn.r, s.vertices, x, m_to_epsilon(s, dyn, 1.0, x), "irreducible_critical",
                        gaps_vanish(s, dyn, 1.0, x), conds)
    regimes.append(Regime(1.0, 1.0, True, True,
                          "beta = 1: unique KMS_1 state given independence, factoring through the graph algebra",
                          "irreducible_critical", dimension=0 if unique else None, states=[st], conditions=conds))
    regimes.append(Regime(-math.inf, 1.0, False, False, "beta < 1: no KMS_beta states",
                          "beta_lower_bound", dimension=-1))
    return PhaseReport(s.vertices, regimes, None, True, dyn, [SKELETON_DISCLAIMER])


def phase_report(s: Skeleton, dyn: Dynamics | None = None, beta_sample: float | None = None) -> PhaseReport:
    """Dispatch on the component structure.

    One coordinatewise irreducible component and the two-component setting
    get complete reports; otherwise every individually applicable result is
    run per component and the report is marked INCOMPLETE.
    """
    d = decompose(s)
    summary = summarize(s, d)
    if dyn is None:
        dyn = preferred_dynamics(summary)
    nt = d.nontrivial
    sections = {
        "components": d.to_dict()["components"],
        "spectral": summary.to_dict(),
        "sources": sinks_sources(s).to_dict(),
    }
    try:
        sections["ordering"] = order_vertices(s, d, strict=False).to_dict()
    except HypothesisViolation as exc:
        sections["ordering"] = {"error": exc.to_dict()}
    if len(nt) == 1 and len(nt[0]) == s.n and summary.irreducible[0]:
        rep = _one_component_report(s, dyn, summary, beta_sample)
        rep.sections.update(sections)
        return rep
    if len(nt) == 2:
        try:
            rep = two_component_phase_report(s, dyn, d, summary, beta_sample)
            rep.sections.update(sections)
            return rep
        except AssumptionFailed as exc:
            sections["two_component_assumptions"] = exc.to_dict()
    b_sup = beta_sample if beta_sample is not None and beta_sample > 1 else DEFAULT_SUPERCRITICAL_BETA
    regimes = [_supercritical_regime(s, dyn, b_sup)]
    per = []
    for c in nt:
        C = tuple(c.vertices)
        ci = summary.component_index(C)
        entry = {"component": s.names(C), "critical_colors": sorted(j + 1 for j in summary.K[ci])}
        if summary.irreducible[ci]:
            reds = []
            for j in sorted(summary.K[ci]):
                try:
                    reds.append(critical_reduction(s, C, j, d, summary).to_dict(s.vertices))
                except HypothesisViolation as exc:
                    reds.append({"color": j + 1, "inapplicable": exc.to_dict()})
            entry["reductions"] = reds
            entry["beta_lower_bound"] = beta_lower_bound(s, C, d, summary)
            if is_hereditary(d, C):
                try:
                    psi = kms1_dominant_state(s, C, dyn, d)
                    entry["dominant_kms1_state"] = psi.to_dict()
                except HypothesisViolation as exc:
                    entry["dominant_kms1_state"] = {"inapplicable": exc.to_dict()}
        else:
            entry["note"] = "not coordinatewise irreducible"
        per.append(entry)
    sections["per_component"] = per
    return PhaseReport(s.vertices, regimes, None, False, dyn,
                       ["global classification INCOMPLETE: only per-component results apply",
                        SKELETON_DISCLAIMER], sections)
