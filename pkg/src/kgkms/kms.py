"""KMS data for the gauge dynamics ``alpha^r``: subinvariance, the
normalizing vector ``y^beta``, boundary simplices, the dominant KMS_1
state built from an extended Perron-Frobenius eigenvector, and the
decomposition of KMS_1 vertex vectors.

A state is represented by its vertex vector ``m_v = phi(q_v)``.  Every
value ``phi(t_mu t_nu^*)`` is then ``delta_{mu,nu} e^{-beta r.d(mu)} m_{s(mu)}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    CycleGraph,
    HypothesisViolation,
    NotAState,
    NumericalFailure,
    Subcritical,
    TailBoundFailure,
)
from .skeleton import Skeleton
from .spectral import (
    SpectralSummary,
    common_pf_vector,
    exact_spectral_radius,
    spectral_radius,
    summarize,
)
from .structure import Decomposition, decompose, is_hereditary, is_irreducible

STATE_TOL = 1e-10
EXTENSION_TOL = 1e-9


@dataclass(frozen=True)
class Dynamics:
    """Rates ``r`` of the gauge dynamics ``t -> gamma_{e^{itr}}``."""

    r: tuple[float, ...]
    preferred: bool = False
    normalized: bool = False

    def __post_init__(self):
        if any(not (x > 0) or not math.isfinite(x) for x in self.r):
            raise ValueError(f"rates must be positive and finite, got {self.r}")

    @property
    def k(self) -> int:
        return len(self.r)

    def weights(self, beta: float) -> np.ndarray:
        """``e^{-beta r_i}`` per colour."""
        return np.exp(-beta * np.asarray(self.r))

    def critical_beta(self, rho: Sequence[float]) -> float:
        """``max_i r_i^{-1} ln rho_i`` (``-inf`` if every radius vanishes)."""
        vals = [math.log(p) / r for p, r in zip(rho, self.r) if p > 0]
        return max(vals) if vals else -math.inf

    def to_dict(self) -> dict:
        return {"r": list(self.r), "preferred": self.preferred, "normalized": self.normalized}


def _radii(s: Skeleton) -> list[float]:
    out = []
    for m in s.matrices:
        e = exact_spectral_radius(m)
        out.append(float(e) if e is not None else spectral_radius(m))
    return out


def preferred_dynamics(source) -> Dynamics:
    """``r_i = ln rho(A_i)``; needs every ``rho(A_i) > 1``.

    Accepts a :class:`SpectralSummary`, a :class:`Skeleton` or a radius list.
    """
    if isinstance(source, SpectralSummary):
        rho = [float(e) if e is not None else r for e, r in zip(source.rho_exact, source.rho)]
    elif isinstance(source, Skeleton):
        rho = _radii(source)
    else:
        rho = [float(x) for x in source]
    for i, p in enumerate(rho):
        if not p > 1:
            raise CycleGraph(
                f"rho(A_{i + 1}) = {p:.15g} <= 1, so the preferred dynamics is undefined",
                "spectral_radius_exceeds_one",
                i,
            )
    return Dynamics(tuple(math.log(p) for p in rho), preferred=True, normalized=True)


def make_dynamics(r: Sequence[float], s: Skeleton | None = None) -> Dynamics:
    """Arbitrary rates; ``normalized`` records whether the critical beta is 1."""
    dyn = Dynamics(tuple(float(x) for x in r))
    if s is None:
        return dyn
    rho = _radii(s)
    normalized = abs(dyn.critical_beta(rho) - 1) <= 1e-12
    preferred = all(abs(ri - math.log(p)) <= 1e-12 * abs(ri) for ri, p in zip(dyn.r, rho) if p > 0)
    return Dynamics(dyn.r, preferred and normalized, normalized)


# -- subinvariance --------------------------------------------------------

@dataclass
class SubinvarianceReport:
    """Slacks ``e^{beta r_i} m - A_i m`` and ``prod_i (1 - e^{-beta r_i} A_i) m``."""

    single: list[np.ndarray]
    product: np.ndarray
    tol: float
    violations: list[tuple[str, int, int, float]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def max_violation(self) -> float:
        return max((-v[3] for v in self.violations), default=0.0)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "single_min_slack": [float(x.min()) if x.size else 0.0 for x in self.single],
            "product_min": float(self.product.min()) if self.product.size else 0.0,
            "violations": [list(v) for v in self.violations],
        }


def resolvent_product(mats: Sequence[np.ndarray], w: Sequence[float], vec: np.ndarray) -> np.ndarray:
    """``prod_i (1 - w_i M_i)^{-1} vec`` by successive dense solves."""
    out = np.asarray(vec, dtype=float)
    n = out.shape[0]
    for m, wi in zip(mats, w):
        out = np.linalg.solve(np.eye(n) - wi * np.asarray(m, dtype=float), out)
    return out


def difference_product(mats: Sequence[np.ndarray], w: Sequence[float], vec: np.ndarray) -> np.ndarray:
    """``prod_i (1 - w_i M_i) vec``."""
    out = np.asarray(vec, dtype=float)
    for m, wi in zip(mats, w):
        out = out - wi * (np.asarray(m, dtype=float) @ out)
    return out


def subinvariance_check(s: Skeleton, dyn: Dynamics, m, beta: float = 1.0,
                        tol: float = STATE_TOL) -> SubinvarianceReport:
    m = np.asarray(m, dtype=float)
    scale = tol * max(float(np.abs(m).max()) if m.size else 0.0, 1e-300)
    w = dyn.weights(beta)
    single = []
    viol = []
    for i, a in enumerate(s.float_matrices()):
        # slack measured after dividing by e^{beta r_i}, so 1e-10 is relative to m
        slack = m - w[i] * (a @ m)
        single.append(slack)
        for v in np.flatnonzero(slack < -scale):
            viol.append(("single", i, int(v), float(slack[v])))
    prod = difference_product(s.float_matrices(), w, m)
    for v in np.flatnonzero(prod < -scale):
        viol.append(("product", -1, int(v), float(prod[v])))
    return SubinvarianceReport(single, prod, tol, viol)


# -- supercriticality and y^beta -----------------------------------------

def check_supercritical(s: Skeleton, dyn: Dynamics, beta: float, margin: float = 1e-12) -> list[float]:
    """Raise :class:`Subcritical` unless ``beta r_i > ln rho(A_i)`` for every ``i``.

    Returns ``e^{-beta r_i} rho(A_i)``, each below 1.
    """
    w = dyn.weights(beta)
    out = []
    for i, rho in enumerate(_radii(s)):
        q = w[i] * rho
        if q >= 1 - margin:
            raise Subcritical(i)
        out.append(q)
    return out


@dataclass
class SeriesResult:
    value: np.ndarray
    tail: float
    terms: tuple[int, ...]
    theta: tuple[float, ...]


def certified_series(mats: Sequence[np.ndarray], w: Sequence[float], vec,
                     target: float = 1e-12, max_terms: int = 20000,
                     rho: Sequence[float] | None = None) -> SeriesResult:
    """Truncated ``sum_{n in N^k} prod_i (w_i M_i)^{n_i} vec`` with a certified tail.

    The matrices must commute.  The box ``0 <= n_i <= N_i`` factorizes into
    a product of per-coordinate partial geometric sums.  For the tail a
    weight ``q = prod_i (1 - t_i w_i M_i)^{-1} 1`` with ``t_i > 1`` gives
    ``w_i M_i q <= theta_i q`` (``theta_i`` measured directly), hence every
    omitted term is bounded by ``theta^n * max(vec/q) * q``.  ``tail`` is an
    entrywise sup-norm bound on the omitted sum.
    """
    vec = np.asarray(vec, dtype=float)
    if (vec < 0).any():
        raise ValueError("certified_series needs a nonnegative vector")
    n = vec.shape[0]
    k = len(mats)
    if n == 0:
        return SeriesResult(vec.copy(), 0.0, (0,) * k, (0.0,) * k)
    T = [wi * np.asarray(m, dtype=float) for m, wi in zip(mats, w)]
    if rho is None:
        rho = [spectral_radius(t) for t in T]
    else:
        rho = [wi * p for wi, p in zip(w, rho)]
    if any(p >= 1 for p in rho):
        raise TailBoundFailure(f"series diverges: weighted radii {rho}")
    t = [1 / math.sqrt(p) if p > 0.25 else 2.0 for p in rho]
    q = np.ones(n)
    for ti, Ti in zip(t, T):
        q = np.linalg.solve(np.eye(n) - ti * Ti, q)
    if not (q > 0).all() or not np.isfinite(q).all():
        raise TailBoundFailure("weight vector for the tail bound is not positive")
    theta = [float(((Ti @ q) / q).max()) for Ti in T]
    if any(th >= 1 for th in theta):
        raise TailBoundFailure(f"contraction factors {theta} do not certify convergence")
    scale = float((vec / q).max()) * float(q.max())

    def tail_of(N):
        # full - box = full * (1 - prod(1 - th^(N+1))), formed without cancellation
        full = 1.0
        log_keep = 0.0
        for th, Ni in zip(theta, N):
            full *= 1 / (1 - th)
            log_keep += math.log1p(-th ** (Ni + 1))
        return full * -math.expm1(log_keep) * scale

    N = []
    for th in theta:
        if th <= 0:
            N.append(0)
        else:
            N.append(max(1, int(math.ceil(math.log(max(target, 1e-300) * (1 - th) / (k * max(scale, 1e-300))) / math.log(th)))))
    N = [min(x, max_terms) for x in N]
    tail = tail_of(N)
    while tail > target and any(x < max_terms for x in N):
        N = [min(max_terms, x + max(1, x // 2)) for x in N]
        tail = tail_of(N)
    out = vec.copy()
    for Ti, Ni in zip(T, N):
        acc = out.copy()
        term = out
        for _ in range(Ni):
            term = Ti @ term
            acc = acc + term
        out = acc
    return SeriesResult(out, float(tail), tuple(N), tuple(theta))


def y_beta(s: Skeleton, dyn: Dynamics, beta: float) -> np.ndarray:
    """``y_v = sum_{mu in Lambda v} e^{-beta r.d(mu)}``, a sum over paths with source ``v``.

    Closed form ``prod_i (1 - e^{-beta r_i} A_i^T)^{-1} 1``.  Pass the
    restricted skeleton to work on a subgraph.
    """
    check_supercritical(s, dyn, beta)
    w = dyn.weights(beta)
    return resolvent_product([m.T for m in s.float_matrices()], w, np.ones(s.n))


def y_beta_series(s: Skeleton, dyn: Dynamics, beta: float, target: float = 1e-12) -> SeriesResult:
    """The same vector summed degree by degree, with a certified tail."""
    check_supercritical(s, dyn, beta)
    w = dyn.weights(beta)
    return certified_series([m.T for m in s.float_matrices()], w, np.ones(s.n), target,
                            rho=_radii(s))


def epsilon_to_m(s: Skeleton, dyn: Dynamics, beta: float, eps) -> np.ndarray:
    """``m = prod_i (1 - e^{-beta r_i} A_i)^{-1} eps``."""
    check_supercritical(s, dyn, beta)
    return resolvent_product(s.float_matrices(), dyn.weights(beta), eps)


def m_to_epsilon(s: Skeleton, dyn: Dynamics, beta: float, m) -> np.ndarray:
    """``eps = prod_i (1 - e^{-beta r_i} A_i) m``; defined for every ``beta``."""
    return difference_product(s.float_matrices(), dyn.weights(beta), m)


@dataclass
class SimplexDescription:
    """KMS_beta states ``phi_eps`` with ``eps >= 0`` and ``eps . y = 1``.

    ``extreme_eps[p]`` is ``delta_v / y_v`` for ``v = vertices[p]``;
    ``extreme_m[p]`` the matching vertex vector.
    """

    beta: float
    vertices: tuple[str, ...]
    y: np.ndarray
    extreme_eps: np.ndarray
    extreme_m: np.ndarray

    @property
    def dimension(self) -> int:
        return len(self.vertices) - 1

    def state(self, eps) -> np.ndarray:
        eps = np.asarray(eps, dtype=float)
        return self.extreme_m.T @ (eps * self.y)

    def to_dict(self) -> dict:
        return {
            "beta": self.beta,
            "dimension": self.dimension,
            "vertices": list(self.vertices),
            "y_beta": self.y.tolist(),
            "extreme_points": [
                {"vertex": v, "epsilon": e.tolist(), "m": m.tolist()}
                for v, e, m in zip(self.vertices, self.extreme_eps, self.extreme_m)
            ],
        }


def simplex(s: Skeleton, dyn: Dynamics, beta: float) -> SimplexDescription:
    y = y_beta(s, dyn, beta)
    eps = np.diag(1 / y)
    ms = np.array([epsilon_to_m(s, dyn, beta, e) for e in eps]) if s.n else np.zeros((0, 0))
    return SimplexDescription(beta, s.vertices, y, eps, ms)


# -- extension of a Perron-Frobenius eigenvector -------------------------

@dataclass
class ExtensionResult:
    """``z = (y, x, 0)`` over ``F u D u H`` with ``H = {v : v Lambda D empty}``."""

    vertices: tuple[str, ...]
    F: tuple[int, ...]
    D: tuple[int, ...]
    H: tuple[int, ...]
    rho_D: tuple[float, ...]
    x: np.ndarray
    y: np.ndarray
    y_all: list[np.ndarray]
    z: np.ndarray
    b: float
    spread: float
    residual: float

    def blocks(self, s: Skeleton, i: int) -> dict:
        a = s.matrices[i]
        F, D, H = list(self.F), list(self.D), list(self.H)
        return {
            "E": a[np.ix_(F, F)],
            "B": a[np.ix_(F, D)],
            "A_D": a[np.ix_(D, D)],
            "A_H": a[np.ix_(H, H)],
        }

    @property
    def m(self) -> np.ndarray:
        return self.z / self.b

    def to_dict(self) -> dict:
        nm = lambda idx: [self.vertices[i] for i in idx]
        return {
            "F": nm(self.F), "D": nm(self.D), "H": nm(self.H),
            "rho_D": list(self.rho_D),
            "z": self.z.tolist(), "b": self.b,
            "formula_spread": self.spread, "eigen_residual": self.residual,
        }


def _component_radius(s: Skeleton, idx: Sequence[int], i: int) -> tuple[float, int | None]:
    block = s.matrices[i][np.ix_(list(idx), list(idx))]
    e = exact_spectral_radius(block)
    return (float(e) if e is not None else spectral_radius(block)), e


def _strictly_greater(a: tuple[float, int | None], b: tuple[float, int | None], rtol: float = 1e-9) -> bool:
    if a[1] is not None and b[1] is not None:
        return a[1] > b[1]
    return a[0] > b[0] * (1 + rtol) + 1e-300


def extend_pf_eigenvector(s: Skeleton, D: Sequence[int], d: Decomposition | None = None,
                          tol: float = EXTENSION_TOL) -> ExtensionResult:
    """Extend the common Perron-Frobenius vector of ``Lambda_D`` to a common
    eigenvector of every ``A_i``.

    ``y_i = (rho(A_{D,i}) - E_i)^{-1} B_i x`` is computed for every colour
    and the results are required to agree.
    """
    if d is None:
        d = decompose(s)
    D = tuple(sorted(int(v) for v in D))
    comp = d.component_of(D[0])
    if tuple(comp.vertices) != D or comp.trivial:
        raise HypothesisViolation(f"{s.names(D)} is not a nontrivial component", "nontrivial_component", s.names(D))
    if not is_hereditary(d, D):
        raise HypothesisViolation(f"{s.names(D)} is not hereditary", "hereditary", s.names(D))
    for i, m in enumerate(s.matrices):
        if not is_irreducible(m[np.ix_(D, D)]):
            raise HypothesisViolation(f"A_D,{i + 1} is reducible", "coordinatewise_irreducible",
                                      {"component": s.names(D), "color": i + 1})
    rD = [_component_radius(s, D, i) for i in range(s.k)]
    for c in d.nontrivial:
        if tuple(c.vertices) == D:
            continue
        if not any(d.reach[u, v] for u in c.vertices for v in D):
            continue
        for i in range(s.k):
            rc = _component_radius(s, c.vertices, i)
            if not _strictly_greater(rD[i], rc):
                raise HypothesisViolation(
                    f"rho(A_D,{i + 1}) = {rD[i][0]:.15g} does not exceed rho = {rc[0]:.15g} "
                    f"of upstream component {s.names(c.vertices)}",
                    "dominant_hereditary_component",
                    {"component": s.names(c.vertices), "color": i + 1},
                )
    Dset = set(D)
    H = tuple(v for v in range(s.n) if v not in Dset and not any(d.reach[v, x] for x in D))
    F = tuple(v for v in range(s.n) if v not in Dset and v not in H)
    x, _ = common_pf_vector([m[np.ix_(D, D)] for m in s.matrices])
    rho_D = tuple(r for r, _ in rD)
    ys = []
    for i, a in enumerate(s.float_matrices()):
        E = a[np.ix_(F, F)]
        B = a[np.ix_(F, D)]
        ys.append(np.linalg.solve(rho_D[i] * np.eye(len(F)) - E, B @ x) if F else np.zeros(0))
    y = ys[0]
    ynorm = max(float(np.abs(y).max()) if y.size else 0.0, 1e-300)
    spread = max((float(np.abs(a - b).max()) for a in ys for b in ys), default=0.0) if y.size else 0.0
    if spread > tol * ynorm:
        raise NumericalFailure(f"the {s.k} formulas for y disagree by {spread:.3e}")
    if (y < -tol * ynorm).any():
        raise NumericalFailure("extended eigenvector has negative entries")
    y = np.maximum(y, 0.0)
    z = np.zeros(s.n)
    z[list(F)] = y
    z[list(D)] = x
    residual = max(float(np.abs(a @ z - r * z).max()) / max(1.0, r)
                   for a, r in zip(s.float_matrices(), rho_D))
    if residual > tol * float(z.max()):
        raise NumericalFailure(f"(y, x, 0) fails the eigen-equation, residual {residual:.3e}")
    return ExtensionResult(s.vertices, F, D, H, rho_D, x, y, ys, z, float(z.sum()), spread / ynorm, residual)


# -- states ---------------------------------------------------------------

@dataclass
class KmsStateVector:
    """A KMS_beta state by its vertex vector.

    ``value(degree, source)`` gives ``phi(t_mu t_mu^*)`` for any path of that
    degree and source; off-diagonal spanning elements vanish.
    """

    beta: float
    r: tuple[float, ...]
    vertices: tuple[str, ...]
    m: np.ndarray
    epsilon: np.ndarray | None
    provenance: str
    ck_flag: bool | None = None
    conditions: list[str] = field(default_factory=list)

    def value(self, degree: Sequence[int], source: int, same: bool = True) -> float:
        if not same:
            return 0.0
        return float(math.exp(-self.beta * float(np.dot(self.r, degree))) * self.m[source])

    def to_dict(self) -> dict:
        return {
            "beta": self.beta,
            "m": {v: float(x) for v, x in zip(self.vertices, self.m)},
            "epsilon": None if self.epsilon is None else {v: float(x) for v, x in zip(self.vertices, self.epsilon)},
            "provenance": self.provenance,
            "factors_through_cuntz_krieger": self.ck_flag,
            "conditions": list(self.conditions),
        }


def kms1_dominant_state(s: Skeleton, D: Sequence[int], dyn: Dynamics | None = None,
                        d: Decomposition | None = None,
                        ext: ExtensionResult | None = None) -> KmsStateVector:
    """KMS_1 state ``psi(t_mu t_nu^*) = delta prod_i rho(A_i)^{-d(mu)_i} m_{s(mu)}`` with ``m = z / b``."""
    if dyn is None:
        dyn = preferred_dynamics(s)
    if not dyn.preferred:
        raise HypothesisViolation("the dominant KMS_1 state needs the preferred dynamics", "preferred_dynamics")
    if ext is None:
        ext = extend_pf_eigenvector(s, D, d)
    m = ext.m
    rho = [math.exp(r) for r in dyn.r]
    eps = m_to_epsilon(s, dyn, 1.0, m)
    ck = all(
        float(np.abs(a @ m - p * m).max()) <= 1e-9 * max(1.0, p)
        for a, p in zip(s.float_matrices(), rho)
    )
    return KmsStateVector(1.0, dyn.r, s.vertices, m, eps, "dominant_kms1", ck)


@dataclass
class Kms1Decomposition:
    """``m_theta = a m_psi + (1 - a) kappa`` with ``kappa`` supported off ``D``.

    ``kappa`` and ``epsilon`` are indexed by ``rest`` (the vertices off ``D``).
    """

    a: float
    rest: tuple[int, ...]
    kappa: np.ndarray | None
    epsilon: np.ndarray | None

    def to_dict(self, names) -> dict:
        return {
            "a": self.a,
            "kappa": None if self.kappa is None else {names[v]: float(x) for v, x in zip(self.rest, self.kappa)},
            "epsilon": None if self.epsilon is None else {names[v]: float(x) for v, x in zip(self.rest, self.epsilon)},
        }


def check_dominance(s: Skeleton, D: Sequence[int], d: Decomposition) -> None:
    """``rho(A_{D,i}) = rho(A_i) > rho(A_{C,i})`` for every colour and every other component."""
    D = tuple(sorted(D))
    full = [(float(e) if e is not None else spectral_radius(m), e)
            for m in s.matrices for e in [exact_spectral_radius(m)]]
    for i in range(s.k):
        rd = _component_radius(s, D, i)
        if rd[1] is not None and full[i][1] is not None:
            eq = rd[1] == full[i][1]
        else:
            eq = abs(rd[0] - full[i][0]) <= 1e-9 * full[i][0]
        if not eq:
            raise HypothesisViolation(
                f"rho(A_D,{i + 1}) != rho(A_{i + 1})", "dominant_hereditary_component",
                {"component": s.names(D), "color": i + 1})
        for c in d.nontrivial:
            if tuple(c.vertices) == D:
                continue
            if not _strictly_greater(rd, _component_radius(s, c.vertices, i)):
                raise HypothesisViolation(
                    f"component {s.names(c.vertices)} is {i + 1}-critical", "dominant_hereditary_component",
                    {"component": s.names(c.vertices), "color": i + 1})


def decompose_kms1(s: Skeleton, D: Sequence[int], m_theta, dyn: Dynamics | None = None,
                   d: Decomposition | None = None, ext: ExtensionResult | None = None,
                   tol: float = 1e-9) -> Kms1Decomposition:
    """Split a KMS_1 vertex vector into its dominant part and a part lifted from ``Lambda \\ D``.

    ``a = b * sum_{v in D} m_theta_v``; for ``0 < a < 1``,
    ``kappa = (m_theta - a m_psi) / (1 - a)`` off ``D`` and
    ``epsilon = prod_i (1 - rho(A_i)^{-1} E_i) kappa``.
    """
    if d is None:
        d = decompose(s)
    if dyn is None:
        dyn = preferred_dynamics(s)
    D = tuple(sorted(int(v) for v in D))
    check_dominance(s, D, d)
    if ext is None:
        ext = extend_pf_eigenvector(s, D, d)
    mt = np.asarray(m_theta, dtype=float)
    if (mt < -tol).any() or abs(mt.sum() - 1) > tol:
        raise NotAState("m_theta is not a probability vector", "state", mt.tolist())
    rep = subinvariance_check(s, dyn, mt, 1.0, tol)
    if not rep.ok:
        raise NotAState("m_theta fails subinvariance at beta = 1", "subinvariance", rep.violations[:3])
    a = ext.b * float(mt[list(D)].sum())
    if np.abs(mt[list(D)] - a * ext.x / ext.b).max() > tol:
        raise NotAState("m_theta restricted to D is not a multiple of the Perron-Frobenius vector", "pf_multiple")
    rest = tuple(v for v in range(s.n) if v not in set(D))
    mpsi = ext.m
    if a > 1 + tol:
        raise NotAState(f"a = {a:.15g} exceeds 1", "a_at_most_one", a)
    if a >= 1 - tol:
        if np.abs(mt - mpsi).sum() > 1e3 * tol:
            raise NotAState("a = 1 but m_theta differs from m_psi", "a_one")
        return Kms1Decomposition(1.0, rest, None, None)
    if a <= tol:
        a = 0.0
        kappa = mt[list(rest)]
    else:
        kappa = ((mt - a * mpsi) / (1 - a))[list(rest)]
    if (kappa < -tol).any():
        raise NotAState("kappa has negative entries", "kappa_nonnegative", kappa.tolist())
    rho = [math.exp(r) for r in dyn.r]
    E = [m[np.ix_(list(rest), list(rest))] for m in s.float_matrices()]
    eps = difference_product(E, [1 / p for p in rho], kappa)
    if (eps < -tol).any():
        raise NotAState("epsilon has negative entries", "epsilon_nonnegative", eps.tolist())
    return Kms1Decomposition(a, rest, kappa, eps)
