"""Spectral radii, Perron-Frobenius vectors, criticality and rational independence."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Sequence

import numpy as np

from .errors import ConvergenceFailure, VerificationFailed
from .skeleton import Skeleton
from .structure import Decomposition, decompose, is_irreducible, tarjan_scc

CRITICAL_RTOL = 1e-9
PF_RESIDUAL_TOL = 1e-10
CF_MAX_DENOMINATOR = 10**4  # a chance match within 1e-12 needs q near 10**6


# -- spectral radius -----------------------------------------------------

def _collatz_wielandt(m: np.ndarray, x: np.ndarray) -> tuple[float, float]:
    mx = m @ x
    ratios = mx / x
    return float(ratios.min()), float(ratios.max())


def _irreducible_radius(m: np.ndarray, tol: float, max_iter: int) -> tuple[float, np.ndarray]:
    """Perron root and positive eigenvector of an irreducible block.

    Seeded from a dense eigen-solve, then polished by power iteration on
    ``I + M`` (primitive, so the iteration converges) until the
    Collatz-Wielandt bracket closes to ``tol`` relative.
    """
    n = m.shape[0]
    if n == 1:
        return float(m[0, 0]), np.ones(1)
    vals, vecs = np.linalg.eig(m)
    i = int(np.argmax(vals.real))
    x = np.abs(vecs[:, i].real)
    if not np.all(x > 0) or not np.isfinite(x).all():
        x = np.ones(n)
    x = np.maximum(x, 1e-300)
    x /= x.sum()
    shifted = m + np.eye(n)
    lo, hi = _collatz_wielandt(m, x)
    for _ in range(max_iter):
        if hi - lo <= tol * max(hi, 1e-300):
            break
        x = shifted @ x
        x /= x.sum()
        lo, hi = _collatz_wielandt(m, x)
    else:
        if hi - lo > 1e3 * tol * max(hi, 1e-300):
            raise ConvergenceFailure(
                f"Perron root bracket [{lo:.17g}, {hi:.17g}] did not close after {max_iter} iterations"
            )
    return 0.5 * (lo + hi), x


def spectral_radius(m, tol: float = 1e-12, max_iter: int = 100000) -> float:
    """Largest eigenvalue modulus of a nonnegative square matrix.

    Reduces to the strongly connected blocks; trivial blocks contribute 0.
    """
    m = np.asarray(m, dtype=float)
    if m.size == 0:
        return 0.0
    best = 0.0
    for comp in tarjan_scc(m > 0):
        if len(comp) == 1 and m[comp[0], comp[0]] == 0:
            continue
        block = m[np.ix_(comp, comp)]
        best = max(best, _irreducible_radius(block, tol, max_iter)[0])
    return best


def _rational_nullspace(m: Sequence[Sequence[int]]) -> list[list[Fraction]]:
    """Basis of the right nullspace over Q by exact Gaussian elimination."""
    rows = [[Fraction(int(x)) for x in r] for r in m]
    n = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -rows[i][f]
        basis.append(v)
    return basis


def _exact_irreducible_radius(block: np.ndarray) -> int | None:
    if block.shape[0] == 1:
        return int(block[0, 0])
    rs = block.sum(axis=1)
    if (rs == rs[0]).all():
        return int(rs[0])
    cs = block.sum(axis=0)
    if (cs == cs[0]).all():
        return int(cs[0])
    approx = _irreducible_radius(block.astype(float), 1e-13, 20000)[0]
    cand = int(round(approx))
    if abs(approx - cand) > 1e-6 * max(1.0, approx):
        return None
    # a strictly positive rational eigenvector certifies the Perron root
    shifted = (cand * np.eye(block.shape[0], dtype=np.int64) - block).tolist()
    basis = _rational_nullspace(shifted)
    if len(basis) != 1:
        return None
    v = basis[0]
    if all(x > 0 for x in v) or all(x < 0 for x in v):
        return cand
    return None


def exact_spectral_radius(m) -> int | None:
    """Integer spectral radius with an exact certificate, or ``None``.

    Per irreducible block: constant row or column sums, or a rounded
    candidate confirmed by a strictly positive rational eigenvector.
    """
    m = np.asarray(m)
    if m.size == 0:
        return 0
    if not np.issubdtype(m.dtype, np.integer):
        return None
    exact, inexact = [], []
    for comp in tarjan_scc(m > 0):
        if len(comp) == 1 and m[comp[0], comp[0]] == 0:
            exact.append(0)
            continue
        block = m[np.ix_(comp, comp)]
        e = _exact_irreducible_radius(block)
        if e is None:
            inexact.append(spectral_radius(block))
        else:
            exact.append(e)
    top = max(exact) if exact else None
    if not inexact:
        return top
    if top is not None and top > max(inexact) * (1 + 1e-6):
        return top
    return None


def coordinatewise_irreducible(matrices: Sequence[np.ndarray]) -> bool:
    return all(is_irreducible(m) for m in matrices)


def common_pf_vector(matrices: Sequence[np.ndarray], tol: float = PF_RESIDUAL_TOL) -> tuple[np.ndarray, tuple[float, ...]]:
    """Common unimodular Perron-Frobenius vector of a commuting irreducible family.

    Computed from ``sum_i A_i`` and verified against every ``A_i``; the
    residual ``||A_i x - rho_i x||_1`` is measured relative to ``max(1, rho_i)``.
    """
    mats = [np.asarray(m, dtype=float) for m in matrices]
    total = sum(mats)
    _, x = _irreducible_radius(total, 1e-15, 100000)
    x = x / x.sum()
    rhos = []
    for i, m in enumerate(mats):
        rho = spectral_radius(m)
        res = float(np.abs(m @ x - rho * x).sum())
        if res > tol * max(1.0, rho) or not (x > 0).all():
            raise VerificationFailed(i, res)
        rhos.append(rho)
    return x, tuple(rhos)


# -- rational independence -----------------------------------------------

def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division (radii here are small)."""
    n = int(n)
    if n < 1:
        raise ValueError("factorize expects a positive integer")
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass(frozen=True)
class Verdict:
    """Outcome of a rational-independence test of ``{ln x_i}``.

    ``status`` is ``independent``, ``dependent`` or ``unknown``;
    ``authoritative`` is false for the floating-point heuristic.
    """

    status: str
    authoritative: bool
    method: str
    witness: dict | None = None

    @property
    def independent(self) -> bool | None:
        if self.status == "unknown":
            return None
        return self.status == "independent"

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "authoritative": self.authoritative,
            "method": self.method,
            "witness": self.witness,
        }


def _pair_verdict(m: int, n: int) -> Verdict:
    if m == 1 or n == 1:
        # ln 1 = 0, so any family containing it is dependent
        k = n if m == 1 else m
        c, d = (0, 1) if m == 1 else (1, 0)
        if m == n == 1:
            k, c, d = 1, 1, 1
        return Verdict("dependent", True, "prime_factorization", {"k": k, "c": c, "d": d})
    fm, fn = factorize(m), factorize(n)
    if set(fm) != set(fn):
        return Verdict("independent", True, "prime_factorization")
    gm = reduce(math.gcd, fm.values())
    gn = reduce(math.gcd, fn.values())
    if any(fm[p] // gm != fn[p] // gn for p in fm):
        return Verdict("independent", True, "prime_factorization")
    g = math.gcd(gm, gn)
    base = 1
    for p, e in fm.items():
        base *= p ** (e // gm)
    k = base ** g
    return Verdict("dependent", True, "prime_factorization", {"k": k, "c": gm // g, "d": gn // g})


def _rank_over_q(rows: list[list[int]]) -> int:
    if not rows or not rows[0]:
        return 0
    n = len(rows[0])
    return n - len(_rational_nullspace(rows))


def _continued_fraction_dependent(x: float, y: float, depth: int = 40, tol: float = 1e-12):
    """Look for small p/q with ``x/y ~ p/q`` among the first ``depth`` convergents."""
    ratio = x / y
    h0, h1, k0, k1 = 0, 1, 1, 0
    t = ratio
    for _ in range(depth):
        a = math.floor(t)
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        if abs(ratio - h1 / k1) <= tol * max(1.0, abs(ratio)) and k1 <= CF_MAX_DENOMINATOR:
            return h1, k1
        frac = t - a
        if frac < 1e-15:
            break
        t = 1 / frac
    return None


def _as_exact_int(x) -> int | None:
    if isinstance(x, bool):
        return None
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)) and float(x).is_integer():
        return int(x)
    return None


def rational_independence(values: Sequence) -> Verdict:
    """Decide whether ``{ln x_i}`` is rationally independent.

    Positive integers are decided exactly: a pair by comparing prime
    exponent vectors, larger families by the rank over Q of the exponent
    matrix.  Other inputs get a continued-fraction scan of each pairwise
    log ratio, marked non-authoritative.
    """
    vals = list(values)
    if not vals:
        return Verdict("independent", True, "empty")
    ints = [_as_exact_int(v) for v in vals]
    if all(i is not None and i >= 1 for i in ints):
        if len(ints) == 1:
            if ints[0] == 1:
                return Verdict("dependent", True, "prime_factorization", {"zero_log": 0})
            return Verdict("independent", True, "prime_factorization")
        if len(ints) == 2:
            return _pair_verdict(ints[0], ints[1])
        facs = [factorize(v) for v in ints]
        primes = sorted({p for f in facs for p in f})
        mat = [[f.get(p, 0) for p in primes] for f in facs]
        # independence of the values is independence of the exponent rows
        rank = _rank_over_q([list(col) for col in zip(*mat)]) if primes else 0
        if rank == len(ints):
            return Verdict("independent", True, "exponent_rank")
        return Verdict("dependent", True, "exponent_rank", {"rank": rank})
    if any(float(v) <= 0 for v in vals):
        raise ValueError("rational_independence expects positive values")
    logs = [math.log(float(v)) for v in vals]
    if any(abs(l) < 1e-15 for l in logs):
        return Verdict("dependent", False, "continued_fraction", {"zero_log": True})
    for i in range(len(logs)):
        for j in range(i + 1, len(logs)):
            hit = _continued_fraction_dependent(logs[i], logs[j])
            if hit is not None:
                return Verdict("dependent", False, "continued_fraction",
                               {"pair": [i, j], "p": hit[0], "q": hit[1]})
    status = "independent" if len(vals) <= 2 else "unknown"
    return Verdict(status, False, "continued_fraction")


def brute_force_dependent(m: int, n: int, bound: int = 10) -> bool:
    """``m^a == n^b`` for some ``0 <= a, b <= bound`` not both zero."""
    for a in range(bound + 1):
        for b in range(bound + 1):
            if (a or b) and m ** a == n ** b:
                return True
    return False


# -- summary --------------------------------------------------------------

def _close(a: float, b: float, ea, eb, rtol: float) -> tuple[bool, bool]:
    """(equal, near_tie) using exact integers when both are known."""
    if ea is not None and eb is not None:
        return ea == eb, False
    scale = max(abs(a), abs(b), 1e-300)
    diff = abs(a - b) / scale
    return diff <= rtol, rtol < diff <= 1e-6


@dataclass
class SpectralSummary:
    vertices: tuple[str, ...]
    rho: tuple[float, ...]
    rho_exact: tuple
    components: list[tuple[int, ...]]
    rho_C: dict
    rho_C_exact: dict
    irreducible: dict
    pf_vectors: dict
    critical: dict
    K: dict
    independence: Verdict
    warnings: list = field(default_factory=list)

    def component_index(self, C) -> int:
        C = tuple(sorted(int(v) for v in C))
        return self.components.index(C)

    def to_dict(self) -> dict:
        name = lambda idx: [self.vertices[i] for i in idx]
        comps = []
        for ci, C in enumerate(self.components):
            pf = self.pf_vectors.get(ci)
            comps.append({
                "vertices": name(C),
                "rho": [float(v) for v in self.rho_C[ci]],
                "coordinatewise_irreducible": self.irreducible[ci],
                "pf_vector": None if pf is None else [float(v) for v in pf],
                "critical": [j + 1 for j in sorted(self.K[ci])],
            })
        return {
            "rho": [float(v) for v in self.rho],
            "rho_exact": list(self.rho_exact),
            "components": comps,
            "independence": self.independence.to_dict(),
            "warnings": list(self.warnings),
        }


def summarize(s: Skeleton, d: Decomposition | None = None) -> SpectralSummary:
    if d is None:
        d = decompose(s)
    rho = tuple(spectral_radius(m) for m in s.matrices)
    rho_exact = tuple(exact_spectral_radius(m) for m in s.matrices)
    comps, rC, rCe, irr, pfs, crit, K = [], {}, {}, {}, {}, {}, {}
    notes = []
    for c in d.nontrivial:
        ci = len(comps)
        comps.append(tuple(c.vertices))
        idx = list(c.vertices)
        blocks = [m[np.ix_(idx, idx)] for m in s.matrices]
        rC[ci] = tuple(spectral_radius(b) for b in blocks)
        rCe[ci] = tuple(exact_spectral_radius(b) for b in blocks)
        irr[ci] = coordinatewise_irreducible(blocks)
        pfs[ci] = common_pf_vector(blocks)[0] if irr[ci] else None
        K[ci] = set()
        for j in range(s.k):
            eq, near = _close(rC[ci][j], rho[j], rCe[ci][j], rho_exact[j], CRITICAL_RTOL)
            crit[(ci, j)] = eq
            if eq:
                K[ci].add(j)
            if near:
                msg = (f"near-tie in criticality of {s.names(idx)} for colour {j + 1}: "
                       f"{rC[ci][j]!r} vs {rho[j]!r}")
                notes.append(msg)
                warnings.warn(msg, stacklevel=2)
    ind_input = [e if e is not None else r for e, r in zip(rho_exact, rho)]
    if any(r <= 0 for r in rho):
        verdict = Verdict("unknown", False, "nonpositive_radius")
    else:
        verdict = rational_independence(ind_input)
    return SpectralSummary(s.vertices, rho, rho_exact, comps, rC, rCe, irr, pfs, crit, K, verdict, notes)


def critical_components(summary: SpectralSummary) -> dict[int, list[int]]:
    """For each colour ``j`` the indices of ``j``-critical components."""
    k = len(summary.rho)
    return {j: [ci for ci in range(len(summary.components)) if summary.critical[(ci, j)]] for j in range(k)}
