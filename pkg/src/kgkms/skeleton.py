"""Finite k-graph skeletons as families of commuting vertex matrices.

Convention: ``matrices[i][v, w]`` counts edges of colour ``i`` with range
``v`` and source ``w`` (row = range, column = source).  Getting this
backwards silently transposes every downstream result, so input documents
use the same convention.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    NegativeEntry,
    NonCommuting,
    NonSquare,
    PathCountOverflow,
    RankMismatch,
    SkeletonError,
)

INT64_MAX = np.iinfo(np.int64).max

SKELETON_DISCLAIMER = (
    "skeleton-level only: commuting vertex matrices are necessary but not "
    "sufficient for a k-graph to exist when k >= 2"
)


@dataclass(frozen=True)
class Skeleton:
    """Validated vertex matrices of a finite k-graph.

    Build through :func:`validate` or :meth:`from_matrices`; the stored
    arrays are read-only.
    """

    vertices: tuple[str, ...]
    matrices: tuple[np.ndarray, ...]
    certified: bool = field(default=False, compare=False)

    @classmethod
    def from_matrices(cls, matrices, vertices=None) -> "Skeleton":
        mats = [np.asarray(m).tolist() for m in matrices]
        n = len(mats[0]) if mats else 0
        if vertices is None:
            vertices = [f"v{i}" for i in range(n)]
        return validate({"k": len(mats), "vertices": list(vertices), "matrices": mats})

    @property
    def k(self) -> int:
        return len(self.matrices)

    @property
    def n(self) -> int:
        return len(self.vertices)

    def index(self, name) -> int:
        if isinstance(name, (int, np.integer)):
            return int(name)
        return self.vertices.index(name)

    def indices(self, names) -> list[int]:
        return [self.index(v) for v in names]

    def names(self, idx) -> list[str]:
        return [self.vertices[i] for i in idx]

    def float_matrices(self) -> list[np.ndarray]:
        return [m.astype(float) for m in self.matrices]

    def union_adjacency(self) -> np.ndarray:
        """Boolean matrix with ``[v, w]`` true when some edge has range v, source w."""
        adj = np.zeros((self.n, self.n), dtype=bool)
        for m in self.matrices:
            adj |= m > 0
        return adj

    def with_certificate(self) -> "Skeleton":
        return Skeleton(self.vertices, self.matrices, certified=True)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "vertices": list(self.vertices),
            "matrices": [m.tolist() for m in self.matrices],
        }


def _as_int_matrix(raw, i: int) -> np.ndarray:
    try:
        rows = [list(r) for r in raw]
    except TypeError:
        raise NonSquare(f"matrix {i + 1} is not a list of rows") from None
    for r in rows:
        for x in r:
            if isinstance(x, bool) or not isinstance(x, (int, np.integer)):
                if isinstance(x, float) and x.is_integer():
                    continue
                raise SkeletonError(f"matrix {i + 1} has non-integer entry {x!r}")
            if abs(int(x)) > INT64_MAX:
                raise SkeletonError(f"matrix {i + 1} has an entry too large for int64")
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise NonSquare(f"matrix {i + 1} is not square")
    return np.array(rows, dtype=np.int64).reshape(n, n)


def commutator_violations(matrices: Sequence[np.ndarray]) -> list[tuple[int, int, int, int]]:
    """Every pair ``(i, j)`` that fails to commute, with its first witness entry."""
    out = []
    exact = [np.array(m, dtype=object) for m in matrices]
    for i in range(len(exact)):
        for j in range(i + 1, len(exact)):
            diff = exact[i].dot(exact[j]) - exact[j].dot(exact[i])
            nz = np.argwhere(diff != 0)
            if len(nz):
                v, w = nz[0]
                out.append((i, j, int(v), int(w)))
    return out


def validate(raw: dict) -> Skeleton:
    """Validate a parsed skeleton document.

    Raises the first structural error found (rank, shape, sign) and, for a
    well-formed family, :class:`NonCommuting` listing every failing pair.
    Commutativity is tested in exact integer arithmetic.
    """
    try:
        k = raw["k"]
        matrices_raw = raw["matrices"]
    except (KeyError, TypeError):
        raise SkeletonError("skeleton document needs 'k' and 'matrices'") from None
    if not isinstance(k, int) or k < 1:
        raise RankMismatch(f"rank k must be a positive integer, got {k!r}")
    if len(matrices_raw) != k:
        raise RankMismatch(f"k={k} but {len(matrices_raw)} matrices supplied")
    mats = [_as_int_matrix(m, i) for i, m in enumerate(matrices_raw)]
    n = mats[0].shape[0]
    vertices = raw.get("vertices")
    if vertices is None:
        vertices = [f"v{i}" for i in range(n)]
    vertices = [str(v) for v in vertices]
    if len(set(vertices)) != len(vertices):
        raise SkeletonError("vertex names must be unique")
    for i, m in enumerate(mats):
        if m.shape != (len(vertices), len(vertices)):
            raise NonSquare(
                f"matrix {i + 1} has shape {m.shape}, expected {len(vertices)}x{len(vertices)}"
            )
        if (m < 0).any():
            v, w = np.argwhere(m < 0)[0]
            raise NegativeEntry(f"matrix {i + 1} has negative entry at ({vertices[v]}, {vertices[w]})")
    bad = commutator_violations(mats)
    if bad:
        raise NonCommuting((i, j, vertices[v], vertices[w]) for i, j, v, w in bad)
    for m in mats:
        m.setflags(write=False)
    return Skeleton(tuple(vertices), tuple(mats))


def load(path) -> Skeleton:
    with open(Path(path), encoding="utf-8") as fh:
        return validate(json.load(fh))


def path_count(s: Skeleton, n: Sequence[int]) -> np.ndarray:
    """``A^n = prod_i A_i^{n_i}``, entry ``[v, w]`` = number of paths v <- w of degree n.

    Computed exactly; raises :class:`PathCountOverflow` rather than wrap.
    """
    n = [int(x) for x in n]
    if len(n) != s.k or any(x < 0 for x in n):
        raise ValueError(f"degree must be {s.k} nonnegative integers")
    out = np.identity(s.n, dtype=np.int64).astype(object)
    for m, e in zip(s.matrices, n):
        mo = m.astype(object)
        for _ in range(e):
            out = out.dot(mo)
    if s.n and max(int(x) for x in out.flat) > INT64_MAX:
        raise PathCountOverflow(f"path counts of degree {tuple(n)} exceed int64")
    return out.astype(np.int64)


@dataclass(frozen=True)
class SourceReport:
    """Per-vertex, per-colour incidence flags.

    ``receives[v][i]``: some colour-i edge has range v.
    ``emits[v][i]``: some colour-i edge has source v.
    A vertex missing ``receives`` in some colour is a source in the
    Kumjian-Pask sense; missing ``emits`` in some colour makes it a sink.
    An absolute source receives no edge at all.
    """

    vertices: tuple[str, ...]
    receives: tuple[tuple[bool, ...], ...]
    emits: tuple[tuple[bool, ...], ...]

    @property
    def sources(self) -> list[str]:
        return [v for v, r in zip(self.vertices, self.receives) if not all(r)]

    @property
    def sinks(self) -> list[str]:
        return [v for v, e in zip(self.vertices, self.emits) if not all(e)]

    @property
    def absolute_sources(self) -> list[str]:
        return [v for v, r in zip(self.vertices, self.receives) if not any(r)]

    @property
    def has_sinks_or_sources(self) -> bool:
        return bool(self.sources or self.sinks)

    def to_dict(self) -> dict:
        return {
            "sources": self.sources,
            "sinks": self.sinks,
            "absolute_sources": self.absolute_sources,
            "receives": {v: list(r) for v, r in zip(self.vertices, self.receives)},
            "emits": {v: list(e) for v, e in zip(self.vertices, self.emits)},
        }


def sinks_sources(s: Skeleton) -> SourceReport:
    receives = tuple(tuple(bool(m[v].any()) for m in s.matrices) for v in range(s.n))
    emits = tuple(tuple(bool(m[:, v].any()) for m in s.matrices) for v in range(s.n))
    return SourceReport(s.vertices, receives, emits)


def absolute_sources(s: Skeleton) -> list[int]:
    return [v for v in range(s.n) if not any(m[v].any() for m in s.matrices)]
