"""Exception hierarchy.

Every error carries a machine-readable ``code`` and the CLI exit status it
maps to: 1 for invalid input, 2 for violated hypotheses, 3 for failed
numerical verification.
"""

from __future__ import annotations


class KgkmsError(Exception):
    code = "error"
    exit_code = 1

    def to_dict(self):
        return {"code": self.code, "message": str(self)}


# -- invalid input -------------------------------------------------------

class InvalidInput(KgkmsError):
    code = "invalid_input"
    exit_code = 1


class SkeletonError(InvalidInput):
    code = "invalid_skeleton"


class RankMismatch(SkeletonError):
    code = "rank_mismatch"


class NonSquare(SkeletonError):
    code = "non_square"


class NegativeEntry(SkeletonError):
    code = "negative_entry"


class NonCommuting(SkeletonError):
    """Raised with every violated pair ``(i, j, v, w)`` in ``violations``."""

    code = "non_commuting"

    def __init__(self, violations):
        self.violations = list(violations)
        parts = ", ".join(
            f"A{i + 1}A{j + 1} != A{j + 1}A{i + 1} at ({v}, {w})"
            for i, j, v, w in self.violations
        )
        super().__init__(f"vertex matrices do not commute: {parts}")

    def to_dict(self):
        d = super().to_dict()
        d["violations"] = [
            {"i": i, "j": j, "row": v, "col": w} for i, j, v, w in self.violations
        ]
        return d


class PathCountOverflow(InvalidInput, OverflowError):
    code = "path_count_overflow"


class BoundExceeded(InvalidInput):
    code = "bound_exceeded"


class ConcreteGraphError(InvalidInput):
    code = "invalid_concrete_graph"


class NotBijective(ConcreteGraphError):
    code = "not_bijective"


class EndpointMismatch(ConcreteGraphError):
    code = "endpoint_mismatch"


class NotComposable(ConcreteGraphError):
    code = "not_composable"


# -- hypotheses ----------------------------------------------------------

class HypothesisViolation(KgkmsError):
    """A theorem's hypothesis fails; ``witness`` names where."""

    code = "hypothesis_violation"
    exit_code = 2

    def __init__(self, message, hypothesis=None, witness=None):
        super().__init__(message)
        self.hypothesis = hypothesis
        self.witness = witness

    def to_dict(self):
        d = super().to_dict()
        d["hypothesis"] = self.hypothesis
        d["witness"] = self.witness
        return d


class AssumptionFailed(HypothesisViolation):
    code = "assumption_failed"

    def __init__(self, tag, witness=None, message=None):
        super().__init__(message or f"assumption {tag!r} failed", tag, witness)
        self.tag = tag


class CycleGraph(HypothesisViolation):
    code = "cycle_graph"


class Subcritical(HypothesisViolation):
    code = "subcritical"

    def __init__(self, coordinate, message=None):
        super().__init__(
            message or f"beta*r_{coordinate + 1} does not exceed ln rho on coordinate {coordinate + 1}",
            "strict_supercriticality",
            coordinate,
        )
        self.coordinate = coordinate


class NotHereditary(HypothesisViolation):
    code = "not_hereditary"


class NotAState(HypothesisViolation):
    code = "not_a_state"


# -- numerics ------------------------------------------------------------

class NumericalFailure(KgkmsError):
    code = "numerical_failure"
    exit_code = 3


class ConvergenceFailure(NumericalFailure):
    code = "convergence_failure"


class VerificationFailed(NumericalFailure):
    code = "verification_failed"

    def __init__(self, coordinate, residual):
        super().__init__(
            f"common Perron-Frobenius vector fails for coordinate {coordinate + 1}: residual {residual:.3e}"
        )
        self.coordinate = coordinate
        self.residual = residual


class TailBoundFailure(NumericalFailure):
    code = "tail_bound_failure"
