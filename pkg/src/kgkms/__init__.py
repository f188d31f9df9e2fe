"""KMS states of Toeplitz algebras of finite reducible higher-rank graphs."""

from .errors import HypothesisViolation, KgkmsError, NumericalFailure
from .skeleton import Skeleton, load, validate

__version__ = "0.1.0"

__all__ = ["HypothesisViolation", "KgkmsError", "NumericalFailure", "Skeleton", "load", "validate"]
