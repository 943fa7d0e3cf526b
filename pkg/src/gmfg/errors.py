"""Exception types raised by the solver.

Every error carries a short machine-readable ``code`` so the CLI can emit
structured error documents.
"""

from __future__ import annotations


class GMFGError(ValueError):
    code = "gmfg-error"


class InvalidParamsError(GMFGError):
    code = "invalid-params"


class DomainError(GMFGError):
    code = "domain-error"


class A1ViolationError(GMFGError):
    code = "a1-violation"


class A3ViolationError(GMFGError):
    code = "a3-violation"


class AsymmetricMatrixError(GMFGError):
    code = "asymmetric-matrix"


class EntryOutOfRangeError(GMFGError):
    code = "entry-out-of-range"


class RankZeroError(GMFGError):
    code = "rank-zero"


class OrthonormalityError(GMFGError):
    code = "orthonormality-violation"


class RangeViolationError(GMFGError):
    code = "range-violation"


class SizeMismatchError(GMFGError):
    code = "size-mismatch"


class NegativeTimeError(GMFGError):
    code = "negative-time"


class ProfileTooShortError(GMFGError):
    code = "profile-too-short"


class InvalidSizesError(GMFGError):
    code = "invalid-sizes"


class GridMismatchError(GMFGError):
    code = "grid-mismatch"


class ConfigError(GMFGError):
    code = "config-error"


class UnstableStepWarning(RuntimeWarning):
    """Euler step is large relative to the closed-loop decay rate."""
