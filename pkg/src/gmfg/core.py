"""Scalar model coefficients, the discounted Riccati gain and the spectral
scalar functions shared by the rest of the package."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import A1ViolationError, DomainError, InvalidParamsError

# Eigenvalues closer than this to 1 give modes that (numerically) do not decay.
EPS_EIG = 1e-9


@dataclass(frozen=True)
class GameParams:
    """Coefficients of the driftless LQG game.

    b     : control gain (nonzero)
    r     : control-cost weight (> 0)
    rho   : discount rate (> 0)
    sigma : diffusion intensity (>= 0)
    nu    : standard deviation of the initial states (> 0)
    """

    b: float
    r: float
    rho: float
    sigma: float
    nu: float

    def __post_init__(self):
        for name in ("b", "r", "rho", "sigma", "nu"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidParamsError(f"{name} must be finite, got {value!r}")
        if self.b == 0:
            raise InvalidParamsError("b must be nonzero")
        if self.r <= 0:
            raise InvalidParamsError(f"r must be positive, got {self.r}")
        if self.rho <= 0:
            raise InvalidParamsError(f"rho must be positive, got {self.rho}")
        if self.sigma < 0:
            raise InvalidParamsError(f"sigma must be nonnegative, got {self.sigma}")
        if self.nu <= 0:
            raise InvalidParamsError(f"nu must be positive, got {self.nu}")

    @property
    def b2_over_r(self) -> float:
        return self.b * self.b / self.r

    def to_dict(self) -> dict:
        return {"b": self.b, "r": self.r, "rho": self.rho, "sigma": self.sigma, "nu": self.nu}


@dataclass(frozen=True)
class RiccatiGain:
    pi: float

    def residual(self, params: GameParams) -> float:
        """|(b^2/r) pi^2 + rho pi - 1|."""
        return abs(params.b2_over_r * self.pi**2 + params.rho * self.pi - 1.0)


def solve_riccati(params: GameParams) -> RiccatiGain:
    """Positive root of (b^2/r) pi^2 + rho pi = 1.

    The textbook form sqrt(r^2 rho^2 / 4b^4 + r/b^2) - rho r / 2b^2 cancels
    badly when rho^2 r >> b^2, so the algebraically equal form
    2 / (rho + sqrt(rho^2 + 4 b^2/r)) is evaluated instead.
    """
    k = params.b2_over_r
    pi = 2.0 / (params.rho + math.sqrt(params.rho**2 + 4.0 * k))
    return RiccatiGain(pi)


def theta(tau: float, params: GameParams) -> float:
    radicand = 0.25 * params.rho**2 + (1.0 - tau) * params.b2_over_r
    if radicand < 0:
        raise DomainError(f"theta undefined at tau={tau}: radicand {radicand} < 0")
    return math.sqrt(radicand)


def _check_a1(lam: float) -> None:
    if lam >= 1.0 - EPS_EIG:
        raise A1ViolationError(
            f"eigenvalue {lam!r} is not below 1 - {EPS_EIG:g}; the mode would not decay"
        )


def xi(lam: float, params: GameParams) -> float:
    """Decay exponent of the eigen-mode with eigenvalue ``lam``.

    Negative root of x^2 - rho x + (b^2/r)(lam - 1) = 0. Computed as
    (b^2/r)(lam - 1) / (rho/2 + theta(lam)) to avoid cancellation when lam
    is close to 1.
    """
    _check_a1(lam)
    return params.b2_over_r * (lam - 1.0) / (0.5 * params.rho + theta(lam, params))


def lambda_bar(lam: float, params: GameParams) -> float:
    _check_a1(lam)
    return lam / (theta(lam, params) + theta(0.0, params))
