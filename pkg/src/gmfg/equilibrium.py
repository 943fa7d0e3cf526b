"""Closed-form Nash equilibrium of the infinite-horizon LQG graphon game.

Under a finite-rank graphon the coupled mean-field / offset system splits
into independent eigen-modes. Mode l evolves as

    z_l(t) = lam_l <m, f_l> exp(xi_l t),
    s_l(t) = -z_l(t) / (theta(lam_l) + theta(0)),

and the node-level quantities are recovered as sum_l f_l(a) (.)_l(t).

Evaluators take ``alpha_index`` (an int, an index array, or None for the
whole grid) and a scalar or 1-D array of times. The returned array has the
time axis first and the node axis second; scalar arguments drop their axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import core
from .core import GameParams
from .errors import A1ViolationError, A3ViolationError, NegativeTimeError, SizeMismatchError
from .graphon import TOL_MEAN, Graphon, apply

RATE_COLLISION = 1e-12


@dataclass(frozen=True, eq=False)
class MeanField:
    """Initial means m(a_i) on the grid together with <m, f_l>."""

    samples: np.ndarray
    projections: np.ndarray

    @classmethod
    def build(cls, g: Graphon, samples) -> "MeanField":
        samples = np.asarray(samples, dtype=float)
        if samples.ndim == 0:
            samples = np.full(g.M, float(samples))
        if samples.shape != (g.M,):
            raise SizeMismatchError(f"mean field needs {g.M} samples, got shape {samples.shape}")
        samples = samples.copy()
        samples.setflags(write=False)
        proj = g.projections(samples)
        proj.setflags(write=False)
        return cls(samples, proj)

    @classmethod
    def constant(cls, g: Graphon, value: float) -> "MeanField":
        return cls.build(g, np.full(g.M, float(value)))

    @classmethod
    def blocks(cls, g: Graphon, values) -> "MeanField":
        values = np.asarray(values, dtype=float)
        if g.M % values.size:
            raise SizeMismatchError(f"grid size {g.M} is not a multiple of {values.size} blocks")
        return cls.build(g, np.repeat(values, g.M // values.size))


@dataclass(frozen=True, eq=False)
class EquilibriumSolution:
    params: GameParams
    graphon: Graphon
    mean: MeanField
    pi: float
    theta0: float
    theta: np.ndarray
    xi: np.ndarray
    lambda_bar: np.ndarray
    z0: np.ndarray

    @property
    def q_inf(self) -> float:
        return self.params.sigma**2 * self.pi / self.params.rho

    @property
    def kappa(self) -> float:
        """Closed-loop decay rate b^2 pi / r of an individual state."""
        return self.params.b2_over_r * self.pi

    @property
    def rank(self) -> int:
        return self.graphon.rank


def solve(params: GameParams, g: Graphon, m: MeanField) -> EquilibriumSolution:
    if m.samples.shape != (g.M,):
        raise SizeMismatchError("mean field and graphon use different grids")
    max_lam = float(g.eigenvalues.max())
    if max_lam >= 1.0 - core.EPS_EIG:
        raise A1ViolationError(f"largest eigenvalue {max_lam!r} violates lam < 1 - {core.EPS_EIG:g}")
    lams = g.eigenvalues
    return EquilibriumSolution(
        params=params,
        graphon=g,
        mean=m,
        pi=core.solve_riccati(params).pi,
        theta0=core.theta(0.0, params),
        theta=np.array([core.theta(float(x), params) for x in lams]),
        xi=np.array([core.xi(float(x), params) for x in lams]),
        lambda_bar=np.array([core.lambda_bar(float(x), params) for x in lams]),
        z0=lams * m.projections,
    )


def _times(t):
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0):
        raise NegativeTimeError(f"times must be nonnegative, got min {arr.min()}")
    return arr


def _fvals(sol: EquilibriumSolution, alpha_index) -> np.ndarray:
    f = sol.graphon.eigenfunctions
    if alpha_index is None:
        return f
    return f[:, alpha_index]


def _modes(sol, t) -> np.ndarray:
    """exp(xi_l t), shape t.shape + (L,)."""
    return np.exp(np.multiply.outer(t, sol.xi))


def eval_z(sol: EquilibriumSolution, alpha_index, t):
    t = _times(t)
    return (_modes(sol, t) * sol.z0) @ _fvals(sol, alpha_index)


def eval_s(sol: EquilibriumSolution, alpha_index, t):
    t = _times(t)
    coeff = -sol.lambda_bar * sol.mean.projections
    return (_modes(sol, t) * coeff) @ _fvals(sol, alpha_index)


def eval_q(sol: EquilibriumSolution, alpha_index, t):
    """Closed form of q(a, t) = -exp(rho t) int_t^inf Theta(a, u) exp(-rho u) du.

    Theta is a constant plus a quadratic form in exp(xi_l u), so

        q = sigma^2 pi / rho
            + sum_{k,l} (A_k A_l - (b^2/r) C_k C_l) exp((xi_k + xi_l) t)
                        / (theta_k + theta_l)

    with A_l = f_l(a) lam_l <m, f_l> and C_l = f_l(a) lambar_l <m, f_l>.
    """
    t = _times(t)
    f = _fvals(sol, alpha_index)
    f2 = f[:, None] if f.ndim == 1 else f
    A = sol.z0[:, None] * f2
    C = (sol.lambda_bar * sol.mean.projections)[:, None] * f2
    coef = A[:, None, :] * A[None, :, :] - sol.params.b2_over_r * C[:, None, :] * C[None, :, :]
    denom = sol.theta[:, None] + sol.theta[None, :]
    rates = sol.xi[:, None] + sol.xi[None, :]
    w = np.exp(np.multiply.outer(t, rates)) / denom
    out = sol.q_inf + np.einsum("...kl,kln->...n", w, coef)
    return out[..., 0] if f.ndim == 1 else out


def _expm1_ratio(d: np.ndarray, t) -> np.ndarray:
    """(exp(d t) - 1) / d with the d -> 0 limit t."""
    td = np.multiply.outer(t, d)
    safe = np.where(np.abs(d) < RATE_COLLISION, 1.0, d)
    return np.where(np.abs(d) < RATE_COLLISION, np.multiply.outer(t, np.ones_like(d)), np.expm1(td) / safe)


def mean_state(sol: EquilibriumSolution, alpha_index, t):
    """E[x(a, t)] under the equilibrium feedback.

    Solves mu' = -kappa mu - (b^2/r) s(a, t), mu(0) = m(a) by variation of
    constants; s is a sum of exponentials with rates xi_l, so

        mu(t) = e^{-kappa t} [ m(a) - (b^2/r) sum_l S_l (e^{(xi_l + kappa) t} - 1)/(xi_l + kappa) ]

    where s(a, t) = sum_l S_l e^{xi_l t}. Rates with |xi_l + kappa| < 1e-12
    use the limiting t e^{-kappa t} form.
    """
    t = _times(t)
    f = _fvals(sol, alpha_index)
    m0 = sol.mean.samples if alpha_index is None else sol.mean.samples[alpha_index]
    S = -sol.lambda_bar * sol.mean.projections
    forced = (_expm1_ratio(sol.xi + sol.kappa, t) * S) @ f
    decay = np.exp(-sol.kappa * t)
    if np.ndim(forced) > np.ndim(decay):
        decay = decay[..., None]
    return decay * (m0 - sol.params.b2_over_r * forced)


def consistency_residual(sol: EquilibriumSolution, t: float) -> float:
    """max_i |z(a_i, t) - (g o E[x(., t)])(a_i)|."""
    z = eval_z(sol, None, t)
    mu = mean_state(sol, None, t)
    return float(np.max(np.abs(z - apply(sol.graphon, mu))))


# --- equilibrium costs -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CostProfile:
    """Equilibrium cost J(a_i) with its additive decomposition."""

    alpha: np.ndarray
    J: np.ndarray
    term_variance: np.ndarray
    term_mean: np.ndarray
    term_noise: np.ndarray
    term_cross: np.ndarray
    term_quad: np.ndarray

    def terms_sum(self) -> np.ndarray:
        return self.term_variance + self.term_mean + self.term_noise + self.term_cross + self.term_quad

    def rows(self):
        cols = (self.alpha, self.J, self.term_variance, self.term_mean,
                self.term_noise, self.term_cross, self.term_quad)
        return zip(*(c.tolist() for c in cols))


COST_COLUMNS = ("alpha", "J", "term_variance", "term_mean", "term_noise", "term_cross", "term_quad")


def _mode_table(sol, lambda_bar=None):
    lbar = sol.lambda_bar if lambda_bar is None else np.asarray(lambda_bar, dtype=float)
    f = sol.graphon.eigenfunctions
    proj = sol.mean.projections
    # a_l(alpha) and c_l(alpha), shape (L, M)
    a = (sol.graphon.eigenvalues * proj)[:, None] * f
    c = (lbar * proj)[:, None] * f
    return lbar, a, c


def _base_terms(sol, c):
    p = sol.params
    m = sol.mean.samples
    ones = np.ones_like(m)
    return (
        p.nu**2 * sol.pi * ones,
        sol.pi * m**2,
        sol.q_inf * ones,
        -2.0 * m * c.sum(axis=0),
    )


def _assemble(sol, variance, mean, noise, cross, quad) -> CostProfile:
    J = variance + mean + noise + cross + quad
    return CostProfile(sol.graphon.grid, J, variance, mean, noise, cross, quad)


def cost_full(sol: EquilibriumSolution, lambda_bar=None) -> CostProfile:
    """Equilibrium cost from z(a, 0), s(a, 0) and the integrated-by-parts q(a, 0).

    The quadratic part is

        (1/rho) Z^2 - (b^2 / (rho r)) S^2
          + (2/rho) sum_{k,l} (rho/2 - theta_k) / (theta_k + theta_l) D_kl

    where Z = z(a, 0), S = s(a, 0) and D_kl = a_k a_l - (b^2/r) c_k c_l.
    ``lambda_bar`` overrides the mode values of lambda-bar (fault injection).
    """
    p = sol.params
    _, a, c = _mode_table(sol, lambda_bar)
    variance, mean, noise, cross = _base_terms(sol, c)
    Z = a.sum(axis=0)
    S = c.sum(axis=0)
    D = a[:, None, :] * a[None, :, :] - p.b2_over_r * c[:, None, :] * c[None, :, :]
    weight = (0.5 * p.rho - sol.theta)[:, None] / (sol.theta[:, None] + sol.theta[None, :])
    double = (2.0 / p.rho) * np.einsum("kl,kln->n", weight, D)
    quad = Z**2 / p.rho - p.b2_over_r / p.rho * S**2 + double
    return _assemble(sol, variance, mean, noise, cross, quad)


def cost_simplified(sol: EquilibriumSolution) -> CostProfile:
    """Equilibrium cost with the quadratic terms collapsed into one double sum

        sum_{k,l} f_k f_l <m,f_k> <m,f_l> rho / (theta_k + theta_l)
                  * (lam_k lam_l / rho - b^2 lambar_k lambar_l / (rho r)).
    """
    p = sol.params
    lams = sol.graphon.eigenvalues
    lbar, _, c = _mode_table(sol)
    variance, mean, noise, cross = _base_terms(sol, c)
    coeff = (p.rho / (sol.theta[:, None] + sol.theta[None, :])) * (
        np.outer(lams, lams) / p.rho - p.b2_over_r / p.rho * np.outer(lbar, lbar)
    )
    u = sol.mean.projections[:, None] * sol.graphon.eigenfunctions
    quad = np.einsum("kl,kn,ln->n", coeff, u, u)
    return _assemble(sol, variance, mean, noise, cross, quad)


def cost_assembled(sol: EquilibriumSolution, q0=None) -> CostProfile:
    """J = pi (nu^2 + m^2) + 2 s(a, 0) m(a) + q(a, 0), from the evaluators.

    ``q0`` replaces the closed-form q(., 0) (for instance with a quadrature
    value) when given.
    """
    p = sol.params
    m = sol.mean.samples
    s0 = eval_s(sol, None, 0.0)
    q = eval_q(sol, None, 0.0) if q0 is None else np.asarray(q0, dtype=float)
    ones = np.ones_like(m)
    return _assemble(
        sol,
        p.nu**2 * sol.pi * ones,
        sol.pi * m**2,
        sol.q_inf * ones,
        2.0 * s0 * m,
        q - sol.q_inf,
    )


@dataclass(frozen=True, eq=False)
class ConstantMeanCost:
    """Cost under constant initial means together with the derived graphons.

    ``gbar_degree`` is int gbar(a, b) db with gbar = sum_k lambar_k f_k f_k,
    ``gtilde_degree`` is int gtilde(a, b | a) db and ``lambda_tilde[k, i]``
    the node-dependent eigenvalue of gtilde at a_i.
    """

    profile: CostProfile
    m: float
    constant: float
    gbar_degree: np.ndarray
    gtilde_degree: np.ndarray
    lambda_tilde: np.ndarray

    @property
    def J(self) -> np.ndarray:
        return self.profile.J


def cost_constant_mean(sol: EquilibriumSolution) -> ConstantMeanCost:
    samples = sol.mean.samples
    m = float(samples.mean())
    if np.max(np.abs(samples - m)) > TOL_MEAN or m == 0.0:
        raise A3ViolationError("initial means must be a nonzero constant")
    p = sol.params
    g = sol.graphon
    lams = g.eigenvalues
    lbar = sol.lambda_bar
    f = g.eigenfunctions
    ones = g.ones_projections()

    gbar_degree = (lbar * ones) @ f
    coeff = -(p.rho / (sol.theta[:, None] + sol.theta[None, :])) * (
        np.outer(lams, lams) / p.rho - p.b2_over_r / p.rho * np.outer(lbar, lbar)
    )
    # lambda_tilde[k, i] = sum_l f_l(a_i) <1, f_l> coeff[k, l]
    lambda_tilde = coeff @ (ones[:, None] * f)
    gtilde_degree = np.sum(lambda_tilde * ones[:, None] * f, axis=0)

    constant = sol.pi * (p.nu**2 + m**2 + p.sigma**2 / p.rho)
    unit = np.ones(g.M)
    profile = _assemble(
        sol,
        p.nu**2 * sol.pi * unit,
        sol.pi * m**2 * unit,
        sol.q_inf * unit,
        -2.0 * m**2 * gbar_degree,
        -(m**2) * gtilde_degree,
    )
    return ConstantMeanCost(profile, m, constant, gbar_degree, gtilde_degree, lambda_tilde)


# --- ODE residuals -----------------------------------------------------------


def _derivative(fn, t: float, h: float):
    if t >= h:
        return (fn(t + h) - fn(t - h)) / (2.0 * h)
    return (-3.0 * fn(t) + 4.0 * fn(t + h) - fn(t + 2.0 * h)) / (2.0 * h)


def ode_residuals(sol: EquilibriumSolution, times, h: float = 1e-5) -> dict:
    """Finite-difference residuals of the z, s and q equations.

    Central differences with step ``h`` (second-order one-sided near t = 0),
    evaluated at every grid node and every time. Returns the maximum absolute
    residual of each equation plus the per-time table.
    """
    p = sol.params
    k = p.b2_over_r
    table = []
    for t in np.atleast_1d(np.asarray(times, dtype=float)):
        t = float(t)
        z = eval_z(sol, None, t)
        s = eval_s(sol, None, t)
        q = eval_q(sol, None, t)
        dz = _derivative(lambda u: eval_z(sol, None, u), t, h)
        ds = _derivative(lambda u: eval_s(sol, None, u), t, h)
        dq = _derivative(lambda u: eval_q(sol, None, u), t, h)
        rz = dz + k * sol.pi * z + k * apply(sol.graphon, s)
        rs = ds - (k * sol.pi + p.rho) * s - z
        rq = dq + p.sigma**2 * sol.pi - k * s**2 - p.rho * q + z**2
        table.append({
            "t": t,
            "z": float(np.max(np.abs(rz))),
            "s": float(np.max(np.abs(rs))),
            "q": float(np.max(np.abs(rq))),
        })
    return {
        "max_z": max(r["z"] for r in table),
        "max_s": max(r["s"] for r in table),
        "max_q": max(r["q"] for r in table),
        "table": table,
    }


def steady_state_residual(sol: EquilibriumSolution) -> float:
    """Norm of (I - g) applied to the terminal offset s(., inf) = 0."""
    s_inf = np.zeros(sol.graphon.M)
    return float(np.max(np.abs(s_inf - apply(sol.graphon, s_inf))))


def decay_horizon(sol: EquilibriumSolution, factor: float = 50.0) -> float:
    """factor / min_l |xi_l|: a time by which every mode has died out."""
    return factor / float(np.min(np.abs(sol.xi)))
