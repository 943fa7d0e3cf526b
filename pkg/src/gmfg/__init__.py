"""Closed-form equilibria of infinite-horizon LQG graphon mean field games."""

from .core import GameParams, RiccatiGain, lambda_bar, solve_riccati, theta, xi
from .equilibrium import (
    EquilibriumSolution,
    MeanField,
    cost_assembled,
    cost_constant_mean,
    cost_full,
    cost_simplified,
    consistency_residual,
    eval_q,
    eval_s,
    eval_z,
    mean_state,
    solve,
)
from .errors import GMFGError
from .graphon import Graphon, check_assumptions, degree_profile, from_eigenpairs, from_step_matrix

__version__ = "0.1.0"

__all__ = [
    "GameParams",
    "RiccatiGain",
    "solve_riccati",
    "theta",
    "xi",
    "lambda_bar",
    "Graphon",
    "from_eigenpairs",
    "from_step_matrix",
    "degree_profile",
    "check_assumptions",
    "MeanField",
    "EquilibriumSolution",
    "solve",
    "eval_z",
    "eval_s",
    "eval_q",
    "mean_state",
    "consistency_residual",
    "cost_full",
    "cost_simplified",
    "cost_assembled",
    "cost_constant_mean",
    "GMFGError",
]
