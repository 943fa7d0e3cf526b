"""Finite-population Monte Carlo of the clustered network game.

Agents in cluster l sit at node a_l = (l - 1/2)/n, start from
N(m(a_l), nu^2) and follow the equilibrium feedback
u = -(b/r)(pi x + s(a_l, t)). Their empirical global mean field is

    z^{i,n}_t = (1/n) sum_k g^n_{l,k} (1/|C_k|) sum_{j in C_k} x^j_t

and the discounted cost integrand r u^2 + (x - z^{i,n})^2 is accumulated by
left-endpoint quadrature.

Every agent draws from its own Philox stream keyed by (seed, stream, agent),
so results do not depend on how agents are split across worker threads.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import equilibrium as eq
from .core import GameParams
from .equilibrium import EquilibriumSolution, MeanField
from .errors import GridMismatchError, InvalidSizesError, UnstableStepWarning
from .graphon import Graphon, cell_index

INITIAL_STREAM = 0
NOISE_STREAM = 1
DEFAULT_DT = 1e-3
COST_TRUNCATION = 1e-6


def agent_generator(seed: int, stream: int, agent: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(stream, agent))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True, eq=False)
class PopulationSpec:
    n: int
    cluster_sizes: np.ndarray
    alpha: np.ndarray
    cells: np.ndarray
    weights: np.ndarray
    initial_means: np.ndarray
    x0: np.ndarray
    nu: float
    seed: int
    grid_size: int

    @property
    def N(self) -> int:
        return int(self.cluster_sizes.sum())

    @property
    def cluster_of(self) -> np.ndarray:
        return np.repeat(np.arange(self.n), self.cluster_sizes)

    @property
    def starts(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.cluster_sizes)[:-1]])


def build_population(g: Graphon, n: int, cluster_size, m: MeanField, seed: int, nu: float) -> PopulationSpec:
    """Sample the n-node weight matrix from g and draw the initial states.

    ``cluster_size`` is a single size for every node or one size per node.
    ``nu`` may be zero here (deterministic initial states).
    """
    if n < 1:
        raise InvalidSizesError(f"need at least one node, got n={n}")
    sizes = np.broadcast_to(np.asarray(cluster_size, dtype=int), (n,)).copy()
    if sizes.min() < 1:
        raise InvalidSizesError(f"cluster sizes must be >= 1, got {sizes.tolist()}")
    if nu < 0:
        raise InvalidSizesError(f"nu must be nonnegative, got {nu}")
    alpha = (np.arange(n) + 0.5) / n
    cells = cell_index(alpha, g.M)
    kern = g.kernel()
    weights = kern[np.ix_(cells, cells)]
    means = np.asarray(m.samples)[cells]

    x0 = np.empty(int(sizes.sum()))
    cluster = np.repeat(np.arange(n), sizes)
    for i in range(x0.size):
        x0[i] = means[cluster[i]] + nu * agent_generator(seed, INITIAL_STREAM, i).standard_normal()
    return PopulationSpec(n, sizes, alpha, cells, weights, means, x0, float(nu), int(seed), g.M)


@dataclass(frozen=True, eq=False)
class SimResult:
    spec: PopulationSpec
    times: np.ndarray
    states: np.ndarray
    empirical_z: np.ndarray
    costs: np.ndarray
    dt: float
    T_sim: float
    truncation: float

    def recompute_z(self) -> np.ndarray:
        """Empirical mean field rebuilt from the stored states, shape (S, n)."""
        spec = self.spec
        means = np.add.reduceat(self.states, spec.starts, axis=1) / spec.cluster_sizes
        return means @ spec.weights.T / spec.n

    def cluster_state_means(self) -> np.ndarray:
        return np.add.reduceat(self.states, self.spec.starts, axis=1) / self.spec.cluster_sizes

    def cluster_cost_means(self) -> np.ndarray:
        return np.add.reduceat(self.costs, self.spec.starts) / self.spec.cluster_sizes

    def cluster_cost_se(self) -> np.ndarray:
        out = np.empty(self.spec.n)
        for l, (a, k) in enumerate(zip(self.spec.starts, self.spec.cluster_sizes)):
            chunk = self.costs[a:a + k]
            out[l] = chunk.std(ddof=1) / math.sqrt(k) if k > 1 else float("nan")
        return out


def _fill_noise(gens, out: np.ndarray, workers: int) -> None:
    cols = out.shape[1]

    def fill(lo, hi):
        for i in range(lo, hi):
            out[i] = gens[i].standard_normal(cols)

    N = len(gens)
    if workers <= 1:
        fill(0, N)
        return
    bounds = np.linspace(0, N, workers + 1).astype(int)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(lambda ab: fill(*ab), zip(bounds[:-1], bounds[1:])))


def run(
    spec: PopulationSpec,
    params: GameParams,
    sol: EquilibriumSolution,
    dt: float = DEFAULT_DT,
    T_sim: float | None = None,
    record_every: int = 100,
    workers: int = 1,
    chunk: int = 1024,
) -> SimResult:
    """Euler-Maruyama simulation of every agent under the equilibrium feedback.

    ``T_sim`` defaults to the horizon where exp(-rho T) = 1e-6. States and the
    empirical mean field are stored every ``record_every`` steps.
    """
    if dt <= 0:
        raise InvalidSizesError(f"dt must be positive, got {dt}")
    if spec.grid_size != sol.graphon.M:
        raise GridMismatchError(f"population built on grid {spec.grid_size}, solution on {sol.graphon.M}")
    if T_sim is None:
        T_sim = -math.log(COST_TRUNCATION) / params.rho
    k_gain = params.b2_over_r * sol.pi
    if dt * k_gain > 0.5:
        warnings.warn(f"dt * b^2 pi / r = {dt * k_gain:.3g} exceeds 0.5", UnstableStepWarning, stacklevel=2)

    steps = int(round(T_sim / dt))
    N = spec.N
    cluster = spec.cluster_of
    starts = spec.starts
    sizes = spec.cluster_sizes
    W = spec.weights / spec.n
    b, r, rho, sigma = params.b, params.r, params.rho, params.sigma
    sq_dt = math.sqrt(dt)

    n_rec = steps // record_every + 1
    times = np.arange(n_rec) * record_every * dt
    states = np.empty((n_rec, N))
    emp_z = np.empty((n_rec, spec.n))
    costs = np.zeros(N)

    gens = [agent_generator(spec.seed, NOISE_STREAM, i) for i in range(N)] if sigma > 0 else None
    noise = np.zeros((N, min(chunk, max(steps, 1))))

    x = spec.x0.copy()
    for k in range(steps + 1):
        t = k * dt
        z_nodes = W @ (np.add.reduceat(x, starts) / sizes)
        if k % record_every == 0:
            j = k // record_every
            states[j] = x
            emp_z[j] = z_nodes
        if k == steps:
            break
        s_nodes = eq.eval_s(sol, spec.cells, t)
        u = -(b / r) * (sol.pi * x + s_nodes[cluster])
        dev = x - z_nodes[cluster]
        costs += math.exp(-rho * t) * (r * u * u + dev * dev) * dt
        x = x + b * u * dt
        if gens is not None:
            col = k % noise.shape[1]
            if col == 0:
                _fill_noise(gens, noise[:, : min(noise.shape[1], steps - k)], workers)
            x += sigma * sq_dt * noise[:, col]
    return SimResult(spec, times, states, emp_z, costs, dt, steps * dt, math.exp(-rho * steps * dt))


@dataclass(frozen=True)
class ConvergenceMetrics:
    max_z_error: float
    max_z_se: float
    z_tolerance: float
    z_within_band: bool
    node_mean_cost: list
    node_cost_se: list
    node_analytic_cost: list
    node_cost_error: list
    cost_within_band: list
    max_mean_state_error: float
    truncation: float

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def z_standard_errors(result: SimResult) -> np.ndarray:
    """Monte Carlo standard error of the empirical mean field, shape (S, n)."""
    spec = result.spec
    var = np.empty((result.times.size, spec.n))
    for l, (a, k) in enumerate(zip(spec.starts, spec.cluster_sizes)):
        block = result.states[:, a:a + k]
        var[:, l] = block.var(axis=1, ddof=1) / k if k > 1 else 0.0
    return np.sqrt(var @ (spec.weights.T / spec.n) ** 2)


def analytic_z(result: SimResult, sol: EquilibriumSolution) -> np.ndarray:
    return eq.eval_z(sol, result.spec.cells, result.times)


def compare(result: SimResult, sol: EquilibriumSolution, se_factor: float = 3.0, drift: float = 5.0) -> ConvergenceMetrics:
    """Distance between the finite population and the graphon equilibrium.

    The mean-field band is ``se_factor`` times the largest measured standard
    error plus ``drift * dt``; each node's mean cost is compared with J(a_l)
    within ``se_factor`` standard errors.
    """
    spec = result.spec
    if spec.grid_size != sol.graphon.M:
        raise GridMismatchError(f"population built on grid {spec.grid_size}, solution on {sol.graphon.M}")
    err = np.abs(result.empirical_z - analytic_z(result, sol))
    se = z_standard_errors(result)
    max_err = float(err.max())
    max_se = float(se.max())
    tol = se_factor * max_se + drift * result.dt

    J = eq.cost_full(sol).J[spec.cells]
    mean_cost = result.cluster_cost_means()
    cost_se = result.cluster_cost_se()
    cost_err = np.abs(mean_cost - J)
    mu = eq.mean_state(sol, spec.cells, result.times)
    mu_err = float(np.max(np.abs(result.cluster_state_means() - mu)))
    return ConvergenceMetrics(
        max_z_error=max_err,
        max_z_se=max_se,
        z_tolerance=tol,
        z_within_band=bool(max_err <= tol),
        node_mean_cost=mean_cost.tolist(),
        node_cost_se=cost_se.tolist(),
        node_analytic_cost=J.tolist(),
        node_cost_error=cost_err.tolist(),
        cost_within_band=[bool(e <= se_factor * s) for e, s in zip(cost_err, cost_se)],
        max_mean_state_error=mu_err,
        truncation=result.truncation,
    )
