"""Reference game instances used by the test suite, the verifier and the
sample configs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import GameParams
from .equilibrium import MeanField
from .graphon import DEFAULT_GRID, Graphon, canonicalize_signs, even_cells, from_eigenpairs, from_step_matrix, midpoints

UNIT_PARAMS = GameParams(b=1.0, r=1.0, rho=1.0, sigma=1.0, nu=1.0)


@dataclass(frozen=True)
class Instance:
    name: str
    params: GameParams
    graphon: Graphon
    mean: MeanField


def bump_function(M: int, centers, width: float, baseline: float = 1.0, amplitude: float = 1.0) -> np.ndarray:
    """Unit-norm, everywhere negative function with a dip at each center.

    f = -(baseline + amplitude * sum_c exp(-(a - c)^2 / (2 width^2))), scaled
    to unit midpoint-rule norm. Centers are snapped to the nearest grid
    midpoint so the dips are exactly symmetric on the grid.
    """
    a = midpoints(M)
    raw = np.full(M, float(baseline))
    for c in np.atleast_1d(centers):
        c = (np.floor(c * M) + 0.5) / M
        raw += amplitude * np.exp(-((a - c) ** 2) / (2.0 * width**2))
    raw /= np.sqrt(np.mean(raw**2))
    return -raw


def bump_graphon(M: int, centers, width: float = 0.06, peak: float = 0.8) -> Graphon:
    """Rank-1 graphon lam f f^T with f from :func:`bump_function`; lam is set
    so that the kernel maximum equals ``peak``."""
    f = bump_function(M, centers, width)
    lam = peak / float(np.max(f**2))
    return from_eigenpairs([lam], f[None, :])


def constant_instance(M: int = DEFAULT_GRID, c: float = 0.5, m: float = 1.0, params: GameParams = UNIT_PARAMS) -> Instance:
    g = canonicalize_signs(from_step_matrix([[c]], M))
    return Instance("constant", params, g, MeanField.constant(g, m))


def sbm2_instance(M: int = DEFAULT_GRID) -> Instance:
    params = GameParams(b=1.2, r=0.8, rho=0.6, sigma=0.4, nu=0.7)
    g = canonicalize_signs(from_step_matrix([[0.8, 0.2], [0.2, 0.6]], M))
    return Instance("sbm2", params, g, MeanField.blocks(g, [1.0, -0.5]))


def sbm3_instance(M: int = DEFAULT_GRID) -> Instance:
    params = GameParams(b=0.9, r=1.5, rho=0.4, sigma=0.25, nu=0.3)
    P = [[0.9, 0.3, 0.1], [0.3, 0.7, 0.4], [0.1, 0.4, 0.5]]
    cells = even_cells(M, 3)
    g = canonicalize_signs(from_step_matrix(P, M, block_cells=cells))
    return Instance("sbm3", params, g, MeanField.build(g, np.repeat([2.0, 0.5, -1.0], cells)))


def bump_instance(M: int = DEFAULT_GRID, centers=(0.5,), m: float = 1.0) -> Instance:
    params = GameParams(b=1.0, r=1.0, rho=1.0, sigma=0.5, nu=0.5)
    g = bump_graphon(M, centers)
    name = "bump" if len(centers) == 1 else f"bump{len(centers)}"
    return Instance(name, params, g, MeanField.constant(g, m))


def mixed_sign_instance(M: int = DEFAULT_GRID) -> Instance:
    """g = 0.5 - 0.4 cos(2 pi a) cos(2 pi b), eigenvalues 0.5 and -0.2."""
    a = midpoints(M)
    f = np.vstack([-np.ones(M), np.sqrt(2.0) * np.cos(2 * np.pi * a)])
    g = from_eigenpairs([0.5, -0.2], f)
    params = GameParams(b=1.5, r=2.0, rho=0.8, sigma=0.6, nu=0.4)
    m = 1.0 + 0.3 * np.cos(2 * np.pi * a) + 0.2 * np.sin(2 * np.pi * a)
    return Instance("mixed_sign", params, g, MeanField.build(g, m))


def standard_instances(M: int = DEFAULT_GRID) -> list:
    """The five fixed verification instances."""
    return [
        constant_instance(M),
        sbm2_instance(M),
        sbm3_instance(M),
        bump_instance(M),
        mixed_sign_instance(M),
    ]


def random_instance(rng: np.random.Generator, M: int = DEFAULT_GRID, max_rank: int = 5, lam_max: float = 0.9) -> Instance:
    """Random step graphon with at most ``max_rank`` blocks.

    P = lam_max * U with U symmetric uniform on [0, 1], so every graphon
    eigenvalue lies in [-lam_max, lam_max]. Parameters and the (per-cell)
    initial means are drawn at random as well.
    """
    while True:
        n = int(rng.integers(1, max_rank + 1))
        U = rng.random((n, n))
        P = lam_max * np.triu(U) + lam_max * np.triu(U, 1).T
        try:
            g = from_step_matrix(P, M, block_cells=even_cells(M, n))
        except ValueError:
            continue
        break
    params = GameParams(
        b=float(rng.uniform(0.3, 2.0) * rng.choice([-1.0, 1.0])),
        r=float(rng.uniform(0.2, 3.0)),
        rho=float(rng.uniform(0.1, 2.0)),
        sigma=float(rng.uniform(0.0, 1.0)),
        nu=float(rng.uniform(0.1, 1.5)),
    )
    m = rng.normal(0.0, 1.0, size=M)
    return Instance(f"random{n}", params, g, MeanField.build(g, m))
