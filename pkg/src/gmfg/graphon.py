"""Finite-rank graphons sampled on a uniform midpoint grid of [0, 1].

A graphon is stored through its spectral data: nonzero eigenvalues and the
grid samples of the matching orthonormal eigenfunctions. All integrals over
[0, 1] use the midpoint rule <u, v> = (1/M) sum_i u(a_i) v(a_i), which is
exact for step functions whose blocks are unions of grid cells.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import core
from .core import GameParams
from .errors import (
    AsymmetricMatrixError,
    EntryOutOfRangeError,
    OrthonormalityError,
    RangeViolationError,
    RankZeroError,
    SizeMismatchError,
)
from .linalg import jacobi_eigh

DEFAULT_GRID = 512
TOL_ORTH = 1e-8
TOL_RANGE = 1e-8
TOL_INNER = 1e-12
TOL_MEAN = 1e-12
TOL_A5 = 1e-9
EIG_DROP = 1e-12


def midpoints(M: int) -> np.ndarray:
    return (np.arange(M) + 0.5) / M


def inner(u, v) -> float:
    """Midpoint-rule approximation of the L2[0,1] inner product."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return float(np.dot(u, v) / u.shape[-1])


def cell_index(alpha, M: int):
    """Grid cell containing ``alpha`` (nearest-cell / step semantics)."""
    idx = np.floor(np.asarray(alpha, dtype=float) * M).astype(int)
    return np.clip(idx, 0, M - 1)


@dataclass(frozen=True, eq=False)
class Graphon:
    """Spectral representation g(a, b) = sum_l lam_l f_l(a) f_l(b).

    ``eigenfunctions`` has shape (L, M); row l holds f_l at the grid midpoints.
    ``step_blocks`` is the number of blocks when the graphon was built from a
    step matrix, and None for general (possibly smooth) eigenfunctions.
    """

    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray
    step_blocks: int | None = None
    a1_flag: bool = field(default=True)

    def __post_init__(self):
        self.eigenvalues.setflags(write=False)
        self.eigenfunctions.setflags(write=False)

    @property
    def rank(self) -> int:
        return int(self.eigenvalues.shape[0])

    @property
    def M(self) -> int:
        return int(self.eigenfunctions.shape[1])

    @property
    def grid(self) -> np.ndarray:
        return midpoints(self.M)

    @property
    def is_step(self) -> bool:
        return self.step_blocks is not None

    def kernel(self) -> np.ndarray:
        """Reconstructed kernel on the grid, shape (M, M)."""
        f = self.eigenfunctions
        return (f.T * self.eigenvalues) @ f

    def projections(self, v) -> np.ndarray:
        """<v, f_l> for every mode."""
        v = np.asarray(v, dtype=float)
        if v.shape[-1] != self.M:
            raise SizeMismatchError(f"expected {self.M} grid samples, got {v.shape[-1]}")
        return v @ self.eigenfunctions.T / self.M

    def ones_projections(self) -> np.ndarray:
        """<1, f_l> for every mode."""
        return self.eigenfunctions.mean(axis=1)


def _gram(f: np.ndarray) -> np.ndarray:
    return f @ f.T / f.shape[1]


def _validate(lams: np.ndarray, f: np.ndarray) -> None:
    gram = _gram(f)
    err = np.max(np.abs(gram - np.eye(len(lams)))) if len(lams) else 0.0
    if err > TOL_ORTH:
        raise OrthonormalityError(f"eigenfunctions are not orthonormal: max Gram error {err:.3e}")
    if np.any(np.abs(lams) > 1.0 + TOL_RANGE):
        raise RangeViolationError(f"eigenvalue magnitude exceeds 1: {lams}")
    kern = (f.T * lams) @ f
    lo, hi = kern.min(), kern.max()
    if lo < -TOL_RANGE or hi > 1.0 + TOL_RANGE:
        raise RangeViolationError(
            f"reconstructed kernel leaves [0, 1]: min {lo:.3e}, max {hi:.3e}"
        )


def from_eigenpairs(lambdas, eigenfunctions, M: int | None = None, step_blocks: int | None = None) -> Graphon:
    """Build a graphon from eigenvalues and eigenfunction grid samples.

    Eigenvalues at or above 1 - EPS_EIG are accepted but recorded in
    ``a1_flag`` so that assumption conflicts can still be explored; the
    equilibrium solver refuses them.
    """
    lams = np.atleast_1d(np.asarray(lambdas, dtype=float)).copy()
    f = np.atleast_2d(np.asarray(eigenfunctions, dtype=float)).copy()
    if M is not None and f.shape[1] != M:
        raise SizeMismatchError(f"eigenfunction samples have length {f.shape[1]}, expected {M}")
    if f.shape[0] != lams.shape[0]:
        raise SizeMismatchError(f"{lams.shape[0]} eigenvalues but {f.shape[0]} eigenfunctions")
    if lams.size == 0:
        raise RankZeroError("graphon needs at least one nonzero eigenvalue")
    if np.any(lams == 0.0):
        raise RankZeroError("eigenvalues must be nonzero")
    _validate(lams, f)
    a1 = bool(np.all(lams < 1.0 - core.EPS_EIG))
    return Graphon(lams, f, step_blocks=step_blocks, a1_flag=a1)


def from_step_matrix(P, M: int = DEFAULT_GRID, block_cells=None) -> Graphon:
    """Step-function graphon of an n x n block matrix.

    With equal blocks, block l covers [(l-1)/n, l/n): graphon eigenvalues are
    the matrix eigenvalues divided by n and each eigenfunction equals
    sqrt(n) (v)_l on block l, v being the unit matrix eigenvector.

    ``block_cells`` optionally gives the number of grid cells in each block
    (summing to M) for blocks of unequal width w_l. The operator is then
    diagonalised through W^(1/2) P W^(1/2) with W = diag(w), and the
    eigenfunction on block l is u_l / sqrt(w_l).
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    n = P.shape[0]
    if P.shape != (n, n):
        raise AsymmetricMatrixError(f"step matrix must be square, got {P.shape}")
    if not np.allclose(P, P.T, rtol=0.0, atol=1e-12):
        raise AsymmetricMatrixError("step matrix is not symmetric")
    if P.min() < 0.0 or P.max() > 1.0:
        raise EntryOutOfRangeError(f"step matrix entries must lie in [0, 1], got [{P.min()}, {P.max()}]")
    if block_cells is None:
        if M % n:
            raise SizeMismatchError(f"grid size {M} is not a multiple of {n} blocks")
        cells = np.full(n, M // n)
    else:
        cells = np.asarray(block_cells, dtype=int)
        if cells.shape != (n,) or cells.min() < 1 or cells.sum() != M:
            raise SizeMismatchError(f"block_cells must be {n} positive counts summing to {M}")
    P = 0.5 * (P + P.T)
    sw = np.sqrt(cells / M)
    w, v = jacobi_eigh(sw[:, None] * P * sw[None, :])
    keep = np.abs(w) > EIG_DROP
    if not keep.any():
        raise RankZeroError("step matrix has no nonzero eigenvalues")
    f = np.repeat((v[:, keep] / sw[:, None]).T, cells, axis=1)
    return from_eigenpairs(w[keep], f, step_blocks=n)


def even_cells(M: int, n: int) -> np.ndarray:
    """Split M grid cells into n nearly equal contiguous blocks."""
    return np.array([len(c) for c in np.array_split(np.arange(M), n)])


def apply(g: Graphon, v) -> np.ndarray:
    """Integral operator action (g o v)(a) = int g(a, b) v(b) db."""
    coeffs = g.eigenvalues * g.projections(v)
    return coeffs @ g.eigenfunctions


def degree_profile(g: Graphon) -> np.ndarray:
    """delta(a_i) = sum_l lam_l <1, f_l> f_l(a_i)."""
    return (g.eigenvalues * g.ones_projections()) @ g.eigenfunctions


def canonicalize_signs(g: Graphon) -> Graphon:
    """Flip every eigenfunction with <1, f_l> >= 0 so that all <1, f_l> <= 0."""
    flip = np.where(g.ones_projections() >= 0.0, -1.0, 1.0)
    if np.all(flip == 1.0):
        return g
    return Graphon(
        g.eigenvalues.copy(),
        g.eigenfunctions * flip[:, None],
        step_blocks=g.step_blocks,
        a1_flag=g.a1_flag,
    )


@dataclass(frozen=True)
class AssumptionReport:
    a1: bool
    max_eigenvalue: float
    a2: bool
    rank: int
    a3: bool
    mean_spread: float
    mean_value: float
    a4: bool
    ones_inner: list
    a5: bool
    a5_residuals: list
    a5_min_residual: float

    def to_dict(self) -> dict:
        return {
            "a1": {"holds": self.a1, "max_eigenvalue": self.max_eigenvalue, "eps_eig": core.EPS_EIG},
            "a2": {"holds": self.a2, "rank": self.rank},
            "a3": {"holds": self.a3, "mean_spread": self.mean_spread, "mean_value": self.mean_value},
            "a4": {"holds": self.a4, "ones_inner": self.ones_inner},
            "a5": {
                "holds": self.a5,
                "residuals": self.a5_residuals,
                "min_residual": self.a5_min_residual,
            },
        }


def check_assumptions(g: Graphon, m, params: GameParams) -> AssumptionReport:
    """Evaluate the structural assumptions on (g, m, params). Never raises.

    ``m`` may be a MeanField or a plain array of grid samples. The A5
    residual matrix holds theta(lam_l) + theta(lam_k) - rho/2 for every pair.
    """
    samples = np.asarray(getattr(m, "samples", m), dtype=float)
    lams = g.eigenvalues
    max_lam = float(lams.max())
    mean_value = float(samples.mean())
    spread = float(np.max(np.abs(samples - mean_value)))
    ones = g.ones_projections()

    th = []
    for lam in lams:
        try:
            th.append(core.theta(float(lam), params))
        except core.DomainError:
            th.append(float("nan"))
    th = np.array(th)
    resid = th[:, None] + th[None, :] - 0.5 * params.rho
    finite = np.isfinite(resid)

    return AssumptionReport(
        a1=bool(max_lam <= 1.0 - core.EPS_EIG),
        max_eigenvalue=max_lam,
        a2=True,
        rank=g.rank,
        a3=bool(spread <= TOL_MEAN and mean_value != 0.0),
        mean_spread=spread,
        mean_value=mean_value,
        a4=bool(np.all(ones < -TOL_INNER)),
        ones_inner=[float(x) for x in ones],
        a5=bool(finite.all() and np.all(np.abs(resid) <= TOL_A5)),
        a5_residuals=resid.tolist(),
        a5_min_residual=float(np.nanmin(resid)) if finite.any() else float("nan"),
    )
