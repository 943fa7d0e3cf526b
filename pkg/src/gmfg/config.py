"""YAML run configuration.

Example::

    params: {b: 1.0, r: 1.0, rho: 1.0, sigma: 0.3, nu: 0.5}
    grid: 512
    graphon:
      step_matrix: [[0.5]]          # or step_matrix_csv: P.csv
      # block_cells: [171, 171, 170]
      # eigenpairs:
      #   - lambda: 0.3               # or kernel_peak: 0.8
      #     function: {kind: bumps, centers: [0.5], width: 0.06}
      canonicalize: true
    mean_field: {constant: 1.0}     # or {blocks: [...]} or {csv: m.csv, column: m}
    solve: {t_max: 10.0, count: 21}
    analysis: {ablation: true}
    simulation: {n: 4, cluster_size: 2000, dt: 0.001, T_sim: 14.0, seed: 7}
    verify: {q_nodes: 8}
    output: out

Relative file paths are resolved against the directory of the config file.
"""

from __future__ import annotations

import copy
import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import instances
from .core import GameParams
from .equilibrium import MeanField
from .errors import ConfigError, GMFGError
from .graphon import DEFAULT_GRID, Graphon, canonicalize_signs, from_eigenpairs, from_step_matrix, midpoints
from .verify import TOLERANCES

TOP_KEYS = {"params", "grid", "graphon", "mean_field", "solve", "analysis", "simulation", "verify", "output"}
FUNCTION_KINDS = {"constant", "blocks", "bumps", "cosine", "csv"}


@dataclass
class RunConfig:
    params: dict
    graphon: dict
    mean_field: dict
    grid: int = DEFAULT_GRID
    solve: dict = field(default_factory=dict)
    analysis: dict = field(default_factory=dict)
    simulation: dict = field(default_factory=dict)
    verify: dict = field(default_factory=dict)
    output: str = "out"

    @classmethod
    def from_dict(cls, data: dict, base_dir: Path | None = None) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a mapping")
        unknown = set(data) - TOP_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for key in ("params", "graphon", "mean_field"):
            if key not in data:
                raise ConfigError(f"missing required section '{key}'")
        data = copy.deepcopy(data)
        if base_dir is not None:
            _resolve_paths(data, Path(base_dir))
        cfg = cls(
            params=dict(data["params"]),
            graphon=dict(data["graphon"]),
            mean_field=dict(data["mean_field"]),
            grid=int(data.get("grid", DEFAULT_GRID)),
            solve=dict(data.get("solve") or {}),
            analysis=dict(data.get("analysis") or {}),
            simulation=dict(data.get("simulation") or {}),
            verify=dict(data.get("verify") or {}),
            output=str(data.get("output", "out")),
        )
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        return {
            "params": self.params,
            "grid": self.grid,
            "graphon": self.graphon,
            "mean_field": self.mean_field,
            "solve": self.solve,
            "analysis": self.analysis,
            "simulation": self.simulation,
            "verify": self.verify,
            "output": self.output,
        }

    def dump(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)

    def validate(self) -> None:
        if self.grid < 3:
            raise ConfigError(f"grid must be at least 3, got {self.grid}")
        self.game_params()
        for name, value in self.verify.get("tolerances", {}).items():
            if name not in TOLERANCES or name == "cost_positive":
                raise ConfigError(f"unknown tolerance '{name}'")
            if not value > 0:
                raise ConfigError(f"tolerance '{name}' must be positive")
        g = self.graphon
        sources = [k for k in ("step_matrix", "step_matrix_csv", "eigenpairs") if k in g]
        if len(sources) != 1:
            raise ConfigError("graphon needs exactly one of step_matrix, step_matrix_csv, eigenpairs")
        for key in ("step_matrix_csv",):
            if key in g and not Path(g[key]).is_file():
                raise ConfigError(f"file not found: {g[key]}")
        for pair in g.get("eigenpairs", []):
            if ("lambda" in pair) == ("kernel_peak" in pair):
                raise ConfigError("each eigenpair needs exactly one of lambda, kernel_peak")
            fn = pair.get("function", {})
            if fn.get("kind") not in FUNCTION_KINDS:
                raise ConfigError(f"eigenfunction kind must be one of {sorted(FUNCTION_KINDS)}")
            if fn.get("kind") == "csv" and not Path(fn.get("path", "")).is_file():
                raise ConfigError(f"file not found: {fn.get('path')}")
        mf = self.mean_field
        if len([k for k in ("constant", "blocks", "csv") if k in mf]) != 1:
            raise ConfigError("mean_field needs exactly one of constant, blocks, csv")
        if "csv" in mf and not Path(mf["csv"]).is_file():
            raise ConfigError(f"file not found: {mf['csv']}")
        sim = self.simulation
        for key in ("dt", "T_sim"):
            if key in sim and not float(sim[key]) > 0:
                raise ConfigError(f"simulation.{key} must be positive")

    def game_params(self) -> GameParams:
        try:
            return GameParams(**{k: float(v) for k, v in self.params.items()})
        except TypeError as exc:
            raise ConfigError(f"bad params block: {exc}") from None
        except GMFGError as exc:
            raise ConfigError(str(exc)) from None


def _resolve_paths(data: dict, base: Path) -> None:
    g = data.get("graphon", {})
    if "step_matrix_csv" in g:
        g["step_matrix_csv"] = str((base / g["step_matrix_csv"]).resolve())
    for pair in g.get("eigenpairs", []) or []:
        fn = pair.get("function", {})
        if fn.get("kind") == "csv" and "path" in fn:
            fn["path"] = str((base / fn["path"]).resolve())
    mf = data.get("mean_field", {})
    if "csv" in mf:
        mf["csv"] = str((base / mf["csv"]).resolve())


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}") from None
    return RunConfig.from_dict(data, base_dir=path.parent)


def read_matrix_csv(path) -> np.ndarray:
    try:
        with open(path, newline="") as fh:
            rows = [[float(x) for x in row] for row in csv.reader(fh) if row]
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if not rows or len({len(r) for r in rows}) != 1:
        raise ConfigError(f"{path}: matrix rows must be nonempty and of equal length")
    return np.array(rows)


def _read_column(path, column, M: int) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if column not in (reader.fieldnames or []):
            raise ConfigError(f"column '{column}' not in {path}")
        try:
            values = np.array([float(row[column]) for row in reader])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{path}:{column}: {exc}") from None
    if values.size != M:
        raise ConfigError(f"{path}:{column} has {values.size} rows, grid has {M}")
    return values


def _function_samples(spec: dict, M: int) -> np.ndarray:
    kind = spec["kind"]
    a = midpoints(M)
    if kind == "constant":
        return np.full(M, float(spec.get("value", -1.0)))
    if kind == "blocks":
        values = np.asarray(spec["values"], dtype=float)
        if M % values.size:
            raise ConfigError(f"grid {M} is not a multiple of {values.size} blocks")
        return np.repeat(values, M // values.size)
    if kind == "bumps":
        return instances.bump_function(
            M, spec["centers"], float(spec.get("width", 0.06)),
            float(spec.get("baseline", 1.0)), float(spec.get("amplitude", 1.0)),
        )
    if kind == "cosine":
        k = int(spec.get("frequency", 1))
        return float(spec.get("sign", 1.0)) * np.sqrt(2.0) * np.cos(2 * np.pi * k * a)
    return _read_column(spec["path"], spec["column"], M)


def build_graphon(cfg: RunConfig) -> Graphon:
    g = cfg.graphon
    M = cfg.grid
    if "eigenpairs" in g:
        fs = np.vstack([_function_samples(p["function"], M) for p in g["eigenpairs"]])
        # kernel_peak sets lambda so that lambda * max f^2 equals the peak
        lams = [
            float(p["lambda"]) if "lambda" in p else float(p["kernel_peak"]) / float(np.max(f**2))
            for p, f in zip(g["eigenpairs"], fs)
        ]
        graphon = from_eigenpairs(lams, fs, M)
    else:
        P = read_matrix_csv(g["step_matrix_csv"]) if "step_matrix_csv" in g else np.asarray(g["step_matrix"], dtype=float)
        graphon = from_step_matrix(P, M, block_cells=g.get("block_cells"))
    if g.get("canonicalize", True):
        graphon = canonicalize_signs(graphon)
    return graphon


def build_mean(cfg: RunConfig, g: Graphon) -> MeanField:
    mf = cfg.mean_field
    if "constant" in mf:
        return MeanField.constant(g, float(mf["constant"]))
    if "blocks" in mf:
        values = np.asarray(mf["blocks"], dtype=float)
        cells = mf.get("block_cells", cfg.graphon.get("block_cells"))
        if cells is not None:
            return MeanField.build(g, np.repeat(values, cells))
        return MeanField.blocks(g, values)
    return MeanField.build(g, _read_column(mf["csv"], mf.get("column", "m"), g.M))
