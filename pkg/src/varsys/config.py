"""JSON run configuration.

Sections: ``matrix`` or ``grid``, ``nonlinearity``, ``perturbation``,
``lambda``, ``profile``, ``solver``, ``output`` and ``seed``.  See the
README for a full example.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

from .asymptotics import AsymptoticProfile, geometric_sequence
from .errors import ConfigError, VarsysError
from .matrix_core import load_matrix, matrix_from_document
from .nonlinearity import Nonlinearity, Perturbation, make_function
from .solver import SolveConfig
from .spike_train import SpikeTrain

__all__ = ["RunConfig", "load_config", "parse_config"]

MODES = ("analyze", "solve", "cascade", "grid")
SOLVER_KEYS = {f.name for f in fields(SolveConfig)}


@dataclass
class RunConfig:
    mode: str
    matrix: object
    f: Nonlinearity
    h: Perturbation
    lam: float
    lambdas: list
    profile: Optional[AsymptoticProfile]
    solve: SolveConfig
    regime: str = "infinity"
    strategy: str = "multistart"
    witness_peaks: Optional[list] = None
    plateau_ends: Optional[list] = None
    grid: Optional[dict] = None
    grid_f: object = None
    grid_h: object = None
    lipschitz_h: float = 0.0
    output_dir: Optional[str] = None
    output_format: str = "csv"
    seed: int = 0
    source: dict = field(default_factory=dict)


def _section(doc, key, required=True, default=None):
    if key not in doc:
        if required:
            raise ConfigError(f"config: missing required section '{key}'")
        return default
    return doc[key]


def _function(spec, where):
    try:
        return make_function(spec)
    except VarsysError as exc:
        raise ConfigError(f"config: {where}: {exc}") from None


def _components(spec, n, where):
    if isinstance(spec, dict) and "components" in spec:
        comps = [_function(c, f"{where}.components[{k}]") for k, c in enumerate(spec["components"])]
        if len(comps) != n:
            raise ConfigError(f"config: {where}: {len(comps)} components for dimension {n}")
        return comps
    return [_function(spec, where)] * n


def _spike_source(f):
    src = f.components[0].source
    return src if isinstance(src, SpikeTrain) else None


def _profile(spec, f, regime):
    if spec is None:
        return None
    if spec == "auto":
        train = _spike_source(f)
        if train is None:
            raise ConfigError("config: profile 'auto' is only available for spike-train nonlinearities")
        if train.direction == "infinity":
            return AsymptoticProfile.analytic(a_inf=0.0, b_sup="inf")
        return AsymptoticProfile.analytic(a_zero=0.0, b_zero="inf")
    if "analytic" in spec:
        known = {"a_inf", "b_sup", "a_zero", "b_zero"}
        extra = set(spec["analytic"]) - known
        if extra:
            raise ConfigError(f"config: profile.analytic: unknown fields {sorted(extra)}")
        try:
            return AsymptoticProfile.analytic(**spec["analytic"])
        except ValueError as exc:
            raise ConfigError(f"config: profile.analytic: {exc}") from None
    if "empirical" in spec:
        emp = spec["empirical"]
        seq = emp.get("sequence")
        if isinstance(seq, dict) and "geometric" in seq:
            start, ratio, count = seq["geometric"]
            seq = geometric_sequence(float(start), float(ratio), int(count))
        if not isinstance(seq, list):
            raise ConfigError("config: profile.empirical.sequence must be a list or {geometric: [start, ratio, count]}")
        try:
            return AsymptoticProfile.empirical(f.components, emp.get("regime", regime), seq, emp.get("b_sequence"))
        except VarsysError as exc:
            raise ConfigError(f"config: profile.empirical: {exc}") from None
    raise ConfigError("config: profile needs 'analytic', 'empirical' or 'auto'")


def parse_config(doc, mode="analyze", base_dir="."):
    if mode not in MODES:
        raise ConfigError(f"unknown mode {mode!r}")
    if not isinstance(doc, dict):
        raise ConfigError("config: top level must be a JSON object")
    seed = int(doc.get("seed", 0))
    grid = doc.get("grid")
    if mode == "grid" and grid is None:
        raise ConfigError("config: mode 'grid' needs a 'grid' section with m and n")
    try:
        if grid is not None:
            matrix = matrix_from_document({"tag": "grid", "m": grid["m"], "n": grid["n"]})
        else:
            mdoc = _section(doc, "matrix")
            if isinstance(mdoc, dict) and "file" in mdoc:
                matrix = load_matrix(Path(base_dir) / mdoc["file"])
            else:
                matrix = matrix_from_document(mdoc)
    except KeyError as exc:
        raise ConfigError(f"config: matrix/grid section is missing {exc}") from None
    except VarsysError as exc:
        raise ConfigError(f"config: matrix: {exc}") from None
    n = matrix.order

    fspec = _section(doc, "nonlinearity")
    f = Nonlinearity(_components(fspec, n, "nonlinearity"))

    hspec = _section(doc, "perturbation", required=False, default={"kind": "zero"})
    declared = hspec.get("lipschitz") if isinstance(hspec, dict) else None
    if not isinstance(hspec, dict):
        raise ConfigError("config: perturbation must be an object")
    hspec = {k: v for k, v in hspec.items() if k != "lipschitz"}
    try:
        h = Perturbation(_components(hspec, n, "perturbation"), declared)
    except VarsysError as exc:
        raise ConfigError(f"config: perturbation: {exc}") from None

    raw = _section(doc, "lambda", required=mode != "analyze", default=1.0)
    try:
        lambdas = [float(x) for x in raw] if isinstance(raw, list) else [float(raw)]
    except (TypeError, ValueError):
        raise ConfigError(f"config: lambda must be a number or a list of numbers, got {raw!r}") from None
    if not lambdas or not all(x > 0 for x in lambdas):
        raise ConfigError("config: lambda values must be positive")
    lam = lambdas[0]

    solver = dict(_section(doc, "solver", required=False, default={}))
    regime = solver.pop("regime", "infinity")
    strategy = solver.pop("mode", "cascade" if mode == "cascade" else "multistart")
    witness = solver.pop("witness", None)
    stages = int(solver.pop("stages", 6))
    unknown = set(solver) - SOLVER_KEYS
    if unknown:
        raise ConfigError(f"config: solver: unknown fields {sorted(unknown)}")
    solver.setdefault("seed", seed)
    solver.setdefault("n_random_starts", 10)
    try:
        solve_cfg = SolveConfig(**solver)
    except (TypeError, VarsysError) as exc:
        raise ConfigError(f"config: solver: {exc}") from None

    peaks = ends = None
    if witness == "auto":
        train = _spike_source(f)
        if train is None:
            raise ConfigError("config: solver.witness 'auto' needs a spike-train nonlinearity")
        peaks, ends = train.peaks(stages), train.plateau_ends(stages)
    elif isinstance(witness, dict):
        peaks, ends = witness.get("peaks"), witness.get("plateau_ends")

    profile = _profile(doc.get("profile"), f, regime)
    output = doc.get("output", {})

    cfg = RunConfig(
        mode=mode, matrix=matrix, f=f, h=h, lam=lam, lambdas=lambdas, profile=profile, solve=solve_cfg,
        regime=regime, strategy=strategy, witness_peaks=peaks, plateau_ends=ends,
        output_dir=output.get("dir"), output_format=output.get("format", "csv"), seed=seed, source=doc,
    )
    if grid is not None:
        cfg.grid = {"m": int(grid["m"]), "n": int(grid["n"])}
        cfg.grid_f = f.components[0]
        cfg.grid_h = h.components[0]
        cfg.lipschitz_h = h.L
    return cfg


def load_config(path, mode="analyze"):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return parse_config(doc, mode, base_dir=path.parent)
