"""Variational multiplicity toolkit for A u = lambda f(u) + h(u)."""

from .asymptotics import (
    AsymptoticProfile,
    LambdaInterval,
    estimate_quotient_tail,
    interval_constant,
    lambda_interval,
    oscillation_condition,
)
from .energy import EnergyFunctional, ProblemInstance
from .errors import (
    ConfigError,
    HypothesisError,
    InvalidDimensionError,
    NumericalError,
    StructuralError,
    VarsysError,
)
from .grid import GridProblemSpec, emit_plot_data, run_grid
from .matrix_core import (
    GridIndexMap,
    SpdMatrix,
    assemble_grid_laplacian,
    assemble_second_difference,
    jacobi_eigenvalues,
    quadratic_form,
    spectrum,
)
from .nonlinearity import (
    ComponentFunction,
    Nonlinearity,
    Perturbation,
    adaptive_simpson,
    estimate_lipschitz,
    polynomial,
    sine,
)
from .solver import SolveConfig, cascade, local_minimize, minimize_on_sublevel, multistart_solve
from .spike_train import SpikeTrain

__version__ = "0.1.0"

__all__ = [
    "AsymptoticProfile",
    "ComponentFunction",
    "ConfigError",
    "EnergyFunctional",
    "GridIndexMap",
    "GridProblemSpec",
    "HypothesisError",
    "InvalidDimensionError",
    "LambdaInterval",
    "Nonlinearity",
    "NumericalError",
    "Perturbation",
    "ProblemInstance",
    "SolveConfig",
    "SpdMatrix",
    "SpikeTrain",
    "StructuralError",
    "VarsysError",
    "adaptive_simpson",
    "assemble_grid_laplacian",
    "assemble_second_difference",
    "cascade",
    "emit_plot_data",
    "estimate_lipschitz",
    "estimate_quotient_tail",
    "interval_constant",
    "jacobi_eigenvalues",
    "lambda_interval",
    "local_minimize",
    "minimize_on_sublevel",
    "multistart_solve",
    "oscillation_condition",
    "polynomial",
    "quadratic_form",
    "run_grid",
    "sine",
    "spectrum",
]
