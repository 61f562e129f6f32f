"""Incomplete higher-order SVD: iHOOI and ALSaS solvers with experiment tooling."""
from .linalg import NumericalError
from .metrics import factor_recovery_error, recovery_report, relative_error, success
from .observation import ObservationMask, sample_uniform, sampling_as_measurement
from .solvers import (
    FactorModel,
    Fixed,
    Increasing,
    SolverConfig,
    alsas_solve,
    hooi_solve,
    ihooi_solve,
)
from .synthetic import Family, GeneratorSpec, add_noise, generate

__version__ = "0.1.0"

__all__ = [
    "Family", "FactorModel", "Fixed", "GeneratorSpec", "Increasing", "NumericalError",
    "ObservationMask", "SolverConfig", "add_noise", "alsas_solve", "factor_recovery_error",
    "generate", "hooi_solve", "ihooi_solve", "recovery_report", "relative_error",
    "sample_uniform", "sampling_as_measurement", "success",
]
