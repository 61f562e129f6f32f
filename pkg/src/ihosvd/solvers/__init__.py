from .alsas import alsas_iterate, alsas_solve, core_update, factor_update, normalize
from .common import OverfittingWarning, random_factors
from .ihooi import (
    factor_sweep,
    generalized_x_update,
    hooi_solve,
    ihooi_iterate,
    ihooi_iterate_measured,
    ihooi_solve,
    truncated_hosvd,
)
from .model import (
    FactorModel,
    Fixed,
    Increasing,
    IterationTrace,
    KktResidual,
    SolveResult,
    SolverConfig,
    TraceRow,
)
from .objectives import (
    g_matrix,
    grad_h,
    kkt_residual,
    objective_f,
    objective_g,
    objective_g_energy,
    projector_product,
)
from .rank import augment_mode, maybe_increase_rank

__all__ = [
    "FactorModel", "Fixed", "Increasing", "IterationTrace", "KktResidual",
    "OverfittingWarning", "SolveResult", "SolverConfig", "TraceRow",
    "alsas_iterate", "alsas_solve", "augment_mode", "core_update", "factor_sweep",
    "factor_update", "g_matrix", "generalized_x_update", "grad_h", "hooi_solve",
    "ihooi_iterate", "ihooi_iterate_measured", "ihooi_solve", "kkt_residual",
    "maybe_increase_rank", "normalize", "objective_f", "objective_g",
    "objective_g_energy", "projector_product", "random_factors", "truncated_hosvd",
]
