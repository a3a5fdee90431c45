"""Squarefull (powerful) numbers: exact counts, short-interval variance by
exact event sweep, the H^(2/3) asymptotic constant, and desk-scale checks of
the supporting analytic machinery.
"""

__version__ = "0.1.0"

from .analytic_checks import (
    DirichletPoly,
    ExpSumSpec,
    MeanValueResult,
    ProcessBResult,
    counting_identity_check,
    dirichlet_eval,
    m_poly_eval,
    mean_value_check,
    process_b_check,
    psi,
    psi_fourier,
    zeta_critical,
)
from .asymptotics import (
    DiagonalParams,
    ZetaConstants,
    bump_c4,
    c_infinity,
    diagonal_sum,
    sinc_moment,
    windowed_diagonal_sum,
    zeta_constants,
    zeta_real,
)
from .counting import (
    CountResult,
    bg_approx,
    count_result,
    count_upto,
    interval_count,
    interval_upper_bound,
)
from .exactmath import (
    SquarefreeTable,
    SquarefullRep,
    enumerate_squarefull,
    enumerate_squarefull_arrays,
    icbrt,
    isqrt,
    read_enumeration_cache,
    squarefree_sieve,
    write_enumeration_cache,
)
from .sweep import (
    ExperimentConfig,
    PrecisionAlarm,
    SweepEvent,
    VarianceReport,
    build_events,
    restricted_mean,
    variance_exact,
    variance_report,
)

__all__ = [
    "__version__",
    "DirichletPoly",
    "ExpSumSpec",
    "MeanValueResult",
    "ProcessBResult",
    "counting_identity_check",
    "dirichlet_eval",
    "m_poly_eval",
    "mean_value_check",
    "process_b_check",
    "psi",
    "psi_fourier",
    "zeta_critical",
    "DiagonalParams",
    "ZetaConstants",
    "bump_c4",
    "c_infinity",
    "diagonal_sum",
    "sinc_moment",
    "windowed_diagonal_sum",
    "zeta_constants",
    "zeta_real",
    "CountResult",
    "bg_approx",
    "count_result",
    "count_upto",
    "interval_count",
    "interval_upper_bound",
    "SquarefreeTable",
    "SquarefullRep",
    "enumerate_squarefull",
    "enumerate_squarefull_arrays",
    "icbrt",
    "isqrt",
    "read_enumeration_cache",
    "squarefree_sieve",
    "write_enumeration_cache",
    "ExperimentConfig",
    "PrecisionAlarm",
    "SweepEvent",
    "VarianceReport",
    "build_events",
    "restricted_mean",
    "variance_exact",
    "variance_report",
]
