"""Accelerated randomized dual coordinate ascent for constrained and ERM problems."""

from ._ardca import (
    ConfigError,
    DualModel,
    Loss,
    NumericError,
    ProblemSpec,
    Reference,
    Regularizer,
    TraceRecord,
    adfga,
    ardca,
    dga,
    erm,
    gen_instance,
    kprime_formula,
    nearest_rank,
    rdca,
    reference_optimum,
    restart,
    run_race,
    solver_names,
    theta_next,
)

__all__ = [
    "ConfigError",
    "DualModel",
    "Loss",
    "NumericError",
    "ProblemSpec",
    "Reference",
    "Regularizer",
    "TraceRecord",
    "adfga",
    "ardca",
    "dga",
    "erm",
    "gen_instance",
    "kprime_formula",
    "nearest_rank",
    "rdca",
    "reference_optimum",
    "restart",
    "run_race",
    "solver_names",
    "theta_next",
]
