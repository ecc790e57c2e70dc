"""Stochastic trust-region methods with probabilistic models."""

from ._storm import (
    DegenerateGeometry,
    InvalidArgument,
    IterationEvent,
    NoiseModel,
    ParseError,
    ProblemSpec,
    RunRecord,
    TrustRegionConfig,
    adagrad,
    build_profiles,
    builtin_suite,
    cauchy_point,
    chebyshev_sample_size,
    dogleg,
    failure_alpha_beta,
    find_problem,
    logistic_loss,
    run,
    sigma_from_success_probability,
    synthetic_dataset,
    tau_solved,
    theory_constants,
    train_logistic,
)

__all__ = [
    "DegenerateGeometry",
    "InvalidArgument",
    "IterationEvent",
    "NoiseModel",
    "ParseError",
    "ProblemSpec",
    "RunRecord",
    "TrustRegionConfig",
    "adagrad",
    "build_profiles",
    "builtin_suite",
    "cauchy_point",
    "chebyshev_sample_size",
    "dogleg",
    "failure_alpha_beta",
    "find_problem",
    "logistic_loss",
    "run",
    "sigma_from_success_probability",
    "synthetic_dataset",
    "tau_solved",
    "theory_constants",
    "train_logistic",
]
