"""p-curves of maximal slope and their exponent transforms.

Points are lists of floats on Euclidean spaces (a bare float in one
dimension) and ``(branch, radius)`` pairs on the tripod.
"""

from ._core import (
    Curve,
    DomainError,
    Error,
    Functional,
    HypothesisError,
    SolverError,
    SpaceMismatch,
    TransformResult,
    alpha,
    arc_length,
    check_energy_identity,
    example_names,
    linspace,
    metric_derivative,
    oracle,
    positivity_horizon,
    reproduce,
    run_experiment,
    solve,
    transform,
    verify_duality,
)

__all__ = [
    "Curve",
    "DomainError",
    "Error",
    "Functional",
    "HypothesisError",
    "SolverError",
    "SpaceMismatch",
    "TransformResult",
    "alpha",
    "arc_length",
    "check_energy_identity",
    "example_names",
    "linspace",
    "metric_derivative",
    "oracle",
    "positivity_horizon",
    "reproduce",
    "run_experiment",
    "solve",
    "transform",
    "verify_duality",
]
