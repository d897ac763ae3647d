"""Eigenvalues of oscillating p-Laplacian type problems and their homogenized limits.

Thin wrapper over the compiled ``_core`` module. Reports (sweep tables, rate
reports, audits) are plain dicts with the same layout as the JSON files the
command-line tool writes.
"""

from ._core import (
    BoundaryCondition,
    CoefficientField,
    Domain,
    HomogeigError,
    HypothesisReport,
    OperatorSpec,
    ProblemInstance,
    RunConfig,
    SolverSettings,
    Spectrum,
    TrigTerm,
    audit_ordering,
    check_operator,
    fit_rate,
    load_config,
    parse_config,
    pi_p,
    run_cli,
    solve,
    sweep,
)

__all__ = [
    "BoundaryCondition",
    "CoefficientField",
    "Domain",
    "HomogeigError",
    "HypothesisReport",
    "OperatorSpec",
    "ProblemInstance",
    "RunConfig",
    "SolverSettings",
    "Spectrum",
    "TrigTerm",
    "audit_ordering",
    "check_operator",
    "fit_rate",
    "load_config",
    "parse_config",
    "pi_p",
    "run_cli",
    "solve",
    "sweep",
]
