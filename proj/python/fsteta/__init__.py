"""Fractional-step theta scheme for the heat equation with a posteriori error estimators."""

from ._fsteta import (
    Case,
    CheckResult,
    ConfigurationError,
    EstimatorConstants,
    EstimatorRow,
    Mesh,
    RunReport,
    SolverError,
    StudyOptions,
    UsageError,
    check_reports,
    default_alpha,
    default_theta,
    emit,
    eoc,
    make_case,
    quadrature_exactness_check,
    render_tables,
    run_level,
    run_study,
    zero_case,
)

__all__ = [
    "Case",
    "CheckResult",
    "ConfigurationError",
    "EstimatorConstants",
    "EstimatorRow",
    "Mesh",
    "RunReport",
    "SolverError",
    "StudyOptions",
    "UsageError",
    "check_reports",
    "default_alpha",
    "default_theta",
    "emit",
    "eoc",
    "make_case",
    "quadrature_exactness_check",
    "render_tables",
    "run_level",
    "run_study",
    "zero_case",
]
