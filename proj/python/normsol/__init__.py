"""Normalized ground states of -Δu - Δ_q u = λu + |u|^{p-2}u with ‖u‖₂ = c."""

from ._normsol import (
    DegenerateFiberError,
    DependencyError,
    Error,
    IoError,
    NormalizationError,
    ParameterError,
    ProblemParams,
    RegimeError,
    ResolutionError,
    ShootingError,
    TruncationError,
    classify_regime,
    critical_masses,
    derive_exponents,
    energy,
    fiber_h,
    fiber_t0,
    gradient,
    grid_nodes,
    norms,
    solve,
    solve_wp,
    solve_wpq,
    suggest_radius,
    sweep,
    validate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
