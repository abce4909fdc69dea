"""Spectra of a quantum particle on a plane curve with singular curvature."""

from ._core import (
    HBAR2_OVER_2ME,
    BoundaryConditionError,
    ConfigError,
    CurvatureSpec,
    PhysicalParams,
    SingularPointError,
    admissibility,
    power_law_amplitude,
    reconstruct_trace,
    regularize,
    spectrum,
    sweep,
    total_turn,
    validate,
)

__all__ = [
    "HBAR2_OVER_2ME",
    "BoundaryConditionError",
    "ConfigError",
    "CurvatureSpec",
    "PhysicalParams",
    "SingularPointError",
    "admissibility",
    "power_law_amplitude",
    "reconstruct_trace",
    "regularize",
    "spectrum",
    "sweep",
    "total_turn",
    "validate",
]
