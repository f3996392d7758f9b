"""Robin-boundary effective models for 1-D reflecting-wall scattering.

Closed-form phase shifts and bound states for a multi-step well and the Morse
potential, the Robin half-line model that reproduces them at long
wavelength, and a Numerov oracle that checks every closed form.
"""

from ._kernels import BACKEND
from .effective import BoundState, EffectiveModel
from .errors import (ConvergenceError, DomainError, FreeRegionError, PoleError, RobinBCError,
                     SeriesRadiusError, TurningPointError, WindowCollapseError)
from .matching import MatchResult, PhaseCurve, build_effective, match
from .oracle import OracleConfig, OraclePhase
from .potentials import Kind, PotentialSpec, TofResult

__all__ = [
    "BACKEND",
    "BoundState",
    "ConvergenceError",
    "DomainError",
    "EffectiveModel",
    "FreeRegionError",
    "Kind",
    "MatchResult",
    "OracleConfig",
    "OraclePhase",
    "PhaseCurve",
    "PoleError",
    "PotentialSpec",
    "RobinBCError",
    "SeriesRadiusError",
    "TofResult",
    "TurningPointError",
    "WindowCollapseError",
    "build_effective",
    "match",
]
