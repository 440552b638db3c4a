"""Phase-lag optimized two-step symmetric integrators for oscillatory problems."""

__version__ = "0.1.0"

from .coefficients import MethodCoefficients, coefficients_for
from .integrator import IntegrationConfig, Trajectory, integrate
from .phase import PhaseLagSample, phase_lag_at
from .scheme import Scheme

__all__ = [
    "IntegrationConfig",
    "MethodCoefficients",
    "PhaseLagSample",
    "Scheme",
    "Trajectory",
    "coefficients_for",
    "integrate",
    "phase_lag_at",
]
