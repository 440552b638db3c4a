"""Phase lag and amplification of the stencil on y'' = -w^2 y.

With u = w h the stencil's characteristic polynomial is z^2 - R(u) z + 1,
where R(u) = (2 - a - u^2 b1) / (1 + u^2 b0).  For |R| <= 2 the roots are
exp(+-i theta) with 2 cos(theta) = R, and the phase lag is l(u) = u - theta.
"""

from dataclasses import dataclass
import math

import numpy as np

from .coefficients import coefficients_for
from .errors import DegenerateDenominator, OutsidePeriodicity
from .scheme import Scheme

DEFAULT_FD_STEP = 1e-3
DEFAULT_DELTA_GRID = tuple(np.logspace(-3, -1, 9))

# Exponent of |l| in delta predicted for each fitted scheme.
EXPECTED_SLOPE = {Scheme.T: 1.0, Scheme.S: 2.0, Scheme.SD: 3.0}


@dataclass(frozen=True)
class PhaseLagSample:
    u: float
    theta: float
    phase_lag: float
    amplification: float
    in_periodicity: bool


def _denominator(coeffs, u):
    d = 1.0 + u * u * coeffs.b0
    if abs(d) < 1e-14:
        raise DegenerateDenominator(f"1 + u^2 b0 vanishes at u={u!r}")
    return d


def characteristic_ratio(coeffs, u):
    d = _denominator(coeffs, u)
    return (2.0 - coeffs.a - u * u * coeffs.b1) / d


def phase_lag_at(coeffs, u):
    """Phase lag sample of ``coeffs`` at probe frequency ``u``.

    Outside the periodicity interval theta and phase_lag are NaN and the
    amplification is the modulus of the larger real root.
    """
    u = float(u)
    d = _denominator(coeffs, u)
    # sin^2(theta/2) = (1 - R/2)/2 and cos^2(theta/2) = (1 + R/2)/2, each
    # formed without subtracting nearly equal numbers.
    sin2 = (u * u * (coeffs.b0 + 0.5 * coeffs.b1) + 0.5 * coeffs.a) / (2.0 * d)
    cos2 = (2.0 + u * u * (coeffs.b0 - 0.5 * coeffs.b1) - 0.5 * coeffs.a) / (2.0 * d)
    if sin2 >= 0.0 and cos2 >= 0.0:
        theta = 2.0 * math.atan2(math.sqrt(sin2), math.sqrt(cos2))
        return PhaseLagSample(u, theta, u - theta, 1.0, True)
    r = characteristic_ratio(coeffs, u)
    disc = math.sqrt(max(r * r - 4.0, 0.0))
    amp = max(abs(0.5 * (r + disc)), abs(0.5 * (r - disc)))
    return PhaseLagSample(u, math.nan, math.nan, amp, False)


def _lag(coeffs, u):
    sample = phase_lag_at(coeffs, u)
    if not sample.in_periodicity:
        raise OutsidePeriodicity(f"u={u!r} lies outside the periodicity interval")
    return sample.phase_lag


def _richardson(estimate, h, power_step=2, levels=2):
    # estimate(h) = exact + c1 h^2 + c2 h^4 + ...
    table = [estimate(h / 2 ** k) for k in range(levels + 1)]
    for level in range(1, levels + 1):
        factor = 2 ** (power_step * level)
        table = [(factor * table[i + 1] - table[i]) / (factor - 1) for i in range(len(table) - 1)]
    return table[0]


def _central_difference(f, x, k, h):
    if k == 1:
        return (f(x + h) - f(x - h)) / (2 * h)
    if k == 2:
        return (f(x + h) - 2 * f(x) + f(x - h)) / (h * h)
    if k == 3:
        return (f(x + 2 * h) - 2 * f(x + h) + 2 * f(x - h) - f(x - 2 * h)) / (2 * h ** 3)
    if k == 4:
        return (
            f(x + 2 * h) - 4 * f(x + h) + 6 * f(x) - 4 * f(x - h) + f(x - 2 * h)
        ) / h ** 4
    raise ValueError("derivative order must be 1..4")


def phase_lag_derivatives(scheme, v0, max_order, step=DEFAULT_FD_STEP):
    """[l'(v0), ..., l^(max_order)(v0)] with coefficients frozen at v0.

    Central differences with two levels of Richardson extrapolation.  Higher
    orders use a wider base step to stay above the rounding floor.
    """
    if not 0 < v0 < math.pi:
        raise ValueError("v0 must lie in (0, pi)")
    if not 1 <= max_order <= 4:
        raise ValueError("max_order must be between 1 and 4")
    coeffs = coefficients_for(scheme, v0)

    def lag(u):
        return _lag(coeffs, u)

    out = []
    for k in range(1, max_order + 1):
        h = step * 10 ** ((k - 1) / 2)
        out.append(_richardson(lambda hh: _central_difference(lag, v0, k, hh), h))
    return out


def sensitivity_order(scheme, v0, delta_grid=DEFAULT_DELTA_GRID):
    """Least-squares slope of log|l(v0 + delta)| against log(delta).

    Returns (slope, rms residual of the fit).
    """
    deltas = np.asarray(delta_grid, dtype=float)
    if deltas.size < 2 or np.any(deltas <= 0):
        raise ValueError("delta grid needs at least two positive values")
    if v0 + deltas.max() >= math.pi:
        raise ValueError("v0 + max(delta) must stay below pi")
    coeffs = coefficients_for(scheme, v0)
    lags = np.array([abs(_lag(coeffs, v0 + d)) for d in deltas])
    x, y = np.log(deltas), np.log(lags)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return float(slope), float(np.sqrt(np.mean(resid ** 2)))


def phase_lag_curve(schemes, v0, u_grid):
    """{scheme: [PhaseLagSample, ...]} with fitted weights frozen at v0."""
    grid = [float(u) for u in u_grid]
    if any(not 0 < u < math.pi for u in grid):
        raise ValueError("probe frequencies must lie in (0, pi)")
    table = {}
    for scheme in schemes:
        scheme = Scheme.parse(scheme)
        coeffs = coefficients_for(scheme, v0)
        table[scheme] = [phase_lag_at(coeffs, u) for u in grid]
    return table

