"""Stencil weights (b0, b1, a) for each scheme at a fitted scaled frequency.

The stencil is

    y[n+1] - (2 - a) y[n] + y[n-1] = h^2 (b0 (f[n-1] + f[n+1]) + b1 f[n])

and applied to y'' = -w^2 y it has characteristic residual

    g(u) = 2 cos(u) (1 + u^2 b0) - (2 - a - u^2 b1).

Fitted schemes impose g(v0) = 0 plus one or two more conditions.  Above
``V_SWITCH`` the conditions are solved in floating point; below it the exact
Taylor series from :mod:`oscifit.series` are evaluated instead, since the
closed-form system loses accuracy to cancellation as v0 -> 0.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import FrequencyOutOfRange, SingularSystem
from .scheme import Scheme
from .series import DEFAULT_ORDER, derive_scheme_series

CLASSICAL_B0 = 1.0 / 12.0
CLASSICAL_B1 = 5.0 / 6.0

V_SWITCH = 0.05
V_MAX = 2.0
COND_LIMIT = 1e12


@dataclass(frozen=True)
class MethodCoefficients:
    scheme: Scheme
    v0: float
    b0: float
    b1: float
    a: float = 0.0

    def as_tuple(self):
        return (self.b0, self.b1, self.a)


@dataclass(frozen=True)
class ConditionSystem:
    """Linear system ``matrix @ x = rhs`` with coefficients ``x * column_scale``.

    Rows are rescaled by powers of v0 so entries stay O(1); for SD the
    unknown in the third column is a / v0**2.
    """

    matrix: np.ndarray
    rhs: np.ndarray
    unknowns: tuple
    column_scale: np.ndarray


def classical(v0=0.0):
    return MethodCoefficients(Scheme.C, float(v0), CLASSICAL_B0, CLASSICAL_B1, 0.0)


def defining_conditions(scheme, v0):
    scheme = Scheme.parse(scheme)
    if scheme is Scheme.C:
        raise ValueError("the classical scheme has no defining conditions")
    if not v0 > 0:
        raise ValueError("defining conditions need v0 > 0")
    c, s = math.cos(v0), math.sin(v0)
    # (2 - 2 cos v) / v^2 without cancellation
    half = 2.0 * math.sin(0.5 * v0) / v0
    fit_rhs = half * half
    fit = [2.0 * c, 1.0]
    d1 = [4.0 * c - 2.0 * v0 * s, 2.0]
    d1_rhs = 2.0 * s / v0
    d2 = [4.0 * c - 8.0 * v0 * s - 2.0 * v0 * v0 * c, 2.0]
    d2_rhs = 2.0 * c

    if scheme is Scheme.T:
        rows, rhs = [fit, [2.0, 1.0]], [fit_rhs, 1.0]
        unknowns, scale = ("b0", "b1"), [1.0, 1.0]
    elif scheme is Scheme.S:
        rows, rhs = [fit, d1], [fit_rhs, d1_rhs]
        unknowns, scale = ("b0", "b1"), [1.0, 1.0]
    else:
        rows = [fit + [1.0], d1 + [0.0], d2 + [0.0]]
        rhs = [fit_rhs, d1_rhs, d2_rhs]
        unknowns, scale = ("b0", "b1", "a"), [1.0, 1.0, v0 * v0]
    return ConditionSystem(np.array(rows), np.array(rhs), unknowns, np.array(scale))


def solve_conditions(scheme, v0):
    """Closed-form path: solve the defining conditions at v0 > 0."""
    scheme = Scheme.parse(scheme)
    system = defining_conditions(scheme, v0)
    cond = np.linalg.cond(system.matrix)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularSystem(f"{scheme} conditions singular at v0={v0!r} (cond={cond:.3e})")
    x = np.linalg.solve(system.matrix, system.rhs) * system.column_scale
    b0, b1 = float(x[0]), float(x[1])
    a = float(x[2]) if len(x) == 3 else 0.0
    return MethodCoefficients(scheme, float(v0), b0, b1, a)


def series_coefficients(scheme, v0, order=DEFAULT_ORDER):
    """Series path: evaluate the exact Taylor expansions at v0."""
    scheme = Scheme.parse(scheme)
    b0, b1, a = derive_scheme_series(scheme, order)
    return MethodCoefficients(scheme, float(v0), b0.evaluate(v0), b1.evaluate(v0), a.evaluate(v0))


def coefficients_for(scheme, v0, *, v_switch=V_SWITCH, v_max=V_MAX):
    """Stencil weights for ``scheme`` fitted at scaled frequency ``v0``.

    The coefficients are even in v0, so negative input is folded to |v0|.
    Raises FrequencyOutOfRange for |v0| >= v_max (fitted schemes only; the
    classical weights do not depend on v0) and SingularSystem when the
    conditions degenerate.
    """
    scheme = Scheme.parse(scheme)
    v0 = abs(float(v0))
    if not math.isfinite(v0):
        raise FrequencyOutOfRange(v0, v_max)
    if scheme is Scheme.C:
        return classical(v0)
    if v0 >= v_max:
        raise FrequencyOutOfRange(v0, v_max)
    if v0 < v_switch:
        return series_coefficients(scheme, v0)
    return solve_conditions(scheme, v0)


def characteristic_residuals(coeffs, u):
    """g(u), g'(u), g''(u) of the characteristic residual at fixed weights."""
    b0, b1, a = coeffs.b0, coeffs.b1, coeffs.a
    c, s = math.cos(u), math.sin(u)
    g = 2.0 * c * (1.0 + u * u * b0) - (2.0 - a - u * u * b1)
    g1 = -2.0 * s * (1.0 + u * u * b0) + 4.0 * u * c * b0 + 2.0 * u * b1
    g2 = -2.0 * c * (1.0 + u * u * b0) - 8.0 * u * s * b0 + 4.0 * c * b0 + 2.0 * b1
    return g, g1, g2


def deviation_from_classical(coeffs):
    return max(
        abs(coeffs.b0 - CLASSICAL_B0), abs(coeffs.b1 - CLASSICAL_B1), abs(coeffs.a)
    )


def classical_limit_check(scheme, v0_sequence):
    """Deviation of the fitted weights from the classical ones along a sequence.

    ``v0_sequence`` must be positive and strictly decreasing.  Returns an
    array of max-norm deviations, one per entry.
    """
    seq = [float(v) for v in v0_sequence]
    if not seq or any(v <= 0 for v in seq):
        raise ValueError("v0 sequence must be positive")
    if any(b >= a for a, b in zip(seq, seq[1:])):
        raise ValueError("v0 sequence must be strictly decreasing")
    return np.array([deviation_from_classical(coefficients_for(scheme, v)) for v in seq])
