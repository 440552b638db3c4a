"""Test problems: the harmonic oscillator and the two-body Kepler orbit."""

from dataclasses import dataclass, field
import math
from typing import Callable, Optional

import numpy as np

from .errors import SingularOrigin

TWO_PI = 2.0 * math.pi


@dataclass
class SecondOrderProblem:
    """y'' = rhs(t, y) with initial data and optional reference solution."""

    dimension: int
    rhs: Callable
    initial_state: np.ndarray
    initial_derivative: np.ndarray
    exact_solution: Optional[Callable] = None
    exact_derivative: Optional[Callable] = None
    frequency_estimator: Optional[Callable] = None
    name: str = ""
    # components compared for the position error; all of them by default
    position_slice: slice = field(default_factory=lambda: slice(None))

    def __post_init__(self):
        self.initial_state = np.asarray(self.initial_state, dtype=float).reshape(self.dimension)
        self.initial_derivative = np.asarray(self.initial_derivative, dtype=float).reshape(
            self.dimension
        )


def harmonic_problem(omega0, y0=1.0, dy0=0.0):
    """y'' = -omega0^2 y in one dimension."""
    if not omega0 > 0:
        raise ValueError("omega0 must be positive")
    w = float(omega0)
    w2 = w * w
    y0, dy0 = float(y0), float(dy0)

    def rhs(t, y):
        return -w2 * y

    def exact(t):
        return np.array([y0 * math.cos(w * t) + dy0 / w * math.sin(w * t)])

    def exact_derivative(t):
        return np.array([-y0 * w * math.sin(w * t) + dy0 * math.cos(w * t)])

    return SecondOrderProblem(
        dimension=1,
        rhs=rhs,
        initial_state=[y0],
        initial_derivative=[dy0],
        exact_solution=exact,
        exact_derivative=exact_derivative,
        frequency_estimator=lambda t, y: w,
        name=f"harmonic(omega0={w:g})",
    )


def _radius(y):
    r = math.hypot(y[0], y[1])
    if r < 1e-12:
        raise SingularOrigin("two-body state at the origin")
    return r


def kepler_rhs(y):
    """Inverse-square central force, -y / |y|^3."""
    r = _radius(y)
    return -np.asarray(y, dtype=float) / (r * r * r)


def kepler_frequency_estimate(y):
    """Working frequency |y|^(-3/2) = (y1^2 + y2^2)^(-3/4)."""
    r = _radius(y)
    return r ** -1.5


def _kepler_residual(u, ecc, m):
    return u - ecc * math.sin(u) - m


def _bisect(ecc, m, lo, hi, iterations=200):
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if _kepler_residual(mid, ecc, m) > 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def solve_kepler_equation(ecc, t, tol=1e-14, max_iter=50):
    """Eccentric anomaly u with u - ecc*sin(u) = t, for 0 <= ecc < 1."""
    if not 0.0 <= ecc < 1.0:
        raise ValueError("eccentricity must satisfy 0 <= ecc < 1")
    t = float(t)
    if ecc == 0.0:
        return t
    # reduce to a mean anomaly in [-pi, pi)
    k = math.floor((t + math.pi) / TWO_PI)
    m = t - k * TWO_PI
    shift = k * TWO_PI
    lo, hi = m - ecc, m + ecc
    u = m
    for _ in range(max_iter):
        f = _kepler_residual(u, ecc, m)
        if abs(f) < tol:
            return u + shift
        du = f / (1.0 - ecc * math.cos(u))
        u_new = u - du
        if not lo <= u_new <= hi:
            break
        if u_new == u:
            return u + shift
        u = u_new
    return _bisect(ecc, m, lo, hi) + shift


def kepler_exact(ecc, t):
    u = solve_kepler_equation(ecc, t)
    return np.array([math.cos(u) - ecc, math.sqrt(1.0 - ecc * ecc) * math.sin(u)])


def kepler_exact_velocity(ecc, t):
    u = solve_kepler_equation(ecc, t)
    dudt = 1.0 / (1.0 - ecc * math.cos(u))
    return np.array([-math.sin(u) * dudt, math.sqrt(1.0 - ecc * ecc) * math.cos(u) * dudt])


def kepler_energy(y, dy):
    return 0.5 * float(np.dot(dy, dy)) - 1.0 / _radius(y)


@dataclass(frozen=True)
class KeplerSetup:
    eccentricity: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.eccentricity < 1.0:
            raise ValueError("eccentricity must satisfy 0 <= ecc < 1")

    @property
    def initial_state(self):
        return np.array([1.0 - self.eccentricity, 0.0])

    @property
    def initial_velocity(self):
        e = self.eccentricity
        return np.array([0.0, math.sqrt((1.0 + e) / (1.0 - e))])

    def problem(self):
        e = self.eccentricity
        return SecondOrderProblem(
            dimension=2,
            rhs=lambda t, y: kepler_rhs(y),
            initial_state=self.initial_state,
            initial_derivative=self.initial_velocity,
            exact_solution=lambda t: kepler_exact(e, t),
            exact_derivative=lambda t: kepler_exact_velocity(e, t),
            frequency_estimator=lambda t, y: kepler_frequency_estimate(y),
            name=f"kepler(ecc={e:g})",
        )


def kepler_problem(ecc=0.5):
    return KeplerSetup(ecc).problem()
