"""Two-step symmetric integration of y'' = f(t, y).

Each step solves

    y[n+1] = (2 - a) y[n] - y[n-1] + h^2 (b0 (f[n-1] + f(t[n+1], y[n+1])) + b1 f[n])

by fixed-point iteration from an explicit predictor.  In ``per_step``
frequency mode the weights are refitted every step at v = w(t[n], y[n]) h.
"""

from dataclasses import dataclass, field
import math
from typing import Optional

import numpy as np

from .coefficients import V_MAX, coefficients_for
from .errors import CorrectorDivergence, FrequencyOutOfRange, MissingExactSolution
from .scheme import Scheme

FIXED = "fixed"
PER_STEP = "per_step"
BOOTSTRAP_SUBSTEPS = 100


@dataclass
class IntegrationConfig:
    h: float
    num_steps: int
    scheme: Scheme = Scheme.C
    frequency_mode: str = FIXED
    omega0: Optional[float] = None
    corrector_tol: float = 1e-14
    corrector_max_iters: int = 50
    startup: str = "exact"

    def __post_init__(self):
        self.scheme = Scheme.parse(self.scheme)
        self.frequency_mode = self.frequency_mode.replace("-", "_")
        if not self.h > 0:
            raise ValueError("step size must be positive")
        if self.num_steps < 1:
            raise ValueError("num_steps must be >= 1")
        if self.frequency_mode not in (FIXED, PER_STEP):
            raise ValueError(f"unknown frequency mode {self.frequency_mode!r}")
        if self.startup not in ("exact", "bootstrap"):
            raise ValueError(f"unknown startup {self.startup!r}")
        if self.frequency_mode == FIXED and self.scheme.fitted:
            if self.omega0 is None:
                raise ValueError("fixed frequency mode needs omega0 for fitted schemes")
            if abs(self.omega0) * self.h >= V_MAX:
                raise FrequencyOutOfRange(abs(self.omega0) * self.h, V_MAX)


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    scheme: Scheme
    h: float
    per_step_error: Optional[np.ndarray] = None
    mean_error: Optional[float] = None
    max_error: Optional[float] = None
    corrector_iterations: list = field(default_factory=list)

    @property
    def num_steps(self):
        return len(self.times) - 1


def _rk4_bootstrap(problem, h, substeps=BOOTSTRAP_SUBSTEPS):
    y = problem.initial_state.copy()
    dy = problem.initial_derivative.copy()
    dt = h / substeps
    t = 0.0
    f = problem.rhs
    for _ in range(substeps):
        k1y, k1v = dy, f(t, y)
        k2y, k2v = dy + 0.5 * dt * k1v, f(t + 0.5 * dt, y + 0.5 * dt * k1y)
        k3y, k3v = dy + 0.5 * dt * k2v, f(t + 0.5 * dt, y + 0.5 * dt * k2y)
        k4y, k4v = dy + dt * k3v, f(t + dt, y + dt * k3y)
        y = y + dt / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y)
        dy = dy + dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
        t += dt
    return y


def startup_state(problem, config):
    """The two starting values (y0, y1) of the recurrence."""
    y0 = problem.initial_state.copy()
    if config.startup == "exact":
        if problem.exact_solution is None:
            raise MissingExactSolution("exact startup requested but the problem has no exact solution")
        y1 = np.asarray(problem.exact_solution(config.h), dtype=float)
    else:
        y1 = _rk4_bootstrap(problem, config.h)
    return y0, y1


def _corrector(problem, coeffs, h, t_next, base, y_guess, tol, max_iters, step_index):
    h2b0 = h * h * coeffs.b0
    y = y_guess
    delta = math.inf
    for it in range(1, max_iters + 1):
        f_next = problem.rhs(t_next, y)
        y_new = base + h2b0 * f_next
        delta = float(np.max(np.abs(y_new - y)))
        y = y_new
        if delta <= tol * float(np.max(np.abs(y_new))) or delta == 0.0:
            return y, it
        if not math.isfinite(delta):
            break
    raise CorrectorDivergence(step_index, it, delta)


def _advance(problem, coeffs, h, t_n, y_prev, y_n, f_prev, f_n, tol, max_iters, step_index):
    h2 = h * h
    lin = (2.0 - coeffs.a) * y_n - y_prev
    base = lin + h2 * (coeffs.b0 * f_prev + coeffs.b1 * f_n)
    predictor = lin + h2 * (2.0 * coeffs.b0 + coeffs.b1) * f_n
    return _corrector(problem, coeffs, h, t_n + h, base, predictor, tol, max_iters, step_index)


def step(problem, coeffs, h, t_n, y_prev, y_n, tol=1e-14, max_iters=50):
    """One step of the stencil; returns y[n+1]."""
    y_prev = np.asarray(y_prev, dtype=float)
    y_n = np.asarray(y_n, dtype=float)
    f_prev = problem.rhs(t_n - h, y_prev)
    f_n = problem.rhs(t_n, y_n)
    y_next, _ = _advance(problem, coeffs, h, t_n, y_prev, y_n, f_prev, f_n, tol, max_iters, None)
    return y_next


def _position_error(problem, t, y):
    exact = np.asarray(problem.exact_solution(t), dtype=float)
    sl = problem.position_slice
    return float(np.linalg.norm(y[sl] - exact[sl]))


def integrate(problem, config):
    """Run startup plus ``num_steps - 1`` steps and collect the trajectory.

    Errors are Euclidean position errors against the exact solution; the
    mean and max are taken over points 1..num_steps.
    """
    if config.frequency_mode == PER_STEP and problem.frequency_estimator is None:
        raise ValueError("per-step frequency mode needs a frequency estimator")
    h = config.h
    n_total = config.num_steps
    times = np.arange(n_total + 1) * h
    states = np.empty((n_total + 1, problem.dimension))
    y0, y1 = startup_state(problem, config)
    states[0], states[1] = y0, y1

    fixed = None
    if config.frequency_mode == FIXED or not config.scheme.fitted:
        omega = config.omega0 if config.omega0 is not None else 0.0
        fixed = coefficients_for(config.scheme, omega * h)

    iterations = []
    f_prev = problem.rhs(times[0], y0)
    f_n = problem.rhs(times[1], y1)
    for n in range(1, n_total):
        t_n = times[n]
        if fixed is None:
            v = problem.frequency_estimator(t_n, states[n]) * h
            try:
                coeffs = coefficients_for(config.scheme, v)
            except FrequencyOutOfRange as exc:
                raise FrequencyOutOfRange(exc.v0, exc.v_max, step=n) from None
        else:
            coeffs = fixed
        y_next, its = _advance(
            problem, coeffs, h, t_n, states[n - 1], states[n], f_prev, f_n,
            config.corrector_tol, config.corrector_max_iters, n,
        )
        states[n + 1] = y_next
        iterations.append(its)
        f_prev, f_n = f_n, problem.rhs(times[n + 1], y_next)

    traj = Trajectory(times, states, config.scheme, h, corrector_iterations=iterations)
    if problem.exact_solution is not None:
        errors = np.array([_position_error(problem, t, y) for t, y in zip(times, states)])
        traj.per_step_error = errors
        traj.mean_error = float(np.mean(errors[1:]))
        traj.max_error = float(np.max(errors[1:]))
    return traj


def convergence_study(problem, scheme, h_list, t_end=10.0, omega0=None, startup="exact"):
    """Observed order from the final-time error over decreasing step sizes.

    ``t_end`` must be an integer multiple of every step size.  With
    ``omega0`` set, fitted schemes run in fixed frequency mode; otherwise
    they use the problem's estimator per step.  Returns (order, errors).
    """
    hs = [float(h) for h in h_list]
    if problem.exact_solution is None:
        raise MissingExactSolution("convergence study needs an exact solution")
    if any(b >= a for a, b in zip(hs, hs[1:])):
        raise ValueError("h_list must be decreasing")
    scheme = Scheme.parse(scheme)
    mode = FIXED if (omega0 is not None or not scheme.fitted) else PER_STEP
    errors = []
    for h in hs:
        n = int(round(t_end / h))
        if abs(n * h - t_end) > 1e-9 * t_end:
            raise ValueError(f"t_end={t_end} is not a multiple of h={h}")
        config = IntegrationConfig(
            h=h, num_steps=n, scheme=scheme, frequency_mode=mode, omega0=omega0, startup=startup
        )
        traj = integrate(problem, config)
        errors.append(_position_error(problem, traj.times[-1], traj.states[-1]))
    errors = np.array(errors)
    slope = np.polyfit(np.log(hs), np.log(np.maximum(errors, 1e-300)), 1)[0]
    return float(slope), errors
