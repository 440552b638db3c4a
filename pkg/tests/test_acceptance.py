"""Exit criteria, one test per criterion at its stated tolerance and runtime."""

from fractions import Fraction
import math
import time

import numpy as np
import pytest

from oscifit.coefficients import coefficients_for
from oscifit.integrator import IntegrationConfig, convergence_study, integrate
from oscifit.phase import phase_lag_at, phase_lag_derivatives, sensitivity_order
from oscifit.problems import (
    harmonic_problem,
    kepler_energy,
    kepler_exact,
    kepler_exact_velocity,
    kepler_problem,
    solve_kepler_equation,
)
from oscifit.scheme import Scheme
from oscifit.series import derive_scheme_series, printed_series

F = Fraction
FITTED = (Scheme.T, Scheme.S, Scheme.SD)


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


@pytest.mark.criterion(1, "series verification: S through v^6, a(v) leading -v^6/240")
def test_series_verification():
    derive_scheme_series.cache_clear()
    with Timer() as timer:
        b0, b1, _ = derive_scheme_series(Scheme.S)
        _, _, a = derive_scheme_series(Scheme.SD)
        printed = printed_series()
    for name, series in (("b0", b0), ("b1", b1)):
        for power in range(7):
            assert series[power] == printed[Scheme.S][name].get(power, 0), (name, power)
    assert b1[4] == F(5, 2016)
    assert a.valuation() == 6
    assert a[6] == F(-1, 240) == printed[Scheme.SD]["a"][6]
    assert timer.elapsed < 1.0


@pytest.mark.criterion(2, "classical limit at v0 = 1e-6 within 1e-10")
def test_classical_limit():
    with Timer() as timer:
        for scheme in Scheme:
            c = coefficients_for(scheme, 1e-6)
            assert abs(c.b0 - 1 / 12) < 1e-10
            assert abs(c.b1 - 5 / 6) < 1e-10
            assert abs(c.a) < 1e-10
    assert timer.elapsed < 1.0


@pytest.mark.criterion(3, "fitting conditions |l| < 1e-10, |l'| < 1e-7, |l''| < 1e-5")
def test_fitting_conditions():
    worst = {"l": 0.0, "d1": 0.0, "d2": 0.0}
    with Timer() as timer:
        for v0 in np.round(np.arange(1, 16) * 0.1, 10):
            for scheme in FITTED:
                lag = phase_lag_at(coefficients_for(scheme, v0), v0).phase_lag
                worst["l"] = max(worst["l"], abs(lag))
            worst["d1"] = max(worst["d1"], abs(phase_lag_derivatives(Scheme.S, v0, 1)[0]))
            d1, d2 = phase_lag_derivatives(Scheme.SD, v0, 2)
            worst["d1"] = max(worst["d1"], abs(d1))
            worst["d2"] = max(worst["d2"], abs(d2))
    assert worst["l"] < 1e-10, worst
    assert worst["d1"] < 1e-7, worst
    assert worst["d2"] < 1e-5, worst
    assert timer.elapsed < 5.0


@pytest.mark.criterion(4, "sensitivity slopes 1/2/3 +- 0.15 at v0 in {0.3, 0.5, 0.8, 1.0, 1.2}")
def test_sensitivity_slopes():
    expected = {Scheme.T: 1.0, Scheme.S: 2.0, Scheme.SD: 3.0}
    deltas = np.logspace(-3, -1, 9)
    failures = []
    with Timer() as timer:
        for scheme, target in expected.items():
            for v0 in (0.3, 0.5, 0.8, 1.0, 1.2):
                slope, _ = sensitivity_order(scheme, v0, deltas)
                if abs(slope - target) > 0.15:
                    failures.append(f"{scheme}@{v0}: slope {slope:.4f}")
    assert not failures, "; ".join(failures)
    assert timer.elapsed < 5.0


@pytest.mark.criterion(5, "trig fit exact on y'' = -y (< 1e-10), classical > 1e-6")
def test_exactness_on_fitted_problem():
    p = harmonic_problem(1.0)
    with Timer() as timer:
        fitted = integrate(p, IntegrationConfig(h=0.1, num_steps=1000, scheme="T", omega0=1.0))
        plain = integrate(p, IntegrationConfig(h=0.1, num_steps=1000, scheme="C"))
    assert fitted.max_error < 1e-10, fitted.max_error
    assert plain.max_error > 1e-6, plain.max_error
    assert plain.max_error / fitted.max_error >= 1e4
    assert timer.elapsed < 1.0


@pytest.mark.criterion(6, "Kepler e=0.5 h=0.1: err(SD) < err(S) < err(T) < err(C), each by >= 1.2x")
def test_kepler_ordering():
    p = kepler_problem(0.5)
    errors = {}
    with Timer() as timer:
        for scheme in (Scheme.C, Scheme.T, Scheme.S, Scheme.SD):
            cfg = IntegrationConfig(h=0.1, num_steps=10000, scheme=scheme, frequency_mode="per_step")
            errors[scheme] = integrate(p, cfg).mean_error
    ratios = {
        "C/T": errors[Scheme.C] / errors[Scheme.T],
        "T/S": errors[Scheme.T] / errors[Scheme.S],
        "S/SD": errors[Scheme.S] / errors[Scheme.SD],
    }
    summary = ", ".join(f"{k}={v:.4f}" for k, v in ratios.items())
    assert errors[Scheme.SD] <= errors[Scheme.S] <= errors[Scheme.T] <= errors[Scheme.C], summary
    assert all(r >= 1.2 for r in ratios.values()), f"separation below 1.2: {summary}"
    assert timer.elapsed < 30.0


@pytest.mark.criterion(7, "classical observed order 4.0 +- 0.2")
def test_convergence_order():
    with Timer() as timer:
        order, _ = convergence_study(harmonic_problem(1.0), "C", [0.2, 0.1, 0.05, 0.025])
    assert abs(order - 4.0) <= 0.2, order
    assert timer.elapsed < 5.0


def _bisection(ecc, t):
    lo, hi = t - ecc - 1e-9, t + ecc + 1e-9
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid - ecc * math.sin(mid) - t > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@pytest.mark.criterion(8, "Kepler solver vs bisection to 1e-12; exact-orbit energy to 1e-12")
def test_kepler_equation_oracle():
    rng = np.random.default_rng(2024)
    with Timer() as timer:
        eccs = rng.uniform(0.0, 0.9, 1000)
        times = rng.uniform(-4 * math.pi, 4 * math.pi, 1000)
        worst = max(abs(solve_kepler_equation(e, t) - _bisection(e, t)) for e, t in zip(eccs, times))
        energies = [
            kepler_energy(kepler_exact(0.5, t), kepler_exact_velocity(0.5, t))
            for t in np.linspace(0.0, 50.0, 500)
        ]
    assert worst < 1e-12, worst
    assert np.ptp(energies) < 1e-12
    assert timer.elapsed < 2.0
