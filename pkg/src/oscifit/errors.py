"""Exception types raised across the package."""


class OscifitError(Exception):
    """Base class for all package errors."""


class NumericalError(OscifitError):
    """A computation failed for numerical reasons (CLI exit code 3)."""


class DivisionByZeroSeries(OscifitError, ZeroDivisionError):
    pass


class ValuationError(OscifitError, ValueError):
    pass


class FrequencyOutOfRange(NumericalError, ValueError):
    def __init__(self, v0, v_max, step=None):
        self.v0 = v0
        self.v_max = v_max
        self.step = step
        where = f" at step {step}" if step is not None else ""
        super().__init__(f"scaled frequency {v0!r} outside [0, {v_max}){where}")


class SingularSystem(NumericalError):
    pass


class DegenerateDenominator(NumericalError):
    pass


class OutsidePeriodicity(NumericalError):
    pass


class CorrectorDivergence(NumericalError):
    def __init__(self, step, iterations, last_update):
        self.step = step
        self.iterations = iterations
        self.last_update = last_update
        super().__init__(
            f"corrector did not converge at step {step} after {iterations} "
            f"iterations (last update {last_update:.3e})"
        )


class MissingExactSolution(OscifitError, ValueError):
    pass


class SingularOrigin(NumericalError, ValueError):
    pass
