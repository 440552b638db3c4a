from enum import Enum


class Scheme(str, Enum):
    """Coefficient construction for the two-step symmetric stencil.

    C   classical, maximal algebraic order
    T   trigonometrically fitted at v0
    S   fitted, with vanishing first phase-lag derivative at v0
    SD  fitted, with vanishing first and second derivatives (uses the
        y_n weight perturbation ``a``)
    """

    C = "C"
    T = "T"
    S = "S"
    SD = "SD"

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().upper())
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown scheme {value!r}; expected one of {names}") from None

    @property
    def fitted(self):
        return self is not Scheme.C


ALL_SCHEMES = (Scheme.C, Scheme.T, Scheme.S, Scheme.SD)
