"""Truncated power series in one variable with exact rational coefficients.

The coefficient series of the fitted schemes are derived here from their
defining conditions, with cos and sin replaced by Maclaurin polynomials and
the linear system solved by Cramer's rule over the series ring.
"""

from fractions import Fraction
from functools import lru_cache
from math import factorial

from .errors import DivisionByZeroSeries, ValuationError
from .scheme import Scheme

DEFAULT_ORDER = 14

# Extra working order carried through the Cramer solve; the largest
# determinant valuation among the schemes is 5.
_GUARD = 8


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


class RationalSeries:
    """c_0 + c_1 v + ... + c_N v^N + O(v^(N+1)).

    ``coefficients[k]`` is the coefficient of v^k and ``order`` is N.
    """

    __slots__ = ("coefficients", "order")

    def __init__(self, coefficients, order=None):
        coeffs = [_as_fraction(c) for c in coefficients]
        if order is None:
            order = len(coeffs) - 1
        if order < 0:
            raise ValueError("truncation order must be >= 0")
        coeffs = coeffs[: order + 1]
        coeffs.extend([Fraction(0)] * (order + 1 - len(coeffs)))
        self.coefficients = tuple(coeffs)
        self.order = order

    @classmethod
    def constant(cls, value, order):
        return cls([value], order)

    @classmethod
    def monomial(cls, degree, order, coefficient=1):
        coeffs = [0] * (order + 1)
        if degree <= order:
            coeffs[degree] = coefficient
        return cls(coeffs, order)

    def __repr__(self):
        return f"RationalSeries({[str(c) for c in self.coefficients]}, order={self.order})"

    def __str__(self):
        terms = []
        for k, c in enumerate(self.coefficients):
            if c == 0:
                continue
            if k == 0:
                terms.append(str(c))
            elif k == 1:
                terms.append(f"{c}*v")
            else:
                terms.append(f"{c}*v^{k}")
        body = " + ".join(terms) if terms else "0"
        return f"{body} + O(v^{self.order + 1})"

    def __eq__(self, other):
        if isinstance(other, RationalSeries):
            return self.order == other.order and self.coefficients == other.coefficients
        return NotImplemented

    def __hash__(self):
        return hash((self.coefficients, self.order))

    def __getitem__(self, k):
        return self.coefficients[k]

    def __len__(self):
        return len(self.coefficients)

    def valuation(self):
        """Lowest degree with a nonzero coefficient, or None for the zero series."""
        for k, c in enumerate(self.coefficients):
            if c != 0:
                return k
        return None

    def truncate(self, order):
        if order > self.order:
            raise ValueError(f"cannot extend a series known to order {self.order} to {order}")
        return RationalSeries(self.coefficients[: order + 1], order)

    def evaluate(self, x):
        """Evaluate the truncated polynomial at float ``x`` (Horner)."""
        acc = 0.0
        for c in reversed(self.coefficients):
            acc = acc * x + float(c)
        return acc

    def _coerce(self, other):
        if isinstance(other, RationalSeries):
            return other
        if isinstance(other, (int, Fraction)):
            return RationalSeries.constant(other, self.order)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return series_add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return RationalSeries([-c for c in self.coefficients], self.order)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return series_add(self, -other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return series_add(other, -self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RationalSeries([c * other for c in self.coefficients], self.order)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return series_mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise DivisionByZeroSeries("division by zero scalar")
            return RationalSeries([c / other for c in self.coefficients], self.order)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return series_div(self, other)


def series_add(a, b):
    order = min(a.order, b.order)
    return RationalSeries(
        [a.coefficients[k] + b.coefficients[k] for k in range(order + 1)], order
    )


def series_mul(a, b):
    order = min(a.order, b.order)
    ac, bc = a.coefficients, b.coefficients
    out = [Fraction(0)] * (order + 1)
    for i in range(order + 1):
        if ac[i] == 0:
            continue
        for j in range(order + 1 - i):
            out[i + j] += ac[i] * bc[j]
    return RationalSeries(out, order)


def series_div(a, b):
    """Quotient q with a = q*b, known to order min(a.order, b.order) - val(b)."""
    m = b.valuation()
    if m is None:
        raise DivisionByZeroSeries("divisor is zero up to its truncation order")
    va = a.valuation()
    if va is not None and va < m:
        raise ValuationError(f"dividend valuation {va} is below divisor valuation {m}")
    order = min(a.order, b.order) - m
    if order < 0:
        raise ValuationError("no coefficients of the quotient are determined")
    num = a.coefficients[m:]
    den = b.coefficients[m:]
    lead = den[0]
    q = []
    for k in range(order + 1):
        acc = num[k]
        for j in range(1, k + 1):
            acc -= den[j] * q[k - j]
        q.append(acc / lead)
    return RationalSeries(q, order)


def elementary_series(kind, order):
    """Maclaurin series of cos or sin with exact coefficients."""
    if order < 0:
        raise ValueError("order must be >= 0")
    if kind not in ("cos", "sin"):
        raise ValueError(f"unknown elementary function {kind!r}")
    start = 0 if kind == "cos" else 1
    coeffs = [Fraction(0)] * (order + 1)
    for k in range(start, order + 1, 2):
        sign = -1 if (k // 2) % 2 else 1
        coeffs[k] = Fraction(sign, factorial(k))
    return RationalSeries(coeffs, order)


def _det(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = None
    for j in range(n):
        entry = m[0][j]
        if isinstance(entry, int) and entry == 0:
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = entry * _det(minor)
        term = term if j % 2 == 0 else -term
        total = term if total is None else total + term
    return total


def cramer_solve(matrix, rhs):
    """Solve a square linear system over any ring with exact division."""
    det = _det(matrix)
    out = []
    for j in range(len(matrix)):
        replaced = [row[:j] + [r] + row[j + 1:] for row, r in zip(matrix, rhs)]
        out.append(_det(replaced) / det)
    return out


def condition_system(scheme, order):
    """Defining conditions of a fitted scheme as a series-valued linear system.

    Unknowns are (b0, b1) for T and S, (b0, b1, a) for SD.  Rows come from
    g(v) = 2 cos v (1 + v^2 b0) - (2 - a - v^2 b1) and its v-derivatives.
    """
    scheme = Scheme.parse(scheme)
    cos = elementary_series("cos", order)
    sin = elementary_series("sin", order)
    v = RationalSeries.monomial(1, order)
    v2 = RationalSeries.monomial(2, order)
    zero = RationalSeries.constant(0, order)
    one = RationalSeries.constant(1, order)

    fit = [2 * v2 * cos, v2]
    fit_rhs = 2 - 2 * cos
    d1 = [4 * v * cos - 2 * v2 * sin, 2 * v]
    d1_rhs = 2 * sin
    d2 = [4 * cos - 8 * v * sin - 2 * v2 * cos, RationalSeries.constant(2, order)]
    d2_rhs = 2 * cos

    if scheme is Scheme.T:
        return [fit, [RationalSeries.constant(2, order), one]], [fit_rhs, one]
    if scheme is Scheme.S:
        return [fit, d1], [fit_rhs, d1_rhs]
    if scheme is Scheme.SD:
        return [fit + [one], d1 + [zero], d2 + [zero]], [fit_rhs, d1_rhs, d2_rhs]
    raise ValueError("the classical scheme has no defining conditions")


@lru_cache(maxsize=None)
def derive_scheme_series(scheme, order=DEFAULT_ORDER):
    """Exact Taylor series (b0, b1, a) of a scheme's coefficients in v."""
    scheme = Scheme.parse(scheme)
    if order < 6:
        raise ValueError("order must be >= 6")
    if scheme is Scheme.C:
        return (
            RationalSeries.constant(Fraction(1, 12), order),
            RationalSeries.constant(Fraction(5, 6), order),
            RationalSeries.constant(0, order),
        )
    matrix, rhs = condition_system(scheme, order + _GUARD)
    solution = [s.truncate(order) for s in cramer_solve(matrix, rhs)]
    if scheme is Scheme.SD:
        b0, b1, a = solution
    else:
        (b0, b1), a = solution, RationalSeries.constant(0, order)
    return b0, b1, a


@lru_cache(maxsize=None)
def printed_series():
    """Published coefficient tables as {scheme: {name: {power: Fraction}}}."""
    import json
    from importlib import resources

    raw = json.loads(
        resources.files("oscifit").joinpath("data/printed_series.json").read_text("utf-8")
    )
    table = {}
    for tag, entry in raw.items():
        if tag.startswith("_"):
            continue
        names = {
            name: {int(p): Fraction(c) for p, c in entry[name].items()}
            for name in ("b0", "b1", "a")
        }
        names["order"] = entry["order"]
        names["a_order"] = entry.get("a_order", entry["order"])
        table[Scheme(tag)] = names
    return table


def discrepancy_report(order=DEFAULT_ORDER, schemes=(Scheme.C, Scheme.T, Scheme.S, Scheme.SD)):
    """Compare derived and published coefficients power by power.

    Returns a list of dicts with keys scheme, coefficient, power, derived,
    printed, match.  Powers beyond the published truncation are skipped.
    """
    rows = []
    table = printed_series()
    for scheme in schemes:
        scheme = Scheme.parse(scheme)
        derived = dict(zip(("b0", "b1", "a"), derive_scheme_series(scheme, order)))
        entry = table[scheme]
        for name in ("b0", "b1", "a"):
            known = entry["a_order"] if name == "a" else entry["order"]
            for power in range(min(order, known) + 1):
                d = derived[name][power]
                p = entry[name].get(power, Fraction(0))
                if d == 0 and p == 0:
                    continue
                rows.append(
                    {
                        "scheme": scheme,
                        "coefficient": name,
                        "power": power,
                        "derived": d,
                        "printed": p,
                        "match": d == p,
                    }
                )
    return rows


def gate_passes(rows, through=6):
    """True when S, SD and a(v) agree with the published values through ``through``."""
    for row in rows:
        if row["power"] > through:
            continue
        gated = row["scheme"] in (Scheme.S, Scheme.SD) or row["coefficient"] == "a"
        if gated and not row["match"]:
            return False
    return True
