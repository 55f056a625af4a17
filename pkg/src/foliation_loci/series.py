"""Truncated series.

:class:`LaurentSeries` is a one-variable Laurent expansion known up to a
truncation order; :class:`PowerSeries` is a multivariate power series
truncated in total degree.  Coefficients may be any exact field elements
(rationals, ``FracElement``).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .errors import TruncationTooSmall


@dataclass(frozen=True)
class LaurentSeries:
    """``sum(coeffs[i] * t**(valuation + i))`` known for exponents ``< precision``."""

    var: str
    valuation: int
    coeffs: tuple
    precision: int

    def __post_init__(self):
        if len(self.coeffs) != self.precision - self.valuation:
            raise ValueError("coefficient count must equal precision - valuation")

    @classmethod
    def from_dict(cls, var, terms: dict, valuation: int, precision: int, zero=0):
        coeffs = tuple(terms.get(e, zero) for e in range(valuation, precision))
        return cls(var, valuation, coeffs, precision)

    def coeff(self, e: int):
        if e >= self.precision:
            raise TruncationTooSmall(f"coefficient of {self.var}^{e} is beyond the truncation order {self.precision}")
        if e < self.valuation:
            return self.coeffs[0] * 0 if self.coeffs else 0
        return self.coeffs[e - self.valuation]

    def _zero(self):
        return self.coeffs[0] * 0 if self.coeffs else 0

    def __add__(self, other: "LaurentSeries") -> "LaurentSeries":
        v = min(self.valuation, other.valuation)
        p = min(self.precision, other.precision)
        z = self._zero()
        coeffs = tuple(
            (self.coeff(e) if e >= self.valuation else z)
            + (other.coeff(e) if e >= other.valuation else z)
            for e in range(v, p)
        )
        return LaurentSeries(self.var, v, coeffs, p)

    def __neg__(self) -> "LaurentSeries":
        return LaurentSeries(self.var, self.valuation, tuple(-c for c in self.coeffs), self.precision)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "LaurentSeries":
        return LaurentSeries(self.var, self.valuation, tuple(c * a for a in self.coeffs), self.precision)

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by ``t**k``."""
        return LaurentSeries(self.var, self.valuation + k, self.coeffs, self.precision + k)

    def __mul__(self, other: "LaurentSeries") -> "LaurentSeries":
        v = self.valuation + other.valuation
        p = min(self.precision + other.valuation, other.precision + self.valuation)
        n = p - v
        z = self._zero()
        out = [z] * max(n, 0)
        for i, a in enumerate(self.coeffs[:n]):
            if not a:
                continue
            for j, b in enumerate(other.coeffs[: n - i]):
                if b:
                    out[i + j] = out[i + j] + a * b
        return LaurentSeries(self.var, v, tuple(out), p)

    def integrate(self) -> "LaurentSeries":
        """Formal primitive with zero constant term; refuses a ``t^-1`` term."""
        if self.valuation <= -1 < self.precision and self.coeff(-1):
            raise ValueError("series has a nonzero t^-1 coefficient")
        terms = {}
        for i, c in enumerate(self.coeffs):
            e = self.valuation + i
            if e != -1:
                terms[e + 1] = c * Fraction(1, e + 1)
        v = self.valuation + 1
        return LaurentSeries(self.var, v, tuple(terms.get(e, self._zero()) for e in range(v, self.precision + 1)), self.precision + 1)

    def residue(self):
        if self.precision <= -1:
            raise TruncationTooSmall("residue needs the t^-1 coefficient")
        return self.coeff(-1) if self.valuation <= -1 else self._zero()

    def truncate(self, precision: int) -> "LaurentSeries":
        if precision > self.precision:
            raise TruncationTooSmall("cannot extend a truncated series")
        return LaurentSeries(self.var, self.valuation, self.coeffs[: precision - self.valuation], precision)


def power_series_sqrt(coeffs: list, n: int) -> list:
    """Square root of ``1 + a_1 s + ...`` to ``n`` coefficients (branch value 1 at 0)."""
    if coeffs[0] != 1:
        raise ValueError("leading coefficient must be 1")
    zero = coeffs[0] * 0
    b = [coeffs[0]] + [zero] * (n - 1)
    for k in range(1, n):
        a = coeffs[k] if k < len(coeffs) else zero
        acc = a
        for i in range(1, k):
            acc = acc - b[i] * b[k - i]
        b[k] = acc * Fraction(1, 2)
    return b


def power_series_inverse(coeffs: list, n: int) -> list:
    zero = coeffs[0] * 0
    inv0 = 1 / coeffs[0]
    b = [inv0] + [zero] * (n - 1)
    for k in range(1, n):
        acc = zero
        for i in range(1, min(k, len(coeffs) - 1) + 1):
            acc = acc + coeffs[i] * b[k - i]
        b[k] = -acc * inv0
    return b


# ---------------------------------------------------------------- multivariate


def monomials_upto(nvars: int, degree: int) -> list[tuple[int, ...]]:
    """Exponent vectors of total degree ``<= degree``, graded then lex."""
    out = []
    for d in range(degree + 1):
        out.extend(_monomials_of_degree(nvars, d))
    return out


def _monomials_of_degree(nvars: int, d: int):
    if nvars == 0:
        return [()] if d == 0 else []
    if nvars == 1:
        return [(d,)]
    res = []
    for first in range(d, -1, -1):
        for rest in _monomials_of_degree(nvars - 1, d - first):
            res.append((first,) + rest)
    return res


def multi_factorial(alpha) -> int:
    out = 1
    for a in alpha:
        out *= factorial(a)
    return out


class PowerSeries:
    """Power series in ``nvars`` variables keeping total degrees ``<= order``."""

    __slots__ = ("nvars", "order", "terms")

    def __init__(self, nvars: int, order: int, terms: dict | None = None):
        self.nvars = nvars
        self.order = order
        self.terms = {a: c for a, c in (terms or {}).items() if c and sum(a) <= order}

    @classmethod
    def constant(cls, nvars, order, c):
        return cls(nvars, order, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars, order, i):
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, order, {tuple(e): Fraction(1)})

    def coefficient(self, alpha):
        return self.terms.get(tuple(alpha), 0)

    def __add__(self, other):
        if not isinstance(other, PowerSeries):
            other = PowerSeries.constant(self.nvars, self.order, other)
        out = dict(self.terms)
        for a, c in other.terms.items():
            out[a] = out.get(a, 0) + c
        return PowerSeries(self.nvars, min(self.order, other.order), out)

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries(self.nvars, self.order, {a: -c for a, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, PowerSeries):
            return PowerSeries(self.nvars, self.order, {a: c * other for a, c in self.terms.items()})
        order = min(self.order, other.order)
        out: dict = {}
        for a, c in self.terms.items():
            da = sum(a)
            for b, d in other.terms.items():
                if da + sum(b) > order:
                    continue
                key = tuple(x + y for x, y in zip(a, b))
                out[key] = out.get(key, 0) + c * d
        return PowerSeries(self.nvars, order, out)

    __rmul__ = __mul__

    def inverse(self):
        c0 = self.coefficient((0,) * self.nvars)
        if not c0:
            raise ZeroDivisionError("series with zero constant term is not invertible")
        # 1/(c0 (1 + h)) = (1/c0) * sum (-h)^k
        h = self * (1 / c0) - 1
        acc = PowerSeries.constant(self.nvars, self.order, Fraction(1))
        term = acc
        for _ in range(self.order):
            term = term * (-h)
            acc = acc + term
        return acc * (1 / c0)

    def diff(self, i: int):
        out = {}
        for a, c in self.terms.items():
            if a[i]:
                b = list(a)
                b[i] -= 1
                out[tuple(b)] = c * a[i]
        return PowerSeries(self.nvars, self.order, out)

    def integrate(self, i: int):
        """Primitive in variable ``i`` vanishing on ``t_i = 0`` (order unchanged)."""
        out = {}
        for a, c in self.terms.items():
            b = list(a)
            b[i] += 1
            out[tuple(b)] = c * Fraction(1, b[i])
        return PowerSeries(self.nvars, self.order, out)

    def truncate(self, order: int):
        return PowerSeries(self.nvars, min(order, self.order), self.terms)

    def valuation(self) -> int | None:
        return min((sum(a) for a in self.terms), default=None)

    def __eq__(self, other):
        return isinstance(other, PowerSeries) and self.terms == other.terms and self.order == other.order

    def __repr__(self):
        return f"PowerSeries({self.nvars}, {self.order}, {self.terms!r})"


def compose_poly(p, series: list) -> PowerSeries:
    """Substitute power series for the variables of polynomial ``p``."""
    nvars, order = series[0].nvars, min(s.order for s in series)
    powers: list[dict[int, PowerSeries]] = [{0: PowerSeries.constant(nvars, order, Fraction(1))} for _ in series]

    def power(j, e):
        cache = powers[j]
        if e not in cache:
            cache[e] = power(j, e - 1) * series[j]
        return cache[e]

    total = PowerSeries(nvars, order)
    for monom, coeff in p.iterterms():
        term = PowerSeries.constant(nvars, order, _to_fraction(coeff))
        for j, e in enumerate(monom):
            if e:
                term = term * power(j, e)
        total = total + term
    return total


def compose_rf(r, series: list) -> PowerSeries:
    num = compose_poly(r.numer, series)
    if r.denom == 1:
        return num
    return num * compose_poly(r.denom, series).inverse()


def _to_fraction(c):
    if isinstance(c, (int, Fraction)):
        return Fraction(c)
    return Fraction(int(c.numerator), int(c.denominator))

