"""De Rham cohomology of odd hyperelliptic families ``y^2 = f(x, lam)``.

Classes are written in the basis ``x^i dx/y`` (``i < 2g``).  Higher pole
orders are lowered with the exact forms ``d(h / y^(m-2))`` and the relation
``y^2 = f``; high powers of ``x`` at pole order one are removed with
``d(x^j y)``.  Univariate polynomials in ``x`` are coefficient lists (lowest
degree first) over the function field of the base.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import mpmath
from sympy.polys.matrices import DomainMatrix

from .algebra import (
    eval_rf,
    format_poly,
    format_rational,
    fraction_field,
    parse_poly,
    poly_ring,
)
from .connection import ConnectionMatrix
from .errors import FamilyError, PoleOrderParity

# ------------------------------------------------------------ univariate helpers


def _trim(p):
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return p


def _add(p, q):
    n = max(len(p), len(q))
    zero = (p or q or [0])[0] * 0
    out = [(p[i] if i < len(p) else zero) + (q[i] if i < len(q) else zero) for i in range(n)]
    return _trim(out)


def _scale(p, c):
    return _trim([c * a for a in p])


def _mul(p, q):
    if not p or not q:
        return []
    zero = p[0] * 0
    out = [zero] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if not a:
            continue
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return _trim(out)


def _deriv(p):
    return _trim([i * p[i] for i in range(1, len(p))])


def _divmod(p, q):
    p = _trim(p)
    q = _trim(q)
    if len(p) < len(q):
        return [], p
    zero = q[0] * 0
    quot = [zero] * (len(p) - len(q) + 1)
    rem = list(p)
    lead = q[-1]
    for k in range(len(p) - len(q), -1, -1):
        c = rem[k + len(q) - 1] / lead
        quot[k] = c
        if c:
            for i, b in enumerate(q):
                rem[k + i] = rem[k + i] - c * b
    return _trim(quot), _trim(rem[: len(q) - 1])


def _gcdex(f, g):
    """``(a, b)`` with ``a f + b g = 1``; raises if ``f`` and ``g`` share a factor."""
    one = f[0] * 0 + 1
    r0, r1 = _trim(f), _trim(g)
    s0, s1 = [one], []
    t0, t1 = [], [one]
    while r1:
        q, r = _divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _add(s0, _scale(_mul(q, s1), -one))
        t0, t1 = t1, _add(t0, _scale(_mul(q, t1), -one))
    if len(r0) != 1:
        raise FamilyError("f is not squarefree over the base function field")
    inv = one / r0[0]
    return _scale(s0, inv), _scale(t0, inv)


# ------------------------------------------------------------------- families


@dataclass(frozen=True)
class HyperellipticFamily:
    """``y^2 = f`` with ``f`` monic of odd degree ``2g+1 >= 3`` in ``x``."""

    base: tuple[str, ...]
    f: object  # PolyElement in poly_ring(("x",) + base)
    xvar: str = "x"

    def __post_init__(self):
        if self.xvar in self.base:
            raise FamilyError(f"{self.xvar!r} cannot be a base variable")
        coeffs = self.x_coeffs
        d = len(coeffs) - 1
        if d < 3 or d % 2 == 0:
            raise FamilyError(f"degree of f in {self.xvar} must be odd and >= 3, got {d}")
        if coeffs[-1] != self.field.one:
            raise FamilyError("f must be monic in x")
        _gcdex(coeffs, _deriv(coeffs))

    @classmethod
    def parse(cls, text: str, base, xvar: str = "x") -> "HyperellipticFamily":
        base = tuple(base)
        ring = poly_ring((xvar,) + base)
        return cls(base, parse_poly(text, ring), xvar)

    @property
    def ring(self):
        return poly_ring((self.xvar,) + self.base)

    @property
    def field(self):
        """Function field of the base."""
        return fraction_field(self.base)

    @cached_property
    def x_coeffs(self) -> list:
        K = self.field
        groups: dict = {}
        for monom, c in self.f.iterterms():
            groups.setdefault(monom[0], {})[monom[1:]] = c
        deg = max(groups, default=0)
        R = K.ring
        return [K(R(groups[i])) if i in groups else K.zero for i in range(deg + 1)]

    @property
    def degree(self) -> int:
        return len(self.x_coeffs) - 1

    @property
    def genus(self) -> int:
        return (self.degree - 1) // 2

    @cached_property
    def _bezout(self):
        return _gcdex(self.x_coeffs, _deriv(self.x_coeffs))

    @cached_property
    def discriminant(self):
        """``res_x(f, f')`` as a polynomial in the base variables."""
        x = self.ring.gens[0]
        res = self.f.resultant(self.f.diff(x))
        return self.field.ring(dict(res.iterterms())) if self.base else self.field.ring(res)

    def df(self, i: int) -> list:
        """Coefficients of ``df/d lam_i``."""
        v = self.field.gens[i]
        return _trim([c.diff(v) for c in self.x_coeffs])

    def coeffs_of(self, p) -> list:
        """Coefficient list in ``x`` of a polynomial in ``(x, base)``."""
        K = self.field
        groups: dict = {}
        for monom, c in p.iterterms():
            groups.setdefault(monom[0], {})[monom[1:]] = c
        deg = max(groups, default=-1)
        R = K.ring
        return _trim([K(R(groups[i])) if i in groups else K.zero for i in range(deg + 1)])

    def to_json(self) -> dict:
        return {
            "f": format_poly(self.f),
            "base": list(self.base),
            "genus": self.genus,
            "discriminant": format_poly(self.discriminant),
        }


@dataclass(frozen=True)
class DeRhamForm:
    """``num(x) dx / y^pole`` with ``num`` a coefficient list over the base function field."""

    num: tuple
    pole: int = 1

    @classmethod
    def monomial(cls, fam: HyperellipticFamily, i: int, pole: int = 1) -> "DeRhamForm":
        K = fam.field
        return cls(tuple([K.zero] * i + [K.one]), pole)

    @classmethod
    def from_poly(cls, p, fam: HyperellipticFamily, pole: int = 1) -> "DeRhamForm":
        return cls(tuple(fam.coeffs_of(p)), pole)

    def text(self, xvar: str = "x") -> str:
        parts = []
        for i in range(len(self.num) - 1, -1, -1):
            c = self.num[i]
            if not c:
                continue
            mono = "" if i == 0 else (xvar if i == 1 else f"{xvar}^{i}")
            cs = format_rational(c)
            if not mono:
                parts.append(cs if " " not in cs else f"({cs})")
            elif cs == "1":
                parts.append(mono)
            else:
                parts.append(f"({cs})*{mono}")
        return f"({' + '.join(parts) or '0'}) dx/y^{self.pole}"


def derham_basis(fam: HyperellipticFamily) -> list[DeRhamForm]:
    return [DeRhamForm.monomial(fam, i) for i in range(2 * fam.genus)]


def _reduce_pole_one(h: list, fam: HyperellipticFamily) -> list:
    """Coordinates of ``h dx/y`` after removing ``x^i``, ``i >= 2g``."""
    f = fam.x_coeffs
    fp = _deriv(f)
    d = fam.degree
    h = _trim(h)
    K = fam.field
    while len(h) - 1 >= 2 * fam.genus:
        i = len(h) - 1
        j = i - 2 * fam.genus
        # d(x^j y) = (j x^(j-1) f + x^j f'/2) dx/y, leading coefficient j + d/2
        exact = _add(_mul([K.zero] * (j - 1) + [K(j)], f) if j else [], _scale([K.zero] * j + fp, K.one / 2))
        lead = K(2 * j + d) / 2
        h = _add(h, _scale(exact, -h[-1] / lead))
    return list(h) + [K.zero] * (2 * fam.genus - len(h))


def griffiths_dwork_reduce(form: DeRhamForm, fam: HyperellipticFamily) -> list:
    m = form.pole
    if m % 2 == 0:
        raise PoleOrderParity(f"pole order {m} is even")
    if m < 1:
        raise PoleOrderParity(f"pole order {m} must be a positive odd integer")
    a, b = fam._bezout
    K = fam.field
    h = _trim(form.num)
    while m >= 3:
        # h = h a f + h b f';  g f' dx/y^m == 2/(m-2) g' dx/y^(m-2)
        hb = _mul(h, b)
        h = _add(_mul(h, a), _scale(_deriv(hb), K(2) / (m - 2)))
        m -= 2
    return _reduce_pole_one(h, fam)


def derivative_forms(form: DeRhamForm, fam: HyperellipticFamily, i: int) -> list[DeRhamForm]:
    """``d/d lam_i`` of ``num dx / y^m`` as a sum of two forms."""
    v = fam.field.gens[i]
    m = form.pole
    out = []
    dnum = _trim([c.diff(v) for c in form.num])
    if dnum:
        out.append(DeRhamForm(tuple(dnum), m))
    extra = _scale(_mul(list(form.num), fam.df(i)), -fam.field(m) / 2)
    if extra:
        out.append(DeRhamForm(tuple(extra), m + 2))
    return out


def reduce_sum(forms, fam: HyperellipticFamily) -> list:
    K = fam.field
    total = [K.zero] * (2 * fam.genus)
    for fm in forms:
        total = [a + b for a, b in zip(total, griffiths_dwork_reduce(fm, fam))]
    return total


def reduce_derivative(form: DeRhamForm, fam: HyperellipticFamily, i: int) -> list:
    return reduce_sum(derivative_forms(form, fam, i), fam)


def gauss_manin_matrix(fam: HyperellipticFamily) -> ConnectionMatrix:
    """``Omega_i[j]`` holds the coordinates of ``nabla_i (x^j dx/y)``."""
    basis = derham_basis(fam)
    mats = []
    for i in range(len(fam.base)):
        mats.append(tuple(tuple(reduce_derivative(w, fam, i)) for w in basis))
    conn = ConnectionMatrix(fam.base, tuple([list(map(list, M)) for M in mats]), (fam.discriminant,))
    if len(fam.base) > 1:
        conn.check_flat()
    return conn


@dataclass(frozen=True)
class PFOperator:
    """``d^r + a_{r-1} d^(r-1) + ... + a_0`` acting on functions of ``var``."""

    var: str
    coeffs: tuple  # a_0 .. a_r, a_r = 1

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def text(self) -> str:
        parts = []
        for i in range(self.order, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            op = "" if i == 0 else ("d" if i == 1 else f"d^{i}")
            cs = format_rational(c)
            if not op:
                parts.append(f"({cs})")
            elif cs == "1":
                parts.append(op)
            else:
                parts.append(f"({cs})*{op}")
        return " + ".join(parts)

    def apply(self, derivs, point):
        """``L(u)`` at ``point`` given ``derivs[i] = u^(i)(point)`` (mpmath numbers)."""
        total = 0
        for c, u in zip(self.coeffs, derivs):
            if c:
                total += _mpval(c, point) * u
        return total

    def to_json(self) -> dict:
        return {
            "variable": self.var,
            "order": self.order,
            "coefficients": [format_rational(c) for c in self.coeffs],
            "text": self.text(),
        }


def _mpval(c, point):
    q = eval_rf(c, point)
    return mpmath.mpf(q.numerator) / q.denominator


def picard_fuchs(fam: HyperellipticFamily, form: DeRhamForm,
                 conn: ConnectionMatrix | None = None) -> PFOperator:
    if len(fam.base) != 1:
        raise FamilyError("Picard-Fuchs operators need a one-dimensional base")
    conn = conn or gauss_manin_matrix(fam)
    K = fam.field
    lam = K.gens[0]
    Omega = conn.matrices[0]
    n = 2 * fam.genus
    v = griffiths_dwork_reduce(form, fam)
    if not any(v):
        return PFOperator(fam.base[0], (K.one,))  # exact form
    rows = [v]
    dom = K.to_domain()
    while True:
        prev = rows[-1]
        nxt = [prev[k].diff(lam) + sum((prev[j] * Omega[j][k] for j in range(n)), K.zero) for k in range(n)]
        rows.append(nxt)
        s = len(rows) - 1
        # solve sum a_i rows[i] = 0 with a_s = 1
        A = DomainMatrix([[dom.convert(rows[i][k]) for i in range(s + 1)] for k in range(n)], (n, s + 1), dom)
        null = A.nullspace().to_list()
        if null:
            vec = null[0]
            lead = vec[s]
            if lead:
                coeffs = tuple(K(c) / K(lead) for c in vec)
                return PFOperator(fam.base[0], coeffs)
        if s > n:
            raise FamilyError("no Picard-Fuchs relation found up to order 2g")
