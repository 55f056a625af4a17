"""Foliations generated by commuting rational vector fields on affine charts."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from itertools import combinations
from operator import mul
from typing import Sequence

import flint

from .algebra import (
    Ideal,
    as_rational,
    convert,
    eval_poly,
    eval_rf,
    format_poly,
    format_rational,
    fraction_field,
    groebner_basis,
    poly_ring,
    qq,
    reduce_mod_ideal,
    rf_degree,
    total_degree,
)
from .connection import ConnectionMatrix
from .errors import (
    ChartDenominator,
    CommutationFailure,
    DependentFields,
    PointOffChart,
    TangencyFailure,
)
from .series import PowerSeries, compose_rf, monomials_upto


@dataclass(frozen=True)
class AffineChart:
    """Locally closed chart ``V(ideal) minus V(prod(inverted))`` in affine space."""

    variables: tuple[str, ...]
    ideal: Ideal
    inverted: tuple = ()

    @classmethod
    def affine_space(cls, names: Sequence[str], inverted=()) -> "AffineChart":
        return cls.build(names, (), inverted)

    @classmethod
    def build(cls, names, ideal_gens=(), inverted=()) -> "AffineChart":
        names = tuple(names)
        ring = poly_ring(names)
        ideal = Ideal.of([convert(g, ring) for g in ideal_gens], ring)
        chart = cls(names, ideal, tuple(convert(q, ring) for q in inverted))
        gb = chart.gb
        for q in chart.inverted:
            if not reduce_mod_ideal(q, gb):
                raise ChartDenominator(f"inverted polynomial {format_poly(q)} vanishes on the chart")
        return chart

    @property
    def ring(self):
        return poly_ring(self.variables)

    @property
    def field(self):
        return fraction_field(self.variables)

    @cached_property
    def gb(self) -> Ideal:
        return groebner_basis(self.ideal)

    @cached_property
    def _unit_product(self):
        return reduce(mul, self.inverted, self.ring.one)

    def is_unit(self, q) -> bool:
        """``q`` is invertible on the chart: it divides a power of the inverted product."""
        q = convert(q, self.ring)
        if q.is_ground:
            return bool(q)
        power = self._unit_product ** total_degree(q)
        return not power.rem(q)

    def contains(self, point) -> bool:
        if any(eval_poly(g, point) for g in self.ideal.gens):
            return False
        return all(eval_poly(q, point) for q in self.inverted)

    def in_ideal(self, p) -> bool:
        return not reduce_mod_ideal(p, self.gb)

    def extend(self, names: Sequence[str]) -> "AffineChart":
        """Product with affine space in the new variables ``names``."""
        new = self.variables + tuple(names)
        ring = poly_ring(new)
        return AffineChart(new, Ideal.of([convert(g, ring) for g in self.ideal.gens], ring),
                           tuple(convert(q, ring) for q in self.inverted))

    def to_json(self) -> dict:
        return {
            "vars": list(self.variables),
            "ideal": self.ideal.text(),
            "invert": [format_poly(q) for q in self.inverted],
        }


@dataclass(frozen=True)
class Foliation:
    """``n`` commuting vector fields on a chart, stored in ambient coordinates.

    ``parameters`` names chart variables that every field annihilates.
    """

    chart: AffineChart
    fields: tuple
    parameters: tuple[str, ...] = ()

    @property
    def n(self) -> int:
        return len(self.fields)

    @property
    def K(self):
        return self.chart.field

    def apply(self, i: int, h):
        """Derivative of the rational function (or polynomial) ``h`` along field ``i``."""
        K = self.K
        if not hasattr(h, "numer"):
            h = K.new(convert(h, K.ring))
        total = K.zero
        for comp, x in zip(self.fields[i], K.gens):
            if comp:
                total += comp * h.diff(x)
        return total

    def apply_poly(self, i: int, p):
        """Polynomial-only fast path; ``None`` when field ``i`` has denominators."""
        ring = self.chart.ring
        comps = self.fields[i]
        if any(c.denom != 1 for c in comps):
            return None
        total = ring.zero
        for comp, x in zip(comps, ring.gens):
            if comp:
                total += comp.numer * p.diff(x)
        return total

    def bracket(self, i: int, j: int) -> list:
        return [self.apply(i, cj) - self.apply(j, ci) for ci, cj in zip(self.fields[i], self.fields[j])]

    def degree(self) -> int:
        """Largest degree among numerators and denominators of the field coefficients."""
        return max((rf_degree(c) for f in self.fields for c in f if c), default=0)

    def degree_split(self) -> tuple[int, int]:
        """(numerator degree, common-denominator degree) of the fields."""
        den = self.common_denominator()
        K = self.K
        num_deg = 0
        for f in self.fields:
            for c in f:
                if c:
                    num_deg = max(num_deg, total_degree((c * K.new(den)).numer))
        return num_deg, total_degree(den)

    def common_denominator(self):
        ring = self.chart.ring
        den = ring.one
        for f in self.fields:
            for c in f:
                d = c.denom
                den = den * d.exquo(den.gcd(d))
        return den

    def denominators(self) -> list:
        out = []
        for f in self.fields:
            for c in f:
                if c.denom != 1 and c.denom not in out:
                    out.append(c.denom)
        return out

    # ------------------------------------------------------------ checks

    def check(self, independence: bool = True) -> None:
        for d in self.denominators():
            if not self.chart.is_unit(d):
                raise ChartDenominator(
                    f"field denominator {format_poly(d)} is not invertible on the chart"
                )
        names = self.chart.variables
        for i, j in combinations(range(self.n), 2):
            for name, comp in zip(names, self.bracket(i, j)):
                if comp and not self.chart.in_ideal(comp.numer):
                    raise CommutationFailure((i, j), name, format_rational(comp))
        for i in range(self.n):
            for g in self.chart.ideal.gens:
                v = self.apply(i, g)
                if v and not self.chart.in_ideal(v.numer):
                    raise TangencyFailure(i, format_poly(g), format_rational(v))
        if independence:
            self.check_independent()

    def check_independent(self, retries: int = 3, seed: int = 0) -> None:
        if self.n == 0:
            return
        N = len(self.chart.variables)
        if not self.chart.ideal.is_zero():
            K = self.K
            from .connection import mat_det

            for cols in combinations(range(N), self.n):
                minor = mat_det([[f[c] for c in cols] for f in self.fields], K)
                if minor and not self.chart.in_ideal(minor.numer):
                    return
            raise DependentFields("no n x n minor of the field matrix is nonzero on the chart")
        rng = random.Random(seed)
        for _ in range(retries):
            point = [Fraction(rng.randint(-97, 97), rng.randint(1, 13)) for _ in range(N)]
            try:
                rows = [[eval_rf(c, point) for c in f] for f in self.fields]
            except ZeroDivisionError:
                continue
            if not self.chart.contains(point):
                continue
            M = flint.fmpq_mat(self.n, N, [flint.fmpq(v.numerator, v.denominator) for r in rows for v in r])
            if M.rref()[1] == self.n:
                return
        raise DependentFields("fields are linearly dependent at every sampled point")

    def to_json(self) -> dict:
        return {
            "chart": self.chart.to_json(),
            "fields": [[format_rational(c) for c in f] for f in self.fields],
            "parameters": list(self.parameters),
        }


def as_rf(c, K):
    """Coerce a rational function, polynomial or rational number into ``K``."""
    if hasattr(c, "numer"):
        if c.field is K:
            return c
        return K.new(convert(c.numer, K.ring), convert(c.denom, K.ring))
    if hasattr(c, "ring"):
        return K.new(convert(c, K.ring))
    return K(qq(c))


def make_foliation(chart: AffineChart, fields, parameters=(), check: bool = True) -> Foliation:
    K = chart.field
    norm = []
    for f in fields:
        if len(f) != len(chart.variables):
            raise ValueError("each field needs one coefficient per chart variable")
        norm.append(tuple(as_rf(c, K) for c in f))
    fol = Foliation(chart, tuple(norm), tuple(parameters))
    if check:
        fol.check()
    return fol


def from_graph_coefficients(c, chart: AffineChart, check: bool = True) -> Foliation:
    """Fields ``d/dx_i + sum_j c[i][j] d/dx_{n+j}`` (first ``n`` chart variables are leaf coordinates)."""
    K = chart.field
    n = len(c)
    N = len(chart.variables)
    fields = []
    for i, row in enumerate(c):
        if len(row) != N - n:
            raise ValueError(f"coefficient row {i} must have {N - n} entries")
        comps = [K.one if j == i else K.zero for j in range(n)]
        comps.extend(as_rf(x, K) for x in row)
        fields.append(tuple(comps))
    return make_foliation(chart, fields, check=check)


def from_connection(omega: ConnectionMatrix, group: str = "g", check: bool = True) -> Foliation:
    """Lift ``d/dx_i`` to ``d/dx_i + Omega_i g`` on base x GL_M."""
    omega.check_flat()
    M = omega.size
    base = omega.base
    gnames = []
    for a in range(M):
        for b in range(M):
            name = f"{group}{a + 1}{b + 1}" if M < 10 else f"{group}{a + 1}_{b + 1}"
            while name in base:
                name = "_" + name
            gnames.append(name)
    names = tuple(base) + tuple(gnames)
    ring = poly_ring(names)
    K = fraction_field(names)
    G = [[K.gens[len(base) + a * M + b] for b in range(M)] for a in range(M)]
    from .connection import mat_det

    det_g = mat_det(G, K).numer
    chart = AffineChart.build(names, (), tuple(convert(q, ring) for q in omega.inverted) + (det_g,))
    fields = []
    for i, O in enumerate(omega.matrices):
        comps = [K.one if j == i else K.zero for j in range(len(base))]
        for a in range(M):
            for b in range(M):
                entry = K.zero
                for c in range(M):
                    if O[a][c]:
                        entry += K.new(convert(O[a][c].numer, ring), convert(O[a][c].denom, ring)) * G[c][b]
                comps.append(entry)
        fields.append(tuple(comps))
    return make_foliation(chart, fields, check=check)


# ------------------------------------------------------------ flow jets


@dataclass(frozen=True)
class FlowJet:
    """Taylor jet of the leaf chart: ``series[j][alpha]`` multiplies ``t^alpha``."""

    foliation: Foliation
    order: int
    series: tuple

    @property
    def time_vars(self) -> tuple[str, ...]:
        return tuple(f"t{i + 1}" for i in range(self.foliation.n))

    def at(self, point) -> list[PowerSeries]:
        n = self.foliation.n
        return [
            PowerSeries(n, self.order, {a: eval_rf(c, point) for a, c in s.items()})
            for s in self.series
        ]

    def truncate(self, m: int) -> "FlowJet":
        return FlowJet(self.foliation, m, tuple({a: c for a, c in s.items() if sum(a) <= m} for s in self.series))

    def to_json(self) -> dict:
        out = {}
        for name, s in zip(self.foliation.chart.variables, self.series):
            out[name] = {
                "*".join(t if e == 1 else f"{t}^{e}" for t, e in zip(self.time_vars, a) if e) or "1": format_rational(c)
                for a, c in sorted(s.items(), key=lambda kv: (sum(kv[0]), tuple(-e for e in kv[0])))
                if c
            }
        return {"order": self.order, "time_vars": list(self.time_vars), "series": out}


def iterated_derivatives(f: Foliation, h, order: int) -> dict:
    """``{alpha: xi^alpha h}`` for ``|alpha| <= order``."""
    n = f.n
    poly_fast = hasattr(h, "ring") and not hasattr(h, "numer") and all(
        c.denom == 1 for fld in f.fields for c in fld
    )
    if not poly_fast and not hasattr(h, "numer"):
        h = f.K.new(convert(h, f.K.ring))
    out = {(0,) * n: h}
    for alpha in monomials_upto(n, order)[1:]:
        i = next(k for k, a in enumerate(alpha) if a)
        parent = list(alpha)
        parent[i] -= 1
        prev = out[tuple(parent)]
        out[alpha] = f.apply_poly(i, prev) if poly_fast else f.apply(i, prev)
    return out


def flow_jet(f: Foliation, m: int) -> FlowJet:
    """Order-``m`` formal leaf chart with identity initial condition."""
    if m < 1:
        raise ValueError("flow jet order must be >= 1")
    K = f.K
    from math import factorial

    series = []
    for x in f.chart.ring.gens:
        derivs = iterated_derivatives(f, K.new(x), m)
        s = {}
        for a, v in derivs.items():
            if v:
                denom = 1
                for e in a:
                    denom *= factorial(e)
                s[a] = v * K(qq(Fraction(1, denom))) if denom != 1 else v
        series.append(s)
    return FlowJet(f, m, tuple(series))


def numeric_flow(f: Foliation, point, order: int) -> list[PowerSeries]:
    """Leaf chart at a rational point by Picard iteration along each field in turn."""
    point = [as_rational(v) for v in point]
    if not f.chart.contains(point):
        raise PointOffChart("point is not on the chart")
    for d in f.denominators():
        if not eval_poly(d, point):
            raise PointOffChart("a field denominator vanishes at the point")
    n = f.n
    phi = [PowerSeries.constant(n, order, v) for v in point]
    for i in range(n):
        start = phi
        psi = start
        for _ in range(order + 1):
            vel = [compose_rf(c, psi) if c else PowerSeries(n, order) for c in f.fields[i]]
            psi = [s + v.integrate(i) for s, v in zip(start, vel)]
        phi = [p.truncate(order) for p in psi]
    return phi


def subfoliation_family(f: Foliation, k: int) -> tuple[Foliation, tuple[str, ...]]:
    """Fields ``xi_i + sum_j c_ij xi_j`` (``i <= n-k+1 < j``) with symbolic ``c_ij``.

    Returns the family over the chart extended by the ``(n-k+1)(k-1)`` fresh
    ``c`` variables, which every field annihilates, and the ``c`` names.
    """
    n = f.n
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n = {n}, got k = {k}")
    s = n - k + 1
    taken = set(f.chart.variables)
    cnames = []
    for i in range(s):
        for j in range(s, n):
            name = f"c{i + 1}_{j + 1}"
            while name in taken:
                name = "_" + name
            taken.add(name)
            cnames.append(name)
    if not cnames:
        return f, ()
    chart = f.chart.extend(cnames)
    K = chart.field
    N = len(f.chart.variables)
    lifted = [tuple(as_rf(c, K) for c in fld) + (K.zero,) * len(cnames) for fld in f.fields]
    cgens = K.gens[N:]
    fields = []
    pos = 0
    for i in range(s):
        comps = list(lifted[i])
        for j in range(s, n):
            cij = cgens[pos]
            pos += 1
            comps = [a + cij * b for a, b in zip(comps, lifted[j])]
        fields.append(tuple(comps))
    fam = Foliation(chart, tuple(fields), tuple(f.parameters) + tuple(cnames))
    fam.check(independence=False)
    return fam, tuple(cnames)
