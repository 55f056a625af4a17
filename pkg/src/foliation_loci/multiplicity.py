"""Multiplicity operators along a foliation and the leafwise multiplicity oracle.

For ``F = P o phi_p`` (``phi_p`` the leaf chart at ``p``) the local algebra
``C[[t]]/(F)`` has dimension ``> k`` exactly when the truncated multiplication
(Macaulay) matrix of ``F`` modulo ``m^(k+1)`` has rank ``< D - k`` where
``D = binom(n + k, n)``.  Its entries are the leafwise Taylor coefficients
``xi^alpha P / alpha!`` evaluated at ``p``, so the maximal-size-``(D - k)``
minors are polynomial multiplicity operators of order ``k``.

Emitted set: ``P`` itself together with the minors of the matrix whose
order-zero entries are dropped.  On ``P = 0`` the two matrices agree, and off
it ``P`` does not vanish, so the common zero locus is unchanged.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb, factorial, gcd, prod
from typing import Sequence

import flint
from sympy.polys.matrices import DomainMatrix

from .algebra import (
    as_rational,
    convert,
    eval_poly,
    eval_rf,
    format_poly,
    qq,
    total_degree,
)
from .errors import ChartDenominator, InvalidOrder, MinorBudgetExceeded, PointOffChart
from .foliation import Foliation, iterated_derivatives, numeric_flow
from .series import compose_poly, monomials_upto

DEFAULT_MINOR_CAP = 20000


class _AboveCap:
    """Oracle verdict: multiplicity is at least the cap (possibly infinite)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "AboveCap"


ABOVE_CAP = _AboveCap()


@dataclass(frozen=True)
class OrderBoundPolicy:
    """Truncation order for the isolated-zero multiplicity bound.

    ``fixed`` returns ``mu`` as given (rigorous when ``mu`` comes from an
    explicit multiplicity estimate); ``heuristic`` returns
    ``(deg_P * (deg_xi + 1)) ** d``, a Bezout-style guess that is not a proof.
    """

    mode: str = "heuristic"
    mu: int | None = None

    def __post_init__(self):
        if self.mode not in ("fixed", "heuristic"):
            raise ValueError(f"unknown order-bound mode {self.mode!r}")
        if self.mode == "fixed" and (self.mu is None or self.mu < 1):
            raise InvalidOrder("a fixed order bound must be >= 1")

    @classmethod
    def parse(cls, text) -> "OrderBoundPolicy":
        if text is None or str(text) == "heuristic":
            return cls("heuristic")
        return cls("fixed", int(text))

    @property
    def rigorous(self) -> bool:
        return self.mode == "fixed"

    def describe(self) -> str:
        return "heuristic" if self.mode == "heuristic" else str(self.mu)


def order_bound(policy: OrderBoundPolicy, d: int, deg_xi: int, deg_P: int) -> int:
    if policy.mode == "fixed":
        return policy.mu
    return max(1, (deg_P * (deg_xi + 1)) ** d)


def operator_degree_bound(deg_P: int, num_deg: int, den_deg: int, n: int, k: int) -> int:
    """Degree bound for emitted operators of order ``k``.

    A leafwise Taylor coefficient of order ``j <= k``, written over the common
    denominator ``q^(2k)`` of the fields, has numerator degree at most
    ``E = deg_P + k * max(max(num_deg - 1, 0) + den_deg, 2 * den_deg)``; a
    minor of size ``r = binom(n + k, n) - k`` therefore has degree ``<= r * E``.
    """
    entry = deg_P + k * max(max(num_deg - 1, 0) + den_deg, 2 * den_deg)
    r = comb(n + k, n) - k
    return max(deg_P, r * entry)


def leaf_taylor_coefficients(P: Sequence, f: Foliation, order: int) -> list[dict]:
    """``[{alpha: xi^alpha P_i / alpha!}]`` for ``|alpha| <= order``."""
    out = []
    ring = f.chart.ring
    for p in P:
        derivs = iterated_derivatives(f, convert(p, ring), order)
        coeffs = {}
        for a, v in derivs.items():
            w = prod(factorial(e) for e in a)
            if w != 1:
                scale = qq(as_rational(1) / w)
                v = v * f.K(scale) if hasattr(v, "numer") else v.mul_ground(scale)
            coeffs[a] = v
        out.append(coeffs)
    return out


def _leq(a, b):
    return all(x <= y for x, y in zip(a, b))


def _sub(b, a):
    return tuple(y - x for x, y in zip(a, b))


@dataclass
class MultiplicityOperatorSet:
    order: int
    foliation: Foliation
    P: tuple
    taylor: list
    minor_size: int
    row_index: list
    col_index: list
    degree_bound: int
    rigorous: bool = True
    _polys: list | None = field(default=None, repr=False)
    cleared: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.foliation.n

    def entry(self, row, col):
        i, alpha = row
        if not _leq(alpha, col) or alpha == col:
            return None
        return self.taylor[i].get(_sub(col, alpha))

    # -------------------------------------------------------- pointwise

    def vanishes_at(self, point) -> bool:
        """All emitted operators vanish at ``point`` (exact rank test)."""
        point = [as_rational(v) for v in point]
        if not self.foliation.chart.contains(point):
            raise PointOffChart("point is not on the chart")
        for d in self.foliation.denominators():
            if not eval_poly(d, point):
                raise PointOffChart("a field denominator vanishes at the point")
        if any(eval_poly(convert(p, self.foliation.chart.ring), point) for p in self.P):
            return False
        r = self.minor_size
        if r > min(len(self.row_index), len(self.col_index)):
            return True
        return self.rank_at(point) < r

    def rank_at(self, point) -> int:
        """Rank of the order-``k`` Macaulay matrix (order-zero entries dropped) at ``point``."""
        k = self.order
        vals = []
        for t in self.taylor:
            vals.append([(a, v) for a, v in ((a, _eval(c, point)) for a, c in t.items() if sum(a) >= 1) if v])
        col_pos = {c: j for j, c in enumerate(self.col_index)}
        M = flint.fmpz_mat(len(self.row_index), len(self.col_index))
        for r, (i, alpha) in enumerate(self.row_index):
            room = k - sum(alpha)
            placed = [
                (col_pos[tuple(x + y for x, y in zip(alpha, gamma))], v)
                for gamma, v in vals[i]
                if sum(gamma) <= room
            ]
            den = 1
            for _, v in placed:
                den = den * v.denominator // gcd(den, v.denominator)
            for j, v in placed:
                M[r, j] = int(v * den)
        return M.rank()

    # -------------------------------------------------------- symbolic

    def polynomials(self, minor_cap: int = DEFAULT_MINOR_CAP) -> list:
        if self._polys is None:
            self._polys = self._emit(minor_cap)
        return self._polys

    def _emit(self, minor_cap: int) -> list:
        chart = self.foliation.chart
        ring = chart.ring
        emitted = [convert(p, ring) for p in self.P]
        rows, cols = self.row_index, self.col_index
        table = [[self.entry(row, col) for col in cols] for row in rows]
        mat = []
        for row in table:
            if any(e for e in row if e is not None):
                mult, polys = _clear_row(row, ring, chart)
                if mult != 1:
                    self.cleared.append(format_poly(mult))
                mat.append(polys)
        mat, pivots = _constant_pivots(mat)
        r = self.minor_size - pivots
        if r <= 0:
            # rank is already >= minor_size: the condition never holds
            emitted.append(ring.one)
            return _canonical_list(emitted)
        if mat and r <= min(len(mat), len(mat[0])):
            count = comb(len(mat), r) * comb(len(mat[0]), r)
            if count > minor_cap:
                raise MinorBudgetExceeded(
                    f"{count} minors of size {r} exceed the budget {minor_cap}"
                )
            dom = ring.to_domain()
            for rsel in combinations(range(len(mat)), r):
                sub_rows = [mat[i] for i in rsel]
                for csel in combinations(range(len(mat[0])), r):
                    sub = [[row[j] for j in csel] for row in sub_rows]
                    if any(not any(row) for row in sub):
                        continue
                    det = DomainMatrix(sub, (r, r), dom).det()
                    if det:
                        emitted.append(det)
        return _canonical_list(emitted)

    def max_degree(self, minor_cap: int = DEFAULT_MINOR_CAP) -> int:
        return max((total_degree(p) for p in self.polynomials(minor_cap)), default=-1)

    def metadata(self, minor_cap: int = DEFAULT_MINOR_CAP) -> dict:
        polys = self.polynomials(minor_cap)
        return {
            "order": self.order,
            "count": len(polys),
            "max_degree": max((total_degree(p) for p in polys), default=-1),
            "degree_bound": self.degree_bound,
            "rigorous": self.rigorous,
            "cleared_denominators": sorted(set(self.cleared)),
        }


def _eval(c, point):
    if hasattr(c, "numer"):
        return eval_rf(c, point)
    return eval_poly(c, point)


def _prune(mat):
    rows = [row for row in mat if any(row)]
    if not rows:
        return []
    keep = [j for j in range(len(rows[0])) if any(row[j] for row in rows)]
    return [[row[j] for j in keep] for row in rows]


def _constant_pivots(mat):
    """Eliminate nonzero constant entries; returns ``(Schur complement, #pivots)``.

    Maximal-minor ideals shift by one size per constant pivot, and every minor
    of the complement is a constant multiple of a minor of the input.
    """
    mat = _prune(mat)
    pivots = 0
    while mat:
        hit = next(((i, j) for i, row in enumerate(mat) for j, e in enumerate(row) if e and e.is_ground), None)
        if hit is None:
            break
        i, j = hit
        c = mat[i][j]
        prow = mat[i]
        new = []
        for a, row in enumerate(mat):
            if a == i:
                continue
            f = row[j]
            if f:
                new.append([row[b] - f * prow[b] / c for b in range(len(row)) if b != j])
            else:
                new.append([row[b] for b in range(len(row)) if b != j])
        mat = _prune(new)
        pivots += 1
    return mat, pivots


def _clear_row(entries, ring, chart):
    """Multiply a row of rational entries by the lcm of its denominators."""
    den = ring.one
    for e in entries:
        if e is not None and hasattr(e, "numer") and e.denom != 1:
            d = convert(e.denom, ring)
            if not chart.is_unit(d):
                raise ChartDenominator(f"denominator {format_poly(d)} is not invertible on the chart")
            den = den * d.exquo(den.gcd(d))
    out = []
    for e in entries:
        if e is None or not e:
            out.append(ring.zero)
        elif hasattr(e, "numer"):
            out.append(convert(e.numer, ring) * den.exquo(convert(e.denom, ring)))
        else:
            out.append(convert(e, ring) * den)
    return den, out


def primitive_form(p):
    """Integer coefficients with content 1 and positive leading coefficient."""
    if not p:
        return p
    _, q = p.clear_denoms()
    q = q.set_ring(p.ring) if q.ring is not p.ring else q
    _, q = q.primitive()
    if q.LC < 0:
        q = -q
    return q


def _canonical_list(polys) -> list:
    seen = set()
    out = []
    for p in polys:
        if not p:
            continue
        q = primitive_form(p)
        key = tuple(sorted(q.items()))
        if key not in seen:
            seen.add(key)
            out.append(q)
    return out


def multiplicity_operators(P: Sequence, f: Foliation, k: int, taylor: list | None = None,
                           rigorous: bool = True) -> MultiplicityOperatorSet:
    """Multiplicity operators of order ``k`` for the ``n``-tuple ``P`` along ``f``."""
    n = f.n
    if len(P) != n:
        raise ValueError(f"need exactly {n} functions (the leaf dimension), got {len(P)}")
    if k < 1:
        raise InvalidOrder("multiplicity order must be >= 1")
    if taylor is None:
        taylor = leaf_taylor_coefficients(P, f, k)
    else:
        taylor = [{a: c for a, c in t.items() if sum(a) <= k} for t in taylor]
    D = comb(n + k, n)
    rows = [(i, a) for a in monomials_upto(n, k - 1) for i in range(n)]
    cols = monomials_upto(n, k)[1:]
    num_deg, den_deg = f.degree_split()
    deg_P = max((total_degree(p) for p in P), default=0)
    bound = operator_degree_bound(deg_P, num_deg, den_deg, n, k)
    return MultiplicityOperatorSet(
        order=k,
        foliation=f,
        P=tuple(P),
        taylor=taylor,
        minor_size=D - k,
        row_index=rows,
        col_index=cols,
        degree_bound=bound,
        rigorous=rigorous,
    )


# ------------------------------------------------------------ oracle


def local_algebra_dimension(series: list, nvars: int, cap: int) -> int:
    """``dim Q[t]/(F + m^cap)``.

    Modulo ``m^cap`` the ideal is the span of the truncated products
    ``t^beta F_i``, so the dimension is the number of monomials of degree
    ``< cap`` minus the rank of that span (exact, over the integers).
    """
    mono = [a for a in monomials_upto(nvars, cap - 1)]
    col = {a: j for j, a in enumerate(mono)}
    rows = []
    for s in series:
        terms = [(a, c) for a, c in s.terms.items() if c and sum(a) < cap]
        if not terms:
            continue
        low = min(sum(a) for a, _ in terms)
        den = 1
        for _, c in terms:
            den = den * c.denominator // gcd(den, c.denominator)
        ints = [(a, int(c * den)) for a, c in terms]
        for beta in monomials_upto(nvars, cap - 1 - low):
            row = {}
            for a, c in ints:
                e = tuple(x + y for x, y in zip(a, beta))
                if sum(e) < cap:
                    row[col[e]] = c
            rows.append(row)
    if not rows:
        return len(mono)
    M = flint.fmpz_mat(len(rows), len(mono))
    for i, row in enumerate(rows):
        for j, c in row.items():
            M[i, j] = c
    return len(mono) - M.rank()


def leaf_multiplicity_oracle(P: Sequence, f: Foliation, point, cap: int):
    """Multiplicity of ``P`` restricted to the leaf through ``point`` if ``< cap``, else ``ABOVE_CAP``."""
    if cap < 1:
        raise InvalidOrder("cap must be >= 1")
    jets = numeric_flow(f, point, cap)
    ring = f.chart.ring
    F = [compose_poly(convert(p, ring), jets) for p in P]
    dim = local_algebra_dimension(F, f.n, cap)
    return dim if dim < cap else ABOVE_CAP
