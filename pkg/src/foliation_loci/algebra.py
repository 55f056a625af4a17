"""Exact multivariate polynomial and rational-function arithmetic over QQ.

Polynomials are sympy ``PolyElement`` objects (sparse maps from exponent
tuples to exact rationals) living in rings obtained from :func:`poly_ring`;
rational functions are ``FracElement`` objects of :func:`fraction_field`.
This module adds the text grammar, the :class:`Ideal` type and the ideal
operations (Groebner bases, elimination, saturation, radical membership).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from sympy.polys.domains import QQ
from sympy.polys.fields import FracField
from sympy.polys.groebnertools import groebner as _sympy_groebner
from sympy.polys.orderings import ProductOrder, grevlex, lex
from sympy.polys.rings import PolyRing

from .errors import NotGroebnerBasis, ParseError

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


# ---------------------------------------------------------------- rings


@lru_cache(maxsize=None)
def fraction_field(names: tuple[str, ...]) -> FracField:
    for name in names:
        if not _IDENT.match(name):
            raise ParseError(f"invalid variable name {name!r}")
    if len(set(names)) != len(names):
        raise ParseError(f"duplicate variable in {names}")
    return FracField(list(names), QQ, grevlex)


def poly_ring(names: Sequence[str]) -> PolyRing:
    """The canonical graded-reverse-lex ring on ``names``."""
    return fraction_field(tuple(names)).ring


def var_names(ring) -> tuple[str, ...]:
    return tuple(s.name for s in ring.symbols)


def _block_key(split: int):
    def first(m):
        return m[:split]

    def second(m):
        return m[split:]

    return ProductOrder((grevlex, first), (grevlex, second))


@lru_cache(maxsize=None)
def ordered_ring(names: tuple[str, ...], order: str) -> PolyRing:
    """Ring on ``names`` with term order ``grevlex``, ``lex`` or ``block:<s>``.

    ``block:<s>`` compares the first ``s`` variables by grevlex, then the rest.
    """
    if order == "grevlex":
        return poly_ring(names)
    if order == "lex":
        return PolyRing(",".join(names), QQ, lex)
    if order.startswith("block:"):
        return PolyRing(",".join(names), QQ, _block_key(int(order[6:])))
    raise ValueError(f"unknown term order {order!r}")


def convert(p, ring):
    """Move ``p`` into ``ring`` (variables are matched by name)."""
    if p.ring is ring:
        return p
    return p.set_ring(ring)


def to_field(p, K: FracField | None = None):
    """Embed a polynomial into the canonical fraction field of its variables."""
    if K is None:
        K = fraction_field(var_names(p.ring))
    return K.new(convert(p, K.ring))


def total_degree(p) -> int:
    """Total degree; ``-1`` for the zero polynomial."""
    return max((sum(m) for m in p.itermonoms()), default=-1)


def rf_degree(r) -> int:
    return max(total_degree(r.numer), total_degree(r.denom))


def as_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    return Fraction(int(value.numerator), int(value.denominator))


def qq(value):
    f = as_rational(value)
    return QQ(f.numerator, f.denominator)


def eval_poly(p, point: Sequence) -> Fraction:
    """Evaluate ``p`` at a rational point given in ring-variable order."""
    vals = [as_rational(v) for v in point]
    total = Fraction(0)
    for monom, coeff in p.iterterms():
        term = as_rational(coeff)
        for v, e in zip(vals, monom):
            if e:
                term *= v ** e
        total += term
    return total


def eval_rf(r, point: Sequence) -> Fraction:
    den = eval_poly(r.denom, point)
    if den == 0:
        raise ZeroDivisionError("denominator vanishes at point")
    return eval_poly(r.numer, point) / den


# ---------------------------------------------------------------- text grammar

_TERM = re.compile(
    r"(?:(?P<num>\d+)(?:/(?P<den>\d+))?(?P<star>\*)?)?"
    r"(?P<mono>[A-Za-z_][A-Za-z0-9_]*(?:\^\d+)?(?:\*[A-Za-z_][A-Za-z0-9_]*(?:\^\d+)?)*)?"
)


def parse_poly(text: str, ring):
    """Parse the polynomial grammar ``x^2*y - 3/2*x + 1`` into ``ring``."""
    s = re.sub(r"\s+", "", text)
    if not s:
        raise ParseError("empty polynomial")
    names = var_names(ring)
    index = {n: i for i, n in enumerate(names)}
    result = ring.zero
    pos = 0
    first = True
    while pos < len(s):
        sign = 1
        if s[pos] in "+-":
            sign = -1 if s[pos] == "-" else 1
            pos += 1
        elif not first:
            raise ParseError(f"expected '+' or '-' at offset {pos} in {text!r}")
        m = _TERM.match(s, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"bad term at offset {pos} in {text!r}")
        if m.group("num") is not None and m.group("star") and not m.group("mono"):
            raise ParseError(f"dangling '*' in {text!r}")
        if m.group("num") is not None and m.group("mono") and not m.group("star"):
            raise ParseError(f"missing '*' between coefficient and monomial in {text!r}")
        coeff = QQ(1)
        if m.group("num") is not None:
            den = int(m.group("den")) if m.group("den") else 1
            if den == 0:
                raise ParseError(f"zero denominator in {text!r}")
            coeff = QQ(int(m.group("num")), den)
        exps = [0] * len(names)
        if m.group("mono"):
            for factor in m.group("mono").split("*"):
                name, _, power = factor.partition("^")
                if name not in index:
                    raise ParseError(f"undeclared variable {name!r} in {text!r}")
                exps[index[name]] += int(power) if power else 1
        result += ring({tuple(exps): coeff * sign})
        pos = m.end()
        first = False
    return result


def parse_rational(text: str, K: FracField):
    """Parse ``poly`` or ``(poly)/(poly)`` into the fraction field ``K``."""
    s = re.sub(r"\s+", "", text)
    m = re.fullmatch(r"(-?)\(([^()]*)\)(?:/\(([^()]*)\))?", s)
    if m:
        num = parse_poly(m.group(2), K.ring)
        if m.group(1):
            num = -num
        den = parse_poly(m.group(3), K.ring) if m.group(3) is not None else K.ring.one
    elif "(" in s or ")" in s:
        raise ParseError(f"malformed rational function {text!r}")
    else:
        num, den = parse_poly(s, K.ring), K.ring.one
    if not den:
        raise ParseError(f"zero denominator in {text!r}")
    return K.new(num, den)


def _format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_poly(p) -> str:
    """Canonical text: terms in descending order of the ring's term order."""
    if not p:
        return "0"
    names = var_names(p.ring)
    out = []
    for monom, coeff in p.terms():
        c = as_rational(coeff)
        mono = "*".join(
            n if e == 1 else f"{n}^{e}" for n, e in zip(names, monom) if e
        )
        mag = abs(c)
        if mono and mag == 1:
            body = mono
        elif mono:
            body = f"{_format_coeff(mag)}*{mono}"
        else:
            body = _format_coeff(mag)
        if not out:
            out.append(f"-{body}" if c < 0 else body)
        else:
            out.append(f" - {body}" if c < 0 else f" + {body}")
    return "".join(out)


def canonical_parts(r):
    """(numerator, denominator) with the denominator's leading coefficient 1."""
    num, den = r.numer, r.denom
    lc = den.LC
    if lc != 1:
        num = num.quo_ground(lc)
        den = den.quo_ground(lc)
    return num, den


def format_rational(r) -> str:
    num, den = canonical_parts(r)
    if den == 1:
        return format_poly(num)
    return f"({format_poly(num)})/({format_poly(den)})"


# ---------------------------------------------------------------- ideals


@dataclass(frozen=True)
class Ideal:
    """An ideal given by generators in a fixed ring.

    ``order`` names the term order of ``ring``; ``is_groebner`` is set only by
    :func:`groebner_basis` (and the operations built on it).
    """

    ring: PolyRing
    gens: tuple = ()
    order: str = "grevlex"
    is_groebner: bool = field(default=False, compare=False)

    @classmethod
    def of(cls, gens: Iterable, ring=None) -> "Ideal":
        gens = list(gens)
        if ring is None:
            if not gens:
                raise ValueError("ring required for the zero ideal")
            ring = gens[0].ring
        return cls(ring, tuple(g for g in (convert(g, ring) for g in gens) if g))

    @property
    def variables(self) -> tuple[str, ...]:
        return var_names(self.ring)

    def is_zero(self) -> bool:
        return not self.gens

    def is_unit(self) -> bool:
        return any(g.is_ground and g for g in self.gens) or (
            self.is_groebner and self.gens == (self.ring.one,)
        )

    def max_degree(self) -> int:
        return max((total_degree(g) for g in self.gens), default=-1)

    def sum_degree(self) -> int:
        return sum(total_degree(g) for g in self.gens)

    def __add__(self, other: "Ideal") -> "Ideal":
        ring = self.ring
        return Ideal.of(list(self.gens) + [convert(g, ring) for g in other.gens], ring)

    def text(self) -> list[str]:
        return [format_poly(g) for g in self.gens]


def groebner_basis(ideal: Ideal, order: str = "grevlex") -> Ideal:
    """Reduced Groebner basis with monic elements (Buchberger)."""
    names = ideal.variables
    ring = ordered_ring(names, order)
    gens = [convert(g, ring) for g in ideal.gens if g]
    if not gens:
        return Ideal(ring, (), order, True)
    if any(g.is_ground for g in gens):
        return Ideal(ring, (ring.one,), order, True)
    basis = _sympy_groebner(gens, ring, method="buchberger")
    return Ideal(ring, tuple(basis), order, True)


def reduce_mod_ideal(p, gb: Ideal):
    """Normal form of ``p`` with respect to the Groebner basis ``gb``."""
    if not gb.is_groebner:
        raise NotGroebnerBasis("reduce_mod_ideal needs a Groebner basis")
    q = convert(p, gb.ring)
    if not gb.gens:
        return q
    return q.rem(list(gb.gens))


def contains(ideal: Ideal, p) -> bool:
    gb = ideal if ideal.is_groebner else groebner_basis(ideal)
    return not reduce_mod_ideal(p, gb)


def is_subideal(small: Ideal, big: Ideal) -> bool:
    gb = big if big.is_groebner else groebner_basis(big)
    return all(not reduce_mod_ideal(g, gb) for g in small.gens)


def eliminate(ideal: Ideal, drop: Iterable[str]) -> Ideal:
    """Generators of ``ideal`` intersected with the ring of the kept variables.

    Uses a block order with the dropped variables in the first block.
    """
    names = ideal.variables
    drop = set(drop)
    unknown = drop - set(names)
    if unknown:
        raise ValueError(f"cannot drop undeclared variables {sorted(unknown)}")
    drop = [v for v in names if v in drop]
    keep = tuple(v for v in names if v not in drop)
    target = poly_ring(keep)
    if not drop:
        gb = groebner_basis(ideal)
        return Ideal(target, tuple(convert(g, target) for g in gb.gens), "grevlex", True)
    block = ordered_ring(tuple(drop) + keep, f"block:{len(drop)}")
    gens = [convert(g, block) for g in ideal.gens if g]
    if not gens:
        return Ideal(target, (), "grevlex", True)
    basis = _sympy_groebner(gens, block, method="buchberger")
    nd = len(drop)
    kept = [g for g in basis if all(not any(m[:nd]) for m in g.itermonoms())]
    return Ideal(target, tuple(convert(g, target) for g in kept), "grevlex", True)


def _fresh(names: Sequence[str], stem: str) -> str:
    name, i = stem, 0
    while name in names:
        i += 1
        name = f"{stem}{i}"
    return name


def saturate(ideal: Ideal, q) -> Ideal:
    """``ideal : q^infinity`` via a Rabinowitsch variable."""
    names = ideal.variables
    u = _fresh(names, "_u")
    ext = poly_ring((u,) + names)
    ug = ext.gens[0]
    gens = [convert(g, ext) for g in ideal.gens] + [ug * convert(q, ext) - 1]
    return eliminate(Ideal.of(gens, ext), [u])


def in_radical(p, ideal: Ideal) -> bool:
    """Rabinowitsch test: ``p`` lies in the radical of ``ideal``."""
    if not p:
        return True
    names = ideal.variables
    u = _fresh(names, "_u")
    ext = poly_ring(names + (u,))
    ug = ext.gens[-1]
    gens = [convert(g, ext) for g in ideal.gens] + [1 - ug * convert(p, ext)]
    return groebner_basis(Ideal.of(gens, ext)).is_unit()


def radical_contains(big: Ideal, small: Ideal) -> bool:
    """V(big) is contained in V(small)."""
    return all(in_radical(g, big) for g in small.gens)
