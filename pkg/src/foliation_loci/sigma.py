"""Equations for the loci where leaves meet a subvariety in excess dimension.

``sigma_equations`` follows the reduction to complete intersections (all
``(n-k+1)``-subsets of the generators of ``V``), the reduction to
``(n-k+1)``-dimensional subfoliations with symbolic coefficients ``c``, and the
``k = 1`` characterisation "the leafwise multiplicity exceeds the
isolated-zero bound", realised by multiplicity operators of order ``mu``.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from math import comb

from .algebra import (
    Ideal,
    convert,
    eval_poly,
    format_poly,
    groebner_basis,
    eliminate,
    poly_ring,
    radical_contains,
    reduce_mod_ideal,
    total_degree,
)
from .errors import InvalidOrder, ParameterNotConstant, SubsetCapExceeded
from .foliation import Foliation, subfoliation_family
from .multiplicity import (
    DEFAULT_MINOR_CAP,
    OrderBoundPolicy,
    _canonical_list,
    multiplicity_operators,
    order_bound,
)

DEFAULT_SUBSET_CAP = 2000


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("FOLIATION_LOCI_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class SigmaLocusResult:
    generators: Ideal
    k: int
    mu: int | None
    rigorous: bool
    subsets_used: int
    degree_bound: int
    provenance: list = field(default_factory=list)

    @property
    def max_degree(self) -> int:
        return self.generators.max_degree()

    @property
    def sum_degree(self) -> int:
        return max(self.generators.sum_degree(), 0)

    def contains(self, point) -> bool:
        return all(eval_poly(g, point) == 0 for g in self.generators.gens)

    def groebner(self) -> Ideal:
        return groebner_basis(self.generators)

    def metadata(self) -> dict:
        return {
            "k": self.k,
            "mu": self.mu,
            "rigorous": self.rigorous,
            "subsets_used": self.subsets_used,
            "max_degree": self.max_degree,
            "sum_degree": self.sum_degree,
            "degree_bound": self.degree_bound,
        }


def _c_coefficients(p, chart_ring, cnames):
    """Coefficients of ``p`` viewed as a polynomial in the ``c`` variables."""
    names = [s.name for s in p.ring.symbols]
    cpos = [names.index(c) for c in cnames]
    xpos = [i for i in range(len(names)) if i not in cpos]
    groups: dict = {}
    for monom, coeff in p.iterterms():
        key = tuple(monom[i] for i in cpos)
        xm = tuple(monom[i] for i in xpos)
        groups.setdefault(key, {})[xm] = coeff
    return [chart_ring(groups[key]) for key in sorted(groups)]


def _stage(subset, gens, fam, cnames, policy, f, minor_cap):
    P = [gens[i] for i in subset]
    deg_P = max(total_degree(p) for p in P)
    mu = order_bound(policy, fam.n, f.degree(), deg_P)
    ring = fam.chart.ring
    ops = multiplicity_operators([convert(p, ring) for p in P], fam, mu, rigorous=policy.rigorous)
    polys = ops.polynomials(minor_cap)
    chart_ring = f.chart.ring
    coeffs = []
    for e in polys:
        coeffs.extend(_c_coefficients(e, chart_ring, cnames) if cnames else [convert(e, chart_ring)])
    coeffs = _canonical_list(coeffs)
    record = {
        "subset": [format_poly(p) for p in P],
        "fields": fam.n,
        "c_symbols": list(cnames),
        "mu": mu,
        "operators": len(polys),
        "coefficients": len(coeffs),
        "degree_bound": ops.degree_bound,
    }
    return coeffs, record, mu, ops.degree_bound


def sigma_equations(V: Ideal, f: Foliation, k: int, policy: OrderBoundPolicy | None = None,
                    subset_cap: int = DEFAULT_SUBSET_CAP,
                    minor_cap: int = DEFAULT_MINOR_CAP) -> SigmaLocusResult:
    """Generators whose zero set in ``V`` is ``{p : dim(L_p cap V) >= k}``."""
    policy = policy or OrderBoundPolicy()
    n = f.n
    if not 1 <= k <= n:
        raise InvalidOrder(f"need 1 <= k <= n = {n}, got k = {k}")
    ring = f.chart.ring
    gens = [g for g in (convert(g, ring) for g in V.gens) if g]
    base = list(f.chart.ideal.gens) + gens
    if any(g.is_ground for g in gens):
        return SigmaLocusResult(Ideal(ring, (ring.one,)), k, None, policy.rigorous, 0, 0,
                                [{"note": "unit ideal: empty locus"}])
    s = n - k + 1
    base_bound = max((total_degree(g) for g in base), default=0)
    if len(gens) < s:
        result = Ideal.of(_canonical_list(base), ring) if base else Ideal(ring, ())
        return SigmaLocusResult(result, k, None, policy.rigorous, 0, base_bound,
                                [{"note": f"fewer than {s} generators: every leaf meets V in dimension >= k"}])
    count = comb(len(gens), s)
    if count > subset_cap:
        raise SubsetCapExceeded(f"{count} generator subsets exceed the cap {subset_cap}")
    fam, cnames = subfoliation_family(f, k)
    subsets = list(combinations(range(len(gens)), s))
    threads = thread_count()
    args = [(sub, gens, fam, cnames, policy, f, minor_cap) for sub in subsets]
    if threads > 1 and len(subsets) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            stages = list(pool.map(lambda a: _stage(*a), args))
        # pool.map preserves submission order
    else:
        stages = [_stage(*a) for a in args]
    vgb = groebner_basis(Ideal.of(base, ring)) if base else None
    collected = []
    for coeffs, _, _, _ in stages:
        for c in coeffs:
            c = reduce_mod_ideal(c, vgb) if vgb is not None else c
            if c:
                collected.append(convert(c, ring))
    out = _canonical_list(base + collected)
    provenance = sorted((rec for _, rec, _, _ in stages), key=lambda r: r["subset"])
    mu = max(m for _, _, m, _ in stages)
    bound = max([base_bound] + [b for _, _, _, b in stages])
    return SigmaLocusResult(Ideal.of(out, ring) if out else Ideal(ring, ()), k, mu, policy.rigorous,
                            len(subsets), bound, provenance)


def a_locus(V: Ideal, f: Foliation, params, k: int, policy: OrderBoundPolicy | None = None,
            subset_cap: int = DEFAULT_SUBSET_CAP, minor_cap: int = DEFAULT_MINOR_CAP) -> SigmaLocusResult:
    """``sigma_equations`` with declared parameter variables riding along as leafwise constants."""
    names = f.chart.variables
    for p in params:
        if p not in names:
            raise ParameterNotConstant(f"parameter {p!r} is not a chart variable")
        idx = names.index(p)
        for i, fld in enumerate(f.fields):
            if fld[idx]:
                raise ParameterNotConstant(f"xi_{i + 1} moves the parameter {p!r}")
    g = Foliation(f.chart, f.fields, tuple(dict.fromkeys(tuple(f.parameters) + tuple(params))))
    return sigma_equations(V, g, k, policy, subset_cap, minor_cap)


@dataclass(frozen=True)
class ConstructibleSet:
    """``V(closure) minus V(boundary)``; the boundary ideal contains the closure ideal."""

    closure: Ideal
    boundary: Ideal

    @property
    def complexity(self) -> int:
        return max(self.closure.max_degree(), 0) + max(self.boundary.max_degree(), 0)

    def contains(self, point) -> bool:
        in_closure = all(eval_poly(g, point) == 0 for g in self.closure.gens)
        in_boundary = all(eval_poly(g, point) == 0 for g in self.boundary.gens)
        return in_closure and not in_boundary

    def is_empty(self) -> bool:
        return radical_contains(self.closure, self.boundary)

    def to_json(self) -> dict:
        return {
            "closure": self.closure.text(),
            "boundary": self.boundary.text(),
            "complexity": self.complexity,
        }


def constructible_difference(A: Ideal, B: Ideal) -> ConstructibleSet:
    if A.variables != B.variables:
        raise ValueError("ideals must share their ambient variables")
    return ConstructibleSet(A, A + B)


def project_closure(A: Ideal, drop, log: list | None = None) -> Ideal:
    """Zariski closure of the projection forgetting ``drop``."""
    out = eliminate(A, drop) if drop else A
    if log is not None:
        log.append({"step": "projection", "drop": sorted(drop), "generators": out.text()})
    return out
