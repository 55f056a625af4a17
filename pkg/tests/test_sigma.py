from fractions import Fraction

import pytest

from foliation_loci.algebra import Ideal, eval_poly, parse_poly, poly_ring, radical_contains
from foliation_loci.errors import InvalidOrder, ParameterNotConstant, SubsetCapExceeded
from foliation_loci.foliation import AffineChart, make_foliation
from foliation_loci.multiplicity import OrderBoundPolicy
from foliation_loci.sigma import (
    a_locus,
    constructible_difference,
    project_closure,
    sigma_equations,
)

A2 = AffineChart.affine_space(["x", "y"])
A3 = AffineChart.affine_space(["x", "y", "z"])
AC = AffineChart.affine_space(["x", "y", "c"])


def I(texts, chart):
    return Ideal.of([parse_poly(t, chart.ring) for t in texts], chart.ring)


def fol(chart, rows):
    return make_foliation(chart, [[parse_poly(str(t), chart.ring) for t in row] for row in rows])


DX = fol(A2, [[1, 0]])
EXP = fol(A2, [[1, "y"]])
GRID = [Fraction(a, b) for a in range(-4, 5) for b in (1, 3)]


def locus_on(res, V, points):
    return [p for p in points if all(eval_poly(g, p) == 0 for g in V.gens) and res.contains(p)]


def test_xy_under_dx():
    V = I(["x*y"], A2)
    res = sigma_equations(V, DX, 1)
    for a in GRID:
        assert res.contains([a, 0])
        if a:
            assert not res.contains([0, a])
    assert radical_contains(res.generators, I(["y"], A2))


def test_exp_field_cases():
    whole = sigma_equations(I(["y"], A2), EXP, 1)
    assert all(whole.contains([a, 0]) for a in GRID)
    empty = sigma_equations(I(["y - 1"], A2), EXP, 1)
    assert not any(empty.contains([a, 1]) for a in GRID)
    assert radical_contains(empty.generators, Ideal.of([A2.ring.one], A2.ring))


def test_whole_space():
    res = sigma_equations(Ideal(A2.ring, ()), EXP, 1)
    assert res.generators.gens == () and res.mu is None
    res2 = sigma_equations(Ideal(A3.ring, ()), fol(A3, [[1, 0, 0], [0, 1, 0]]), 2)
    assert res2.generators.gens == ()


def test_unit_variety_is_empty():
    res = sigma_equations(I(["1"], A2), DX, 1)
    assert res.groebner().text() == ["1"]


def test_three_dimensional():
    planes = fol(A3, [[1, 0, 0], [0, 1, 0]])
    V = I(["x*z", "y*z"], A3)  # the plane z = 0 union the z-axis
    # on the leaf z = z0 != 0 the zero x = y = 0 is simple, so mu = 2 is rigorous here
    mu2 = OrderBoundPolicy("fixed", 2)
    one = sigma_equations(V, planes, 1, mu2)
    two = sigma_equations(V, planes, 2, mu2)
    assert one.contains([1, 2, 0]) and two.contains([1, 2, 0])
    assert not one.contains([0, 0, 3]) and not two.contains([0, 0, 3])
    # monotone in k on this case
    assert radical_contains(two.generators, one.generators)


def test_k_out_of_range():
    with pytest.raises(InvalidOrder):
        sigma_equations(I(["y"], A2), DX, 2)
    with pytest.raises(InvalidOrder):
        sigma_equations(I(["y"], A2), DX, 0)


def test_subset_cap():
    V = I(["x", "y", "x + y", "x - y"], A3)
    f = fol(A3, [[1, 0, 0]])
    with pytest.raises(SubsetCapExceeded):
        sigma_equations(V, f, 1, subset_cap=3)


def test_order_stability():
    V = I(["x*y"], A2)
    pts = [[a, 0] for a in GRID] + [[0, a] for a in GRID]
    base = [sigma_equations(V, DX, 1).contains(p) for p in pts]
    for mu in (3, 5):
        res = sigma_equations(V, DX, 1, OrderBoundPolicy("fixed", mu))
        assert res.rigorous
        assert [res.contains(p) for p in pts] == base


def test_ledger_within_bound():
    planes = fol(A3, [[1, 0, 0], [0, 1, 0]])
    mu2 = OrderBoundPolicy("fixed", 2)
    for V, f, k, pol in [(I(["x*y"], A2), DX, 1, None), (I(["y - 1"], A2), EXP, 1, None),
                         (I(["x*z", "y*z"], A3), planes, 1, mu2), (I(["x*z", "y*z"], A3), planes, 2, None)]:
        res = sigma_equations(V, f, k, pol)
        assert res.max_degree <= res.degree_bound
        assert res.sum_degree <= len(res.generators.gens) * res.degree_bound


def test_deterministic_with_threads(monkeypatch):
    V = I(["x*z", "y*z", "z^2 - z"], A3)
    f = fol(A3, [[1, 0, 0], [0, 1, 0]])
    mu2 = OrderBoundPolicy("fixed", 2)
    serial = sigma_equations(V, f, 1, mu2)
    monkeypatch.setenv("FOLIATION_LOCI_THREADS", "4")
    threaded = sigma_equations(V, f, 1, mu2)
    assert serial.generators.text() == threaded.generators.text()
    assert serial.provenance == threaded.provenance


# ------------------------------------------------------------- A(k)


def test_a_locus_examples():
    V = I(["y - c"], AC)
    flat = a_locus(V, fol(AC, [[1, 0, 0]]), ["c"], 1)
    assert flat.contains([5, 2, 2]) and not flat.contains([5, 2, 3])
    grow = a_locus(V, fol(AC, [[1, "y", 0]]), ["c"], 1)
    assert grow.contains([3, 0, 0])
    assert not grow.contains([3, 2, 2])
    assert radical_contains(grow.generators, I(["y", "c"], AC))


def test_a_locus_without_params_matches_sigma():
    V = I(["x*y"], A2)
    a = a_locus(V, DX, [], 1)
    s = sigma_equations(V, DX, 1)
    assert a.generators.text() == s.generators.text()
    assert a.metadata() == s.metadata() and a.provenance == s.provenance


def test_parameter_must_be_constant():
    with pytest.raises(ParameterNotConstant):
        a_locus(I(["y - c"], AC), fol(AC, [[1, 0, 1]]), ["c"], 1)
    with pytest.raises(ParameterNotConstant):
        a_locus(I(["y - c"], AC), fol(AC, [[1, 0, 0]]), ["w"], 1)


# ------------------------------------------------ constructible sets


def test_constructible_difference():
    A, B = I(["x"], A2), I(["x", "y"], A2)
    punctured = constructible_difference(A, B)
    assert punctured.contains([0, 1]) and not punctured.contains([0, 0])
    assert not punctured.is_empty()
    closed = constructible_difference(A, I(["1"], A2))
    assert closed.contains([0, 0]) and closed.contains([0, 7])
    assert constructible_difference(A, A).is_empty()
    assert punctured.complexity == 2
    with pytest.raises(ValueError):
        constructible_difference(A, I(["x"], A3))


def test_project_closure():
    log = []
    assert project_closure(I(["x*y - 1"], A2), ["y"], log).gens == ()
    assert log and log[0]["step"] == "projection"
    assert project_closure(I(["x - c", "y - c"], AC), ["c"]).text() == ["x - y"]
    A = I(["x*y"], A2)
    assert project_closure(A, []) is A
