from fractions import Fraction

import pytest

from foliation_loci.algebra import fraction_field, parse_poly, poly_ring
from foliation_loci.connection import ConnectionMatrix
from foliation_loci.errors import (
    ChartDenominator,
    CommutationFailure,
    DependentFields,
    FlatnessFailure,
    PointOffChart,
    TangencyFailure,
)
from foliation_loci.foliation import (
    AffineChart,
    flow_jet,
    from_connection,
    from_graph_coefficients,
    make_foliation,
    numeric_flow,
    subfoliation_family,
)
from foliation_loci.gauss_manin import HyperellipticFamily, gauss_manin_matrix

A2 = AffineChart.affine_space(["x", "y"])
x, y = A2.ring.gens


def series_text(jet, var):
    return jet.to_json()["series"][var]


def test_graph_coefficients():
    f = from_graph_coefficients([[0]], A2)
    assert f.to_json()["fields"] == [["1", "0"]]
    g = from_graph_coefficients([[y]], A2)
    assert g.to_json()["fields"] == [["1", "y"]]


def test_commutation_failure_names_pair():
    A3 = AffineChart.affine_space(["x", "y", "z"])
    X, Y, Z = A3.ring.gens
    with pytest.raises(CommutationFailure) as exc:
        from_graph_coefficients([[Y], [-X]], A3)
    assert exc.value.component == "z"
    from_graph_coefficients([[Y], [X]], A3)


def test_tangency_failure():
    circle = AffineChart.build(["x", "y"], [parse_poly("x^2 + y^2 - 1", A2.ring)])
    make_foliation(circle, [(-y, x)])
    with pytest.raises(TangencyFailure):
        make_foliation(circle, [(1, 0)])


def test_dependent_fields():
    with pytest.raises(DependentFields):
        make_foliation(A2, [(1, 0), (2, 0)])


def test_chart_denominator():
    K = A2.field
    with pytest.raises(ChartDenominator):
        make_foliation(A2, [(K.one, K.one / K.gens[0])])
    chart = AffineChart.affine_space(["x", "y"], [x])
    make_foliation(chart, [(K.one, K.one / K.gens[0])])


def test_flow_jet_examples():
    straight = flow_jet(make_foliation(A2, [(1, 0)]), 3)
    assert series_text(straight, "x") == {"1": "x", "t1": "1"}
    assert series_text(straight, "y") == {"1": "y"}
    expo = flow_jet(make_foliation(A2, [(1, y)]), 3)
    assert series_text(expo, "y") == {"1": "y", "t1": "y", "t1^2": "1/2*y", "t1^3": "1/6*y"}
    shear = flow_jet(make_foliation(A2, [(1, x)]), 2)
    assert series_text(shear, "y") == {"1": "y", "t1": "x", "t1^2": "1/2"}


def test_flow_jet_truncation_consistent():
    f = make_foliation(A2, [(1, x * y)])
    assert flow_jet(f, 5).truncate(3).to_json() == flow_jet(f, 3).to_json()


def test_flow_jet_stays_on_chart():
    circle = AffineChart.build(["x", "y"], [parse_poly("x^2 + y^2 - 1", A2.ring)])
    f = make_foliation(circle, [(-y, x)])
    pt = [Fraction(3, 5), Fraction(4, 5)]
    series = numeric_flow(f, pt, 6)
    X, Y = series
    val = X * X + Y * Y - 1
    assert not val.terms
    with pytest.raises(PointOffChart):
        numeric_flow(f, [1, 1], 3)


def test_from_connection():
    K = fraction_field(("x",))
    f = from_connection(ConnectionMatrix(("x",), ([[K.one]],)))
    assert f.to_json()["fields"] == [["1", "g11"]]
    zero = from_connection(ConnectionMatrix(("x",), ([[K.zero]],)))
    assert zero.to_json()["fields"] == [["1", "0"]]
    jet = flow_jet(f, 3)
    assert series_text(jet, "g11") == {"1": "g11", "t1": "g11", "t1^2": "1/2*g11", "t1^3": "1/6*g11"}


def test_from_connection_legendre_commutes():
    leg = HyperellipticFamily.parse("x^3 - x^2 - lam*x^2 + lam*x", ["lam"])
    f = from_connection(gauss_manin_matrix(leg))
    assert f.n == 1 and len(f.chart.variables) == 5


def test_from_connection_flatness_failure():
    K = fraction_field(("u", "v"))
    u, v = K.gens
    Z = K.zero
    bad = ConnectionMatrix(("u", "v"), ([[Z, v], [Z, Z]], [[Z, Z], [Z, Z]]))
    with pytest.raises(FlatnessFailure):
        from_connection(bad)


def test_connection_row_convention_matches_jet():
    # g' = Omega g: the group block of the jet satisfies the connection equation to first order
    K = fraction_field(("x",))
    X = K.gens[0]
    O = [[K.zero, K.one], [X, K.zero]]
    f = from_connection(ConnectionMatrix(("x",), (O,)))
    jet = flow_jet(f, 2).to_json()["series"]
    assert jet["g11"]["t1"] == "g21"
    assert jet["g21"]["t1"] == "x*g11"


def test_subfoliation_family():
    f = make_foliation(A2, [(1, 0), (0, 1)])
    same, cs = subfoliation_family(f, 1)
    assert cs == () and same is f
    fam, cs = subfoliation_family(f, 2)
    assert cs == ("c1_2",) and fam.n == 1
    assert fam.to_json()["fields"] == [["1", "c1_2", "0"]]
    A3 = AffineChart.affine_space(["x", "y", "z"])
    g = make_foliation(A3, [(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    fam3, cs3 = subfoliation_family(g, 2)
    assert len(cs3) == 2 and fam3.n == 2
