from fractions import Fraction

import pytest

from foliation_loci.errors import TruncationTooSmall
from foliation_loci.series import LaurentSeries, PowerSeries, power_series_inverse, power_series_sqrt


def test_laurent_arithmetic():
    a = LaurentSeries("t", -1, (Fraction(1), Fraction(2), Fraction(0)), 2)
    b = LaurentSeries("t", 0, (Fraction(1), Fraction(1)), 2)
    p = a * b
    assert p.valuation == -1 and p.precision == 1
    assert p.coeffs == (1, 3)
    assert (a + b).coeff(0) == 3
    assert a.residue() == 1


def test_truncation_refused():
    a = LaurentSeries("t", 0, (Fraction(1),), 1)
    with pytest.raises(TruncationTooSmall):
        a.coeff(1)
    with pytest.raises(TruncationTooSmall):
        a.truncate(3)


def test_integrate_refuses_log_term():
    with pytest.raises(ValueError):
        LaurentSeries("t", -1, (Fraction(1), Fraction(0)), 1).integrate()
    F = LaurentSeries("t", -2, (Fraction(1), Fraction(0), Fraction(3)), 1).integrate()
    assert F.coeff(-1) == -1 and F.coeff(1) == 3


def test_sqrt_inverse():
    s = power_series_sqrt([Fraction(1), Fraction(2), Fraction(1)], 5)  # sqrt((1+u)^2)
    assert s == [1, 1, 0, 0, 0]
    inv = power_series_inverse([Fraction(1), Fraction(-1)], 4)
    assert inv == [1, 1, 1, 1]


def test_power_series_inverse():
    one_plus = PowerSeries(2, 3, {(0, 0): Fraction(1), (1, 0): Fraction(1), (0, 1): Fraction(1)})
    prod = one_plus * one_plus.inverse()
    assert prod.terms == {(0, 0): 1}
