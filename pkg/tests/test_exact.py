from fractions import Fraction

import pytest

from wavebif.exact import ExactTrig, sin_power_integral_closed_form, sin_power_sin_integral

from . import oracles


def test_pythagoras_exact():
    s, c = ExactTrig.sin_t(), ExactTrig.cos_t()
    assert s * s + c * c == ExactTrig.one()
    sx, cx = ExactTrig.sin_x(3), ExactTrig.cos_x(3)
    assert sx * sx + cx * cx == ExactTrig.one()


def test_triple_angle_exact():
    s = ExactTrig.sin_x()
    # sin^3 x = (3 sin x - sin 3x) / 4
    assert s**3 == Fraction(3, 4) * s - Fraction(1, 4) * ExactTrig.sin_x(3)


def test_vanishing_integral_examples():
    assert sin_power_sin_integral(1, 5) == 0
    assert sin_power_sin_integral(1, 3) == Fraction(-1, 4)
    assert sin_power_sin_integral(1, 1) == Fraction(3, 4)


@pytest.mark.parametrize("p", [1, 2, 3])
def test_vanishing_integral_against_quadrature(p):
    import math

    for k in range(1, 2 * p + 6):
        exact = float(sin_power_sin_integral(p, k)) * math.pi
        assert exact == pytest.approx(oracles.sin_power_sin_integral(p, k), abs=1e-14)
        if k > 2 * p + 1:
            assert sin_power_sin_integral(p, k) == 0


@pytest.mark.parametrize("p", [1, 2, 3, 4])
def test_sin_power_integral_closed_form(p):
    # int sin^{2p+2} / pi = 2 * mean, computed by expansion
    re, im = (ExactTrig.sin_x() ** (2 * p + 2)).mean()
    assert im == 0
    assert 2 * re == sin_power_integral_closed_form(p)


def test_sine_coefficients_of_cubic():
    e = (ExactTrig.sin_t() * ExactTrig.sin_x()) ** 3
    modes = e.sine_modes()
    ref = oracles.cubic_expansion(-1.0)
    assert set(modes) == set(ref)
    for mode, (re, im) in modes.items():
        assert complex(float(re), float(im)) == ref[mode]
    assert e.even_in_x_part().is_zero()
    assert set(e.sine_modes(kernel_free=True, k_above=2)) == {(1, 3), (-1, 3), (3, 3), (-3, 3)}
    assert e.sine_modes(kernel_free=True, k_above=3) == {}
