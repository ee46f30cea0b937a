import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wavebif.errors import NonPositiveK, RealityViolation, TruncationOverflow
from wavebif.spectral import (
    SpectralField,
    TorusField,
    d_t,
    d_x2,
    evaluate,
    grid_shape,
    kernel_field,
    l2_inner,
    make_field,
    multiply,
    odd_power,
    project_band,
    project_kernel,
    project_V,
    random_field,
    trig_field,
    xs_norm,
)

from . import oracles

RHO = 0.3
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def points(n=7, seed=0):
    r = np.random.default_rng(seed)
    return r.uniform(0, 2 * math.pi, n), r.uniform(0, 2 * math.pi, n)


def assert_same_function(f, g, atol=1e-13):
    t, x = points()
    np.testing.assert_allclose(oracles.sample(f, t, x), g(t, x), rtol=0, atol=atol)


# ---------------------------------------------------------------- make_field

def test_make_field_empty_is_zero():
    f = make_field([])
    assert np.all(f.coeffs == 0)
    assert xs_norm(f, 3) == 0.0


def test_make_field_kernel_term():
    f = make_field([((1, 1), RHO / 2), ((-1, 1), RHO / 2)])
    assert_same_function(f, lambda t, x: RHO * np.cos(t) * np.sin(x))
    assert f == kernel_field(RHO)


def test_make_field_fills_partner():
    f = make_field([((1, 1), 0.5j)])
    assert f[(-1, 1)] == -0.5j
    # c_{+-1} = (d -+ i e)/2 with d = 0, e = -1
    assert_same_function(f, lambda t, x: -np.sin(t) * np.sin(x))


def test_make_field_errors():
    with pytest.raises(NonPositiveK):
        make_field([((1, 0), 1.0)])
    with pytest.raises(RealityViolation):
        make_field([((2, 1), 1 + 1j), ((-2, 1), 1 + 1j)])
    with pytest.raises(TruncationOverflow):
        make_field([((5, 1), 1.0)], trunc_t=2, trunc_x=2)


def test_trig_field_matches_real_data():
    f = trig_field(cos={(2, 3): 0.7, (0, 1): -1.1}, sin={(1, 2): 0.25})
    assert_same_function(
        f, lambda t, x: 0.7 * np.cos(2 * t) * np.sin(3 * x) - 1.1 * np.sin(x)
        + 0.25 * np.sin(t) * np.sin(2 * x))


# ---------------------------------------------------------------- evaluate

def test_evaluate_examples():
    assert evaluate(kernel_field(RHO), 0.0, math.pi / 2) == pytest.approx(RHO, abs=1e-15)
    assert evaluate(make_field([]), 1.3, 0.4) == 0.0
    f = trig_field(sin={(3, 2): 1.0})
    assert evaluate(f, math.pi / 6, math.pi / 4) == pytest.approx(1.0, abs=1e-15)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_evaluate_matches_oracle(seed):
    f = random_field(np.random.default_rng(seed), 4, 5)
    t, x = points(5, seed)
    np.testing.assert_allclose(evaluate(f, t, x), oracles.sample(f, t, x), atol=1e-13)


# ---------------------------------------------------------------- xs_norm

def test_xs_norm_examples():
    assert xs_norm(make_field([]), 12) == 0.0
    for s in (0, 1, 2.5, 12):
        assert xs_norm(kernel_field(RHO), s) == pytest.approx(RHO, rel=1e-15)
    # sin(2x) is c_{0,2} = 1 in the sine convention: weight 0 + 2^4
    assert xs_norm(trig_field(cos={(0, 2): 1.0}), 2) == pytest.approx(4.0, rel=1e-15)


@settings(max_examples=25, deadline=None)
@given(seeds, st.sampled_from([0, 1, 2, 5.5, 12]))
def test_xs_norm_matches_high_precision_sum(seed, s):
    f = random_field(np.random.default_rng(seed), 6, 6, s)
    entries = dict(f.items())
    assert xs_norm(f, s) == pytest.approx(oracles.weighted_norm(entries, s), rel=1e-13)


def test_xs_norm_no_overflow_at_large_index():
    f = make_field([((64, 64), 1e-30)], 64, 64)
    val = xs_norm(f, 12)
    assert math.isfinite(val)
    # modes (+-64, 64), each with weight 2 * 64^24
    assert val == pytest.approx(2e-30 * 64.0**12, rel=1e-13)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_parseval_against_quadrature(seed):
    f = random_field(np.random.default_rng(seed), 5, 5)
    t, x = oracles.grid(16), oracles.grid(16)
    vals = oracles.sample(f, t[:, None], x[None, :])
    l2 = oracles.torus_integral(vals**2) / math.pi**2
    assert xs_norm(f, 0) ** 2 == pytest.approx(l2, rel=1e-10)


# ---------------------------------------------------------------- derivatives

def test_d_t_examples():
    assert d_t(kernel_field(RHO)).allclose(trig_field(sin={(1, 1): -RHO}), rtol=0, atol=1e-17)
    assert np.all(d_t(make_field([])).coeffs == 0)
    f = d_t(trig_field(sin={(3, 1): 1.0}))
    assert_same_function(f, lambda t, x: 3 * np.cos(3 * t) * np.sin(x))


def test_d_x2():
    f = d_x2(trig_field(cos={(2, 3): 1.0}))
    assert_same_function(f, lambda t, x: -9 * np.cos(2 * t) * np.sin(3 * x))


# ---------------------------------------------------------------- products

def test_multiply_sin_squared_is_even():
    sx = trig_field(cos={(0, 1): 1.0})
    prod = multiply(sx, sx)
    assert isinstance(prod, TorusField)
    assert not prod.is_odd_in_x()
    assert prod[(0, 0)] == pytest.approx(0.5)
    assert prod[(0, 2)] == pytest.approx(-0.25)
    assert prod[(0, -2)] == pytest.approx(-0.25)


def test_multiply_identity():
    f = trig_field(sin={(1, 1): 1.0})
    assert multiply(f, TorusField.constant(1.0)) == f


def test_repeated_multiply_cubic_expansion():
    f = trig_field(sin={(1, 1): 1.0})
    cube = multiply(multiply(f, f), f)
    assert isinstance(cube, SpectralField)
    expect = make_field(list(oracles.cubic_expansion(-1.0).items()))
    assert cube.allclose(expect.resized(cube.trunc_t, cube.trunc_x), rtol=0, atol=1e-16)


@pytest.mark.parametrize("method", ["direct", "fft", "auto"])
def test_multiply_matches_pointwise(method, rng):
    f = random_field(rng, 3, 4)
    g = random_field(rng, 2, 3)
    h = multiply(multiply(f, g, method=method), g, method=method)
    t, x = points(9, 3)
    np.testing.assert_allclose(oracles.sample(h, t, x),
                               oracles.sample(f, t, x) * oracles.sample(g, t, x) ** 2, atol=1e-12)


def test_odd_power_examples():
    f = trig_field(sin={(1, 1): 1.0})
    expect = make_field(list(oracles.cubic_expansion(-1.0).items()), 3, 3)
    for method in ("direct", "fft"):
        assert odd_power(f, 3, 3, 3, method=method).allclose(expect, rtol=0, atol=1e-16)
    assert np.all(odd_power(make_field([], 4, 4), 5).coeffs == 0)
    k = kernel_field(RHO, 2, 2)
    assert odd_power(k, 1) == k
    with pytest.raises(ValueError):
        odd_power(k, 2)


@settings(max_examples=20, deadline=None)
@given(seeds, st.sampled_from([3, 5]))
def test_odd_power_matches_quadrature(seed, q):
    f = random_field(np.random.default_rng(seed), 3, 3)
    out = odd_power(f, q, 10, 10)
    M = 64
    t, x = oracles.grid(M), oracles.grid(M)
    vals = oracles.sample(f, t[:, None], x[None, :]) ** q
    ref = oracles.sine_coefficients(vals, 10, 10)
    scale = np.abs(ref).max()
    np.testing.assert_allclose(out.coeffs, ref, rtol=0, atol=1e-13 * scale)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_direct_and_fft_backends_agree(seed):
    f = random_field(np.random.default_rng(seed), 6, 6, 2)
    a = odd_power(f, 3, 8, 8, method="direct")
    b = odd_power(f, 3, 8, 8, method="fft")
    assert a.allclose(b, rtol=0, atol=1e-14 * np.abs(a.coeffs).max())


def _exact_from_sine(coeffs):
    """ExactTrig of ``sum c e^{int} sin(kx)`` for real dyadic c."""
    from fractions import Fraction

    from wavebif.exact import ExactTrig

    terms = {}
    for (n, k), c in coeffs.items():
        # c sin(kx) = (c / 2i) e^{ikx} - (c / 2i) e^{-ikx}
        terms[(n, k)] = (0, Fraction(-c) / 2)
        terms[(n, -k)] = (0, Fraction(c) / 2)
    return ExactTrig(terms)


def test_direct_product_keeps_relative_accuracy_in_the_tail():
    # steep geometric spectrum with dyadic values, so the exact cube is computable
    c = {(n, k): 2.0 ** (-12 * (abs(n) + k)) for n in range(-4, 5) for k in range(1, 5)}
    f = make_field(list(c.items()))
    exact = _exact_from_sine(c) ** 3
    direct = odd_power(f, 3, 6, 6, method="direct")
    fft_ = odd_power(f, 3, 6, 6, method="fft")
    worst_direct = worst_fft = 0.0
    for (n, k), val in direct.items():
        re, im = exact.sine_coefficient(n, k)
        ref = complex(float(re), float(im))
        if ref == 0:
            assert val == 0
            continue
        worst_direct = max(worst_direct, abs(val - ref) / abs(ref))
        worst_fft = max(worst_fft, abs(fft_[(n, k)] - ref) / abs(ref))
    # every coefficient to near machine precision, however small
    assert worst_direct <= 1e-13
    # the FFT resolves coefficients only down to eps times the largest one
    assert worst_fft > 1.0


def test_grid_overflow():
    with pytest.raises(TruncationOverflow):
        grid_shape(4000, 10, 3, 4000, 10)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_reality_closure(seed):
    r = np.random.default_rng(seed)
    f = random_field(r, 4, 4)
    g = random_field(r, 3, 5)
    for h in (f + g, f - g, f * 2.5, d_t(f), d_x2(f), odd_power(f, 3, 6, 6), odd_power(f, 5, 6, 6, method="fft"),
              multiply(multiply(f, g), g)):
        scale = max(np.abs(h.coeffs).max(), 1e-300)
        assert h.reality_defect() <= 1e-14 * scale


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_odd_power_oddness(seed):
    f = random_field(np.random.default_rng(seed), 4, 4)
    # fft path raises AliasingDetected if the cosine sector exceeds 1e-12 l1(f)^q
    odd_power(f, 3, 4, 4, method="fft")
    cube = multiply(multiply(f, f), f)
    assert isinstance(cube, SpectralField)


# ---------------------------------------------------------------- projections

def test_projection_examples():
    k = kernel_field(RHO)
    assert project_kernel(k) == k
    assert np.all(project_V(k).coeffs == 0)
    f = trig_field(sin={(3, 1): 1.0})
    assert np.all(project_kernel(f).coeffs == 0)
    g = trig_field(cos={(1, 1): 1.0}, sin={(2, 2): 1.0})
    assert project_kernel(g) == trig_field(cos={(1, 1): 1.0}, trunc_t=2, trunc_x=2)
    assert project_V(g) == trig_field(sin={(2, 2): 1.0}, trunc_t=2, trunc_x=2)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_projection_properties(seed):
    f = random_field(np.random.default_rng(seed), 5, 5)
    assert project_kernel(f) + project_V(f) == f
    assert project_kernel(project_kernel(f)) == project_kernel(f)
    assert project_V(project_V(f)) == project_V(f)
    assert abs(l2_inner(project_kernel(f), project_V(f))) <= 1e-12 * xs_norm(f, 0) ** 2


def test_band_examples():
    f = trig_field(cos={(0, 1): 1.0, (0, 5): 1.0})
    assert project_band(f, 2, "above") == trig_field(cos={(0, 5): 1.0}, trunc_t=0, trunc_x=5)
    assert np.all(project_band(f, 5, "above").coeffs == 0)
    with pytest.raises(ValueError):
        project_band(f, 0, "above")


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 8))
def test_band_partition(seed, K):
    f = random_field(np.random.default_rng(seed), 4, 6)
    assert project_band(f, K, "above") + project_band(f, K, "below") == f


def test_l2_inner_matches_quadrature(rng):
    f = random_field(rng, 3, 3)
    g = random_field(rng, 3, 3)
    t, x = oracles.grid(16), oracles.grid(16)
    vals = oracles.sample(f, t[:, None], x[None, :]) * oracles.sample(g, t[:, None], x[None, :])
    assert l2_inner(f, g) == pytest.approx(oracles.torus_integral(vals), rel=1e-12)


# ---------------------------------------------------------------- algebra inequality

@settings(max_examples=100, deadline=None)
@given(seeds, st.sampled_from([2, 12]))
def test_algebra_inequality(seed, s):
    from wavebif.verification import torus_xs_norm

    r = np.random.default_rng(seed)
    v = random_field(r, 6, 6, s)
    w = random_field(r, 6, 6, s)
    v = v * (1 / xs_norm(v, s))
    w = w * (1 / xs_norm(w, s))
    assert torus_xs_norm(multiply(v, w), s) <= 2 ** (2 * s)


def test_torus_norm_matches_quadrature(rng):
    from wavebif.verification import torus_xs_norm

    v = random_field(rng, 3, 3)
    w = random_field(rng, 2, 3)
    prod = multiply(v, w)
    # at s = 0 the norm is the L2 norm with the same normalisation as for
    # odd fields: int (vw)^2 / pi^2
    t, x = oracles.grid(32), oracles.grid(32)
    vals = oracles.sample(v, t[:, None], x[None, :]) * oracles.sample(w, t[:, None], x[None, :])
    ref = math.sqrt(oracles.torus_integral(vals**2) / math.pi**2)
    assert torus_xs_norm(prod, 0) == pytest.approx(ref, rel=1e-12)
