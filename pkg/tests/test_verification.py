import math
from fractions import Fraction

import numpy as np
import pytest

from wavebif import ModelParams, SpectralField
from wavebif import exact
from wavebif.spectral import kernel_field, make_field
from wavebif.verification import (
    check_algebra,
    check_contraction,
    check_d_alpha,
    check_kernel,
    check_smoothness,
    check_theorem_form,
    check_theta,
    check_vanish_projection,
    check_vanishing_integral,
    pde_residual,
    run_all,
    spectral_decay,
)

from . import oracles


@pytest.mark.parametrize("p", [1, 2, 3])
def test_vanishing_integral(p):
    r = check_vanishing_integral(p, 64)
    assert r.status == "pass"
    assert r.detail["exact_zero_above"]


def test_vanishing_integral_values():
    assert exact.sin_power_sin_integral(1, 5) == 0
    assert exact.sin_power_sin_integral(1, 3) == Fraction(-1, 4)
    assert exact.sin_power_sin_integral(1, 1) == Fraction(3, 4)
    for k in range(1, 12):
        ref = oracles.sin_power_sin_integral(1, k)
        assert float(exact.sin_power_sin_integral(1, k)) * math.pi == pytest.approx(ref, abs=1e-14)
    with pytest.raises(ValueError):
        check_vanishing_integral(1, 3)


@pytest.mark.parametrize("p,K,zero", [(1, 3, True), (2, 5, True), (3, 7, True), (1, 2, False)])
def test_vanish_projection(p, K, zero):
    r = check_vanish_projection(p, K)
    assert r.status == "pass"
    assert r.detail["exact_zero"] is zero
    if not zero:
        assert (3, 3) in r.detail["exact_modes"] or (-3, 3) in r.detail["exact_modes"]


def test_theta_check():
    assert check_theta().status == "pass"


@pytest.mark.parametrize("m", [math.sqrt(2), math.e - 2])
def test_kernel_check(m):
    assert check_kernel(m, 300).status == "pass"


def test_kernel_check_warns_on_rational_mass():
    r = check_kernel(1.0, 100)
    assert r.status == "warn"
    assert r.detail["extra_zeros"] > 0


def test_algebra_check():
    r = check_algebra(pairs=30)
    assert r.status == "pass"
    assert r.detail["violations"] == 0


def test_d_alpha_check(params):
    assert check_d_alpha(params, 20).status == "pass"


def test_contraction_check(params):
    r = check_contraction(params)
    assert r.passed
    assert r.detail["contraction_factor"] < 0.5
    assert r.detail["residual"] <= params.tol_range * 1e-6


def test_pde_residual_zero_kernel(params):
    assert pde_residual(kernel_field(0.0, 8, 8), 0.0, params.omega1, 0.1, params) == 0.0


def test_pde_residual_converged(point, params):
    u = kernel_field(point.rho, params.trunc_t, params.trunc_x) + point.v
    r = pde_residual(u, point.rho, point.omega, point.alpha, params)
    assert r <= 1e-10
    assert r == point.resid_pde


def test_pde_residual_sensitive(point, params):
    u = kernel_field(point.rho, params.trunc_t, params.trunc_x) + point.v
    base = pde_residual(u, point.rho, point.omega, point.alpha, params)
    bumped = u + make_field([((3, 3), 1e-6)], params.trunc_t, params.trunc_x)
    r = pde_residual(bumped, point.rho, point.omega, point.alpha, params)
    assert r > 1e3 * max(base, 1e-16)


def test_pde_residual_truncation_doubling(point, params):
    big = params.with_(trunc_t=128, trunc_x=128)
    u = kernel_field(point.rho, 128, 128) + point.v.resized(128, 128)
    r = pde_residual(u, point.rho, point.omega, point.alpha, big)
    assert r <= max(point.resid_pde, 1e-14) * 10


def test_theorem_form(point, branch, params):
    r = check_theorem_form(point, params, branch)
    assert r.detail["kernel_exact"]
    assert r.detail["v_exponent"] >= 2 * params.p + 0.5
    assert r.detail["v_exponent"] == pytest.approx(2 * params.p + 1, abs=0.05)


def test_theorem_form_ball_at_s12(point, params):
    # the constant in ||v|| ~ C rho^3 is about 37 in X^12, so rho^{2.5} is not met at 1e-2
    r = check_theorem_form(point, params)
    assert r.detail["in_ball"] is (point.v_norm <= point.rho**2.5)
    assert r.status == ("pass" if r.detail["in_ball"] else "warn")


def test_smoothness_converged(point, params):
    r = check_smoothness(point, params)
    assert r.status == "pass"
    assert r.detail["tail_rel"] <= 1e-20
    assert math.isfinite(r.detail["norm"])


def test_smoothness_zero_field(params):
    r = check_smoothness(SpectralField.zeros(8, 8), params)
    assert r.status == "pass"
    assert r.detail["vacuous"]


def test_smoothness_flags_algebraic_tail(params):
    terms = [((n, n), 1.0 / n**2) for n in range(1, 40)]
    f = make_field(terms, 40, 40)
    dec = spectral_decay(f)
    assert not dec["geometric"]
    assert check_smoothness(f, params).status == "fail"


def test_smoothness_accepts_geometric_tail(params):
    f = make_field([((n, n), 0.5**n) for n in range(1, 40)], 40, 40)
    dec = spectral_decay(f)
    assert dec["geometric"]
    assert dec["rate"] == pytest.approx(math.log10(2), rel=1e-6)


def test_run_all_quick(params):
    res = run_all(params, quick=True)
    assert all(r.passed for r in res)
    assert sum(r.seconds for r in res) < 5
