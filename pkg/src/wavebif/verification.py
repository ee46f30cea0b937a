"""Independent checks of the identities and estimates the construction rests on.

Each ``check_*`` function returns a :class:`CheckResult` with status
``"pass"``, ``"warn"`` or ``"fail"`` and a ``detail`` dict of measured
values. :func:`run_all` bundles them for the CLI.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import exact
from .bifurcation import leading_alpha, theta_constant, theta_quadrature
from .linear import apply_L, apply_L_inverse, d_alpha_L_inverse, kernel_scan
from .range_solver import apply_A, estimate_lipschitz, solve_range
from .spectral import (
    d_t,
    kernel_field,
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


@dataclass
class CheckResult:
    name: str
    status: str
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def passed(self):
        return self.status != "fail"

    def line(self):
        return f"[{self.status.upper():4}] {self.name} ({self.seconds:.2f}s)"


def _status(ok, warn=False):
    if not ok:
        return "fail"
    return "warn" if warn else "pass"


def pde_residual(u, rho, omega, alpha, params):
    """``||L u - omega^{2p+1} (u_t)^{2p+1}||_{X^{s-3}} / rho`` at the solver truncation.

    Includes the kernel modes, so it also measures the bifurcation equations.
    For ``rho = 0`` the unscaled norm is returned.
    """
    nt, nx = params.trunc_t, params.trunc_x
    u = u.resized(nt, nx)
    lhs = apply_L(u, params, omega, alpha)
    rhs = omega ** params.q * odd_power(d_t(u), params.q, nt, nx)
    res = xs_norm(lhs - rhs, max(params.s - 3, 0))
    return res / rho if rho > 0 else res


def check_vanishing_integral(p, k_max=64):
    """Exact and floating values of ``int_0^{2pi} sin^{2p+1}(x) sin(kx) dx`` for k <= k_max."""
    t0 = time.perf_counter()
    q = 2 * p + 1
    if k_max <= q:
        raise ValueError("k_max must exceed 2p+1")
    exact_vals = {k: exact.sin_power_sin_integral(p, k) for k in range(1, k_max + 1)}
    # floating route: sine coefficients of sin(x)^q from the pseudo-spectral power
    sx = make_field([((0, 1), 1.0)], 0, k_max)
    powf = odd_power(sx, q, 0, k_max)
    float_vals = {k: math.pi * powf[(0, k)].real for k in range(1, k_max + 1)}
    above = range(q + 1, k_max + 1)
    exact_zero = all(exact_vals[k] == 0 for k in above)
    float_max = max(abs(float_vals[k]) for k in above)
    odd_below = [k for k in range(1, q + 1, 2)]
    nonzero_below = all(exact_vals[k] != 0 for k in odd_below)
    ok = exact_zero and float_max <= 1e-13 and nonzero_below
    return CheckResult(
        f"vanishing integral p={p}", _status(ok),
        dict(p=p, k_max=k_max, exact_zero_above=exact_zero, float_max_above=float_max,
             values_over_pi={k: str(exact_vals[k]) for k in range(1, q + 1)}),
        time.perf_counter() - t0)


def check_vanish_projection(p, K=None):
    """``Pi_{k>K} Pi_V sin^{2p+1}(t) sin^{2p+1}(x)`` in both backends."""
    t0 = time.perf_counter()
    q = 2 * p + 1
    K = q if K is None else K
    e = (exact.ExactTrig.sin_t(1) * exact.ExactTrig.sin_x(1)) ** q
    leftover = e.sine_modes(kernel_free=True, k_above=K)
    f = trig_field(sin={(1, 1): 1.0}, trunc_t=q, trunc_x=q + 2)
    g = project_band(project_V(odd_power(f, q)), K, "above")
    float_max = float(np.abs(g.coeffs).max(initial=0.0))
    vanishes = not leftover
    ok = vanishes == (K >= q) and (float_max <= 1e-14 if vanishes else True)
    return CheckResult(
        f"vanish projection p={p} K={K}", _status(ok),
        dict(p=p, K=K, exact_zero=vanishes, exact_modes=sorted(leftover), float_max=float_max),
        time.perf_counter() - t0)


def check_theta(ps=(1, 2, 3, 4)):
    t0 = time.perf_counter()
    errs = {p: abs(theta_constant(p) - theta_quadrature(p)) / theta_constant(p) for p in ps}
    ok = max(errs.values()) <= 1e-12 and abs(theta_constant(1) - 9 * math.pi**2 / 16) <= 1e-15 * 6
    return CheckResult("theta closed form vs quadrature", _status(ok), dict(rel_err=errs),
                       time.perf_counter() - t0)


def check_kernel(m, scan=500):
    """Zeros of ``k^2 + m - (1+m) n^2``; extra zeros or near-zeros only warn."""
    t0 = time.perf_counter()
    ks = kernel_scan(m, scan, scan)
    expected = sorted([(-1, 1), (1, 1)])
    extra = sorted(set(ks.zeros) - set(expected))
    ok = set(expected) <= set(ks.zeros)
    warn = bool(extra or ks.near_resonances)
    return CheckResult(
        "kernel uniqueness", _status(ok, warn),
        dict(m=m, zeros=sorted(ks.zeros)[:20], extra_zeros=len(extra),
             min_nonzero=ks.min_nonzero, argmin=ks.argmin,
             near_resonances=len(ks.near_resonances)),
        time.perf_counter() - t0)


def check_algebra(pairs=100, s_values=(2, 12), trunc=8, seed=1):
    """``||vw||_{X^s} <= 2^{2s} ||v|| ||w||`` on random unit fields."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    worst = {}
    violations = 0
    for s in s_values:
        worst[s] = 0.0
        for _ in range(pairs):
            v = random_field(rng, trunc, trunc, s)
            w = random_field(rng, trunc, trunc, s)
            v = v * (1 / xs_norm(v, s))
            w = w * (1 / xs_norm(w, s))
            prod = torus_xs_norm(multiply(v, w), s)
            ratio = prod / 2 ** (2 * s)
            worst[s] = max(worst[s], ratio)
            violations += ratio > 1.0
    return CheckResult("algebra inequality", _status(violations == 0),
                       dict(violations=int(violations), worst_ratio=worst),
                       time.perf_counter() - t0)


def torus_xs_norm(f, s):
    """X^s-type norm of a full-basis product: ``sum (|n|^{2s} + |j|^{2s}) |C_{n,j}|^2``
    scaled to the sine convention (a sine mode splits over j = +-k)."""
    if hasattr(f, "to_torus"):
        return xs_norm(f, s)
    c = f.coeffs
    nt, nx = f.shape
    n = np.abs(np.arange(-nt, nt + 1, dtype=float))[:, None]
    j = np.abs(np.arange(-nx, nx + 1, dtype=float))[None, :]
    big = max(nt, nx, 1)
    w = (n / big) ** (2 * s) + (j / big) ** (2 * s)
    peak = np.abs(c).max(initial=0.0)
    if peak == 0:
        return 0.0
    # |c_{n,k}|^2 = 2 (|C_{n,k}|^2 + |C_{n,-k}|^2) for odd data
    return peak * big**s * math.sqrt(2 * float(np.sum(w * (np.abs(c) / peak) ** 2)))


def check_d_alpha(params, modes=50, h=1e-6, seed=2):
    """``d/d alpha L^{-1}`` formula against central differences on random modes."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(modes):
        while True:
            n = int(rng.integers(-20, 21))
            k = int(rng.integers(1, 21))
            if n != 0 and not (abs(n) == 1 and k == 1):
                break
        omega = float(rng.uniform(params.W0, params.W1))
        alpha = float(rng.uniform(0.01, 0.2))
        c = complex(rng.standard_normal(), rng.standard_normal())
        f = make_field([((n, k), c)])
        exact_d = d_alpha_L_inverse(f, params, omega, alpha)[(n, k)]
        fd = (apply_L_inverse(f, params, omega, alpha + h)[(n, k)]
              - apply_L_inverse(f, params, omega, alpha - h)[(n, k)]) / (2 * h)
        worst = max(worst, abs(fd - exact_d) / abs(exact_d))
    return CheckResult("d_alpha L^-1 vs finite differences", _status(worst <= 1e-6),
                       dict(modes=modes, h=h, max_rel_err=worst), time.perf_counter() - t0)


def check_contraction(params, rho=1e-2, samples=4):
    """Range iteration at leading-order (alpha, omega).

    Fails only if the iteration does not converge to ``tol_range``; the
    asymptotic bounds (factor <= 1/2, ``||v|| <= rho^{2p+1/2}``) are
    reported and downgrade the status to ``warn`` when not met.
    """
    t0 = time.perf_counter()
    omega = params.omega1
    alpha = leading_alpha(rho, omega, params.p)
    try:
        rep = solve_range(rho, omega, alpha, params)
    except Exception as exc:  # reported, not raised
        return CheckResult("range contraction", "fail", dict(error=repr(exc)), time.perf_counter() - t0)
    lip = estimate_lipschitz(rho, omega, alpha, params, samples=samples)
    ok = rep.residual <= params.tol_range * max(rho ** params.q, rep.v_norm)
    bounds = rep.contraction_factor <= 0.5 and rep.in_ball
    return CheckResult(
        "range contraction", _status(ok, warn=not bounds),
        dict(rho=rho, s=params.s, iterations=rep.iterations, residual=rep.residual,
             contraction_factor=rep.contraction_factor, lipschitz=lip,
             v_norm=rep.v_norm, ball=rep.ball_radius, in_ball=rep.in_ball),
        time.perf_counter() - t0)


def check_theorem_form(point, params, branch=None):
    """Kernel part equals ``rho cos t sin x`` exactly; size of v vs the ball.

    With ``branch`` (a list of points) also fits the exponent of ``||v||`` in rho.
    """
    t0 = time.perf_counter()
    u = kernel_field(point.rho, params.trunc_t, params.trunc_x) + point.v
    kernel_exact = project_kernel(u) == kernel_field(point.rho, params.trunc_t, params.trunc_x)
    radius = point.rho ** (2 * params.p + 0.5)
    detail = dict(kernel_exact=bool(kernel_exact), v_norm=point.v_norm, ball=radius,
                  in_ball=point.v_norm <= radius)
    if branch:
        good = [b for b in branch if b.converged]
        if len(good) >= 2:
            x = np.log([b.rho for b in good])
            y = np.log([b.v_norm for b in good])
            detail["v_exponent"] = float(np.polyfit(x, y, 1)[0])
    ok = kernel_exact
    warn = not detail["in_ball"] or detail.get("v_exponent", math.inf) < 2 * params.p + 0.5
    return CheckResult("theorem form", _status(ok, warn), detail, time.perf_counter() - t0)


def spectral_decay(f, floor_rel=None):
    """Shell maxima ``max |c_{n,k}|`` over ``max(|n|, k) = j`` and a decay fit.

    Shells below ``floor_rel`` (default ``1e3 * eps``) times the peak are
    treated as rounding noise. Returns a dict with the geometric rate per
    shell (log10) and whether a geometric model beats an algebraic one.
    """
    floor_rel = 1e3 * np.finfo(float).eps if floor_rel is None else floor_rel
    c = np.abs(f.coeffs)
    peak = c.max(initial=0.0)
    if peak == 0:
        return dict(vacuous=True, geometric=True, rate=math.inf, tail_rel=0.0, shells=[])
    n = np.abs(f.n_values())[:, None]
    k = f.k_values()[None, :]
    shell = np.maximum(n, k)
    maxima = np.array([c[shell == j].max(initial=0.0) for j in range(1, shell.max() + 1)])
    js = np.arange(1, len(maxima) + 1)
    live = maxima > floor_rel * peak
    out = dict(vacuous=False, shells=maxima.tolist(), peak=float(peak))
    if live.sum() < 3:
        out.update(geometric=True, rate=math.inf)
    else:
        x, y = js[live], np.log10(maxima[live])
        geo = np.polyfit(x, y, 1, full=True)
        alg = np.polyfit(np.log10(x), y, 1, full=True)
        sse_geo = float(geo[1][0]) if len(geo[1]) else 0.0
        sse_alg = float(alg[1][0]) if len(alg[1]) else 0.0
        out.update(geometric=sse_geo <= sse_alg, rate=float(-geo[0][0]),
                   sse_geometric=sse_geo, sse_algebraic=sse_alg)
    return out


def check_smoothness(point, params, k0=None, tail_shell=9, tail_rel=1e-20):
    """Finite X^{k0+10} norm, geometric spectral decay, and a small tail.

    ``point`` is a branch point (the solution ``u = rho cos t sin x + v`` is
    inspected) or a bare field. The tail is the largest coefficient with
    ``max(|n|, k) > tail_shell``, relative to the largest coefficient.
    """
    t0 = time.perf_counter()
    k0 = params.k0 if k0 is None else k0
    if hasattr(point, "v"):
        f = kernel_field(point.rho, params.trunc_t, params.trunc_x) + point.v
    else:
        f = point
    norm = xs_norm(f, k0 + 10)
    dec = spectral_decay(f)
    tail = 0.0 if dec["vacuous"] else max(dec["shells"][tail_shell:], default=0.0) / dec["peak"]
    ok = math.isfinite(norm) and dec["geometric"] and tail <= tail_rel
    return CheckResult("smoothness", _status(ok),
                       dict(norm=norm, s=k0 + 10, geometric=dec["geometric"],
                            rate=dec.get("rate"), tail_rel=tail, vacuous=dec["vacuous"]),
                       time.perf_counter() - t0)


def run_all(params, quick=False):
    """Every check at the given parameters; ``quick`` keeps the cheap ones."""
    results = [check_theta()]
    for p in (1, 2, 3):
        results.append(check_vanishing_integral(p, 64))
        results.append(check_vanish_projection(p))
    results.append(check_kernel(params.m, 100 if quick else 500))
    results.append(check_d_alpha(params, 10 if quick else 50))
    if not quick:
        results.append(check_algebra())
        results.append(check_contraction(params))
        # extra: apply_A on v = 0 reproduces the divided cubic expansion support
        a0 = apply_A(project_V(kernel_field(0.0, params.trunc_t, params.trunc_x)), 1e-2,
                     params.omega1, leading_alpha(1e-2, params.omega1, params.p), params)
        support = max((k for (_, k), _ in a0.items()), default=0)
        results.append(CheckResult("A(0) spatial support", _status(support <= params.q),
                                   dict(max_k=support, bound=params.q)))
    return results
