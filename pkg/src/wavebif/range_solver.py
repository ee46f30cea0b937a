r"""Range equation of the Lyapunov-Schmidt split.

With ``u = rho cos(t) sin(x) + v`` and ``v`` free of the kernel modes, the
non-kernel part of the rescaled equation reads ``v = A(v)`` with

.. math::

    \mathcal{A}(v) = L_{\omega,\alpha}^{-1} \Pi_V\,
        \omega^{2p+1} \big(\partial_t[\rho\cos t\sin x + v]\big)^{2p+1}.

:func:`solve_range` runs plain Picard iteration on this map from ``v = 0``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import ContractionFailure, MaxIterExceeded
from .linear import _check_domain, apply_L_inverse
from .spectral import (
    SpectralField,
    d_t,
    kernel_field,
    odd_power,
    project_V,
    random_field,
    xs_norm,
)

log = logging.getLogger(__name__)

# Step ratios above this for STALL_STEPS consecutive steps abort the iteration.
STALL_RATIO = 0.95
STALL_STEPS = 3

# A step this many ulps of ||v|| counts as converged whatever the tolerance.
ROUNDING_STEPS = 4

_EPS = np.finfo(float).eps


@dataclass
class RangeSolveReport:
    v: SpectralField
    iterations: int
    residual: float
    contraction_factor: float
    in_ball: bool
    v_norm: float = 0.0
    ball_radius: float = 0.0
    step_norms: tuple = ()


def ball_radius(rho, p):
    return rho ** (2 * p + 0.5)


def nonlinearity(v, rho, omega, params):
    """``omega^{2p+1} (d_t(rho cos t sin x + v))^{2p+1}`` at the solver truncation."""
    nt, nx = params.trunc_t, params.trunc_x
    u = kernel_field(rho, nt, nx) + v.resized(nt, nx)
    return omega ** params.q * odd_power(d_t(u), params.q, nt, nx)


def apply_A(v, rho, omega, alpha, params):
    _check_domain(v)
    g = project_V(nonlinearity(v, rho, omega, params))
    return apply_L_inverse(g, params, omega, alpha)


def solve_range(rho, omega, alpha, params, v0=None, method="picard"):
    """Fixed point of :func:`apply_A` inside ``||v||_{X^s} <= rho^{2p+1/2}``.

    Iterates until ``||v_{j+1} - v_j|| <= tol_range * rho^{2p+1}``, or until
    the step reaches the rounding floor ``ROUNDING_STEPS * eps * ||v||``.
    ``contraction_factor`` is the largest observed ratio of successive steps,
    ignoring steps already at the rounding floor. Leaving the ball only fails
    the solve when ``params.enforce_ball`` is set; ``in_ball`` records it
    either way.
    """
    s = params.s
    nt, nx = params.trunc_t, params.trunc_x
    radius = ball_radius(rho, params.p)
    if rho == 0:
        v = SpectralField.zeros(nt, nx)
        return RangeSolveReport(v, 1, 0.0, 0.0, True, 0.0, 0.0, (0.0,))
    if method == "newton":
        return _solve_newton(rho, omega, alpha, params, v0)
    if method != "picard":
        raise ValueError(f"unknown method {method!r}")

    v = SpectralField.zeros(nt, nx) if v0 is None else v0.resized(nt, nx)
    scale = rho ** params.q
    steps = []
    factor = 0.0
    stalled = 0
    for it in range(1, params.max_iter + 1):
        v_new = apply_A(v, rho, omega, alpha, params)
        step = xs_norm(v_new - v, s)
        v_norm = xs_norm(v_new, s)
        if not (math.isfinite(step) and math.isfinite(v_norm)):
            raise ContractionFailure(f"iterate became non-finite at step {it} (rho={rho:g})")
        if params.enforce_ball and v_norm > radius:
            raise ContractionFailure(
                f"iterate left the ball: ||v||={v_norm:.3e} > rho^(2p+1/2)={radius:.3e}")
        if steps:
            prev = steps[-1]
            floor = 1e3 * _EPS * max(v_norm, scale)
            if prev > floor and step > floor:
                ratio = step / prev
                factor = max(factor, ratio)
                stalled = stalled + 1 if ratio > STALL_RATIO else 0
                if stalled >= STALL_STEPS:
                    raise ContractionFailure(
                        f"step ratio above {STALL_RATIO} for {STALL_STEPS} steps (rho={rho:g}, last {ratio:.3g})")
        steps.append(step)
        v = v_new
        if step <= max(params.tol_range * scale, ROUNDING_STEPS * _EPS * v_norm):
            residual = xs_norm(apply_A(v, rho, omega, alpha, params) - v, s)
            log.debug("range solve rho=%g: %d iterations, residual %.3e", rho, it, residual)
            return RangeSolveReport(v, it, residual, factor, v_norm <= radius, v_norm, radius, tuple(steps))
    raise MaxIterExceeded(f"range iteration did not converge in {params.max_iter} steps (rho={rho:g})")


def _pack(v):
    """Real vector of the independent coefficients (n >= 0) of a kernel-free field."""
    nt = v.trunc_t
    half = v.coeffs[nt:]
    return np.concatenate([half.real.ravel(), half[1:].imag.ravel()])


def _unpack(x, nt, nx):
    rows = nt + 1
    re = x[:rows * nx].reshape(rows, nx)
    im = np.zeros((rows, nx))
    im[1:] = x[rows * nx:].reshape(nt, nx)
    half = re + 1j * im
    full = np.concatenate([np.conj(half[:0:-1]), half])
    return project_V(SpectralField(full))


def _solve_newton(rho, omega, alpha, params, v0):
    """Newton-Krylov on ``v - A(v) = 0``; for stress cases, off by default."""
    nt, nx = params.trunc_t, params.trunc_x
    scale = rho ** params.q
    x0 = _pack(SpectralField.zeros(nt, nx) if v0 is None else v0.resized(nt, nx)) / scale
    calls = [0]

    def resid(x):
        calls[0] += 1
        v = _unpack(x * scale, nt, nx)
        return _pack(v - apply_A(v, rho, omega, alpha, params)) / scale

    try:
        x = optimize.newton_krylov(resid, x0, f_tol=params.tol_range, maxiter=params.max_iter)
    except optimize.NoConvergence as exc:
        raise MaxIterExceeded(f"Newton-Krylov did not converge (rho={rho:g})") from exc
    v = _unpack(x * scale, nt, nx)
    residual = xs_norm(apply_A(v, rho, omega, alpha, params) - v, params.s)
    v_norm = xs_norm(v, params.s)
    radius = ball_radius(rho, params.p)
    return RangeSolveReport(v, calls[0], residual, float("nan"), v_norm <= radius, v_norm, radius)


def estimate_lipschitz(rho, omega, alpha, params, samples=8, rng=None, radius=None, support=16):
    """Largest ``||A(v) - A(w)|| / ||v - w||`` over random pairs in the ball.

    ``radius`` defaults to ``rho^{2p+1/2}``. Fields are drawn on the modes
    ``|n|, k <= support`` with their X^s norm spread evenly over them;
    keeping the support moderate keeps the products exact (see
    :func:`wavebif.spectral.multiply`), so the ratio is not polluted by
    rounding amplified by the X^s weights.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(0) if rng is None else rng
    radius = ball_radius(rho, params.p) if radius is None else radius
    if rho == 0 or radius == 0:
        return 0.0
    nt, nx, s = params.trunc_t, params.trunc_x, params.s
    st, sx = min(support, nt), min(support, nx)

    def draw():
        f = random_field(rng, st, sx, s, kernel_free=True).resized(nt, nx)
        r = radius * rng.uniform(0.1, 1.0)
        return f * (r / xs_norm(f, s))

    best = 0.0
    for _ in range(samples):
        v, w = draw(), draw()
        num = xs_norm(apply_A(v, rho, omega, alpha, params) - apply_A(w, rho, omega, alpha, params), s)
        best = max(best, num / xs_norm(v - w, s))
    return best
