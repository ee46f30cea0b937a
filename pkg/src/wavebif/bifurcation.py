r"""Bifurcation equations on the two-dimensional kernel and branch tracing.

Projecting the rescaled equation on ``sin t sin x`` and ``cos t sin x`` and
writing ``(u_t)^{2p+1} = -rho^{2p+1} sin^{2p+1}t sin^{2p+1}x + F`` gives

.. math::

    \alpha = \frac{\omega^{2p}}{\pi^2}\Big(\theta\rho^{2p}
        - \frac{1}{\rho}\langle F, \sin t\sin x\rangle\Big), \qquad
    m + 1 - \omega^2 = \frac{\omega^{2p+1}}{\pi^2\rho}\langle F, \cos t\sin x\rangle,

with ``theta = int sin^{2p+2}(t) sin^{2p+2}(x)`` over the torus and
``<f, g>`` the unnormalised L2 pairing. The factor ``1/pi^2`` is
``1 / ||sin t sin x||^2``: the kernel modes are not unit vectors for this
pairing, so it is needed to read off their coefficients.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .errors import BracketLost, ContractionFailure, DomainViolation, MaxIterExceeded, WavebifError
from .range_solver import solve_range
from .spectral import (
    SpectralField,
    TorusField,
    _convolve,
    _pad_torus,
    d_t,
    kernel_field,
    torus_power,
    xs_norm,
)

log = logging.getLogger(__name__)

# ||sin t sin x||^2 over the torus
KERNEL_NORM_SQ = math.pi**2

MAX_OUTER = 50


def theta_constant(p):
    """``(binom(2p+1, p) pi / 2^{2p})^2``."""
    if p < 1:
        raise ValueError("p must be >= 1")
    return (comb(2 * p + 1, p) * math.pi / 4**p) ** 2


def theta_quadrature(p, points=None):
    """Trapezoid rule on a uniform torus grid (exact for this trig polynomial)."""
    points = points or 4 * p + 8
    t = 2 * math.pi * np.arange(points) / points
    s = np.sin(t) ** (2 * p + 2)
    w = (2 * math.pi / points) ** 2
    return float(w * np.sum(np.multiply.outer(s, s)))


def leading_alpha(rho, omega, p):
    """Leading-order damping ``omega^{2p} theta rho^{2p} / pi^2``."""
    return omega ** (2 * p) * theta_constant(p) * rho ** (2 * p) / KERNEL_NORM_SQ


def alpha_floor(rho, params):
    """Smallest admissible damping ``W0^{2p} theta rho^{2p} / (4 pi^2)``."""
    return params.W0 ** (2 * params.p) * theta_constant(params.p) * rho ** (2 * params.p) / (4 * KERNEL_NORM_SQ)


def compute_F(rho, v, params):
    """``sum_{j=1}^{2p+1} binom(2p+1, j) (-rho sin t sin x)^{2p+1-j} (v_t)^j``.

    Equals ``(u_t)^{2p+1} + rho^{2p+1} sin^{2p+1}t sin^{2p+1}x`` but is formed
    term by term, so no cancellation against the O(rho^{2p+1}) part occurs.
    """
    q = params.q
    nt, nx = params.trunc_t, params.trunc_x
    a = d_t(kernel_field(rho))
    b = d_t(v.resized(nt, nx))
    total = np.zeros((2 * nt + 1, 2 * nx + 1), dtype=complex)
    for j in range(1, q + 1):
        # a^(q-j) has bandwidth q-j, so b^j is needed that far past the window
        bj = torus_power(b, j, nt + q - j, nx + q - j)
        aj = torus_power(a, q - j, q - j, q - j)
        total += comb(q, j) * _pad_torus(_convolve(aj.coeffs, bj.coeffs), nt, nx)
    return TorusField(total).to_sine(nt, nx)


def kernel_pairings(g):
    """``(<g, sin t sin x>, <g, cos t sin x>)`` over the torus, from the (+-1, 1) coefficients."""
    cp, cm = g[(1, 1)], g[(-1, 1)]
    d = (cp + cm).real
    e = (cm - cp).imag
    return KERNEL_NORM_SQ * e, KERNEL_NORM_SQ * d


@dataclass
class BranchPoint:
    """One solved point. Residuals are relative to their natural scales:
    ``resid_be1`` to rho^{2p}, ``resid_be2`` and ``resid_range`` to
    rho^{2p+1}, ``resid_pde`` to rho."""

    rho: float
    alpha: float
    omega: float
    v_norm: float
    resid_be1: float
    resid_be2: float
    resid_range: float
    resid_pde: float
    iterations_outer: int
    omega_sq_shift: float = 0.0
    range_iterations: int = 0
    contraction_factor: float = 0.0
    in_ball: bool = True
    status: str = "converged"
    g_roots: list = field(default_factory=list)
    v: SpectralField | None = field(default=None, repr=False)

    @property
    def converged(self):
        return self.status == "converged"

    def alpha_ratio(self, p):
        """``alpha / (omega^{2p} theta rho^{2p})``; tends to ``1/pi^2`` as rho -> 0."""
        return self.alpha / (self.omega ** (2 * p) * theta_constant(p) * self.rho ** (2 * p))

    def alpha_ratio_normalized(self, p):
        """alpha over its leading-order value :func:`leading_alpha`; tends to 1."""
        return self.alpha / leading_alpha(self.rho, self.omega, p)


def _check_floor(alpha, rho, params):
    floor = alpha_floor(rho, params)
    if alpha < floor:
        msg = f"alpha={alpha:.6e} below the admissible floor {floor:.6e} at rho={rho:g}"
        if params.floor_policy == "fail":
            raise DomainViolation(msg)
        log.warning(msg)


def _b_value(rho, omega, F, p):
    a_sin, _ = kernel_pairings(F)
    return omega ** (2 * p) * (theta_constant(p) * rho ** (2 * p) - a_sin / rho) / KERNEL_NORM_SQ


def _g_offset(rho, xi, F, p):
    """``G(xi) - (m+1)``, kept separate to avoid cancellation against m+1."""
    _, a_cos = kernel_pairings(F)
    return -xi ** ((2 * p + 1) / 2) * a_cos / (KERNEL_NORM_SQ * rho)


def eval_B(alpha, rho, omega, params, v0=None, v=None, full=False):
    """Right side of the damping equation with ``v = v(alpha)`` from the range solve.

    Pass ``v`` to skip the range solve (``v`` = zero gives the leading term).
    With ``full=True`` returns ``(B, range_report)``.
    """
    _check_floor(alpha, rho, params)
    report = None
    if v is None:
        report = solve_range(rho, omega, alpha, params, v0=v0)
        v = report.v
    val = _b_value(rho, omega, compute_F(rho, v, params), params.p)
    return (val, report) if full else val


def solve_alpha(rho, omega, params, alpha0=None, v0=None):
    """Fixed point of :func:`eval_B` at fixed omega by Picard iteration.

    Returns ``(alpha, range_report, iterations)``.
    """
    scale = rho ** (2 * params.p)
    alpha = leading_alpha(rho, omega, params.p) if alpha0 is None else alpha0
    v = v0
    for it in range(1, params.max_iter + 1):
        new, rep = eval_B(alpha, rho, omega, params, v0=v, full=True)
        v = rep.v
        if abs(new - alpha) <= params.tol_bif * scale:
            return new, rep, it
        alpha = new
    raise MaxIterExceeded(f"alpha iteration did not converge (rho={rho:g})")


def eval_G(xi, rho, params, alpha_solver=None, alpha0=None, v0=None, full=False):
    """``m + 1 - xi^{(2p+1)/2} <F, cos t sin x> / (pi^2 rho)`` at ``omega = sqrt(xi)``.

    ``alpha_solver(omega)`` must return ``(alpha, range_report)``; the default
    resolves alpha with :func:`solve_alpha`. With ``full=True`` returns
    ``(offset, alpha, range_report)`` where ``offset = G(xi) - (m+1)``.
    """
    lo, hi = params.W0**2, params.W1**2
    slack = 4 * np.finfo(float).eps * hi  # window ends reached through delta = xi - (1+m)
    if not (lo - slack <= xi <= hi + slack):
        raise DomainViolation(f"xi={xi} outside [W0^2, W1^2] = [{lo}, {hi}]")
    omega = math.sqrt(xi)
    if alpha_solver is None:
        alpha, rep, _ = solve_alpha(rho, omega, params, alpha0=alpha0, v0=v0)
    else:
        alpha, rep = alpha_solver(omega)
    off = _g_offset(rho, xi, compute_F(rho, rep.v, params), params.p)
    if full:
        return off, alpha, rep
    return params.m + 1.0 + off


def _bisect_G(rho, params, samples=9):
    """Sign changes of ``G(xi) - xi`` on the window, refined by bisection.

    Returns every root found and the one closest to ``m + 1``.
    """
    base = 1.0 + params.m
    lo, hi = params.W0**2 - base, params.W1**2 - base

    def h(delta):
        off, _, _ = eval_G(base + delta, rho, params, full=True)
        return off - delta

    grid = np.linspace(lo, hi, samples)
    vals = [h(d) for d in grid]
    roots = []
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa == 0:
            roots.append(a)
        elif fa * fb < 0:
            for _ in range(200):
                mid = 0.5 * (a + b)
                fm = h(mid)
                if fm == 0 or b - a < 1e-15 * base:
                    break
                if fa * fm < 0:
                    b, fb = mid, fm
                else:
                    a, fa = mid, fm
            roots.append(0.5 * (a + b))
    if vals[-1] == 0:
        roots.append(grid[-1])
    if not roots:
        raise BracketLost(f"G(xi) - xi has no sign change on [W0^2, W1^2] (rho={rho:g})")
    return min(roots, key=abs), roots


def solve_point(rho, params, alpha0=None, delta0=None, v0=None, with_pde=True):
    """Solve the coupled range and bifurcation equations at amplitude rho.

    Gauss-Seidel outer loop: resolve alpha at the current omega, then update
    ``delta = omega^2 - (1+m)`` by one Picard step of G. If that step leaves
    the window or grows, fall back to bisection on ``[W0^2, W1^2]``.
    """
    if not (rho > 0 and math.isfinite(rho)):
        raise DomainViolation(f"rho must be positive, got {rho}")
    if rho >= params.rho_max:
        raise ContractionFailure(
            f"rho={rho:g} is at or above the smallness threshold rho_max={params.rho_max:g}")
    p = params.p
    base = 1.0 + params.m
    lo, hi = params.W0**2 - base, params.W1**2 - base
    delta = 0.0 if delta0 is None else delta0
    alpha, v = alpha0, v0
    tol1 = params.tol_bif * rho ** (2 * p)
    tol2 = params.tol_bif * rho ** (2 * p + 1)
    roots = []
    last_move = math.inf
    for outer in range(1, MAX_OUTER + 1):
        omega = math.sqrt(base + delta)
        alpha, rep, _ = solve_alpha(rho, omega, params, alpha0=alpha, v0=v)
        v = rep.v
        F = compute_F(rho, v, params)
        new_delta = _g_offset(rho, base + delta, F, p)
        move = abs(new_delta - delta)
        be1 = abs(alpha - _b_value(rho, omega, F, p))
        if move <= tol2 and be1 <= tol1:
            delta = new_delta if lo <= new_delta <= hi else delta
            break
        if not (lo <= new_delta <= hi) or move > last_move:
            delta, roots = _bisect_G(rho, params)
        else:
            delta = new_delta
        last_move = move
    else:
        raise MaxIterExceeded(f"outer bifurcation loop did not converge (rho={rho:g})")

    return evaluate_point(rho, alpha, delta, params, iterations_outer=outer,
                          g_roots=roots, with_pde=with_pde)


def evaluate_point(rho, alpha, delta, params, iterations_outer=0, g_roots=(), with_pde=True):
    """Branch point at given ``(alpha, delta = omega^2 - (1+m))``.

    Solves the range equation from ``v = 0`` and measures every residual.
    Deterministic in its inputs, which is what makes resumed runs
    reproduce stored points exactly.
    """
    from .verification import pde_residual

    p = params.p
    base = 1.0 + params.m
    omega = math.sqrt(base + delta)
    rep = solve_range(rho, omega, alpha, params)
    F = compute_F(rho, rep.v, params)
    resid_be1 = abs(alpha - _b_value(rho, omega, F, p)) / rho ** (2 * p)
    resid_be2 = abs(delta - _g_offset(rho, base + delta, F, p)) / rho ** (2 * p + 1)
    _check_floor(alpha, rho, params)
    pt = BranchPoint(
        rho=rho, alpha=alpha, omega=omega, v_norm=xs_norm(rep.v, params.s),
        resid_be1=resid_be1, resid_be2=resid_be2,
        resid_range=rep.residual / rho ** (2 * p + 1),
        resid_pde=float("nan"), iterations_outer=iterations_outer,
        omega_sq_shift=delta, range_iterations=rep.iterations,
        contraction_factor=rep.contraction_factor, in_ball=rep.in_ball,
        g_roots=list(g_roots), v=rep.v,
    )
    if with_pde:
        u = kernel_field(rho, params.trunc_t, params.trunc_x) + rep.v
        pt.resid_pde = pde_residual(u, rho, omega, alpha, params)
    return pt


def _failed_point(rho, exc):
    nan = float("nan")
    return BranchPoint(rho, nan, nan, nan, nan, nan, nan, nan, 0,
                       status=f"failed: {type(exc).__name__}: {exc}")


def trace_branch(rho_grid, params, warm_start=True):
    """Solve every amplitude in ``rho_grid``; failures are recorded, not raised.

    With ``warm_start`` each solve starts from the previous converged point,
    rescaled by the leading-order powers of rho. A :class:`ContractionFailure`
    lowers the working threshold to that amplitude: later points at or above
    it are marked failed without solving.
    """
    points = []
    prev = None
    threshold = params.rho_max
    for rho in rho_grid:
        kwargs = {}
        if warm_start and prev is not None:
            r = rho / prev.rho
            kwargs = dict(alpha0=prev.alpha * r ** (2 * params.p),
                          delta0=prev.omega_sq_shift * r ** (4 * params.p),
                          v0=prev.v * r ** params.q)
        try:
            if rho >= threshold:
                raise ContractionFailure(
                    f"rho={rho:g} is at or above the smallness threshold rho_max={threshold:g}")
            pt = solve_point(rho, params, **kwargs)
        except WavebifError as exc:
            log.info("branch point rho=%g failed: %s", rho, exc)
            if isinstance(exc, ContractionFailure):
                threshold = min(threshold, rho)
            pt = _failed_point(rho, exc)
        else:
            prev = pt
        points.append(pt)
    return points
