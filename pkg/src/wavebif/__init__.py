"""Time-periodic solutions of a damped nonlinear wave equation near resonance.

``u_tt - u_xx - alpha u_txx + m u = (u_t)^{2p+1}`` on the torus, with u odd
in x. Solutions bifurcate from ``rho cos(omega t) sin(x)``; the package
computes them by a Lyapunov-Schmidt split into a range equation, solved by
Picard iteration, and two scalar bifurcation equations for alpha and omega.
"""
from .bifurcation import (
    BranchPoint,
    evaluate_point,
    leading_alpha,
    solve_point,
    theta_constant,
    trace_branch,
)
from .errors import WavebifError
from .params import ModelParams, parse_mass
from .range_solver import solve_range
from .spectral import SpectralField, kernel_field, make_field, trig_field, xs_norm

__all__ = [
    "BranchPoint",
    "ModelParams",
    "SpectralField",
    "WavebifError",
    "evaluate_point",
    "kernel_field",
    "leading_alpha",
    "make_field",
    "parse_mass",
    "solve_point",
    "solve_range",
    "theta_constant",
    "trace_branch",
    "trig_field",
    "xs_norm",
]
__version__ = "0.1.0"
