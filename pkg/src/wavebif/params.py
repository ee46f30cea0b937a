"""Problem data for the damped wave equation

    u_tt - u_xx - alpha u_txx + m u = (u_t)^(2p+1),   u(t,0) = u(t,pi) = 0,

and the numerical knobs (truncation, tolerances) of the solver.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .errors import ParameterError

# Symbolic masses. Irrationality of m is what keeps the kernel two-dimensional,
# so the token is kept next to the float value and echoed in outputs.
MASS_TOKENS = {
    "sqrt2": 1.4142135623730950488016887242096980785696718753769,
    "e-2": 0.71828182845904523536028747135266249775724709369995,
    "pi-3": 0.14159265358979323846264338327950288419716939937511,
}


def parse_mass(token):
    """Return ``(value, token)`` for a symbolic name or a decimal string."""
    if isinstance(token, (int, float)):
        return float(token), repr(float(token))
    key = str(token).strip().lower()
    if key in MASS_TOKENS:
        return MASS_TOKENS[key], key
    try:
        return float(key), key
    except ValueError:
        raise ParameterError(f"cannot parse mass {token!r}") from None


def default_window(m):
    """Frequency window ``(W0, W1)`` centred on ``sqrt(1+m)``.

    The half-width in ``omega^2`` is ``min(0.05, (1+m)/100)``.
    """
    delta = min(0.05, (1.0 + m) * 1e-2)
    return math.sqrt(1.0 + m - delta), math.sqrt(1.0 + m + delta)


@dataclass(frozen=True)
class ModelParams:
    """Fixed data of one bifurcation problem.

    ``rho_max`` is the empirical smallness threshold: amplitudes at or
    above it are refused by the solver. ``s`` defaults to ``k0 + 10``. Values outside ``[k0+10, k0+20]`` are
    rejected unless ``allow_any_s`` is set. ``W0``/``W1`` default to
    :func:`default_window`.
    """

    p: int = 1
    m: float = MASS_TOKENS["sqrt2"]
    k0: int = 2
    s: float | None = None
    W0: float | None = None
    W1: float | None = None
    trunc_t: int = 64
    trunc_x: int = 64
    tol_range: float = 1e-10
    tol_bif: float = 1e-8
    max_iter: int = 200
    allow_any_s: bool = False
    enforce_ball: bool = False
    floor_policy: str = "fail"
    rho_max: float = 0.05
    m_token: str = field(default="sqrt2", compare=False)

    def __post_init__(self):
        if self.s is None:
            object.__setattr__(self, "s", float(self.k0 + 10))
        if self.W0 is None or self.W1 is None:
            w0, w1 = default_window(self.m)
            if self.W0 is None:
                object.__setattr__(self, "W0", w0)
            if self.W1 is None:
                object.__setattr__(self, "W1", w1)
        self.validate()

    def validate(self):
        if int(self.p) != self.p or self.p < 1:
            raise ParameterError(f"p must be a positive integer, got {self.p}")
        if not (self.m > 0 and math.isfinite(self.m)):
            raise ParameterError(f"m must be positive, got {self.m}")
        if int(self.k0) != self.k0 or self.k0 < 2:
            raise ParameterError(f"k0 must be an integer >= 2, got {self.k0}")
        if self.s < 0:
            raise ParameterError(f"s must be nonnegative, got {self.s}")
        if not self.allow_any_s and not (self.k0 + 10 <= self.s <= self.k0 + 20):
            raise ParameterError(
                f"s={self.s} outside [k0+10, k0+20] = [{self.k0 + 10}, {self.k0 + 20}];"
                " pass allow_any_s=True to override"
            )
        w1 = math.sqrt(1.0 + self.m)
        if not (0 < self.W0 < w1 < self.W1):
            raise ParameterError(f"need 0 < W0 < sqrt(1+m) < W1, got W0={self.W0}, W1={self.W1}")
        if not (1.0 < self.W0**2 <= self.W1**2 < self.m + 2.0):
            raise ParameterError("need 1 < W0^2 <= W1^2 < m + 2")
        if self.trunc_t < 1 or self.trunc_x < 1:
            raise ParameterError("truncation sizes must be >= 1")
        if self.tol_range <= 0 or self.tol_bif <= 0 or self.max_iter < 1:
            raise ParameterError("tolerances and max_iter must be positive")
        if not (self.rho_max > 0 and math.isfinite(self.rho_max)):
            raise ParameterError(f"rho_max must be positive, got {self.rho_max}")
        if self.floor_policy not in ("fail", "warn"):
            raise ParameterError("floor_policy must be 'fail' or 'warn'")

    @property
    def q(self):
        """Degree of the nonlinearity, ``2p + 1``."""
        return 2 * self.p + 1

    @property
    def omega1(self):
        return math.sqrt(1.0 + self.m)

    def with_(self, **changes):
        return replace(self, **changes)

    @classmethod
    def from_token(cls, m="sqrt2", **kwargs):
        value, token = parse_mass(m)
        return cls(m=value, m_token=token, **kwargs)
