r"""The rescaled wave operator and its diagonal inverse.

On the mode ``e^{int} sin(kx)`` the operator

.. math::

    L_{\omega,\alpha} = \omega^2 \partial_t^2 - \partial_x^2
        - \omega\alpha\,\partial_t\partial_x^2 + m

acts as multiplication by the divisor

.. math::

    \vartheta(n, k) = k^2 + m - \omega^2 n^2 + i\,\omega\alpha n k^2 .

At ``alpha = 0`` and ``omega^2 = 1 + m`` the real part vanishes only on the
kernel modes (+-1, 1) when m is irrational, but it comes arbitrarily close
to zero elsewhere (small divisors). The damping term lifts the modulus to
at least ``omega alpha |n| k^2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import KernelModePresent, ResonantDenominator, SingularDivisor
from .spectral import SpectralField

# Guards literal division only; near resonance is allowed through.
SINGULAR_THRESHOLD = 1e-300

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Divisor:
    n: int
    k: int
    realpart: float
    imagpart: float

    @property
    def value(self):
        return complex(self.realpart, self.imagpart)

    @property
    def modulus_sq(self):
        return self.realpart**2 + self.imagpart**2


def omega_shift(m, omega):
    """``omega^2 - (1+m)``, snapped to 0 when omega is the rounded ``sqrt(1+m)``.

    ``sqrt`` is correctly rounded, so ``omega^2`` then misses ``1+m`` by at
    most a few ulps; treating that as exact makes the critical frequency
    exactly critical.
    """
    shift = omega * omega - (1.0 + m)
    if abs(shift) <= 4 * _EPS * (1.0 + m) and omega == math.sqrt(1.0 + m):
        return 0.0
    return shift


def _real_part(n, k, m, omega):
    # k^2 + m - omega^2 n^2 = (k^2 - n^2) - m (n^2 - 1) - n^2 shift:
    # the integer part is exact and the kernel modes cancel identically
    return (k * k - n * n) - m * (n * n - 1.0) - n * n * omega_shift(m, omega)


def divisor(n, k, params, omega, alpha):
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    re = _real_part(float(n), float(k), params.m, omega)
    im = omega * alpha * n * k * k
    return Divisor(n, k, re, im)


def divisor_array(trunc_t, trunc_x, m, omega, alpha):
    """Divisors on the full truncated grid, shape ``(2*trunc_t + 1, trunc_x)``."""
    n = np.arange(-trunc_t, trunc_t + 1, dtype=float)[:, None]
    k = np.arange(1, trunc_x + 1, dtype=float)[None, :]
    return _real_part(n, k, m, omega) + 1j * (omega * alpha * n * k * k)


def _kernel_mask(shape):
    nt, nx = shape
    mask = np.zeros((2 * nt + 1, nx), dtype=bool)
    if nt >= 1:
        mask[nt + 1, 0] = mask[nt - 1, 0] = True
    return mask


def _check_domain(f):
    mask = _kernel_mask(f.shape)
    if np.any(f.coeffs[mask] != 0):
        raise KernelModePresent("field has amplitude on the kernel modes (+-1, 1)")
    return mask


def apply_L(f, params, omega, alpha):
    th = divisor_array(f.trunc_t, f.trunc_x, params.m, omega, alpha)
    return SpectralField(f.coeffs * th)


def _safe_divisors(f, params, omega, alpha):
    mask = _check_domain(f)
    th = divisor_array(f.trunc_t, f.trunc_x, params.m, omega, alpha)
    th[mask] = 1.0
    live = f.coeffs != 0
    if np.any(np.abs(th[live]) < SINGULAR_THRESHOLD):
        raise SingularDivisor("divisor below 1e-300 on the support of f")
    return th


def apply_L_inverse(f, params, omega, alpha):
    """Divide each coefficient by its divisor; f must vanish on (+-1, 1)."""
    th = _safe_divisors(f, params, omega, alpha)
    return SpectralField(f.coeffs / th)


def d_alpha_L_inverse(f, params, omega, alpha):
    """Derivative in alpha of ``L^{-1} f``: multiplier ``-i omega n k^2 / theta^2``."""
    th = _safe_divisors(f, params, omega, alpha)
    n = np.arange(-f.trunc_t, f.trunc_t + 1, dtype=float)[:, None]
    k = np.arange(1, f.trunc_x + 1, dtype=float)[None, :]
    return SpectralField(f.coeffs * (-1j * omega * n * k * k) / th**2)


def qr_values(n, k, params, omega):
    """The ratios ``Q = n^2 / D^2`` and ``R = k^2 / D^2`` with ``D = k^2 + m - omega^2 n^2``."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k == 1 and abs(n) == 1:
        raise KernelModePresent("Q and R are defined off the kernel modes only")
    den = _real_part(float(n), float(k), params.m, omega)
    if den == 0:
        raise ResonantDenominator(f"k^2 + m - omega^2 n^2 = 0 at ({n}, {k})")
    return n * n / den**2, k * k / den**2


@dataclass
class InverseNormReport:
    """Largest per-mode ratios ``n^2/|theta|^2`` and ``k^2/|theta|^2``.

    ``C_full`` and ``C_band`` are the constants fitted to the shapes
    ``C / rho^{4p}`` and ``C / (K^4 rho^{4p}) + 4``.
    """

    omega: float
    alpha: float
    K: int
    scan_n: int
    max_n_ratio: float
    max_k_ratio: float
    band_max_n_ratio: float
    band_max_k_ratio: float
    argmax_n: tuple
    argmax_k: tuple
    rho: float | None
    n_bound: float
    respects_n_bound: bool
    C_full: float | None
    C_band: float | None
    kernel_adjacent: list

    @property
    def full_max(self):
        return max(self.max_n_ratio, self.max_k_ratio)

    @property
    def band_max(self):
        return max(self.band_max_n_ratio, self.band_max_k_ratio)


def inverse_norm_certificate(params, omega, alpha, K, scanN, rho=None, near=1e-12):
    """Scan ``|n|, k <= scanN`` (kernel modes excluded) for the inverse-norm ratios.

    ``kernel_adjacent`` lists modes whose real divisor part is below ``near``
    in absolute value: accidental resonances at finite precision.
    """
    if scanN < K:
        raise ValueError("scanN must be >= K")
    n = np.arange(-scanN, scanN + 1, dtype=float)[:, None]
    k = np.arange(1, scanN + 1, dtype=float)[None, :]
    re = _real_part(n, k, params.m, omega)
    im = omega * alpha * n * k * k
    mod2 = re * re + im * im
    kernel = (np.abs(n) == 1) & (k == 1)
    with np.errstate(divide="ignore"):
        rn = np.where(kernel, 0.0, n * n / mod2)
        rk = np.where(kernel, 0.0, k * k / mod2)
    rn = np.where(np.isnan(rn), np.inf, rn)
    rk = np.where(np.isnan(rk), np.inf, rk)
    band = np.broadcast_to(k > K, rn.shape)
    i_n = np.unravel_index(np.argmax(rn), rn.shape)
    i_k = np.unravel_index(np.argmax(rk), rk.shape)

    def mode(idx):
        return int(idx[0]) - scanN, int(idx[1]) + 1

    near_idx = np.argwhere((np.abs(re) < near) & ~kernel)
    n_bound = math.inf if alpha == 0 else 1.0 / (omega**2 * alpha**2)
    max_n = float(rn.max())
    max_k = float(rk.max())
    band_n = float(np.where(band, rn, 0.0).max())
    band_k = float(np.where(band, rk, 0.0).max())
    C_full = C_band = None
    if rho is not None and rho > 0:
        scale = rho ** (4 * params.p)
        C_full = max(max_n, max_k) * scale
        C_band = max(max(band_n, band_k) - 4.0, 0.0) * K**4 * scale
    return InverseNormReport(
        omega=omega, alpha=alpha, K=K, scan_n=scanN,
        max_n_ratio=max_n, max_k_ratio=max_k,
        band_max_n_ratio=band_n, band_max_k_ratio=band_k,
        argmax_n=mode(i_n), argmax_k=mode(i_k), rho=rho,
        n_bound=n_bound, respects_n_bound=bool(max_n <= n_bound * (1 + 1e-12)),
        C_full=C_full, C_band=C_band,
        kernel_adjacent=[mode(i) for i in near_idx],
    )


@dataclass
class KernelScan:
    zeros: list
    min_nonzero: float
    argmin: tuple
    near_resonances: list


def kernel_scan(m, scan_n=500, scan_k=500, near=1e-9):
    """Where does ``k^2 + m - (1+m) n^2`` vanish for ``|n| <= scan_n, 1 <= k <= scan_k``?

    Evaluated as ``(k^2 - n^2) - m (n^2 - 1)`` so that the kernel modes give
    an exact floating-point zero.
    """
    n = np.arange(-scan_n, scan_n + 1, dtype=float)[:, None]
    k = np.arange(1, scan_k + 1, dtype=float)[None, :]
    re = np.abs((k * k - n * n) - m * (n * n - 1.0))
    zero_idx = np.argwhere(re == 0.0)
    zeros = [(int(i) - scan_n, int(j) + 1) for i, j in zero_idx]
    masked = np.where(re == 0.0, np.inf, re)
    i = np.unravel_index(np.argmin(masked), masked.shape)
    near_idx = np.argwhere((re < near) & (re > 0.0))
    return KernelScan(
        zeros=zeros,
        min_nonzero=float(masked[i]),
        argmin=(int(i[0]) - scan_n, int(i[1]) + 1),
        near_resonances=[(int(a) - scan_n, int(b) + 1) for a, b in near_idx],
    )
