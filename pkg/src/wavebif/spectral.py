r"""Truncated Fourier fields on the torus, odd in x.

A :class:`SpectralField` stores the coefficients of

.. math::

    u(t, x) = \sum_{|n| \le N_t} \sum_{1 \le k \le N_x} c_{n,k} e^{int} \sin(kx),
    \qquad \overline{c_{n,k}} = c_{-n,k}.

Real data ``d cos(nt) sin(kx) + e sin(nt) sin(kx)`` (n >= 1) corresponds to
``c_{n,k} = (d - i e)/2`` and ``c_{-n,k} = (d + i e)/2``; a term
``c sin(kx)`` with n = 0 is stored as the real number ``c_{0,k} = c``.

Products of fields that are odd in x are even in x, so they leave this
space. They are returned as a :class:`TorusField`, which stores the full
exponential basis ``e^{i(nt + jx)}``. Odd powers land back in the sine
basis and are returned as :class:`SpectralField`.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import fft, signal

from .errors import AliasingDetected, NonPositiveK, RealityViolation, TruncationOverflow

# Largest FFT grid side accepted by the pseudo-spectral product.
MAX_GRID = 8192

_EPS = np.finfo(float).eps

# Entries below this fraction of a factor's peak are dropped before a direct
# product; far below double resolution of any output coefficient.
SPARSE_CUT = 1e-40

# Largest number of multiply-adds a direct product may take under "auto".
DIRECT_BUDGET = 2e7


def _pad(arr, rows, cols):
    """Centre-pad (or crop) a coefficient array whose rows are n = -N..N."""
    n_old = (arr.shape[0] - 1) // 2
    n_new = (rows - 1) // 2
    out = np.zeros((rows, cols), dtype=complex)
    nn = min(n_old, n_new)
    cc = min(arr.shape[1], cols)
    out[n_new - nn:n_new + nn + 1, :cc] = arr[n_old - nn:n_old + nn + 1, :cc]
    return out


class SpectralField:
    """Immutable truncated element of X^s (real, odd in x).

    ``coeffs[n + trunc_t, k - 1]`` holds ``c_{n,k}``.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=complex)
        if c.ndim != 2 or c.shape[0] % 2 != 1 or c.shape[1] < 1:
            raise ValueError(f"bad coefficient shape {c.shape}")
        c.setflags(write=False)
        self._c = c

    @classmethod
    def zeros(cls, trunc_t, trunc_x):
        return cls(np.zeros((2 * trunc_t + 1, trunc_x), dtype=complex))

    @property
    def coeffs(self):
        return self._c

    @property
    def trunc_t(self):
        return (self._c.shape[0] - 1) // 2

    @property
    def trunc_x(self):
        return self._c.shape[1]

    @property
    def shape(self):
        return self.trunc_t, self.trunc_x

    def n_values(self):
        return np.arange(-self.trunc_t, self.trunc_t + 1)

    def k_values(self):
        return np.arange(1, self.trunc_x + 1)

    def __getitem__(self, mode):
        n, k = mode
        if k < 1:
            raise NonPositiveK(f"k must be >= 1, got {k}")
        if abs(n) > self.trunc_t or k > self.trunc_x:
            return 0j
        return complex(self._c[n + self.trunc_t, k - 1])

    def items(self):
        """Yield ``((n, k), c)`` for every nonzero stored coefficient."""
        rows, cols = np.nonzero(self._c)
        for r, col in zip(rows, cols):
            yield (int(r) - self.trunc_t, int(col) + 1), complex(self._c[r, col])

    def resized(self, trunc_t, trunc_x):
        """Zero-pad or truncate to the given sizes."""
        return SpectralField(_pad(self._c, 2 * trunc_t + 1, trunc_x))

    def _aligned(self, other):
        nt = max(self.trunc_t, other.trunc_t)
        nx = max(self.trunc_x, other.trunc_x)
        return self.resized(nt, nx)._c, other.resized(nt, nx)._c

    def __add__(self, other):
        if not isinstance(other, SpectralField):
            return NotImplemented
        a, b = self._aligned(other)
        return SpectralField(a + b)

    def __sub__(self, other):
        if not isinstance(other, SpectralField):
            return NotImplemented
        a, b = self._aligned(other)
        return SpectralField(a - b)

    def __neg__(self):
        return SpectralField(-self._c)

    def __mul__(self, scalar):
        if isinstance(scalar, (int, float, np.floating, np.integer)):
            return SpectralField(self._c * float(scalar))
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, SpectralField):
            return NotImplemented
        a, b = self._aligned(other)
        return bool(np.array_equal(a, b))

    __hash__ = None

    def allclose(self, other, rtol=1e-12, atol=0.0):
        a, b = self._aligned(other)
        scale = max(np.abs(a).max(initial=0.0), np.abs(b).max(initial=0.0))
        return bool(np.all(np.abs(a - b) <= atol + rtol * scale))

    def l1(self):
        """Sum of |c_{n,k}|; bounds the sup norm of the field."""
        return float(np.abs(self._c).sum())

    def reality_defect(self):
        """Max of |conj(c_{n,k}) - c_{-n,k}|."""
        return float(np.abs(np.conj(self._c) - self._c[::-1]).max(initial=0.0))

    def to_torus(self):
        nt, nx = self.shape
        out = np.zeros((2 * nt + 1, 2 * nx + 1), dtype=complex)
        half = self._c / 2j
        out[:, nx + 1:] = half
        out[:, :nx] = -half[:, ::-1]
        return TorusField(out)

    def __repr__(self):
        return f"SpectralField(trunc_t={self.trunc_t}, trunc_x={self.trunc_x}, nnz={np.count_nonzero(self._c)})"


class TorusField:
    """Real trigonometric polynomial in the full basis ``e^{i(nt + jx)}``.

    ``coeffs[n + Nt, j + Nx]`` holds the coefficient of ``e^{i(nt + jx)}``.
    Used for even-in-x intermediates such as ``sin(x)**2``.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=complex)
        if c.ndim != 2 or c.shape[0] % 2 != 1 or c.shape[1] % 2 != 1:
            raise ValueError(f"bad coefficient shape {c.shape}")
        c.setflags(write=False)
        self._c = c

    @classmethod
    def constant(cls, value=1.0):
        return cls(np.array([[value]], dtype=complex))

    @property
    def coeffs(self):
        return self._c

    @property
    def shape(self):
        return (self._c.shape[0] - 1) // 2, (self._c.shape[1] - 1) // 2

    def __getitem__(self, mode):
        n, j = mode
        nt, nx = self.shape
        if abs(n) > nt or abs(j) > nx:
            return 0j
        return complex(self._c[n + nt, j + nx])

    def even_part_norm(self):
        """Largest coefficient of the part that is even in x."""
        even = self._c + self._c[:, ::-1]
        return float(np.abs(even).max(initial=0.0)) / 2.0

    def is_odd_in_x(self, rtol=1e-13):
        scale = float(np.abs(self._c).max(initial=0.0))
        return self.even_part_norm() <= rtol * scale

    def to_sine(self, trunc_t=None, trunc_x=None):
        """Fold the odd-in-x part back onto the sine basis."""
        nt, nx = self.shape
        trunc_t = nt if trunc_t is None else trunc_t
        trunc_x = max(nx, 1) if trunc_x is None else trunc_x
        pos = self._c[:, nx + 1:]
        neg = self._c[:, :nx][:, ::-1]
        sine = 1j * (pos - neg)
        if sine.shape[1] == 0:
            sine = np.zeros((2 * nt + 1, 1), dtype=complex)
        return SpectralField(_pad(sine, 2 * trunc_t + 1, trunc_x))

    def __repr__(self):
        nt, nx = self.shape
        return f"TorusField(trunc_t={nt}, trunc_x={nx})"


def make_field(entries, trunc_t=None, trunc_x=None):
    """Build a field from ``[((n, k), c), ...]``, filling in conjugate partners.

    >>> f = make_field([((1, 1), 0.5), ((-1, 1), 0.5)])   # cos(t) sin(x)
    """
    entries = [((int(n), int(k)), complex(c)) for (n, k), c in entries]
    for (n, k), _ in entries:
        if k < 1:
            raise NonPositiveK(f"k must be >= 1, got {k} at mode ({n}, {k})")
    nt = max([abs(n) for (n, _), _ in entries], default=0)
    nx = max([k for (_, k), _ in entries], default=1)
    trunc_t = nt if trunc_t is None else trunc_t
    trunc_x = nx if trunc_x is None else trunc_x
    if nt > trunc_t or nx > trunc_x:
        raise TruncationOverflow(f"entries need ({nt}, {nx}) but truncation is ({trunc_t}, {trunc_x})")

    given = {}
    for mode, c in entries:
        given[mode] = given.get(mode, 0j) + c
    coeffs = np.zeros((2 * trunc_t + 1, trunc_x), dtype=complex)
    for (n, k), c in given.items():
        partner = given.get((-n, k))
        if partner is not None:
            tol = 4 * _EPS * max(abs(c), abs(partner), 1e-300)
            if abs(partner - c.conjugate()) > tol:
                raise RealityViolation(f"c({n},{k})={c} and c({-n},{k})={partner} are not conjugate")
        coeffs[n + trunc_t, k - 1] = c
        if partner is None:
            coeffs[-n + trunc_t, k - 1] = c.conjugate()
    return SpectralField(coeffs)


def trig_field(cos=None, sin=None, trunc_t=None, trunc_x=None):
    """Field from real amplitudes.

    ``cos[(n, k)] = d`` adds ``d cos(nt) sin(kx)`` and ``sin[(n, k)] = e`` adds
    ``e sin(nt) sin(kx)``; use n = 0 in ``cos`` for pure ``sin(kx)`` terms.
    """
    entries = []
    for (n, k), d in (cos or {}).items():
        if n == 0:
            entries.append(((0, k), complex(d)))
        else:
            entries += [((n, k), d / 2), ((-n, k), d / 2)]
    for (n, k), e in (sin or {}).items():
        if n == 0:
            continue
        entries += [((n, k), -0.5j * e), ((-n, k), 0.5j * e)]
    # sum duplicates before conjugate completion
    acc = {}
    for mode, c in entries:
        acc[mode] = acc.get(mode, 0j) + c
    return make_field(list(acc.items()), trunc_t, trunc_x)


def kernel_field(rho, trunc_t=1, trunc_x=1):
    """The bifurcating mode ``rho cos(t) sin(x)``."""
    return make_field([((1, 1), rho / 2), ((-1, 1), rho / 2)], trunc_t, trunc_x)


def evaluate(f, t, x):
    """Point values of ``f`` (broadcasts over array ``t``, ``x``)."""
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    n = f.n_values()
    k = f.k_values()
    et = np.exp(1j * np.multiply.outer(t, n))
    sx = np.sin(np.multiply.outer(x, k))
    val = np.einsum("...n,nk,...k->...", et, f.coeffs, sx)
    if np.any(np.abs(np.imag(val)) > 1e-12 * max(f.l1(), 1e-300)):
        raise RealityViolation("field evaluates to a non-real value")
    val = np.real(val)
    return float(val) if val.ndim == 0 else val


def _weights(nt, nx, s):
    """``(n^{2s} + k^{2s}) / M^{2s}`` with ``M = max(nt, nx)``, plus ``log M``."""
    big = max(nt, nx, 1)
    n = np.abs(np.arange(-nt, nt + 1, dtype=float))[:, None] / big
    k = np.arange(1, nx + 1, dtype=float)[None, :] / big
    return n ** (2 * s) + k ** (2 * s), math.log(big)


def xs_norm(f, s):
    """Norm ``sqrt(sum (n^{2s} + k^{2s}) |c_{n,k}|^2)`` of X^s.

    The largest weight is factored out so that s around 12 with 64 modes
    (weights ~1e43) stays finite; ``0**0`` counts as 1 at s = 0.
    """
    if s < 0:
        raise ValueError("s must be >= 0")
    w, logbig = _weights(f.trunc_t, f.trunc_x, s)
    amp = np.abs(f.coeffs)
    peak = amp.max(initial=0.0)
    if peak == 0.0:
        return 0.0
    inner = float(np.sum(w * (amp / peak) ** 2))
    return peak * math.exp(s * logbig) * math.sqrt(inner)


def d_t(f):
    """Time derivative: multiply ``c_{n,k}`` by ``i n``."""
    return SpectralField(f.coeffs * (1j * f.n_values()[:, None]))


def d_x2(f):
    """Second space derivative: multiply ``c_{n,k}`` by ``-k^2``."""
    return SpectralField(f.coeffs * -(f.k_values()[None, :] ** 2))


def _as_torus(f):
    if isinstance(f, SpectralField):
        return f.to_torus()
    if isinstance(f, TorusField):
        return f
    raise TypeError(f"expected a field, got {type(f).__name__}")


def _trim(c, cut=SPARSE_CUT):
    """Smallest centred sub-array holding every entry above ``cut * max|c|``."""
    amp = np.abs(c)
    peak = amp.max(initial=0.0)
    ct, cx = (c.shape[0] - 1) // 2, (c.shape[1] - 1) // 2
    if peak == 0.0:
        return c[ct:ct + 1, cx:cx + 1]
    rows, cols = np.nonzero(amp > cut * peak)
    a = int(np.abs(rows - ct).max())
    b = int(np.abs(cols - cx).max())
    return c[ct - a:ct + a + 1, cx - b:cx + b + 1]


def _convolve(a, b, method="auto"):
    """Full linear convolution of two centred torus coefficient arrays.

    ``"direct"`` sums the products mode by mode after dropping entries below
    ``SPARSE_CUT`` times each factor's peak. Every output coefficient is then
    accurate relative to its own size, which matters for the high-order
    X^s weights: an FFT spreads rounding of size ``eps * max|c|`` over all
    modes. ``"auto"`` uses the direct sum when it costs at most
    ``DIRECT_BUDGET`` multiplications and the FFT otherwise.
    """
    if method not in ("auto", "direct", "fft"):
        raise ValueError(f"unknown method {method!r}")
    if method != "fft":
        ta, tb = _trim(a), _trim(b)
        if method == "direct" or ta.size * tb.size <= DIRECT_BUDGET:
            small = signal.convolve2d(ta, tb, mode="full")
            rows = a.shape[0] + b.shape[0] - 1
            cols = a.shape[1] + b.shape[1] - 1
            return _pad_torus(small, (rows - 1) // 2, (cols - 1) // 2)
    return signal.fftconvolve(a, b, mode="full")


def multiply(f, g, trunc_t=None, trunc_x=None, method="auto"):
    """Product of two fields by linear convolution of coefficients.

    Returns a :class:`SpectralField` when the product is odd in x and a
    :class:`TorusField` otherwise. Truncation, if requested, applies to the
    output only; the convolution itself is complete.
    """
    a = _as_torus(f)
    b = _as_torus(g)
    conv = _convolve(a.coeffs, b.coeffs, method)
    if not np.all(np.isfinite(conv)):
        raise TruncationOverflow("non-finite product coefficients")
    prod = TorusField(conv)
    if trunc_t is not None or trunc_x is not None:
        nt, nx = prod.shape
        nt = nt if trunc_t is None else trunc_t
        nx = nx if trunc_x is None else trunc_x
        prod = TorusField(_pad_torus(prod.coeffs, nt, nx))
    if prod.is_odd_in_x():
        return prod.to_sine(trunc_t=trunc_t, trunc_x=trunc_x)
    return prod


def torus_power(f, q, trunc_t, trunc_x, method="auto"):
    """``f**q`` as a :class:`TorusField` cropped to ``(trunc_t, trunc_x)``.

    Intermediate products are cropped to the bandwidth that can still reach
    the output, so nothing inside the output window is lost.
    """
    if q < 0:
        raise ValueError("q must be >= 0")
    if q == 0:
        return TorusField.constant(1.0)
    base = _as_torus(f).coeffs
    bt, bx = (base.shape[0] - 1) // 2, (base.shape[1] - 1) // 2
    acc = base
    for j in range(2, q + 1):
        acc = _convolve(acc, base, method)
        # later factors can move a mode by at most (q - j) * bandwidth
        acc = _pad_torus(acc, min((acc.shape[0] - 1) // 2, trunc_t + (q - j) * bt),
                         min((acc.shape[1] - 1) // 2, trunc_x + (q - j) * bx))
    if not np.all(np.isfinite(acc)):
        raise TruncationOverflow("non-finite power coefficients")
    return TorusField(_pad_torus(acc, trunc_t, trunc_x))


def _pad_torus(c, nt, nx):
    ot, ox = (c.shape[0] - 1) // 2, (c.shape[1] - 1) // 2
    out = np.zeros((2 * nt + 1, 2 * nx + 1), dtype=complex)
    tt, xx = min(ot, nt), min(ox, nx)
    out[nt - tt:nt + tt + 1, nx - xx:nx + xx + 1] = c[ot - tt:ot + tt + 1, ox - xx:ox + xx + 1]
    return out


def grid_shape(nt_in, nx_in, q, nt_out, nx_out):
    """Alias-free FFT grid for a q-fold product read back up to (nt_out, nx_out).

    A product of q factors of bandwidth N reaches mode qN; its alias at
    ``j - M`` stays outside ``|j| <= N_out`` once ``M > qN + N_out``.
    """
    mt = fft.next_fast_len(q * nt_in + nt_out + 1)
    mx = fft.next_fast_len(q * nx_in + nx_out + 1)
    if max(mt, mx) > MAX_GRID:
        raise TruncationOverflow(f"grid {mt}x{mx} exceeds MAX_GRID={MAX_GRID}")
    return mt, mx


def to_grid(f, mt, mx):
    """Sample a sine field at ``t_a = 2 pi a / mt``, ``x_b = 2 pi b / mx``."""
    nt, nx = f.shape
    if mt < 2 * nt + 1 or mx < 2 * nx + 1:
        raise TruncationOverflow(f"grid {mt}x{mx} too small for field {nt}x{nx}")
    spec = np.zeros((mt, mx), dtype=complex)
    rows = f.n_values() % mt
    half = f.coeffs / 2j
    spec[rows, 1:nx + 1] = half
    spec[rows, mx - nx:] = -half[:, ::-1]
    return fft.ifft2(spec, norm="forward").real


def from_grid(values, trunc_t, trunc_x, check_scale=None):
    """Sine coefficients of grid samples; returns ``(field, cosine_residual)``.

    ``cosine_residual`` is the largest coefficient of the even-in-x part,
    which vanishes for data odd in x up to rounding.
    """
    mt, mx = values.shape
    spec = fft.fft2(values, norm="forward")
    n = np.arange(-trunc_t, trunc_t + 1) % mt
    k = np.arange(1, trunc_x + 1)
    pos = spec[np.ix_(n, k)]
    neg = spec[np.ix_(n, (-k) % mx)]
    even = np.abs(pos + neg).max(initial=0.0) / 2
    even = max(even, float(np.abs(spec[:, 0]).max(initial=0.0)))
    return SpectralField(1j * (pos - neg)), even


def odd_power(f, q, trunc_t=None, trunc_x=None, method="auto"):
    """``f**q`` for odd q, read back up to ``(trunc_t, trunc_x)``.

    ``method="fft"`` evaluates pseudo-spectrally on an alias-free padded
    grid and raises :class:`AliasingDetected` if the result has an
    even-in-x component above ``1e-12 * l1(f)**q``. ``"direct"`` and
    ``"auto"`` use :func:`torus_power` (see :func:`_convolve`).
    """
    if q < 1 or q % 2 == 0:
        raise ValueError(f"q must be a positive odd integer, got {q}")
    nt_out = f.trunc_t if trunc_t is None else trunc_t
    nx_out = f.trunc_x if trunc_x is None else trunc_x
    if q == 1:
        return f.resized(nt_out, nx_out)
    if method != "fft":
        return torus_power(f, q, nt_out, nx_out, method).to_sine(nt_out, nx_out)
    mt, mx = grid_shape(f.trunc_t, f.trunc_x, q, nt_out, nx_out)
    vals = to_grid(f, mt, mx)
    out, even = from_grid(vals**q, nt_out, nx_out)
    if even > 1e-12 * f.l1() ** q:
        raise AliasingDetected(f"even-in-x residual {even:.3e} in odd power")
    return out


def project_kernel(f):
    """Keep only the modes (+-1, 1) spanning ``ker L`` at criticality."""
    c = np.zeros_like(f.coeffs)
    if f.trunc_t >= 1:
        nt = f.trunc_t
        c[nt + 1, 0] = f.coeffs[nt + 1, 0]
        c[nt - 1, 0] = f.coeffs[nt - 1, 0]
    return SpectralField(c)


def project_V(f):
    """Zero the kernel modes (+-1, 1)."""
    c = np.array(f.coeffs)
    if f.trunc_t >= 1:
        nt = f.trunc_t
        c[nt + 1, 0] = 0
        c[nt - 1, 0] = 0
    return SpectralField(c)


def project_band(f, K, side):
    """Keep modes with ``k > K`` (``side="above"``) or ``k <= K`` (``"below"``)."""
    if K < 1:
        raise ValueError("K must be >= 1")
    c = np.array(f.coeffs)
    if side == "above":
        c[:, :min(K, f.trunc_x)] = 0
    elif side == "below":
        c[:, K:] = 0
    else:
        raise ValueError(f"side must be 'above' or 'below', got {side!r}")
    return SpectralField(c)


def l2_inner(f, g):
    """``integral over T^2 of f g`` computed from coefficients."""
    a, b = f._aligned(g)
    # int e^{int} e^{-int} = 2 pi, int sin^2 = pi, and conj(c_n) = c_{-n}
    return float(np.real(np.sum(a * np.conj(b)))) * 2 * math.pi**2


def random_field(rng, trunc_t, trunc_x, s=0.0, kernel_free=False):
    """Random real field whose X^s norm is spread evenly over all modes.

    Each coefficient is Gaussian scaled by ``(1 + n^{2s} + k^{2s})^{-1/2}``.
    """
    n = np.arange(-trunc_t, trunc_t + 1, dtype=float)[:, None]
    k = np.arange(1, trunc_x + 1, dtype=float)[None, :]
    scale = 1.0 / np.sqrt(1.0 + np.abs(n) ** (2 * s) + k ** (2 * s))
    z = rng.standard_normal((2 * trunc_t + 1, trunc_x)) + 1j * rng.standard_normal((2 * trunc_t + 1, trunc_x))
    c = z * scale
    # impose conj(c_n) = c_{-n}
    c = (c + np.conj(c[::-1])) / 2
    out = SpectralField(c)
    return project_V(out) if kernel_free else out
