"""Exact trigonometric polynomials with Gaussian-rational coefficients.

Binomial expansions of powers of sin and cos only produce coefficients of
the form integer / 2^j, so identities like "this integral is zero" can be
checked with ``==`` instead of a tolerance.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb

_ZERO = (Fraction(0), Fraction(0))


def _cmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _cadd(a, b):
    return (a[0] + b[0], a[1] + b[1])


class ExactTrig:
    """Sparse polynomial ``sum c[(n, j)] e^{i(n t + j x)}`` with exact coefficients.

    Coefficients are pairs ``(re, im)`` of :class:`fractions.Fraction`.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        for mode, c in (terms or {}).items():
            c = (Fraction(c[0]), Fraction(c[1]))
            if c != _ZERO:
                self.terms[mode] = c

    @classmethod
    def one(cls):
        return cls({(0, 0): (1, 0)})

    @classmethod
    def sin_t(cls, n=1):
        # sin(nt) = (e^{int} - e^{-int}) / (2i) = -i/2 e^{int} + i/2 e^{-int}
        h = Fraction(1, 2)
        return cls({(n, 0): (0, -h), (-n, 0): (0, h)})

    @classmethod
    def cos_t(cls, n=1):
        h = Fraction(1, 2)
        return cls({(n, 0): (h, 0), (-n, 0): (h, 0)})

    @classmethod
    def sin_x(cls, k=1):
        h = Fraction(1, 2)
        return cls({(0, k): (0, -h), (0, -k): (0, h)})

    @classmethod
    def cos_x(cls, k=1):
        h = Fraction(1, 2)
        return cls({(0, k): (h, 0), (0, -k): (h, 0)})

    def __mul__(self, other):
        if isinstance(other, ExactTrig):
            out = {}
            for (n1, j1), a in self.terms.items():
                for (n2, j2), b in other.terms.items():
                    key = (n1 + n2, j1 + j2)
                    out[key] = _cadd(out.get(key, _ZERO), _cmul(a, b))
            return ExactTrig(out)
        r = Fraction(other)
        return ExactTrig({m: (c[0] * r, c[1] * r) for m, c in self.terms.items()})

    __rmul__ = __mul__

    def __add__(self, other):
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = _cadd(out.get(m, _ZERO), c)
        return ExactTrig(out)

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __pow__(self, q):
        out = ExactTrig.one()
        for _ in range(q):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, ExactTrig) and self.terms == other.terms

    def is_zero(self):
        return not self.terms

    def mean(self):
        """Average over the torus: the ``e^0`` coefficient (real part, imag)."""
        return self.terms.get((0, 0), _ZERO)

    def sine_coefficient(self, n, k):
        """Coefficient ``c_{n,k}`` of ``e^{int} sin(kx)`` in the odd-in-x part."""
        # e^{ikx} = cos + i sin, so the sin(kx) coefficient is i (C_k - C_{-k})
        a = self.terms.get((n, k), _ZERO)
        b = self.terms.get((n, -k), _ZERO)
        d = (a[0] - b[0], a[1] - b[1])
        return (-d[1], d[0])

    def even_in_x_part(self):
        out = {}
        for (n, j), c in self.terms.items():
            partner = self.terms.get((n, -j), _ZERO)
            s = (c[0] + partner[0], c[1] + partner[1])
            if s != _ZERO:
                out[(n, j)] = (s[0] / 2, s[1] / 2)
        return ExactTrig(out)

    def sine_modes(self, kernel_free=False, k_above=None):
        """Dict ``(n, k) -> c_{n,k}`` of nonzero sine-basis coefficients."""
        out = {}
        for (n, j) in self.terms:
            if j < 1:
                continue
            if kernel_free and j == 1 and abs(n) == 1:
                continue
            if k_above is not None and j <= k_above:
                continue
            c = self.sine_coefficient(n, j)
            if c != _ZERO:
                out[(n, j)] = c
        return out

    def __repr__(self):
        return f"ExactTrig({len(self.terms)} terms)"


def sin_power_sin_integral(p, k):
    """``(1/pi) * integral_0^{2pi} sin(x)^(2p+1) sin(kx) dx`` as an exact Fraction.

    The integral itself is this rational number times pi.
    """
    prod = ExactTrig.sin_x(1) ** (2 * p + 1) * ExactTrig.sin_x(k)
    re, im = prod.mean()
    if im != 0:
        raise ArithmeticError("imaginary mean for a real integrand")
    return 2 * re


def sin_power_integral_closed_form(p):
    """``integral_0^{2pi} sin^(2p+2)`` divided by pi, exactly."""
    return Fraction(comb(2 * p + 2, p + 1), 2 ** (2 * p + 1))
