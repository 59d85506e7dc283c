"""Exact Gaussian-rational scalars and scalar-literal formatting.

The exact backend works over Q(i): numbers a + b*i with a, b rational.
`GRat` is the boundary type (literals, jet bodies, matrix pivots); the
hot loops inside jets and Grassmann elements use raw integer pairs over
a shared denominator instead and only convert to `GRat` at the edges.

Literal format (exact backend): "a/b" or "a/b+c/d*i", lowest terms,
denominator omitted when 1, e.g. "3", "-1/2", "3+1/2*i", "-i".
Float backend literals are plain JSON numbers or [re, im] pairs.
"""

from __future__ import annotations

import math
import re as _re
from fractions import Fraction

try:
    from gmpy2 import mpz, gcd as _gcd  # GMP-backed bigints: much faster >256 bits
except ImportError:  # pragma: no cover
    mpz = int
    _gcd = math.gcd

ZERO = mpz(0)
ONE = mpz(1)


def gcd(a, b):
    return _gcd(a, b)


def gcd_many(seed, values):
    """gcd of `seed` and every entry of `values`, with early exit at 1."""
    g = seed
    for v in values:
        g = _gcd(g, v)
        if g == 1:
            return ONE
    return g


class GRat:
    """Gaussian rational a + b*i with exact Fraction parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, GRat):
            re, im = re.re, re.im + im
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    # -- ring operations -------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return GRat(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return GRat(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return GRat(other.re - self.re, other.im - self.im)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return GRat(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.reciprocal()

    def __neg__(self):
        return GRat(-self.re, -self.im)

    def conjugate(self):
        return GRat(self.re, -self.im)

    def reciprocal(self):
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("reciprocal of zero Gaussian rational")
        return GRat(self.re / n, -self.im / n)

    # -- predicates / conversions ----------------------------------------
    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __abs__(self):
        return math.hypot(float(self.re), float(self.im))

    def to_complex(self):
        return complex(self.re, self.im)

    def as_int_pair(self):
        """(a, b, den) with a/den + (b/den)i == self, den > 0, gcd-free."""
        den = (self.re.denominator * self.im.denominator
               // math.gcd(self.re.denominator, self.im.denominator))
        a = self.re.numerator * (den // self.re.denominator)
        b = self.im.numerator * (den // self.im.denominator)
        return mpz(a), mpz(b), mpz(den)

    def __repr__(self):
        return f"GRat({format_exact(self)!r})"


I_UNIT = GRat(0, 1)


def _coerce(x):
    if isinstance(x, GRat):
        return x
    if isinstance(x, (int, Fraction)) or type(x) is type(ONE):
        return GRat(Fraction(int(x)) if not isinstance(x, Fraction) else x)
    return NotImplemented


def grat_from_int_pair(a, b, den):
    return GRat(Fraction(int(a), int(den)), Fraction(int(b), int(den)))


# -- literals -------------------------------------------------------------

def _fmt_frac(f: Fraction) -> str:
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


def format_exact(x: GRat) -> str:
    """Canonical literal: lowest terms, no spaces."""
    if not x.im:
        return _fmt_frac(x.re)
    im = _fmt_frac(abs(x.im))
    imtxt = "i" if im == "1" else f"{im}*i"
    sign = "-" if x.im < 0 else "+"
    if not x.re:
        return imtxt if sign == "+" else f"-{imtxt}"
    return f"{_fmt_frac(x.re)}{sign}{imtxt}"


_TERM = _re.compile(
    r"""(?P<sign>[+-]?)\s*
        (?:
            (?P<imag>(?:(?P<icoef>\d+(?:/\d+)?)\*)?i)
          | (?P<real>\d+(?:/\d+)?)
        )\s*""",
    _re.VERBOSE,
)


def parse_exact(text: str) -> GRat:
    """Parse "a/b", "a/b+c/d*i", "i", "-i", "2*i", ... into a GRat."""
    s = text.strip()
    if not s:
        raise ValueError("empty scalar literal")
    pos, re_part, im_part = 0, None, None
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"bad scalar literal: {text!r}")
        sign = -1 if m.group("sign") == "-" else 1
        if m.group("imag") is not None:
            if im_part is not None:
                raise ValueError(f"bad scalar literal: {text!r}")
            coef = m.group("icoef")
            im_part = sign * (Fraction(coef) if coef else Fraction(1))
        else:
            if re_part is not None:
                raise ValueError(f"bad scalar literal: {text!r}")
            re_part = sign * Fraction(m.group("real"))
        pos = m.end()
    return GRat(re_part or Fraction(0), im_part or Fraction(0))


def rational_sqrt(f: Fraction):
    """Exact square root of a non-negative rational, or None."""
    if f < 0:
        return None
    num, den = f.numerator, f.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None
