"""Truncated bivariate Taylor jets at a fixed base point.

A jet stores the table c[p][q] = (d/dx+)^p (d/dx-)^q f / (p! q!) evaluated
at (x0, conj(x0)), for 0 <= p <= dp, 0 <= q <= dm.  Factorial-normalised
storage makes multiplication a plain truncated convolution.

Cell keys pack both indices into one int: key = (p << 5) | q, so q < 32.
Exact cells are (a, b) integer pairs over a single denominator shared by
the whole jet (`den`); float cells are complex, `den` is None.  Keeping
one denominator per jet keeps convolution sums integer-only; a gcd pass
after each operation restores lowest terms.

Binary operations align to the componentwise-minimum orders: a derivative
leaves the top order unknown, so the honest truncation of any combination
is the shared one.  `OrderMismatch` is raised by the superfield assembly
validators, not here.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import BasePointMismatch, JetOrderExhausted, ZeroBody
from .scalars import GRat, ZERO, ONE, gcd, gcd_many, grat_from_int_pair, mpz

QBITS = 5
QMASK = 31


def pack(p, q):
    return (p << QBITS) | q


def unpack(key):
    return key >> QBITS, key & QMASK


def _same_base(a, b):
    if isinstance(a, complex) or isinstance(b, complex):
        return a == b
    return a == b


class Jet:
    """One truncated Taylor table; immutable by convention."""

    __slots__ = ("base", "dp", "dm", "den", "cells")

    def __init__(self, base, dp, dm, den, cells):
        if dp < 0 or dm < 0 or dm > QMASK or dp > QMASK:
            raise ValueError(f"jet orders out of range: ({dp}, {dm})")
        self.base = base
        self.dp = dp
        self.dm = dm
        self.den = den          # positive int (exact) or None (float)
        self.cells = cells

    # -- helpers ----------------------------------------------------------
    @property
    def exact(self):
        return self.den is not None

    def _check(self, other):
        if self.exact != other.exact:
            raise TypeError("cannot mix exact and float jets")
        if not _same_base(self.base, other.base):
            raise BasePointMismatch(f"{self.base} vs {other.base}")

    def canon(self):
        """Lowest terms: strip zero cells, divide out the common gcd.
        Float cells additionally drop roundoff residue relative to the
        largest coefficient."""
        if not self.exact:
            mx = max((abs(v) for v in self.cells.values()), default=0.0)
            floor = mx * 1e-14
            cells = {k: v for k, v in self.cells.items() if abs(v) > floor}
            return Jet(self.base, self.dp, self.dm, None, cells)
        cells = {k: v for k, v in self.cells.items() if v[0] or v[1]}
        if not cells:
            return Jet(self.base, self.dp, self.dm, ONE, {})
        g = gcd_many(self.den, (c for ab in cells.values() for c in ab))
        if g != 1:
            cells = {k: (a // g, b // g) for k, (a, b) in cells.items()}
            return Jet(self.base, self.dp, self.dm, self.den // g, cells)
        return Jet(self.base, self.dp, self.dm, self.den, cells)

    def truncated(self, dp, dm):
        dp, dm = min(dp, self.dp), min(dm, self.dm)
        cells = {k: v for k, v in self.cells.items()
                 if (k >> QBITS) <= dp and (k & QMASK) <= dm}
        return Jet(self.base, dp, dm, self.den, cells).canon()

    def is_zero(self, tol=0.0):
        if self.exact:
            return not self.cells
        return all(abs(v) <= tol for v in self.cells.values())

    def body(self):
        """Value at the base point, as GRat (exact) or complex (float)."""
        if self.exact:
            a, b = self.cells.get(0, (ZERO, ZERO))
            return grat_from_int_pair(a, b, self.den)
        return self.cells.get(0, 0j)

    def coeff(self, p, q):
        if self.exact:
            a, b = self.cells.get(pack(p, q), (ZERO, ZERO))
            return grat_from_int_pair(a, b, self.den)
        return self.cells.get(pack(p, q), 0j)

    def norm_float(self):
        if not self.cells:
            return 0.0
        if self.exact:
            top = max(max(abs(a), abs(b)) for a, b in self.cells.values())
            return _ratio(top, self.den) * math.sqrt(2)
        return max(abs(v) for v in self.cells.values())

    def max_bits(self):
        if not self.exact or not self.cells:
            return 1
        m = max(max(abs(a), abs(b)) for a, b in self.cells.values())
        return int(m).bit_length()

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        return self._addsub(other, 1)

    def __sub__(self, other):
        return self._addsub(other, -1)

    def _addsub(self, other, sgn):
        self._check(other)
        dp, dm = min(self.dp, other.dp), min(self.dm, other.dm)
        if not self.exact:
            cells = {k: v for k, v in self.cells.items()
                     if (k >> QBITS) <= dp and (k & QMASK) <= dm}
            for k, v in other.cells.items():
                if (k >> QBITS) <= dp and (k & QMASK) <= dm:
                    cells[k] = cells.get(k, 0j) + sgn * v
            return Jet(self.base, dp, dm, None, cells).canon()
        g = gcd(self.den, other.den)
        den = self.den // g * other.den
        fa, fb = other.den // g, self.den // g
        cells = {}
        for k, (a, b) in self.cells.items():
            if (k >> QBITS) <= dp and (k & QMASK) <= dm:
                cells[k] = (a * fa, b * fa)
        for k, (a, b) in other.cells.items():
            if (k >> QBITS) <= dp and (k & QMASK) <= dm:
                ra, rb = cells.get(k, (ZERO, ZERO))
                cells[k] = (ra + sgn * a * fb, rb + sgn * b * fb)
        return Jet(self.base, dp, dm, den, cells).canon()

    def __neg__(self):
        if self.exact:
            cells = {k: (-a, -b) for k, (a, b) in self.cells.items()}
        else:
            cells = {k: -v for k, v in self.cells.items()}
        return Jet(self.base, self.dp, self.dm, self.den, cells)

    def __mul__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            dp, dm = min(self.dp, other.dp), min(self.dm, other.dm)
            if self.exact:
                cells = conv_exact(self.cells, other.cells, dp, dm)
                return Jet(self.base, dp, dm, self.den * other.den, cells).canon()
            cells = conv_float(self.cells, other.cells, dp, dm)
            return Jet(self.base, dp, dm, None, cells).canon()
        return self.scale(other)

    def scale(self, s):
        """Multiply by a plain scalar (GRat / int / Fraction / complex)."""
        if not self.exact:
            c = complex(s.to_complex() if isinstance(s, GRat) else s)
            return Jet(self.base, self.dp, self.dm, None,
                       {k: v * c for k, v in self.cells.items()}).canon()
        if isinstance(s, complex):
            raise TypeError("cannot scale an exact jet by a float scalar")
        if not isinstance(s, GRat):
            s = GRat(s)
        sa, sb, sd = s.as_int_pair()
        cells = {k: (a * sa - b * sb, a * sb + b * sa)
                 for k, (a, b) in self.cells.items()}
        return Jet(self.base, self.dp, self.dm, self.den * sd, cells).canon()

    def derive(self, direction):
        """d/dx+ ('plus') or d/dx- ('minus'); one order is consumed."""
        if direction == "plus":
            if self.dp < 1:
                raise JetOrderExhausted("no x+ orders left")
            cells = {}
            for k, v in self.cells.items():
                p = k >> QBITS
                if p >= 1:
                    cells[k - (1 << QBITS)] = _cellmul_int(v, p, self.exact)
            return Jet(self.base, self.dp - 1, self.dm, self.den, cells).canon()
        if self.dm < 1:
            raise JetOrderExhausted("no x- orders left")
        cells = {}
        for k, v in self.cells.items():
            q = k & QMASK
            if q >= 1:
                cells[k - 1] = _cellmul_int(v, q, self.exact)
        return Jet(self.base, self.dp, self.dm - 1, self.den, cells).canon()

    def conjugate(self):
        """c[p][q] -> conj(c[q][p]); swaps the truncation orders."""
        cells = {}
        for k, v in self.cells.items():
            p, q = unpack(k)
            cells[pack(q, p)] = (v[0], -v[1]) if self.exact else v.conjugate()
        return Jet(self.base, self.dm, self.dp, self.den, cells)

    def reciprocal(self, tol=1e-12):
        """Truncated power-series inverse; body must be invertible."""
        if self.exact:
            table = {k: grat_from_int_pair(a, b, self.den)
                     for k, (a, b) in self.cells.items()}
            b0 = table.get(0)
            if not b0:
                raise ZeroBody("jet body is zero")
            out = _recip_table(table, self.dp, self.dm, b0.reciprocal(), GRat(0))
            return jet_from_grats(self.base, self.dp, self.dm, out)
        b0 = self.cells.get(0, 0j)
        if abs(b0) <= tol:
            raise ZeroBody("jet body below threshold")
        out = _recip_table(dict(self.cells), self.dp, self.dm, 1.0 / b0, 0j)
        rec = Jet(self.base, self.dp, self.dm, None,
                  {k: v for k, v in out.items() if v != 0}).canon()
        # Newton polish r <- r(2 - a r): the plain recurrence loses digits
        # when high-order cells dominate the body
        two = Jet(self.base, self.dp, self.dm, None, {0: 2.0 + 0j})
        for _ in range(2):
            rec = rec * (two - self * rec)
        return rec

    def sqrt(self, tol=1e-12):
        """Truncated square root; exact backend needs a perfect-square body."""
        from .scalars import rational_sqrt
        if self.exact:
            table = {k: grat_from_int_pair(a, b, self.den)
                     for k, (a, b) in self.cells.items()}
            b0 = table.get(0, GRat(0))
            if b0.im or b0.re <= 0:
                raise ZeroBody("sqrt needs a positive real body")
            r0 = rational_sqrt(b0.re)
            if r0 is None:
                raise ZeroBody("body is not a perfect rational square")
            s0 = GRat(r0)
            half = (GRat(2) * s0).reciprocal()
            out = {0: s0}
            for k in _graded_keys(self.dp, self.dm):
                acc = GRat(0)
                p, q = unpack(k)
                for k1, v1 in list(out.items()):
                    p1, q1 = unpack(k1)
                    if p1 <= p and q1 <= q and 0 < k1 < k:
                        k2 = pack(p - p1, q - q1)
                        if 0 < k2 < k and k2 in out:
                            acc = acc + v1 * out[k2]
                out[k] = (table.get(k, GRat(0)) - acc) * half
            return jet_from_grats(self.base, self.dp, self.dm, out)
        b0 = self.cells.get(0, 0j)
        if abs(b0) <= tol:
            raise ZeroBody("sqrt body below threshold")
        import cmath
        s0 = cmath.sqrt(b0)
        half = 1.0 / (2.0 * s0)
        out = {0: s0}
        for k in _graded_keys(self.dp, self.dm):
            acc = 0j
            p, q = unpack(k)
            for k1, v1 in list(out.items()):
                p1, q1 = unpack(k1)
                if p1 <= p and q1 <= q and 0 < k1 < k:
                    k2 = pack(p - p1, q - q1)
                    if 0 < k2 < k and k2 in out:
                        acc += v1 * out[k2]
            out[k] = (self.cells.get(k, 0j) - acc) * half
        return Jet(self.base, self.dp, self.dm, None, out).canon()

    # -- comparison / repr --------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        a, b = self.canon(), other.canon()
        return (_same_base(a.base, b.base) and a.dp == b.dp and a.dm == b.dm
                and a.den == b.den and a.cells == b.cells)

    def __hash__(self):
        raise TypeError("jets are not hashable")

    def __repr__(self):
        kind = "exact" if self.exact else "float"
        return f"Jet({kind}, base={self.base}, orders=({self.dp},{self.dm}), {len(self.cells)} cells)"


def _cellmul_int(v, n, exact):
    if exact:
        return (v[0] * n, v[1] * n)
    return v * n


def _graded_keys(dp, dm):
    keys = [pack(p, q) for p in range(dp + 1) for q in range(dm + 1)]
    keys.sort(key=lambda k: (sum(unpack(k)), k))
    return [k for k in keys if k != 0]


def _recip_table(table, dp, dm, inv0, zero):
    """Solve r * a = 1 cell by cell in graded order.

    For every key k > 0:  r_k = -inv0 * sum_{0 < k2 <= k} r_{k-k2} a_{k2}.
    """
    out = {0: inv0}
    for k in _graded_keys(dp, dm):
        p, q = unpack(k)
        acc = zero
        for k2, a2 in table.items():
            if k2 == 0:
                continue
            p2, q2 = unpack(k2)
            if p2 > p or q2 > q:
                continue
            r1 = out.get(pack(p - p2, q - q2))
            if r1 is not None:
                acc = acc + r1 * a2
        out[k] = -(acc * inv0)
    return out


# -- raw convolution kernels (shared with the Grassmann layer) -------------

def conv_exact(ca, cb, dp, dm):
    """Truncated convolution of integer-pair cell tables."""
    out = {}
    items_b = [(k, v[0], v[1]) for k, v in cb.items()
               if (k >> QBITS) <= dp and (k & QMASK) <= dm]
    for k1, (a1, b1) in ca.items():
        p1, q1 = k1 >> QBITS, k1 & QMASK
        if p1 > dp or q1 > dm:
            continue
        pr, qr = dp - p1, dm - q1
        for k2, a2, b2 in items_b:
            if (k2 >> QBITS) > pr or (k2 & QMASK) > qr:
                continue
            k = k1 + k2
            rr = a1 * a2 - b1 * b2
            ii = a1 * b2 + b1 * a2
            cur = out.get(k)
            if cur is None:
                out[k] = [rr, ii]
            else:
                cur[0] += rr
                cur[1] += ii
    return {k: (v[0], v[1]) for k, v in out.items() if v[0] or v[1]}


def conv_float(ca, cb, dp, dm):
    out = {}
    items_b = [(k, v) for k, v in cb.items()
               if (k >> QBITS) <= dp and (k & QMASK) <= dm]
    for k1, v1 in ca.items():
        p1, q1 = k1 >> QBITS, k1 & QMASK
        if p1 > dp or q1 > dm:
            continue
        pr, qr = dp - p1, dm - q1
        for k2, v2 in items_b:
            if (k2 >> QBITS) > pr or (k2 & QMASK) > qr:
                continue
            k = k1 + k2
            out[k] = out.get(k, 0j) + v1 * v2
    return {k: v for k, v in out.items() if v != 0}


def _ratio(num, den):
    """num/den as float, safe for huge integers."""
    num, den = int(num), int(den)
    shift = max(num.bit_length(), den.bit_length()) - 300
    if shift > 0:
        num >>= shift
        den >>= shift
    if den == 0:
        return float("inf")
    return num / den


# -- constructors -----------------------------------------------------------

def jet_zero(base, dp, dm, exact=True):
    return Jet(base, dp, dm, ONE if exact else None, {})


def jet_from_grats(base, dp, dm, table):
    """Build an exact jet from a {key: GRat} table (shared-den normalised)."""
    table = {k: v for k, v in table.items() if v}
    if not table:
        return jet_zero(base, dp, dm, exact=True)
    den = 1
    for v in table.values():
        for part in (v.re, v.im):
            den = den * part.denominator // math.gcd(den, part.denominator)
    den = mpz(den)
    cells = {}
    for k, v in table.items():
        a = v.re.numerator * int(den // v.re.denominator)
        b = v.im.numerator * int(den // v.im.denominator)
        cells[k] = (mpz(a), mpz(b))
    return Jet(base, dp, dm, den, cells).canon()


def jet_constant(base, dp, dm, value, exact=True):
    if exact:
        if not isinstance(value, GRat):
            value = GRat(value)
        return jet_from_grats(base, dp, dm, {0: value})
    c = complex(value.to_complex() if isinstance(value, GRat) else value)
    cells = {} if c == 0 else {0: c}
    return Jet(base, dp, dm, None, cells)


def jet_coordinate(base, dp, dm, direction, exact=True):
    """The coordinate function x+ (or x-) as a jet at the base point."""
    if direction == "plus":
        key0, key1 = 0, pack(1, 0)
        val = base if exact else complex(base)
        ok = dp >= 1
    else:
        key0, key1 = 0, pack(0, 1)
        val = base.conjugate() if exact else complex(base).conjugate()
        ok = dm >= 1
    if exact:
        table = {key0: val if isinstance(val, GRat) else GRat(val)}
        if ok:
            table[key1] = GRat(1)
        return jet_from_grats(base, dp, dm, table)
    cells = {}
    if val != 0:
        cells[key0] = val
    if ok:
        cells[key1] = 1 + 0j
    return Jet(base, dp, dm, None, cells)


def jet_poly(base, dp, dm, coeffs, direction="plus", exact=True):
    """Jet of a polynomial in x+ (or x-), coefficients lowest degree first.

    Taylor cells follow from the binomial theorem: for f = sum a_m x^m,
    c_p = sum_{m>=p} C(m, p) a_m x0^(m-p).
    """
    if exact:
        coeffs = [c if isinstance(c, GRat) else GRat(c) for c in coeffs]
        x0 = base if direction == "plus" else base.conjugate()
        table = {}
        limit = dp if direction == "plus" else dm
        for p_ord in range(min(limit, len(coeffs) - 1) + 1):
            acc = GRat(0)
            xpow = GRat(1)
            for m in range(p_ord, len(coeffs)):
                acc = acc + GRat(math.comb(m, p_ord)) * coeffs[m] * xpow
                xpow = xpow * x0
            if acc:
                table[pack(p_ord, 0) if direction == "plus" else pack(0, p_ord)] = acc
        return jet_from_grats(base, dp, dm, table)
    x0 = complex(base) if direction == "plus" else complex(base).conjugate()
    cells = {}
    limit = dp if direction == "plus" else dm
    coeffs = [complex(c) for c in coeffs]
    for p_ord in range(min(limit, len(coeffs) - 1) + 1):
        acc = 0j
        xpow = 1 + 0j
        for m in range(p_ord, len(coeffs)):
            acc += math.comb(m, p_ord) * coeffs[m] * xpow
            xpow *= x0
        if acc != 0:
            cells[pack(p_ord, 0) if direction == "plus" else pack(0, p_ord)] = acc
    return Jet(base, dp, dm, None, cells)
