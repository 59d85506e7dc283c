"""Finite Grassmann algebra with jet-valued coefficients.

Generator layout (G = 2K + 2 generators, monomials are bitmasks of width G):

    index 0      : theta+          index 1      : theta-
    index 2a + 2 : eta_a           index 2a + 3 : eta-bar_a   (a = 0..K-1)

Conjugation is the fixed-point-free involution 0 <-> 1, 2a+2 <-> 2a+3,
extended antilinearly with product reversal: (g_{i1}..g_{ik})^dag =
g_{ik}^dag .. g_{i1}^dag re-sorted to ascending order with the sign the
swaps produce.

A `GrassmannElement` is simultaneously the scalar superfield type: it maps
monomial bitmasks to jet cell tables, all sharing one base point, one pair
of truncation orders and (exact backend) one denominator.  Plain Grassmann
numbers are the special case of jet orders (0, 0).

Multiplication has one fused kernel: monomials with intersecting masks are
dropped immediately, the reordering sign is memoised per mask pair, and the
jet convolution accumulates into mutable integer pairs so the whole product
costs a single gcd pass at the end.
"""

from __future__ import annotations

from .errors import (AlgebraMismatch, BasePointMismatch, IndexOutOfRange,
                     ZeroBody)
from .jets import Jet, QBITS, QMASK, _ratio
from .scalars import GRat, ONE, ZERO, gcd, gcd_many

THETA_P = 0
THETA_M = 1

EVEN = "even"
ODD = "odd"
MIXED = "mixed"

# float-backend canon drops cells below this fraction of the element's
# largest coefficient: they carry no information at double precision
FLOAT_NOISE = 1e-14


def eta_index(a):
    return 2 * a + 2


def eta_bar_index(a):
    return 2 * a + 3


class AlgebraContext:
    """Shared, read-only description of the algebra: K conjugate pairs
    plus the two thetas, sign caches, and the float zero threshold."""

    def __init__(self, pairs=3, tol=1e-12):
        if pairs < 0:
            raise ValueError("pair count must be >= 0")
        if pairs > 7:
            raise ValueError("at most 7 pairs (16 generators) supported")
        self.pairs = pairs
        self.gens = 2 * pairs + 2
        self.tol = tol
        self._sign = {}
        self._conj = {}
        self._names = self._make_names()

    def _make_names(self):
        names = ["th+", "th-"]
        for a in range(self.pairs):
            names += [f"eta{a}", f"etab{a}"]
        return names

    def involution(self, index):
        if index >= self.gens:
            raise IndexOutOfRange(f"generator {index} outside 0..{self.gens - 1}")
        return index ^ 1

    def monomial_name(self, mask):
        if mask == 0:
            return "1"
        return "*".join(self._names[i] for i in _bits(mask))

    def mul_sign(self, m1, m2):
        """Sign of e_{m1} e_{m2} relative to the ascending product, for
        disjoint masks: parity of crossings between the two index sets."""
        key = (m1, m2)
        s = self._sign.get(key)
        if s is None:
            flips = 0
            t = m2
            while t:
                low = t & -t
                i = low.bit_length()  # count members of m1 above this index
                flips += (m1 >> i).bit_count()
                t ^= low
            s = -1 if flips & 1 else 1
            self._sign[key] = s
        return s

    def conj_mask(self, mask):
        """(new_mask, sign) for the dagger of the monomial `mask`."""
        res = self._conj.get(mask)
        if res is None:
            seq = [self.involution(i) for i in reversed(_bits(mask))]
            sign = 1
            for i in range(1, len(seq)):  # insertion sort counting swaps
                j = i
                while j > 0 and seq[j - 1] > seq[j]:
                    seq[j - 1], seq[j] = seq[j], seq[j - 1]
                    sign = -sign
                    j -= 1
            new_mask = 0
            for i in seq:
                new_mask |= 1 << i
            res = (new_mask, sign)
            self._conj[mask] = res
        return res

    def __repr__(self):
        return f"AlgebraContext(pairs={self.pairs}, gens={self.gens})"


def _bits(mask):
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def mask_parity(mask):
    return mask.bit_count() & 1


class GrassmannElement:
    """Grassmann element / scalar superfield over one algebra context."""

    __slots__ = ("ctx", "base", "dp", "dm", "den", "table")

    def __init__(self, ctx, base, dp, dm, den, table):
        self.ctx = ctx
        self.base = base
        self.dp = dp
        self.dm = dm
        self.den = den      # positive int (exact) or None (float)
        self.table = table  # mask -> {cellkey -> (a, b) | complex}

    # -- basics -------------------------------------------------------------
    @property
    def exact(self):
        return self.den is not None

    def _check(self, other):
        if self.ctx is not other.ctx and self.ctx.pairs != other.ctx.pairs:
            raise AlgebraMismatch("operands from different algebra contexts")
        if self.exact != other.exact:
            raise TypeError("cannot mix exact and float elements")
        if not (self.base == other.base):
            raise BasePointMismatch(f"{self.base} vs {other.base}")

    def canon(self):
        table = {}
        if self.exact:
            for m, cells in self.table.items():
                kept = {k: v for k, v in cells.items() if v[0] or v[1]}
                if kept:
                    table[m] = kept
            if not table:
                return GrassmannElement(self.ctx, self.base, self.dp, self.dm,
                                        ONE, {})
            g = gcd_many(self.den,
                         (c for cells in table.values()
                          for ab in cells.values() for c in ab))
            if g != 1:
                table = {m: {k: (a // g, b // g) for k, (a, b) in cells.items()}
                         for m, cells in table.items()}
                return GrassmannElement(self.ctx, self.base, self.dp, self.dm,
                                        self.den // g, table)
            return GrassmannElement(self.ctx, self.base, self.dp, self.dm,
                                    self.den, table)
        mx = 0.0
        for cells in self.table.values():
            for v in cells.values():
                a = abs(v)
                if a > mx:
                    mx = a
        floor = mx * FLOAT_NOISE  # drop cells that are pure roundoff residue
        for m, cells in self.table.items():
            kept = {k: v for k, v in cells.items() if abs(v) > floor}
            if kept:
                table[m] = kept
        return GrassmannElement(self.ctx, self.base, self.dp, self.dm, None,
                                table)

    def is_zero(self, tol=0.0):
        if self.exact:
            return not self.table
        return all(abs(v) <= tol for cells in self.table.values()
                   for v in cells.values())

    def parity(self):
        par = {mask_parity(m) for m in self.table}
        if len(par) == 2:
            return MIXED
        if par == {1}:
            return ODD
        return EVEN

    def is_even(self):
        return all(not mask_parity(m) for m in self.table)

    def is_odd(self):
        return self.table and all(mask_parity(m) for m in self.table)

    def norm_float(self):
        best = 0.0
        if self.exact:
            for cells in self.table.values():
                for a, b in cells.values():
                    v = max(abs(a), abs(b))
                    if v > best:
                        best = v
            return _ratio(best, self.den) * 1.4142135623730951 if best else 0.0
        for cells in self.table.values():
            for v in cells.values():
                a = abs(v)
                if a > best:
                    best = a
        return best

    def coeff_jet(self, mask):
        cells = self.table.get(mask, {})
        return Jet(self.base, self.dp, self.dm,
                   self.den, dict(cells)).canon()

    def body_jet(self):
        return self.coeff_jet(0)

    def truncated(self, dp, dm):
        dp, dm = min(dp, self.dp), min(dm, self.dm)
        table = {}
        for m, cells in self.table.items():
            kept = {k: v for k, v in cells.items()
                    if (k >> QBITS) <= dp and (k & QMASK) <= dm}
            if kept:
                table[m] = kept
        return GrassmannElement(self.ctx, self.base, dp, dm, self.den,
                                table).canon()

    # -- linear operations ----------------------------------------------------
    def __add__(self, other):
        return self._addsub(other, 1)

    def __sub__(self, other):
        return self._addsub(other, -1)

    def _addsub(self, other, sgn):
        self._check(other)
        dp, dm = min(self.dp, other.dp), min(self.dm, other.dm)
        table = {}
        if self.exact:
            g = gcd(self.den, other.den)
            den = self.den // g * other.den
            fa, fb = other.den // g, self.den // g
            for m, cells in self.table.items():
                tgt = {}
                for k, (a, b) in cells.items():
                    if (k >> QBITS) <= dp and (k & QMASK) <= dm:
                        tgt[k] = (a * fa, b * fa)
                if tgt:
                    table[m] = tgt
            for m, cells in other.table.items():
                tgt = table.setdefault(m, {})
                for k, (a, b) in cells.items():
                    if (k >> QBITS) <= dp and (k & QMASK) <= dm:
                        ra, rb = tgt.get(k, (ZERO, ZERO))
                        tgt[k] = (ra + sgn * a * fb, rb + sgn * b * fb)
            return GrassmannElement(self.ctx, self.base, dp, dm, den,
                                    table).canon()
        for m, cells in self.table.items():
            tgt = {k: v for k, v in cells.items()
                   if (k >> QBITS) <= dp and (k & QMASK) <= dm}
            if tgt:
                table[m] = tgt
        for m, cells in other.table.items():
            tgt = table.setdefault(m, {})
            for k, v in cells.items():
                if (k >> QBITS) <= dp and (k & QMASK) <= dm:
                    tgt[k] = tgt.get(k, 0j) + sgn * v
        return GrassmannElement(self.ctx, self.base, dp, dm, None,
                                table).canon()

    def __neg__(self):
        if self.exact:
            table = {m: {k: (-a, -b) for k, (a, b) in cells.items()}
                     for m, cells in self.table.items()}
        else:
            table = {m: {k: -v for k, v in cells.items()}
                     for m, cells in self.table.items()}
        return GrassmannElement(self.ctx, self.base, self.dp, self.dm,
                                self.den, table)

    def scale(self, s):
        """Multiply by a plain scalar (GRat / int / Fraction; complex on
        the float backend)."""
        if not self.exact:
            c = complex(s.to_complex() if isinstance(s, GRat) else s)
            table = {m: {k: v * c for k, v in cells.items()}
                     for m, cells in self.table.items()}
            return GrassmannElement(self.ctx, self.base, self.dp, self.dm,
                                    None, table).canon()
        if isinstance(s, complex):
            raise TypeError("cannot scale an exact element by a float scalar")
        if not isinstance(s, GRat):
            s = GRat(s)
        sa, sb, sd = s.as_int_pair()
        table = {m: {k: (a * sa - b * sb, a * sb + b * sa)
                     for k, (a, b) in cells.items()}
                 for m, cells in self.table.items()}
        return GrassmannElement(self.ctx, self.base, self.dp, self.dm,
                                self.den * sd, table).canon()

    def scale_i(self):
        """Multiply by the imaginary unit (both backends)."""
        if self.exact:
            table = {m: {k: (-b, a) for k, (a, b) in cells.items()}
                     for m, cells in self.table.items()}
            return GrassmannElement(self.ctx, self.base, self.dp, self.dm,
                                    self.den, table)
        return self.scale(1j)

    # -- multiplicative kernel -------------------------------------------------
    def gmul(self, other):
        """Graded product; the hot path of the whole package."""
        self._check(other)
        ctx = self.ctx
        dp, dm = min(self.dp, other.dp), min(other.dm, self.dm)
        sign_cache = ctx._sign
        mul_sign = ctx.mul_sign
        acc = {}
        if self.exact:
            blist = [
                (m2, [(k, v[0], v[1]) for k, v in cells.items()
                      if (k >> QBITS) <= dp and (k & QMASK) <= dm])
                for m2, cells in other.table.items()
            ]
            for m1, cells1 in self.table.items():
                c1 = [(k, v[0], v[1]) for k, v in cells1.items()
                      if (k >> QBITS) <= dp and (k & QMASK) <= dm]
                if not c1:
                    continue
                for m2, c2 in blist:
                    if m1 & m2 or not c2:
                        continue
                    s = sign_cache.get((m1, m2))
                    if s is None:
                        s = mul_sign(m1, m2)
                    tgt = acc.get(m1 | m2)
                    if tgt is None:
                        tgt = acc[m1 | m2] = {}
                    if s > 0:
                        for k1, a1, b1 in c1:
                            pr = dp - (k1 >> QBITS)
                            qr = dm - (k1 & QMASK)
                            for k2, a2, b2 in c2:
                                if (k2 >> QBITS) > pr or (k2 & QMASK) > qr:
                                    continue
                                cur = tgt.get(k1 + k2)
                                if cur is None:
                                    tgt[k1 + k2] = [a1 * a2 - b1 * b2,
                                                    a1 * b2 + b1 * a2]
                                else:
                                    cur[0] += a1 * a2 - b1 * b2
                                    cur[1] += a1 * b2 + b1 * a2
                    else:
                        for k1, a1, b1 in c1:
                            pr = dp - (k1 >> QBITS)
                            qr = dm - (k1 & QMASK)
                            for k2, a2, b2 in c2:
                                if (k2 >> QBITS) > pr or (k2 & QMASK) > qr:
                                    continue
                                cur = tgt.get(k1 + k2)
                                if cur is None:
                                    tgt[k1 + k2] = [b1 * b2 - a1 * a2,
                                                    -a1 * b2 - b1 * a2]
                                else:
                                    cur[0] += b1 * b2 - a1 * a2
                                    cur[1] -= a1 * b2 + b1 * a2
            table = {}
            for m, cells in acc.items():
                kept = {k: (v[0], v[1]) for k, v in cells.items()
                        if v[0] or v[1]}
                if kept:
                    table[m] = kept
            return GrassmannElement(ctx, self.base, dp, dm,
                                    self.den * other.den, table).canon()
        # float backend
        blist = [
            (m2, [(k, v) for k, v in cells.items()
                  if (k >> QBITS) <= dp and (k & QMASK) <= dm])
            for m2, cells in other.table.items()
        ]
        for m1, cells1 in self.table.items():
            c1 = [(k, v) for k, v in cells1.items()
                  if (k >> QBITS) <= dp and (k & QMASK) <= dm]
            if not c1:
                continue
            for m2, c2 in blist:
                if m1 & m2 or not c2:
                    continue
                s = sign_cache.get((m1, m2))
                if s is None:
                    s = mul_sign(m1, m2)
                tgt = acc.setdefault(m1 | m2, {})
                for k1, v1 in c1:
                    pr = dp - (k1 >> QBITS)
                    qr = dm - (k1 & QMASK)
                    sv1 = v1 if s > 0 else -v1
                    for k2, v2 in c2:
                        if (k2 >> QBITS) > pr or (k2 & QMASK) > qr:
                            continue
                        tgt[k1 + k2] = tgt.get(k1 + k2, 0j) + sv1 * v2
        table = {}
        for m, cells in acc.items():
            kept = {k: v for k, v in cells.items() if v != 0}
            if kept:
                table[m] = kept
        return GrassmannElement(ctx, self.base, dp, dm, None, table).canon()

    __mul__ = gmul

    # -- involutions and derivatives -------------------------------------------
    def gconj(self):
        """Antilinear dagger: reverses monomials through the involution and
        conjugate-transposes every jet table."""
        conj_mask = self.ctx.conj_mask
        table = {}
        for m, cells in self.table.items():
            nm, sgn = conj_mask(m)
            if self.exact:
                if sgn > 0:
                    nc = {((k & QMASK) << QBITS) | (k >> QBITS): (a, -b)
                          for k, (a, b) in cells.items()}
                else:
                    nc = {((k & QMASK) << QBITS) | (k >> QBITS): (-a, b)
                          for k, (a, b) in cells.items()}
            else:
                if sgn > 0:
                    nc = {((k & QMASK) << QBITS) | (k >> QBITS): v.conjugate()
                          for k, v in cells.items()}
                else:
                    nc = {((k & QMASK) << QBITS) | (k >> QBITS): -v.conjugate()
                          for k, v in cells.items()}
            table[nm] = nc
        return GrassmannElement(self.ctx, self.base, self.dm, self.dp,
                                self.den, table)

    def gderiv(self, gen):
        """Left derivative with respect to generator `gen`."""
        if gen >= self.ctx.gens or gen < 0:
            raise IndexOutOfRange(f"generator {gen} outside 0..{self.ctx.gens - 1}")
        bit = 1 << gen
        low = bit - 1
        table = {}
        for m, cells in self.table.items():
            if not m & bit:
                continue
            sgn = -1 if (m & low).bit_count() & 1 else 1
            if sgn > 0:
                table[m ^ bit] = dict(cells)
            elif self.exact:
                table[m ^ bit] = {k: (-a, -b) for k, (a, b) in cells.items()}
            else:
                table[m ^ bit] = {k: -v for k, v in cells.items()}
        return GrassmannElement(self.ctx, self.base, self.dp, self.dm,
                                self.den, table)

    def partial(self, direction):
        """Coefficientwise x+/x- derivative of every jet table."""
        from .errors import JetOrderExhausted
        if direction == "plus":
            if self.dp < 1:
                raise JetOrderExhausted("no x+ orders left")
            table = {}
            for m, cells in self.table.items():
                nc = {}
                for k, v in cells.items():
                    p = k >> QBITS
                    if p >= 1:
                        nc[k - (1 << QBITS)] = ((v[0] * p, v[1] * p)
                                                if self.exact else v * p)
                if nc:
                    table[m] = nc
            return GrassmannElement(self.ctx, self.base, self.dp - 1, self.dm,
                                    self.den, table).canon()
        if self.dm < 1:
            raise JetOrderExhausted("no x- orders left")
        table = {}
        for m, cells in self.table.items():
            nc = {}
            for k, v in cells.items():
                q = k & QMASK
                if q >= 1:
                    nc[k - 1] = (v[0] * q, v[1] * q) if self.exact else v * q
            if nc:
                table[m] = nc
        return GrassmannElement(self.ctx, self.base, self.dp, self.dm - 1,
                                self.den, table).canon()

    def ginvert(self, tol=None):
        """Inverse via body inversion and the finite Neumann tail:
        (b + s)^-1 = sum_m (-1)^m b^-(m+1) s^m, s nilpotent."""
        tol = self.ctx.tol if tol is None else tol
        body = self.coeff_jet(0)
        inv_body = body.reciprocal(tol=tol)  # raises ZeroBody when singular
        inv0 = ge_from_jets(self.ctx, {0: inv_body})
        soul = self - ge_from_jets(self.ctx, {0: body},
                                   dims=(self.dp, self.dm))
        if soul.is_zero(0.0 if self.exact else tol):
            return inv0.truncated(self.dp, self.dm)
        step = soul.gmul(inv0).scale(-1)
        result = inv0
        term = inv0
        for _ in range(self.ctx.gens):
            term = step.gmul(term)
            if term.is_zero(0.0 if self.exact else tol):
                break
            result = result + term
        if not self.exact:
            # Newton polish x <- x(2 - a x) against float cancellation in
            # the nilpotent tail
            two = ge_constant(self.ctx, self.base, self.dp, self.dm, 2.0,
                              exact=False)
            for _ in range(2):
                result = result.gmul(two - self.gmul(result))
        return result

    def strip_theta(self):
        """Set theta+ = theta- = 0: drop monomials containing either."""
        table = {m: dict(cells) for m, cells in self.table.items()
                 if not m & 0b11}
        return GrassmannElement(self.ctx, self.base, self.dp, self.dm,
                                self.den, table)

    # -- comparison / repr -------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, GrassmannElement):
            return NotImplemented
        a, b = self.canon(), other.canon()
        return (a.ctx.pairs == b.ctx.pairs and a.base == b.base
                and a.dp == b.dp and a.dm == b.dm and a.den == b.den
                and a.table == b.table)

    def __hash__(self):
        raise TypeError("Grassmann elements are not hashable")

    def __repr__(self):
        kind = "exact" if self.exact else "float"
        monos = ", ".join(self.ctx.monomial_name(m)
                          for m in sorted(self.table)[:6])
        more = "..." if len(self.table) > 6 else ""
        return (f"GrassmannElement({kind}, orders=({self.dp},{self.dm}), "
                f"{len(self.table)} monomials: {monos}{more})")


# -- constructors ----------------------------------------------------------------

def ge_zero(ctx, base, dp, dm, exact=True):
    return GrassmannElement(ctx, base, dp, dm, ONE if exact else None, {})


def ge_from_jets(ctx, jets, dims=None):
    """Element from {mask: Jet}; jets are aligned to one denominator.

    Zero jets still contribute their base point and truncation orders.
    """
    if not jets:
        raise ValueError("need at least one jet to infer base point")
    ref = next(iter(jets.values()))
    base = ref.base
    dp = min(j.dp for j in jets.values())
    dm = min(j.dm for j in jets.values())
    if dims is not None:
        dp, dm = min(dp, dims[0]), min(dm, dims[1])
    for j in jets.values():
        if not (j.base == base) or (j.den is None) != (ref.den is None):
            raise BasePointMismatch("jets disagree on base point or backend")
    if ref.den is None:
        table = {}
        for m, j in jets.items():
            cells = {k: v for k, v in j.cells.items()
                     if (k >> QBITS) <= dp and (k & QMASK) <= dm}
            if cells:
                table[m] = cells
        return GrassmannElement(ctx, base, dp, dm, None, table)
    den = ONE
    for j in jets.values():
        if j.cells:
            g = gcd(den, j.den)
            den = den // g * j.den
    table = {}
    for m, j in jets.items():
        if not j.cells:
            continue
        f = den // j.den
        cells = {k: (a * f, b * f) for k, (a, b) in j.cells.items()
                 if (k >> QBITS) <= dp and (k & QMASK) <= dm}
        if cells:
            table[m] = cells
    return GrassmannElement(ctx, base, dp, dm, den, table).canon()


def ge_constant(ctx, base, dp, dm, value, exact=True):
    from .jets import jet_constant
    return ge_from_jets(ctx, {0: jet_constant(base, dp, dm, value, exact)},
                        dims=(dp, dm))


def ge_one(ctx, base, dp, dm, exact=True):
    return ge_constant(ctx, base, dp, dm, GRat(1) if exact else 1.0, exact)


def ge_generator(ctx, base, dp, dm, gen, exact=True):
    if gen >= ctx.gens or gen < 0:
        raise IndexOutOfRange(f"generator {gen} outside 0..{ctx.gens - 1}")
    from .jets import jet_constant
    one = jet_constant(base, dp, dm, GRat(1) if exact else 1.0, exact)
    return ge_from_jets(ctx, {1 << gen: one}, dims=(dp, dm))
