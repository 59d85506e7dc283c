"""Superfields: scalar assembly helpers, odd superderivatives, vectors
and matrices of Grassmann-valued jets.

The odd derivatives are

    D+ = -i d/dtheta+  +  theta+ d/dx+
    D- = -i d/dtheta-  +  theta- d/dx-

and satisfy D+^2 = -i d/dx+, D-^2 = -i d/dx-, {D+, D-} = 0 at the working
truncation.  Superfields decompose against theta+ as X = X_f + i theta+ X_b
(X_f, X_b theta-free); `assemble_plus` / `split_plus` convert between the
two pictures.
"""

from __future__ import annotations

from .errors import DimensionMismatch, OrderMismatch
from .grassmann import (GrassmannElement, ge_generator, ge_zero,
                        QMASK, THETA_M, THETA_P)


def super_derive(f, direction):
    """Apply D+ (direction 'plus') or D- ('minus')."""
    if isinstance(f, (SuperVector, SuperMatrix)):
        return f.super_derive(direction)
    gen = THETA_P if direction == "plus" else THETA_M
    dtheta = f.gderiv(gen).scale_i().scale(-1)          # -i d/dtheta
    theta = ge_generator(f.ctx, f.base, f.dp, f.dm, gen, f.exact)
    return dtheta + theta.gmul(f.partial(direction))


def is_holomorphic(f, tol=None):
    """No theta- content and no x- dependence in any coefficient."""
    if isinstance(f, SuperVector):
        return all(is_holomorphic(c, tol) for c in f)
    tol = (f.ctx.tol if tol is None else tol) if not f.exact else 0.0
    for mask, cells in f.table.items():
        if mask & (1 << THETA_M):
            if f.exact or any(abs(v) > tol for v in cells.values()):
                return False
        for k, v in cells.items():
            if k & QMASK:
                if f.exact or abs(v) > tol:
                    return False
    return True


def assemble_plus(f_part, b_part):
    """X = X_f + i theta+ X_b (theta+ multiplies from the left)."""
    ref = f_part if not f_part.is_zero() else b_part
    theta = ge_generator(ref.ctx, ref.base, ref.dp, ref.dm, THETA_P, ref.exact)
    return f_part + theta.gmul(b_part).scale_i()


def split_plus(x):
    """Inverse of `assemble_plus`; raises if x has other theta content."""
    tp_bit = 1 << THETA_P
    tm_bit = 1 << THETA_M
    if any(m & tm_bit for m in x.table):
        raise OrderMismatch("field has theta- content; not of the form X_f + i theta+ X_b")
    f_table = {m: dict(c) for m, c in x.table.items() if not m & tp_bit}
    f_part = GrassmannElement(x.ctx, x.base, x.dp, x.dm, x.den, f_table).canon()
    b_part = x.gderiv(THETA_P).scale_i().scale(-1)  # -i d/dtheta+ x
    return f_part, b_part


class SuperVector:
    """Column vector of scalar superfields with uniform base and orders."""

    __slots__ = ("comps",)

    def __init__(self, comps, strict=False):
        comps = tuple(comps)
        if not comps:
            raise DimensionMismatch("empty vector")
        dp = min(c.dp for c in comps)
        dm = min(c.dm for c in comps)
        if strict and any(c.dp != dp or c.dm != dm for c in comps):
            raise OrderMismatch("vector components have unequal jet orders")
        self.comps = tuple(c.truncated(dp, dm) if (c.dp, c.dm) != (dp, dm)
                           else c for c in comps)

    def __len__(self):
        return len(self.comps)

    def __iter__(self):
        return iter(self.comps)

    def __getitem__(self, i):
        return self.comps[i]

    @property
    def ctx(self):
        return self.comps[0].ctx

    @property
    def dims(self):
        return (self.comps[0].dp, self.comps[0].dm)

    @property
    def base(self):
        return self.comps[0].base

    @property
    def exact(self):
        return self.comps[0].exact

    def __add__(self, other):
        self._shape(other)
        return SuperVector(a + b for a, b in zip(self.comps, other.comps))

    def __sub__(self, other):
        self._shape(other)
        return SuperVector(a - b for a, b in zip(self.comps, other.comps))

    def __neg__(self):
        return SuperVector(-c for c in self.comps)

    def _shape(self, other):
        if not isinstance(other, SuperVector) or len(other) != len(self):
            raise DimensionMismatch("vector shapes differ")

    def scale(self, s):
        return SuperVector(c.scale(s) for c in self.comps)

    def scale_i(self):
        return SuperVector(c.scale_i() for c in self.comps)

    def lmul(self, scalar_elem):
        """Multiply every component by a scalar superfield from the left."""
        return SuperVector(scalar_elem.gmul(c) for c in self.comps)

    def super_derive(self, direction):
        return SuperVector(super_derive(c, direction) for c in self.comps)

    def partial(self, direction):
        return SuperVector(c.partial(direction) for c in self.comps)

    def gconj(self):
        return SuperVector(c.gconj() for c in self.comps)

    def strip_theta(self):
        return SuperVector(c.strip_theta() for c in self.comps)

    def truncated(self, dp, dm):
        return SuperVector(c.truncated(dp, dm) for c in self.comps)

    def is_zero(self, tol=0.0):
        return all(c.is_zero(tol) for c in self.comps)

    def is_even(self):
        return all(c.is_even() for c in self.comps)

    def norm_float(self):
        return max(c.norm_float() for c in self.comps)

    def __eq__(self, other):
        return (isinstance(other, SuperVector) and len(self) == len(other)
                and all(a == b for a, b in zip(self.comps, other.comps)))

    def __repr__(self):
        return f"SuperVector(n={len(self.comps)}, orders={self.dims})"


class SuperMatrix:
    """Square matrix of scalar superfields."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        rows = tuple(tuple(r) for r in rows)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise DimensionMismatch("matrix must be square")
        dp = min(e.dp for r in rows for e in r)
        dm = min(e.dm for r in rows for e in r)
        self.rows = tuple(
            tuple(e.truncated(dp, dm) if (e.dp, e.dm) != (dp, dm) else e
                  for e in r)
            for r in rows)

    @classmethod
    def identity(cls, ctx, base, dp, dm, n, exact=True):
        from .grassmann import ge_one
        one = ge_one(ctx, base, dp, dm, exact)
        zero = ge_zero(ctx, base, dp, dm, exact)
        return cls([[one if i == j else zero for j in range(n)]
                    for i in range(n)])

    def __len__(self):
        return len(self.rows)

    def __getitem__(self, i):
        return self.rows[i]

    @property
    def ctx(self):
        return self.rows[0][0].ctx

    @property
    def dims(self):
        return (self.rows[0][0].dp, self.rows[0][0].dm)

    @property
    def base(self):
        return self.rows[0][0].base

    @property
    def exact(self):
        return self.rows[0][0].exact

    def _shape(self, other):
        if not isinstance(other, SuperMatrix) or len(other) != len(self):
            raise DimensionMismatch("matrix shapes differ")

    def __add__(self, other):
        self._shape(other)
        return SuperMatrix([[a + b for a, b in zip(ra, rb)]
                            for ra, rb in zip(self.rows, other.rows)])

    def __sub__(self, other):
        self._shape(other)
        return SuperMatrix([[a - b for a, b in zip(ra, rb)]
                            for ra, rb in zip(self.rows, other.rows)])

    def __neg__(self):
        return SuperMatrix([[-e for e in r] for r in self.rows])

    def scale(self, s):
        return SuperMatrix([[e.scale(s) for e in r] for r in self.rows])

    def lmul(self, scalar_elem):
        return SuperMatrix([[scalar_elem.gmul(e) for e in r]
                            for r in self.rows])

    def __matmul__(self, other):
        self._shape(other)
        n = len(self)
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = self.rows[i][0].gmul(other.rows[0][j])
                for k in range(1, n):
                    acc = acc + self.rows[i][k].gmul(other.rows[k][j])
                row.append(acc)
            out.append(row)
        return SuperMatrix(out)

    def apply(self, vec):
        if len(vec) != len(self):
            raise DimensionMismatch("matrix/vector size mismatch")
        out = []
        for i in range(len(self)):
            acc = self.rows[i][0].gmul(vec[0])
            for k in range(1, len(self)):
                acc = acc + self.rows[i][k].gmul(vec[k])
            out.append(acc)
        return SuperVector(out)

    def dagger(self):
        """Hermitian conjugate: entry-wise dagger plus transpose."""
        n = len(self)
        return SuperMatrix([[self.rows[j][i].gconj() for j in range(n)]
                            for i in range(n)])

    def trace(self):
        acc = self.rows[0][0]
        for i in range(1, len(self)):
            acc = acc + self.rows[i][i]
        return acc

    def super_derive(self, direction):
        return SuperMatrix([[super_derive(e, direction) for e in r]
                            for r in self.rows])

    def partial(self, direction):
        return SuperMatrix([[e.partial(direction) for e in r]
                            for r in self.rows])

    def truncated(self, dp, dm):
        return SuperMatrix([[e.truncated(dp, dm) for e in r]
                            for r in self.rows])

    def is_zero(self, tol=0.0):
        return all(e.is_zero(tol) for r in self.rows for e in r)

    def norm_float(self):
        return max(e.norm_float() for r in self.rows for e in r)

    def __eq__(self, other):
        return (isinstance(other, SuperMatrix) and len(self) == len(other)
                and all(a == b for ra, rb in zip(self.rows, other.rows)
                        for a, b in zip(ra, rb)))

    def __repr__(self):
        return f"SuperMatrix(n={len(self.rows)}, orders={self.dims})"


def outer(u, v):
    """u v^dag as a matrix: entries u_i (v_j)^dag."""
    if len(u) != len(v):
        raise DimensionMismatch("outer product needs equal lengths")
    vconj = [c.gconj() for c in v]
    return SuperMatrix([[ui.gmul(vj) for vj in vconj] for ui in u])
