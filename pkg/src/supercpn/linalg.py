"""Hermitian inner products, Gram-Schmidt towers, rank-one projectors and
inversion of even matrices over the Grassmann-jet ring.

Division never introduces square roots: the towers stay unnormalised and
all quotients are left-multiplications by `ginvert` of the (even) norm
squares, so the projectors z z^dag / |z|^2 are the only normalised objects.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (DimensionMismatch, LinearDependence, ParityError,
                     SingularBody, ZeroBody)
from .grassmann import ge_from_jets
from .superfields import SuperMatrix, SuperVector


@dataclass
class ProjectorSet:
    """Orthogonal rank-one projectors plus the tower that produced them."""
    projectors: list
    zs: list
    norms: list
    inv_norms: list


def inner(u, v):
    """Hermitian inner product u^dag v = sum_k (u_k)^dag v_k."""
    if len(u) != len(v):
        raise DimensionMismatch("inner product needs equal lengths")
    acc = u[0].gconj().gmul(v[0])
    for k in range(1, len(u)):
        acc = acc + u[k].gconj().gmul(v[k])
    return acc


def norm_sq(u):
    return inner(u, u)


def gram_schmidt(psis, require_even=True, condition_limit=1e14):
    """Orthogonalise: z_0 = psi_0, z_j = psi_j - sum (z_k^dag psi_j / |z_k|^2) z_k.

    Returns (z list, norm-square list, inverse-norm-square list); raises
    LinearDependence when any |z_j|^2 has a non-invertible body.  On the
    float backend a norm whose reciprocal costs more digits than a double
    holds (condition above `condition_limit`) counts as dependent too;
    pass None to disable that gate.
    """
    if require_even:
        for j, p in enumerate(psis):
            if not p.is_even():
                raise ParityError(f"input vector {j} is not even")
    zs, norms, invs = [], [], []
    for j, psi in enumerate(psis):
        z = psi
        for k in range(j):
            coef = inner(zs[k], psi).gmul(invs[k])
            z = z - zs[k].lmul(coef)
        n = norm_sq(z)
        if not n.exact:
            # near-zero body relative to the norm's own coefficients means
            # numerically dependent: the reciprocal tower would be garbage
            body = abs(n.body_jet().body())
            if body < 1e-6 * max(n.norm_float(), 1e-300):
                raise LinearDependence(
                    f"norm of z_{j} numerically degenerate at base point")
        try:
            ninv = n.ginvert()
        except ZeroBody as exc:
            raise LinearDependence(
                f"norm of z_{j} has zero body: vectors dependent at base point"
            ) from exc
        if (not n.exact and condition_limit is not None
                and n.norm_float() * ninv.norm_float() > condition_limit):
            raise LinearDependence(
                f"norm of z_{j} too ill-conditioned at base point")
        zs.append(z)
        norms.append(n)
        invs.append(ninv)
    return zs, norms, invs


def projector_from(z, ninv=None):
    """Rank-one projector z z^dag / |z|^2."""
    if ninv is None:
        try:
            ninv = norm_sq(z).ginvert()
        except ZeroBody as exc:
            raise ZeroBody("projector norm has zero body") from exc
    w = z.lmul(ninv)  # |z|^2 is even: the inverse commutes with everything
    zconj = [c.gconj() for c in z]
    return SuperMatrix([[wi.gmul(zj) for zj in zconj] for wi in w])


def mat_commutator(a, b):
    return a @ b - b @ a


def apply_complement(projectors, upto, vec):
    """(I - sum_{k<=upto} P_k) vec."""
    out = vec
    for k in range(upto + 1):
        out = out - projectors[k].apply(vec)
    return out


def mat_invert_even(m, tol=None):
    """Invert a matrix of even entries: Gauss-Jordan on the Grassmann body
    (a commutative jet-valued matrix), then a finite Neumann tail in the
    nilpotent remainder.

    The body matrix is the Grassmann-degree-0 part; it must be invertible
    at the base point (jet bodies), otherwise SingularBody is raised.
    """
    n = len(m)
    ctx = m.ctx
    for r in m.rows:
        for e in r:
            if not e.is_even():
                raise ParityError("matrix entry of odd parity")
    tol = ctx.tol if tol is None else tol
    body = [[e.coeff_jet(0) for e in r] for r in m.rows]
    inv_body = _jet_gauss_jordan(body, tol)
    base, (dp, dm), exact = m.base, m.dims, m.exact
    inv0 = SuperMatrix([[ge_from_jets(ctx, {0: inv_body[i][j]},
                                      dims=(dp, dm))
                         for j in range(n)] for i in range(n)])
    body_mat = SuperMatrix([[ge_from_jets(ctx, {0: body[i][j]},
                                          dims=(dp, dm))
                             for j in range(n)] for i in range(n)])
    remainder = m - body_mat
    if remainder.is_zero(0.0 if exact else tol):
        return inv0
    step = inv0 @ remainder  # nilpotent: every entry has Grassmann degree >= 2
    acc = inv0
    term = inv0
    for _ in range(ctx.gens + 1):
        term = step @ term
        term = -term
        if term.is_zero(0.0 if exact else tol):
            break
        acc = acc + term
    else:
        raise SingularBody("Neumann series failed to terminate")
    return acc


def _jet_gauss_jordan(body, tol):
    """Exact inverse of a matrix of jets (commutative ring, invertible
    pivots required up to row swaps)."""
    n = len(body)
    a = [row[:] for row in body]
    base = a[0][0].base
    dp, dm = a[0][0].dp, a[0][0].dm
    from .jets import jet_constant, jet_zero
    exact = a[0][0].exact
    ident = [[jet_constant(base, dp, dm, 1, exact=exact) if i == j
              else jet_zero(base, dp, dm, exact)
              for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = None
        if exact:
            for r in range(col, n):
                if a[r][col].body():
                    piv = r
                    break
        else:
            best = tol
            for r in range(col, n):
                mag = abs(a[r][col].body())
                if mag > best:
                    best = mag
                    piv = r
        if piv is None:
            raise SingularBody(f"body matrix singular at column {col}")
        if piv != col:
            a[piv], a[col] = a[col], a[piv]
            ident[piv], ident[col] = ident[col], ident[piv]
        inv_p = a[col][col].reciprocal(tol=tol)
        a[col] = [x * inv_p for x in a[col]]
        ident[col] = [x * inv_p for x in ident[col]]
        for r in range(n):
            if r == col:
                continue
            f = a[r][col]
            if f.is_zero(0.0 if exact else tol):
                continue
            a[r] = [x - f * y for x, y in zip(a[r], a[col])]
            ident[r] = [x - f * y for x, y in zip(ident[r], ident[col])]
    return ident


def expand_in_basis(w, basis, tol=None):
    """Coefficients c with sum_k c_k basis_k = w (c multiply from the left),
    plus the residual w - sum c_k basis_k.

    The Gram matrix <basis_k, basis_l> must have an invertible body (the
    basis independent at the base point).  Internally the system is solved
    through the orthogonal tower of the basis: projecting onto z_l gives an
    upper-triangular system (since basis_k lies in span{z_0..z_k}), and back
    substitution avoids squaring the condition number the way the normal
    equations would.
    """
    nb = len(basis)
    try:
        zs, _norms, invs = gram_schmidt(basis)
    except LinearDependence as exc:
        raise SingularBody(f"basis dependent at base point: {exc}") from None
    d = [inner(zs[l], w).gmul(invs[l]) for l in range(nb)]
    upper = {}
    for l in range(nb):
        for k in range(l + 1, nb):
            upper[(l, k)] = inner(zs[l], basis[k]).gmul(invs[l])
    coeffs = [None] * nb
    for l in range(nb - 1, -1, -1):
        acc = d[l]
        for k in range(l + 1, nb):
            acc = acc - coeffs[k].gmul(upper[(l, k)])
        coeffs[l] = acc
    recon = basis[0].lmul(coeffs[0])
    for k in range(1, nb):
        recon = recon + basis[k].lmul(coeffs[k])
    return coeffs, w - recon


def cross3(u, v):
    """Alternating 3-component cross product with graded products."""
    if len(u) != 3 or len(v) != 3:
        raise DimensionMismatch("cross product needs 3 components")
    for vec in (u, v):
        for c in vec:
            if not c.is_even():
                raise ParityError("cross product requires even components")
    def det(i, j):
        return u[i].gmul(v[j]) - u[j].gmul(v[i])
    return SuperVector([det(1, 2), det(2, 0), det(0, 1)])
