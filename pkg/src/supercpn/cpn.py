"""General towers: the diagonal-coefficient explicit family, external
tower assembly, the kernel-constraint checker and the telescoping
identities used by the conservation-law proof.

With Gamma_j = eta * I and eta = eta^f(x+) + i theta+ eta^b (eta^b an
invertible-body constant), the tower closes in derivatives of psi_0^b:

    psi_j^b = (-i/eta^b)^j d+^j psi_0^b                    j <= N-2
    psi_j^f = eta^f (-i/eta^b)^(j+1) d+^(j+1) psi_0^b      j <= N-2
    psi_{N-1}^b = (eta^f/eta^b) psi_{N-1}^f + (-i/eta^b)^(N-1) d+^(N-1) psi_0^b

with psi_{N-1}^f a free odd holomorphic vector.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bundle import SolutionBundle
from .cp2 import FermionicParameter
from .errors import (IndexOutOfRange, OrderMismatch, ParityError, ZeroBody)
from .grassmann import ge_zero
from .linalg import apply_complement, gram_schmidt, inner, projector_from
from .superfields import SuperMatrix, SuperVector, assemble_plus, is_holomorphic, outer


@dataclass
class DiagonalGammaData:
    """Free inputs of the diagonal-coefficient family."""
    n: int
    eta: FermionicParameter       # eta^f odd holomorphic; eta^b constant even
    psi0b: SuperVector            # n components, even holomorphic
    psi_last_f: SuperVector       # n components, odd holomorphic, free

    def validate(self, allow_nonconstant_eta_b=False):
        if self.n < 2:
            raise OrderMismatch("model size must be >= 2")
        if len(self.psi0b) != self.n or len(self.psi_last_f) != self.n:
            raise OrderMismatch(f"vectors must have {self.n} components")
        if not self.psi0b.is_even():
            raise ParityError("psi0.b must be even")
        for c in self.psi_last_f:
            if not (c.is_zero() or c.is_odd()):
                raise ParityError("last fermionic vector must be odd")
        if not (self.eta.f.is_zero() or self.eta.f.is_odd()):
            raise ParityError("eta.f must be odd")
        if not self.eta.b.is_even():
            raise ParityError("eta.b must be even")
        for name, fld in (("psi0.b", self.psi0b), ("psi_last.f", self.psi_last_f)):
            if not is_holomorphic(fld):
                raise OrderMismatch(f"{name} must be holomorphic")
        if not is_holomorphic(self.eta.f) or not is_holomorphic(self.eta.b):
            raise OrderMismatch("eta must be holomorphic")
        if not allow_nonconstant_eta_b and not _is_constant(self.eta.b):
            raise OrderMismatch(
                "eta.b must be constant in x+ for the closed-form tower; "
                "supply the tower explicitly and use assemble_tower_bundle "
                "for x+-dependent eta.b")


def _is_constant(elem):
    return all(k == 0 for cells in elem.table.values() for k in cells)


def build_diagonal_solution(d: DiagonalGammaData, seed=None):
    """The closed-form tower, orthogonalised into a SolutionBundle."""
    d.validate()
    n = d.n
    try:
        inv_eb = d.eta.b.ginvert()
    except ZeroBody as exc:
        raise ZeroBody("eta.b") from exc
    step = inv_eb.scale_i().scale(-1)          # -i / eta^b
    derivs = [d.psi0b]
    for _ in range(n):
        derivs.append(derivs[-1].partial("plus"))

    def power(j):
        out = None
        for _ in range(j):
            out = step if out is None else out.gmul(step)
        return out

    psis_b, psis_f = [], []
    for j in range(n - 1):
        pb = derivs[j] if j == 0 else derivs[j].lmul(power(j))
        pf = derivs[j + 1].lmul(d.eta.f.gmul(power(j + 1)))
        psis_b.append(pb)
        psis_f.append(pf)
    last_b = (d.psi_last_f.lmul(d.eta.f.gmul(inv_eb))
              + derivs[n - 1].lmul(power(n - 1)))
    psis_b.append(last_b)
    psis_f.append(d.psi_last_f)

    psis = [SuperVector([assemble_plus(bc, fc) for bc, fc in zip(pb, pf)])
            for pb, pf in zip(psis_b, psis_f)]
    dp = min(p.dims[0] for p in psis)
    dm = min(p.dims[1] for p in psis)
    psis = [p.truncated(dp, dm) for p in psis]

    eta_elem = d.eta.assembled().truncated(dp, dm)
    zero = ge_zero(eta_elem.ctx, eta_elem.base, dp, dm, eta_elem.exact)
    gamma_psi = [None] + [psis[j].lmul(eta_elem) for j in range(1, n)]
    alpha_table = {j: [zero] * j + [eta_elem] for j in range(1, n)}

    zs, norms, invs = gram_schmidt(psis)
    projectors = [projector_from(z, ninv) for z, ninv in zip(zs, invs)]
    return SolutionBundle(
        n=n, psis=psis, zs=zs, norms=norms, inv_norms=invs,
        projectors=projectors, gamma_psi=gamma_psi, alpha_table=alpha_table,
        provenance="cpn-diagonal", seed=seed, free_data=d)


def assemble_tower_bundle(psis, alpha_table, seed=None,
                          provenance="external-tower"):
    """Bundle from an externally supplied tower plus its expansion table.

    The gamma products are reconstructed as sum_k alpha_k^(j) psi_k; all
    identities are then checked by the verifier rather than guaranteed by
    construction.
    """
    n = len(psis)
    dp = min(p.dims[0] for p in psis)
    dm = min(p.dims[1] for p in psis)
    psis = [p.truncated(dp, dm) for p in psis]
    gamma_psi = [None]
    table = {}
    for j in range(1, n):
        coeffs = [c.truncated(dp, dm) for c in alpha_table[j]]
        if len(coeffs) != j + 1:
            raise OrderMismatch(f"alpha table row {j} must have {j + 1} entries")
        acc = psis[0].lmul(coeffs[0])
        for k in range(1, j + 1):
            acc = acc + psis[k].lmul(coeffs[k])
        gamma_psi.append(acc)
        table[j] = coeffs
    zs, norms, invs = gram_schmidt(psis)
    projectors = [projector_from(z, ninv) for z, ninv in zip(zs, invs)]
    return SolutionBundle(
        n=n, psis=psis, zs=zs, norms=norms, inv_norms=invs,
        projectors=projectors, gamma_psi=gamma_psi, alpha_table=table,
        provenance=provenance, seed=seed)


def check_general_constraint(bundle, j):
    """Residual (I - sum_{k<=j} P_k)(Gamma_j psi_j) for 1 <= j <= N-2."""
    if not 1 <= j <= bundle.n - 2:
        raise IndexOutOfRange(f"constraint index {j} outside 1..{bundle.n - 2}")
    return apply_complement(bundle.projectors, j, bundle.gamma_psi[j])


def prop3_residuals(bundle):
    """Both tower identities per index:

    D- z_j + ((Gamma_j psi_j)^dag z_j / |z_{j-1}|^2) z_{j-1}        (minus)
    D+ (z_j/|z_j|^2) - (1/|z_j|^2)(I - sum_{k<=j} P_k) Gamma_{j+1} psi_{j+1}
                                                                     (plus)
    with Gamma_0 psi_0 and Gamma_N psi_N both absent (zero).
    """
    out = []
    n = bundle.n
    for j in range(n):
        dz = bundle.zs[j].super_derive("minus")
        if j == 0:
            minus_res = dz
        else:
            s = inner(bundle.gamma_psi[j], bundle.zs[j]).gmul(
                bundle.inv_norms[j - 1])
            minus_res = dz + bundle.zs[j - 1].lmul(s)
        w = bundle.zs[j].lmul(bundle.inv_norms[j])
        dplus = w.super_derive("plus")
        if j == n - 1:
            plus_res = dplus
        else:
            rhs = apply_complement(bundle.projectors, j,
                                   bundle.gamma_psi[j + 1])
            plus_res = dplus - rhs.lmul(bundle.inv_norms[j])
        out.append((minus_res, plus_res))
    return out


def b_matrix(bundle, m):
    """B_m = (1/|z_m|^2)(I - sum_{k<=m} P_k)(Gamma_{m+1} psi_{m+1}) z_m^dag;
    B_{N-1} = 0 by the convention Gamma_N psi_N = 0."""
    n = bundle.n
    if not 0 <= m <= n - 1:
        raise IndexOutOfRange(f"index {m} outside 0..{n - 1}")
    if m == n - 1:
        z = bundle.zs[m]
        zero = ge_zero(z.ctx, z.base, *z.dims, z.exact)
        k = len(z)
        return SuperMatrix([[zero] * k for _ in range(k)])
    v = apply_complement(bundle.projectors, m, bundle.gamma_psi[m + 1])
    v = v.lmul(bundle.inv_norms[m])
    return outer(v, bundle.zs[m])
