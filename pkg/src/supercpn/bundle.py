"""Solution bundles: everything one construction produces, in one value."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import DimensionMismatch
from .superfields import SuperVector


@dataclass
class SolutionBundle:
    """Free data, psi tower, orthogonal tower, projectors and the expansion
    coefficients of Gamma_j psi_j in the psi basis.

    `gamma_psi[j]` is the product Gamma_j psi_j (index 0 unused: the tower
    starts the recursion, there is no Gamma_0).  `alpha_table[j]` lists the
    odd coefficients alpha_k^(j), k = 0..j, with sum_k alpha_k^(j) psi_k =
    gamma_psi[j].
    """

    n: int
    psis: list
    zs: list
    norms: list
    inv_norms: list
    projectors: list
    gamma_psi: list
    alpha_table: dict
    provenance: str = "external"
    seed: Optional[int] = None
    free_data: object = None

    @property
    def ctx(self):
        return self.psis[0].ctx

    @property
    def base(self):
        return self.psis[0].base

    @property
    def exact(self):
        return self.psis[0].exact

    @property
    def dims(self):
        return self.psis[0].dims

    def gamma_psi_at(self, j):
        """Gamma_j psi_j for 1 <= j <= n-1; the convention Gamma_n psi_n = 0
        is handled by callers (there is no psi_n)."""
        if not 1 <= j <= self.n - 1:
            raise DimensionMismatch(f"gamma index {j} outside 1..{self.n - 1}")
        return self.gamma_psi[j]

    def perturbed(self, rel_size, vector=1, component=2):
        """Negative control: shift one psi component by `rel_size` times its
        largest coefficient, rebuild the tower and projectors, and keep the
        (now stale) gamma products and expansion coefficients."""
        from .grassmann import ge_constant
        from .linalg import gram_schmidt, projector_from
        from .scalars import GRat
        from fractions import Fraction

        target = self.psis[vector]
        scale = target.norm_float()
        if self.exact:
            mag = GRat(Fraction(rel_size).limit_denominator(10**6)
                       * Fraction(max(1, round(scale))))
            bump = ge_constant(self.ctx, self.base, *target.dims, mag)
        else:
            bump = ge_constant(self.ctx, self.base, *target.dims,
                               complex(rel_size * max(1.0, scale)), exact=False)
        comps = list(target.comps)
        comps[component] = comps[component] + bump
        psis = list(self.psis)
        psis[vector] = SuperVector(comps)
        # no conditioning gate: degraded precision is fine for a control
        zs, norms, invs = gram_schmidt(psis, condition_limit=None)
        projectors = [projector_from(z, ninv) for z, ninv in zip(zs, invs)]
        # expansion coefficients and stored gamma products stay frozen: the
        # perturbed tower no longer matches them, which is the point of the
        # control (kernel and EL checks fire; the system residuals are
        # recomputed from the coefficient table by the verifier)
        return SolutionBundle(
            n=self.n, psis=psis, zs=zs, norms=norms, inv_norms=invs,
            projectors=projectors, gamma_psi=list(self.gamma_psi),
            alpha_table=dict(self.alpha_table),
            provenance=self.provenance + "+perturbed", seed=self.seed,
            free_data=self.free_data)

    def gamma_from_table(self, j):
        """Gamma_j psi_j re-assembled from the stored expansion
        coefficients against the current tower."""
        coeffs = self.alpha_table[j]
        acc = self.psis[0].lmul(coeffs[0])
        for k in range(1, j + 1):
            acc = acc + self.psis[k].lmul(coeffs[k])
        return acc
