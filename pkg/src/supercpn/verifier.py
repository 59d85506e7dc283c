"""Residual computation for every identity a solution bundle must satisfy,
with a machine-readable report.

Verdict policy: on the exact backend a check passes iff its residual table
is identically empty; on the float backend iff its norm stays below
tolerance * (largest coefficient appearing in the projectors).  Failures
are verdicts, not exceptions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .bundle import SolutionBundle
from .cpn import b_matrix, check_general_constraint, prop3_residuals
from .errors import NotUnitary, ZeroBody
from .linalg import expand_in_basis, inner, mat_commutator, norm_sq
from .scalars import GRat, format_exact
from .superfields import SuperMatrix, SuperVector, super_derive

HOLOMORPHIC = "holomorphic"
ANTI_HOLOMORPHIC = "anti-holomorphic"
MIXED = "mixed"
CONSTANT = "constant"

CHECK_GROUPS = ("completeness", "orthogonality", "hermiticity",
                "idempotency", "trace", "el", "conservation", "theorem",
                "kernel", "system", "prop3", "telescope", "expansion",
                "a1", "holomorphy")


def el_commutator_residual(p: SuperMatrix):
    """[D+ D- P, P] and P^2 - P."""
    d2 = p.super_derive("minus").super_derive("plus")
    pt = p.truncated(*d2.dims)
    return mat_commutator(d2, pt), (p @ p) - p


def xi_field(p: SuperMatrix):
    """Xi = [P, D- P]; odd."""
    dm = p.super_derive("minus")
    return mat_commutator(p.truncated(*dm.dims), dm)


def conservation_residual(p: SuperMatrix):
    """D+ Xi + D- Xi^dag."""
    xi = xi_field(p)
    return xi.super_derive("plus") + xi.dagger().super_derive("minus")


def theorem_xi_residual(bundle: SolutionBundle, j):
    """Xi_j^dag - D+ (P_j + 2 sum_{k<j} P_k)."""
    xi = xi_field(bundle.projectors[j])
    acc = bundle.projectors[j]
    for k in range(j):
        acc = acc + bundle.projectors[k] + bundle.projectors[k]
    return xi.dagger() - acc.super_derive("plus").truncated(*xi.dims)


def b_telescope_residual(bundle: SolutionBundle, j):
    """D+ P_j - (B_j - B_{j-1}) with B_{-1} = 0."""
    dp = bundle.projectors[j].super_derive("plus")
    bj = b_matrix(bundle, j)
    res = dp - bj.truncated(*dp.dims)
    if j > 0:
        res = res + b_matrix(bundle, j - 1).truncated(*res.dims)
    return res


def alpha1_diagnostics(bundle: SolutionBundle):
    """(a_1, a_1 - D- alpha_1) with a_1^dag = (Gamma_1 psi_1)^dag D+(z_1/|z_1|^2)
    and alpha_1 = z_1^dag (Gamma_1 psi_1) / |z_1|^2."""
    gp = bundle.gamma_psi[1]
    w = bundle.zs[1].lmul(bundle.inv_norms[1])
    a1 = inner(gp, w.super_derive("plus")).gconj()
    alpha1 = inner(bundle.zs[1], gp).gmul(bundle.inv_norms[1])
    return a1, a1 - super_derive(alpha1, "minus").truncated(a1.dp, a1.dm)


def holomorphy_type(bundle: SolutionBundle, j, tol=None):
    """Classify projector j from the two one-sided residuals."""
    tol = _float_tol(bundle, tol)
    holo = bundle.zs[j].super_derive("minus").is_zero(tol)
    p = bundle.projectors[j]
    dp = p.super_derive("plus")
    anti = (dp @ p.truncated(*dp.dims)).is_zero(tol)
    if holo and anti:
        return CONSTANT
    if holo:
        return HOLOMORPHIC
    if anti:
        return ANTI_HOLOMORPHIC
    return MIXED


def lagrangian_density(p: SuperMatrix):
    """2 Tr(D- P  D+ P)."""
    dm = p.super_derive("minus")
    dp = p.super_derive("plus")
    dm = dm.truncated(*dp.dims)
    dp = dp.truncated(*dm.dims)
    return (dm @ dp).trace().scale(2)


def covariant_derivative(phi: SuperVector, direction):
    """D Lambda = D+- Lambda - Lambda (Phi^dag D+- Lambda)."""
    d = phi.super_derive(direction)
    s = inner(phi.truncated(*d.dims), d)
    return d - SuperVector([c.gmul(s) for c in phi.truncated(*d.dims)])


def lagrangian_from_phi(phi: SuperVector, tol=1e-12):
    """2(|D+ Phi|^2 - |D- Phi|^2); Phi must satisfy Phi^dag Phi = 1."""
    n = inner(phi, phi)
    from .grassmann import ge_one
    one = ge_one(phi.ctx, phi.base, n.dp, n.dm, phi.exact)
    if not (n - one).is_zero(0.0 if phi.exact else tol):
        raise ZeroBody("phi is not normalised")
    dplus = covariant_derivative(phi, "plus")
    dminus = covariant_derivative(phi, "minus")
    return (norm_sq(dplus) - norm_sq(dminus).truncated(*dplus.dims)).scale(2)


def apply_gauge(bundle: SolutionBundle, v, tol=1e-12):
    """Conjugate the whole bundle by a constant unitary matrix of plain
    scalars (GRat entries on the exact backend, complex on float)."""
    n = bundle.n
    exact = bundle.exact
    if len(v) != n or any(len(row) != n for row in v):
        raise NotUnitary(f"gauge matrix must be {n}x{n}")

    def conj_s(x):
        return x.conjugate()

    for i in range(n):
        for j in range(n):
            acc = None
            for k in range(n):
                term = conj_s(v[k][i]) * v[k][j]
                acc = term if acc is None else acc + term
            want = 1 if i == j else 0
            if exact:
                if acc != GRat(want):
                    raise NotUnitary("V^dag V != I")
            elif abs(acc - want) > tol:
                raise NotUnitary("V^dag V != I beyond tolerance")

    def mix_vec(vec):
        comps = []
        for i in range(n):
            acc = vec[0].scale(v[i][0])
            for k in range(1, n):
                acc = acc + vec[k].scale(v[i][k])
            comps.append(acc)
        return SuperVector(comps)

    def conj_mat(m):
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = None
                for k in range(n):
                    for l in range(n):
                        term = m[k][l].scale(v[i][k] * conj_s(v[j][l]))
                        acc = term if acc is None else acc + term
                row.append(acc)
            rows.append(row)
        return SuperMatrix(rows)

    return SolutionBundle(
        n=n,
        psis=[mix_vec(p) for p in bundle.psis],
        zs=[mix_vec(z) for z in bundle.zs],
        norms=list(bundle.norms),
        inv_norms=list(bundle.inv_norms),
        projectors=[conj_mat(p) for p in bundle.projectors],
        gamma_psi=[None] + [mix_vec(g) for g in bundle.gamma_psi[1:]],
        alpha_table=dict(bundle.alpha_table),
        provenance=bundle.provenance + "+gauge",
        seed=bundle.seed, free_data=bundle.free_data)


# -- report assembly ----------------------------------------------------------

@dataclass
class VerificationReport:
    config: dict
    checks: list
    passed: bool
    skipped: list = field(default_factory=list)

    def to_dict(self):
        return {"config": self.config,
                "checks": self.checks,
                "skipped": self.skipped,
                "pass": self.passed}

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent)

    def check(self, name):
        for c in self.checks:
            if c["name"] == name:
                return c
        raise KeyError(name)


def _float_tol(bundle, tol):
    if bundle.exact:
        return 0.0
    return 1e-9 if tol is None else tol


def projector_scale(bundle):
    return max(max(p.norm_float() for p in bundle.projectors), 1.0)


def verify_all(bundle: SolutionBundle, checks=None, tol=None,
               config_extra=None):
    """Run every applicable check (or the requested subset) and assemble
    the report.  Check failures become verdicts; nothing raises."""
    enabled = set(CHECK_GROUPS if checks is None else checks)
    unknown = enabled - set(CHECK_GROUPS)
    if unknown:
        raise ValueError(f"unknown checks: {sorted(unknown)}")
    skipped = sorted(set(CHECK_GROUPS) - enabled)
    exact = bundle.exact
    ftol = 1e-9 if tol is None else tol
    scale = projector_scale(bundle)
    n = bundle.n
    entries = []

    def record(name, residual):
        norm = residual.norm_float()
        zero = residual.is_zero(0.0)
        ok = zero if exact else (norm <= ftol * scale)
        entries.append({"name": name, "norm": norm,
                        "exact_zero": bool(zero), "pass": bool(ok)})

    if "completeness" in enabled:
        s = bundle.projectors[0]
        for p in bundle.projectors[1:]:
            s = s + p
        ident = SuperMatrix.identity(bundle.ctx, bundle.base, *s.dims, n,
                                     exact)
        record("completeness", s - ident)
    if "orthogonality" in enabled:
        worst = None
        for i in range(n):
            for j in range(i):
                r = inner(bundle.zs[i], bundle.zs[j])
                if worst is None or r.norm_float() > worst.norm_float():
                    worst = r
        record("gram_orthogonality", worst)
    for j, p in enumerate(bundle.projectors):
        if "hermiticity" in enabled:
            record(f"hermiticity_P{j}", p.dagger() - p)
        if "idempotency" in enabled:
            record(f"idempotency_P{j}", (p @ p) - p)
        if "trace" in enabled:
            tr = p.trace()
            from .grassmann import ge_one
            record(f"trace_P{j}",
                   tr - ge_one(bundle.ctx, bundle.base, tr.dp, tr.dm, exact))
        if "el" in enabled:
            d2 = p.super_derive("minus").super_derive("plus")
            record(f"el_commutator_P{j}",
                   mat_commutator(d2, p.truncated(*d2.dims)))
        if "conservation" in enabled:
            record(f"conservation_P{j}", conservation_residual(p))
        if "theorem" in enabled:
            record(f"theorem_xi_P{j}", theorem_xi_residual(bundle, j))
        if "telescope" in enabled:
            record(f"b_telescope_P{j}", b_telescope_residual(bundle, j))
    if "kernel" in enabled:
        for j in range(1, n - 1):
            record(f"kernel_constraint_j{j}", check_general_constraint(bundle, j))
    if "system" in enabled:
        for j in range(1, n):
            res = (bundle.gamma_from_table(j)
                   - bundle.psis[j - 1].super_derive("plus"))
            record(f"system_j{j}", res)
    if "prop3" in enabled:
        for j, (mres, pres) in enumerate(prop3_residuals(bundle)):
            record(f"prop3_minus_z{j}", mres)
            record(f"prop3_plus_z{j}", pres)
    if "expansion" in enabled:
        for j in range(1, n):
            coeffs, resid = expand_in_basis(bundle.gamma_psi[j],
                                            bundle.psis[:j + 1])
            record(f"expansion_residual_j{j}", resid)
            worst = None
            for c, stored in zip(coeffs, bundle.alpha_table[j]):
                diff = c - stored.truncated(c.dp, c.dm)
                if worst is None or diff.norm_float() > worst.norm_float():
                    worst = diff
            record(f"expansion_match_j{j}", worst)
    if "a1" in enabled and n >= 2 and bundle.gamma_psi[1] is not None:
        a1, a1m = alpha1_diagnostics(bundle)
        record("a1_vanishes", a1)
        record("a1_matches_dminus_alpha1", a1m)
    if "holomorphy" in enabled:
        record("holomorphy_z0", bundle.zs[0].super_derive("minus"))
        plast = bundle.projectors[-1]
        dp = plast.super_derive("plus")
        record("antiholomorphy_last", dp @ plast.truncated(*dp.dims))

    passed = all(c["pass"] for c in entries)
    config = {
        "backend": "exact" if exact else "float",
        "n": n,
        "pairs": bundle.ctx.pairs,
        "orders": list(bundle.dims),
        "base_point": format_exact(bundle.base) if exact
        else [bundle.base.real, bundle.base.imag],
        "seed": bundle.seed,
        "tolerance": ftol,
        "projector_scale": scale,
        "provenance": bundle.provenance,
    }
    if config_extra:
        config.update(config_extra)
    return VerificationReport(config=config, checks=entries, passed=passed,
                              skipped=skipped)
