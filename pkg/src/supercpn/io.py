"""JSON forms for every value the CLI reads or writes.

Scalar literals: exact backend uses strings "a/b" / "a/b+c/d*i" (lowest
terms on output); float backend uses JSON numbers, or [re, im] pairs when
the imaginary part is nonzero.  Polynomials are coefficient lists, lowest
degree first.  Odd/even Grassmann data is a list of {"gens": [...],
"poly": [...]} terms; the parity of each term is the parity of its gens
list.

Jets: {"base": literal, "orders": [dp, dm], "coeffs": row-major table}.
Elements: list of {"monomial": [indices ascending], "coeff": jet-or-literal}.
"""

from __future__ import annotations

import json

from .bundle import SolutionBundle
from .cp2 import CP2FreeData, FermionicParameter
from .cpn import DiagonalGammaData
from .errors import ConfigParseError
from .grassmann import AlgebraContext, GrassmannElement, ge_from_jets, ge_zero
from .jets import Jet, jet_from_grats, jet_poly, pack
from .scalars import GRat, format_exact, parse_exact
from .superfields import SuperMatrix, SuperVector

BUNDLE_FORMAT = "supercpn-bundle-v1"


# -- scalars -----------------------------------------------------------------

def scalar_to_json(x):
    if isinstance(x, GRat):
        return format_exact(x)
    x = complex(x)
    if x.imag == 0.0:
        return x.real
    return [x.real, x.imag]


def scalar_from_json(v, exact):
    try:
        if isinstance(v, str):
            g = parse_exact(v)
            return g if exact else g.to_complex()
        if isinstance(v, bool):
            raise ValueError("booleans are not scalars")
        if isinstance(v, int):
            return GRat(v) if exact else complex(v)
        if isinstance(v, float):
            if exact:
                raise ValueError(
                    "float literal on the exact backend; use 'a/b' strings")
            return complex(v)
        if isinstance(v, list) and len(v) == 2:
            if exact:
                raise ValueError(
                    "[re, im] literals are float-backend only")
            return complex(float(v[0]), float(v[1]))
    except ValueError as exc:
        raise ConfigParseError(str(exc)) from None
    raise ConfigParseError(f"bad scalar literal: {v!r}")


# -- jets ---------------------------------------------------------------------

def jet_to_json(j: Jet):
    rows = []
    for p in range(j.dp + 1):
        row = []
        for q in range(j.dm + 1):
            row.append(scalar_to_json(j.coeff(p, q)))
        rows.append(row)
    return {"base": scalar_to_json(_base_scalar(j)),
            "orders": [j.dp, j.dm], "coeffs": rows}


def _base_scalar(j):
    return j.base if j.exact else complex(j.base)


def jet_from_json(obj, exact):
    try:
        dp, dm = (int(x) for x in obj["orders"])
        base = scalar_from_json(obj["base"], exact)
        rows = obj["coeffs"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigParseError(f"bad jet object: {exc}") from None
    if exact:
        table = {}
        for p, row in enumerate(rows):
            for q, lit in enumerate(row):
                val = scalar_from_json(lit, True)
                if val:
                    table[pack(p, q)] = val
        return jet_from_grats(base, dp, dm, table)
    cells = {}
    for p, row in enumerate(rows):
        for q, lit in enumerate(row):
            val = scalar_from_json(lit, False)
            if val != 0:
                cells[pack(p, q)] = val
    return Jet(base, dp, dm, None, cells)


# -- elements / vectors / matrices ---------------------------------------------

def element_to_json(e: GrassmannElement):
    out = []
    for mask in sorted(e.table):
        jet = e.coeff_jet(mask)
        if e.dp == 0 and e.dm == 0:
            coeff = scalar_to_json(jet.body())
        else:
            coeff = jet_to_json(jet)
        out.append({"monomial": _mask_to_indices(mask), "coeff": coeff})
    return out


def _mask_to_indices(mask):
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def element_from_json(obj, ctx, base, dp, dm, exact):
    jets = {}
    if not isinstance(obj, list):
        raise ConfigParseError("element must be a list of monomial terms")
    for term in obj:
        try:
            indices = term["monomial"]
            coeff = term["coeff"]
        except (KeyError, TypeError) as exc:
            raise ConfigParseError(f"bad element term: {exc}") from None
        mask = 0
        for i in indices:
            if not 0 <= int(i) < ctx.gens:
                raise ConfigParseError(f"generator index {i} out of range")
            if mask & (1 << int(i)):
                raise ConfigParseError(f"repeated generator {i}")
            mask |= 1 << int(i)
        if isinstance(coeff, dict):
            jets[mask] = jet_from_json(coeff, exact)
        else:
            val = scalar_from_json(coeff, exact)
            jets[mask] = (jet_from_grats(base, dp, dm, {0: val}) if exact
                          else Jet(base, dp, dm, None,
                                   {0: val} if val != 0 else {}))
    if not jets:
        return ge_zero(ctx, base, dp, dm, exact)
    return ge_from_jets(ctx, jets, dims=(dp, dm))


def vector_to_json(v: SuperVector):
    return {"components": [element_to_json(c) for c in v]}


def vector_from_json(obj, ctx, base, dp, dm, exact):
    comps = obj["components"] if isinstance(obj, dict) else obj
    return SuperVector([element_from_json(c, ctx, base, dp, dm, exact)
                        for c in comps])


def matrix_to_json(m: SuperMatrix):
    return {"rows": [[element_to_json(e) for e in r] for r in m.rows]}


def matrix_from_json(obj, ctx, base, dp, dm, exact):
    return SuperMatrix([[element_from_json(e, ctx, base, dp, dm, exact)
                         for e in r] for r in obj["rows"]])


# -- grassmann data terms: {"gens": [...], "poly": [...]} ----------------------

def grassmann_data_from_json(obj, ctx, base, dp, dm, exact, parity=None,
                             label="field"):
    """Terms of generator products times polynomials in x+."""
    if isinstance(obj, list) and obj and not isinstance(obj[0], dict):
        obj = [{"gens": [], "poly": obj}]  # bare polynomial: body content
    if obj == []:
        return ge_zero(ctx, base, dp, dm, exact)
    total = ge_zero(ctx, base, dp, dm, exact)
    for term in obj:
        try:
            gens = [int(i) for i in term.get("gens", [])]
            poly = term["poly"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigParseError(f"bad {label} term: {exc}") from None
        if parity is not None and len(gens) % 2 != parity:
            raise ConfigParseError(
                f"{label}: gens list {gens} has wrong parity")
        mask = 0
        for i in gens:
            if not 0 <= i < ctx.gens:
                raise ConfigParseError(f"{label}: generator {i} out of range")
            if mask & (1 << i):
                raise ConfigParseError(f"{label}: repeated generator {i}")
            mask |= 1 << i
        if sorted(gens) != gens:
            raise ConfigParseError(f"{label}: gens must be ascending")
        coeffs = [scalar_from_json(c, exact) for c in poly]
        jet = jet_poly(base, dp, dm, coeffs, exact=exact)
        total = total + ge_from_jets(ctx, {mask: jet}, dims=(dp, dm))
    return total


def param_from_json(obj, ctx, base, dp, dm, exact, label):
    try:
        fobj = obj.get("f", [])
        bobj = obj["b"]
    except (AttributeError, KeyError) as exc:
        raise ConfigParseError(f"parameter {label} needs 'f' and 'b'") from None
    f = grassmann_data_from_json(fobj, ctx, base, dp, dm, exact, parity=1,
                                 label=f"{label}.f")
    b = grassmann_data_from_json(bobj, ctx, base, dp, dm, exact, parity=0,
                                 label=f"{label}.b")
    return FermionicParameter(f=f, b=b)


def cp2_data_from_json(obj, ctx, base, dp, dm, exact):
    try:
        psi0b_list = obj["psi0b"]
        alpha_list = obj["alpha"]
        beta_list = obj["beta"]
        psi2f_list = obj["psi2f"]
    except (KeyError, TypeError) as exc:
        raise ConfigParseError(f"cp2 payload missing field: {exc}") from None
    if len(alpha_list) != 2 or len(beta_list) != 3:
        raise ConfigParseError("need 2 alpha and 3 beta parameters")
    psi0b = SuperVector([
        grassmann_data_from_json(c, ctx, base, dp, dm, exact, parity=0,
                                 label=f"psi0b[{i}]")
        for i, c in enumerate(psi0b_list)])
    psi2f = SuperVector([
        grassmann_data_from_json(c, ctx, base, dp, dm, exact, parity=1,
                                 label=f"psi2f[{i}]")
        for i, c in enumerate(psi2f_list)])
    alpha = tuple(param_from_json(a, ctx, base, dp, dm, exact, f"alpha{i}")
                  for i, a in enumerate(alpha_list))
    beta = tuple(param_from_json(b, ctx, base, dp, dm, exact, f"beta{i}")
                 for i, b in enumerate(beta_list))
    return CP2FreeData(psi0b=psi0b, alpha=alpha, beta=beta, psi2f=psi2f)


def diagonal_data_from_json(obj, ctx, base, dp, dm, exact):
    try:
        n = int(obj["n"])
        eta_obj = obj["eta"]
        psi0b_list = obj["psi0b"]
        last_list = obj["psi_last_f"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigParseError(f"diagonal payload missing field: {exc}") from None
    eta = param_from_json(eta_obj, ctx, base, dp, dm, exact, "eta")
    psi0b = SuperVector([
        grassmann_data_from_json(c, ctx, base, dp, dm, exact, parity=0,
                                 label=f"psi0b[{i}]")
        for i, c in enumerate(psi0b_list)])
    last = SuperVector([
        grassmann_data_from_json(c, ctx, base, dp, dm, exact, parity=1,
                                 label=f"psi_last_f[{i}]")
        for i, c in enumerate(last_list)])
    return DiagonalGammaData(n=n, eta=eta, psi0b=psi0b, psi_last_f=last)


# -- bundles --------------------------------------------------------------------

def bundle_to_json(b: SolutionBundle):
    return {
        "format": BUNDLE_FORMAT,
        "config": {
            "backend": "exact" if b.exact else "float",
            "n": b.n,
            "pairs": b.ctx.pairs,
            "orders": list(b.dims),
            "base_point": scalar_to_json(b.base),
            "seed": b.seed,
            "provenance": b.provenance,
            "tolerance": b.ctx.tol,
        },
        "psis": [vector_to_json(v) for v in b.psis],
        "zs": [vector_to_json(v) for v in b.zs],
        "norms": [element_to_json(e) for e in b.norms],
        "inv_norms": [element_to_json(e) for e in b.inv_norms],
        "projectors": [matrix_to_json(m) for m in b.projectors],
        "gamma_psi": [None] + [vector_to_json(v) for v in b.gamma_psi[1:]],
        "alpha_table": {str(j): [element_to_json(c) for c in row]
                        for j, row in sorted(b.alpha_table.items())},
    }


def bundle_from_json(obj, ctx=None):
    if obj.get("format") != BUNDLE_FORMAT:
        raise ConfigParseError(f"not a {BUNDLE_FORMAT} file")
    cfg = obj["config"]
    exact = cfg["backend"] == "exact"
    if ctx is None:
        ctx = AlgebraContext(pairs=int(cfg["pairs"]),
                             tol=float(cfg.get("tolerance", 1e-12)))
    base = scalar_from_json(cfg["base_point"], exact)
    dp, dm = (int(x) for x in cfg["orders"])

    def vec(o, ddp=dp, ddm=dm):
        return vector_from_json(o, ctx, base, ddp, ddm, exact)

    def elem(o):
        return element_from_json(o, ctx, base, dp, dm, exact)

    psis = [vec(v) for v in obj["psis"]]
    zs = [vector_from_json(v, ctx, base, dp, dm, exact) for v in obj["zs"]]
    norms = [elem(e) for e in obj["norms"]]
    inv_norms = [elem(e) for e in obj["inv_norms"]]
    projectors = [matrix_from_json(m, ctx, base, dp, dm, exact)
                  for m in obj["projectors"]]
    gamma = [None] + [vec(v) for v in obj["gamma_psi"][1:]]
    table = {int(j): [elem(c) for c in row]
             for j, row in obj["alpha_table"].items()}
    return SolutionBundle(
        n=int(cfg["n"]), psis=psis, zs=zs, norms=norms, inv_norms=inv_norms,
        projectors=projectors, gamma_psi=gamma, alpha_table=table,
        provenance=cfg.get("provenance", "external"),
        seed=cfg.get("seed"))


def dump_json(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=False)
        fh.write("\n")


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigParseError(f"cannot read {path}: {exc}") from None
