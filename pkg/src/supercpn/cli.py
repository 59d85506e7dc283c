"""Command-line entry point: construct bundles, verify them, run the
built-in demos, and sweep seeds.

Exit codes: 0 success (verify: overall pass), 1 configuration error,
2 construction error (diagnostic names the failed precondition, e.g.
"ZeroBody: alpha1.b"), 3 verification failed.
"""

from __future__ import annotations

import argparse
import math
import random
import sys

from .cp2 import (FermionicParameter, bosonic_tower,
                  build_cp2_solution, build_cp2_special)
from .cpn import build_diagonal_solution
from .errors import (ConfigParseError, LinearDependence, SuperCPNError,
                     UnknownCase, ZeroBody)
from .grassmann import AlgebraContext
from .io import (bundle_from_json, bundle_to_json, cp2_data_from_json,
                 diagonal_data_from_json, dump_json, load_json,
                 scalar_from_json)
from .sampling import (MAX_TRIES, rand_base_point, rand_cp2_free_data,
                       rand_diagonal_data)
from .scalars import GRat
from .superfields import SuperVector
from .sweep import merged_report, run_many
from .verifier import CHECK_GROUPS, holomorphy_type, verify_all

CONSTRUCTION_ERRORS = (SuperCPNError,)


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigParseError as exc:
        print(f"ConfigParseError: {exc}", file=sys.stderr)
        return 1
    except UnknownCase as exc:
        print(f"UnknownCase: {exc}", file=sys.stderr)
        return 1
    except CONSTRUCTION_ERRORS as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def _build_parser():
    p = argparse.ArgumentParser(prog="supercpn", description=__doc__)
    sub = p.add_subparsers(required=True)

    c = sub.add_parser("construct", help="build a solution bundle from a config")
    c.add_argument("--config", required=True)
    c.add_argument("--out", required=True)
    _common_overrides(c)
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", help="verify a bundle or a config")
    v.add_argument("--config")
    v.add_argument("--bundle")
    v.add_argument("--report")
    v.add_argument("--perturb", type=float, default=None,
                   help="negative control: relative perturbation of psi_1")
    v.add_argument("--checks", default=None,
                   help="comma-separated subset of: " + ",".join(CHECK_GROUPS))
    _common_overrides(v)
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("demo", help="run a built-in case and print a summary")
    d.add_argument("--case", required=True)
    d.add_argument("--n", type=int, default=None)
    d.add_argument("--report")
    _common_overrides(d)
    d.set_defaults(func=cmd_demo)

    s = sub.add_parser("sweep", help="verify many seeded random draws")
    s.add_argument("--kind", choices=("cp2", "diagonal"), default="cp2")
    s.add_argument("--seeds", default="0:10", help="range A:B or list a,b,c")
    s.add_argument("--points", type=int, default=1,
                   help="base points per seed")
    s.add_argument("--jobs", type=int, default=None)
    s.add_argument("--report")
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--checks", default=None)
    _common_overrides(s)
    s.set_defaults(func=cmd_sweep)
    return p


def _common_overrides(sp):
    sp.add_argument("--backend", choices=("exact", "float"), default=None)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--jet-order", default=None,
                    help="orders as 'd' or 'd+,d-'")
    sp.add_argument("--base-point", default=None,
                    help="'re,im' scalar literals, or 'random'")
    sp.add_argument("--tolerance", type=float, default=None)


# -- configuration ---------------------------------------------------------------

def _apply_overrides(cfg, args):
    if getattr(args, "backend", None):
        cfg["backend"] = args.backend
    if getattr(args, "seed", None) is not None:
        cfg["seed"] = args.seed
    if getattr(args, "tolerance", None) is not None:
        cfg["tolerance"] = args.tolerance
    if getattr(args, "jet_order", None):
        parts = [s.strip() for s in args.jet_order.split(",")]
        try:
            if len(parts) == 1:
                dp = dm = int(parts[0])
            else:
                dp, dm = int(parts[0]), int(parts[1])
        except ValueError:
            raise ConfigParseError(f"bad --jet-order {args.jet_order!r}")
        cfg.setdefault("jet", {})
        cfg["jet"]["order_plus"] = dp
        cfg["jet"]["order_minus"] = dm
    if getattr(args, "base_point", None):
        if args.base_point == "random":
            cfg["base_point"] = "random"
        else:
            parts = args.base_point.split(",")
            if len(parts) != 2:
                raise ConfigParseError("--base-point needs 're,im' or 'random'")
            cfg["base_point"] = {"re": parts[0].strip(), "im": parts[1].strip()}
    if getattr(args, "checks", None):
        cfg["checks"] = [s.strip() for s in args.checks.split(",") if s.strip()]
    return cfg


def _parse_run_config(cfg):
    try:
        n = int(cfg.get("model", {}).get("n", 3))
        backend = cfg.get("backend", "exact")
        pairs = int(cfg.get("algebra", {}).get("pairs", 3))
        jet = cfg.get("jet", {})
        dp = int(jet.get("order_plus", n + 3))
        dm = int(jet.get("order_minus", n + 3))
        seed = cfg.get("seed", 0)
        tol = float(cfg.get("tolerance", 1e-9))
    except (TypeError, ValueError) as exc:
        raise ConfigParseError(f"bad run configuration: {exc}") from None
    if backend not in ("exact", "float"):
        raise ConfigParseError(f"unknown backend {backend!r}")
    if n < 2:
        raise ConfigParseError("model size n must be >= 2")
    if min(dp, dm) < n + 3 and not cfg.get("allow_low_orders", False):
        raise ConfigParseError(
            f"jet orders ({dp},{dm}) below n+3 = {n + 3}; "
            "set allow_low_orders to override")
    return {"n": n, "backend": backend, "pairs": pairs, "dp": dp, "dm": dm,
            "seed": seed, "tolerance": tol,
            "checks": cfg.get("checks"),
            "base_point": cfg.get("base_point", "random"),
            "construction": cfg.get("construction",
                                    {"kind": "random-cp2"})}


def _resolve_base(point, exact, rng):
    if point == "random":
        return rand_base_point(rng, exact=exact)
    try:
        re_lit, im_lit = point["re"], point["im"]
    except (TypeError, KeyError):
        raise ConfigParseError("base_point must be 'random' or {re, im}")
    re_s = scalar_from_json(re_lit, exact)
    im_s = scalar_from_json(im_lit, exact)
    if exact:
        if re_s.im or im_s.im:
            raise ConfigParseError("base_point parts must be real literals")
        return GRat(re_s.re, im_s.re)
    return complex(re_s.real if isinstance(re_s, complex) else re_s,
                   im_s.real if isinstance(im_s, complex) else im_s)


def construct_from_config(cfg):
    """Build the bundle a run configuration describes."""
    rc = _parse_run_config(cfg)
    exact = rc["backend"] == "exact"
    ctx = AlgebraContext(pairs=rc["pairs"],
                         tol=cfg.get("float_zero_threshold", 1e-12))
    rng = random.Random(rc["seed"])
    payload = rc["construction"]
    kind = payload.get("kind", "random-cp2")
    dp, dm = rc["dp"], rc["dm"]
    random_point = rc["base_point"] == "random"
    tries = MAX_TRIES if random_point else 1
    last = None
    for _ in range(tries):
        base = _resolve_base(rc["base_point"], exact, rng)
        try:
            if kind == "cp2":
                data = cp2_data_from_json(payload, ctx, base, dp, dm, exact)
                return build_cp2_solution(data, seed=rc["seed"]), rc
            if kind == "cp2-special":
                data = cp2_data_from_json(payload, ctx, base, dp, dm, exact)
                bundle, _checks = build_cp2_special(data, seed=rc["seed"])
                return bundle, rc
            if kind == "cpn-diagonal":
                data = diagonal_data_from_json(payload, ctx, base, dp, dm,
                                               exact)
                return build_diagonal_solution(data, seed=rc["seed"]), rc
            if kind == "random-cp2":
                data = rand_cp2_free_data(
                    rng, ctx, base, dp, dm, exact=exact,
                    degree=int(payload.get("degree", 3)))
                return build_cp2_solution(data, seed=rc["seed"]), rc
            if kind == "random-diagonal":
                data = rand_diagonal_data(rng, ctx, base, dp, dm,
                                          int(payload.get("n", rc["n"])),
                                          exact=exact)
                return build_diagonal_solution(data, seed=rc["seed"]), rc
            raise ConfigParseError(f"unknown construction kind {kind!r}")
        except (ZeroBody, LinearDependence) as exc:
            last = exc
            if not random_point:
                raise
    raise LinearDependence(f"no non-degenerate base point found: {last}")


# -- commands ---------------------------------------------------------------------

def cmd_construct(args):
    cfg = _apply_overrides(load_json(args.config), args)
    bundle, _rc = construct_from_config(cfg)
    dump_json(bundle_to_json(bundle), args.out)
    print(f"bundle written to {args.out}")
    return 0


def cmd_verify(args):
    if not args.bundle and not args.config:
        raise ConfigParseError("verify needs --bundle or --config")
    checks = None
    if args.checks:
        checks = [s.strip() for s in args.checks.split(",") if s.strip()]
    if args.bundle:
        bundle = bundle_from_json(load_json(args.bundle))
        tol = args.tolerance
    else:
        cfg = _apply_overrides(load_json(args.config), args)
        bundle, rc = construct_from_config(cfg)
        checks = checks or rc["checks"]
        tol = args.tolerance if args.tolerance is not None else rc["tolerance"]
    if args.perturb:
        bundle = bundle.perturbed(args.perturb)
    report = verify_all(bundle, checks=checks, tol=tol)
    if args.report:
        dump_json(report.to_dict(), args.report)
        print(f"report written to {args.report}")
    _print_report(report)
    return 0 if report.passed else 3


def _print_report(report, limit=None):
    rows = report.checks if limit is None else report.checks[:limit]
    width = max(len(c["name"]) for c in rows) if rows else 10
    print(f"{'check':<{width}}  {'norm':>12}  result")
    for c in rows:
        status = "pass" if c["pass"] else "FAIL"
        print(f"{c['name']:<{width}}  {c['norm']:>12.3e}  {status}")
    if report.skipped:
        print("skipped groups:", ", ".join(report.skipped))
    print("overall:", "pass" if report.passed else "FAIL")


DEMO_SEED = 2024


def cmd_demo(args):
    case = args.case
    exact = (args.backend or "exact") == "exact"
    seed = args.seed if args.seed is not None else DEMO_SEED
    rng = random.Random(seed)
    tol = args.tolerance

    if case == "cp2-general":
        ctx = AlgebraContext(pairs=3)
        bundle = _demo_retry(lambda rng=rng: build_cp2_solution(
            rand_cp2_free_data(rng, ctx, rand_base_point(rng, exact), 7, 7,
                               exact=exact), seed=seed))
        report = verify_all(bundle, tol=tol)
        print(f"cp2-general draw (seed {seed}), base {bundle.base}:")
        _print_report(report)
        return 0 if report.passed else 3

    if case == "cp2-special":
        ctx = AlgebraContext(pairs=3)
        for _ in range(MAX_TRIES):
            base = rand_base_point(rng, exact)
            data = rand_cp2_free_data(rng, ctx, base, 7, 7, exact=exact)
            try:
                bundle, crosschecks = build_cp2_special(data, seed=seed)
                break
            except (ZeroBody, LinearDependence):
                continue
        else:
            raise LinearDependence("no non-degenerate special draw")
        report = verify_all(bundle, tol=tol)
        print(f"cp2-special (alpha0 = beta0 = beta1 = 0), seed {seed}:")
        print("closed-form cross-checks (nonzero = flagged discrepancy):")
        for name, norm in crosschecks.items():
            flag = "matches" if norm == 0.0 else f"DISCREPANCY {norm:.3e}"
            print(f"  {name:<22} {flag}")
        print("A0 = 0 and A1 = -i/alpha1^b reproduced exactly:"
              f" {crosschecks['A0_zero'] == 0.0 and crosschecks['A1_closed_form'] == 0.0}")
        _print_report(report)
        ok = report.passed and all(v == 0.0 for v in crosschecks.values())
        return 0 if ok else 3

    if case == "cpn-diagonal":
        n = args.n or 4
        ctx = AlgebraContext(pairs=2)
        orders = (n + 4, n + 4)
        bundle = _demo_retry(lambda rng=rng: build_diagonal_solution(
            rand_diagonal_data(rng, ctx, rand_base_point(rng, exact),
                               *orders, n, exact=exact), seed=seed))
        report = verify_all(bundle, tol=tol)
        print(f"cpn-diagonal n={n} (seed {seed}):")
        for j in range(n):
            print(f"  projector {j}: {holomorphy_type(bundle, j)}")
        _print_report(report)
        return 0 if report.passed else 3

    if case == "bosonic-veronese":
        n = args.n or 3
        return _demo_veronese(n, exact, seed, tol)

    raise UnknownCase(case)


def _demo_retry(build):
    for _ in range(MAX_TRIES):
        try:
            return build()
        except (ZeroBody, LinearDependence):
            continue
    raise LinearDependence("no non-degenerate draw")


def _demo_veronese(n, exact, seed, tol):
    from .grassmann import ge_from_jets
    from .jets import jet_poly
    rng = random.Random(seed)
    ctx = AlgebraContext(pairs=1)
    base = rand_base_point(rng, exact)
    orders = (n + 4, n + 4)
    comps = []
    if exact:
        print("exact backend: rational-coefficient tower "
              "(the sqrt-normalised curve needs the float backend)")
        coeffs = [[GRat(1) if k == m else GRat(0) for k in range(m + 1)]
                  for m in range(n)]
    else:
        coeffs = [[complex(math.sqrt(math.comb(n - 1, m))) if k == m else 0j
                   for k in range(m + 1)]
                  for m in range(n)]
    for m in range(n):
        comps.append(ge_from_jets(
            ctx, {0: jet_poly(base, *orders, coeffs[m], exact=exact)},
            dims=orders))
    u = SuperVector(comps)
    # embed the tower as the trivial diagonal bundle: eta = i theta+ (eta_b = 1)
    from .grassmann import ge_constant, ge_zero
    eta = FermionicParameter(ge_zero(ctx, base, *orders, exact),
                             ge_constant(ctx, base, *orders,
                                         GRat(1) if exact else 1.0, exact))
    zero_last = SuperVector([ge_zero(ctx, base, *orders, exact)
                             for _ in range(n)])
    from .cpn import DiagonalGammaData
    bundle = build_diagonal_solution(
        DiagonalGammaData(n=n, eta=eta, psi0b=u, psi_last_f=zero_last),
        seed=seed)
    report = verify_all(bundle, tol=tol)
    oracle = bosonic_tower(u, n)
    agree = all(
        (p - q.truncated(*p.dims)).is_zero(0.0 if exact else 1e-9)
        for p, q in zip(bundle.projectors, oracle.projectors))
    print(f"bosonic-veronese n={n} backend={'exact' if exact else 'float'}:")
    print(f"  fermion-free bundle matches the bosonic tower oracle: {agree}")
    _print_report(report)
    return 0 if (report.passed and agree) else 3


def cmd_sweep(args):
    if ":" in args.seeds:
        a, b = args.seeds.split(":")
        seeds = list(range(int(a), int(b)))
    else:
        seeds = [int(s) for s in args.seeds.split(",") if s.strip()]
    if not seeds:
        raise ConfigParseError("empty seed list")
    checks = None
    if args.checks:
        checks = [s.strip() for s in args.checks.split(",") if s.strip()]
    exact = (args.backend or "exact") == "exact"
    orders = None
    if args.jet_order:
        parts = args.jet_order.split(",")
        orders = ((int(parts[0]), int(parts[0])) if len(parts) == 1
                  else (int(parts[0]), int(parts[1])))
    tasks = []
    for seed in seeds:
        for point in range(max(1, args.points)):
            task = {"kind": args.kind, "seed": seed, "point": point,
                    "exact": exact, "checks": checks}
            if args.kind == "diagonal":
                task["n"] = args.n or 4
                task["pairs"] = 2
                task["orders"] = orders or (task["n"] + 4, task["n"] + 4)
            else:
                task["pairs"] = 3
                task["orders"] = orders or (7, 7)
            if args.tolerance is not None:
                task["tolerance"] = args.tolerance
            tasks.append(task)
    reports = run_many(tasks, jobs=args.jobs)
    merged = merged_report(reports)
    if args.report:
        dump_json(merged, args.report)
        print(f"merged report written to {args.report}")
    npass = sum(1 for r in reports if r["pass"])
    print(f"sweep: {npass}/{len(reports)} runs pass")
    return 0 if merged["pass"] else 3


if __name__ == "__main__":
    sys.exit(main())
