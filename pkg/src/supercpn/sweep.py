"""Seeded pipeline runners with optional process fan-out.

One task = one (seed, base point) pipeline: draw free data, construct,
verify, return the report dict.  Tasks are independent pure computations;
`run_many` fans them out over processes and returns results in task order,
so merged reports are deterministic for a fixed task list.
"""

from __future__ import annotations

import multiprocessing
import os
import random

from .cp2 import build_cp2_solution
from .cpn import build_diagonal_solution
from .errors import LinearDependence, ZeroBody
from .grassmann import AlgebraContext
from .sampling import (MAX_TRIES, rand_base_point, rand_cp2_free_data,
                       rand_diagonal_data)
from .verifier import verify_all

DEFAULT_CHECKS = None  # verify everything


def _rng_for(task):
    return random.Random(int(task["seed"]) * 1009 + task.get("point", 0))


def default_jobs():
    env = os.environ.get("SUPERCPN_JOBS")
    if env:
        return max(1, int(env))
    return max(1, min(os.cpu_count() or 1, 8))


def run_cp2_task(task):
    """Build one random bundle and verify it.

    task keys: seed, point, pairs, orders [dp, dm], exact, checks, degree,
    tolerance, perturb (optional negative-control size).

    The free-data stream depends on the seed only; the base-point stream
    also depends on the point index, so one draw is probed at several
    generic points.
    """
    data_rng = random.Random(1000003 * int(task["seed"]) + 17)
    point_rng = _rng_for(task)
    exact = task.get("exact", True)
    ctx = AlgebraContext(pairs=task.get("pairs", 3),
                         tol=task.get("ctx_tol", 1e-12))
    dp, dm = task.get("orders", (7, 7))
    degree = task.get("degree", 3)

    last_exc = None
    bundle = None
    for _ in range(MAX_TRIES):
        base = rand_base_point(point_rng, exact=exact)
        data = rand_cp2_free_data(data_rng, ctx, base, dp, dm, exact=exact,
                                  degree=degree)
        try:
            bundle = build_cp2_solution(data, seed=task["seed"])
            break
        except (LinearDependence, ZeroBody) as exc:
            last_exc = exc
    if bundle is None:
        raise LinearDependence(f"no non-degenerate draw: {last_exc}")
    perturb = task.get("perturb")
    if perturb:
        bundle = bundle.perturbed(perturb)
    report = verify_all(bundle, checks=task.get("checks", DEFAULT_CHECKS),
                        tol=task.get("tolerance"),
                        config_extra={"point": task.get("point", 0)})
    return report.to_dict()


def run_diagonal_task(task):
    """Same shape for the diagonal-coefficient family; extra key: n."""
    rng = _rng_for(task)
    exact = task.get("exact", True)
    n = task.get("n", 4)
    ctx = AlgebraContext(pairs=task.get("pairs", 2),
                         tol=task.get("ctx_tol", 1e-12))
    dp, dm = task.get("orders", (n + 4, n + 4))
    last_exc = None
    bundle = None
    for _ in range(MAX_TRIES):
        base = rand_base_point(rng, exact=exact)
        data = rand_diagonal_data(rng, ctx, base, dp, dm, n, exact=exact)
        try:
            bundle = build_diagonal_solution(data, seed=task["seed"])
            break
        except (LinearDependence, ZeroBody) as exc:
            last_exc = exc
    if bundle is None:
        raise LinearDependence(f"no non-degenerate draw: {last_exc}")
    perturb = task.get("perturb")
    if perturb:
        bundle = bundle.perturbed(perturb)
    report = verify_all(bundle, checks=task.get("checks", DEFAULT_CHECKS),
                        tol=task.get("tolerance"),
                        config_extra={"point": task.get("point", 0)})
    return report.to_dict()


_WORKERS = {"cp2": run_cp2_task, "diagonal": run_diagonal_task}


def _dispatch(task):
    return _WORKERS[task["kind"]](task)


def run_many(tasks, jobs=None):
    """Map tasks to report dicts, in task order."""
    tasks = list(tasks)
    jobs = default_jobs() if jobs is None else max(1, jobs)
    if jobs <= 1 or len(tasks) <= 1:
        return [_dispatch(t) for t in tasks]
    try:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(processes=min(jobs, len(tasks))) as pool:
            return pool.map(_dispatch, tasks, chunksize=1)
    except (OSError, ValueError):  # no fork available: degrade gracefully
        return [_dispatch(t) for t in tasks]


def merged_report(reports):
    return {"runs": reports,
            "pass": all(r["pass"] for r in reports),
            "count": len(reports)}
