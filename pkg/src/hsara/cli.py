"""Command-line front door: generate instances, solve, benchmark, serve.

Exit codes: 0 ok, 1 usage error, 2 solver failure. All randomness funnels
through the --seed flag; bench derives per-run seeds as seed + run.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

from . import colgen, scheduler, stochastics
from .colgen import ColGenConfig, gap, run_colgen
from .instance import generate_instance, read_instance, write_instance
from .milp import KernelError
from .pricing import PricingError

SCHEMA_VERSION = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hsara", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a random instance as JSON")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)

    s = sub.add_parser("solve", help="solve an instance and schedule appointments")
    s.add_argument("--instance", required=True)
    s.add_argument("--method", choices=["is", "hm", "em"], default="hm")
    s.add_argument("--tmax", type=float, default=None,
                   help="pricing time budget in seconds (default: unlimited)")
    s.add_argument("--alpha", type=float, default=0.5)
    s.add_argument("--replicas", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default=None)

    b = sub.add_parser("bench", help="benchmark methods over random instances")
    b.add_argument("--sizes", required=True, help="comma list, e.g. 10,20,30")
    b.add_argument("--runs", type=int, default=10)
    b.add_argument("--methods", default="is,hm,em", help="comma list of is,hm,em")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", required=True, help="CSV output path")

    v = sub.add_parser("serve", help="run the HTTP service")
    v.add_argument("--port", type=int, default=8000)
    v.add_argument("--data-dir", default="./hsara-data")
    v.add_argument("--pool-size", type=int, default=2)
    v.add_argument("--static", default=None,
                   help="directory with the built dashboard; served at /ui")
    return p


def _cmd_generate(args) -> int:
    instance = generate_instance(args.n, args.seed)
    write_instance(instance, args.out)
    print(f"wrote n={args.n} seed={args.seed} instance to {args.out}")
    return 0


def _solve_document(instance, method, t_max, alpha, replicas, seed) -> dict:
    cfg = ColGenConfig(method=method,
                       t_max=float("inf") if t_max is None else t_max)
    solution = run_colgen(instance, cfg)
    model = stochastics.calibrate(instance)
    schedules = scheduler.schedule_solution(
        instance, model, solution,
        scheduler.ScheduleConfig(alpha=alpha, replicas=replicas, seed=seed),
    )
    breakdown = scheduler.evaluate_costs(
        instance, model, solution, schedules, eval_replicas=replicas, seed=seed
    )
    doc = {"schema_version": SCHEMA_VERSION}
    doc.update(solution.to_dict())
    doc["schedules"] = [s.to_dict(i) for i, s in enumerate(schedules)]
    doc["cost_breakdown"] = breakdown.to_dict()
    doc["seed"] = seed
    return doc


def _cmd_solve(args) -> int:
    instance = read_instance(args.instance)
    doc = _solve_document(instance, args.method, args.tmax, args.alpha,
                          args.replicas, args.seed)
    if args.out:
        Path(args.out).write_text(json.dumps(doc))
    print(f"method={args.method} objective={doc['objective']:.2f} "
          f"routes={len(doc['routes'])} wall={doc['wall_time_s']:.2f}s "
          f"simulated_total={doc['cost_breakdown']['total']:.2f}")
    return 0


def _cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s]
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    for m in methods:
        if m not in colgen.METHODS:
            print(f"error: unknown method {m!r}", file=sys.stderr)
            return 1
    rows = []
    cpu = {}
    print(f"bench base seed {args.seed}")
    for n in sizes:
        for run in range(args.runs):
            seed = args.seed + run
            instance = generate_instance(n, seed=seed)
            results = {}
            for method in methods:
                t0 = time.perf_counter()
                sol = run_colgen(instance, ColGenConfig(method=method))
                results[method] = (sol, time.perf_counter() - t0)
            em_lb = None
            if "em" in results and results["em"][0].lower_bound:
                em_lb = results["em"][0].lower_bound
            for method in methods:
                sol, secs = results[method]
                gap_pct = gap(sol.objective, em_lb) if em_lb else None
                rows.append({
                    "n": n, "method": method, "run": run,
                    "objective": round(sol.objective, 6),
                    "lower_bound": round(em_lb, 6) if em_lb else "",
                    "gap_percent": round(gap_pct, 4) if gap_pct is not None else "",
                    "cpu_seconds": round(secs, 6),
                    "routes": len(sol.routes),
                })
                cpu.setdefault((n, method), []).append(secs)
        if "em" in methods and "hm" in methods:
            speedups = [e / h for e, h in zip(cpu[(n, "em")], cpu[(n, "hm")])]
            print(f"n={n}: avg speedup EM/HM = {sum(speedups) / len(speedups):.1f}")
    with open(args.out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=[
            "n", "method", "run", "objective", "lower_bound", "gap_percent",
            "cpu_seconds", "routes",
        ])
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(args.data_dir, pool_size=args.pool_size,
                     static_dir=args.static)
    uvicorn.run(app, host="127.0.0.1", port=args.port)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {
        "generate": _cmd_generate,
        "solve": _cmd_solve,
        "bench": _cmd_bench,
        "serve": _cmd_serve,
    }[args.command]
    try:
        return handler(args)
    except (KernelError, PricingError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
