"""Acceptance suite: one test per release criterion, one PASS/FAIL line each.

Run with `pytest tests/test_acceptance.py -s` so the lines stream (pytest's
capture otherwise shows them only for failing criteria). Budgets are asserted
with the criteria; the whole module takes several minutes because of the
exact-method runs.
"""

import time

import numpy as np
import pytest

from hsara.colgen import ColGenConfig, gap, run_colgen, sar_oracle
from hsara.instance import CostParams, Instance, generate_instance
from hsara.pricing import exact_price, gcs_row_holds, path_reduced_cost
from hsara.scheduler import (ScheduleConfig, evaluate_costs, schedule_route,
                             schedule_solution, scheduled_return_time)
from hsara.split import route_cost, split
from hsara.stochastics import (CalibratedModel, calibrate,
                               exponential_from_mean, lognormal_from_moments,
                               variance_from_mean)
from hsara.tsp import approx_tsp_tour, minimum_spanning_tree, tour_from_order

from oracles import (brute_force_tsp_cost, enumerate_contiguous_splits,
                     enumerate_elementary_paths)


def report(name, ok, detail=""):
    line = f"{'PASS' if ok else 'FAIL'} {name}"
    if detail:
        line += f" ({detail})"
    print(line, flush=True)
    assert ok, line


# -- shared expensive runs ----------------------------------------------------------

@pytest.fixture(scope="module")
def small_em_runs():
    """20 instances, n in {4..7}: EM to convergence plus HM/IS and the oracle."""
    out = []
    t0 = time.perf_counter()
    for i in range(20):
        n = 4 + i % 4
        inst = generate_instance(n, seed=1000 + i)
        em = run_colgen(inst, ColGenConfig(method="em"))
        hm = run_colgen(inst, ColGenConfig(method="hm"))
        iss = run_colgen(inst, ColGenConfig(method="is"))
        oracle = sar_oracle(inst)
        out.append((inst, em, hm, iss, oracle))
    return out, time.perf_counter() - t0


@pytest.fixture(scope="module")
def n10_runs():
    """10 instances at n=10: EM (unbounded), HM, IS with wall times."""
    out = []
    t0 = time.perf_counter()
    for seed in range(10):
        inst = generate_instance(10, seed=seed)
        em = run_colgen(inst, ColGenConfig(method="em"))
        hm = run_colgen(inst, ColGenConfig(method="hm"))
        iss = run_colgen(inst, ColGenConfig(method="is"))
        out.append((inst, em, hm, iss))
    return out, time.perf_counter() - t0


# -- criteria -----------------------------------------------------------------------

def test_oracle_equivalence(small_em_runs):
    runs, elapsed = small_em_runs
    mismatches = []
    for inst, em, _, _, oracle in runs:
        if abs(em.objective - oracle.objective) > 1e-6:
            mismatches.append(
                f"n={inst.n}: EM={em.objective:.4f} oracle={oracle.objective:.4f}"
            )
    detail = f"{20 - len(mismatches)}/20 equal, {elapsed:.0f}s"
    if mismatches:
        detail += "; " + "; ".join(mismatches[:4])
        detail += ("; known limitation: a column pool generated without "
                   "branch-and-price need not contain the optimal partition")
    report("oracle equivalence (EM == SAR oracle, n 4..7)",
           not mismatches and elapsed <= 120.0, detail)


def test_bound_ordering(small_em_runs, n10_runs):
    small, _ = small_em_runs
    big, _ = n10_runs
    triples = [(em, hm, iss) for _, em, hm, iss, _ in small]
    triples += [(em, hm, iss) for _, em, hm, iss in big]
    ok1 = all(em.lower_bound <= em.objective + 1e-9 for em, _, _ in triples)
    ok2 = all(em.objective <= hm.objective + 1e-6 for em, hm, _ in triples)
    ok3 = all(hm.objective <= iss.objective + 1e-6 for _, hm, iss in triples)
    report("bound ordering (EM-LP <= EM <= HM <= IS)", ok1 and ok2 and ok3,
           f"{len(triples)} instances, lp<=ip {ok1}, em<=hm {ok2}, hm<=is {ok3}")


def test_scaled_table2_gaps(n10_runs):
    runs, elapsed = n10_runs
    gaps_is = [gap(iss.objective, em.lower_bound) for _, em, _, iss in runs]
    gaps_hm = [gap(hm.objective, em.lower_bound) for _, em, hm, _ in runs]
    mean_is = float(np.mean(gaps_is))
    mean_hm = float(np.mean(gaps_hm))
    ok = 4.0 <= mean_is <= 16.0 and mean_hm <= mean_is and elapsed <= 600.0
    report("scaled reproduction at n=10",
           ok, f"mean gap(IS)={mean_is:.2f}%, mean gap(HM)={mean_hm:.2f}%, "
               f"{elapsed:.0f}s")


def test_speedup_direction(n10_runs):
    runs, _ = n10_runs
    ratios = [em.wall_time_s / hm.wall_time_s for _, em, hm, _ in runs]
    med = float(np.median(ratios))
    report("speedup direction (median EM/HM cpu >= 10 at n=10)", med >= 10.0,
           f"median {med:.0f}x")


def test_two_approximation():
    bad = 0
    for i in range(50):
        n = 3 + i % 6  # 3..8
        inst = generate_instance(n, seed=2000 + i)
        tour = approx_tsp_tour(inst)
        best = brute_force_tsp_cost(inst.costs.ct * inst.travel_mean)
        if tour.tour_cost > 2 * best + 1e-9:
            bad += 1
    mst_ok = True
    for n in (20, 40, 60):
        inst = generate_instance(n, seed=3000 + n)
        tour = approx_tsp_tour(inst)
        tree = minimum_spanning_tree(inst)
        mst_ok &= tour.tour_cost <= 2 * tree.weight + 1e-9
    report("2-approximation of the giant tour", bad == 0 and mst_ok,
           f"50 brute-force checks, {bad} violations; 2xMST bound up to n=60: {mst_ok}")


def test_split_optimality():
    rng = np.random.default_rng(4000)
    bad = 0
    for i in range(50):
        n = 4 + i % 9  # 4..12
        inst = generate_instance(n, seed=4000 + i)
        order = [0] + list(rng.permutation(np.arange(1, n + 1)))
        tour = tour_from_order(inst, order)
        got = sum(r.cost for r in split(inst, tour))
        want = min(enumerate_contiguous_splits(inst, order[1:]))
        if abs(got - want) > 1e-9:
            bad += 1
    report("split optimality vs exhaustive partitions", bad == 0,
           f"50 random tours, {bad} mismatches")


def test_pricing_exactness():
    rng = np.random.default_rng(5000)
    bad = 0
    cut_violations = 0
    for i in range(50):
        n = 3 + i % 5  # 3..7
        inst = generate_instance(n, seed=5000 + i)
        duals = rng.uniform(0.0, 260.0, size=n)
        diag = {}
        got = exact_price(inst, duals, diagnostics=diag)
        paths = enumerate_elementary_paths(inst, duals)
        best_rc, _ = min(paths)
        if best_rc < -1e-6:
            if got is None or abs(got.reduced_cost - best_rc) > 1e-6:
                bad += 1
        elif got is not None:
            bad += 1
        for S, u in diag["cuts"]:
            for _, path in paths:
                if not gcs_row_holds(S, u, path, inst.n):
                    cut_violations += 1
    report("pricing exactness and cut validity", bad == 0 and cut_violations == 0,
           f"50 pairs, {bad} mismatches, {cut_violations} cut violations")


def test_moment_calibration():
    ok = True
    rng = np.random.default_rng(6000)
    for _ in range(200):
        mean = float(rng.uniform(0.5, 200.0))
        var = float(rng.uniform(0.0, 400.0))
        mu, sigma = lognormal_from_moments(mean, var)
        back_mean = np.exp(mu + sigma**2 / 2)
        back_var = np.expm1(sigma**2) * np.exp(2 * mu + sigma**2)
        ok &= abs(back_mean - mean) <= 1e-9 * mean
        ok &= abs(back_var - var) <= 1e-9 * max(var, 1.0)
    mu, sigma = lognormal_from_moments(10.0, 4.0)
    draws = np.exp(mu + sigma * rng.standard_normal(1_000_000))
    ok &= abs(draws.mean() - 10.0) <= 0.1
    ok &= abs(draws.var() - 4.0) <= 0.04
    ok &= exponential_from_mean(45.0) == 1.0 / 45.0
    v10 = variance_from_mean(10.0)
    ok &= abs(v10 - 89.537) <= 1e-3
    report("moment calibration", ok,
           f"round-trip 1e-9 on 200 draws; empirical moments ok; v(10)={v10:.5f}")


def test_scheduler_reliability():
    t0 = time.perf_counter()
    inst = generate_instance(5, seed=7000)
    inst = Instance(n=inst.n, coords=inst.coords, travel_mean=inst.travel_mean,
                    service_mean=inst.service_mean, cancel_prob=np.zeros(inst.n),
                    horizon_L=inst.horizon_L, costs=inst.costs)
    model = calibrate(inst)
    route = route_cost(inst, [1, 2, 3, 4, 5])

    class Sol:
        routes = [route]

    worst = 0.0
    for alpha in (0.25, 0.5, 0.9):
        cfg = ScheduleConfig(alpha=alpha, replicas=2000, seed=70)
        sched = schedule_route(inst, model, route, cfg)
        evaluate_costs(inst, model, Sol(), [sched], eval_replicas=2000, seed=71)
        for c, rate in sched.on_time_rate.items():
            worst = max(worst, abs(rate - alpha))
    elapsed = time.perf_counter() - t0
    report("scheduler reliability (|on-time - alpha| <= 0.04)",
           worst <= 0.04 and elapsed <= 60.0,
           f"worst dev {worst:.3f}, {elapsed:.0f}s")


def test_cancellation_semantics():
    coords = [(0.0, 0.0), (8.0, 0.0), (8.0, 8.0), (0.0, 8.0), (4.0, 12.0)]
    inst = Instance.from_coords(coords, [35.0] * 4, [0.0, 1.0, 0.0, 0.0],
                                250.0, CostParams())
    model = calibrate(inst)
    route = route_cost(inst, [1, 2, 3, 4])

    class Sol:
        routes = [route]

    arcs = set()
    cfg = ScheduleConfig(alpha=0.5, replicas=300, seed=9)
    sched = schedule_route(inst, model, route, cfg, arc_log=arcs)
    evaluate_costs(inst, model, Sol(), [sched], eval_replicas=300, seed=10,
                   arc_log=arcs)
    no_arcs_into_canceled = not any(head == 2 for _, head in arcs)
    served = {1, 3, 4}
    all_served_scheduled = served <= set(sched.appointments)
    report("cancellation semantics", no_arcs_into_canceled and all_served_scheduled,
           f"arcs into canceled: {not no_arcs_into_canceled}; "
           f"served scheduled: {all_served_scheduled}")


def test_sensitivity_directions():
    inst = generate_instance(20, seed=8000)
    base = run_colgen(inst, ColGenConfig(method="hm"))
    dear = inst.with_overrides(costs=CostParams(cf=1000.0, ct=1.0, co=2.0))
    config_a = run_colgen(dear, ColGenConfig(method="hm"))
    routes_ok = len(config_a.routes) <= len(base.routes)

    model = calibrate(inst)
    returns = {}
    for label, alpha in (("X", 0.95), ("Z", 0.05)):
        cfg = ScheduleConfig(alpha=alpha, replicas=400, seed=80)
        schedules = schedule_solution(inst, model, base, cfg)
        returns[label] = np.mean([scheduled_return_time(inst, s)
                                  for s in schedules])
    alpha_ok = returns["X"] >= returns["Z"]
    report("sensitivity directions (A fewer routes; X returns later than Z)",
           routes_ok and alpha_ok,
           f"routes {len(config_a.routes)} vs {len(base.routes)}; "
           f"returns X={returns['X']:.1f} Z={returns['Z']:.1f}")
