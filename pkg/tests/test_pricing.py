import numpy as np
import pytest

from hsara.instance import CostParams, Instance, generate_instance
from hsara.pricing import (PricingState, arc_weights, exact_price, gcs_row_holds,
                           heuristic_price, path_reduced_cost)

from oracles import enumerate_elementary_paths


def two_customer_instance():
    # t01 = t02 = 10, t12 = 5, no service, L large
    travel = np.array([
        [0.0, 10.0, 10.0],
        [10.0, 0.0, 5.0],
        [10.0, 5.0, 0.0],
    ])
    return Instance(
        n=2,
        coords=np.zeros((3, 2)),
        travel_mean=travel,
        service_mean=np.zeros(2),
        cancel_prob=np.zeros(2),
        horizon_L=10_000.0,
        costs=CostParams(cf=100.0, ct=1.0, co=2.0),
    )


def test_reduced_cost_weights_definition():
    inst = generate_instance(4, seed=1)
    duals = np.array([3.0, 7.0, 0.0, 11.0])
    r, ttil = arc_weights(inst, duals)
    c = inst.costs
    assert r[0, 2] == pytest.approx(c.cf + c.ct * inst.travel(0, 2))
    assert r[1, 3] == pytest.approx(c.ct * inst.travel(1, 3) - 3.0)
    assert ttil[0, 2] == pytest.approx(inst.travel(0, 2))
    assert ttil[1, 3] == pytest.approx(inst.travel(1, 3) + inst.service(1))
    # return-to-depot column mirrors column 0
    assert r[2, 5] == pytest.approx(c.ct * inst.travel(2, 0) - 7.0)
    assert ttil[2, 5] == pytest.approx(inst.travel(2, 0) + inst.service(2))


def test_reduced_cost_equals_cost_minus_duals():
    inst = generate_instance(6, seed=2)
    rng = np.random.default_rng(0)
    duals = rng.uniform(0, 150, size=6)
    from hsara.split import route_cost
    for seq in ([1], [3, 2], [5, 1, 4], [6, 5, 4, 3, 2, 1]):
        want = route_cost(inst, seq).cost - sum(duals[c - 1] for c in seq)
        assert path_reduced_cost(inst, duals, seq) == pytest.approx(want, abs=1e-8)


def test_two_customer_example():
    inst = two_customer_instance()
    duals = np.array([120.0, 10.0])
    best = exact_price(inst, duals)
    assert best is not None
    assert best.reduced_cost == pytest.approx(-5.0)
    assert set(best.route.customers) == {1, 2}


def test_zero_duals_price_nothing():
    inst = generate_instance(5, seed=3)
    assert exact_price(inst, np.zeros(5)) is None
    assert heuristic_price(inst, np.zeros(5)) == []


@pytest.mark.parametrize("seed", range(8))
def test_exact_price_matches_enumeration(seed):
    rng = np.random.default_rng(500 + seed)
    n = 4 + seed % 4
    inst = generate_instance(n, seed=700 + seed)
    duals = rng.uniform(0, 220, size=n)
    got = exact_price(inst, duals)
    best_rc, _ = min(enumerate_elementary_paths(inst, duals))
    if best_rc < -1e-6:
        assert got is not None
        assert got.reduced_cost == pytest.approx(best_rc, abs=1e-7)
    else:
        assert got is None


def test_exact_price_reports_recomputable_costs():
    inst = generate_instance(6, seed=8)
    rng = np.random.default_rng(1)
    duals = rng.uniform(50, 250, size=6)
    got = exact_price(inst, duals)
    if got is not None:
        again = path_reduced_cost(inst, duals, got.route.customers)
        assert got.reduced_cost == pytest.approx(again, abs=1e-8)


def test_gcs_rows_keep_elementary_paths_feasible():
    rng = np.random.default_rng(4)
    inst = generate_instance(6, seed=11)
    duals = rng.uniform(0, 220, size=6)
    diag = {}
    exact_price(inst, duals, diagnostics=diag)
    paths = [p for _, p in enumerate_elementary_paths(inst, duals)]
    for S, u in diag["cuts"]:
        for path in paths:
            assert gcs_row_holds(S, u, path, inst.n)


def test_pricing_state_reuse_stays_exact():
    inst = generate_instance(6, seed=12)
    rng = np.random.default_rng(5)
    state = PricingState()
    for _ in range(4):
        duals = rng.uniform(0, 240, size=6)
        got = exact_price(inst, duals, state=state)
        best_rc, _ = min(enumerate_elementary_paths(inst, duals))
        if best_rc < -1e-6:
            assert got.reduced_cost == pytest.approx(best_rc, abs=1e-7)
        else:
            assert got is None


def test_early_exit_still_returns_negative_path():
    rng = np.random.default_rng(6)
    inst = generate_instance(6, seed=13)
    duals = rng.uniform(100, 300, size=6)
    got = exact_price(inst, duals, early_exit=True)
    best_rc, _ = min(enumerate_elementary_paths(inst, duals))
    if best_rc < -1e-6:
        assert got is not None
        assert got.reduced_cost < -1e-6
        # early exit may settle for any negative path, never a better-than-best one
        assert got.reduced_cost >= best_rc - 1e-9


def test_heuristic_single_customer_route():
    inst = generate_instance(1, seed=1)
    c = inst.costs
    full = c.cf + c.ct * (inst.travel(0, 1) + inst.travel(1, 0))
    duals = np.array([full + 50.0])
    got = heuristic_price(inst, duals)
    assert len(got) == 1
    assert got[0].route.customers == (1,)
    assert got[0].reduced_cost == pytest.approx(full - duals[0])


def test_heuristic_routes_verify_and_never_beat_exact():
    rng = np.random.default_rng(7)
    for seed in range(5):
        n = 5 + seed % 3
        inst = generate_instance(n, seed=800 + seed)
        duals = rng.uniform(0, 260, size=n)
        pool = heuristic_price(inst, duals)
        exact = exact_price(inst, duals)
        floor = exact.reduced_cost if exact else 0.0
        for p in pool:
            again = path_reduced_cost(inst, duals, p.route.customers)
            assert p.reduced_cost == pytest.approx(again, abs=1e-8)
            assert p.reduced_cost < -1e-6
            assert p.reduced_cost >= floor - 1e-9
        covered = [c for p in pool for c in p.route.customers]
        assert len(covered) == len(set(covered))


def test_heuristic_uses_only_positive_dual_customers():
    inst = generate_instance(6, seed=14)
    duals = np.array([0.0, 500.0, 0.0, 500.0, 0.0, 0.0])
    pool = heuristic_price(inst, duals)
    for p in pool:
        assert set(p.route.customers) <= {2, 4}
