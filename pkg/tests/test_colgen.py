import numpy as np
import pytest

from hsara.colgen import (ColGenConfig, SarSolution, gap, initial_columns,
                          run_colgen, sar_oracle)
from hsara.instance import CostParams, Instance, generate_instance

from oracles import held_karp_partition_optimum


def test_gap_reference_values():
    assert gap(511.32, 467.93) == pytest.approx(9.27, abs=0.01)
    assert gap(505.32, 467.93) == pytest.approx(7.99, abs=0.01)


def test_gap_degenerate_and_errors():
    assert gap(5.0, 5.0) == 0.0
    with pytest.raises(ValueError):
        gap(1.0, 0.0)
    with pytest.raises(ValueError):
        gap(1.0, -2.0)


def test_config_validation():
    with pytest.raises(ValueError):
        ColGenConfig(method="xx")
    with pytest.raises(ValueError):
        ColGenConfig(t_max=-1)


def single_customer_instance(t01=12.0, s1=30.0, L=250.0):
    travel = np.array([[0.0, t01], [t01, 0.0]])
    return Instance(n=1, coords=np.zeros((2, 2)), travel_mean=travel,
                    service_mean=np.array([s1]), cancel_prob=np.array([0.1]),
                    horizon_L=L, costs=CostParams())


def test_initial_columns_cover_everything():
    for seed in (0, 5):
        inst = generate_instance(9, seed=seed)
        cols = initial_columns(inst)
        covered = sorted(c for r in cols for c in r.customers)
        assert covered == list(range(1, 10))


def test_single_customer_all_methods_agree():
    inst = single_customer_instance()
    c = inst.costs
    want = c.cf + c.ct * 24.0  # no overtime: 12+30+12 < 250
    for method in ("is", "hm", "em"):
        sol = run_colgen(inst, ColGenConfig(method=method))
        assert sol.objective == pytest.approx(want)
        assert [r.customers for r in sol.routes] == [(1,)]


def test_single_customer_with_overtime():
    inst = single_customer_instance(t01=100.0, s1=60.0, L=250.0)
    sol = run_colgen(inst, ColGenConfig(method="is"))
    # duration 260 -> 10 minutes overtime at co=2
    assert sol.objective == pytest.approx(100.0 + 200.0 + 20.0)


def test_is_method_equals_tmax_zero():
    inst = generate_instance(7, seed=3)
    a = run_colgen(inst, ColGenConfig(method="is"))
    b = run_colgen(inst, ColGenConfig(method="hm", t_max=0))
    assert a.objective == pytest.approx(b.objective)


def test_sar_oracle_matches_independent_dp():
    for seed in (0, 1, 2):
        inst = generate_instance(6, seed=40 + seed)
        oracle = sar_oracle(inst)
        assert oracle.objective == pytest.approx(
            held_karp_partition_optimum(inst), abs=1e-9)
        covered = sorted(c for r in oracle.routes for c in r.customers)
        assert covered == list(range(1, 7))


def test_sar_oracle_two_far_customers():
    # both 10 from the depot, 50 apart: singleton routes win
    travel = np.array([
        [0.0, 10.0, 10.0],
        [10.0, 0.0, 50.0],
        [10.0, 50.0, 0.0],
    ])
    inst = Instance(n=2, coords=np.zeros((3, 2)), travel_mean=travel,
                    service_mean=np.array([30.0, 30.0]),
                    cancel_prob=np.zeros(2), horizon_L=250.0,
                    costs=CostParams(cf=10.0))
    oracle = sar_oracle(inst)
    assert sorted(r.customers for r in oracle.routes) == [(1,), (2,)]
    assert oracle.objective == pytest.approx(2 * (10.0 + 20.0))


def test_sar_oracle_size_guard():
    inst = generate_instance(9, seed=1)
    with pytest.raises(ValueError):
        sar_oracle(inst)


def test_rmp_lp_history_non_increasing():
    inst = generate_instance(7, seed=10)
    sol = run_colgen(inst, ColGenConfig(method="em"))
    hist = sol.state.lp_history
    assert all(b <= a + 1e-7 for a, b in zip(hist, hist[1:]))


def test_added_columns_priced_negative():
    inst = generate_instance(7, seed=11)
    for method in ("hm", "em"):
        sol = run_colgen(inst, ColGenConfig(method=method))
        assert all(rc < -1e-6 for rc in sol.state.added_reduced_costs)


def test_no_duplicate_columns():
    inst = generate_instance(7, seed=12)
    sol = run_colgen(inst, ColGenConfig(method="em"))
    keys = [r.customers for r in sol.state.columns]
    assert len(keys) == len(set(keys))


def test_solution_covers_all_customers_once():
    for method in ("is", "hm", "em"):
        inst = generate_instance(6, seed=13)
        sol = run_colgen(inst, ColGenConfig(method=method))
        covered = sorted(c for r in sol.routes for c in r.customers)
        assert covered == list(range(1, 7))


def test_bound_ordering_small():
    inst = generate_instance(6, seed=14)
    em = run_colgen(inst, ColGenConfig(method="em"))
    hm = run_colgen(inst, ColGenConfig(method="hm"))
    iss = run_colgen(inst, ColGenConfig(method="is"))
    assert em.lower_bound <= em.objective + 1e-9
    assert em.objective <= hm.objective + 1e-6
    assert hm.objective <= iss.objective + 1e-6
    assert em.gap_percent == pytest.approx(gap(em.objective, em.lower_bound))


def test_em_lower_bound_only_at_convergence():
    inst = generate_instance(6, seed=15)
    capped = run_colgen(inst, ColGenConfig(method="em", t_max=120.0))
    assert capped.lower_bound is None  # finite budget: bound not certified
    hm = run_colgen(inst, ColGenConfig(method="hm"))
    assert hm.lower_bound is None


def test_solution_json_shape():
    inst = generate_instance(5, seed=16)
    sol = run_colgen(inst, ColGenConfig(method="hm"))
    doc = sol.to_dict()
    assert set(doc) == {"routes", "objective", "lower_bound", "gap_percent",
                        "method", "wall_time_s"}
    for r in doc["routes"]:
        assert set(r) == {"customers", "cost", "travel_time", "overtime"}


def test_wall_time_recorded():
    inst = generate_instance(5, seed=17)
    sol = run_colgen(inst, ColGenConfig(method="is"))
    assert sol.wall_time_s >= 0.0
