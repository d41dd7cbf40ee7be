import numpy as np
import pytest

from hsara.instance import CostParams, Instance, generate_instance
from hsara.tsp import approx_tsp_tour, minimum_spanning_tree, tour_from_order

from oracles import all_spanning_trees_weight, brute_force_tsp_cost, kruskal_mst_weight


def line_instance(positions, ct=1.0):
    coords = [(p, 0.0) for p in positions]
    n = len(coords) - 1
    return Instance.from_coords(coords, [0.0] * n, [0.0] * n, 250.0,
                                CostParams(ct=ct))


def test_collinear_mst_avoids_long_edge():
    # depot 0 at 0, customers at 10 and 20; direct 0-2 edge costs 20
    inst = line_instance([0.0, 10.0, 20.0])
    tree = minimum_spanning_tree(inst)
    assert tree.weight == pytest.approx(20.0)
    assert tree.parent[1] == 0 and tree.parent[2] == 1
    assert tree.weight == pytest.approx(all_spanning_trees_weight(inst.travel_mean))


def test_single_customer_tree_and_tour():
    inst = line_instance([0.0, 7.0])
    tree = minimum_spanning_tree(inst)
    assert tree.parent[1] == 0
    tour = approx_tsp_tour(inst)
    assert tour.order == (0, 1)
    assert tour.tour_cost == pytest.approx(14.0)


@pytest.mark.parametrize("seed", range(6))
def test_mst_weight_matches_kruskal(seed):
    inst = generate_instance(8, seed=seed)
    tree = minimum_spanning_tree(inst)
    w = inst.costs.ct * inst.travel_mean
    assert tree.weight == pytest.approx(kruskal_mst_weight(w), abs=1e-9)


@pytest.mark.parametrize("seed", range(8))
def test_tour_within_twice_optimal(seed):
    n = 4 + seed % 5
    inst = generate_instance(n, seed=seed)
    tour = approx_tsp_tour(inst)
    best = brute_force_tsp_cost(inst.costs.ct * inst.travel_mean)
    assert tour.tour_cost <= 2 * best + 1e-9


@pytest.mark.parametrize("n", [5, 20, 60])
def test_tour_within_twice_mst_weight(n):
    inst = generate_instance(n, seed=n)
    tour = approx_tsp_tour(inst)
    tree = minimum_spanning_tree(inst)
    assert tour.tour_cost <= 2 * tree.weight + 1e-9


def test_tour_order_is_permutation_starting_at_depot():
    inst = generate_instance(15, seed=4)
    tour = approx_tsp_tour(inst)
    assert tour.order[0] == 0
    assert sorted(tour.order) == list(range(16))


def test_preorder_children_ascending():
    # star around the depot: preorder must visit children in index order
    coords = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (-1.0, 0.0)]
    inst = Instance.from_coords(coords, [0.0] * 3, [0.0] * 3, 250.0, CostParams())
    tour = approx_tsp_tour(inst)
    assert tour.order == (0, 1, 2, 3)


def test_tour_from_order_closes_cycle():
    inst = line_instance([0.0, 10.0, 20.0])
    tour = tour_from_order(inst, [0, 1, 2])
    assert tour.tour_cost == pytest.approx(10 + 10 + 20)
