"""Giant-tour construction: Prim MST on travel costs, then a preorder walk.

With the triangle inequality the walk is a 2-approximation of the optimal
tour, which is all the split step needs from it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .instance import Instance


@dataclass(frozen=True)
class Tree:
    parent: tuple       # parent[v] for v != root, parent[root] = -1
    children: tuple     # children[v] sorted ascending
    weight: float


@dataclass(frozen=True)
class GiantTour:
    order: tuple        # permutation of 0..n, order[0] = 0
    tour_cost: float


def _prim(weights: np.ndarray, root: int = 0) -> Tree:
    n = weights.shape[0]
    in_tree = np.zeros(n, dtype=bool)
    best = np.full(n, np.inf)
    parent = np.full(n, -1, dtype=int)
    best[root] = 0.0
    total = 0.0
    for _ in range(n):
        cand = np.where(in_tree, np.inf, best)
        v = int(np.argmin(cand))  # argmin takes the smallest index on ties
        in_tree[v] = True
        total += 0.0 if v == root else best[v]
        improved = ~in_tree & (weights[v] < best)
        best[improved] = weights[v][improved]
        parent[improved] = v
    children = [[] for _ in range(n)]
    for v in range(n):
        if v != root:
            children[parent[v]].append(v)
    return Tree(
        parent=tuple(int(p) for p in parent),
        children=tuple(tuple(sorted(c)) for c in children),
        weight=float(total),
    )


def minimum_spanning_tree(instance: Instance) -> Tree:
    """MST of the complete graph on nodes 0..n with edge cost ct * t_ij, rooted at 0."""
    return _prim(instance.costs.ct * instance.travel_mean)


def _preorder(tree: Tree, root: int = 0) -> list:
    order = []
    stack = [root]
    while stack:
        v = stack.pop()
        order.append(v)
        stack.extend(reversed(tree.children[v]))
    return order


def tour_from_order(instance: Instance, order) -> GiantTour:
    order = tuple(int(v) for v in order)
    ct = instance.costs.ct
    cost = sum(
        ct * instance.travel(order[k], order[k + 1]) for k in range(len(order) - 1)
    )
    cost += ct * instance.travel(order[-1], order[0])
    return GiantTour(order=order, tour_cost=float(cost))


def approx_tsp_tour(instance: Instance) -> GiantTour:
    """Preorder walk of the MST; children visited in ascending index order."""
    tree = minimum_spanning_tree(instance)
    return tour_from_order(instance, _preorder(tree))
