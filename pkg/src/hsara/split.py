"""Route costing and the split of a giant tour into depot-rooted routes.

The trip graph over tour positions is acyclic (arcs only go forward), so the
optimal split is a single forward DP pass in tour order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .instance import Instance
from .tsp import GiantTour


@dataclass(frozen=True)
class Route:
    """One team's day: an ordered customer sequence plus cached costs."""

    customers: tuple
    cost: float
    travel_time: float
    overtime: float

    @property
    def covers(self) -> frozenset:
        return frozenset(self.customers)

    @property
    def arcs(self) -> frozenset:
        seq = (0,) + self.customers + (0,)
        return frozenset(zip(seq[:-1], seq[1:]))


def route_cost(instance: Instance, customers) -> Route:
    """Cost a customer sequence: hiring + travel + overtime on expected times."""
    customers = tuple(int(c) for c in customers)
    if not customers:
        raise ValueError("a route must serve at least one customer")
    if len(set(customers)) != len(customers):
        raise ValueError(f"route repeats a customer: {customers}")
    for c in customers:
        if not 1 <= c <= instance.n:
            raise ValueError(f"customer {c} not in 1..{instance.n}")
    travel = instance.travel(0, customers[0])
    service = 0.0
    for a, b in zip(customers[:-1], customers[1:]):
        service += instance.service(a)
        travel += instance.travel(a, b)
    service += instance.service(customers[-1])
    travel += instance.travel(customers[-1], 0)
    duration = travel + service
    overtime = max(0.0, duration - instance.horizon_L)
    costs = instance.costs
    total = costs.cf + costs.ct * travel + costs.co * overtime
    return Route(customers=customers, cost=float(total),
                 travel_time=float(travel), overtime=float(overtime))


def shortest_split(n_positions: int, weight):
    """Forward DP on the trip DAG.

    ``weight(i, j)`` is the cost of serving tour positions i+1..j as one
    route, 0 <= i < j <= n_positions. Returns (best value, breakpoints), the
    breakpoints being the position sequence 0 = p0 < p1 < ... < pk = n.
    """
    dist = np.full(n_positions + 1, np.inf)
    pred = np.full(n_positions + 1, -1, dtype=int)
    dist[0] = 0.0
    for j in range(1, n_positions + 1):
        for i in range(j):
            w = dist[i] + weight(i, j)
            if w < dist[j] - 1e-12:
                dist[j] = w
                pred[j] = i
    cuts = [n_positions]
    while cuts[-1] != 0:
        cuts.append(int(pred[cuts[-1]]))
    return float(dist[n_positions]), cuts[::-1]


def split(instance: Instance, tour: GiantTour) -> list:
    """Optimal partition of the tour into contiguous depot-rooted routes."""
    seq = [v for v in tour.order if v != 0]
    if set(seq) != set(instance.customers):
        raise ValueError("tour must visit every customer exactly once")
    n = len(seq)
    t = instance.travel_mean
    # prefix[k]: travel along seq[0..k], services of seq[0..k-1]
    travel_pref = np.zeros(n)
    service_pref = np.zeros(n + 1)
    for k in range(1, n):
        travel_pref[k] = travel_pref[k - 1] + t[seq[k - 1], seq[k]]
    for k in range(n):
        service_pref[k + 1] = service_pref[k] + instance.service(seq[k])

    costs = instance.costs
    L = instance.horizon_L

    def weight(i, j):
        travel = (t[0, seq[i]] + travel_pref[j - 1] - travel_pref[i] + t[seq[j - 1], 0])
        service = service_pref[j] - service_pref[i]
        overtime = max(0.0, travel + service - L)
        return costs.cf + costs.ct * travel + costs.co * overtime

    _, cuts = shortest_split(n, weight)
    return [route_cost(instance, seq[a:b]) for a, b in zip(cuts[:-1], cuts[1:])]
