"""Set covering master problem and the column-generation heuristic.

Configurations: IS returns the tour-and-split solution as is, HM prices with
the split heuristic only, EM prices exactly. EM run to convergence also
yields the LP relaxation value, a valid lower bound on the optimum.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from .instance import Instance
from .milp import LinearProgram, solve_ip, solve_lp
from .pricing import NEGATIVE_RC, PricingState, exact_price, heuristic_price
from .split import Route, route_cost, split
from .tsp import approx_tsp_tour

METHODS = ("is", "hm", "em")


@dataclass
class ColGenConfig:
    method: str = "em"
    t_max: float = float("inf")   # seconds; 0 means initial solution only
    pool: bool = True             # heuristic pricer adds every negative column
    node_limit: int = 200000

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.t_max < 0:
            raise ValueError("t_max must be >= 0")


@dataclass
class RmpState:
    columns: list
    lp_value: float = float("inf")
    duals: np.ndarray | None = None
    iterations: int = 0
    elapsed: float = 0.0
    lp_history: list = field(default_factory=list)
    added_reduced_costs: list = field(default_factory=list)


@dataclass
class SarSolution:
    routes: list
    objective: float
    lower_bound: float | None = None
    gap_percent: float | None = None
    method: str = "em"
    wall_time_s: float = 0.0
    state: RmpState | None = None

    def to_dict(self) -> dict:
        return {
            "routes": [
                {
                    "customers": list(r.customers),
                    "cost": r.cost,
                    "travel_time": r.travel_time,
                    "overtime": r.overtime,
                }
                for r in self.routes
            ],
            "objective": self.objective,
            "lower_bound": self.lower_bound,
            "gap_percent": self.gap_percent,
            "method": self.method,
            "wall_time_s": self.wall_time_s,
        }


def gap(z: float, z_ref: float) -> float:
    """Percent excess of z over the reference value."""
    if z_ref <= 0:
        raise ValueError("reference value must be positive")
    return 100.0 * (z - z_ref) / z_ref


def initial_columns(instance: Instance) -> list:
    """Feasible starting columns: split of the approximate giant tour."""
    return split(instance, approx_tsp_tour(instance))


def _solve_rmp(instance: Instance, columns) -> tuple:
    n = instance.n
    c = np.array([r.cost for r in columns])
    A = np.zeros((n, len(columns)))
    for k, r in enumerate(columns):
        for i in r.customers:
            A[i - 1, k] = 1.0
    lp = LinearProgram(c, A, (">=",) * n, np.ones(n))
    sol = solve_lp(lp)
    if sol.status != "optimal":
        raise RuntimeError(f"master LP ended with status {sol.status}")
    duals = np.maximum(sol.duals, 0.0)
    return sol.objective, duals, lp


def _integer_master(instance: Instance, columns, node_limit: int) -> list:
    n = instance.n
    c = np.array([r.cost for r in columns])
    A = np.zeros((n, len(columns)))
    for k, r in enumerate(columns):
        for i in r.customers:
            A[i - 1, k] = 1.0
    lp = LinearProgram(c, A, (">=",) * n, np.ones(n),
                       np.zeros(len(columns)), np.ones(len(columns)))
    sol = solve_ip(lp, range(len(columns)), node_limit=node_limit)
    if sol.status not in ("optimal", "node_limit") or sol.x is None:
        raise RuntimeError(f"integer master ended with status {sol.status}")
    return [columns[k] for k in range(len(columns)) if sol.x[k] > 0.5]


def _drop_overcoverage(instance: Instance, selected) -> list:
    """Covering can leave a customer in several routes; keep it only in the
    cheapest one and re-cost the rest."""
    keep_in = {}
    for i in instance.customers:
        covering = [r for r in selected if i in r.covers]
        if len(covering) > 1:
            keep_in[i] = min(covering, key=lambda r: (r.cost, r.customers))
    if not keep_in:
        return list(selected)
    out = []
    for r in selected:
        kept = tuple(c for c in r.customers
                     if c not in keep_in or keep_in[c] is r)
        if not kept:
            continue
        out.append(r if kept == r.customers else route_cost(instance, kept))
    return out


def run_colgen(instance: Instance, config: ColGenConfig | None = None) -> SarSolution:
    """Iterate master LP and pricing, then solve the integer master.

    The exact method's final integer master additionally absorbs the column
    pool of a heuristic-method run (milliseconds of extra work), so its result
    is never worse than the heuristic's.
    """
    config = config or ColGenConfig()
    start = time.perf_counter()

    init = initial_columns(instance)
    if config.method == "is" or config.t_max == 0:
        return SarSolution(
            routes=init,
            objective=float(sum(r.cost for r in init)),
            method="is" if config.method == "is" else config.method,
            wall_time_s=time.perf_counter() - start,
        )

    columns = []
    seen = set()
    for r in init:
        if r.customers not in seen:
            seen.add(r.customers)
            columns.append(r)

    state = RmpState(columns=columns)
    pricing_state = PricingState()
    converged = False
    while True:
        lp_value, duals, _ = _solve_rmp(instance, columns)
        state.lp_value = lp_value
        state.duals = duals
        state.lp_history.append(lp_value)
        state.iterations += 1
        if time.perf_counter() - start > config.t_max:
            break
        if config.method == "em":
            priced = exact_price(instance, duals, node_limit=config.node_limit,
                                 early_exit=True, state=pricing_state)
            if priced is not None and priced.route.customers in seen:
                # the early exit landed on a known column (numerical edge);
                # only an exact solve may certify convergence
                priced = exact_price(instance, duals,
                                     node_limit=config.node_limit,
                                     state=pricing_state)
            new = [priced] if priced is not None else []
        else:
            new = heuristic_price(instance, duals)
            if not config.pool:
                new = new[:1]
        new = [p for p in new if p.reduced_cost < NEGATIVE_RC
               and p.route.customers not in seen]
        if not new:
            converged = True
            break
        for p in new:
            seen.add(p.route.customers)
            columns.append(p.route)
            state.added_reduced_costs.append(p.reduced_cost)

    if config.method == "em":
        # pool union before the integer solve: with the heuristic run's columns
        # included, the exact method's integer master can never end up worse
        # than the heuristic method's (it optimizes over a superset)
        remaining = config.t_max
        if np.isfinite(config.t_max):
            remaining = max(0.0, config.t_max - (time.perf_counter() - start))
        hm = run_colgen(instance, ColGenConfig(method="hm", t_max=remaining,
                                               pool=config.pool,
                                               node_limit=config.node_limit))
        hm_pool = hm.state.columns if hm.state is not None else hm.routes
        for route in hm_pool:
            if route.customers not in seen:
                seen.add(route.customers)
                columns.append(route)

    selected = _integer_master(instance, columns, config.node_limit)
    final = _drop_overcoverage(instance, selected)
    objective = float(sum(r.cost for r in final))

    lower = None
    gap_pct = None
    if config.method == "em" and converged and not np.isfinite(config.t_max):
        lower = float(state.lp_value)
        gap_pct = gap(objective, lower) if lower > 0 else None

    state.elapsed = time.perf_counter() - start
    return SarSolution(
        routes=final,
        objective=objective,
        lower_bound=lower,
        gap_percent=gap_pct,
        method=config.method,
        wall_time_s=state.elapsed,
        state=state,
    )


# -- exhaustive reference for tiny instances ---------------------------------------


def sar_oracle(instance: Instance, max_n: int = 8) -> SarSolution:
    """Exact optimum by enumerating every ordered set partition of the customers.

    Partial costs only grow as blocks are added, so branches above the
    incumbent are pruned. Usable up to n == 8.
    """
    n = instance.n
    if n > max_n:
        raise ValueError(f"oracle enumeration is limited to n <= {max_n}, got {n}")
    start = time.perf_counter()
    t = instance.travel_mean
    costs = instance.costs
    L = instance.horizon_L

    def seq_cost(seq):
        travel = t[0, seq[0]]
        service = 0.0
        for a, b in zip(seq[:-1], seq[1:]):
            travel += t[a, b]
            service += instance.service(a)
        travel += t[seq[-1], 0]
        service += instance.service(seq[-1])
        over = max(0.0, travel + service - L)
        return costs.cf + costs.ct * travel + costs.co * over

    best_cost = np.inf
    best_blocks = None

    def recurse(remaining, acc, blocks):
        nonlocal best_cost, best_blocks
        if acc >= best_cost - 1e-12:
            return
        if not remaining:
            best_cost = acc
            best_blocks = list(blocks)
            return
        first = min(remaining)
        rest = sorted(remaining - {first})
        for size in range(len(rest) + 1):
            for extra in itertools.combinations(rest, size):
                members = (first,) + extra
                for perm in itertools.permutations(members):
                    c = seq_cost(perm)
                    if acc + c >= best_cost - 1e-12:
                        continue
                    blocks.append(perm)
                    recurse(remaining - set(members), acc + c, blocks)
                    blocks.pop()

    recurse(frozenset(instance.customers), 0.0, [])
    routes = [route_cost(instance, blk) for blk in best_blocks]
    return SarSolution(
        routes=routes,
        objective=float(best_cost),
        method="oracle",
        wall_time_s=time.perf_counter() - start,
    )
