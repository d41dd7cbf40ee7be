"""Search for negative-reduced-cost routes given master duals.

Two pricers: an exact integer-programming one that breaks subtours with
lazily added generalized cutset rows, and a fast heuristic that reuses the
tour-and-split machinery on reduced-cost arc weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .instance import Instance
from .milp import LinearProgram, solve_ip
from .split import Route, route_cost, shortest_split
from .tsp import _preorder, _prim

NEGATIVE_RC = -1e-6


class PricingError(RuntimeError):
    pass


@dataclass(frozen=True)
class PricedPath:
    route: Route
    reduced_cost: float


@dataclass
class PricingState:
    """Carry-over between exact pricing calls on one instance.

    Cutset rows are combinatorial (no dual terms), so cuts found under one
    dual vector stay valid for every later one; the warm basis survives
    objective changes because the dual crash re-prices it.
    """

    cuts: list = field(default_factory=list)   # (frozenset nodes, root u) pairs
    warm_keys: list | None = None
    warm_rows: int | None = None


def arc_weights(instance: Instance, duals) -> tuple:
    """(r, t_tilde) over nodes 0..n+1, where n+1 is the return copy of the depot.

    r[0,j] = cf + ct*t0j, r[i,j] = ct*tij - pi_i for a customer tail i;
    t_tilde adds the tail's service time to customer-tail arcs.
    """
    n = instance.n
    duals = np.asarray(duals, dtype=float)
    if duals.shape != (n,):
        raise ValueError(f"expected {n} duals, got shape {duals.shape}")
    t = instance.travel_mean
    t_ext = np.zeros((n + 2, n + 2))
    t_ext[: n + 1, : n + 1] = t
    t_ext[: n + 1, n + 1] = t[:, 0]
    t_ext[n + 1, : n + 1] = t[0, :]

    r = np.zeros((n + 2, n + 2))
    ttil = np.zeros((n + 2, n + 2))
    costs = instance.costs
    r[0, :] = costs.cf + costs.ct * t_ext[0, :]
    ttil[0, :] = t_ext[0, :]
    for i in range(1, n + 1):
        r[i, :] = costs.ct * t_ext[i, :] - duals[i - 1]
        ttil[i, :] = t_ext[i, :] + instance.service(i)
    return r, ttil


def path_reduced_cost(instance: Instance, duals, customers) -> float:
    """Reduced cost of the depot path through ``customers``, overtime included."""
    r, ttil = arc_weights(instance, duals)
    return _path_rc(instance, r, ttil, list(customers))


def _path_rc(instance, r, ttil, customers):
    n1 = instance.n + 1
    seq = [0] + list(customers) + [n1]
    rc = sum(r[a, b] for a, b in zip(seq[:-1], seq[1:]))
    dur = sum(ttil[a, b] for a, b in zip(seq[:-1], seq[1:]))
    return float(rc + instance.costs.co * max(0.0, dur - instance.horizon_L))


# -- exact pricing ---------------------------------------------------------------


def _pricing_arcs(n: int) -> list:
    sink = n + 1
    arcs = [(0, j) for j in range(1, n + 1)]
    arcs += [(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j]
    arcs += [(i, sink) for i in range(1, n + 1)]
    return arcs


def gcs_row_holds(S, u, path_customers, n: int) -> bool:
    """Check one generalized cutset row against an elementary depot path."""
    sink = n + 1
    seq = [0] + list(path_customers) + [sink]
    used = set(zip(seq[:-1], seq[1:]))
    lhs = sum(1 for (i, j) in used if i in S and j in S)
    rhs = sum(1 for (i, j) in used if i in S and i != u)
    return lhs <= rhs


def _greedy_seed(instance, r, ttil, n):
    """Cheap elementary path with low reduced cost: best of all singletons and
    every prefix of a nearest-arc greedy walk. Seeds the pricing IP bound."""
    sink = n + 1
    co, L = instance.costs.co, instance.horizon_L

    def closed_value(seq, rc_open, tt_open):
        tail = seq[-1]
        rc = rc_open + r[tail, sink]
        dur = tt_open + ttil[tail, sink]
        return rc + co * max(0.0, dur - L)

    best_seq, best_val = None, np.inf
    for i in range(1, n + 1):
        val = closed_value([i], r[0, i], ttil[0, i])
        if val < best_val:
            best_seq, best_val = [i], val

    seq = []
    rc_open = tt_open = 0.0
    cur = 0
    remaining = set(range(1, n + 1))
    while remaining:
        j = min(remaining, key=lambda v: r[cur, v])
        seq.append(j)
        rc_open += r[cur, j]
        tt_open += ttil[cur, j]
        remaining.remove(j)
        cur = j
        val = closed_value(seq, rc_open, tt_open)
        if val < best_val:
            best_seq, best_val = list(seq), val
    return best_seq


def _decompose_support(arcs_used, n: int):
    sink = n + 1
    succ = dict(arcs_used)
    path = []
    node = succ[0]
    while node != sink:
        path.append(node)
        node = succ[node]
    on_path = set(path)
    subtours = []
    seen = set()
    for tail in succ:
        if tail in (0,) or tail in on_path or tail in seen:
            continue
        cycle = [tail]
        seen.add(tail)
        node = succ[tail]
        while node != tail:
            cycle.append(node)
            seen.add(node)
            node = succ[node]
        subtours.append(cycle)
    return path, subtours


def _gcs_row(arcs, idx, nv, S_set, u):
    row = np.zeros(nv)
    for k, a in enumerate(arcs):
        if a[0] in S_set and a[1] in S_set:
            row[k] += 1.0
        if a[0] in S_set and a[0] != u:
            row[k] -= 1.0
    return row


def exact_price(instance: Instance, duals, max_cut_rounds: int = 200,
                node_limit: int = 200000, early_exit: bool = False,
                state: PricingState | None = None,
                diagnostics: dict | None = None):
    """Minimum-reduced-cost elementary depot path via IP with lazy cutset rows.

    Returns the best PricedPath when its reduced cost clears the negativity
    threshold, else None. With ``early_exit`` the search may stop as soon as
    an intermediate solution carries a negative elementary path (any negative
    column advances the master problem); the default runs the cut loop to a
    subtour-free optimum so the result matches path enumeration. ``state``
    carries the cut pool and warm basis across calls within one master run.
    """
    n = instance.n
    r, ttil = arc_weights(instance, duals)
    arcs = _pricing_arcs(n)
    idx = {a: k for k, a in enumerate(arcs)}
    nv = len(arcs) + 1          # arc vars then the overtime var
    delta = len(arcs)
    sink = n + 1

    c = np.array([r[a] for a in arcs] + [instance.costs.co])
    rows, senses, rhs = [], [], []

    def add_row(row, sense, value):
        rows.append(row)
        senses.append(sense)
        rhs.append(value)

    def coeff_row(coeffs):
        row = np.zeros(nv)
        for k, v in coeffs:
            row[k] += v
        return row

    # depot-out and per-customer balance; the sink row is their sum, so it is
    # dropped to keep the equality system full rank
    add_row(coeff_row([(idx[(0, j)], 1.0) for j in range(1, n + 1)]), "=", 1.0)
    for i in range(1, n + 1):
        coeffs = [(k, 1.0) for k, a in enumerate(arcs) if a[0] == i]
        coeffs += [(k, -1.0) for k, a in enumerate(arcs) if a[1] == i]
        add_row(coeff_row(coeffs), "=", 0.0)
    for i in range(0, n + 1):
        add_row(coeff_row([(k, 1.0) for k, a in enumerate(arcs) if a[0] == i]),
                "<=", 1.0)
    add_row(coeff_row([(k, ttil[a]) for k, a in enumerate(arcs)]
                      + [(delta, -1.0)]), "<=", instance.horizon_L)

    if state is None:
        state = PricingState()
    for S_set, u in state.cuts:
        add_row(_gcs_row(arcs, idx, nv, S_set, u), "<=", 0.0)

    lb = np.zeros(nv)
    ub = np.ones(nv)
    ub[delta] = np.inf
    if diagnostics is not None:
        diagnostics.setdefault("cuts", [])
        diagnostics["rounds"] = 0

    seed_seq = [0] + _greedy_seed(instance, r, ttil, n) + [sink]
    seed_arcs = list(zip(seed_seq[:-1], seed_seq[1:]))
    seed_x = np.zeros(nv)
    for a in seed_arcs:
        seed_x[idx[a]] = 1.0
    seed_x[delta] = max(0.0, sum(ttil[a] for a in seed_arcs) - instance.horizon_L)

    for round_no in range(max_cut_rounds):
        lp = LinearProgram(c, np.vstack(rows), tuple(senses), np.array(rhs), lb, ub)
        sol = solve_ip(lp, range(len(arcs)), node_limit=node_limit,
                       warm_keys=state.warm_keys, warm_rows=state.warm_rows,
                       incumbent=seed_x)
        state.warm_keys, state.warm_rows = sol.root_basis_keys, len(rows)
        if sol.status not in ("optimal", "node_limit") or sol.x is None:
            raise PricingError(f"pricing IP ended with status {sol.status}")
        support = [arcs[k] for k in range(len(arcs)) if sol.x[k] > 0.5]
        path, subtours = _decompose_support(support, n)
        if diagnostics is not None:
            diagnostics["rounds"] = round_no + 1
        rc = _path_rc(instance, r, ttil, path)
        if not subtours:
            if rc < NEGATIVE_RC:
                return PricedPath(route=route_cost(instance, path), reduced_cost=rc)
            return None
        if early_exit and rc < NEGATIVE_RC:
            # underlying elementary path already pays for itself
            return PricedPath(route=route_cost(instance, path), reduced_cost=rc)
        for S in subtours:
            S_set = frozenset(S)
            for u in S:
                add_row(_gcs_row(arcs, idx, nv, S_set, u), "<=", 0.0)
                state.cuts.append((S_set, u))
                if diagnostics is not None:
                    diagnostics["cuts"].append((S_set, u))
    raise PricingError(
        f"cut loop did not converge in {max_cut_rounds} rounds "
        f"(n={n}, last subtours={subtours})"
    )


# -- heuristic pricing -------------------------------------------------------------


def heuristic_price(instance: Instance, duals) -> list:
    """Tour-and-split on reduced-cost weights over the positive-dual customers.

    Returns every split route with negative reduced cost; possibly empty. The
    reduced costs need not satisfy the triangle inequality, so no tour quality
    guarantee carries over, only feasibility.
    """
    n = instance.n
    duals = np.asarray(duals, dtype=float)
    r, ttil = arc_weights(instance, duals)
    cands = [i for i in range(1, n + 1) if duals[i - 1] > 0.0]
    if not cands:
        return []
    nodes = [0] + cands
    k = len(nodes)
    W = np.zeros((k, k))
    for a in range(k):
        for b in range(k):
            if a == b:
                continue
            i, j = nodes[a], nodes[b]
            if i == 0:
                W[a, b] = r[0, j]
            elif j == 0:
                W[a, b] = r[0, i]
            else:
                W[a, b] = min(r[i, j], r[j, i])
    tree = _prim(W)
    order = [nodes[p] for p in _preorder(tree)]
    seq = order[1:]
    m = len(seq)
    sink = n + 1

    # prefix sums along the candidate tour for O(1) segment weights
    rc_pref = np.zeros(m)
    tt_pref = np.zeros(m)
    for a in range(1, m):
        rc_pref[a] = rc_pref[a - 1] + r[seq[a - 1], seq[a]]
        tt_pref[a] = tt_pref[a - 1] + ttil[seq[a - 1], seq[a]]

    co, L = instance.costs.co, instance.horizon_L

    def weight(i, j):
        head, tail = seq[i], seq[j - 1]
        rc = r[0, head] + rc_pref[j - 1] - rc_pref[i] + r[tail, sink]
        dur = ttil[0, head] + tt_pref[j - 1] - tt_pref[i] + ttil[tail, sink]
        return rc + co * max(0.0, dur - L)

    _, cuts = shortest_split(m, weight)
    found = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        rc = weight(a, b)
        if rc < NEGATIVE_RC:
            found.append(PricedPath(route=route_cost(instance, seq[a:b]),
                                    reduced_cost=float(rc)))
    return found
