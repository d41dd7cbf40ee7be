"""Self-contained LP/IP kernel.

Primal simplex on bounded variables (two-phase, explicit basis inverse,
Dantzig pricing with a Bland anti-cycling fallback) plus a depth-first
branch-and-bound for small integer programs. Scale target is the master
problems and pricing subproblems of the routing solver, not general MILP.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

FEAS_TOL = 1e-7
DUAL_TOL = 1e-9
INT_TOL = 1e-6
PIVOT_TOL = 1e-10
BOUND_TOL = 1e-9
REFACTOR_EVERY = 200


class KernelError(RuntimeError):
    pass


@dataclass
class LinearProgram:
    """min c @ x subject to row senses in {'<=', '>=', '='}, lb <= x <= ub."""

    c: np.ndarray
    A: np.ndarray
    senses: tuple
    b: np.ndarray
    lb: np.ndarray | None = None
    ub: np.ndarray | None = None
    validate: bool = True  # False skips input checks (trusted internal re-solves)

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        self.b = np.asarray(self.b, dtype=float)
        self.senses = tuple(self.senses)
        n = self.c.size
        if self.lb is None:
            self.lb = np.zeros(n)
        else:
            self.lb = np.asarray(self.lb, dtype=float)
        if self.ub is None:
            self.ub = np.full(n, np.inf)
        else:
            self.ub = np.asarray(self.ub, dtype=float)
        if not self.validate:
            return
        m = self.A.shape[0]
        if self.A.shape != (m, n) or self.b.shape != (m,) or len(self.senses) != m:
            raise KernelError("inconsistent LP dimensions")
        if not (np.all(np.isfinite(self.c)) and np.all(np.isfinite(self.A))
                and np.all(np.isfinite(self.b))):
            raise KernelError("LP coefficients must be finite")
        if not np.all(np.isfinite(self.lb)):
            raise KernelError("lower bounds must be finite")
        if np.any(self.lb > self.ub + 1e-12):
            raise KernelError("lb > ub")
        for s in self.senses:
            if s not in ("<=", ">=", "="):
                raise KernelError(f"unknown row sense {s!r}")


@dataclass
class LpSolution:
    status: str                     # optimal | infeasible | unbounded
    x: np.ndarray | None = None
    objective: float | None = None
    duals: np.ndarray | None = None


@dataclass
class IpSolution:
    status: str                     # optimal | infeasible | node_limit | unbounded
    x: np.ndarray | None = None
    objective: float | None = None
    proven: bool = False
    nodes: int = 0
    incumbent_history: list = field(default_factory=list)
    root_basis_keys: list | None = None  # for warm starts in cutting-plane loops


class _Simplex:
    """Working state for one solve; columns = structural, slacks, artificials."""

    def __init__(self, lp: LinearProgram, template: "_Simplex | None" = None):
        m, n = lp.A.shape
        if template is not None:
            # share the slack-extended matrix; only bounds differ per node
            self.A = template.A
            self.slack_of_row = template.slack_of_row
            self.row_of_slack = template.row_of_slack
            self.cost = template.cost
            ns = template.N - n
        else:
            slack_rows = [i for i, s in enumerate(lp.senses) if s != "="]
            ns = len(slack_rows)
            A = np.zeros((m, n + ns))
            A[:, :n] = lp.A
            self.slack_of_row = {}
            self.row_of_slack = {}
            for k, i in enumerate(slack_rows):
                sign = 1.0 if lp.senses[i] == "<=" else -1.0
                A[i, n + k] = sign
                self.slack_of_row[i] = (n + k, sign)
                self.row_of_slack[n + k] = i
            self.A = A
            self.cost = np.concatenate([lp.c, np.zeros(ns)])
        self.b = lp.b.copy()
        self.L = np.concatenate([lp.lb, np.zeros(ns)])
        self.U = np.concatenate([lp.ub, np.full(ns, np.inf)])
        self.m, self.N = m, n + ns
        self.n_struct = n
        self.art_from = self.N
        self.basis = None
        self.x = None
        self.TB = None       # [B^-1 A | B^-1], fused so one pivot updates both

    def basis_keys(self):
        """Portable basis description: structural index or owning row of a slack.

        None when an artificial sits in the basis (warm starts then skip)."""
        keys = []
        for j in self.basis:
            if j < self.n_struct:
                keys.append(("x", int(j)))
            elif j < self.art_from:
                keys.append(("s", self.row_of_slack[int(j)]))
            else:
                return None
        return keys

    # -- phase setup ----------------------------------------------------------

    def start_phase1(self) -> bool:
        """Crash basis from slacks; add artificials only where needed.

        Returns True when a phase-1 run is required.
        """
        x = self.L.copy()
        resid = self.b - self.A @ x
        basis = np.full(self.m, -1, dtype=int)
        diag = np.ones(self.m)
        art_rows = []
        for i in range(self.m):
            sl = self.slack_of_row.get(i)
            if sl is not None and resid[i] * sl[1] >= 0:
                basis[i] = sl[0]
                x[sl[0]] = resid[i] * sl[1]
                diag[i] = sl[1]
            else:
                art_rows.append(i)
        if art_rows:
            art = np.zeros((self.m, len(art_rows)))
            for k, i in enumerate(art_rows):
                sign = 1.0 if resid[i] >= 0 else -1.0
                art[i, k] = sign
                basis[i] = self.N + k
                diag[i] = sign
            self.A = np.hstack([self.A, art])
            self.L = np.concatenate([self.L, np.zeros(len(art_rows))])
            self.U = np.concatenate([self.U, np.full(len(art_rows), np.inf)])
            phase1_cost = np.zeros(self.N + len(art_rows))
            phase1_cost[self.N:] = 1.0
            self.cost = phase1_cost
            self.art_from = self.N
            self.N += len(art_rows)
            x = np.concatenate([x, np.abs(resid[art_rows])])
        self.basis = basis
        self.x = x
        Binv = np.zeros((self.m, self.m))
        Binv[np.arange(self.m), np.arange(self.m)] = diag  # diag(+-1) inverts itself
        self.TB = np.hstack([Binv @ self.A, Binv])
        return bool(art_rows)

    def enter_phase2(self, c_original: np.ndarray):
        cost = np.zeros(self.N)
        cost[: c_original.size] = c_original
        self.cost = cost
        # artificials are pinned at zero and may stay basic but never re-enter
        self.U[self.art_from:] = 0.0

    def refactorize(self):
        B = self.A[:, self.basis]
        Binv = np.linalg.inv(B)
        self.TB = np.hstack([Binv @ self.A, Binv])
        mask = np.ones(self.N, dtype=bool)
        mask[self.basis] = False
        rhs = self.b - self.A[:, mask] @ self.x[mask]
        self.x[self.basis] = Binv @ rhs

    # -- core loop -------------------------------------------------------------

    def run(self, max_iter: int = 100000) -> str:
        m, N = self.m, self.N
        basis = self.basis
        A_T = self.A.T
        is_basic = np.zeros(N, dtype=bool)
        is_basic[basis] = True
        span_ok = (self.U - self.L) > PIVOT_TOL
        bland = False
        stall = 0
        for it in range(max_iter):
            if it and it % REFACTOR_EVERY == 0:
                self.refactorize()
            Binv = self.TB[:, N:]
            y = Binv.T @ self.cost[basis]
            d = self.cost - A_T @ y
            at_lower = np.abs(self.x - self.L) <= BOUND_TOL
            viol = np.where(at_lower, -d, d)
            viol[is_basic] = -np.inf
            viol[~span_ok] = -np.inf
            if bland:
                eligible = np.flatnonzero(viol > DUAL_TOL)
                if eligible.size == 0:
                    return "optimal"
                e = int(eligible[0])
            else:
                e = int(np.argmax(viol))
                if viol[e] <= DUAL_TOL:
                    return "optimal"
            delta = 1.0 if at_lower[e] else -1.0
            w = self.TB[:, e]
            dw = delta * w

            xb = self.x[basis]
            ratios = np.full(m, np.inf)
            pos = dw > PIVOT_TOL
            if pos.any():
                ratios[pos] = (xb[pos] - self.L[basis[pos]]) / dw[pos]
            neg = dw < -PIVOT_TOL
            if neg.any():
                ub_b = self.U[basis[neg]]
                with np.errstate(invalid="ignore"):
                    r = (ub_b - xb[neg]) / (-dw[neg])
                r[~np.isfinite(ub_b)] = np.inf
                ratios[neg] = r
            np.maximum(ratios, 0.0, out=ratios)
            row_min = ratios.min() if m else np.inf
            t_own = self.U[e] - self.L[e]

            if not np.isfinite(min(row_min, t_own)):
                return "unbounded"

            if row_min < t_own - 1e-12:
                ties = np.flatnonzero(ratios <= row_min + 1e-12)
                if bland or ties.size == 1:
                    leave = ties[np.argmin(basis[ties])]
                else:
                    aw = np.abs(w[ties])
                    best = ties[aw >= aw.max() - 1e-12]
                    leave = best[np.argmin(basis[best])]
                t = ratios[leave]
                hit_upper = dw[leave] < 0
                lv = basis[leave]
                self.x[basis] = xb - dw * t
                self.x[e] += delta * t
                self.x[lv] = self.U[lv] if hit_upper else self.L[lv]
                piv = self.TB[leave, e]
                if abs(piv) < PIVOT_TOL:
                    self.refactorize()
                    piv = self.TB[leave, e]
                    if abs(piv) < PIVOT_TOL:
                        raise KernelError("numerically singular pivot")
                prow = self.TB[leave, :] / piv
                col = self.TB[:, e].copy()
                col[leave] = 0.0
                self.TB -= np.outer(col, prow)
                self.TB[leave, :] = prow
                is_basic[lv] = False
                is_basic[e] = True
                basis[leave] = e
            else:
                # entering variable flips to its other bound, basis unchanged
                t = t_own
                self.x[basis] = xb - dw * t
                self.x[e] = self.U[e] if delta > 0 else self.L[e]

            if abs(d[e]) * t <= 1e-12:
                stall += 1
                if stall > 2 * (m + N):
                    bland = True
            else:
                stall = 0
                bland = False
        raise KernelError("simplex iteration limit exceeded")

    def duals(self) -> np.ndarray:
        Binv = self.TB[:, self.N:]
        return Binv.T @ self.cost[self.basis]

    def drive_out_artificials(self):
        """Degenerate pivots swapping zero-valued basic artificials for real
        columns; x is untouched, only the basis (for warm-start keys) changes."""
        if self.art_from >= self.N:
            return
        is_basic = np.zeros(self.N, dtype=bool)
        is_basic[self.basis] = True
        for r in range(self.m):
            if self.basis[r] < self.art_from:
                continue
            row = np.abs(self.TB[r, : self.art_from])
            row[is_basic[: self.art_from]] = 0.0
            e = int(np.argmax(row))
            if row[e] < 1e-7:
                continue  # redundant row; artificial has to stay
            lv = self.basis[r]
            piv = self.TB[r, e]
            prow = self.TB[r, :] / piv
            col = self.TB[:, e].copy()
            col[r] = 0.0
            self.TB -= np.outer(col, prow)
            self.TB[r, :] = prow
            is_basic[lv] = False
            is_basic[e] = True
            self.basis[r] = e

    def dual_run(self, max_iter: int = 5000) -> str:
        """Dual simplex: from a dual-feasible basis, repair primal bound violations.

        Returns optimal | infeasible | fallback (caller should cold-solve)."""
        m, N = self.m, self.N
        basis = self.basis
        A_T = self.A.T
        is_basic = np.zeros(N, dtype=bool)
        is_basic[basis] = True
        span_ok = (self.U - self.L) > PIVOT_TOL
        for it in range(max_iter):
            if it and it % REFACTOR_EVERY == 0:
                self.refactorize()
            xb = self.x[basis]
            viol_low = self.L[basis] - xb
            with np.errstate(invalid="ignore"):
                viol_up = xb - self.U[basis]
            viol_up[~np.isfinite(viol_up)] = -np.inf
            viol = np.maximum(viol_low, viol_up)
            r = int(np.argmax(viol))
            if viol[r] <= BOUND_TOL:
                return "optimal"
            to_lower = viol_low[r] >= viol_up[r]
            alpha = self.TB[r, :N]
            Binv = self.TB[:, N:]
            y = Binv.T @ self.cost[basis]
            d = self.cost - A_T @ y
            at_lower = np.abs(self.x - self.L) <= BOUND_TOL
            if to_lower:
                elig = (at_lower & (alpha < -PIVOT_TOL)) | (~at_lower & (alpha > PIVOT_TOL))
            else:
                elig = (at_lower & (alpha > PIVOT_TOL)) | (~at_lower & (alpha < -PIVOT_TOL))
            elig &= ~is_basic & span_ok
            idx = np.flatnonzero(elig)
            if idx.size == 0:
                return "infeasible"
            ratios = np.abs(d[idx]) / np.abs(alpha[idx])
            best = idx[ratios <= ratios.min() + 1e-12]
            e = int(best.min())
            lv = basis[r]
            target = self.L[lv] if to_lower else self.U[lv]
            step = (self.x[lv] - target) / alpha[e]
            self.x[basis] = xb - self.TB[:, e] * step
            self.x[e] += step
            self.x[lv] = target
            piv = self.TB[r, e]
            prow = self.TB[r, :] / piv
            col = self.TB[:, e].copy()
            col[r] = 0.0
            self.TB -= np.outer(col, prow)
            self.TB[r, :] = prow
            is_basic[lv] = False
            is_basic[e] = True
            basis[r] = e
        return "fallback"


def _extract(sx: _Simplex, lp: LinearProgram) -> LpSolution:
    x = sx.x[: lp.c.size].copy()
    obj = float(lp.c @ x)
    y = sx.duals()
    resid = lp.A @ x - lp.b
    for i, s in enumerate(lp.senses):
        bad = (s == "=" and abs(resid[i]) > FEAS_TOL) or \
              (s == "<=" and resid[i] > FEAS_TOL) or \
              (s == ">=" and resid[i] < -FEAS_TOL)
        if bad:
            raise KernelError(f"primal residual {resid[i]:.3e} on row {i} exceeds tolerance")
    return LpSolution(status="optimal", x=x, objective=obj, duals=y)


def _solve_lp_state(lp: LinearProgram):
    """Cold solve returning (solution, portable basis keys or None)."""
    sx = _Simplex(lp)
    c_original = sx.cost.copy()
    if sx.start_phase1():
        status = sx.run()
        if status != "optimal":  # phase 1 is bounded below by zero
            raise KernelError("phase 1 ended in unexpected state " + status)
        if sx.cost @ sx.x > 1e-7:
            return LpSolution(status="infeasible"), None
    sx.enter_phase2(c_original)
    status = sx.run()
    if status == "unbounded":
        return LpSolution(status="unbounded"), None
    sol = _extract(sx, lp)  # duals come from the optimal basis, pre-cleanup
    sx.drive_out_artificials()
    return sol, sx.basis_keys()


def solve_lp(lp: LinearProgram) -> LpSolution:
    """Two-phase primal simplex; duals follow the >=: pi>=0 / <=: pi<=0 convention."""
    return _solve_lp_state(lp)[0]


def _dual_warm_finish(sx: _Simplex, lp: LinearProgram, basis, TB):
    """Shared tail of the warm paths: dual crash, dual simplex, extraction."""
    sx.basis = basis
    sx.TB = TB
    Binv = TB[:, sx.N:]
    y = Binv.T @ sx.cost[basis]
    d = sx.cost - sx.A.T @ y
    x = np.where(d >= 0, sx.L, sx.U)
    bad = ~np.isfinite(x)
    if bad.any():
        x[bad] = sx.L[bad]
        if np.any(d[bad] < -1e-7):
            return None
    x[basis] = 0.0
    sx.x = x
    mask = np.ones(sx.N, dtype=bool)
    mask[basis] = False
    sx.x[basis] = Binv @ (sx.b - sx.A[:, mask] @ sx.x[mask])

    status = sx.dual_run()
    if status == "infeasible":
        return LpSolution(status="infeasible")
    if status != "optimal":
        return None
    try:
        return _extract(sx, lp)
    except KernelError:
        return None


def _warm_solve(lp: LinearProgram, keys, known_rows: int):
    """Dual-simplex re-solve from a relative's basis, described portably.

    ``keys`` describe a dual-feasible basis of the same constraint matrix
    restricted to its first ``known_rows`` rows; rows added since then must
    carry slacks, which join the basis. Returns (solution, keys) or (None,
    None) when the warm path cannot be trusted (caller cold-solves).
    """
    if keys is None:
        return None, None
    sx = _Simplex(lp)
    basis = np.empty(sx.m, dtype=int)
    for i, key in enumerate(keys):
        kind, v = key
        if kind == "x":
            basis[i] = v
        else:
            sl = sx.slack_of_row.get(v)
            if sl is None:
                return None, None
            basis[i] = sl[0]
    for i in range(known_rows, sx.m):
        sl = sx.slack_of_row.get(i)
        if sl is None:
            return None, None
        basis[len(keys) + (i - known_rows)] = sl[0]
    try:
        Binv = np.linalg.inv(sx.A[:, basis])
    except np.linalg.LinAlgError:
        return None, None
    sol = _dual_warm_finish(sx, lp, basis, np.hstack([Binv @ sx.A, Binv]))
    if sol is None or sol.status != "optimal":
        return sol, None
    return sol, sx.basis_keys()


def _warm_solve_same(lp: LinearProgram, template: _Simplex, basis, TB):
    """Warm solve against the same rows/columns, only bounds changed.

    Reuses the parent's full tableau directly. Returns (solution, state) with
    state = (basis, TB) for the children, or (None, None) on fallback."""
    sx = _Simplex(lp, template=template)
    sol = _dual_warm_finish(sx, lp, basis.copy(), TB.copy())
    if sol is None or sol.status != "optimal":
        return sol, None
    return sol, (sx.basis, sx.TB)


def _state_from_keys(template: _Simplex, keys):
    if keys is None:
        return None
    basis = np.empty(template.m, dtype=int)
    for i, (kind, v) in enumerate(keys):
        if kind == "x":
            basis[i] = v
        else:
            sl = template.slack_of_row.get(v)
            if sl is None:
                return None
            basis[i] = sl[0]
    try:
        Binv = np.linalg.inv(template.A[:, basis])
    except np.linalg.LinAlgError:
        return None
    return basis, np.hstack([Binv @ template.A, Binv])


def _feasible_for(lp: LinearProgram, x) -> bool:
    if np.any(x < lp.lb - 1e-9) or np.any(x > lp.ub + 1e-9):
        return False
    resid = lp.A @ x - lp.b
    for i, s in enumerate(lp.senses):
        if s == "=" and abs(resid[i]) > FEAS_TOL:
            return False
        if s == "<=" and resid[i] > FEAS_TOL:
            return False
        if s == ">=" and resid[i] < -FEAS_TOL:
            return False
    return True


def solve_ip(lp: LinearProgram, integer_vars, node_limit: int = 200000,
             warm_keys=None, warm_rows: int | None = None,
             incumbent=None) -> IpSolution:
    """LP-based depth-first branch-and-bound, branching on the most fractional var.

    ``warm_keys``/``warm_rows`` optionally seed the root solve with a basis
    from an earlier relaxation of the same columns (cutting-plane loops);
    ``incumbent`` is a known-feasible integer point used as the initial bound.
    """
    integer_vars = sorted(set(int(j) for j in integer_vars))
    root, root_keys = None, None
    if warm_keys is not None:
        root, root_keys = _warm_solve(lp, warm_keys, warm_rows)
    if root is None:
        root, root_keys = _solve_lp_state(lp)
    if root.status != "optimal":
        return IpSolution(status=root.status)

    best_x = None
    best_obj = np.inf
    history = []
    if incumbent is not None:
        x0 = np.asarray(incumbent, dtype=float)
        xi0 = x0[integer_vars]
        if _feasible_for(lp, x0) and np.all(np.abs(xi0 - np.round(xi0)) <= INT_TOL):
            best_x = x0.copy()
            best_obj = float(lp.c @ x0)
            history.append(best_obj)

    template = _Simplex(lp)
    root_state = _state_from_keys(template, root_keys)
    nodes = 0
    stack = [({}, root, root_state)]  # (bound overrides, relaxation, basis state)
    exhausted = True
    while stack:
        if nodes >= node_limit:
            exhausted = False
            break
        bounds, sol, state = stack.pop()
        nodes += 1
        if sol is None:
            lb = lp.lb.copy()
            ub = lp.ub.copy()
            for j, (lo, hi) in bounds.items():
                lb[j], ub[j] = lo, hi
            if np.any(lb > ub + 1e-12):
                continue
            node_lp = LinearProgram(lp.c, lp.A, lp.senses, lp.b, lb, ub,
                                    validate=False)
            if state is not None:
                sol, state = _warm_solve_same(node_lp, template, *state)
            else:
                sol = None
            if sol is None:
                sol, keys = _solve_lp_state(node_lp)
                state = _state_from_keys(template, keys)
        if sol.status != "optimal":
            continue
        if sol.objective >= best_obj - 1e-9:
            continue
        xi = sol.x[integer_vars]
        frac = np.abs(xi - np.round(xi))
        if frac.size == 0 or frac.max() <= INT_TOL:
            x = sol.x.copy()
            x[integer_vars] = np.round(xi)
            if sol.objective < best_obj - 1e-12:
                best_obj = sol.objective
                best_x = x
                history.append(best_obj)
            continue
        j = integer_vars[int(np.argmax(frac))]
        v = sol.x[j]
        cur = bounds.get(j, (lp.lb[j], lp.ub[j]))
        lo_b = dict(bounds)
        lo_b[j] = (cur[0], float(np.floor(v)))
        hi_b = dict(bounds)
        hi_b[j] = (float(np.ceil(v)), cur[1])
        near_floor = (v - np.floor(v)) <= 0.5
        first, second = (lo_b, hi_b) if near_floor else (hi_b, lo_b)
        stack.append((second, None, state))
        stack.append((first, None, state))

    if best_x is None:
        return IpSolution(status="infeasible" if exhausted else "node_limit",
                          nodes=nodes, incumbent_history=history,
                          root_basis_keys=root_keys)
    return IpSolution(
        status="optimal" if exhausted else "node_limit",
        x=best_x, objective=float(best_obj), proven=exhausted,
        nodes=nodes, incumbent_history=history, root_basis_keys=root_keys,
    )
