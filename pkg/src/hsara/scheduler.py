"""Monte-Carlo appointment scheduling and stochastic cost evaluation.

Appointments are fixed sequentially along each route: simulate arrivals at the
next customer across replicas, pin its time at the requested percentile, then
let the replicas proceed. Canceled customers are skipped, with the team moving
straight to the next non-canceled stop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .instance import Instance
from .split import Route
from .stochastics import CalibratedModel

_SCHEDULE_STREAM = 1
_EVAL_STREAM = 2


@dataclass(frozen=True)
class ScheduleConfig:
    alpha: float = 0.5
    replicas: int = 100
    seed: int = 0
    reveal_on_arrival: bool = False  # travel to a canceled customer before skipping

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if self.replicas < 1:
            raise ValueError("need at least one replica")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")


@dataclass
class RouteSchedule:
    route: Route
    alpha: float
    appointments: dict                 # customer -> appointment time w
    empirical: dict                    # customer -> sorted arrival samples
    flagged: tuple = ()                # customers scheduled from travel-only propagation
    reveal_on_arrival: bool = False
    on_time_rate: dict | None = None   # filled by evaluate_costs
    cost_breakdown: "CostBreakdown | None" = None

    def to_dict(self, route_id: int) -> dict:
        rates = self.on_time_rate or {}
        served = [c for c in self.route.customers if c in rates]
        return {
            "route_id": route_id,
            "appointments": [
                {"customer": c, "w": self.appointments[c]} for c in self.route.customers
            ],
            "on_time_rate": (
                float(np.mean([rates[c] for c in served])) if served else None
            ),
            "cost_breakdown": (
                self.cost_breakdown.to_dict() if self.cost_breakdown else None
            ),
        }


@dataclass(frozen=True)
class CostBreakdown:
    hiring: float
    travel: float
    overtime: float
    earliness: float
    delay: float

    @property
    def total(self) -> float:
        return self.hiring + self.travel + self.overtime + self.earliness + self.delay

    def to_dict(self) -> dict:
        return {
            "hiring": self.hiring,
            "travel": self.travel,
            "overtime": self.overtime,
            "earliness": self.earliness,
            "delay": self.delay,
            "total": self.total,
        }


def nearest_rank(sorted_samples: np.ndarray, alpha: float) -> float:
    """Nearest-rank percentile: item ceil(alpha*R) of the sorted samples, 1-clamped."""
    r = len(sorted_samples)
    idx = max(1, math.ceil(alpha * r))
    return float(sorted_samples[min(idx, r) - 1])


class _Replica:
    __slots__ = ("rng", "canceled", "loc", "time")

    def __init__(self, rng, canceled):
        self.rng = rng
        self.canceled = canceled
        self.loc = 0
        self.time = 0.0


def _spawn_replicas(model, route, seed, count, stream):
    replicas = []
    for k in range(count):
        rng = np.random.default_rng([stream, seed + k, *route.customers])
        canceled = {
            c: bool(rng.random() < model.gamma[c - 1]) for c in route.customers
        }
        replicas.append(_Replica(rng, canceled))
    return replicas


def schedule_route(
    instance: Instance,
    model: CalibratedModel,
    route: Route,
    config: ScheduleConfig,
    arc_log: set | None = None,
) -> RouteSchedule:
    """Fix appointment times along one route at the alpha-percentile of arrivals."""
    replicas = _spawn_replicas(model, route, config.seed, config.replicas,
                               _SCHEDULE_STREAM)
    appointments: dict = {}
    empirical: dict = {}
    flagged = []
    for c in route.customers:
        arrivals = {}
        for rep in replicas:
            if rep.canceled[c]:
                if config.reveal_on_arrival:
                    if arc_log is not None:
                        arc_log.add((rep.loc, c))
                    rep.time += model.travel_draw(rep.rng, rep.loc, c)
                    rep.loc = c
                continue
            if arc_log is not None:
                arc_log.add((rep.loc, c))
            arrivals[id(rep)] = rep.time + model.travel_draw(rep.rng, rep.loc, c)
        if not arrivals:
            # every replica cancels c: appointment from travel-only propagation
            hypo = np.sort([rep.time + model.travel_draw(rep.rng, rep.loc, c)
                            for rep in replicas])
            appointments[c] = nearest_rank(hypo, config.alpha)
            empirical[c] = hypo
            flagged.append(c)
            continue
        samples = np.sort(np.fromiter(arrivals.values(), dtype=float))
        w = nearest_rank(samples, config.alpha)
        appointments[c] = w
        empirical[c] = samples
        for rep in replicas:
            if rep.canceled[c]:
                continue
            start = max(w, arrivals[id(rep)])
            rep.time = start + model.service_draw(rep.rng)
            rep.loc = c
    return RouteSchedule(
        route=route,
        alpha=config.alpha,
        appointments=appointments,
        empirical=empirical,
        flagged=tuple(flagged),
        reveal_on_arrival=config.reveal_on_arrival,
    )


def _simulate_route_costs(instance, model, schedule, replicas, arc_log):
    """Fresh replicas against fixed appointments; per-route cost expectations."""
    route = schedule.route
    w = schedule.appointments
    L = instance.horizon_L
    overtime = np.zeros(len(replicas))
    earliness = np.zeros(len(replicas))
    delay = np.zeros(len(replicas))
    on_time = {c: 0 for c in route.customers}
    served = {c: 0 for c in route.customers}
    for k, rep in enumerate(replicas):
        for c in route.customers:
            if rep.canceled[c]:
                if schedule.reveal_on_arrival:
                    if arc_log is not None:
                        arc_log.add((rep.loc, c))
                    rep.time += model.travel_draw(rep.rng, rep.loc, c)
                    rep.loc = c
                continue
            if arc_log is not None:
                arc_log.add((rep.loc, c))
            arrival = rep.time + model.travel_draw(rep.rng, rep.loc, c)
            served[c] += 1
            if arrival <= w[c] + 1e-9:
                on_time[c] += 1
            earliness[k] += max(w[c] - arrival, 0.0)
            delay[k] += max(arrival - w[c], 0.0)
            rep.time = max(w[c], arrival) + model.service_draw(rep.rng)
            rep.loc = c
        if rep.loc != 0:
            if arc_log is not None:
                arc_log.add((rep.loc, 0))
            rep.time += model.travel_draw(rep.rng, rep.loc, 0)
            overtime[k] = max(rep.time - L, 0.0)
    costs = instance.costs
    breakdown = CostBreakdown(
        hiring=costs.cf,
        travel=costs.ct * route.travel_time,
        overtime=costs.co * float(np.mean(overtime)),
        earliness=costs.ce * float(np.mean(earliness)),
        delay=costs.cd * float(np.mean(delay)),
    )
    rates = {c: on_time[c] / served[c] for c in route.customers if served[c] > 0}
    return breakdown, rates


def evaluate_costs(
    instance: Instance,
    model: CalibratedModel,
    solution,
    schedules,
    eval_replicas: int = 1000,
    seed: int = 0,
    arc_log: set | None = None,
) -> CostBreakdown:
    """Simulated cost of a full solution on fresh replicas.

    Hiring and travel are expectations from the routes themselves; overtime,
    earliness and delay are Monte-Carlo means. Fills each schedule's
    on_time_rate and per-route cost breakdown as a side effect.
    """
    if len(schedules) != len(solution.routes):
        raise ValueError("need one schedule per route")
    parts = []
    for schedule in schedules:
        replicas = _spawn_replicas(model, schedule.route, seed, eval_replicas,
                                   _EVAL_STREAM)
        breakdown, rates = _simulate_route_costs(instance, model, schedule,
                                                 replicas, arc_log)
        schedule.on_time_rate = rates
        schedule.cost_breakdown = breakdown
        parts.append(breakdown)
    return CostBreakdown(
        hiring=sum(p.hiring for p in parts),
        travel=sum(p.travel for p in parts),
        overtime=sum(p.overtime for p in parts),
        earliness=sum(p.earliness for p in parts),
        delay=sum(p.delay for p in parts),
    )


def schedule_solution(
    instance: Instance,
    model: CalibratedModel,
    solution,
    config: ScheduleConfig,
) -> list:
    """Schedule every route of a solution independently."""
    return [schedule_route(instance, model, r, config) for r in solution.routes]


def scheduled_return_time(instance: Instance, schedule: RouteSchedule) -> float:
    """Latest appointment plus its mean service and the expected leg back to base."""
    route = schedule.route
    served = [c for c in route.customers if c not in schedule.flagged]
    if not served:
        return 0.0
    last = max(served, key=lambda c: schedule.appointments[c])
    return (schedule.appointments[last] + instance.service(last)
            + instance.travel(last, 0))
