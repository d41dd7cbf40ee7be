"""Problem data model, random instance generator, and file I/O.

Node 0 is the depot; customers are 1..n. Travel times are expected minutes,
coordinates are km. The depot's "return" copy is not materialized: arcs back
to base read row/column 0 of the travel matrix.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np


class InstanceError(ValueError):
    """Malformed or inconsistent instance data."""


@dataclass(frozen=True)
class CostParams:
    """Cost coefficients: hiring, travel, overtime, earliness, delay."""

    cf: float = 100.0
    ct: float = 1.0
    co: float = 2.0
    ce: float = 1.0
    cd: float = 1.0

    def validate(self):
        for name in ("cf", "ct", "co", "ce", "cd"):
            if getattr(self, name) < 0:
                raise InstanceError(f"cost coefficient {name} must be >= 0")

    def to_dict(self):
        return {"cf": self.cf, "ct": self.ct, "co": self.co, "ce": self.ce, "cd": self.cd}


@dataclass(frozen=True)
class Instance:
    """One day of demand: customers, expected times, cancellation odds, costs."""

    n: int
    coords: np.ndarray        # (n+1, 2) km, row 0 = depot
    travel_mean: np.ndarray   # (n+1, n+1) expected minutes
    service_mean: np.ndarray  # (n,) expected minutes, customer i -> row i-1
    cancel_prob: np.ndarray   # (n,) in [0, 1]
    horizon_L: float
    costs: CostParams

    def __post_init__(self):
        object.__setattr__(self, "coords", np.asarray(self.coords, dtype=float))
        object.__setattr__(self, "travel_mean", np.asarray(self.travel_mean, dtype=float))
        object.__setattr__(self, "service_mean", np.asarray(self.service_mean, dtype=float))
        object.__setattr__(self, "cancel_prob", np.asarray(self.cancel_prob, dtype=float))
        for arr in (self.coords, self.travel_mean, self.service_mean, self.cancel_prob):
            arr.setflags(write=False)
        self.validate()

    # -- accessors using customer indices 1..n --------------------------------

    def service(self, i: int) -> float:
        return float(self.service_mean[i - 1])

    def cancel(self, i: int) -> float:
        return float(self.cancel_prob[i - 1])

    def travel(self, i: int, j: int) -> float:
        return float(self.travel_mean[i, j])

    @property
    def customers(self) -> range:
        return range(1, self.n + 1)

    def validate(self, check_triangle: bool = False):
        n = self.n
        if n < 1:
            raise InstanceError("an instance needs at least one customer")
        if self.coords.shape != (n + 1, 2):
            raise InstanceError(f"coords must be ({n + 1}, 2), got {self.coords.shape}")
        if self.travel_mean.shape != (n + 1, n + 1):
            raise InstanceError(
                f"travel_mean must be ({n + 1}, {n + 1}), got {self.travel_mean.shape}"
            )
        if self.service_mean.shape != (n,):
            raise InstanceError(f"service_mean must have length {n}")
        if self.cancel_prob.shape != (n,):
            raise InstanceError(f"cancel_prob must have length {n}")
        if not np.all(np.isfinite(self.travel_mean)) or np.any(self.travel_mean < 0):
            raise InstanceError("travel_mean must be finite and nonnegative")
        if np.any(np.diag(self.travel_mean) != 0):
            raise InstanceError("travel_mean diagonal must be zero")
        if np.any(self.service_mean < 0):
            raise InstanceError("service_mean must be nonnegative")
        if np.any(self.cancel_prob < 0) or np.any(self.cancel_prob > 1):
            raise InstanceError("cancel_prob entries must lie in [0, 1]")
        if not self.horizon_L > 0:
            raise InstanceError("horizon_L must be positive")
        self.costs.validate()
        if check_triangle:
            self.assert_triangle_inequality()

    def assert_triangle_inequality(self, tol: float = 1e-9):
        t = self.travel_mean
        # min over k of t[i,k] + t[k,j], vectorized; fine for n up to a few hundred
        through = np.min(t[:, :, None] + t[None, :, :], axis=1)
        if np.any(t > through + tol):
            raise InstanceError("travel_mean violates the triangle inequality")

    # -- construction helpers --------------------------------------------------

    @classmethod
    def from_coords(
        cls,
        coords,
        service_mean,
        cancel_prob,
        horizon_L: float,
        costs: CostParams,
        speed_km_per_min: float = 1.0,
    ) -> "Instance":
        """Build an instance whose travel times are Euclidean distance / speed."""
        coords = np.asarray(coords, dtype=float)
        diff = coords[:, None, :] - coords[None, :, :]
        travel = np.hypot(diff[..., 0], diff[..., 1]) / speed_km_per_min
        return cls(
            n=len(coords) - 1,
            coords=coords,
            travel_mean=travel,
            service_mean=np.asarray(service_mean, dtype=float),
            cancel_prob=np.asarray(cancel_prob, dtype=float),
            horizon_L=horizon_L,
            costs=costs,
        )

    def with_overrides(self, costs: CostParams | None = None,
                       customer_subset=None) -> "Instance":
        """Clone with new costs and/or a restricted customer set (what-if runs)."""
        inst = self
        if customer_subset is not None:
            keep = sorted(set(int(i) for i in customer_subset))
            if not keep:
                raise InstanceError("customer_subset must keep at least one customer")
            for i in keep:
                if not 1 <= i <= inst.n:
                    raise InstanceError(f"customer {i} not in 1..{inst.n}")
            nodes = [0] + keep
            inst = Instance(
                n=len(keep),
                coords=inst.coords[nodes],
                travel_mean=inst.travel_mean[np.ix_(nodes, nodes)],
                service_mean=inst.service_mean[[i - 1 for i in keep]],
                cancel_prob=inst.cancel_prob[[i - 1 for i in keep]],
                horizon_L=inst.horizon_L,
                costs=inst.costs,
            )
        if costs is not None:
            inst = replace(inst, costs=costs)
        return inst


@dataclass(frozen=True)
class GeneratorParams:
    """Experiment defaults: 50 km square, speed 1 km/min, L=250, cf/ct/co=100/1/2."""

    square_edge_km: float = 50.0
    speed_km_per_min: float = 1.0
    service_range: tuple = (30.0, 60.0)
    horizon_L: float = 250.0
    cancel_prob: float = 0.1
    costs: CostParams = CostParams()


def generate_instance(n: int, seed: int, params: GeneratorParams | None = None) -> Instance:
    """Random instance: depot at the origin, customers uniform in the square.

    Deterministic for a fixed seed. Euclidean travel times guarantee the
    triangle inequality.
    """
    if n < 1:
        raise InstanceError("n must be >= 1")
    params = params or GeneratorParams()
    rng = np.random.default_rng(seed)
    half = params.square_edge_km / 2.0
    coords = np.vstack([np.zeros((1, 2)), rng.uniform(-half, half, size=(n, 2))])
    lo, hi = params.service_range
    service = rng.uniform(lo, hi, size=n)
    cancel = np.full(n, params.cancel_prob)
    return Instance.from_coords(
        coords, service, cancel, params.horizon_L, params.costs,
        speed_km_per_min=params.speed_km_per_min,
    )


# -- file I/O ------------------------------------------------------------------

def instance_to_dict(instance: Instance) -> dict:
    return {
        "n": instance.n,
        "coords": instance.coords.tolist(),
        "travel_mean": instance.travel_mean.tolist(),
        "service_mean": instance.service_mean.tolist(),
        "cancel_prob": instance.cancel_prob.tolist(),
        "L": instance.horizon_L,
        "costs": instance.costs.to_dict(),
    }


def instance_from_dict(doc: dict) -> Instance:
    for key in ("n", "coords", "travel_mean", "service_mean", "cancel_prob", "L", "costs"):
        if key not in doc:
            raise InstanceError(f"instance document is missing the '{key}' block")
    costs_doc = doc["costs"]
    for key in ("cf", "ct", "co", "ce", "cd"):
        if key not in costs_doc:
            raise InstanceError(f"costs block is missing '{key}'")
    try:
        costs = CostParams(**{k: float(costs_doc[k]) for k in ("cf", "ct", "co", "ce", "cd")})
        return Instance(
            n=int(doc["n"]),
            coords=np.asarray(doc["coords"], dtype=float),
            travel_mean=np.asarray(doc["travel_mean"], dtype=float),
            service_mean=np.asarray(doc["service_mean"], dtype=float),
            cancel_prob=np.asarray(doc["cancel_prob"], dtype=float),
            horizon_L=float(doc["L"]),
            costs=costs,
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InstanceError):
            raise
        raise InstanceError(f"could not parse instance document: {exc}") from exc


def write_instance(instance: Instance, path):
    Path(path).write_text(json.dumps(instance_to_dict(instance)))


def read_instance(path) -> Instance:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InstanceError(f"{path} does not contain an instance object")
    return instance_from_dict(doc)


def read_travel_csv(path) -> np.ndarray:
    """Header-free, row-major square travel matrix."""
    matrix = np.loadtxt(path, delimiter=",", dtype=float, ndmin=2)
    if matrix.shape[0] != matrix.shape[1]:
        raise InstanceError(f"travel CSV must be square, got {matrix.shape}")
    return matrix
