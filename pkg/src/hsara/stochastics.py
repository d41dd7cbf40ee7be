"""Stochastic model calibration from sample moments, plus seeded samplers.

Travel times are lognormal per arc, service times exponential with a single
rate, cancellations Bernoulli per customer. Every fit goes through a small
family registry so alternate distributions can be plugged in.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .instance import Instance

# minutes-per-mile regression between mean travel time and its std deviation
SD_INTERCEPT = -0.4736
SD_SLOPE = 0.9936


class CalibrationError(ValueError):
    pass


@dataclass(frozen=True)
class MomentEstimates:
    t_hat: np.ndarray            # per-arc sample mean travel time
    v_hat: np.ndarray            # per-arc travel-time variance
    s_hat: float                 # sample mean service time
    p_hat: np.ndarray            # per-customer cancellation estimate


def variance_from_mean(t_hat):
    """Travel-time variance from the linear mean/std-dev relation.

    Means below the relation's root would give a negative std deviation;
    those are clamped to zero with a warning.
    """
    t_hat = np.asarray(t_hat, dtype=float)
    sd = SD_INTERCEPT + SD_SLOPE * t_hat
    clamped = sd < 0
    if np.any(clamped & (t_hat > 0)):
        warnings.warn(
            "mean travel time below the std-dev relation root; clamping to zero variance",
            stacklevel=2,
        )
    sd = np.where(clamped, 0.0, sd)
    out = sd * sd
    return float(out) if out.ndim == 0 else out


def lognormal_from_moments(t_hat, v_hat):
    """Lognormal (mu, sigma) whose mean and variance match the sample moments."""
    t_hat = np.asarray(t_hat, dtype=float)
    v_hat = np.asarray(v_hat, dtype=float)
    if np.any(t_hat <= 0):
        raise CalibrationError("lognormal fit needs a positive mean")
    if np.any(v_hat < 0):
        raise CalibrationError("variance must be nonnegative")
    mu = np.log(t_hat * t_hat / np.sqrt(v_hat + t_hat * t_hat))
    sigma = np.sqrt(np.log1p(v_hat / (t_hat * t_hat)))
    if mu.ndim == 0:
        return float(mu), float(sigma)
    return mu, sigma


def exponential_from_mean(s_hat) -> float:
    if s_hat <= 0:
        raise CalibrationError("service mean must be positive")
    return 1.0 / float(s_hat)


def bernoulli_from_estimate(p_hat):
    p = np.asarray(p_hat, dtype=float)
    if np.any(p < 0) or np.any(p > 1):
        raise CalibrationError("cancellation estimates must lie in [0, 1]")
    return float(p) if p.ndim == 0 else p


# Fit hook: family name -> callable from sample moments to parameter dict.
MOMENT_FAMILIES = {
    "lognormal": lambda mean, variance: dict(
        zip(("mu", "sigma"), lognormal_from_moments(mean, variance))
    ),
    "exponential": lambda mean: {"rate": exponential_from_mean(mean)},
    "bernoulli": lambda p: {"p": bernoulli_from_estimate(p)},
}


def fit_moments(family: str, **moments) -> dict:
    """Dispatch a method-of-moments fit to a registered distribution family."""
    try:
        fit = MOMENT_FAMILIES[family]
    except KeyError:
        raise CalibrationError(f"unknown distribution family {family!r}") from None
    return fit(**moments)


@dataclass(frozen=True)
class CalibratedModel:
    """Per-arc lognormal parameters, one service rate, per-customer cancel odds.

    Arcs with zero mean travel time get (mu=-inf, sigma=0): a point mass at 0.
    service_family 'degenerate' replaces service draws with their mean (test
    support for deterministic propagation).
    """

    mu: np.ndarray
    sigma: np.ndarray
    rate: float
    gamma: np.ndarray
    service_family: str = "exponential"

    def __post_init__(self):
        if np.any(self.sigma < 0):
            raise CalibrationError("sigma must be nonnegative")
        if not self.rate > 0:
            raise CalibrationError("service rate must be positive")
        if np.any(self.gamma < 0) or np.any(self.gamma > 1):
            raise CalibrationError("gamma must lie in [0, 1]")
        if self.service_family not in ("exponential", "degenerate"):
            raise CalibrationError(f"unknown service family {self.service_family!r}")

    @property
    def mean_service(self) -> float:
        return 1.0 / self.rate

    # -- draws; every call consumes from the passed generator ------------------

    def travel_draw(self, rng, i: int, j: int) -> float:
        if i == j:
            return 0.0
        return float(np.exp(self.mu[i, j] + self.sigma[i, j] * rng.standard_normal()))

    def travel_matrix_draw(self, rng) -> np.ndarray:
        z = rng.standard_normal(self.mu.shape)
        return np.exp(self.mu + self.sigma * z)

    def service_draw(self, rng) -> float:
        if self.service_family == "degenerate":
            return self.mean_service
        return float(rng.exponential(self.mean_service))

    def service_draws(self, rng, size: int) -> np.ndarray:
        if self.service_family == "degenerate":
            return np.full(size, self.mean_service)
        return rng.exponential(self.mean_service, size=size)

    def cancel_draws(self, rng) -> np.ndarray:
        return rng.random(self.gamma.shape) < self.gamma

    def to_dict(self) -> dict:
        return {
            "mu": self.mu.tolist(),
            "sigma": self.sigma.tolist(),
            "lambda": self.rate,
            "gamma": self.gamma.tolist(),
        }


def calibrate_from_moments(est: MomentEstimates,
                           service_family: str = "exponential") -> CalibratedModel:
    """Fit the full model from sample moments via the family registry."""
    t_hat = np.asarray(est.t_hat, dtype=float)
    v_hat = np.asarray(est.v_hat, dtype=float)
    positive = t_hat > 0
    mu = np.full(t_hat.shape, -np.inf)  # zero-mean arcs: point mass at zero
    sigma = np.zeros(t_hat.shape)
    if np.any(positive):
        fit = fit_moments("lognormal", mean=t_hat[positive],
                          variance=v_hat[positive])
        mu[positive] = fit["mu"]
        sigma[positive] = fit["sigma"]
    rate = fit_moments("exponential", mean=est.s_hat)["rate"]
    gamma = fit_moments("bernoulli", p=est.p_hat)["p"]
    return CalibratedModel(mu=mu, sigma=sigma, rate=rate, gamma=gamma,
                           service_family=service_family)


def calibrate(
    instance: Instance,
    v_hat: np.ndarray | None = None,
    s_hat: float | None = None,
    service_family: str = "exponential",
) -> CalibratedModel:
    """Calibrate the stochastic model from an instance's expected times.

    The travel variance defaults to the mean/std-dev relation; pass ``v_hat``
    when variance data exists. The service rate comes from the mean of the
    per-customer service means unless ``s_hat`` is given.
    """
    t_hat = instance.travel_mean
    if v_hat is None:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # zero-length arcs are exact, not clamped
            v_hat = variance_from_mean(t_hat)
    if s_hat is None:
        s_hat = float(np.mean(instance.service_mean))
    est = MomentEstimates(t_hat=t_hat, v_hat=np.asarray(v_hat, dtype=float),
                          s_hat=s_hat, p_hat=instance.cancel_prob)
    return calibrate_from_moments(est, service_family=service_family)


@dataclass(frozen=True)
class Realization:
    """One joint draw: a travel matrix, service times, cancellation flags."""

    travel: np.ndarray
    service: np.ndarray
    cancel: np.ndarray


def sample(model: CalibratedModel, rng_seed) -> Realization:
    """Single realization of the calibrated model; deterministic per seed."""
    rng = np.random.default_rng(rng_seed)
    travel = model.travel_matrix_draw(rng)
    np.fill_diagonal(travel, 0.0)
    service = model.service_draws(rng, model.gamma.shape[0])
    cancel = model.cancel_draws(rng)
    return Realization(travel=travel, service=service, cancel=cancel)


def write_model(model: CalibratedModel, path):
    Path(path).write_text(json.dumps(model.to_dict()))


def read_model(path) -> CalibratedModel:
    doc = json.loads(Path(path).read_text())
    return CalibratedModel(
        mu=np.asarray(doc["mu"], dtype=float),
        sigma=np.asarray(doc["sigma"], dtype=float),
        rate=float(doc["lambda"]),
        gamma=np.asarray(doc["gamma"], dtype=float),
    )
