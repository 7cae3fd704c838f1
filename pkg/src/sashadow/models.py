"""Exponential-family Gibbs point-process models and the uniform box prior.

Densities are with respect to the unit-rate Poisson process on the window and
are only ever handled unnormalized, as ``exp(theta . t(y))``. The one exception
is :meth:`PoissonModel.poisson_log_normalizing`, whose closed form exists and
serves as a test oracle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .pattern import (
    UNIT_SQUARE,
    PatternError,
    PointPattern,
    Window,
    _check_inside,
    _check_radius,
    _neighbour_count,
    suff_stats,
)


class ModelError(ValueError):
    """Invalid model parameters or mismatched vector lengths."""


def as_theta(theta, dim: int | None = None) -> np.ndarray:
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if theta.ndim != 1:
        raise ModelError(f"parameter vector must be one-dimensional, got shape {theta.shape}")
    if not np.all(np.isfinite(theta)):
        raise ModelError(f"parameter vector must be finite, got {theta}")
    if dim is not None and theta.shape[0] != dim:
        raise ModelError(f"expected parameter vector of length {dim}, got {theta.shape[0]}")
    return theta


def _check_same_length(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ModelError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")


@dataclass(frozen=True)
class StraussModel:
    """Strauss process with density proportional to ``beta^n(y) gamma^s_r(y)``.

    Parameters are always ``theta = (log beta, log gamma)``; ``gamma > 1`` is
    not integrable and is rejected by :meth:`check_theta`.
    """

    r: float = 0.1
    window: Window = UNIT_SQUARE
    dim: int = field(default=2, init=False)

    def __post_init__(self):
        try:
            _check_radius(self.r)
        except PatternError as exc:
            raise ModelError(str(exc)) from None

    @staticmethod
    def theta_from(beta: float, gamma: float) -> np.ndarray:
        if not (beta > 0 and 0 < gamma <= 1):
            raise ModelError(f"need beta > 0 and 0 < gamma <= 1, got beta={beta}, gamma={gamma}")
        return np.array([math.log(beta), math.log(gamma)])

    def check_theta(self, theta) -> np.ndarray:
        theta = as_theta(theta, self.dim)
        if theta[1] > 0:
            raise ModelError(f"log gamma must be <= 0 (gamma <= 1), got {theta[1]}")
        return theta

    def suff_stats(self, pattern: PointPattern) -> np.ndarray:
        return suff_stats(pattern, self.r)

    def interaction(self, theta) -> tuple[float, float, float]:
        """``(log beta, log gamma, r)`` as consumed by the sampling kernels."""
        return float(theta[0]), float(theta[1]), float(self.r)

    def log_unnormalized_density(self, theta, stats) -> float:
        """``theta . t(y)``, the negative energy."""
        theta = as_theta(theta)
        stats = np.asarray(stats, dtype=float)
        _check_same_length(theta, stats)
        return float(theta @ stats)

    def log_conditional_intensity(self, theta, pattern: PointPattern, candidate) -> float:
        """Log Papangelou intensity ``log beta + k log gamma``, k = neighbours within r."""
        theta = as_theta(theta, self.dim)
        _check_inside(pattern.window, candidate)
        k = _neighbour_count(pattern, float(candidate[0]), float(candidate[1]), self.r)
        return float(theta[0] + theta[1] * k)


@dataclass(frozen=True)
class PoissonModel:
    """Homogeneous Poisson process, ``f(y | theta) = exp(theta n(y))``."""

    window: Window = UNIT_SQUARE
    dim: int = field(default=1, init=False)

    def check_theta(self, theta) -> np.ndarray:
        return as_theta(theta, self.dim)

    def suff_stats(self, pattern: PointPattern) -> np.ndarray:
        return np.array([float(pattern.n)])

    def interaction(self, theta) -> tuple[float, float, float]:
        # radius 0 switches the kernels' neighbour scan off
        return float(theta[0]), 0.0, 0.0

    def log_unnormalized_density(self, theta, stats) -> float:
        theta = as_theta(theta)
        stats = np.asarray(stats, dtype=float)
        _check_same_length(theta, stats)
        return float(theta @ stats)

    def log_conditional_intensity(self, theta, pattern: PointPattern, candidate) -> float:
        theta = as_theta(theta, self.dim)
        _check_inside(pattern.window, candidate)
        return float(theta[0])

    def poisson_log_normalizing(self, theta) -> float:
        """Exact ``log c(theta) = |W| (e^theta - 1)``. Used by test oracles only."""
        theta = as_theta(theta, 1)
        return self.window.area * math.expm1(float(theta[0]))


@dataclass(frozen=True)
class PriorBox:
    """Uniform prior on the closed box ``[lower, upper]``."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        if lo.ndim != 1 or lo.shape != hi.shape:
            raise ModelError(f"prior bounds must be vectors of equal length, got {lo} and {hi}")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi)) and np.all(lo < hi)):
            raise ModelError(f"prior box needs finite lower < upper, got {lo} and {hi}")
        object.__setattr__(self, "lower", tuple(float(v) for v in lo))
        object.__setattr__(self, "upper", tuple(float(v) for v in hi))

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def log_volume(self) -> float:
        return float(sum(math.log(h - l) for l, h in zip(self.lower, self.upper)))

    def contains(self, theta) -> bool:
        return all(l <= t <= h for l, t, h in zip(self.lower, theta, self.upper))

    def log_prior(self, theta) -> float:
        """``-log volume`` inside the box, ``-inf`` outside."""
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.dim,):
            raise ModelError(f"expected parameter vector of length {self.dim}, got shape {theta.shape}")
        return -self.log_volume if self.contains(theta) else -math.inf

    def center(self) -> np.ndarray:
        return (np.asarray(self.lower) + np.asarray(self.upper)) / 2.0


DEFAULT_PRIOR = PriorBox((0.0, -7.0), (7.0, 0.0))
