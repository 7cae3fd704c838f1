"""ABC Shadow transitions for exponential-family Gibbs posteriors.

For a density ``exp(theta . t) / c(theta)`` and a uniform prior, the shadow
acceptance ratio reduces to

    log rho = (psi - theta) . (t(y) - t(x)) + log p(psi) - log p(theta)

where ``x`` is the auxiliary pattern drawn at the sweep's entry parameter.
The normalizing constants of the likelihood and of the posterior cancel, so
nothing here evaluates them. Tempering accepts with ``min(1, rho ** (1/T))``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .models import ModelError, PriorBox, as_theta
from .pattern import PointPattern
from .sampler import AuxChain, MhConfig


@dataclass(frozen=True)
class ShadowConfig:
    """Proposal widths ``delta`` (one per parameter) and inner step count ``m``.

    ``proposal`` is ``"box"`` (independent uniform per coordinate, the
    default) or ``"ball"`` (uniform on the ellipse with semi-axes
    ``delta / 2``; two parameters only).
    """

    delta: tuple[float, ...] = (0.01, 0.01)
    m: int = 200
    aux: MhConfig = MhConfig()
    proposal: str = "box"

    def __post_init__(self):
        d = np.atleast_1d(np.asarray(self.delta, dtype=float))
        if d.ndim != 1 or not np.all(np.isfinite(d)) or not np.all(d > 0):
            raise ValueError(f"every proposal width must be finite and > 0, got {self.delta}")
        object.__setattr__(self, "delta", tuple(float(v) for v in d))
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m}")
        if self.proposal not in ("box", "ball"):
            raise ValueError(f"proposal must be 'box' or 'ball', got {self.proposal!r}")
        if self.proposal == "ball" and len(self.delta) != 2:
            raise ValueError("ball proposals are only supported for two parameters")


@dataclass
class ShadowState:
    """Current parameter plus the persistent auxiliary chain.

    ``aux_stats`` is ``t(x)`` of the auxiliary pattern as drawn at the start
    of the last sweep.
    """

    theta: np.ndarray
    aux: AuxChain
    aux_stats: np.ndarray

    @classmethod
    def start(cls, model, theta, prior: PriorBox, aux_pattern: PointPattern | None = None,
              mh: MhConfig = MhConfig()) -> "ShadowState":
        theta = model.check_theta(theta).copy()
        if not prior.contains(theta):
            raise ModelError(f"initial parameter {theta} lies outside the prior box")
        aux = AuxChain(model, aux_pattern, mh)
        return cls(theta, aux, aux.stats)

    @property
    def aux_pattern(self) -> PointPattern:
        return self.aux.pattern()


def propose(theta, delta, rng: np.random.Generator, ball: bool = False) -> np.ndarray:
    """Draw from the uniform proposal centred at ``theta`` with widths ``delta``."""
    theta = as_theta(theta)
    delta = np.asarray(delta, dtype=float)
    psi = np.empty_like(theta)
    if ball:
        while True:
            v = [2.0 * rng.random() - 1.0 for _ in range(theta.shape[0])]
            if sum(x * x for x in v) <= 1.0:
                break
        for i in range(theta.shape[0]):
            psi[i] = theta[i] + 0.5 * delta[i] * v[i]
    else:
        for i in range(theta.shape[0]):
            psi[i] = theta[i] + delta[i] * (rng.random() - 0.5)
    return psi


def shadow_log_ratio(theta, psi, data_stats, aux_stats, prior: PriorBox) -> float:
    """Log shadow acceptance ratio for ``theta -> psi``; ``-inf`` outside the prior.

    The neighbourhood indicators of the proposal are symmetric and equal to
    one for any ``psi`` the proposal can produce, so they do not appear.
    """
    theta = np.asarray(theta, dtype=float)
    psi = np.asarray(psi, dtype=float)
    data_stats = np.asarray(data_stats, dtype=float)
    aux_stats = np.asarray(aux_stats, dtype=float)
    if not (theta.shape == psi.shape == data_stats.shape == aux_stats.shape):
        raise ModelError(
            f"length mismatch: theta {theta.shape}, psi {psi.shape}, "
            f"t(y) {data_stats.shape}, t(x) {aux_stats.shape}"
        )
    lp_psi = prior.log_prior(psi)
    if lp_psi == -math.inf:
        return -math.inf
    lr = 0.0
    for i in range(theta.shape[0]):
        lr += (psi[i] - theta[i]) * (data_stats[i] - aux_stats[i])
    return float(lr) + lp_psi - prior.log_prior(theta)


def log_acceptance_probability(log_ratio: float, temperature: float = 1.0) -> float:
    """``min(0, log_ratio / T)``; ``-inf`` for a zero-prior proposal."""
    if log_ratio == -math.inf:
        return -math.inf
    return min(0.0, log_ratio / temperature)


def acceptance_probability(log_ratio: float, temperature: float = 1.0) -> float:
    return math.exp(log_acceptance_probability(log_ratio, temperature))


def shadow_sweep(state: ShadowState, data_stats, config: ShadowConfig, prior: PriorBox,
                 temperature: float, rng: np.random.Generator, delta=None) -> int:
    """One shadow iteration: refresh ``x`` at the entry parameter, then ``m`` proposals.

    Updates ``state`` in place and returns the number of accepted proposals.
    ``delta`` overrides ``config.delta`` (the annealer shrinks it).
    """
    if not temperature > 0:
        raise ValueError(f"temperature must be > 0, got {temperature}")
    data_stats = np.asarray(data_stats, dtype=float)
    if data_stats.shape != state.theta.shape:
        raise ModelError(f"data statistics {data_stats.shape} do not match parameter {state.theta.shape}")
    delta = np.asarray(config.delta if delta is None else delta, dtype=float)
    state.aux.run(state.theta, config.aux.steps, rng)
    state.aux_stats = state.aux.stats
    return kernels.shadow_inner(
        state.theta, delta, data_stats, state.aux_stats,
        np.asarray(prior.lower), np.asarray(prior.upper),
        int(config.m), float(temperature), config.proposal == "ball", rng,
    )


def sample_posterior(model, initial_theta, data_stats, config: ShadowConfig, prior: PriorBox,
                     n_sweeps: int, rng: np.random.Generator,
                     aux_pattern: PointPattern | None = None) -> np.ndarray:
    """Untempered shadow chain; one parameter sample per sweep, shape ``(n_sweeps, dim)``."""
    if int(n_sweeps) != n_sweeps or n_sweeps < 1:
        raise ValueError(f"n_sweeps must be a positive integer, got {n_sweeps}")
    state = ShadowState.start(model, initial_theta, prior, aux_pattern, config.aux)
    out = np.empty((n_sweeps, state.theta.shape[0]))
    for i in range(n_sweeps):
        shadow_sweep(state, data_stats, config, prior, 1.0, rng)
        out[i] = state.theta
    return out
