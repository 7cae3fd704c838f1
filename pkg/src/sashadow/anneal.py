"""Simulated annealing over tempered ABC Shadow sweeps.

Each annealing iteration is one shadow sweep (auxiliary refresh plus ``m``
proposals) at temperature ``T_n`` with proposal widths ``delta_n``. Both
shrink geometrically by default; a logarithmic temperature schedule
``T0 / (1 + log(n + 1))`` is also available.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .models import PriorBox
from .sampler import RngStream
from .shadow import ShadowConfig, ShadowState, shadow_sweep

SCHEDULE_KINDS = ("geometric", "logarithmic")


@dataclass(frozen=True)
class AnnealSchedule:
    t0: float = 1e4
    k_t: float = 0.9999
    k_delta: float = 0.99999
    t_min: float = 1e-6
    delta_min: tuple[float, ...] = (1e-4, 1e-4)
    schedule_kind: str = "geometric"

    def __post_init__(self):
        if not self.t0 > 0:
            raise ValueError(f"t0 must be > 0, got {self.t0}")
        if not 0 < self.k_t < 1:
            raise ValueError(f"k_t must lie in (0, 1), got {self.k_t}")
        if not 0 < self.k_delta < 1:
            raise ValueError(f"k_delta must lie in (0, 1), got {self.k_delta}")
        if not self.t_min > 0:
            raise ValueError(f"t_min must be > 0, got {self.t_min}")
        dmin = tuple(float(v) for v in np.atleast_1d(self.delta_min))
        if not all(v > 0 for v in dmin):
            raise ValueError(f"delta_min components must be > 0, got {self.delta_min}")
        object.__setattr__(self, "delta_min", dmin)
        if self.schedule_kind not in SCHEDULE_KINDS:
            raise ValueError(f"schedule_kind must be one of {SCHEDULE_KINDS}, got {self.schedule_kind!r}")


@dataclass(frozen=True)
class RunConfig:
    n_iterations: int = 10**6
    keep_every: int = 10**3

    def __post_init__(self):
        if int(self.n_iterations) != self.n_iterations or self.n_iterations < 1:
            raise ValueError(f"n_iterations must be a positive integer, got {self.n_iterations}")
        if not (int(self.keep_every) == self.keep_every and 1 <= self.keep_every <= self.n_iterations):
            raise ValueError(
                f"keep_every must be an integer in [1, n_iterations={self.n_iterations}], got {self.keep_every}"
            )


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    theta: tuple[float, ...]
    temperature: float
    delta: tuple[float, ...]
    accept_rate: float
    aux_stats: tuple[float, ...]


@dataclass
class MapEstimate:
    theta_final: np.ndarray
    theta_best: np.ndarray
    trace: list[TraceRecord] = field(default_factory=list)
    accept_rate: float = 0.0


def temperature_at(schedule: AnnealSchedule, n: int) -> float:
    if n < 0:
        raise ValueError(f"iteration index must be >= 0, got {n}")
    if schedule.schedule_kind == "geometric":
        t = schedule.t0 * schedule.k_t**n
    else:
        t = schedule.t0 / (1.0 + math.log(n + 1))
    return max(t, schedule.t_min)


def delta_at(schedule: AnnealSchedule, base_delta, n: int) -> np.ndarray:
    if n < 0:
        raise ValueError(f"iteration index must be >= 0, got {n}")
    base = np.asarray(base_delta, dtype=float)
    dmin = np.broadcast_to(np.asarray(schedule.delta_min, dtype=float), base.shape)
    return np.maximum(base * schedule.k_delta**n, dmin)


def proxy_score(theta, data_stats, prior: PriorBox) -> float:
    """``theta . t(y) + log p(theta)``: the posterior score without ``log c(theta)``."""
    return float(np.dot(theta, data_stats)) + prior.log_prior(theta)


def run_sa(model, data_stats, prior: PriorBox, shadow_config: ShadowConfig,
           schedule: AnnealSchedule, run_config: RunConfig, initial_theta,
           rng: np.random.Generator, progress=None) -> MapEstimate:
    """Anneal the shadow chain and return the final and best recorded parameters.

    A trace record is written after every ``keep_every``-th sweep and after
    the last one. ``progress``, if given, is called as ``progress(n)`` after
    each recorded sweep.
    """
    data_stats = np.asarray(data_stats, dtype=float)
    state = ShadowState.start(model, initial_theta, prior, None, shadow_config.aux)
    if data_stats.shape != state.theta.shape:
        raise ValueError(f"data statistics {data_stats.shape} do not match parameter {state.theta.shape}")
    base_delta = np.asarray(shadow_config.delta, dtype=float)
    m = shadow_config.m
    n_iter = run_config.n_iterations
    keep = run_config.keep_every
    trace = []
    total_acc = 0
    for n in range(n_iter):
        t = temperature_at(schedule, n)
        d = delta_at(schedule, base_delta, n)
        acc = shadow_sweep(state, data_stats, shadow_config, prior, t, rng, delta=d)
        total_acc += acc
        if (n + 1) % keep == 0 or n == n_iter - 1:
            trace.append(
                TraceRecord(
                    iteration=n,
                    theta=tuple(state.theta.tolist()),
                    temperature=t,
                    delta=tuple(d.tolist()),
                    accept_rate=acc / m,
                    aux_stats=tuple(state.aux_stats.tolist()),
                )
            )
            if progress is not None:
                progress(n)
    scores = [proxy_score(rec.theta, data_stats, prior) for rec in trace]
    best = trace[int(np.argmax(scores))]
    return MapEstimate(
        theta_final=state.theta.copy(),
        theta_best=np.array(best.theta),
        trace=trace,
        accept_rate=total_acc / (n_iter * m),
    )


def _run_chain(args):
    model, data_stats, prior, shadow_config, schedule, run_config, initial_theta, seed, stream = args
    rng = RngStream(seed, stream).generator()
    return run_sa(model, data_stats, prior, shadow_config, schedule, run_config, initial_theta, rng)


def run_multistart(model, data_stats, prior: PriorBox, shadow_config: ShadowConfig,
                   schedule: AnnealSchedule, run_config: RunConfig, initial_theta,
                   seed: int, chains: int, workers: int | None = None):
    """Run ``chains`` independent annealers on streams ``0 .. chains-1`` of ``seed``.

    Returns ``(best_index, estimates)`` where the best chain maximizes the
    proxy score of its final parameter; ties go to the lowest index.
    """
    if chains < 1:
        raise ValueError(f"chains must be >= 1, got {chains}")
    jobs = [
        (model, data_stats, prior, shadow_config, schedule, run_config, initial_theta, seed, k)
        for k in range(chains)
    ]
    if chains == 1 or workers == 1:
        estimates = [_run_chain(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            estimates = list(pool.map(_run_chain, jobs))
    scores = [proxy_score(e.theta_final, data_stats, prior) for e in estimates]
    return int(np.argmax(scores)), estimates
