"""Birth/death Metropolis-Hastings dynamics for Gibbs point processes.

The chain proposes a birth with probability ``birth_probability`` (a uniform
point in the window) and otherwise the death of a uniformly chosen point.
With ``lambda`` the Papangelou intensity and ``q = p_b / (1 - p_b)`` the
birth acceptance ratio is ``lambda(u; y) |W| / ((n + 1) q)``; the death
ratio is its reciprocal. No move proposals are made.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .pattern import PointPattern


@dataclass(frozen=True)
class MhConfig:
    steps: int = 100
    birth_probability: float = 0.5

    def __post_init__(self):
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError(f"MH steps must be a positive integer, got {self.steps}")
        if not 0.0 < self.birth_probability < 1.0:
            raise ValueError(f"birth probability must lie in (0, 1), got {self.birth_probability}")


@dataclass(frozen=True)
class RngStream:
    """Seed plus stream id; equal pairs give identical draw sequences.

    Distinct ``stream_id`` values under one seed give statistically
    independent streams (``SeedSequence`` spawn keys).
    """

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(ss))


class AuxChain:
    """Mutable birth/death chain state backed by growable coordinate buffers.

    This is what a shadow sweep carries between iterations; ``stats`` is
    kept up to date incrementally from the kernel's pair deltas.
    """

    def __init__(self, model, pattern: PointPattern | None = None, config: MhConfig = MhConfig()):
        self.model = model
        self.config = config
        if pattern is None:
            pattern = PointPattern.empty(model.window)
        cap = max(64, 2 * (pattern.n + config.steps))
        self._xs = np.zeros(cap)
        self._ys = np.zeros(cap)
        self.n = pattern.n
        self._xs[: self.n] = pattern.xy[:, 0]
        self._ys[: self.n] = pattern.xy[:, 1]
        st = model.suff_stats(pattern)
        self.n_pairs = int(st[1]) if st.shape[0] > 1 else 0

    @property
    def stats(self) -> np.ndarray:
        full = np.array([float(self.n), float(self.n_pairs)])
        return full[: self.model.dim]

    def pattern(self) -> PointPattern:
        xy = np.column_stack([self._xs[: self.n], self._ys[: self.n]])
        return PointPattern(self.model.window, xy, check=False)

    def _reserve(self, extra: int) -> None:
        need = self.n + extra
        if need > self._xs.shape[0]:
            cap = max(need, 2 * self._xs.shape[0])
            self._xs = np.concatenate([self._xs, np.zeros(cap - self._xs.shape[0])])
            self._ys = np.concatenate([self._ys, np.zeros(cap - self._ys.shape[0])])

    def run(self, theta, steps: int, rng: np.random.Generator) -> None:
        log_beta, log_gamma, r = self.model.interaction(theta)
        self._reserve(steps)
        self.n, dpairs = kernels.mh_run(
            self._xs, self._ys, self.n, int(steps), log_beta, log_gamma, r,
            self.model.window.as_tuple(), self.config.birth_probability, rng,
        )
        self.n_pairs += dpairs


def birth_log_ratio(model, theta, pattern: PointPattern, candidate, birth_probability: float = 0.5) -> float:
    """Log acceptance ratio for adding ``candidate`` to ``pattern``."""
    q = birth_probability / (1.0 - birth_probability)
    lam = model.log_conditional_intensity(theta, pattern, candidate)
    return lam + math.log(pattern.window.area) - math.log(pattern.n + 1) - math.log(q)


def death_log_ratio(model, theta, pattern: PointPattern, index: int, birth_probability: float = 0.5) -> float:
    """Log acceptance ratio for deleting point ``index``: minus the reverse birth ratio."""
    rest = pattern.without_point(index)
    return -birth_log_ratio(model, theta, rest, pattern[index], birth_probability)


def mh_step(model, theta, pattern: PointPattern, rng: np.random.Generator,
            birth_probability: float = 0.5) -> PointPattern:
    """One birth-or-death transition; returns the new pattern."""
    theta = model.check_theta(theta)
    chain = AuxChain(model, pattern, MhConfig(1, birth_probability))
    chain.run(theta, 1, rng)
    return chain.pattern()


def sample_auxiliary(model, theta, initial: PointPattern, config: MhConfig,
                     rng: np.random.Generator) -> PointPattern:
    """Apply exactly ``config.steps`` transitions starting from ``initial``."""
    theta = model.check_theta(theta)
    chain = AuxChain(model, initial, config)
    chain.run(theta, config.steps, rng)
    return chain.pattern()


def reference_samples(model, theta, burn_in: int, n_samples: int, spacing: int,
                      rng: np.random.Generator, birth_probability: float = 0.5,
                      keep_patterns: bool = False):
    """Sufficient statistics of ``n_samples`` thinned states after a burn-in from empty.

    Returns an ``(n_samples, dim)`` array, plus the list of sampled patterns
    when ``keep_patterns`` is set.
    """
    for name, v in (("burn_in", burn_in), ("n_samples", n_samples), ("spacing", spacing)):
        if int(v) != v or v < 1:
            raise ValueError(f"{name} must be a positive integer, got {v}")
    theta = model.check_theta(theta)
    chain = AuxChain(model, None, MhConfig(spacing, birth_probability))
    chain.run(theta, burn_in, rng)
    out = np.empty((n_samples, model.dim))
    patterns = []
    for i in range(n_samples):
        # the first sample is the post-burn-in state itself
        if i > 0:
            chain.run(theta, spacing, rng)
        out[i] = chain.stats
        if keep_patterns:
            patterns.append(chain.pattern())
    if keep_patterns:
        return out, patterns
    return out


def reference_stats(model, theta, burn_in: int, n_samples: int, spacing: int,
                    rng: np.random.Generator, birth_probability: float = 0.5) -> np.ndarray:
    """Componentwise mean of thinned sufficient statistics: the MH stand-in for exact sampling."""
    return reference_samples(model, theta, burn_in, n_samples, spacing, rng, birth_probability).mean(axis=0)
