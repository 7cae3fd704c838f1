"""Acceptance criteria, one test per criterion.

Each test records a one-line verdict that is printed in the pytest terminal
summary under "acceptance criteria".
"""
import json
import math
import time

import mpmath
import numpy as np
import pytest
import yaml

from sashadow import (
    DEFAULT_PRIOR,
    AnnealSchedule,
    MhConfig,
    Point,
    PointPattern,
    PoissonModel,
    PriorBox,
    RngStream,
    ShadowConfig,
    ShadowState,
    StraussModel,
    Window,
    count_close_pairs_bruteforce,
    delta_at,
    log_acceptance_probability,
    shadow_log_ratio,
    shadow_sweep,
    stat_delta_insert,
    stat_delta_remove,
    suff_stats,
    temperature_at,
)
from sashadow.cli import main
from sashadow.io import read_trace_csv
from sashadow.sampler import AuxChain

from .conftest import ACCEPTANCE_RESULTS

REFERENCE_STATS = np.array([45.30, 17.99])
REFERENCE_THETA = np.array([4.60, -0.69])
MAP_SEEDS = (0, 1, 2, 3, 4)


def record(key, ok, detail):
    ACCEPTANCE_RESULTS[key] = (bool(ok), detail)
    print(f"[{'PASS' if ok else 'FAIL'}] {key}: {detail}")


def write_cfg(path, cfg):
    path.write_text(yaml.safe_dump(cfg))
    return str(path)


def test_c1_strauss_reference_statistics(tmp_path):
    cfg = write_cfg(tmp_path / "c1.yaml", {
        "model": {"theta": REFERENCE_THETA.tolist(), "r": 0.1},
        "simulate": {"burn_in": 100_000, "n_samples": 1000, "spacing": 100},
        "rng": {"seed": 1},
    })
    t0 = time.perf_counter()
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "sim")]) == 0
    wall = time.perf_counter() - t0
    mean = np.array(json.loads((tmp_path / "sim" / "summary.json").read_text())["mean_stats"])
    rel = np.abs(mean / REFERENCE_STATS - 1)
    ok = bool(np.all(rel <= 0.10)) and wall < 120
    record("C1 reference statistics", ok,
           f"mean (n, s_r) = ({mean[0]:.2f}, {mean[1]:.2f}) vs (45.30, 17.99), "
           f"rel. dev. ({rel[0]:.3f}, {rel[1]:.3f}) <= 0.10, {wall:.1f}s")
    assert ok


@pytest.fixture(scope="module")
def desk_runs(tmp_path_factory):
    """The five desk-scale ``map`` runs, plus a repeat of the first for determinism."""
    root = tmp_path_factory.mktemp("c2")
    cfg = write_cfg(root / "desk.yaml", {
        "anneal": {"n_iterations": 100_000, "keep_every": 100},
        "data": {"stats": REFERENCE_STATS.tolist()},
    })
    runs = {}
    t0 = time.perf_counter()
    for seed in MAP_SEEDS:
        out = root / f"seed{seed}"
        assert main(["map", "--config", cfg, "--seed", str(seed), "--out", str(out)]) == 0
        runs[seed] = out
    wall = time.perf_counter() - t0
    repeat = root / "seed0_repeat"
    assert main(["map", "--config", cfg, "--seed", "0", "--out", str(repeat)]) == 0
    return runs, repeat, wall


def test_c2_map_recovery_desk_scale(desk_runs):
    runs, _, wall = desk_runs
    finals = {s: np.array(json.loads((out / "summary.json").read_text())["theta_final"]) for s, out in runs.items()}
    passed = [s for s, th in finals.items() if np.all(np.abs(th - REFERENCE_THETA) <= 0.25)]
    ok = len(passed) >= 4 and wall < 15 * 60
    detail = ", ".join(f"seed {s}: ({th[0]:.3f}, {th[1]:.3f})" for s, th in finals.items())
    record("C2 MAP recovery", ok, f"{len(passed)}/5 within +-0.25 of (4.60, -0.69) [{detail}], {wall:.0f}s")
    assert ok


def test_c2_annealing_contracts_the_chain(desk_runs):
    runs, _, _ = desk_runs
    ok = True
    for out in runs.values():
        th = np.array([r.theta for r in read_trace_csv(out / "trace.csv")])
        k = len(th) // 10
        ok &= bool(np.all(th[-k:].std(0) < th[:k].std(0)))
    record("C2b trace contraction", ok, "sd over last 10% of trace < sd over first 10%, every seed")
    assert ok


def test_c2_diagnostic_compressed_schedule(tmp_path):
    """Not a criterion. Same sweep budget with the full-length cooling compressed tenfold.

    With k_t = 0.999 and k_delta = 0.9999 the temperature reaches its floor
    within 10^5 sweeps, as the full 10^6-sweep schedule does, so the
    final state sits at the mode instead of being a draw at T ~ 0.45.
    """
    cfg = write_cfg(tmp_path / "fast.yaml", {
        "anneal": {"n_iterations": 100_000, "keep_every": 1000, "k_t": 0.999, "k_delta": 0.9999},
        "data": {"stats": REFERENCE_STATS.tolist()},
    })
    finals = []
    for seed in MAP_SEEDS:
        out = tmp_path / f"s{seed}"
        assert main(["map", "--config", cfg, "--seed", str(seed), "--out", str(out)]) == 0
        finals.append(json.loads((out / "summary.json").read_text())["theta_final"])
    finals = np.array(finals)
    ok = bool(np.all(np.abs(finals - REFERENCE_THETA) <= 0.25)) and bool(np.all(finals.std(0) < 0.05))
    record("C2 diagnostic (compressed schedule, not a criterion)", ok,
           f"finals mean ({finals[:, 0].mean():.3f}, {finals[:, 1].mean():.3f}), "
           f"spread ({finals[:, 0].std():.3f}, {finals[:, 1].std():.3f}); all 5 within +-0.25: {ok}")
    assert ok


def exact_poisson_posterior_mh(n_obs, area, lo, hi, steps, rng):
    """Random-walk Metropolis on the exact Poisson posterior, using the closed-form constant."""
    model = PoissonModel(Window(0, area, 0, 1))

    def log_post(t):
        return n_obs * t - model.poisson_log_normalizing([t]) if lo <= t <= hi else -math.inf

    t = (lo + hi) / 2
    lp = log_post(t)
    out = np.empty(steps)
    for i in range(steps):
        prop = t + 0.25 * rng.standard_normal()
        lq = log_post(prop)
        if math.log(rng.random()) < lq - lp:
            t, lp = prop, lq
        out[i] = t
    return out[steps // 10:]


def test_c3_poisson_oracle_equivalence(tmp_path):
    cfg = write_cfg(tmp_path / "c3.yaml", {
        "model": {"kind": "poisson", "beta": 100.0},
        "prior": {"lower": [0.0], "upper": [7.0]},
        "shadow": {"delta": [0.01]},
        "anneal": {"delta_min": [1e-4]},
        "posterior": {"n_sweeps": 2500, "discard": 500},
        "data": {"stats": [100.0]},
        "rng": {"seed": 1},
    })
    t0 = time.perf_counter()
    assert main(["sample-posterior", "--config", cfg, "--out", str(tmp_path / "post")]) == 0
    wall = time.perf_counter() - t0
    summary = json.loads((tmp_path / "post" / "summary.json").read_text())
    mean, sd = summary["posterior_mean"][0], summary["posterior_sd"][0]

    oracle = exact_poisson_posterior_mh(100, 1.0, 0.0, 7.0, 400_000, np.random.default_rng(12))
    o_mean, o_sd = oracle.mean(), oracle.std()
    # the oracle itself is checked against quadrature of the same density
    grid = np.linspace(0, 7, 200_001)
    w = np.exp(100 * grid - np.expm1(grid) - (100 * math.log(100) - 99))
    q_mean = np.trapezoid(grid * w, grid) / np.trapezoid(w, grid)
    q_sd = math.sqrt(np.trapezoid((grid - q_mean) ** 2 * w, grid) / np.trapezoid(w, grid))
    assert abs(o_mean - q_mean) < 0.01 and abs(o_sd / q_sd - 1) < 0.05

    ok = abs(mean - o_mean) <= 0.05 and abs(sd / o_sd - 1) <= 0.25 and wall < 300
    record("C3 Poisson oracle", ok,
           f"shadow mean {mean:.4f} sd {sd:.4f} vs exact MH mean {o_mean:.4f} sd {o_sd:.4f} "
           f"(|d mean| {abs(mean - o_mean):.4f} <= 0.05, sd rel. {abs(sd / o_sd - 1):.3f} <= 0.25), {wall:.1f}s")
    assert ok


def test_c4_statistics_correctness():
    rng = np.random.default_rng(404)
    t0 = time.perf_counter()
    mismatches = 0
    for _ in range(1000):
        n = int(rng.integers(0, 201))
        r = float(rng.uniform(0.01, 0.3))
        p = PointPattern.uniform(Window(), n, rng)
        if suff_stats(p, r).tolist() != [n, count_close_pairs_bruteforce(p, r)]:
            mismatches += 1

    # incremental updates through the pattern-level deltas
    r = 0.1
    p = PointPattern.uniform(Window(), 60, rng)
    t = suff_stats(p, r)
    delta_mismatch = 0
    for _ in range(10_000):
        if p.n == 0 or rng.random() < 0.5:
            u = Point(*rng.random(2))
            t = t + stat_delta_insert(p, u, r)
            p = p.with_point(u)
        else:
            i = int(rng.integers(p.n))
            t = t - stat_delta_remove(p, i, r)
            p = p.without_point(i)
        delta_mismatch += t.tolist() != suff_stats(p, r).tolist()

    # incremental updates inside the sampling kernel
    chain = AuxChain(StraussModel(r))
    kernel_mismatch = 0
    krng = RngStream(404).generator()
    for _ in range(10_000):
        chain.run([4.6, -0.69], 1, krng)
        kernel_mismatch += chain.stats.tolist() != suff_stats(chain.pattern(), r).tolist()
    wall = time.perf_counter() - t0
    ok = mismatches == 0 and delta_mismatch == 0 and kernel_mismatch == 0
    record("C4 statistics correctness", ok,
           f"{mismatches} mismatches on 1000 patterns, {delta_mismatch} on 10^4 delta updates, "
           f"{kernel_mismatch} on 10^4 kernel updates, {wall:.1f}s")
    assert ok


def test_c5_shadow_invariants():
    rng = np.random.default_rng(505)
    failures = []
    for _ in range(10_000):
        theta = rng.uniform([0, -7], [7, 0])
        psi = rng.uniform([0, -7], [7, 0])
        ty = rng.uniform(0, [300, 3000])
        tx = rng.uniform(0, [300, 3000])
        fwd = shadow_log_ratio(theta, psi, ty, tx, DEFAULT_PRIOR)
        if not math.isclose(fwd, -shadow_log_ratio(psi, theta, ty, tx, DEFAULT_PRIOR), rel_tol=1e-12, abs_tol=1e-9):
            failures.append("antisymmetry")
        if shadow_log_ratio(theta, theta, ty, tx, DEFAULT_PRIOR) != 0.0:
            failures.append("psi == theta")
        shift = rng.uniform(-1000, 1000, 2)
        if not math.isclose(fwd, shadow_log_ratio(theta, psi, ty + shift, tx + shift, DEFAULT_PRIOR),
                            rel_tol=1e-9, abs_tol=1e-6):
            failures.append("translation")
        lr = -abs(fwd) - 1e-3
        t = 10 ** rng.uniform(-3, 4)
        if not log_acceptance_probability(lr, t) < log_acceptance_probability(lr, t * rng.uniform(1.01, 10)):
            failures.append("temperature monotonicity")

    prior = PriorBox((0.0, -1.0), (1.0, 0.0))
    cfg = ShadowConfig(delta=(0.8, 0.8), m=5, aux=MhConfig(5))
    state = ShadowState.start(StraussModel(0.1), [1.0, 0.0], prior)
    srng = RngStream(505).generator()
    for i in range(10_000):
        shadow_sweep(state, REFERENCE_STATS, cfg, prior, 10.0 ** ((i % 9) - 4), srng)
        if not prior.contains(state.theta):
            failures.append("box confinement")
            break
    ok = not failures
    record("C5 shadow invariants", ok,
           "antisymmetry, psi==theta, translation, temperature monotonicity on 10^4 random cases; "
           f"box confinement over 10^4 sweeps; failures: {sorted(set(failures)) or 'none'}")
    assert ok


def test_c6_schedule_arithmetic():
    mpmath.mp.prec = 200
    sched = AnnealSchedule()  # t0 = 1e4, k_t = 0.9999, k_delta = 0.99999
    worst = 0.0
    for n in (0, 1, 10**3, 10**6):
        t_exact = max(mpmath.mpf(sched.t0) * mpmath.mpf(sched.k_t) ** n, mpmath.mpf(sched.t_min))
        d_exact = max(mpmath.mpf(0.01) * mpmath.mpf(sched.k_delta) ** n, mpmath.mpf(sched.delta_min[0]))
        for got, exact in ((temperature_at(sched, n), t_exact), (delta_at(sched, [0.01, 0.01], n)[0], d_exact)):
            err = float(abs(mpmath.mpf(got) - exact) / exact) / np.finfo(float).eps
            worst = max(worst, err)
    # repeated-squaring pow error grows slowly with n; a handful of ulps is the floor for double pow
    ok = worst <= 4.0 and temperature_at(sched, 1) == pytest.approx(9999.0, rel=1e-15)
    record("C6 schedule arithmetic", ok, f"worst relative error {worst:.2f} ulp at n in {{0, 1, 1e3, 1e6}} (<= 4)")
    assert ok


def test_c7_determinism(desk_runs):
    runs, repeat, _ = desk_runs
    same = all((runs[0] / f).read_bytes() == (repeat / f).read_bytes() for f in ("trace.csv", "summary.json"))
    record("C7 determinism", same, "two map runs, seed 0: trace.csv and summary.json byte-identical")
    assert same
