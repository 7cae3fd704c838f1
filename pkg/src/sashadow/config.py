"""YAML run configuration with the reference Strauss experiment as defaults.

A user file only needs the keys it changes; everything else is filled from
:data:`DEFAULTS`. :func:`resolve` returns the merged, validated dictionary
that is echoed next to every run's outputs, and re-running from that echo
reproduces the run.
"""
from __future__ import annotations

import copy
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from .anneal import AnnealSchedule, RunConfig
from .models import ModelError, PoissonModel, PriorBox, StraussModel
from .pattern import PatternError, Window, read_pattern_csv
from .sampler import MhConfig
from .shadow import ShadowConfig


class ConfigError(ValueError):
    """Invalid or inconsistent configuration."""


DEFAULTS: dict[str, Any] = {
    "model": {
        "kind": "strauss",
        "beta": 100.0,
        "gamma": 0.5,
        "r": 0.1,
        "window": [0.0, 1.0, 0.0, 1.0],
    },
    "prior": {"lower": [0.0, -7.0], "upper": [7.0, 0.0]},
    "shadow": {
        "delta": [0.01, 0.01],
        "m": 200,
        "aux_mh_steps": 100,
        "birth_probability": 0.5,
        "proposal": "box",
    },
    "anneal": {
        "t0": 1.0e4,
        "k_t": 0.9999,
        "k_delta": 0.99999,
        "t_min": 1.0e-6,
        "delta_min": [1.0e-4, 1.0e-4],
        "schedule_kind": "geometric",
        "n_iterations": 1_000_000,
        "keep_every": 1000,
        "initial_theta": None,
    },
    "posterior": {"n_sweeps": 2500, "discard": 500, "initial_theta": None},
    "simulate": {"burn_in": 100_000, "n_samples": 1000, "spacing": 100, "dump_patterns": False},
    "data": {"stats": [45.30, 17.99], "pattern": None},
    "rng": {"seed": 1, "streams": 1},
}


def _merge(base: dict, override: dict, path: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, val in override.items():
        where = f"{path}{key}"
        if key not in base:
            raise ConfigError(f"unknown config key '{where}'")
        if isinstance(base[key], dict):
            if not isinstance(val, dict):
                raise ConfigError(f"'{where}' must be a mapping")
            out[key] = _merge(base[key], val, where + ".")
        else:
            out[key] = val
    return out


def load_yaml(path) -> dict:
    path = Path(path)
    try:
        with path.open() as fh:
            raw = yaml.safe_load(fh) or {}
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must be a mapping at top level")
    return raw


def resolve(user: dict | None = None, base_dir: Path | None = None) -> dict:
    """Merge ``user`` over the defaults and check cross-field invariants.

    Mutually exclusive keys (``beta``/``gamma`` vs ``theta``, ``stats`` vs
    ``pattern``): whichever the user sets wins over the defaults, and setting
    both is an error.
    """
    user = copy.deepcopy(user or {})
    base = copy.deepcopy(DEFAULTS)
    umodel = user.get("model", {}) or {}
    if "theta" in umodel:
        if "beta" in umodel or "gamma" in umodel:
            raise ConfigError("model: give either beta/gamma or theta, not both")
        del base["model"]["beta"], base["model"]["gamma"]
        base["model"]["theta"] = None
    if umodel.get("kind") == "poisson":
        base["model"].pop("gamma", None)
        base["model"].pop("r", None)
        base["prior"] = {"lower": [0.0], "upper": [7.0]}
        base["shadow"]["delta"] = [0.01]
        base["anneal"]["delta_min"] = [1.0e-4]
    udata = user.get("data", {}) or {}
    if udata.get("pattern") is not None:
        if udata.get("stats") is not None:
            raise ConfigError("data: give either stats or pattern, not both")
        base["data"]["stats"] = None
    cfg = _merge(base, user)

    if cfg["model"]["kind"] not in ("strauss", "poisson"):
        raise ConfigError(f"model.kind must be 'strauss' or 'poisson', got {cfg['model']['kind']!r}")
    if (cfg["data"]["stats"] is None) == (cfg["data"]["pattern"] is None):
        raise ConfigError("data: exactly one of stats or pattern is required")
    if cfg["data"]["pattern"] is not None:
        p = Path(cfg["data"]["pattern"])
        if not p.is_absolute() and base_dir is not None:
            p = base_dir / p
        if not p.is_file():
            raise ConfigError(f"data.pattern file not found: {p}")
        cfg["data"]["pattern"] = str(p.resolve())
    # validation by construction
    build(cfg)
    return cfg


def load(path=None, overrides: dict | None = None) -> dict:
    user = load_yaml(path) if path is not None else {}
    for section, vals in (overrides or {}).items():
        user.setdefault(section, {}).update(vals)
    base_dir = Path(path).parent if path is not None else None
    return resolve(user, base_dir)


def dump(cfg: dict, path) -> None:
    with Path(path).open("w") as fh:
        yaml.safe_dump(cfg, fh, sort_keys=False)


@dataclass
class Run:
    """Typed objects built from a resolved configuration."""

    model: Any
    theta_true: np.ndarray | None
    prior: PriorBox
    shadow: ShadowConfig
    schedule: AnnealSchedule
    run: RunConfig
    initial_theta: np.ndarray
    posterior_initial_theta: np.ndarray
    data_stats: np.ndarray
    seed: int
    streams: int


def _floats(v, name):
    try:
        return [float(x) for x in np.atleast_1d(v)]
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a number or list of numbers, got {v!r}") from None


def build(cfg: dict) -> Run:
    try:
        return _build(cfg)
    except (ModelError, PatternError, ValueError, TypeError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None


def _build(cfg: dict) -> Run:
    mc = cfg["model"]
    window = Window(*_floats(mc["window"], "model.window"))
    if mc["kind"] == "strauss":
        model = StraussModel(float(mc["r"]), window)
        if mc.get("theta") is not None:
            theta = model.check_theta(_floats(mc["theta"], "model.theta"))
        else:
            theta = StraussModel.theta_from(float(mc["beta"]), float(mc["gamma"]))
    else:
        model = PoissonModel(window)
        if mc.get("theta") is not None:
            theta = model.check_theta(_floats(mc["theta"], "model.theta"))
        else:
            beta = float(mc["beta"])
            if not beta > 0:
                raise ConfigError(f"model.beta must be > 0, got {beta}")
            theta = np.array([math.log(beta)])

    prior = PriorBox(tuple(_floats(cfg["prior"]["lower"], "prior.lower")),
                     tuple(_floats(cfg["prior"]["upper"], "prior.upper")))
    if prior.dim != model.dim:
        raise ConfigError(f"prior has {prior.dim} components but the model has {model.dim}")

    sc = cfg["shadow"]
    shadow = ShadowConfig(
        delta=tuple(_floats(sc["delta"], "shadow.delta")),
        m=sc["m"],
        aux=MhConfig(sc["aux_mh_steps"], float(sc["birth_probability"])),
        proposal=sc["proposal"],
    )
    if len(shadow.delta) != model.dim:
        raise ConfigError(f"shadow.delta has {len(shadow.delta)} components but the model has {model.dim}")

    ac = cfg["anneal"]
    schedule = AnnealSchedule(
        t0=float(ac["t0"]), k_t=float(ac["k_t"]), k_delta=float(ac["k_delta"]),
        t_min=float(ac["t_min"]), delta_min=tuple(_floats(ac["delta_min"], "anneal.delta_min")),
        schedule_kind=ac["schedule_kind"],
    )
    if len(schedule.delta_min) != model.dim:
        raise ConfigError(f"anneal.delta_min has {len(schedule.delta_min)} components but the model has {model.dim}")
    run = RunConfig(ac["n_iterations"], ac["keep_every"])

    def start(v, name):
        th = prior.center() if v is None else model.check_theta(_floats(v, name))
        if not prior.contains(th):
            raise ConfigError(f"{name} {list(th)} lies outside the prior box")
        return np.asarray(th, dtype=float)

    initial = start(ac["initial_theta"], "anneal.initial_theta")
    post_initial = start(cfg["posterior"]["initial_theta"], "posterior.initial_theta")
    pc = cfg["posterior"]
    if int(pc["n_sweeps"]) != pc["n_sweeps"] or pc["n_sweeps"] < 1:
        raise ConfigError(f"posterior.n_sweeps must be a positive integer, got {pc['n_sweeps']}")
    if int(pc["discard"]) != pc["discard"] or not 0 <= pc["discard"] < pc["n_sweeps"]:
        raise ConfigError(f"posterior.discard must be an integer in [0, n_sweeps), got {pc['discard']}")
    sim = cfg["simulate"]
    for key in ("burn_in", "n_samples", "spacing"):
        if int(sim[key]) != sim[key] or sim[key] < 1:
            raise ConfigError(f"simulate.{key} must be a positive integer, got {sim[key]}")

    dc = cfg["data"]
    if dc["stats"] is not None:
        data_stats = np.array(_floats(dc["stats"], "data.stats"))
    else:
        data_stats = model.suff_stats(read_pattern_csv(dc["pattern"], window))
    if data_stats.shape != (model.dim,):
        raise ConfigError(f"data.stats has {data_stats.shape[0]} components but the model has {model.dim}")

    rc = cfg["rng"]
    seed, streams = rc["seed"], rc["streams"]
    if not (isinstance(seed, int) and 0 <= seed < 2**64):
        raise ConfigError(f"rng.seed must be an unsigned 64-bit integer, got {seed!r}")
    if not (isinstance(streams, int) and streams >= 1):
        raise ConfigError(f"rng.streams must be a positive integer, got {streams!r}")
    return Run(model, theta, prior, shadow, schedule, run, initial, post_initial, data_stats, seed, streams)
