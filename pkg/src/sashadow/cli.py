"""Command-line entry point: ``sashadow {simulate,stats,sample-posterior,map,plot}``.

Exit codes: 0 success, 1 usage or configuration error, 2 runtime error.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import config as cfgmod
from ._backend import BACKEND
from .anneal import proxy_score, run_multistart
from .io import read_trace_csv, write_matrix_csv, write_trace_csv, write_trace_svg
from .models import StraussModel
from .pattern import PatternError, Window, read_pattern_csv, suff_stats, write_pattern_csv
from .sampler import RngStream, reference_samples
from .shadow import sample_posterior

log = logging.getLogger("sashadow")

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunSummary:
    theta_final: list[float] | None = None
    theta_best: list[float] | None = None
    accept_rate: float | None = None
    wall_time: float = 0.0
    artifacts: list[str] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        # wall time is left out so summaries of identical runs are byte-identical
        out = {}
        for name in ("theta_final", "theta_best"):
            th = getattr(self, name)
            if th is not None:
                out[name] = th
                out[name.replace("theta", "params")] = _natural(th)
        if self.accept_rate is not None:
            out["accept_rate"] = self.accept_rate
        out.update(self.extra)
        out["artifacts"] = self.artifacts
        return out


def _natural(theta) -> dict:
    names = ("beta", "gamma")
    return {names[i]: math.exp(t) for i, t in enumerate(theta)}


def _write_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=False) + "\n")


def _out_dir(args) -> Path:
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc.strerror}") from None
    return out


def _overrides(args) -> dict:
    ov: dict = {}
    if args.seed is not None:
        ov.setdefault("rng", {})["seed"] = args.seed
    if args.chains is not None:
        ov.setdefault("rng", {})["streams"] = args.chains
    return ov


def _load(args, iteration_key: tuple[str, str] | None = None) -> dict:
    ov = _overrides(args)
    user = cfgmod.load_yaml(args.config) if args.config else {}
    for section, vals in ov.items():
        user.setdefault(section, {}).update(vals)
    if args.iterations is not None and iteration_key is not None:
        section, key = iteration_key
        user.setdefault(section, {})[key] = args.iterations
        if iteration_key == ("anneal", "n_iterations"):
            keep = user["anneal"].get("keep_every", cfgmod.DEFAULTS["anneal"]["keep_every"])
            user["anneal"]["keep_every"] = min(keep, args.iterations)
    base_dir = Path(args.config).parent if args.config else None
    return cfgmod.resolve(user, base_dir)


def cmd_simulate(args) -> RunSummary:
    cfg = _load(args, ("simulate", "n_samples"))
    run = cfgmod.build(cfg)
    sim = cfg["simulate"]
    out = _out_dir(args)
    rng = RngStream(run.seed, 0).generator()
    t0 = time.perf_counter()
    res = reference_samples(
        run.model, run.theta_true, sim["burn_in"], sim["n_samples"], sim["spacing"], rng,
        run.shadow.aux.birth_probability, keep_patterns=sim["dump_patterns"],
    )
    samples, patterns = res if sim["dump_patterns"] else (res, [])
    mean = samples.mean(axis=0)
    names = ["n", "s_r"][: run.model.dim]
    summary = RunSummary(extra={"theta": run.theta_true.tolist(), "mean_stats": mean.tolist(),
                                "n_samples": int(samples.shape[0])})
    write_matrix_csv(samples, names, out / "stats.csv", index_name="sample")
    summary.artifacts.append("stats.csv")
    if patterns:
        pdir = out / "patterns"
        pdir.mkdir(exist_ok=True)
        for i, p in enumerate(patterns):
            write_pattern_csv(p, pdir / f"pattern_{i:05d}.csv")
        summary.artifacts.append("patterns/")
    cfgmod.dump(cfg, out / "config.resolved.yaml")
    summary.artifacts += ["summary.json", "config.resolved.yaml"]
    _write_json(summary.to_json(), out / "summary.json")
    summary.wall_time = time.perf_counter() - t0
    print("mean " + " ".join(f"{k}={v:.4f}" for k, v in zip(names, mean)))
    return summary


def cmd_stats(args) -> tuple[int, int]:
    if args.config:
        cfg = cfgmod.resolve(cfgmod.load_yaml(args.config), Path(args.config).parent)
        window = Window(*cfg["model"]["window"])
        r = cfg["model"].get("r", 0.1)
    else:
        window, r = Window(), 0.1
    if args.window is not None:
        window = Window(*args.window)
    if args.r is not None:
        r = args.r
    pattern = read_pattern_csv(args.pattern, window)
    n, s = suff_stats(pattern, r)
    print(f"n={int(n)} s_r={int(s)}")
    return int(n), int(s)


def cmd_sample_posterior(args) -> RunSummary:
    cfg = _load(args, ("posterior", "n_sweeps"))
    run = cfgmod.build(cfg)
    pc = cfg["posterior"]
    out = _out_dir(args)
    rng = RngStream(run.seed, 0).generator()
    t0 = time.perf_counter()
    samples = sample_posterior(run.model, run.posterior_initial_theta, run.data_stats, run.shadow,
                               run.prior, pc["n_sweeps"], rng)
    kept = samples[pc["discard"]:]
    dim = samples.shape[1]
    write_matrix_csv(samples, [f"theta_{i}" for i in range(dim)], out / "samples.csv", index_name="sweep")
    summary = RunSummary(
        theta_final=samples[-1].tolist(),
        artifacts=["samples.csv", "summary.json", "config.resolved.yaml"],
        extra={
            "discard": pc["discard"],
            "posterior_mean": kept.mean(axis=0).tolist(),
            "posterior_sd": kept.std(axis=0, ddof=1).tolist() if kept.shape[0] > 1 else [0.0] * dim,
        },
    )
    cfgmod.dump(cfg, out / "config.resolved.yaml")
    _write_json(summary.to_json(), out / "summary.json")
    summary.wall_time = time.perf_counter() - t0
    print("posterior mean " + " ".join(f"{v:.4f}" for v in summary.extra["posterior_mean"])
          + "  sd " + " ".join(f"{v:.4f}" for v in summary.extra["posterior_sd"]))
    return summary


def cmd_map(args) -> RunSummary:
    cfg = _load(args, ("anneal", "n_iterations"))
    run = cfgmod.build(cfg)
    out = _out_dir(args)
    t0 = time.perf_counter()
    best, estimates = run_multistart(
        run.model, run.data_stats, run.prior, run.shadow, run.schedule, run.run,
        run.initial_theta, run.seed, run.streams,
    )
    est = estimates[best]
    labels = ["log beta", "log gamma"] if isinstance(run.model, StraussModel) else ["log beta"]
    artifacts = ["trace.csv", "trace.svg"]
    write_trace_csv(est.trace, out / "trace.csv")
    write_trace_svg(est.trace, out / "trace.svg", labels=labels, reference=None)
    extra = {"data_stats": run.data_stats.tolist(), "seed": run.seed, "chains": run.streams,
             "best_chain": best, "proxy_score_final": proxy_score(est.theta_final, run.data_stats, run.prior)}
    if run.streams > 1:
        extra["chain_theta_final"] = [e.theta_final.tolist() for e in estimates]
        for k, e in enumerate(estimates):
            write_trace_csv(e.trace, out / f"trace_chain{k}.csv")
            artifacts.append(f"trace_chain{k}.csv")
    artifacts += ["summary.json", "config.resolved.yaml"]
    summary = RunSummary(est.theta_final.tolist(), est.theta_best.tolist(), est.accept_rate,
                         artifacts=artifacts, extra=extra)
    cfgmod.dump(cfg, out / "config.resolved.yaml")
    _write_json(summary.to_json(), out / "summary.json")
    summary.wall_time = time.perf_counter() - t0
    print("theta_final " + " ".join(f"{v:.4f}" for v in summary.theta_final)
          + "  theta_best " + " ".join(f"{v:.4f}" for v in summary.theta_best))
    return summary


def cmd_plot(args) -> Path:
    trace = read_trace_csv(args.trace)
    dest = Path(args.output) if args.output else Path(args.trace).with_suffix(".svg")
    write_trace_svg(trace, dest)
    print(dest)
    return dest


def _common_flags(suppress: bool) -> argparse.ArgumentParser:
    # subcommands repeat the global flags; SUPPRESS keeps them from clobbering values given before the subcommand
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=d(None),
                        help="YAML run configuration (defaults reproduce the Strauss experiment)")
    common.add_argument("--seed", type=int, default=d(None), help="RNG seed (unsigned 64-bit)")
    common.add_argument("--out", default=d("runs/latest"), help="output directory")
    common.add_argument("--iterations", type=int, default=d(None),
                        help="override the run length (map: sweeps, sample-posterior: sweeps, simulate: samples)")
    common.add_argument("--chains", type=int, default=d(None), help="independent annealing chains for map")
    common.add_argument("-v", "--verbose", action="store_true", default=d(False))
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags(suppress=True)
    p = _Parser(prog="sashadow", description=__doc__.splitlines()[0], parents=[_common_flags(suppress=False)])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("simulate", parents=[common], help="MH reference statistics of the configured model")
    ps = sub.add_parser("stats", parents=[common], help="sufficient statistics (n, s_r) of a pattern CSV")
    ps.add_argument("pattern")
    ps.add_argument("--r", type=float, help="interaction radius (default: config or 0.1)")
    ps.add_argument("--window", type=float, nargs=4, metavar=("XMIN", "XMAX", "YMIN", "YMAX"))
    sub.add_parser("sample-posterior", parents=[common], help="untempered ABC Shadow posterior sampling")
    sub.add_parser("map", parents=[common], help="simulated-annealing MAP estimate")
    pp = sub.add_parser("plot", parents=[common], help="SVG plot of a trace CSV")
    pp.add_argument("trace")
    pp.add_argument("-o", "--output")
    return p


COMMANDS = {
    "simulate": cmd_simulate,
    "stats": cmd_stats,
    "sample-posterior": cmd_sample_posterior,
    "map": cmd_map,
    "plot": cmd_plot,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    log.info("kernel backend: %s", BACKEND)
    t0 = time.perf_counter()
    try:
        COMMANDS[args.command](args)
    except cfgmod.ConfigError as exc:
        print(f"sashadow: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, PatternError, ValueError) as exc:
        print(f"sashadow: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    log.info("%s finished in %.2fs", args.command, time.perf_counter() - t0)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
