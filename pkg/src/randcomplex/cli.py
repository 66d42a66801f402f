"""Command-line interface: one subcommand per task, one output file per run."""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

from . import experiments as ex
from .complexes import Flavor, SearchCapExceeded, build_complex
from .detection import connected_components, crossing_component, find_isolated_occurrences, \
    find_pendant_occurrences
from .genericity import certify, genericity_margin, verify_generic
from .geometry import bottleneck_set_distance, hausdorff_distance
from .homology import Field, betti_numbers
from .io import (
    FormatError,
    ExperimentConfig,
    dumps,
    read_complex,
    read_config,
    read_points,
    write_complex,
    write_points,
)
from .poisson import Box, PoissonConfig, SamplingMode, sample

log = logging.getLogger("randcomplex")


class CLIError(Exception):
    pass


def _window(text: str | None) -> Box | None:
    if text is None:
        return None
    try:
        return Box.from_intervals(json.loads(text))
    except (json.JSONDecodeError, TypeError, ValueError) as e:
        raise CLIError(f"bad --window {text!r}: expected JSON like [[0,10],[0,10]] ({e})") from None


def _json_out(path, obj) -> None:
    Path(path).write_text(dumps(ex._jsonable(obj)))


def cmd_sample(args) -> None:
    if args.config:
        cfg = read_config(args.config).poisson()
        seed = cfg.seed if args.seed is None else args.seed
        cfg = PoissonConfig(cfg.intensity, cfg.window, seed, cfg.mode)
    else:
        if args.intensity is None or args.window is None:
            raise CLIError("sample needs --config or both --intensity and --window")
        cfg = PoissonConfig(args.intensity, _window(args.window), args.seed or 0, args.mode)
    X = sample(cfg)
    write_points(args.output, X)
    log.info("wrote %d points to %s", len(X), args.output)


def cmd_build(args) -> None:
    X = read_points(args.points)
    G = build_complex(X, args.rho, args.flavor, args.dim_cap)
    write_complex(args.output, G.complex)
    log.info("f-vector %s", G.complex.f_vector())


def cmd_betti(args) -> None:
    K = read_complex(args.complex)
    _json_out(args.output, betti_numbers(K, args.field, args.max_degree).to_json())


def cmd_dist(args) -> None:
    A = read_points(args.a)
    B = read_points(args.b)
    _json_out(args.output, {"hausdorff": hausdorff_distance(A, B),
                            "bottleneck": bottleneck_set_distance(A, B)})


def cmd_generic(args) -> None:
    X = read_points(args.points)
    before = genericity_margin(X, args.rho, args.flavor)
    cert = certify(X, args.rho, args.flavor)
    out = {"margin_input": before, "rescaled": bool(cert.representation != X),
           "certificate": cert.to_json()}
    if args.verify_trials > 0 and cert.margin > 0:
        check = verify_generic(cert.representation, args.rho, cert.margin / 2, args.flavor,
                               trials=args.verify_trials, seed=args.seed or 0)
        out["verification"] = {"delta": cert.margin / 2, "trials": check.trials,
                               "passed": check.passed}
    _json_out(args.output, out)


def cmd_detect(args) -> None:
    X = read_points(args.points)
    target = read_complex(args.target)
    window = _window(args.window)
    if window is None:
        lo, hi = X.bounding_box()
        window = Box(tuple(lo), tuple(hi))
    cap = max(1, target.dimension + 1)
    G = build_complex(X, args.rho, args.flavor, cap)
    dec = connected_components(G, window)
    reports = []
    if args.kind in ("isolated", "both"):
        reports += find_isolated_occurrences(G, target, window, search_cap=args.search_cap)
    host = None
    if args.kind in ("pendant", "both"):
        host = crossing_component(G, window, args.axis, dec)
        if host is not None:
            reports += find_pendant_occurrences(G, target, host, dec, window, args.search_cap)
    _json_out(args.output, {"n_points": len(X), "n_components": len(dec), "host": host,
                            "occurrences": [r.to_json() for r in reports]})


def _run_experiment(cfg: ExperimentConfig, threads):
    rep = cfg.representation
    if cfg.kind == "events":
        if cfg.delta is None:
            raise CLIError("[experiment] delta is required for kind=events")
        return ex.estimate_event_probabilities(cfg.target, rep, cfg.rho, cfg.delta, cfg.intensity,
                                               cfg.trials, cfg.seed, cfg.flavor, threads)
    if cfg.kind == "isolation":
        return ex.run_isolation_experiment(cfg.target, rep, cfg.rho, cfg.intensity, cfg.window,
                                           cfg.trials, cfg.seed, cfg.flavor, cfg.delta, cfg.mode,
                                           threads)
    if cfg.kind == "pendant":
        return ex.run_pendant_experiment(cfg.target, rep, cfg.rho, cfg.intensity, cfg.window,
                                         cfg.trials, cfg.seed, cfg.flavor, cfg.plant, cfg.mode,
                                         threads)
    return ex.percolation_probe(cfg.rho, cfg.t_values, cfg.window_sizes, cfg.trials, cfg.seed,
                                cfg.dim, cfg.bootstrap, threads)


def _config_with_overrides(args) -> ExperimentConfig:
    cfg = read_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg


def cmd_experiment(args) -> None:
    cfg = _config_with_overrides(args)
    report = _run_experiment(cfg, args.threads if args.threads is not None else cfg.threads)
    log.info("finished %d trials in %.2fs", report.trials, report.timings.get("total_s", 0.0))
    Path(args.output).write_text(dumps(report.to_json(include_timings=args.timings)))


def cmd_percolation(args) -> None:
    cfg = _config_with_overrides(args)
    if cfg.kind != "percolation":
        raise CLIError(f"config kind is {cfg.kind!r}; percolation needs kind = percolation")
    report = _run_experiment(cfg, args.threads if args.threads is not None else cfg.threads)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "window", "crossing_fraction", "stderr"])
    for row in report.extra["rows"]:
        w.writerow([repr(row["t"]), repr(row["window"]), repr(row["crossing_fraction"]),
                    repr(row["stderr"])])
    Path(args.output).write_text(buf.getvalue())
    log.info("t_perc estimate %s (95%% CI %s)", report.extra["t_perc_estimate"],
             report.extra["t_perc_ci95"])


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="randcomplex",
                                description="Random geometric complexes on Poisson samples.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help):
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(func=fn)
        sp.add_argument("-o", "--output", required=True, help="output file")
        return sp

    def flavor(sp):
        sp.add_argument("--rho", type=float, required=True)
        sp.add_argument("--flavor", type=str.upper, choices=[f.value for f in Flavor],
                        default="CECH")

    sp = add("sample", cmd_sample, "sample a Poisson process to a points CSV")
    sp.add_argument("--config")
    sp.add_argument("--intensity", type=float)
    sp.add_argument("--window", help="JSON list of [lo, hi] pairs")
    sp.add_argument("--mode", type=str.upper, choices=[m.value for m in SamplingMode],
                    default="DIRECT")
    sp.add_argument("--seed", type=int)

    sp = add("build", cmd_build, "build a complex from a points CSV")
    sp.add_argument("points")
    flavor(sp)
    sp.add_argument("--dim-cap", type=int)

    sp = add("betti", cmd_betti, "Betti numbers of a complex JSON")
    sp.add_argument("complex")
    sp.add_argument("--field", type=str.upper, choices=[f.value for f in Field], default="GF2")
    sp.add_argument("--max-degree", type=int)

    sp = add("dist", cmd_dist, "Hausdorff and bottleneck distance of two point sets")
    sp.add_argument("a")
    sp.add_argument("b")

    sp = add("generic", cmd_generic, "genericity margin, rescaling and certificate")
    sp.add_argument("points")
    flavor(sp)
    sp.add_argument("--verify-trials", type=int, default=0)
    sp.add_argument("--seed", type=int)

    sp = add("detect", cmd_detect, "isolated / pendant occurrences of a target complex")
    sp.add_argument("points")
    flavor(sp)
    sp.add_argument("--target", required=True, help="target complex JSON")
    sp.add_argument("--window", help="JSON list of [lo, hi] pairs (default: bounding box)")
    sp.add_argument("--kind", choices=["isolated", "pendant", "both"], default="both")
    sp.add_argument("--axis", type=int, default=0)
    sp.add_argument("--search-cap", type=int, default=32)

    for name, fn, help in (("experiment", cmd_experiment, "run an experiment config to JSON"),
                           ("percolation", cmd_percolation, "crossing-probability curve CSV")):
        sp = add(name, fn, help)
        sp.add_argument("config")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--threads", type=int)
        if name == "experiment":
            sp.add_argument("--timings", action="store_true",
                            help="include wall-clock timings (output no longer reproducible)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        args.func(args)
    except (CLIError, FormatError, SearchCapExceeded, ValueError, KeyError, OSError) as e:
        print(f"randcomplex {args.command}: error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
