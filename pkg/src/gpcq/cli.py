"""Command-line entry points: ``gpcq {simulate,verify,compare,partition,rescale}``.

Exit codes: 0 success, 1 configuration or usage error, 2 numerical guard
tripped (blow-up, non-finite values, or a failed verification suite).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import scipy.fft

from . import __version__
from .equations import GeneralCQParams, InvalidParametersError, NoRealRootsError, reduce_general
from .integrator import BlowUpError, NumericalFailureError, energy_drift, evolve, gronwall_monitor
from .io import (
    ConfigError,
    InitialData,
    RunConfig,
    generate_initial,
    load_config,
    load_trajectory,
    parse_config,
    read_config_json,
    write_csv,
    write_json,
)
from .perturbation import ComparisonSetup, compare_runs, scaling_study
from .strichartz import TooManyChunksError, partition_by_x1
from .verification import SUITES, run_suite

log = logging.getLogger("gpcq")

EXIT_OK, EXIT_CONFIG, EXIT_GUARD = 0, 1, 2


def _out_path(args, name: str | None, default: str) -> Path:
    p = Path(name or default)
    if not p.is_absolute():
        p = Path(args.out_dir) / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _need_config(args) -> RunConfig:
    if not args.config:
        raise ConfigError("--config", "this command needs a config file")
    return load_config(args.config, seed=args.seed)


def _reduction_dict(red) -> dict:
    return {
        "r0_sq": red.r0_sq,
        "r1_sq": red.r1_sq,
        "r1_sq_reduced": red.r1_sq_reduced,
        "gamma": red.gamma,
        "time_scale": red.time_scale,
        "space_scale": red.space_scale,
        "amplitude_scale": red.amplitude_scale,
    }


def cmd_simulate(args) -> int:
    cfg = _need_config(args)
    v0 = generate_initial(cfg.initial_data, cfg.grid)
    start = time.perf_counter()
    status, error = EXIT_OK, None
    try:
        traj = evolve(cfg.spec, v0, cfg.stepping)
    except (BlowUpError, NumericalFailureError) as exc:
        traj, status, error = exc.trajectory, EXIT_GUARD, str(exc)
        log.error("%s", exc)
    wall = time.perf_counter() - start

    write_csv(_out_path(args, cfg.csv_path, "diagnostics.csv"), traj)
    last = traj.diagnostics[-1]
    summary = {
        "config": cfg.raw,
        "seed": cfg.seed,
        "equation": cfg.spec.label(),
        "status": "ok" if status == EXIT_OK else "guard_tripped",
        "error": error,
        "final_time": traj.timestamps[-1],
        "final_norms": {
            "E": last.report.energy,
            "M": last.report.m_value,
            "reL2sq": last.report.re_l2_sq,
            "h1dot": last.h1dot,
            "l2": last.l2,
            "l4": last.l4,
            "l6": last.l6,
            "linf": last.linf,
            "boundary_shell_max": last.boundary_shell_max,
        },
        "max_energy_drift": energy_drift(traj),
        "gronwall_min_margin": None,
        "initial_boundary_shell_max": traj.diagnostics[0].boundary_shell_max,
        "wall_time": wall,
    }
    if cfg.spec.variant == "CQ3" and len(traj) > 1:
        mon = gronwall_monitor(traj)
        summary["gronwall_min_margin"] = mon.min_margin
        summary["gronwall_rate"] = mon.c1
    if cfg.reduction is not None:
        summary["reduction"] = _reduction_dict(cfg.reduction)
    write_json(_out_path(args, cfg.json_path, "summary.json"), summary)
    return status


def cmd_verify(args) -> int:
    report = run_suite(args.suite, args.samples, 0 if args.seed is None else args.seed)
    write_json(_out_path(args, None, f"verify_{args.suite}.json"), report)
    print(json.dumps(report, sort_keys=True))
    return EXIT_OK if report["violations"] == 0 else EXIT_GUARD


def _comparison_block(cfg: RunConfig) -> dict:
    block = cfg.section("comparison")
    if block is None:
        raise ConfigError("comparison", "missing; compare needs a comparison block")
    if not isinstance(block, dict):
        raise ConfigError("comparison", "expected an object")
    if cfg.spec.variant not in ("GP4", "CQ3"):
        raise ConfigError("equation.type", "compare needs GP4, CQ3 or GENERAL_CQ")
    return block


def cmd_compare(args) -> int:
    cfg = _need_config(args)
    block = _comparison_block(cfg)
    t0 = block.get("t0", 0.0)
    if isinstance(t0, bool) or not isinstance(t0, (int, float)):
        raise ConfigError("comparison.t0", f"expected a number, got {t0!r}")
    v0 = generate_initial(cfg.initial_data, cfg.grid)
    out = {"equation": cfg.spec.label(), "config": cfg.raw}
    try:
        if "amplitudes" in block:
            amps = block["amplitudes"]
            if not isinstance(amps, list) or not amps or not all(isinstance(a, (int, float)) for a in amps):
                raise ConfigError("comparison.amplitudes", "expected a nonempty list of numbers")
            rows = scaling_study(cfg.spec, v0, amps, cfg.stepping, float(t0))
            out["table"] = [{"amplitude": a, **rep.labelled()} for a, rep in rows]
        else:
            w_spec = block.get("w0")
            if w_spec is None:
                w0 = v0
            else:
                w0 = generate_initial(InitialData.from_dict(w_spec, default_seed=cfg.seed, path="comparison.w0"), cfg.grid)
            rep = compare_runs(ComparisonSetup(cfg.spec, v0, w0, cfg.stepping, float(t0)))
            out["report"] = rep.labelled()
    except (BlowUpError, NumericalFailureError) as exc:
        log.error("%s", exc)
        return EXIT_GUARD
    write_json(_out_path(args, block.get("json_path"), "comparison.json"), out)
    return EXIT_OK


def cmd_partition(args) -> int:
    if not args.config:
        raise ConfigError("--config", "this command needs a config file")
    raw = read_config_json(args.config)
    block = raw.get("partition") or {}
    if not isinstance(block, dict):
        raise ConfigError("partition", "expected an object")
    eta = args.eta if args.eta is not None else block.get("eta")
    if eta is None:
        raise ConfigError("partition.eta", "missing")
    if isinstance(eta, bool) or not isinstance(eta, (int, float)) or not eta > 0:
        raise ConfigError("partition.eta", f"must be a positive number, got {eta!r}")
    src = block.get("trajectory_path")
    if src:
        try:
            traj = load_trajectory(src)
        except (OSError, ValueError) as exc:
            raise ConfigError("partition.trajectory_path", str(exc)) from exc
    else:
        cfg = parse_config(raw, seed=args.seed)
        v0 = generate_initial(cfg.initial_data, cfg.grid)
        try:
            traj = evolve(cfg.spec, v0, cfg.stepping, with_diagnostics=False)
        except (BlowUpError, NumericalFailureError) as exc:
            log.error("%s", exc)
            return EXIT_GUARD
    try:
        part = partition_by_x1(traj, float(eta))
    except TooManyChunksError as exc:
        raise ConfigError("partition.eta", str(exc)) from exc
    out = {
        "eta": part.eta,
        "q": part.q,
        "J": part.J,
        "breakpoints": list(part.breakpoints),
        "chunk_x1": list(part.chunk_values),
        "total_x1": part.total,
        "final_chunk_x1": part.chunk_values[-1],
    }
    write_json(_out_path(args, block.get("json_path"), "partition.json"), out)
    return EXIT_OK


def cmd_rescale(args) -> int:
    try:
        red = reduce_general(GeneralCQParams(args.alpha1, args.alpha3, args.alpha5))
    except NoRealRootsError:
        print("discriminant nonpositive", file=sys.stderr)
        return EXIT_CONFIG
    except InvalidParametersError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CONFIG
    d = _reduction_dict(red)
    print(json.dumps({k: d[k] for k in ("r0_sq", "r1_sq_reduced", "gamma", "time_scale", "space_scale", "amplitude_scale")}, sort_keys=True))
    return EXIT_OK


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", metavar="PATH", help="JSON run configuration")
    p.add_argument("--seed", type=_u64, default=None, help="overrides the config seed")
    p.add_argument("--threads", type=_u32, default=1, help="FFT worker threads (speed only)")
    p.add_argument("--out-dir", default=".", metavar="PATH", help="directory for relative output paths")


def _u64(s: str) -> int:
    v = int(s)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _u32(s: str) -> int:
    v = int(s)
    if not 1 <= v < 2**32:
        raise argparse.ArgumentTypeError("threads must be a positive 32-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gpcq", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="evolve a configured run and write diagnostics")
    _common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run a randomized property suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--samples", type=int, default=100_000)
    _common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("compare", help="paired run against the energy-critical equation")
    _common(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("partition", help="split a run into chunks of fixed Strichartz size")
    p.add_argument("--eta", type=float, default=None)
    _common(p)
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("rescale", help="reduce general cubic-quintic coefficients to unit background")
    p.add_argument("alpha1", type=float)
    p.add_argument("alpha3", type=float)
    p.add_argument("alpha5", type=float)
    _common(p)
    p.set_defaults(func=cmd_rescale)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors; usage errors map to 1 here
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    try:
        with scipy.fft.set_workers(args.threads):
            return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FloatingPointError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_GUARD


if __name__ == "__main__":
    sys.exit(main())
