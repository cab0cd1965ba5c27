"""Command-line entry point wiring the modules into one pipeline.

Exit codes: 0 success, 2 configuration error, 3 synthesis failure,
4 input/output error. All outputs are deterministic for a fixed config
and seed; numbers are printed with 9 significant digits.
"""

from __future__ import annotations

import argparse
import dataclasses
import io
import json
import sys

from . import calibration
from .collision import sweep_collision_check
from .config import ConfigError, RunConfig, load_config
from .ga import synthesize
from .kinematics import (
    forward_kinematics,
    format_sig,
    read_trajectory_csv,
    reflect_about_root,
    sequence_from_json,
    write_trajectory_csv,
)
from .materials import DensityField, density_to_mesh, export_stl
from .spaceframe import solve_sag
from .target import sample_curve


class InputError(Exception):
    """Missing or malformed input file."""


def _round9(obj):
    """Round floats to 9 significant digits recursively, for stable JSON."""
    if isinstance(obj, float):
        return float(format_sig(obj))
    if isinstance(obj, dict):
        return {k: _round9(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round9(v) for v in obj]
    return obj


def _emit(text: str, out_path: str | None):
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)


def _read_sequence(path: str | None, cfg: RunConfig):
    path = path or cfg.paths.get("sequence")
    if path is None:
        raise InputError("no sequence file given (flag --sequence or paths.sequence)")
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise InputError(f"cannot read sequence file: {e}")
    try:
        return sequence_from_json(text)
    except (ValueError, KeyError) as e:
        raise InputError(f"{path}: {e}")


def cmd_target(args, cfg: RunConfig) -> int:
    canonical = 3.0 * 3.141592653589793 / 4.0
    if cfg.curve.t_min < -canonical - 1e-12 or cfg.curve.t_max > canonical + 1e-12:
        print(
            "warning: t range extends beyond the canonical +-3pi/4 interval",
            file=sys.stderr,
        )
    t, pts = sample_curve(cfg.curve, args.samples)
    lines = ["t,x,y,z"]
    for ti, p in zip(t, pts):
        lines.append(",".join(format_sig(v) for v in (ti, *p)))
    _emit("\n".join(lines) + "\n", args.out or cfg.paths.get("output"))
    return 0


def cmd_synth(args, cfg: RunConfig) -> int:
    ga = cfg.ga
    if args.seed is not None:
        ga = dataclasses.replace(ga, seed=args.seed)
    syn = cfg.synthesis
    start_n = args.start_n if args.start_n is not None else syn.start_n
    max_n = args.max_n if args.max_n is not None else syn.max_n
    if start_n > max_n:
        raise ConfigError("start_n must not exceed max_n")
    ctx = cfg.context(n_threads=args.threads)
    result = synthesize(
        ga, start_n=start_n, max_n=max_n, ctx=ctx, quality_ratio=syn.quality_ratio
    )
    _emit(
        json.dumps(_round9(result.to_dict()), indent=2) + "\n",
        args.out or cfg.paths.get("output"),
    )
    log_path = args.log or cfg.paths.get("log")
    if log_path:
        with open(log_path, "w", encoding="utf-8", newline="\n") as f:
            f.write("generation,best_fitness,mean_fitness\n")
            for _n, gen, best, mean in result.history:
                f.write(f"{gen},{format_sig(best)},{format_sig(mean)}\n")
    return 0 if result.success else 3


def cmd_simulate(args, cfg: RunConfig) -> int:
    seq, profile = _read_sequence(args.sequence, cfg)
    n = args.increments if args.increments is not None else cfg.collision.n_increments
    if n < 1:
        raise ConfigError("increments must be >= 1")
    frames = []
    for k in range(n + 1):
        half, _ = forward_kinematics(seq, profile, fraction=k / n)
        frames.append(half if args.no_reflect else reflect_about_root(half))
    buf = io.StringIO()
    write_trajectory_csv(buf, frames)
    _emit(buf.getvalue(), args.out or cfg.paths.get("output"))
    return 0


def cmd_collide(args, cfg: RunConfig) -> int:
    seq, profile = _read_sequence(args.sequence, cfg)
    report = sweep_collision_check(seq, profile, cfg.collision)
    _emit(
        json.dumps(_round9(report.to_dict()), indent=2) + "\n",
        args.out or cfg.paths.get("output"),
    )
    return 0


def cmd_sag(args, cfg: RunConfig) -> int:
    if cfg.frame is None:
        raise ConfigError("sag requires a 'frame' config section")
    path = args.trajectory or cfg.paths.get("trajectory")
    if path is None:
        raise InputError("no trajectory file given (flag --trajectory or paths.trajectory)")
    try:
        with open(path, encoding="utf-8") as f:
            frames = read_trajectory_csv(f)
    except OSError as e:
        raise InputError(f"cannot read trajectory file: {e}")
    except ValueError as e:
        raise InputError(f"{path}: {e}")
    if not frames:
        raise InputError(f"{path}: no trajectory rows")
    nodes = frames[-1].nodes
    sol = solve_sag(nodes, cfg.frame)
    disp = sol.displaced_nodes - nodes
    lines = ["node_index,x,y,z,x_sag,y_sag,z_sag"]
    for i, (p, d) in enumerate(zip(nodes, disp)):
        lines.append(",".join([str(i)] + [format_sig(v) for v in (*p, *d)]))
    _emit("\n".join(lines) + "\n", args.out or cfg.paths.get("output"))
    return 0


def cmd_export_stl(args, cfg: RunConfig) -> int:
    path = args.density or cfg.paths.get("density")
    if path is None:
        raise InputError("no density file given (flag --density or paths.density)")
    try:
        with open(path, encoding="utf-8") as f:
            field = DensityField.from_csv(f, cell_size=args.cell_size)
    except OSError as e:
        raise InputError(f"cannot read density file: {e}")
    except ValueError as e:
        raise InputError(f"{path}: {e}")
    mesh = density_to_mesh(field, depth=args.depth, level=args.level, phase=args.phase)
    data = export_stl(mesh)
    out = args.out or cfg.paths.get("output")
    if out is None:
        raise InputError("export-stl requires an output path (--out)")
    with open(out, "wb") as f:
        f.write(data)
    return 0


def cmd_calibrate(args, cfg: RunConfig) -> int:
    bend = calibration.DEFAULT_BEND_TABLE
    twist = calibration.DEFAULT_TWIST_TABLE
    try:
        if args.bend_csv:
            with open(args.bend_csv, encoding="utf-8") as f:
                bend = calibration.MeasurementTable.from_csv(f, "bend")
        if args.twist_csv:
            with open(args.twist_csv, encoding="utf-8") as f:
                twist = calibration.MeasurementTable.from_csv(f, "twist")
    except OSError as e:
        raise InputError(f"cannot read measurement file: {e}")
    except ValueError as e:
        raise InputError(str(e))
    try:
        profile = calibration.profile_from_tables(
            bend, twist, strain=args.strain, base=cfg.profile
        )
    except calibration.ExtrapolationError as e:
        raise InputError(str(e))
    _emit(
        json.dumps(_round9(profile.to_dict()), indent=2) + "\n",
        args.out or cfg.paths.get("output"),
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="morphchain",
        description="Design toolkit for material-driven morphing chain mechanisms.",
    )
    parser.add_argument("--config", help="JSON run configuration file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("target", help="sample the ideal curve as CSV")
    p.add_argument("--samples", type=int, default=201)
    p.add_argument("--out")
    p.set_defaults(func=cmd_target)

    p = sub.add_parser("synth", help="search for a knot-forming sequence")
    p.add_argument("--out")
    p.add_argument("--log", help="per-generation CSV log path")
    p.add_argument("--seed", type=int)
    p.add_argument("--start-n", type=int, dest="start_n")
    p.add_argument("--max-n", type=int, dest="max_n")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("simulate", help="emit activation frames for a sequence")
    p.add_argument("--sequence")
    p.add_argument("--increments", type=int)
    p.add_argument("--no-reflect", action="store_true",
                   help="emit the half chain instead of the reflected mechanism")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("collide", help="run the activation collision sweep")
    p.add_argument("--sequence")
    p.add_argument("--out")
    p.set_defaults(func=cmd_collide)

    p = sub.add_parser("sag", help="gravity sag of a trajectory")
    p.add_argument("--trajectory")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sag)

    p = sub.add_parser("export-stl", help="density CSV to binary STL")
    p.add_argument("--density")
    p.add_argument("--out")
    p.add_argument("--level", type=float, default=0.5)
    p.add_argument("--depth", type=float, default=2.0)
    p.add_argument("--phase", type=int, default=2, choices=(1, 2))
    p.add_argument("--cell-size", type=float, default=1.0, dest="cell_size")
    p.set_defaults(func=cmd_export_stl)

    p = sub.add_parser("calibrate", help="measurement CSVs to an activation profile")
    p.add_argument("--bend-csv", dest="bend_csv")
    p.add_argument("--twist-csv", dest="twist_csv")
    p.add_argument("--strain", type=float, default=calibration.REFERENCE_STRAIN)
    p.add_argument("--out")
    p.set_defaults(func=cmd_calibrate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except InputError as e:
        print(f"input error: {e}", file=sys.stderr)
        return 4
    except OSError as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return 4
    except ValueError as e:
        # parameter validation raised inside the library
        print(f"config error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
