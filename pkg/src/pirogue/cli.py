"""Command-line interface.

Exit codes: 0 ok, 1 validation failure, 2 runtime invariant breach.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path


def _fail_validation(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return 1


def _cmd_run(args) -> int:
    from pirogue.config import ConfigError, parse_run_config
    from pirogue.engine import run
    from pirogue.outputs import write_outputs
    try:
        config = parse_run_config(args.config)
    except ConfigError as exc:
        return _fail_validation(str(exc))
    out_dir = args.out or config.output_dir or "run_output"
    frames_done = [0]

    def sink(frame):
        frames_done[0] += 1
        if frames_done[0] % 100 == 0:
            print(f"  {frame.date}: biomass {sum(frame.species_biomass):.0f} t", flush=True)

    outputs = run(config, frame_sink=sink if args.progress else None)
    write_outputs(outputs, out_dir)
    if outputs.invalid:
        print(f"invariant breach: {outputs.error}", file=sys.stderr)
        print(f"partial outputs flagged invalid in {out_dir}", file=sys.stderr)
        return 2
    print(f"run complete: {len(outputs.frames)} frames -> {out_dir}")
    return 0


def _cmd_matrix(args) -> int:
    from pirogue.config import ConfigError, parse_run_config
    from pirogue.matrix import MatrixError, parse_matrix_spec, run_matrix
    try:
        config = parse_run_config(args.config)
        matrix = parse_matrix_spec(args.spec)
    except (ConfigError, MatrixError) as exc:
        return _fail_validation(str(exc))
    out_dir = args.out or "matrix_output"

    def progress(i, total, run_id):
        print(f"[{i}/{total}] {run_id}", flush=True)

    summary = run_matrix(config, matrix, out_dir, progress=progress)
    failures = [row for row in summary if row.get("error")]
    print(f"matrix complete: {len(summary)} runs, {len(failures)} failed -> {out_dir}/summary.csv")
    return 0


def _cmd_plot(args) -> int:
    from pirogue.plots import PlotError, plot
    try:
        files = plot(args.dir, args.kind)
    except PlotError as exc:
        return _fail_validation(str(exc))
    for f in files:
        print(f)
    return 0


def _cmd_gen_env(args) -> int:
    from pirogue.synth import generate_preset
    try:
        cfg_path = generate_preset(args.out, args.preset)
    except ValueError as exc:
        return _fail_validation(str(exc))
    print(f"generated {args.preset} bundle: {cfg_path}")
    return 0


def _cmd_saltelli(args) -> int:
    from pirogue.config import ConfigError, parse_run_config
    from pirogue.sensitivity import (SensitivityError, default_param_specs,
                                     load_param_specs, run_saltelli,
                                     write_raw_samples, write_sobol_report)
    try:
        config = parse_run_config(args.config)
        specs = load_param_specs(args.specs) if args.specs else default_param_specs()
    except (ConfigError, SensitivityError) as exc:
        return _fail_validation(str(exc))
    out_dir = Path(args.out or "saltelli_output")
    out_dir.mkdir(parents=True, exist_ok=True)

    def progress(i, total):
        if i % 50 == 0 or i == total:
            print(f"  evaluated {i}/{total} runs", flush=True)

    try:
        report, raw = run_saltelli(config, specs, args.n, args.horizon,
                                   args.metric, args.seed,
                                   metric_arg=args.metric_arg, progress=progress)
    except SensitivityError as exc:
        return _fail_validation(str(exc))
    write_sobol_report(report, out_dir / "sobol_report.csv")
    write_raw_samples(raw, specs, out_dir / "raw_samples.csv")
    ranked = sorted(zip(report.ST, report.parameters), reverse=True)
    print(f"output: {report.output_name} (N={report.n_samples})")
    for st, name in ranked:
        print(f"  ST {st:+.3f}  {name}")
    return 0


def _cmd_oft(args) -> int:
    from pirogue.config import ConfigError, parse_run_config
    from pirogue.sensitivity import SensitivityError, run_oft
    try:
        config = parse_run_config(args.config)
        values = [float(v) for v in args.values.split(",")]
        rows = run_oft(config, args.axis, values, args.seed)
    except (ConfigError, SensitivityError, ValueError) as exc:
        return _fail_validation(str(exc))
    for row in rows:
        print(row)
    return 0


def _cmd_serve(args) -> int:
    from pirogue.config import ConfigError, parse_run_config
    from pirogue.server import serve
    config = None
    if args.config:
        try:
            config = parse_run_config(args.config)
        except ConfigError as exc:
            return _fail_validation(str(exc))
    serve(config=config, host=args.host, port=args.port, frontend_dir=args.frontend)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pirogue",
        description="Agent-based West African artisanal fishery simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute one simulation run")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--progress", action="store_true")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("matrix", help="run a scenario matrix batch")
    p.add_argument("--spec", required=True, help="matrix spec file")
    p.add_argument("--config", required=True, help="base run config")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_matrix)

    p = sub.add_parser("plot", help="render plots from run outputs")
    p.add_argument("--dir", required=True)
    p.add_argument("--kind", required=True, choices=("catch", "biomass", "fleet", "migrations"))
    p.set_defaults(func=_cmd_plot)

    p = sub.add_parser("gen-env", help="generate a synthetic input bundle")
    p.add_argument("--out", required=True)
    p.add_argument("--preset", required=True, choices=("desk", "fullscale-synthetic"))
    p.set_defaults(func=_cmd_gen_env)

    p = sub.add_parser("saltelli", help="global sensitivity analysis")
    p.add_argument("--config", required=True)
    p.add_argument("--specs", default=None, help="CSV of name,min,max,scale (default: built-in 13)")
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--metric", default="cumulative_total_catch")
    p.add_argument("--metric-arg", default=None, help="country or species for per-target metrics")
    p.add_argument("--horizon", type=int, default=6, help="months per evaluation run")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_saltelli)

    p = sub.add_parser("oft", help="one-factor-at-a-time sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--axis", required=True)
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=_cmd_oft)

    p = sub.add_parser("serve", help="start the interactive steering server")
    p.add_argument("--config", default=None, help="pre-create a session from this config")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--frontend", default=None, help="directory of dashboard static assets")
    p.set_defaults(func=_cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
