"""Command-line interface.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys

from .errors import ConfigError, SuperlumError
from .presets import PRESETS, preset_tag_of, run_preset
from .runner import normalized_dump, parse_scenario, run_scenario, sweep


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="superlum",
        description="Simulate effectively superluminal qubit and mirror motion in circuit QED.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one scenario file")
    p_run.add_argument("scenario", help="path to a YAML scenario")
    p_run.add_argument("--out", default="out", help="output directory (default: ./out)")
    p_run.add_argument("--workers", type=int, default=None,
                       help="worker processes for multi-run commands (unused for single runs)")

    p_preset = sub.add_parser("preset", help="run a shipped preset")
    p_preset.add_argument("name", choices=PRESETS)
    p_preset.add_argument("--out", default="out")
    p_preset.add_argument("--variant", default="literal-eq13",
                          choices=("literal-eq13", "dicke-form"),
                          help="two-mode Hamiltonian variant for fig2")
    p_preset.add_argument("--noise-preset", default="caption", choices=("caption", "text"),
                          help="qubit rate set for fig1 (figure-caption or in-text values)")

    p_sweep = sub.add_parser("sweep", help="sweep one numeric scenario field")
    p_sweep.add_argument("scenario")
    p_sweep.add_argument("--axis", required=True, help="dotted field path, e.g. trajectory.omega")
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated numbers, e.g. 1.3,1.4,1.5")
    p_sweep.add_argument("--out", default="out")
    p_sweep.add_argument("--workers", type=int, default=None)

    p_val = sub.add_parser("validate", help="validate a scenario and echo its normalized form")
    p_val.add_argument("scenario")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            tag = preset_tag_of(args.scenario)
            if tag is not None:
                report = run_preset(tag, args.out, workers=args.workers)
                print(f"preset {tag}: {len(report.results)} runs written to {args.out}")
            else:
                s = parse_scenario(args.scenario)
                result = run_scenario(s, args.out)
                print(f"wrote {s.name}.csv ({len(result.columns)} tracks) to {args.out}")
        elif args.command == "preset":
            report = run_preset(args.name, args.out, variant=args.variant,
                                noise_preset=args.noise_preset)
            print(f"preset {args.name}: {len(report.results)} runs written to {args.out}")
        elif args.command == "sweep":
            s = parse_scenario(args.scenario)
            try:
                values = [float(x) for x in args.values.split(",") if x.strip()]
            except ValueError as exc:
                raise ConfigError(f"--values must be comma-separated numbers: {exc}") from exc
            rows = sweep(s, args.axis, values, outdir=args.out, workers=args.workers)
            print(f"sweep over {args.axis}: {len(rows)} rows written to {args.out}")
        elif args.command == "validate":
            s = parse_scenario(args.scenario)
            sys.stdout.write(normalized_dump(s))
        return 0
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except SuperlumError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
