"""
One-cbit-assisted recovery of a depolarized qubit: experiment runner.

Usage:
    python scripts/cbit_recovery.py sweep --alpha-min 0 --alpha-max 1 --steps 101 -o out/sweep.csv --format svg
    python scripts/cbit_recovery.py optimize --alpha 0.5
    python scripts/cbit_recovery.py verify --mc-samples 10^6 --seed 42
    python scripts/cbit_recovery.py kink
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from backend.app.dependencies import get_app_settings
from backend.app.schemas import RunConfig
from backend.app.services.experiments import EXIT_USAGE, run_command


def parse_count(text: str) -> int:
    """Accepts plain integers and the forms 10^6 and 1e6."""
    try:
        if "^" in text:
            base, exponent = text.split("^", 1)
            return int(base) ** int(exponent)
        if "e" in text.lower():
            value = float(text)
            if value != int(value):
                raise ValueError
            return int(value)
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a count: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    settings = get_app_settings()
    parser = argparse.ArgumentParser(description="Optimal one-cbit recovery schemes for a depolarizing qubit channel")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--beta-grid", type=parse_count, default=settings.beta_grid_size, help="Points in the beta grid")
        p.add_argument("--workers", type=int, default=1, help="Worker processes for sweep points")
        p.add_argument("--no-progress", action="store_true", help="Hide the progress bar")

    def add_range(p: argparse.ArgumentParser) -> None:
        p.add_argument("--alpha-min", type=float, default=0.0)
        p.add_argument("--alpha-max", type=float, default=1.0)
        p.add_argument("--steps", type=parse_count, default=101)

    sweep = sub.add_parser("sweep", help="Optimize over a uniform alpha grid and write figure data")
    add_range(sweep)
    add_common(sweep)
    sweep.add_argument("-o", "--output", type=Path, required=True, help="CSV output path")
    sweep.add_argument("--format", choices=["csv", "svg"], default="csv", help="svg also writes fig1.svg and fig2.svg")

    optimize = sub.add_parser("optimize", help="Optimize the scheme for one alpha")
    optimize.add_argument("--alpha", type=float, required=True)
    add_common(optimize)

    verify = sub.add_parser("verify", help="Run the oracle and invariant checks")
    verify.add_argument("--mc-samples", type=parse_count, default=settings.default_mc_samples)
    verify.add_argument("--seed", type=parse_count, default=settings.default_seed)
    verify.add_argument(
        "--inject-broken-channel",
        action="store_true",
        help="Debug: add a non-CP channel to the CP suite as if it were physical",
    )

    kink = sub.add_parser("kink", help="Locate the jump in the optimal cap angle")
    add_range(kink)
    add_common(kink)
    return parser


def to_run_config(args: argparse.Namespace) -> RunConfig:
    fields = {"command": args.command}
    for name in ("alpha", "alpha_min", "alpha_max", "steps", "seed", "workers", "inject_broken_channel"):
        if hasattr(args, name):
            fields[name] = getattr(args, name)
    if hasattr(args, "beta_grid"):
        fields["beta_grid_size"] = args.beta_grid
    if hasattr(args, "mc_samples"):
        fields["mc_samples"] = args.mc_samples
    if hasattr(args, "output"):
        fields["output_path"] = args.output
    if hasattr(args, "format"):
        fields["format"] = args.format
    fields["show_progress"] = not getattr(args, "no_progress", False)
    return RunConfig(**fields)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = to_run_config(args)
    except ValidationError as exc:
        for error in exc.errors():
            location = ".".join(str(part) for part in error["loc"]) or "config"
            print(f"error: {location}: {error['msg']}", file=sys.stderr)
        return EXIT_USAGE
    return run_command(cfg)


if __name__ == "__main__":
    sys.exit(main())
