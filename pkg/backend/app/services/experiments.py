"""
Subcommand bodies for the experiment CLI.

Each command takes a validated RunConfig, prints its report to stdout and
returns the process exit code: 0 success, 1 verification or detection
failure, 2 usage error.
"""

from __future__ import annotations

import logging
import sys
from pathlib import Path
from typing import List, Sequence

import pandas as pd

from ...plotting.svg_charts import LineSeries, write_line_chart_svg
from ..dependencies import get_app_settings
from ..schemas import RunConfig, SweepRow, VerifyReport
from .fidelity_engine import gisin_reference_fidelity
from .scheme_optimizer import NoKinkFoundError, SweepPointError, locate_kink, optimize_at_alpha, sweep_alpha
from .verification import run_verification


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

CSV_COLUMNS = ["alpha", "beta_opt", "k_opt", "k_prime_opt", "f_bar", "f_noop", "f_classical"]


def format_number(value: float) -> str:
    digits = get_app_settings().csv_digits
    return f"{value:.{digits}g}"


def rows_to_frame(rows: Sequence[SweepRow]) -> pd.DataFrame:
    return pd.DataFrame([row.model_dump() for row in rows], columns=CSV_COLUMNS)


def write_sweep_csv(rows: Sequence[SweepRow], path: Path) -> None:
    digits = get_app_settings().csv_digits
    frame = rows_to_frame(rows)
    # UTF-8 without BOM, LF line endings
    frame.to_csv(path, index=False, float_format=f"%.{digits}g", lineterminator="\n", encoding="utf-8")


def write_sweep_figures(rows: Sequence[SweepRow], directory: Path) -> List[Path]:
    settings = get_app_settings()
    alphas = [r.alpha for r in rows]
    gisin = gisin_reference_fidelity()
    fig1 = directory / "fig1.svg"
    fig2 = directory / "fig2.svg"
    # beta_opt is undefined where the landscape is flat; those points are not drawn
    resolved = [r for r in rows if not r.degenerate]
    write_line_chart_svg(
        fig1,
        "Average fidelity vs depolarizing parameter",
        "alpha",
        "average fidelity",
        [
            LineSeries("f_bar", alphas, [r.f_bar for r in rows], style="solid"),
            LineSeries("f_noop", alphas, [r.f_noop for r in rows], style="dashed"),
            LineSeries("f_classical", alphas, [r.f_classical for r in rows], style="dotted"),
            LineSeries("gisin", alphas, [gisin] * len(rows), style="dotted"),
        ],
        width=settings.svg_width,
        height=settings.svg_height,
    )
    write_line_chart_svg(
        fig2,
        "Optimal cap angle vs depolarizing parameter",
        "alpha",
        "beta_opt (rad)",
        [
            LineSeries(
                "beta_opt",
                [r.alpha for r in resolved],
                [r.beta_opt for r in resolved],
                break_threshold=settings.kink_drop,
            )
        ],
        width=settings.svg_width,
        height=settings.svg_height,
    )
    return [fig1, fig2]


def cmd_sweep(cfg: RunConfig) -> int:
    try:
        rows = sweep_alpha(
            cfg.alpha_min,
            cfg.alpha_max,
            cfg.steps,
            beta_grid_size=cfg.beta_grid_size,
            n_workers=cfg.workers,
            show_progress=cfg.show_progress,
        )
    except (SweepPointError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    output = cfg.output_path
    try:
        write_sweep_csv(rows, output)
        written = [output]
        if cfg.format == "svg":
            written += write_sweep_figures(rows, output.parent)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE

    for path in written:
        print(f"wrote {path}")
    print(f"rows={len(rows)}")
    return EXIT_OK


def cmd_optimize(cfg: RunConfig) -> int:
    try:
        result = optimize_at_alpha(cfg.alpha, cfg.beta_grid_size)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for key, value in result.model_dump().items():
        if isinstance(value, bool):
            text = str(value).lower()
        else:
            text = value if isinstance(value, str) else format_number(value)
        print(f"{key}={text}")
    return EXIT_OK


def print_verify_report(report: VerifyReport) -> None:
    print(f"seed={report.seed} mc_samples={report.mc_samples}")
    for check in report.checks:
        status = "PASS" if check.passed else "FAIL"
        print(
            f"{status} {check.name} discrepancy={format_number(check.discrepancy)} "
            f"tolerance={format_number(check.tolerance)} {check.detail}".rstrip()
        )


def cmd_verify(cfg: RunConfig) -> int:
    seed = cfg.seed if cfg.seed is not None else get_app_settings().default_seed
    report = run_verification(seed, cfg.mc_samples, inject_broken_channel=cfg.inject_broken_channel)
    print_verify_report(report)
    failure = report.first_failure
    if failure is not None:
        print(f"verification failed: {failure.name}")
        return EXIT_FAILURE
    print("all checks passed")
    return EXIT_OK


def cmd_kink(cfg: RunConfig) -> int:
    try:
        rows = sweep_alpha(
            cfg.alpha_min,
            cfg.alpha_max,
            cfg.steps,
            beta_grid_size=cfg.beta_grid_size,
            n_workers=cfg.workers,
            show_progress=cfg.show_progress,
        )
        report = locate_kink(rows, cfg.beta_grid_size)
    except NoKinkFoundError as exc:
        print(str(exc))
        return EXIT_FAILURE
    except (SweepPointError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"alpha_kink={format_number(report.alpha_kink)}")
    print(f"beta_jump_to={format_number(report.beta_jump_to)}")
    print(f"bracket_width={format_number(report.bracket_width)}")
    return EXIT_OK


COMMANDS = {
    "sweep": cmd_sweep,
    "optimize": cmd_optimize,
    "verify": cmd_verify,
    "kink": cmd_kink,
}


def run_command(cfg: RunConfig) -> int:
    logger.info("running %s", cfg.command)
    return COMMANDS[cfg.command](cfg)
