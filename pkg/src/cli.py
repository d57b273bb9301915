"""
Neutron spin simulator command line.

    python -m src.cli uncertainty-sweep --seed 42
    python -m src.cli robertson-sweep --seed 7 --az-step 0.05 --emit-plots

Exit status: 0 success, 2 usage error, 3 I/O error, 4 invariant violation.
"""

import argparse
import logging
import sys
from typing import Optional, Sequence

import structlog
from pydantic import BaseModel, ValidationError

from .audit.logger import get_auditor
from .config import Settings, get_settings
from .errors import SimulationError
from .experiments.filtering import run_filtering_grid
from .experiments.grids import az_grid, phi_grid
from .experiments.robertson import run_robertson_sweep
from .experiments.uncertainty import run_uncertainty_sweep
from .output.lab_data import load_lab_data
from .output.plots import emit_plot_data
from .output.rows import filtering_rows, oracle_rows, robertson_rows, uncertainty_rows
from .output.writer import write_results
from .schemas.models import (
    TWO_PI,
    AnalyzerModel,
    ErrorReport,
    ExperimentKind,
    MagneticMoment,
    OutputFormat,
    RobertsonRunConfig,
    RunManifest,
    UncertaintyRunConfig,
)

logger = structlog.get_logger()

USAGE_EXIT = 2

FLAG_FOR_FIELD = {
    "seed": "--seed",
    "n_events": "--n-events",
    "model": "--model",
    "gamma": "--gamma",
    "warmup": "--warmup",
    "phi_start": "--phi-start",
    "phi_end": "--phi-end",
    "phi_step": "--phi-step",
    "initial_moment": "--initial-moment",
    "az_step": "--az-step",
    "output_path": "--output",
    "output_format": "--format",
    "emit_plots": "--emit-plots",
    "lab_data": "--lab-data",
}

SUBCOMMANDS = {
    ExperimentKind.UNCERTAINTY_SWEEP: "four-setting detuning runs for a = x, a = y and the initial moment",
    ExperimentKind.FILTERING_TRIPLE: "three splitting analyzers, b = d = x cos φ + y sin φ, c = y",
    ExperimentKind.ROBERTSON_SWEEP: "single-analyzer runs along ±x, ±y, ±z over a grid of a_z",
    ExperimentKind.ORACLE_TABLE: "theory-only probabilities and expectations over the φ grid",
}


def configure_logging(settings: Settings) -> None:
    """structlog over stdlib logging on stderr; stdout stays free for data."""
    logging.basicConfig(
        format="%(message)s",
        stream=sys.stderr,
        level=getattr(logging, settings.effective_log_level),
    )
    renderer = (
        structlog.processors.JSONRenderer()
        if settings.log_json
        else structlog.dev.ConsoleRenderer(colors=False)
    )
    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            renderer,
        ],
        wrapper_class=structlog.stdlib.BoundLogger,
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
    )


def build_parser(settings: Optional[Settings] = None) -> argparse.ArgumentParser:
    settings = settings or get_settings()

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, required=True, help="master seed (unsigned 64-bit)")
    common.add_argument("--n-events", type=int, default=settings.default_events,
                        help="messengers per setting run (default: %(default)s)")
    common.add_argument("--model", choices=[m.value for m in AnalyzerModel],
                        default=AnalyzerModel.PROBABILISTIC.value, help="analyzer event rule")
    common.add_argument("--gamma", type=float, default=settings.default_gamma,
                        help="DLM learning parameter (default: %(default)s)")
    common.add_argument("--warmup", type=int, default=settings.dlm_warmup_events,
                        help="DLM events discarded before counting (default: %(default)s)")
    common.add_argument("--phi-start", type=float, default=0.0, help="first detuning angle, radians")
    common.add_argument("--phi-end", type=float, default=TWO_PI, help="end of the φ grid (exclusive)")
    common.add_argument("--phi-step", type=float, default=settings.default_phi_step,
                        help="φ grid step (default: π/24)")
    common.add_argument("--initial-moment", default="x", help="x, y, z or ax,ay,az")
    common.add_argument("--az-step", type=float, default=settings.default_az_step,
                        help="a_z grid step of the Robertson sweep (default: %(default)s)")
    common.add_argument("--output", default=None,
                        help=f"result file (default: {settings.output_dir}/<experiment>.<format>)")
    common.add_argument("--format", choices=[f.value for f in OutputFormat], default=OutputFormat.CSV.value)
    common.add_argument("--emit-plots", action="store_true", help="also write figure data and a plot script")
    common.add_argument("--lab-data", default=None, help="CSV of measured phi,ozawa_lhs,product points")

    parser = argparse.ArgumentParser(
        prog="python -m src.cli",
        description="Event-by-event simulation of single-neutron spin experiments",
    )
    sub = parser.add_subparsers(dest="experiment", required=True, metavar="EXPERIMENT")
    for kind, help_text in SUBCOMMANDS.items():
        sub.add_parser(kind.value, parents=[common], help=help_text, description=help_text)
    return parser


def parse_cli(args: Optional[Sequence[str]] = None) -> RunManifest:
    """
    Build a RunManifest from command-line arguments.

    Invalid or missing flags end the process with status 2 and a message
    naming the flag (argparse behaviour).
    """
    settings = get_settings()
    parser = build_parser(settings)
    ns = parser.parse_args(args)

    output = ns.output or f"{settings.output_dir}/{ns.experiment}.{ns.format}"
    try:
        return RunManifest(
            experiment=ns.experiment,
            seed=ns.seed,
            n_events=ns.n_events,
            model=ns.model,
            gamma=ns.gamma,
            warmup=ns.warmup,
            phi_start=ns.phi_start,
            phi_end=ns.phi_end,
            phi_step=ns.phi_step,
            initial_moment=ns.initial_moment,
            az_step=ns.az_step,
            output_path=output,
            output_format=ns.format,
            emit_plots=ns.emit_plots,
            lab_data=ns.lab_data,
        )
    except ValidationError as e:
        first = e.errors()[0]
        field = str(first["loc"][0]) if first["loc"] else ""
        flag = FLAG_FOR_FIELD.get(field, "arguments")
        parser.error(f"argument {flag}: {first['msg']}")


def run_manifest(manifest: RunManifest) -> list[BaseModel]:
    """Execute the experiment a manifest describes and return its rows."""
    kind = manifest.experiment
    model = manifest.model

    if kind is ExperimentKind.ROBERTSON_SWEEP:
        cfg = RobertsonRunConfig(
            az_grid=az_grid(manifest.az_step),
            events_per_axis=manifest.n_events,
            master_seed=manifest.seed,
            analyzer_model=model,
            gamma=manifest.gamma,
            warmup_events=manifest.warmup,
        )
        return robertson_rows(manifest, run_robertson_sweep(cfg))

    phis = phi_grid(manifest.phi_start, manifest.phi_end, manifest.phi_step)
    if kind is ExperimentKind.ORACLE_TABLE:
        return oracle_rows(manifest, phis)

    moment = MagneticMoment.from_vector(manifest.moment_vector)
    if kind is ExperimentKind.FILTERING_TRIPLE:
        results = run_filtering_grid(
            moment, phis, manifest.n_events, manifest.seed, model, manifest.gamma, manifest.warmup
        )
        return filtering_rows(manifest, results)

    cfg = UncertaintyRunConfig(
        initial_moment=moment,
        detuning_grid=phis,
        events_per_setting=manifest.n_events,
        analyzer_model=model,
        gamma=manifest.gamma,
        master_seed=manifest.seed,
        warmup_events=manifest.warmup,
    )
    return uncertainty_rows(manifest, run_uncertainty_sweep(cfg))


def report_error(code: str, message: str, details: Optional[dict] = None) -> None:
    report = ErrorReport(code=code, message=message, details=details)
    print(report.model_dump_json(), file=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point; returns the process exit status."""
    settings = get_settings()
    configure_logging(settings)

    try:
        manifest = parse_cli(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else USAGE_EXIT

    get_auditor().reset()
    logger.info("Run started", experiment=manifest.experiment.value, seed=manifest.seed)
    try:
        lab_points = load_lab_data(manifest.lab_data) if manifest.lab_data else None
        rows = run_manifest(manifest)
        path = write_results(manifest, rows)
        if manifest.emit_plots:
            emit_plot_data(manifest, rows, lab_points)
    except SimulationError as e:
        logger.error("Run failed", code=e.code, error=str(e))
        report_error(e.code, str(e), {"experiment": manifest.experiment.value})
        return e.exit_code
    except ValidationError as e:
        logger.error("Invalid run configuration", error=str(e))
        report_error("CONFIG_ERROR", str(e))
        return USAGE_EXIT

    logger.info(
        "Run complete",
        output=str(path),
        rows=len(rows),
        audit=get_auditor().summary().get(manifest.experiment.value),
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
