"""
Single-analyzer sweep over initial states for the Robertson relation.

For each a_z a direction in the x-y plane is drawn at random, then six
absorbing runs measure along ±x, ±y and ±z.
"""

import math
import time
from typing import NamedTuple

import structlog

from ..audit.logger import get_auditor
from ..devices.analyzer import SpinAnalyzer
from ..devices.detector import Detector
from ..devices.source import emit_beam
from ..schemas.models import (
    AXIS_X,
    AXIS_Y,
    AXIS_Z,
    AnalyzerConfig,
    AnalyzerMode,
    AnalyzerModel,
    MagneticMoment,
    RobertsonRunConfig,
    SourceConfig,
    Vector3,
)
from ..stats.estimators import robertson_estimate
from .runner import run_tasks
from .seeding import make_generator, stream_key
from .warmup import warm_up

logger = structlog.get_logger()

EXPERIMENT = "robertson-sweep"

AXIS_RUNS: tuple[tuple[str, Vector3, int], ...] = (
    ("+x", AXIS_X, 1),
    ("-x", AXIS_X, -1),
    ("+y", AXIS_Y, 1),
    ("-y", AXIS_Y, -1),
    ("+z", AXIS_Z, 1),
    ("-z", AXIS_Z, -1),
)


class AxisCount(NamedTuple):
    emitted: int
    detected: int
    destroyed: int


class RobertsonPoint(NamedTuple):
    """Estimates for one initial state."""
    az: float
    moment: Vector3
    counts: dict[str, int]
    sigma_x: float
    sigma_y: float
    sigma_z: float


def random_direction(master_seed: int, az: float) -> MagneticMoment:
    """a = (√(1−a_z²) cos 2πr, √(1−a_z²) sin 2πr, a_z) with one uniform r."""
    r = make_generator(master_seed, stream_key("robertson", az, "direction")).random()
    rho = math.sqrt(max(0.0, 1.0 - az * az))
    return MagneticMoment(mx=rho * math.cos(2 * math.pi * r), my=rho * math.sin(2 * math.pi * r), mz=az)


def run_axis(
    cfg: RobertsonRunConfig,
    moment: MagneticMoment,
    label: str,
    axis: Vector3,
    orientation: int,
    az: float,
) -> AxisCount:
    """N messengers through one absorbing analyzer along S·axis."""
    n = cfg.events_per_axis
    key = stream_key("robertson", az, label)
    config = AnalyzerConfig(
        axis=axis,
        orientation=orientation,
        model=cfg.analyzer_model,
        gamma=cfg.gamma,
        mode=AnalyzerMode.ABSORBING,
        initial_u=cfg.initial_u,
    )
    rng = make_generator(cfg.master_seed, key) if cfg.analyzer_model is AnalyzerModel.PROBABILISTIC else None
    analyzer = SpinAnalyzer(config, rng=rng, stream_key=key)

    def feed(count: int):
        return analyzer.process_beam(emit_beam(SourceConfig(initial_moment=moment), count))

    warm_up((analyzer,), feed, cfg.effective_warmup)
    out = feed(n)

    detector = Detector()
    detector.register(out.passed)
    return AxisCount(emitted=n, detected=detector.count, destroyed=n - detector.count)


def run_robertson_sweep(cfg: RobertsonRunConfig) -> list[RobertsonPoint]:
    start = time.perf_counter()
    moments = {az: random_direction(cfg.master_seed, az) for az in cfg.az_grid}
    tasks = [
        (cfg, moments[az], label, axis, orientation, az)
        for az in cfg.az_grid
        for label, axis, orientation in AXIS_RUNS
    ]
    logger.info("Starting Robertson sweep", points=len(cfg.az_grid), runs=len(tasks))

    auditor = get_auditor()
    counts: dict[float, dict[str, int]] = {az: {} for az in cfg.az_grid}
    for (_, _, label, _, _, az), (result, elapsed_ms) in zip(tasks, run_tasks(run_axis, tasks)):
        auditor.record(
            EXPERIMENT, stream_key("robertson", az, label),
            result.emitted, result.detected, result.destroyed, elapsed_ms,
        )
        counts[az][label] = result.detected

    points = []
    for az in cfg.az_grid:
        c = counts[az]
        points.append(RobertsonPoint(
            az=az,
            moment=moments[az].as_tuple(),
            counts=c,
            sigma_x=robertson_estimate(c["+x"], c["-x"]),
            sigma_y=robertson_estimate(c["+y"], c["-y"]),
            sigma_z=robertson_estimate(c["+z"], c["-z"]),
        ))

    logger.info(
        "Robertson sweep complete",
        points=len(points),
        elapsed_ms=round((time.perf_counter() - start) * 1000, 1),
    )
    return points
