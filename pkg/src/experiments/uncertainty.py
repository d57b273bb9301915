"""
Two-analyzer detuning experiment.

One setting run sends N messengers through

    source(a) → R_z(θ1+θ2) → SF2 → R_z(θ3) → SA2(S1) → SF3 → R_z(θ4)
              → SF4 → R_z(θ5) → SA3(S2) → detector

with absorbing analyzers along z. A sweep repeats the four (S1, S2)
settings for every detuning angle and every initial moment it needs.
DLM runs warm both analyzers up before the N counted messengers.
"""

import time
from typing import NamedTuple, Optional

import structlog

from ..audit.logger import get_auditor
from ..devices.analyzer import SpinAnalyzer
from ..devices.detector import Detector
from ..devices.rotators import detune_beam, flip_beam
from ..devices.source import emit_beam, prepare_stage_one
from ..schemas.models import (
    AXIS_Z,
    SETTING_PAIRS,
    AnalyzerConfig,
    AnalyzerMode,
    AnalyzerModel,
    CellCount,
    CountTable,
    MagneticMoment,
    SourceConfig,
    StageAngles,
    UncertaintyRunConfig,
)
from ..spin.message import MessageBeam
from .runner import run_tasks
from .seeding import make_generator, stream_key
from .warmup import warm_up

logger = structlog.get_logger()

EXPERIMENT = "uncertainty-sweep"

MOMENT_X = MagneticMoment(mx=1.0, my=0.0, mz=0.0)
MOMENT_Y = MagneticMoment(mx=0.0, my=1.0, mz=0.0)


class SweepPoint(NamedTuple):
    """Count tables at one detuning angle."""
    phi: float
    table_x: CountTable
    table_y: CountTable
    table_a: CountTable  # configured initial moment; same object as x or y when equal


def _analyzer(cfg: UncertaintyRunConfig, orientation: int, key: str) -> SpinAnalyzer:
    config = AnalyzerConfig(
        axis=AXIS_Z,
        orientation=orientation,
        model=cfg.analyzer_model,
        gamma=cfg.gamma,
        mode=AnalyzerMode.ABSORBING,
        initial_u=cfg.initial_u,
    )
    rng = make_generator(cfg.master_seed, key) if cfg.analyzer_model is AnalyzerModel.PROBABILISTIC else None
    return SpinAnalyzer(config, rng=rng, stream_key=key)


def setting_key(phi: float, s1: int, s2: int, moment: MagneticMoment) -> str:
    return stream_key("uncertainty", phi, s1, s2, moment.as_tuple())


def run_setting_pair(
    cfg: UncertaintyRunConfig,
    phi: float,
    s1: int,
    s2: int,
    moment: Optional[MagneticMoment] = None,
    angles: Optional[StageAngles] = None,
    n_events: Optional[int] = None,
) -> CellCount:
    """Run N messenger lifecycles at one (φ, S1, S2) setting."""
    moment = moment or cfg.initial_moment
    angles = angles or StageAngles.from_detuning(phi, cfg.theta3, cfg.theta5)
    n = cfg.events_per_setting if n_events is None else n_events
    key = setting_key(phi, s1, s2, moment)
    sa2 = _analyzer(cfg, s1, f"{key}|SA2")
    sa3 = _analyzer(cfg, s2, f"{key}|SA3")

    def emit(count: int) -> MessageBeam:
        if cfg.explicit_stage_one:
            return prepare_stage_one(moment, count)
        return emit_beam(SourceConfig(initial_moment=moment), count)

    def first_leg(beam: MessageBeam) -> MessageBeam:
        beam = detune_beam(flip_beam(detune_beam(beam, angles.theta1 + angles.theta2)), angles.theta3)
        return sa2.process_beam(beam).passed

    def second_leg(beam: MessageBeam) -> MessageBeam:
        beam = detune_beam(flip_beam(detune_beam(flip_beam(beam), angles.theta4)), angles.theta5)
        return sa3.process_beam(beam).passed

    warm_up((sa2, sa3), lambda count: second_leg(first_leg(emit(count))), cfg.effective_warmup)

    first = first_leg(emit(n))
    detector = Detector()
    detector.register(second_leg(first))

    survivors = len(first)
    return CellCount(
        s1=s1,
        s2=s2,
        emitted=n,
        detected=detector.count,
        destroyed_first=n - survivors,
        destroyed_second=survivors - detector.count,
    )


def _moments_needed(cfg: UncertaintyRunConfig) -> list[MagneticMoment]:
    moments = [MOMENT_X, MOMENT_Y]
    if cfg.initial_moment not in moments:
        moments.append(cfg.initial_moment)
    return moments


def run_uncertainty_sweep(cfg: UncertaintyRunConfig) -> list[SweepPoint]:
    """
    Four setting runs per φ for a = x, a = y and the configured moment.

    Deterministic for a given master seed; independent of the worker count.
    """
    start = time.perf_counter()
    moments = _moments_needed(cfg)
    tasks = [
        (cfg, phi, s1, s2, m)
        for phi in cfg.detuning_grid
        for m in moments
        for s1, s2 in SETTING_PAIRS
    ]
    logger.info(
        "Starting uncertainty sweep",
        points=len(cfg.detuning_grid),
        runs=len(tasks),
        model=cfg.analyzer_model.value,
        n_events=cfg.events_per_setting,
    )

    auditor = get_auditor()
    cells: dict[tuple[float, MagneticMoment], list[CellCount]] = {}
    for (_, phi, s1, s2, m), (cell, elapsed_ms) in zip(tasks, run_tasks(run_setting_pair, tasks)):
        auditor.record(
            EXPERIMENT, setting_key(phi, s1, s2, m),
            cell.emitted, cell.detected, cell.destroyed, elapsed_ms,
        )
        cells.setdefault((phi, m), []).append(cell)

    points = []
    for phi in cfg.detuning_grid:
        tables = {
            m: CountTable(phi=phi, initial_moment=m.as_tuple(), cells=tuple(cells[(phi, m)]))
            for m in moments
        }
        points.append(SweepPoint(
            phi=phi,
            table_x=tables[MOMENT_X],
            table_y=tables[MOMENT_Y],
            table_a=tables[cfg.initial_moment],
        ))

    logger.info(
        "Uncertainty sweep complete",
        points=len(points),
        elapsed_ms=round((time.perf_counter() - start) * 1000, 1),
    )
    return points
