"""
Three-level filtering experiment with splitting analyzers.

Level one analyzes along b, level two along c (one analyzer per beam),
level three along d (one analyzer per beam). No messenger is destroyed;
each lands in one of eight output beams.
"""

import time
from typing import Any, Optional, Sequence

import structlog

from ..audit.logger import get_auditor
from ..config import get_settings
from ..devices.analyzer import SpinAnalyzer
from ..devices.source import emit_beam
from ..oracle.quantum import filtering_directions
from ..schemas.models import (
    AnalyzerConfig,
    AnalyzerMode,
    AnalyzerModel,
    MagneticMoment,
    SourceConfig,
    TripleCountTable,
    Vector3,
)
from ..spin.message import MessageBeam
from .runner import run_tasks
from .seeding import make_generator, stream_key
from .warmup import warm_up

logger = structlog.get_logger()

EXPERIMENT = "filtering-triple"


def _moment(a: Any) -> MagneticMoment:
    return a if isinstance(a, MagneticMoment) else MagneticMoment.from_vector(a)


def run_filtering_triple(
    a: Any,
    b: Vector3,
    c: Vector3,
    d: Vector3,
    n_events: int,
    master_seed: int,
    model: AnalyzerModel = AnalyzerModel.PROBABILISTIC,
    gamma: Optional[float] = None,
    warmup_events: Optional[int] = None,
    initial_u: Optional[float] = None,
) -> TripleCountTable:
    """Send N messengers with moment a through the seven analyzers."""
    settings = get_settings()
    a = _moment(a)
    gamma = settings.default_gamma if gamma is None else gamma
    initial_u = settings.dlm_initial_u if initial_u is None else initial_u
    warmup = 0
    if model is AnalyzerModel.DLM:
        warmup = settings.dlm_warmup_events if warmup_events is None else warmup_events

    base = stream_key("filtering", a.as_tuple(), b, c, d)

    def analyzer(axis: Vector3, label: str) -> SpinAnalyzer:
        key = f"{base}|{label}"
        config = AnalyzerConfig(
            axis=axis, model=model, gamma=gamma, mode=AnalyzerMode.SPLITTING, initial_u=initial_u
        )
        rng = make_generator(master_seed, key) if model is AnalyzerModel.PROBABILISTIC else None
        return SpinAnalyzer(config, rng=rng, stream_key=key)

    first = analyzer(b, "b")
    second = {s1: analyzer(c, f"c{s1:+d}") for s1 in (1, -1)}
    third = {(s1, s2): analyzer(d, f"d{s1:+d}{s2:+d}") for s1 in (1, -1) for s2 in (1, -1)}

    def split(device: SpinAnalyzer, beam: MessageBeam) -> dict[int, MessageBeam]:
        out = device.process_beam(beam)
        return {1: out.passed, -1: out.rejected}

    def route(count: int) -> dict[tuple[int, int, int], int]:
        counts = {}
        level1 = split(first, emit_beam(SourceConfig(initial_moment=a), count))
        for s1, beam1 in level1.items():
            level2 = split(second[s1], beam1)
            for s2, beam2 in level2.items():
                level3 = split(third[(s1, s2)], beam2)
                for s3, beam3 in level3.items():
                    counts[(s1, s2, s3)] = len(beam3)
        return counts

    warm_up([first, *second.values(), *third.values()], route, warmup)
    return TripleCountTable(counts=route(n_events), emitted=n_events)


def _grid_task(
    a: MagneticMoment,
    phi: float,
    n_events: int,
    master_seed: int,
    model: AnalyzerModel,
    gamma: Optional[float],
    warmup_events: Optional[int],
) -> TripleCountTable:
    b, c, d = filtering_directions(phi)
    return run_filtering_triple(a, b, c, d, n_events, master_seed, model, gamma, warmup_events)


def run_filtering_grid(
    a: Any,
    phis: Sequence[float],
    n_events: int,
    master_seed: int,
    model: AnalyzerModel = AnalyzerModel.PROBABILISTIC,
    gamma: Optional[float] = None,
    warmup_events: Optional[int] = None,
) -> list[tuple[float, TripleCountTable]]:
    """Triple runs with b = d = x cos φ + y sin φ and c = y for each φ."""
    start = time.perf_counter()
    a = _moment(a)
    tasks = [(a, phi, n_events, master_seed, model, gamma, warmup_events) for phi in phis]
    auditor = get_auditor()
    results = []
    for phi, (table, elapsed_ms) in zip(phis, run_tasks(_grid_task, tasks)):
        auditor.record(
            EXPERIMENT, stream_key("filtering", a.as_tuple(), phi),
            table.emitted, sum(table.counts.values()), 0, elapsed_ms,
        )
        results.append((phi, table))

    logger.info(
        "Filtering sweep complete",
        points=len(results),
        elapsed_ms=round((time.perf_counter() - start) * 1000, 1),
    )
    return results
