"""
DLM warm-up.

Before counting starts, every learning analyzer in a network processes at
least `events` messengers of its own. Analyzers behind another analyzer
only see its survivors, so warm-up messengers are fed in rounds until
every device has caught up or stopped receiving any.
"""

from typing import Callable, Sequence

import structlog

from ..devices.analyzer import SpinAnalyzer

logger = structlog.get_logger()

# caps the feed when an upstream analyzer passes almost nothing
MAX_WARMUP_ROUNDS = 100
# empty rounds in a row before a device counts as starved; an upstream DLM
# can block for several thousand events while it learns
STARVED_AFTER = 10


def warm_up(
    devices: Sequence[SpinAnalyzer],
    feed: Callable[[int], object],
    events: int,
    max_rounds: int = MAX_WARMUP_ROUNDS,
) -> int:
    """
    Call feed(events) until every device has seen `events` messengers.

    feed sends a batch of fresh messengers through the whole network and
    its result is discarded. A device still short that receives nothing
    for STARVED_AFTER rounds in a row is no longer waited for. Returns the
    rounds fed.
    """
    if events <= 0:
        return 0

    idle = [0] * len(devices)

    def waiting() -> list[int]:
        return [
            i for i, d in enumerate(devices)
            if d.state.events < events and idle[i] < STARVED_AFTER
        ]

    for rounds in range(max_rounds):
        lagging = waiting()
        if not lagging:
            return rounds
        before = {i: devices[i].state.events for i in lagging}
        feed(events)
        for i, seen in before.items():
            idle[i] = idle[i] + 1 if devices[i].state.events == seen else 0

    short = [devices[i].state.stream_key for i in waiting()]
    if short:
        logger.warning("Warm-up round limit reached", rounds=max_rounds, short=short)
    return max_rounds
