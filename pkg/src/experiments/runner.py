"""
Execution of independent setting runs.

Runs share no state, so they can go to a process pool. Results come back
in task order whatever the completion order.
"""

import time
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Optional, Sequence

import structlog

from ..config import get_settings

logger = structlog.get_logger()


def timed(fn: Callable[..., Any], args: tuple) -> tuple[Any, float]:
    """Call fn(*args); returns (result, elapsed ms)."""
    start = time.perf_counter()
    result = fn(*args)
    return result, (time.perf_counter() - start) * 1000


def run_tasks(
    fn: Callable[..., Any],
    tasks: Sequence[tuple],
    workers: Optional[int] = None,
) -> list[tuple[Any, float]]:
    """Run fn over every argument tuple; fn must be a module-level function."""
    workers = workers or get_settings().workers
    if workers <= 1 or len(tasks) <= 1:
        return [timed(fn, args) for args in tasks]

    logger.info("Dispatching runs to process pool", workers=workers, tasks=len(tasks))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(timed, fn, args) for args in tasks]
        return [f.result() for f in futures]
