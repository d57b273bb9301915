"""
Audit logging module.
Keeps a queryable, in-process trail of every executed setting run and
enforces the messenger conservation law on each of them.
"""

import uuid
from collections import defaultdict, deque
from typing import Any, Optional

import structlog

from ..config import get_settings
from ..errors import InvariantViolation
from ..schemas.models import AuditEntry

logger = structlog.get_logger()


class RunAuditor:
    """
    Records one AuditEntry per setting run.
    Keeps the newest max_entries (SPINSIM_AUDIT_MAX_ENTRIES by default).
    """

    def __init__(self, max_entries: Optional[int] = None):
        max_entries = get_settings().audit_max_entries if max_entries is None else max_entries
        self._entries: deque[AuditEntry] = deque(maxlen=max_entries)

    def record(
        self,
        experiment: str,
        key: str,
        emitted: int,
        detected: int,
        destroyed: int,
        elapsed_ms: float,
    ) -> AuditEntry:
        """
        Log a run and check emitted = detected + destroyed.

        Raises:
            InvariantViolation: when messengers were lost or invented
        """
        success = emitted == detected + destroyed
        entry = AuditEntry(
            id=str(uuid.uuid4()),
            experiment=experiment,
            key=key,
            emitted=emitted,
            detected=detected,
            destroyed=destroyed,
            elapsed_ms=elapsed_ms,
            success=success,
            error_message=None if success else "conservation violated",
        )
        self._entries.append(entry)

        if not success:
            logger.error(
                "Conservation violated",
                experiment=experiment,
                key=key,
                emitted=emitted,
                detected=detected,
                destroyed=destroyed,
            )
            raise InvariantViolation(
                f"Run {key}: detected {detected} + destroyed {destroyed} != emitted {emitted}"
            )

        logger.debug(
            "Run audited",
            audit_id=entry.id,
            experiment=experiment,
            key=key,
            detected=detected,
            elapsed_ms=round(elapsed_ms, 3),
        )
        return entry

    def query(
        self,
        experiment: Optional[str] = None,
        success_only: bool = False,
        limit: int = 100,
    ) -> list[AuditEntry]:
        """Query entries with filters, newest first."""
        result = []
        for entry in reversed(self._entries):
            if experiment and entry.experiment != experiment:
                continue
            if success_only and not entry.success:
                continue
            result.append(entry)
            if len(result) >= limit:
                break
        return result

    def summary(self) -> dict[str, Any]:
        """Totals per experiment."""
        totals: dict[str, dict[str, Any]] = defaultdict(
            lambda: {"runs": 0, "failures": 0, "emitted": 0, "detected": 0, "destroyed": 0, "elapsed_ms": 0.0}
        )
        for entry in self._entries:
            t = totals[entry.experiment]
            t["runs"] += 1
            t["failures"] += 0 if entry.success else 1
            t["emitted"] += entry.emitted
            t["detected"] += entry.detected
            t["destroyed"] += entry.destroyed
            t["elapsed_ms"] += entry.elapsed_ms
        return dict(totals)

    def reset(self) -> None:
        self._entries.clear()


# Global auditor instance
_auditor: Optional[RunAuditor] = None


def get_auditor() -> RunAuditor:
    """Get or create the run auditor."""
    global _auditor
    if _auditor is None:
        _auditor = RunAuditor()
    return _auditor
