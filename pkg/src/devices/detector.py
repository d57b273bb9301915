"""
Counting detector with 100% efficiency.
"""

from ..schemas.models import DetectorCounter
from ..spin.message import MessageBeam


def detector_hit(counter: DetectorCounter) -> DetectorCounter:
    """One messenger detected and destroyed."""
    return DetectorCounter(count=counter.count + 1)


class Detector:
    """Counts every messenger that reaches it."""

    def __init__(self):
        self._counter = DetectorCounter()

    @property
    def count(self) -> int:
        return self._counter.count

    def hit(self) -> None:
        self._counter = detector_hit(self._counter)

    def register(self, beam: MessageBeam) -> None:
        """Detect a whole beam; same result as one hit per messenger."""
        self._counter = DetectorCounter(count=self._counter.count + len(beam))
