"""
Spin analyzer.

Two event rules decide the output beam x = ±1 from the projection
m' = m·n of the incoming moment on the analyzer axis:

- probabilistic: x = +1 iff (1 + m'S)/2 > r, one uniform r per messenger
- DLM: x = +1 iff m'S > γu, then u ← γu + (1 − γ)x

Ties go to x = -1. An absorbing analyzer destroys the x = -1 messengers,
a splitting analyzer sends them to the second beam. Outgoing messengers
are reset to the eigenstate along x·S·n with zero phases.
"""

from typing import NamedTuple, Optional

import numpy as np
import structlog

from ..config import get_settings
from ..errors import ConfigurationError, InvariantViolation
from ..schemas.models import (
    Absorb,
    AnalyzerConfig,
    AnalyzerMode,
    AnalyzerModel,
    AnalyzerOutcome,
    AnalyzerState,
    Branch,
    Message,
    Pass,
)
from ..spin.message import MessageBeam, message_from_moment, moment_components

logger = structlog.get_logger()

# rounding slack on |u| <= 1
_U_SLACK = 1e-12


class BeamOutcome(NamedTuple):
    """Result of pushing a beam through one analyzer."""
    x: np.ndarray
    passed: MessageBeam
    rejected: Optional[MessageBeam]  # None when absorbed


class SpinAnalyzer:
    """One analyzer instance; owns its random stream or its DLM state."""

    def __init__(
        self,
        config: AnalyzerConfig,
        rng: Optional[np.random.Generator] = None,
        stream_key: Optional[str] = None,
        debug: Optional[bool] = None,
    ):
        if config.model is AnalyzerModel.PROBABILISTIC and rng is None:
            raise ConfigurationError("Probabilistic analyzer requires a random stream")
        self.config = config
        self.state = AnalyzerState(internal_u=config.initial_u, stream_key=stream_key)
        self._rng = rng
        self._axis = np.asarray(config.axis, dtype=float)
        self._debug = get_settings().debug if debug is None else debug

        direction = config.orientation * self._axis
        self._eigen = {
            1: message_from_moment(tuple(direction)),
            -1: message_from_moment(tuple(-direction)),
        }

    def decide(self, projections: np.ndarray) -> np.ndarray:
        """x for each projection m·n, in order."""
        inputs = np.asarray(projections, dtype=float) * self.config.orientation
        if self.config.model is AnalyzerModel.PROBABILISTIC:
            r = self._rng.random(inputs.shape[0])
            x = np.where((1.0 + inputs) / 2.0 > r, 1, -1).astype(np.int8)
        else:
            x = self._learn(inputs)
        self.state.events += int(inputs.shape[0])
        return x

    def _learn(self, inputs: np.ndarray) -> np.ndarray:
        gamma = self.config.gamma
        u = self.state.internal_u
        out = []
        for value in inputs.tolist():
            x = 1 if value > gamma * u else -1
            u = gamma * u + (1.0 - gamma) * x
            if abs(u) > 1.0:
                if self._debug and abs(u) - 1.0 > _U_SLACK:
                    raise InvariantViolation(f"DLM state left [-1, 1]: u={u}")
                u = max(-1.0, min(1.0, u))
            out.append(x)
        self.state.internal_u = u
        return np.asarray(out, dtype=np.int8)

    def process(self, msg: Message) -> AnalyzerOutcome:
        """Single-messenger form of process_beam."""
        m = moment_components(msg.psi1, msg.psi2, msg.theta)
        x = int(self.decide(np.array([m @ self._axis]))[0])
        if self.config.mode is AnalyzerMode.SPLITTING:
            return Branch(x=x, message=self._eigen[x])
        if x == 1:
            return Pass(message=self._eigen[1])
        return Absorb()

    def process_beam(self, beam: MessageBeam) -> BeamOutcome:
        x = self.decide(beam.moments() @ self._axis) if len(beam) else np.empty(0, dtype=np.int8)
        plus = x == 1
        passed = self._eigen_beam(1, beam.ids[plus])
        if self.config.mode is AnalyzerMode.ABSORBING:
            return BeamOutcome(x=x, passed=passed, rejected=None)
        return BeamOutcome(x=x, passed=passed, rejected=self._eigen_beam(-1, beam.ids[~plus]))

    def _eigen_beam(self, x: int, ids: np.ndarray) -> MessageBeam:
        msg = self._eigen[x]
        n = ids.shape[0]
        return MessageBeam(
            psi1=np.full(n, msg.psi1),
            psi2=np.full(n, msg.psi2),
            theta=np.full(n, msg.theta),
            ids=ids,
        )
