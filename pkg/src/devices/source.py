"""
Messenger source.
Emits messengers already in the post-stage-1 state, or prepares them
explicitly with SF1 and a z-precession.
"""

import math

import structlog

from ..errors import ConfigurationError
from ..schemas.models import AXIS_Z, MagneticMoment, Message, SourceConfig
from ..spin.message import MessageBeam, message_from_moment
from .rotators import detune_beam, flip_beam

logger = structlog.get_logger()

IN_PLANE_TOLERANCE = 1e-12


def source_emit(cfg: SourceConfig) -> Message:
    """Message whose moment is the configured initial moment."""
    return message_from_moment(cfg.initial_moment)


def emit_beam(cfg: SourceConfig, n: int) -> MessageBeam:
    """n identical messengers in emission order."""
    return MessageBeam.uniform(source_emit(cfg), n)


def stage_one_angle(moment: MagneticMoment) -> float:
    """z-rotation θ1 that turns the SF1 output (+y) onto an in-plane moment."""
    return math.pi / 2 - math.atan2(moment.my, moment.mx)


def prepare_stage_one(moment: MagneticMoment, n: int) -> MessageBeam:
    """Build the post-stage-1 beam from z-polarized messengers.

    SF1 is removed for a = +z; otherwise a must lie in the x-y plane.
    """
    polarized = MessageBeam.uniform(message_from_moment(AXIS_Z), n)
    if moment.as_tuple() == AXIS_Z:
        return polarized
    if abs(moment.mz) > IN_PLANE_TOLERANCE:
        raise ConfigurationError(
            f"Explicit stage 1 prepares in-plane moments or +z only, got {moment.as_tuple()}"
        )
    theta1 = stage_one_angle(moment)
    logger.debug("Stage 1 prepared", theta1=theta1, n=n)
    return detune_beam(flip_beam(polarized), theta1)
