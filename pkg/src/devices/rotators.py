"""
Field regions: spin flippers and z-rotation (detuning) segments.
"""

import math

from ..schemas.models import AXIS_X, AXIS_Z, Message, RotationSpec
from ..spin.message import MessageBeam, rotate

SPIN_FLIP = RotationSpec(axis=AXIS_X, angle=math.pi / 2)


def spin_flip(msg: Message) -> Message:
    """π/2 about x; takes a moment along z to +y."""
    return rotate(msg, SPIN_FLIP)


def detune(msg: Message, phi: float) -> Message:
    return rotate(msg, RotationSpec(axis=AXIS_Z, angle=phi))


def flip_beam(beam: MessageBeam) -> MessageBeam:
    return beam.rotated(SPIN_FLIP.axis, SPIN_FLIP.angle)


def detune_beam(beam: MessageBeam, phi: float) -> MessageBeam:
    if phi == 0.0:
        return beam
    return beam.rotated(AXIS_Z, phi)
