# spin
from .message import (
    ROTATION_SENSE,
    MessageBeam,
    message_from_moment,
    moment_of,
    precess,
    rotate,
    rotation_matrix,
)

__all__ = [
    "ROTATION_SENSE",
    "MessageBeam",
    "message_from_moment",
    "moment_of",
    "precess",
    "rotate",
    "rotation_matrix",
]
