# devices
from .analyzer import BeamOutcome, SpinAnalyzer
from .detector import Detector, detector_hit
from .rotators import SPIN_FLIP, detune, detune_beam, flip_beam, spin_flip
from .source import emit_beam, prepare_stage_one, source_emit

__all__ = [
    "BeamOutcome",
    "Detector",
    "SPIN_FLIP",
    "SpinAnalyzer",
    "detector_hit",
    "detune",
    "detune_beam",
    "emit_beam",
    "flip_beam",
    "prepare_stage_one",
    "source_emit",
    "spin_flip",
]
