# stats
from .estimators import (
    clamped_root,
    epsilon_eta_from_counts,
    frequencies,
    moment_stderrs,
    moments_of,
    ozawa_check,
    ozawa_holds,
    robertson_check,
    robertson_estimate,
    robertson_holds,
    sign_mean_stderr,
    triple_moments,
    uncertainty_record,
)

__all__ = [
    "clamped_root",
    "epsilon_eta_from_counts",
    "frequencies",
    "moment_stderrs",
    "moments_of",
    "ozawa_check",
    "ozawa_holds",
    "robertson_check",
    "robertson_estimate",
    "robertson_holds",
    "sign_mean_stderr",
    "triple_moments",
    "uncertainty_record",
]
