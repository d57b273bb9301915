"""
Estimators built from detection counts.

Standard errors use the delta method with a binomial variance per
setting run: a run that emits E messengers and detects N of them has
var N = N(1 − N/E).
"""

import math
from typing import Optional

import structlog

from ..errors import EmptyTableError
from ..schemas.models import (
    SETTING_PAIRS,
    CountTable,
    EpsilonEtaEstimate,
    Expectations,
    FrequencyTable,
    RobertsonRecord,
    TripleCountTable,
    TripleExpectations,
    UncertaintyRecord,
)

logger = structlog.get_logger()

_SIGNS = {
    "s1": lambda s1, s2: s1,
    "s2": lambda s1, s2: s2,
    "s1s2": lambda s1, s2: s1 * s2,
}


def frequencies(table: CountTable) -> FrequencyTable:
    """F(S1,S2) = N(S1,S2) / Σ N."""
    total = table.total_detected
    if total == 0:
        raise EmptyTableError(f"No detections in count table at phi={table.phi}")
    counts = table.counts
    return FrequencyTable(
        f={pair: counts[pair] / total for pair in SETTING_PAIRS},
        total_detected=total,
    )


def moments_of(freq: FrequencyTable) -> Expectations:
    f = freq.f
    return Expectations(
        *(math.fsum(sign(s1, s2) * f.get((s1, s2), 0.0) for s1, s2 in SETTING_PAIRS)
          for sign in _SIGNS.values())
    )


def moment_stderrs(table: CountTable) -> Expectations:
    """Delta-method standard errors of ⟨S1⟩, ⟨S2⟩, ⟨S1S2⟩."""
    moments = moments_of(frequencies(table))
    total = table.total_detected
    variances = {}
    for pair in SETTING_PAIRS:
        cell = table.cell(*pair)
        variances[pair] = (
            cell.detected * (1.0 - cell.detected / cell.emitted) if cell.emitted else 0.0
        )

    stderrs = []
    for g, sign in zip(moments, _SIGNS.values()):
        var = math.fsum((sign(*pair) - g) ** 2 * variances[pair] for pair in SETTING_PAIRS)
        stderrs.append(math.sqrt(var) / total)
    return Expectations(*stderrs)


def clamped_root(
    radicand: float, stderr_mean: float, what: str = "radicand", phi: float = 0.0
) -> tuple[float, float]:
    """sqrt(radicand) with radicand = 2 − 2⟨S⟩, clamped at zero."""
    if radicand < 0.0:
        logger.warning("Negative radicand clamped", quantity=what, radicand=radicand, phi=phi)
        radicand = 0.0
    value = math.sqrt(radicand)
    if stderr_mean == 0.0:
        return value, 0.0
    # d sqrt(2 − 2s) = ds / sqrt(2 − 2s); saturates near zero where the radicand is noise
    return value, stderr_mean / math.sqrt(max(radicand, 2.0 * stderr_mean))


def epsilon_eta_from_counts(table_x: CountTable, table_y: CountTable) -> EpsilonEtaEstimate:
    """ε from the a = x run and η from the a = y run."""
    s1_x = moments_of(frequencies(table_x)).s1
    s2_y = moments_of(frequencies(table_y)).s2
    epsilon, se_epsilon = clamped_root(
        2.0 - 2.0 * s1_x, moment_stderrs(table_x).s1, "epsilon", table_x.phi
    )
    eta, se_eta = clamped_root(
        2.0 - 2.0 * s2_y, moment_stderrs(table_y).s2, "eta", table_y.phi
    )
    return EpsilonEtaEstimate(epsilon=epsilon, eta=eta, stderr_epsilon=se_epsilon, stderr_eta=se_eta)


def ozawa_check(
    phi: float,
    epsilon: float,
    eta: float,
    sigma_a: float = 1.0,
    sigma_b: float = 1.0,
    stderr_epsilon: float = 0.0,
    stderr_eta: float = 0.0,
) -> UncertaintyRecord:
    """Left-hand side of the error-disturbance inequality and the naive product."""
    lhs = epsilon * eta + epsilon * sigma_b + sigma_a * eta
    product = epsilon * eta
    stderr_lhs = math.hypot((eta + sigma_b) * stderr_epsilon, (epsilon + sigma_a) * stderr_eta)
    stderr_product = math.hypot(eta * stderr_epsilon, epsilon * stderr_eta)
    return UncertaintyRecord(
        phi=phi,
        epsilon=epsilon,
        eta=eta,
        ozawa_lhs=lhs,
        heisenberg_product=product,
        bound=1.0,
        stderr_epsilon=stderr_epsilon,
        stderr_eta=stderr_eta,
        stderr_ozawa_lhs=stderr_lhs,
        stderr_product=stderr_product,
    )


def uncertainty_record(phi: float, table_x: CountTable, table_y: CountTable) -> UncertaintyRecord:
    est = epsilon_eta_from_counts(table_x, table_y)
    return ozawa_check(
        phi, est.epsilon, est.eta,
        stderr_epsilon=est.stderr_epsilon, stderr_eta=est.stderr_eta,
    )


def robertson_estimate(n_plus: int, n_minus: int) -> float:
    """⟨σ⟩ = (N+ − N−)/(N+ + N−) from the two oriented runs."""
    total = n_plus + n_minus
    if total == 0:
        raise EmptyTableError("No detections on either orientation")
    return (n_plus - n_minus) / total


def robertson_check(sx: float, sy: float, sz: float, n: int, az: Optional[float] = None) -> RobertsonRecord:
    """(1−⟨σx⟩²)(1−⟨σy⟩²) against ⟨σz⟩² with per-axis variance (1−s²)/(2N)."""
    vx, vy, vz = ((1.0 - s * s) / (2.0 * n) for s in (sx, sy, sz))
    lhs = (1.0 - sx * sx) * (1.0 - sy * sy)
    rhs = sz * sz
    # second-order terms keep the error finite at the poles
    stderr_lhs = math.sqrt(
        4 * sx * sx * (1 - sy * sy) ** 2 * vx
        + 4 * sy * sy * (1 - sx * sx) ** 2 * vy
        + 2 * vx * vx
        + 2 * vy * vy
    )
    stderr_rhs = 2.0 * abs(sz) * math.sqrt(vz)
    return RobertsonRecord(
        az=sz if az is None else az,
        lhs=lhs,
        rhs=rhs,
        stderr_lhs=stderr_lhs,
        stderr_rhs=stderr_rhs,
    )


def robertson_holds(record: RobertsonRecord, sigmas: float = 5.0) -> bool:
    return record.lhs >= record.rhs - sigmas * math.hypot(record.stderr_lhs, record.stderr_rhs)


def triple_moments(table: TripleCountTable) -> TripleExpectations:
    """Seven correlators of the eight-beam counts."""
    if table.emitted == 0:
        raise EmptyTableError("Triple table has no messengers")

    def mean(f) -> float:
        return math.fsum(f(*key) * n for key, n in table.counts.items()) / table.emitted

    return TripleExpectations(
        s1=mean(lambda s1, s2, s3: s1),
        s2=mean(lambda s1, s2, s3: s2),
        s3=mean(lambda s1, s2, s3: s3),
        s1s2=mean(lambda s1, s2, s3: s1 * s2),
        s1s3=mean(lambda s1, s2, s3: s1 * s3),
        s2s3=mean(lambda s1, s2, s3: s2 * s3),
        s1s2s3=mean(lambda s1, s2, s3: s1 * s2 * s3),
    )


def sign_mean_stderr(mean: float, n: int) -> float:
    """Standard error of the mean of n independent ±1 outcomes."""
    return math.sqrt(max(0.0, 1.0 - mean * mean) / n) if n else 0.0


def ozawa_holds(record: UncertaintyRecord, sigmas: float = 5.0) -> bool:
    return record.ozawa_lhs >= record.bound - sigmas * record.stderr_ozawa_lhs
