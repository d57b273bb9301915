"""
Quantum-theoretical predictions for the simulated experiments.

All functions are pure. Initial states are Bloch vectors a with ‖a‖ <= 1
(a MagneticMoment, a 3-tuple or an array); measurement directions are
unit vectors.
"""

import math
from typing import Any

import numpy as np

from ..errors import ConfigurationError, UnphysicalStateError
from ..schemas.models import (
    AXIS_Y,
    SETTING_PAIRS,
    SETTING_TRIPLES,
    EpsilonEtaTheory,
    Expectations,
    MagneticMoment,
    TripleExpectations,
    TripleOutcomeDistribution,
    TwoOutcomeDistribution,
)

NORM_TOLERANCE = 1e-9

_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
_IDENTITY = np.eye(2, dtype=complex)


def _state(a: Any) -> np.ndarray:
    vec = np.asarray(a.as_tuple() if isinstance(a, MagneticMoment) else a, dtype=float)
    norm = float(np.linalg.norm(vec))
    if norm > 1.0 + NORM_TOLERANCE:
        raise UnphysicalStateError(f"Bloch vector norm {norm} exceeds 1")
    return vec


def _direction(v: Any, name: str) -> np.ndarray:
    vec = np.asarray(v.as_tuple() if isinstance(v, MagneticMoment) else v, dtype=float)
    if abs(float(np.linalg.norm(vec)) - 1.0) > NORM_TOLERANCE:
        raise ConfigurationError(f"Direction {name} must be a unit vector, got {vec.tolist()}")
    return vec


def in_plane_direction(phi: float) -> tuple[float, float, float]:
    """x cos φ + y sin φ."""
    return (math.cos(phi), math.sin(phi), 0.0)


def prob_detuned(a: Any, phi: float) -> TwoOutcomeDistribution:
    """Joint distribution of (S1, S2) in the detuning experiment."""
    ax, ay, _ = _state(a)
    m = ax * math.cos(phi) + ay * math.sin(phi)
    s = math.sin(phi)
    return TwoOutcomeDistribution(p={
        (s1, s2): (1.0 + (s1 + s2 * s) * m + s1 * s2 * s) / 4.0
        for s1, s2 in SETTING_PAIRS
    })


def prob_general(a: Any, theta1: float, theta2: float, theta4: float) -> TwoOutcomeDistribution:
    """Stage network at arbitrary z-rotation angles; independent of θ3 and θ5."""
    ax, ay, _ = _state(a)
    m = ax * math.sin(theta1 + theta2) - ay * math.cos(theta1 + theta2)
    c4 = math.cos(theta4)
    return TwoOutcomeDistribution(p={
        (s1, s2): (1.0 + (s1 - s2 * c4) * m - s1 * s2 * c4) / 4.0
        for s1, s2 in SETTING_PAIRS
    })


def prob_filter(a: Any, b: Any, c: Any) -> TwoOutcomeDistribution:
    """Two successive filters along b then c."""
    a = _state(a)
    b = _direction(b, "b")
    c = _direction(c, "c")
    ab = float(a @ b)
    bc = float(b @ c)
    return TwoOutcomeDistribution(p={
        (s1, s2): (1.0 + (s1 + bc * s2) * ab + bc * s1 * s2) / 4.0
        for s1, s2 in SETTING_PAIRS
    })


def prob_triple(a: Any, b: Any, c: Any, d: Any) -> TripleOutcomeDistribution:
    """Three successive filters along b, c, d."""
    a = _state(a)
    b = _direction(b, "b")
    c = _direction(c, "c")
    d = _direction(d, "d")
    ab, bc, cd = float(a @ b), float(b @ c), float(c @ d)
    return TripleOutcomeDistribution(p={
        (s1, s2, s3): (
            1.0
            + ab * s1
            + ab * bc * s2
            + ab * bc * cd * s3
            + ab * cd * s1 * s2 * s3
            + bc * s1 * s2
            + bc * cd * s1 * s3
            + cd * s2 * s3
        ) / 8.0
        for s1, s2, s3 in SETTING_TRIPLES
    })


def _su2(axis: tuple[float, float, float], angle: float) -> np.ndarray:
    """cos(θ/2) I + i sin(θ/2) σ·e."""
    sigma_e = sum(e * s for e, s in zip(axis, _PAULI))
    return math.cos(angle / 2) * _IDENTITY + 1j * math.sin(angle / 2) * sigma_e


def _projector(s: int) -> np.ndarray:
    return (_IDENTITY + s * _PAULI[2]) / 2


def prob_stage_matrix(
    a: Any,
    theta1: float,
    theta2: float,
    theta3: float,
    theta4: float,
    theta5: float,
) -> TwoOutcomeDistribution:
    """Brute-force evaluation of the stage network with 2x2 matrices.

    p(S1,S2) = Tr K ρ K† with K the time-ordered product of z-rotations,
    π/2 flips about x and the two z-projectors. Independent of the closed
    forms; used to check them and the rotation sense.
    """
    vec = _state(a)
    rho = (_IDENTITY + sum(c * s for c, s in zip(vec, _PAULI))) / 2
    flip = _su2((1.0, 0.0, 0.0), math.pi / 2)

    def z(angle: float) -> np.ndarray:
        return _su2((0.0, 0.0, 1.0), angle)

    p = {}
    for s1, s2 in SETTING_PAIRS:
        k = (
            _projector(s2) @ z(theta5) @ flip @ z(theta4) @ flip
            @ _projector(s1) @ z(theta3) @ flip @ z(theta1 + theta2)
        )
        p[(s1, s2)] = float(np.real(np.trace(k @ rho @ k.conj().T)))
    return TwoOutcomeDistribution(p=p)


def expectations(a: Any, phi: float) -> Expectations:
    """⟨S1⟩, ⟨S2⟩, ⟨S1S2⟩ of the detuning experiment."""
    ax, ay, _ = _state(a)
    m = ax * math.cos(phi) + ay * math.sin(phi)
    return Expectations(s1=m, s2=math.sin(phi) * m, s1s2=math.sin(phi))


def distribution_moments(dist: TwoOutcomeDistribution) -> Expectations:
    return Expectations(
        s1=math.fsum(s1 * dist.p[(s1, s2)] for s1, s2 in SETTING_PAIRS),
        s2=math.fsum(s2 * dist.p[(s1, s2)] for s1, s2 in SETTING_PAIRS),
        s1s2=math.fsum(s1 * s2 * dist.p[(s1, s2)] for s1, s2 in SETTING_PAIRS),
    )


def filter_expectations(a: Any, b: Any, c: Any) -> Expectations:
    """⟨S1⟩ = a·b, ⟨S2⟩ = (a·b)(b·c), ⟨S1S2⟩ = b·c."""
    a = _state(a)
    b = _direction(b, "b")
    c = _direction(c, "c")
    ab = float(a @ b)
    bc = float(b @ c)
    return Expectations(s1=ab, s2=ab * bc, s1s2=bc)


def triple_expectations(dist: TripleOutcomeDistribution) -> TripleExpectations:
    """All seven correlators of a triple distribution."""
    def mean(f) -> float:
        return math.fsum(f(*key) * p for key, p in dist.p.items())

    return TripleExpectations(
        s1=mean(lambda s1, s2, s3: s1),
        s2=mean(lambda s1, s2, s3: s2),
        s3=mean(lambda s1, s2, s3: s3),
        s1s2=mean(lambda s1, s2, s3: s1 * s2),
        s1s3=mean(lambda s1, s2, s3: s1 * s3),
        s2s3=mean(lambda s1, s2, s3: s2 * s3),
        s1s2s3=mean(lambda s1, s2, s3: s1 * s2 * s3),
    )


def filtering_directions(phi: float) -> tuple[tuple[float, float, float], ...]:
    """(b, c, d) of the filtering experiment: b = d in the x-y plane at φ, c = y."""
    b = in_plane_direction(phi)
    return b, AXIS_Y, b


def theory_epsilon_eta(phi: float) -> EpsilonEtaTheory:
    """Error and disturbance for A = σx, B = σy with the z-polarized state."""
    return EpsilonEtaTheory(
        epsilon=2.0 * abs(math.sin(phi / 2)),
        eta=math.sqrt(2.0) * abs(math.cos(phi)),
        sigma_a=1.0,
        sigma_b=1.0,
    )


def ozawa_lhs_theory(phi: float) -> float:
    """εη + εσ(B) + σ(A)η; valid for every φ."""
    t = theory_epsilon_eta(phi)
    return t.epsilon * t.eta + t.epsilon * t.sigma_b + t.sigma_a * t.eta


def ozawa_lhs_closed_form(phi: float) -> float:
    """2√2 cos φ sin(φ/2) + 2 sin(φ/2) + √2 cos φ.

    Equals ozawa_lhs_theory only where sin(φ/2) and cos φ are both
    nonnegative, i.e. on [0, π/2].
    """
    root2 = math.sqrt(2.0)
    half = math.sin(phi / 2)
    return 2 * root2 * math.cos(phi) * half + 2 * half + root2 * math.cos(phi)


def heisenberg_product_theory(phi: float) -> float:
    t = theory_epsilon_eta(phi)
    return t.epsilon * t.eta


def commutator_bound(a: Any) -> float:
    """½|⟨[σx, σy]⟩| = |a_z| for a general state."""
    return abs(float(_state(a)[2]))
