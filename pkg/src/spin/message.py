"""
Messages, magnetic moments and the field-region rotation rule.

A message (ψ⁽¹⁾, ψ⁽²⁾, θ) encodes the moment
m = (cos φ sin θ, sin φ sin θ, cos θ) with φ = ψ⁽¹⁾ − ψ⁽²⁾.

Rotations are defined on the moment and carried back to the message.
A field region of angle α about e turns the moment by α in the clockwise
sense seen from the tip of e (ROTATION_SENSE = -1), i.e. the moment-level
action of u ← exp(iα σ·e/2) u. With this sense a π/2 flip about x takes
z to +y and the stage network yields the detuned joint distribution.

All array functions broadcast, so the same code serves a single Message
and a MessageBeam holding a whole run.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..schemas.models import TWO_PI, MagneticMoment, Message, RotationSpec, Vector3

ROTATION_SENSE = -1.0


def reduce_phases(values: np.ndarray) -> np.ndarray:
    """Reduce phases to [0, 2π)."""
    r = np.mod(values, TWO_PI)
    return np.where(r >= TWO_PI, 0.0, r)


def moment_components(psi1, psi2, theta) -> np.ndarray:
    """Moment vectors, shape (..., 3); exact (0, 0, ±1) at the poles."""
    psi1 = np.asarray(psi1, dtype=float)
    psi2 = np.asarray(psi2, dtype=float)
    theta = np.asarray(theta, dtype=float)
    phi = psi1 - psi2
    sin_t = np.where((theta == 0.0) | (theta == np.pi), 0.0, np.sin(theta))
    cos_t = np.where(theta == np.pi, -1.0, np.cos(theta))
    return np.stack((np.cos(phi) * sin_t, np.sin(phi) * sin_t, cos_t), axis=-1)


def angles_from_moments(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Polar angle and azimuth of moment vectors."""
    m = np.asarray(m, dtype=float)
    rho = np.hypot(m[..., 0], m[..., 1])
    theta = np.arctan2(rho, m[..., 2])
    phi = np.where(rho == 0.0, 0.0, np.arctan2(m[..., 1], m[..., 0]))
    return theta, phi


def rotation_matrix(axis: Vector3, angle: float) -> np.ndarray:
    """Matrix applied to the moment by a field region (Rodrigues formula)."""
    e = np.asarray(axis, dtype=float)
    alpha = ROTATION_SENSE * angle
    k = np.array([[0.0, -e[2], e[1]],
                  [e[2], 0.0, -e[0]],
                  [-e[1], e[0], 0.0]])
    return np.eye(3) + np.sin(alpha) * k + (1.0 - np.cos(alpha)) * (k @ k)


def _is_z_axis(axis: Vector3) -> Optional[float]:
    if axis[0] == 0.0 and axis[1] == 0.0 and abs(axis[2]) == 1.0:
        return axis[2]
    return None


def rotate_angles(psi1, psi2, theta, axis: Vector3, angle: float):
    """Apply one field region to message angles; returns (psi1, psi2, theta)."""
    psi1 = np.asarray(psi1, dtype=float)
    psi2 = np.asarray(psi2, dtype=float)
    theta = np.asarray(theta, dtype=float)

    z_sign = _is_z_axis(axis)
    if z_sign is not None:
        # rotation about the field axis only shifts the azimuth
        delta = ROTATION_SENSE * angle * z_sign
        # at the poles φ is meaningless: precess only, by the common part δ/2
        pole = (theta == 0.0) | (theta == np.pi)
        return (
            reduce_phases(psi1 + delta / 2),
            reduce_phases(np.where(pole, psi2 + delta / 2, psi2 - delta / 2)),
            theta,
        )

    m = moment_components(psi1, psi2, theta)
    rotated = m @ rotation_matrix(axis, angle).T
    new_theta, new_phi = angles_from_moments(rotated)
    # split the azimuth change symmetrically; the common phase is untouched
    delta = np.mod(new_phi - (psi1 - psi2) + np.pi, TWO_PI) - np.pi
    return reduce_phases(psi1 + delta / 2), reduce_phases(psi2 - delta / 2), new_theta


def moment_of(msg: Message) -> MagneticMoment:
    m = moment_components(msg.psi1, msg.psi2, msg.theta)
    return MagneticMoment.from_vector(m)


def message_from_moment(moment: MagneticMoment | Vector3) -> Message:
    """Message with the given moment, ψ⁽²⁾ = 0."""
    vec = moment.as_tuple() if isinstance(moment, MagneticMoment) else moment
    theta, phi = angles_from_moments(np.asarray(vec, dtype=float))
    return Message(psi1=float(phi), psi2=0.0, theta=float(theta))


def rotate(msg: Message, spec: RotationSpec) -> Message:
    psi1, psi2, theta = rotate_angles(msg.psi1, msg.psi2, msg.theta, spec.axis, spec.angle)
    return Message(psi1=float(psi1), psi2=float(psi2), theta=float(theta))


def precess(msg: Message, delta_phase: float) -> Message:
    """Free flight: both phases advance together, the moment is unchanged."""
    return Message(psi1=msg.psi1 + delta_phase, psi2=msg.psi2 + delta_phase, theta=msg.theta)


@dataclass(frozen=True)
class MessageBeam:
    """Messages of many messengers in emission order.

    Devices process a beam element by element in `ids` order, which is the
    order a one-messenger-at-a-time source would deliver them.
    """
    psi1: np.ndarray
    psi2: np.ndarray
    theta: np.ndarray
    ids: np.ndarray

    def __len__(self) -> int:
        return int(self.ids.shape[0])

    @classmethod
    def uniform(cls, msg: Message, n: int) -> "MessageBeam":
        return cls(
            psi1=np.full(n, msg.psi1),
            psi2=np.full(n, msg.psi2),
            theta=np.full(n, msg.theta),
            ids=np.arange(n, dtype=np.int64),
        )

    @classmethod
    def from_moments(cls, moments: np.ndarray, ids: np.ndarray) -> "MessageBeam":
        """Messages with ψ⁽²⁾ = 0 for an (n, 3) array of moments."""
        theta, phi = angles_from_moments(moments)
        return cls(
            psi1=reduce_phases(phi),
            psi2=np.zeros_like(theta),
            theta=theta,
            ids=np.asarray(ids, dtype=np.int64),
        )

    def moments(self) -> np.ndarray:
        return moment_components(self.psi1, self.psi2, self.theta)

    def select(self, mask: np.ndarray) -> "MessageBeam":
        return MessageBeam(self.psi1[mask], self.psi2[mask], self.theta[mask], self.ids[mask])

    def message(self, i: int) -> Message:
        return Message(psi1=float(self.psi1[i]), psi2=float(self.psi2[i]), theta=float(self.theta[i]))

    def rotated(self, axis: Vector3, angle: float) -> "MessageBeam":
        psi1, psi2, theta = rotate_angles(self.psi1, self.psi2, self.theta, axis, angle)
        return MessageBeam(psi1, psi2, theta, self.ids)

    def precessed(self, delta_phase: float) -> "MessageBeam":
        return MessageBeam(
            reduce_phases(self.psi1 + delta_phase),
            reduce_phases(self.psi2 + delta_phase),
            self.theta,
            self.ids,
        )
