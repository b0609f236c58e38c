"""Bound-free Coulomb matrix elements and polarization-summed |M|^2.

The building block is the hydrogen-like transition element between the 1s
state of charge Z and an incoming Coulomb wave of momentum p::

    J0(q, p) = <phi^-(p)| exp(i q.r) |phi_0>
             = -16 pi sqrt(Z^5/pi) e^{-pi zeta/2} Gamma(1 + i zeta)
               [q^2 - (p + iZ)^2]^{-1 + i zeta} / [(q - p)^2 + Z^2]^{2 + i zeta}
               * q [q - (p + iZ) cos(q, p)],          zeta = -Z/p

Positronium needs J0(+Q/2, p_rho) + J0(-Q/2, p_rho) with Z = 1/2 and the
relative momentum p_rho = p1 - Q/2; hydrogen needs J0(Q, p1) with Z = 1.
Every factor is combined as a complex logarithm before exponentiation, so
the large e^{-pi zeta/2} and the small |Gamma| never meet in floating point.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularityError
from .kinematics import ResolvedKinematics, TargetKind
from .special_functions import log_coulomb_factor

__all__ = [
    "HydrogenAngle",
    "SquaredAmplitude",
    "j0_coulomb",
    "j0_scalar",
    "msq_hydrogen",
    "msq_positronium",
    "msq_resonance_limit",
]

_P_MIN = 1e-12


class HydrogenAngle(str, enum.Enum):
    """Which angle enters the numerator [Q - (p1 + iZ) cos(.)] for hydrogen.

    ``MOMENTUM_TRANSFER`` uses the angle between Q and p1 (the structure of
    J0). ``CHI`` uses the angle between k_f and p1 instead; kept as a
    compatibility switch for comparison only.
    """

    MOMENTUM_TRANSFER = "q-p1"
    CHI = "chi"


@dataclass(frozen=True)
class SquaredAmplitude:
    value: float
    smoothed: bool = False
    epsilon_used: float = 0.0

    def __post_init__(self):
        if not self.value >= 0:
            raise ValueError(f"squared amplitude must be >= 0, got {self.value}")
        if not self.smoothed and self.epsilon_used != 0.0:
            raise ValueError("epsilon_used must be 0 for an unsmoothed amplitude")


def _log_norm(Z):
    return math.log(16.0 * math.pi * math.sqrt(Z ** 5 / math.pi))


def j0_scalar(q, p, cos_qp, Z):
    """J0 from the magnitudes |q|, |p| and the cosine of their angle.

    Vectorises over q, p, cos_qp. Entries with q == 0 return exactly 0.
    """
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    cos_qp = np.asarray(cos_qp, dtype=float)
    if np.any(p < _P_MIN):
        raise SingularityError("J0 needs |p| > 0; smooth the relative momentum first")
    zeta = -Z / p
    q_safe = np.where(q > 0, q, 1.0)
    base = q_safe * q_safe - (p + 1j * Z) ** 2
    den = q_safe * q_safe + p * p - 2.0 * q_safe * p * cos_qp + Z * Z
    log_amp = (
        _log_norm(Z)
        + log_coulomb_factor(zeta)
        + (-1.0 + 1j * zeta) * np.log(base)
        - (2.0 + 1j * zeta) * np.log(den)
    )
    val = -np.exp(log_amp) * q_safe * (q_safe - (p + 1j * Z) * cos_qp)
    out = np.where(q > 0, val, 0.0 + 0.0j)
    return out[()] if out.ndim == 0 else out


def j0_coulomb(q_half, p_rho_vec, Z: float) -> complex:
    """Closed-form J0 for Cartesian 3-vectors ``q_half`` and ``p_rho_vec``."""
    q_half = np.asarray(q_half, dtype=float)
    p_vec = np.asarray(p_rho_vec, dtype=float)
    p = float(np.linalg.norm(p_vec))
    if p < _P_MIN:
        raise SingularityError("J0 has a pole at p_rho = 0")
    q = float(np.linalg.norm(q_half))
    if q == 0.0:
        return 0j
    c = float(np.clip(q_half @ p_vec / (q * p), -1.0, 1.0))
    return complex(j0_scalar(q, p, c, Z))


def ps_amplitude_arrays(Q, p1, q_dot_p1, p_rho, Z=0.5, epsilon=0.0):
    """Complex J0(+Q/2) + J0(-Q/2) for broadcast arrays.

    ``p_rho`` is replaced by sqrt(p_rho^2 + epsilon^2) wherever it occurs
    (Coulomb parameter, both brackets and the cos(gamma) denominator).
    """
    Q = np.asarray(Q, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    q_dot_p1 = np.asarray(q_dot_p1, dtype=float)
    p_eff = np.sqrt(np.asarray(p_rho, dtype=float) ** 2 + epsilon * epsilon)
    if np.any(p_eff < _P_MIN):
        raise SingularityError(
            "positronium amplitude evaluated at mu = 0 without smoothing"
        )
    zero_q = Q == 0.0
    Qs = np.where(zero_q, 1.0, Q)
    zeta = -Z / p_eff
    half = 0.5 * Qs
    cos_g = (q_dot_p1 - 0.5 * Qs * Qs) / (Qs * p_eff)
    pz = p_eff + 1j * Z
    log_common = (
        _log_norm(Z)
        + log_coulomb_factor(zeta)
        + (-1.0 + 1j * zeta) * np.log(half * half - pz * pz)
    )
    d_recoil = p1 * p1 + Z * Z
    # the two denominators differ by Q^2 - 2 Q.p1; writing the binary term
    # as recoil * exp(-L) keeps their difference accurate when Q is small
    L = (2.0 + 1j * zeta) * np.log1p((Qs * Qs - 2.0 * q_dot_p1) / d_recoil)
    m = np.expm1(-L)
    a_recoil = np.exp(log_common - (2.0 + 1j * zeta) * np.log(d_recoil))
    bracket = a_recoil * (half * (2.0 + m) - pz * cos_g * m)
    amp = -half * bracket
    return np.where(zero_q, 0.0 + 0.0j, amp)


def h_amplitude_arrays(Q, p1, cos_a, Z=1.0):
    """Complex hydrogen J0(Q, p1); requires p1 > 0."""
    Q = np.asarray(Q, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    return j0_scalar(Q, p1, np.clip(cos_a, -1.0, 1.0), Z)


def h_p1_msq_limit(Q, cos_a, Z=1.0):
    """lim_{p1 -> 0} p1 |J0(Q, p1)|^2 (polarization factor not included).

    |e^{-pi zeta/2} Gamma(1 + i zeta)|^2 -> 2 pi Z / p1 and the Coulomb
    phase of [Q^2 - (p1 + iZ)^2]^{i zeta} leaves exp(-4 Z^2 / (Q^2 + Z^2)).
    """
    Q = np.asarray(Q, dtype=float)
    cos_a = np.asarray(cos_a, dtype=float)
    D = Q * Q + Z * Z
    return (
        256.0 * math.pi * Z ** 5 * Q * Q
        * 2.0 * math.pi * Z
        * (Q * Q + Z * Z * cos_a * cos_a)
        * np.exp(-4.0 * Z * Z / D)
        / D ** 6
    )


def polarization_factor(theta):
    return 0.5 * (1.0 + np.cos(theta) ** 2)


def msq_positronium(resolved: ResolvedKinematics, epsilon: float = 0.0) -> SquaredAmplitude:
    """Polarization-summed |M|^2 for positronium disintegration.

    With ``epsilon > 0`` the relative momentum is smoothed,
    mu -> sqrt(mu^2 + epsilon^2).
    """
    if resolved.target.kind is not TargetKind.POSITRONIUM:
        raise ValueError("msq_positronium needs a positronium kinematic point")
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    amp = ps_amplitude_arrays(resolved.Q, resolved.p1, resolved.q_dot_p1,
                              resolved.p_rho, resolved.target.Z, epsilon)
    value = float(polarization_factor(resolved.theta) * abs(amp) ** 2)
    return SquaredAmplitude(value, smoothed=epsilon > 0, epsilon_used=float(epsilon))


def _hydrogen_cos(resolved: ResolvedKinematics, angle: HydrogenAngle) -> float:
    if HydrogenAngle(angle) is HydrogenAngle.CHI:
        return resolved.cos_chi
    return resolved.cos_beta


def msq_hydrogen(resolved: ResolvedKinematics,
                 angle: HydrogenAngle = HydrogenAngle.MOMENTUM_TRANSFER) -> SquaredAmplitude:
    """Polarization-summed |M_H|^2 for hydrogen (Z = 1, zeta = -1/p1)."""
    if resolved.target.kind is not TargetKind.HYDROGEN:
        raise ValueError("msq_hydrogen needs a hydrogen kinematic point")
    if resolved.p1 < _P_MIN:
        raise SingularityError("hydrogen |M|^2 has a pole at p1 = 0")
    if resolved.Q == 0.0:
        return SquaredAmplitude(0.0)
    amp = h_amplitude_arrays(resolved.Q, resolved.p1,
                             _hydrogen_cos(resolved, angle), resolved.target.Z)
    return SquaredAmplitude(float(polarization_factor(resolved.theta) * abs(amp) ** 2))


def msq_resonance_limit(theta, Q, Z, mu):
    """Leading 1/mu pole of the positronium |M|^2 at the resonance."""
    if np.any(np.asarray(mu) <= 0) or np.any(np.asarray(Q) <= 0):
        raise ValueError("msq_resonance_limit needs mu > 0 and Q > 0")
    D = 0.25 * Q * Q + Z * Z
    return ((1.0 + np.cos(theta) ** 2) * 32.0 * math.pi ** 2 * Z ** 5 * Q ** 4
            / D ** 6 * np.exp(-2.0 * Z / D) / mu)
