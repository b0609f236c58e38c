"""Fully differential cross sections and unit conversion.

    FDCS = alpha^4 / (2 pi)^3 * p1 * t * sum|M|^2      [a.u.]

For hydrogen the product p1 * |M_H|^2 stays finite as p1 -> 0 (the Coulomb
normalisation grows like 1/p1); below p1 = 1e-12 the analytic limit is used.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .amplitudes import (
    HydrogenAngle,
    h_amplitude_arrays,
    h_p1_msq_limit,
    polarization_factor,
    ps_amplitude_arrays,
)
from .constants import ALPHA, AU_TO_CM2_PER_EV_SR2, BARN_CM2
from .kinematics import KinematicInput, Target, TargetKind, TMode, kinematic_arrays

__all__ = [
    "CrossSectionSample",
    "FDCS_PREFACTOR",
    "Units",
    "convert_units",
    "fdcs",
    "fdcs_values",
]

FDCS_PREFACTOR = ALPHA ** 4 / (2.0 * math.pi) ** 3

_P1_LIMIT = 1e-12


class Units(str, enum.Enum):
    ATOMIC = "au"
    BARN_PER_EV_SR2 = "barn"
    CM2_PER_EV_SR2 = "cm2"


# multiply an a.u. value by this to get the unit
_FROM_AU = {
    Units.ATOMIC: 1.0,
    Units.CM2_PER_EV_SR2: AU_TO_CM2_PER_EV_SR2,
    Units.BARN_PER_EV_SR2: AU_TO_CM2_PER_EV_SR2 / BARN_CM2,
}


@dataclass(frozen=True)
class CrossSectionSample:
    """One cross-section value with its units and kinematic metadata.

    ``quantity`` is "FDCS" or "DDCS". ``kinematics`` maps parameter names to
    values in atomic units/radians. DDCS samples also carry the quadrature
    error estimate (same units as ``value``).
    """

    value: float
    units: Units
    kinematics: dict
    target: Target
    quantity: str = "FDCS"
    error_estimate: float | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.value >= 0:
            raise ValueError(f"cross section must be >= 0, got {self.value}")


def fdcs_values(target: Target, omega_i, E_e, theta, phi1, Phi, epsilon=0.0,
                t_mode=TMode.FIXED_UNITY,
                hydrogen_angle=HydrogenAngle.MOMENTUM_TRANSFER):
    """Vectorised FDCS in atomic units over broadcast arrays of the inputs."""
    a = kinematic_arrays(target, omega_i, E_e, theta, phi1, Phi, t_mode)
    shape = np.broadcast_shapes(*(np.shape(v) for v in a.values()),
                                np.shape(theta))
    Q = np.broadcast_to(a["Q"], shape)
    p1 = np.broadcast_to(a["p1"], shape)
    t = np.broadcast_to(a["t"], shape)
    theta = np.broadcast_to(np.asarray(theta, dtype=float), shape)
    pol = polarization_factor(theta)

    if target.kind is TargetKind.POSITRONIUM:
        amp = ps_amplitude_arrays(Q, p1, np.broadcast_to(a["q_dot_p1"], shape),
                                  np.broadcast_to(a["p_rho"], shape),
                                  target.Z, epsilon)
        p1_msq = p1 * pol * np.abs(amp) ** 2
    else:
        cos_chi = np.broadcast_to(a["cos_chi"], shape)
        live = Q > 0.0
        Qs = np.where(live, Q, 1.0)
        if HydrogenAngle(hydrogen_angle) is HydrogenAngle.CHI:
            cos_a = cos_chi
        else:
            # independent of |p1|, so also defined on the p1 -> 0 limit
            cos_a = np.clip(np.broadcast_to(a["q_dot_dir"], shape) / Qs, -1.0, 1.0)
        small = p1 < _P1_LIMIT
        p1s = np.where(small, 1.0, p1)
        amp = h_amplitude_arrays(Qs, p1s, cos_a, target.Z)
        regular = p1s * np.abs(amp) ** 2
        limit = h_p1_msq_limit(Qs, cos_a, target.Z)
        p1_msq = np.where(live, pol * np.where(small, limit, regular), 0.0)

    out = FDCS_PREFACTOR * t * p1_msq
    return out[()] if out.ndim == 0 else out


def fdcs(target: Target, inp: KinematicInput, epsilon: float = 0.0,
         hydrogen_angle: HydrogenAngle = HydrogenAngle.MOMENTUM_TRANSFER) -> CrossSectionSample:
    """FDCS d^3 sigma / (dE_e dOmega_1 dOmega_f) at one kinematic point (a.u.).

    ``epsilon`` smooths the positronium resonance and is ignored for
    hydrogen. Raises :class:`SingularityError` for positronium exactly on
    the resonance with ``epsilon == 0``.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    value = fdcs_values(target, inp.omega_i, inp.E_e, inp.theta, inp.phi1,
                        inp.Phi, epsilon, inp.t_mode, hydrogen_angle)
    kin = asdict(inp)
    kin["t_mode"] = inp.t_mode.value
    extra = {"epsilon": float(epsilon) if target.kind is TargetKind.POSITRONIUM else 0.0}
    return CrossSectionSample(float(value), Units.ATOMIC, kin, target, "FDCS", extra=extra)


def convert_units(sample: CrossSectionSample, to) -> CrossSectionSample:
    """Re-express a sample in another unit (a.u., barn/(eV Sr^2), cm^2/(eV Sr^2))."""
    to = Units(to)
    factor = _FROM_AU[to] / _FROM_AU[Units(sample.units)]
    err = None if sample.error_estimate is None else sample.error_estimate * factor
    return replace(sample, value=sample.value * factor, units=to, error_estimate=err)
