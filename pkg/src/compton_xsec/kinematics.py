"""Kinematics of a single Compton ionization event.

Frame: the incident photon runs along +z, the scattered photon lies in the
x-z plane at polar angle ``theta``, and the electron has polar angle
``phi1`` and azimuth ``Phi`` (the dihedral angle between the photon plane
and the electron plane). All momenta are in atomic units.

The scalar relations used throughout::

    Q      = k_i sqrt(1 - 2 t cos(theta) + t^2)
    cosChi = cos(theta) cos(phi1) + sin(theta) sin(phi1) cos(Phi)
    Q.p1   = k_i p1 (cos(phi1) - t cosChi)
    p_rho^2 = p1^2 - Q.p1 + Q^2/4          (relative e+e- momentum, Ps)
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .constants import C_LIGHT
from .errors import DegenerateGeometryError

__all__ = [
    "HYDROGEN",
    "POSITRONIUM",
    "KinematicInput",
    "ResolvedKinematics",
    "TMode",
    "Target",
    "TargetKind",
    "kinematic_arrays",
    "min_mu_squared",
    "momentum_vectors",
    "mu_squared_form_a",
    "mu_squared_form_a_arrays",
    "mu_squared_form_b",
    "resolve",
    "resonance_energy",
]

_P_RHO_MIN = 1e-12


class TargetKind(str, enum.Enum):
    POSITRONIUM = "positronium"
    HYDROGEN = "hydrogen"


@dataclass(frozen=True)
class Target:
    kind: TargetKind
    Z: float
    eps0: float

    def __post_init__(self):
        expected = {
            TargetKind.POSITRONIUM: (0.5, -0.125),
            TargetKind.HYDROGEN: (1.0, -0.5),
        }[self.kind]
        if (self.Z, self.eps0) != expected:
            raise ValueError(
                f"{self.kind.value} requires Z={expected[0]}, eps0={expected[1]}"
            )

    @classmethod
    def from_name(cls, name: str) -> "Target":
        key = name.strip().lower()
        if key in ("ps", "positronium"):
            return POSITRONIUM
        if key in ("h", "hydrogen"):
            return HYDROGEN
        raise ValueError(f"unknown target {name!r} (expected 'ps' or 'h')")

    @property
    def short_name(self) -> str:
        return "Ps" if self.kind is TargetKind.POSITRONIUM else "H"


POSITRONIUM = Target(TargetKind.POSITRONIUM, 0.5, -0.125)
HYDROGEN = Target(TargetKind.HYDROGEN, 1.0, -0.5)


class TMode(str, enum.Enum):
    """How the photon energy ratio t = omega_f / omega_i is set."""

    FIXED_UNITY = "fixed"
    FULL = "full"


@dataclass(frozen=True)
class KinematicInput:
    omega_i: float
    E_e: float
    theta: float
    phi1: float
    Phi: float
    t_mode: TMode = TMode.FIXED_UNITY

    def __post_init__(self):
        if not self.omega_i > 0:
            raise ValueError(f"omega_i must be positive, got {self.omega_i}")
        if not self.E_e >= 0:
            raise ValueError(f"E_e must be non-negative, got {self.E_e}")
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        if not 0.0 <= self.phi1 <= math.pi:
            raise ValueError(f"phi1 must lie in [0, pi], got {self.phi1}")
        if not 0.0 <= self.Phi < 2.0 * math.pi:
            raise ValueError(f"Phi must lie in [0, 2pi), got {self.Phi}")
        object.__setattr__(self, "t_mode", TMode(self.t_mode))


@dataclass(frozen=True)
class ResolvedKinematics:
    target: Target
    theta: float
    k_i: float
    p1: float
    t: float
    Q: float
    cos_chi: float
    q_dot_p1: float
    p_rho: float
    zeta: float

    @property
    def mu(self) -> float:
        return self.p_rho

    @property
    def cos_beta(self) -> float:
        """Cosine of the angle between Q and p1."""
        if self.Q == 0.0 or self.p1 == 0.0:
            raise DegenerateGeometryError("cos(beta) undefined: Q or p1 vanishes")
        return float(np.clip(self.q_dot_p1 / (self.Q * self.p1), -1.0, 1.0))

    @property
    def cos_gamma(self) -> float:
        """Cosine of the angle between Q and p_rho = p1 - Q/2."""
        if self.Q == 0.0:
            raise DegenerateGeometryError("cos(gamma) undefined: Q vanishes")
        if self.p_rho < _P_RHO_MIN:
            return -1.0
        c = (self.q_dot_p1 - 0.5 * self.Q ** 2) / (self.Q * self.p_rho)
        return float(np.clip(c, -1.0, 1.0))


def kinematic_arrays(target, omega_i, E_e, theta, phi1, Phi, t_mode=TMode.FIXED_UNITY):
    """Vectorised core of :func:`resolve`; no validation.

    Returns a dict of broadcast arrays: k_i, p1, t, Q, cos_chi, q_dot_p1,
    q_dot_dir (Q along the unit electron direction) and p_rho.
    """
    omega_i = np.asarray(omega_i, dtype=float)
    k = omega_i / C_LIGHT
    p1 = np.sqrt(2.0 * np.asarray(E_e, dtype=float))
    theta = np.asarray(theta, dtype=float)
    phi1 = np.asarray(phi1, dtype=float)
    Phi = np.asarray(Phi, dtype=float)
    cos_phi1 = np.cos(phi1)
    if TMode(t_mode) is TMode.FIXED_UNITY:
        t = np.ones_like(k * p1)
    elif target.kind is TargetKind.POSITRONIUM:
        recoil_sq = k * k - 2.0 * k * p1 * cos_phi1 + p1 * p1
        t = 1.0 - (0.5 * p1 * p1 - target.eps0 + 0.5 * recoil_sq) / omega_i
    else:
        # proton recoil omitted, as in the hydrogen energy balance
        t = 1.0 - (0.5 * p1 * p1 - target.eps0) / omega_i
    half_sin = np.sin(0.5 * theta)
    # 1 - 2t cos(theta) + t^2 written without cancellation at small theta
    Q = k * np.sqrt((1.0 - t) ** 2 + 4.0 * t * half_sin * half_sin)
    sin_phi1 = np.sin(phi1)
    cos_chi = np.cos(theta) * cos_phi1 + np.sin(theta) * sin_phi1 * np.cos(Phi)
    # Q.p1 = k p1 (cos(phi1) - t cosChi) and p_rho = p1 - Q/2 from Cartesian
    # components; the scalar forms cancel at small theta and near mu = 0
    qx = -k * t * np.sin(theta)
    qz = k * ((1.0 - t) + 2.0 * t * half_sin * half_sin)
    # Q projected on the electron direction; defined even when p1 = 0
    q_dot_dir = qx * sin_phi1 * np.cos(Phi) + qz * cos_phi1
    q_dot_p1 = p1 * q_dot_dir
    px = p1 * sin_phi1 * np.cos(Phi)
    pz = p1 * cos_phi1
    rx = px - 0.5 * qx
    ry = p1 * sin_phi1 * np.sin(Phi)
    rz = pz - 0.5 * qz
    p_rho = np.sqrt(rx * rx + ry * ry + rz * rz)
    return {
        "k_i": k, "p1": p1, "t": t, "Q": Q, "cos_chi": cos_chi,
        "q_dot_p1": q_dot_p1, "q_dot_dir": q_dot_dir, "p_rho": p_rho,
    }


def resolve(target: Target, inp: KinematicInput) -> ResolvedKinematics:
    """Resolve a kinematic point into every derived scalar."""
    a = kinematic_arrays(target, inp.omega_i, inp.E_e, inp.theta, inp.phi1,
                         inp.Phi, inp.t_mode)
    p_rho = float(a["p_rho"])
    p1 = float(a["p1"])
    if target.kind is TargetKind.POSITRONIUM:
        zeta = -target.Z / p_rho if p_rho > 0 else -math.inf
    else:
        zeta = -target.Z / p1 if p1 > 0 else -math.inf
    return ResolvedKinematics(
        target=target,
        theta=inp.theta,
        k_i=float(a["k_i"]),
        p1=p1,
        t=float(a["t"]),
        Q=float(a["Q"]),
        cos_chi=float(a["cos_chi"]),
        q_dot_p1=float(a["q_dot_p1"]),
        p_rho=p_rho,
        zeta=zeta,
    )


def momentum_vectors(inp: KinematicInput, t: float):
    """Cartesian k_i, k_f, p1 and Q = k_i - k_f in the frame described above."""
    k = inp.omega_i / C_LIGHT
    k_i = np.array([0.0, 0.0, k])
    k_f = k * t * np.array([math.sin(inp.theta), 0.0, math.cos(inp.theta)])
    p1 = math.sqrt(2.0 * inp.E_e) * np.array([
        math.sin(inp.phi1) * math.cos(inp.Phi),
        math.sin(inp.phi1) * math.sin(inp.Phi),
        math.cos(inp.phi1),
    ])
    return k_i, k_f, p1, k_i - k_f


def mu_squared_form_a_arrays(p1, Q, theta, phi1, Phi):
    """Vectorised form (a): p1^2 - p1 Q [cos(phi1) sin(theta/2) - sin(phi1) cos(theta/2) cos(Phi)] + Q^2/4."""
    h = 0.5 * np.asarray(theta, dtype=float)
    bracket = np.cos(phi1) * np.sin(h) - np.sin(phi1) * np.cos(h) * np.cos(Phi)
    out = p1 * p1 - p1 * Q * bracket + 0.25 * Q * Q
    return out[()] if np.ndim(out) == 0 else out


def mu_squared_form_a(resolved: ResolvedKinematics, inp: KinematicInput) -> float:
    """mu^2 written through Q and the half photon angle (valid for t = 1)."""
    return float(mu_squared_form_a_arrays(resolved.p1, resolved.Q, inp.theta, inp.phi1, inp.Phi))


def mu_squared_form_b(gamma_ratio, theta, phi1, Phi, k):
    """mu^2 as a sum of three non-negative terms (t = 1), gamma = p1/k.

    Vectorises over all arguments.
    """
    s = np.sin(0.5 * np.asarray(theta))
    g = np.asarray(gamma_ratio)
    out = k * k * (
        (g - s) ** 2
        + 2.0 * g * s * (1.0 - np.cos(0.5 * np.pi - phi1 - 0.5 * np.asarray(theta)))
        + g * np.sin(phi1) * np.sin(theta) * (1.0 + np.cos(Phi))
    )
    return out[()] if np.ndim(out) == 0 else out


def resonance_energy(omega_i, theta):
    """Electron energy (a.u.) on the line of resonances, 0.5 (omega/c)^2 sin^2(theta/2)."""
    k = np.asarray(omega_i, dtype=float) / C_LIGHT
    out = 0.5 * k * k * np.sin(0.5 * np.asarray(theta, dtype=float)) ** 2
    return out[()] if np.ndim(out) == 0 else out


def min_mu_squared(omega_i: float, E_e: float, phi1: float | None = None):
    """Minimum of mu^2 over the photon angles (theta, Phi) at t = 1.

    If ``phi1`` is None the electron polar angle is minimised over as well.
    Returns ``(mu2_min, angles)`` where ``angles`` is (theta, Phi) or
    (theta, Phi, phi1).
    """
    k = omega_i / C_LIGHT
    g = math.sqrt(2.0 * E_e) / k
    free_phi1 = phi1 is None

    def unpack(x):
        if free_phi1:
            return x[0], x[1], x[2]
        return x[0], x[1], phi1

    def f(x):
        th, Ph, ph1 = unpack(x)
        return float(mu_squared_form_b(g, th, ph1, Ph, k))

    bounds = [(0.0, math.pi), (0.0, 2.0 * math.pi)]
    if free_phi1:
        bounds.append((0.0, math.pi))
    # coarse grid for the start point, then a bounded quasi-Newton polish
    grids = [np.linspace(lo, hi, 25) for lo, hi in bounds]
    mesh = np.meshgrid(*grids, indexing="ij")
    th, Ph = mesh[0], mesh[1]
    ph1 = mesh[2] if free_phi1 else phi1
    vals = mu_squared_form_b(g, th, ph1, Ph, k)
    idx = np.unravel_index(np.argmin(vals), vals.shape)
    x0 = np.array([m[idx] for m in mesh])
    res = optimize.minimize(f, x0, method="L-BFGS-B", bounds=bounds,
                            options={"ftol": 1e-20, "gtol": 1e-14, "maxiter": 2000})
    res = optimize.minimize(f, res.x, method="Nelder-Mead", bounds=bounds,
                            options={"xatol": 1e-12, "fatol": 1e-22, "maxiter": 20000})
    x = np.clip(res.x, [b[0] for b in bounds], [b[1] for b in bounds])
    return max(f(x), 0.0), tuple(float(v) for v in x)
