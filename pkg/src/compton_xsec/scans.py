"""Grid drivers and the fig1 ... fig8 scan presets.

Each driver returns plain :class:`ScanRecord` lists in axis-major order
(first axis outermost). DDCS grids are farmed out to a process pool whose
size comes from ``COMPTON_XSEC_THREADS`` (default: all cores); results are
gathered in submission order, so output never depends on scheduling.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .amplitudes import HydrogenAngle
from .constants import C_LIGHT, to_au
from .cross_sections import fdcs_values
from .errors import ComptonError, NonConvergenceError
from .kinematics import HYDROGEN, POSITRONIUM, Target, TMode, kinematic_arrays, resonance_energy
from .quadrature import ddcs_phi1

__all__ = [
    "FIGURES",
    "ScanAxis",
    "ScanGrid",
    "ScanRecord",
    "ScanTable",
    "binary_geometry",
    "figure_scan",
    "scan_ddcs",
    "scan_fdcs_surface",
    "scan_fdcs_vs_phi1",
    "trace_resonance_line",
    "worker_count",
]


@dataclass(frozen=True)
class ScanAxis:
    name: str
    unit: str
    values: tuple

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise ValueError(f"axis {self.name!r} needs a non-empty 1-D grid")
        if v.size > 1 and not (np.all(np.diff(v) > 0) or np.all(np.diff(v) < 0)):
            raise ValueError(f"axis {self.name!r} must be strictly monotone")
        object.__setattr__(self, "values", tuple(float(x) for x in v))


@dataclass(frozen=True)
class ScanGrid:
    axis1: ScanAxis
    axis2: ScanAxis | None = None
    fixed: dict = field(default_factory=dict)  # name -> (value, unit)

    def __post_init__(self):
        for name, spec in self.fixed.items():
            if not (isinstance(spec, tuple) and len(spec) == 2 and isinstance(spec[1], str)):
                raise ValueError(f"fixed parameter {name!r} must be (value, unit)")

    def points(self):
        if self.axis2 is None:
            return [(x,) for x in self.axis1.values]
        return [(x, y) for x in self.axis1.values for y in self.axis2.values]


@dataclass(frozen=True)
class ScanRecord:
    coordinates: tuple
    value: float
    units: str = "au"
    error_estimate: float | None = None
    tag: str = ""
    status: str = "ok"
    message: str = ""

    def __post_init__(self):
        if self.status == "ok" and not self.value >= 0:
            raise ValueError(f"scan value must be >= 0, got {self.value}")


@dataclass
class ScanTable:
    """Records plus the column layout and metadata the writers need."""

    name: str
    coord_names: tuple
    coord_units: tuple
    records: list
    metadata: dict = field(default_factory=dict)
    value_name: str = "value"
    derived: dict = field(default_factory=dict)  # column name -> f(record)


def worker_count(requested=None):
    if requested:
        return max(int(requested), 1)
    env = os.environ.get("COMPTON_XSEC_THREADS")
    if env:
        try:
            return max(int(env), 1)
        except ValueError:
            raise ValueError(f"COMPTON_XSEC_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _phi1_grid(n_points):
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    return np.linspace(0.0, math.pi, n_points)


def _safe_values(func, coords):
    """Vectorised evaluation with a per-point fallback that marks failures."""
    try:
        return list(np.atleast_1d(func(*[np.asarray(c) for c in coords]))), None
    except ComptonError:
        vals, msgs = [], []
        for point in zip(*coords):
            try:
                vals.append(float(func(*point)))
                msgs.append("")
            except ComptonError as exc:
                vals.append(math.nan)
                msgs.append(str(exc))
        return vals, msgs


def _records(coords, values, messages, tag, units="au"):
    out = []
    for i, point in enumerate(zip(*coords)):
        msg = messages[i] if messages else ""
        v = float(values[i])
        status = "failed" if msg or not math.isfinite(v) else "ok"
        out.append(ScanRecord(tuple(float(x) for x in point), v, units,
                              tag=tag, status=status, message=msg))
    return out


def scan_fdcs_vs_phi1(target: Target, omega_i, E_e, theta, Phi, n_points=181,
                      epsilon=0.0, t_mode=TMode.FIXED_UNITY,
                      hydrogen_angle=HydrogenAngle.MOMENTUM_TRANSFER):
    """FDCS on a uniform phi1 grid over [0, pi]; coordinates are (phi1,)."""
    phi1 = _phi1_grid(n_points)

    def f(p):
        return fdcs_values(target, omega_i, E_e, theta, p, Phi, epsilon, t_mode, hydrogen_angle)

    vals, msgs = _safe_values(f, (phi1,))
    return _records((phi1,), vals, msgs, target.short_name)


def binary_geometry(target: Target, omega_i, E_e, theta, t_mode=TMode.FIXED_UNITY):
    """(phi1, Phi) putting p1 along Q. Phi is always pi.

    With t = 1 this is phi1 = pi/2 - theta/2. In full-t mode t depends on
    phi1 for positronium, so the direction is iterated to a fixed point.
    """
    theta = np.asarray(theta, dtype=float)
    phi1 = 0.5 * math.pi - 0.5 * theta
    if TMode(t_mode) is TMode.FIXED_UNITY:
        return phi1, math.pi
    for _ in range(4):
        a = kinematic_arrays(target, omega_i, E_e, theta, phi1, math.pi, t_mode)
        t = a["t"]
        k = a["k_i"]
        qz = k * (1.0 - t * np.cos(theta))
        Q = np.where(a["Q"] > 0, a["Q"], 1.0)
        phi1 = np.arccos(np.clip(qz / Q, -1.0, 1.0))
    return phi1, math.pi


def scan_fdcs_surface(target: Target, omega_i, theta_grid, Ee_grid, epsilon=0.01,
                      t_mode=TMode.FIXED_UNITY):
    """FDCS over (theta, E_e) with p1 parallel to Q; coordinates (theta, E_e)."""
    th, ee = np.meshgrid(np.asarray(theta_grid, float), np.asarray(Ee_grid, float), indexing="ij")
    th = th.ravel()
    ee = ee.ravel()
    phi1, Phi = binary_geometry(target, omega_i, ee, th, t_mode)

    def f(t_, e_, p_):
        return fdcs_values(target, omega_i, e_, t_, p_, Phi, epsilon, t_mode)

    vals, msgs = _safe_values(f, (th, ee, np.broadcast_to(phi1, th.shape)))
    return _records((th, ee), vals, msgs, target.short_name)


def _ddcs_point(args):
    target, omega_i, E_e, phi1, rel_tol, t_mode = args
    try:
        s = ddcs_phi1(target, omega_i, E_e, phi1, rel_tol, t_mode=t_mode)
        return s.value, s.error_estimate, "ok", ""
    except NonConvergenceError as exc:
        partial = exc.result
        return (math.nan, None if partial is None else 4.0 * math.pi * partial.error_estimate,
                "failed", str(exc))
    except ComptonError as exc:
        return math.nan, None, "failed", str(exc)


def _map(func, jobs, workers):
    workers = worker_count(workers)
    if workers == 1 or len(jobs) < 2:
        return [func(j) for j in jobs]
    chunk = max(1, len(jobs) // (8 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, jobs, chunksize=chunk))


def scan_ddcs(target: Target, omega_i, phi1_grid, Ee_grid, rel_tol=1e-4,
              t_mode=TMode.FIXED_UNITY, workers=None):
    """DDCS on the (phi1, E_e) grid; coordinates (phi1, E_e).

    Non-converged points are kept as ``status="failed"`` records.
    """
    phi1_grid = np.atleast_1d(np.asarray(phi1_grid, dtype=float))
    Ee_grid = np.atleast_1d(np.asarray(Ee_grid, dtype=float))
    points = [(p, e) for p in phi1_grid for e in Ee_grid]
    jobs = [(target, float(omega_i), float(e), float(p), rel_tol, TMode(t_mode)) for p, e in points]
    results = _map(_ddcs_point, jobs, workers)
    out = []
    for (p, e), (val, err, status, msg) in zip(points, results):
        out.append(ScanRecord((float(p), float(e)), val, "au", err, target.short_name, status, msg))
    return out


def trace_resonance_line(omega_i, theta_grid):
    """(theta, E_e) pairs on the resonance line; value is E_e in a.u."""
    theta_grid = np.asarray(theta_grid, dtype=float)
    if np.any(theta_grid <= 0) or np.any(theta_grid > math.pi):
        raise ValueError("theta grid must lie in (0, pi]")
    energies = np.atleast_1d(resonance_energy(omega_i, theta_grid))
    return [ScanRecord((float(t),), float(e), "au", tag="resonance")
            for t, e in zip(theta_grid, energies)]


# --- figure presets ---------------------------------------------------------

def _energy_grid(omega_i, n_energy, factor=4.0):
    """Uniform E_e grid up to factor * (omega/c)^2 (twice the free backscatter energy)."""
    e_max = factor * (omega_i / C_LIGHT) ** 2
    return np.linspace(e_max / n_energy, e_max, n_energy)


def _fig_fdcs_phi1(theta):
    def run(n_angle=181, n_energy=200, rel_tol=1e-4, epsilon=0.01, t_mode=TMode.FIXED_UNITY,
            workers=None):
        omega = to_au(5.0, "keV")
        E_e = to_au(27.2, "eV")
        records = []
        for target in (POSITRONIUM, HYDROGEN):
            for Phi in (math.pi, 0.0):
                for r in scan_fdcs_vs_phi1(target, omega, E_e, theta, Phi, n_angle, 0.0, t_mode):
                    records.append(ScanRecord((r.coordinates[0], Phi), r.value, r.units,
                                              r.error_estimate, r.tag, r.status, r.message))
        meta = {"quantity": "FDCS", "omega_i_keV": 5.0, "E_e_eV": 27.2,
                "theta_rad": theta, "epsilon": 0.0, "t_mode": TMode(t_mode).value}
        return ScanTable("", ("phi1", "Phi"), ("rad", "rad"), records, meta, "fdcs")
    return run


def _fig4(n_angle=181, n_energy=200, rel_tol=1e-4, epsilon=0.01, t_mode=TMode.FIXED_UNITY,
          workers=None):
    omega = to_au(5.0, "keV")
    thetas = np.linspace(0.0, math.pi, n_angle)
    e_max = 1.5 * float(resonance_energy(omega, math.pi))
    energies = np.linspace(e_max / n_energy, e_max, n_energy)
    records = scan_fdcs_surface(POSITRONIUM, omega, thetas, energies, epsilon, t_mode)
    meta = {"quantity": "FDCS", "geometry": "p1 parallel to Q", "omega_i_keV": 5.0,
            "epsilon": epsilon, "t_mode": TMode(t_mode).value}
    return ScanTable("", ("theta", "E_e"), ("rad", "au"), records, meta, "fdcs")


def _fig5(n_angle=181, n_energy=200, rel_tol=1e-4, epsilon=0.01, t_mode=TMode.FIXED_UNITY,
          workers=None):
    omega = to_au(3.0, "keV")
    records = scan_ddcs(POSITRONIUM, omega, _phi1_grid(n_angle), _energy_grid(omega, n_energy),
                        rel_tol, t_mode, workers)
    meta = {"quantity": "DDCS_phi1", "omega_i_keV": 3.0, "rel_tol": rel_tol,
            "t_mode": TMode(t_mode).value}
    return ScanTable("", ("phi1", "E_e"), ("rad", "au"), records, meta, "ddcs")


def _fig_slice(keV):
    def run(n_angle=181, n_energy=200, rel_tol=1e-4, epsilon=0.01, t_mode=TMode.FIXED_UNITY,
            workers=None):
        omega = to_au(keV, "keV")
        energies = _energy_grid(omega, n_energy)
        records = []
        for target in (POSITRONIUM, HYDROGEN):
            records += scan_ddcs(target, omega, [0.0], energies, rel_tol, t_mode, workers)
        meta = {"quantity": "DDCS_phi1", "omega_i_keV": keV, "phi1_rad": 0.0,
                "rel_tol": rel_tol, "t_mode": TMode(t_mode).value}
        return ScanTable("", ("phi1", "E_e"), ("rad", "au"), records, meta, "ddcs")
    return run


FIGURES = {
    "fig1": _fig_fdcs_phi1(math.pi / 3.0),
    "fig2": _fig_fdcs_phi1(math.pi / 2.0),
    "fig3": _fig_fdcs_phi1(math.pi),
    "fig4": _fig4,
    "fig5": _fig5,
    "fig6": _fig_slice(5.0),
    "fig7": _fig_slice(3.75),
    "fig8": _fig_slice(3.0),
}


def figure_scan(name: str, **kwargs) -> ScanTable:
    """Regenerate the data behind one figure ("fig1" ... "fig8")."""
    try:
        run = FIGURES[name]
    except KeyError:
        raise ValueError(f"unknown figure {name!r}; expected one of {sorted(FIGURES)}") from None
    table = run(**kwargs)
    table.name = name
    return table

