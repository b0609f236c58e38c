"""Adaptive 2-D quadrature over the photon angles and the DDCS integral.

The integrator works on rectangles in (theta, Phi) with a tensor-product
Gauss-Kronrod 7/15 rule; |K15 - G7| is the panel error estimate. Panels are
refined globally, largest error first, until the summed estimate meets the
relative tolerance.

An optional singular hint (a point where the integrand behaves like 1/r) is
made a vertex of the initial panels. Every panel touching the hint is
integrated in Duffy coordinates: each of its two triangles fanning out of the
hint is mapped onto the unit square with Jacobian proportional to the
distance from the hint, which cancels the 1/r growth. Refinement keeps the
hint panel in Duffy form, so the mesh grades dyadically toward the point.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .constants import C_LIGHT
from .cross_sections import CrossSectionSample, Units, fdcs_values
from .errors import NonConvergenceError
from .kinematics import Target, TargetKind, TMode, kinematic_arrays
from .amplitudes import HydrogenAngle

__all__ = ["IntegrationResult", "ddcs_phi1", "integrate_2d_adaptive", "singular_point"]

# Gauss-Kronrod 7/15 on [-1, 1]
_XK = np.array([
    -0.991455371120812639206854697526329, -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926, -0.741531185599394439863864773280788,
    -0.586087235467691130294144845693013, -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245, 0.0,
    0.207784955007898467600689403773245, 0.405845151377397166906606412076961,
    0.586087235467691130294144845693013, 0.741531185599394439863864773280788,
    0.864864423359769072789712788640926, 0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
])
_WK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    0.204432940075298892414161999234649, 0.190350578064785409913256402421014,
    0.169004726639267902826583426598550, 0.140653259715525918745189590510238,
    0.104790010322250183839876322541518, 0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
])
_WG = np.zeros(15)
_WG[1::2] = [
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
    0.381830050505118944950369775488975, 0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
]
# tensor weights on [-1, 1]^2 (area 4)
_WK2 = np.outer(_WK, _WK).ravel()
_WG2 = np.outer(_WG, _WG).ravel()
_U = np.repeat(0.5 * (_XK + 1.0), 15)  # first coordinate on [0, 1]
_V = np.tile(0.5 * (_XK + 1.0), 15)    # second coordinate on [0, 1]
_NODES = 225


@dataclass(frozen=True)
class IntegrationResult:
    value: float
    error_estimate: float
    evaluations: int
    converged: bool
    panels: int = 0


@dataclass
class _Panel:
    a: float
    b: float
    c: float
    d: float
    corner: tuple | None  # singular vertex (theta, Phi) if any
    value: float = 0.0
    error: float = 0.0

    @property
    def size(self):
        return max(self.b - self.a, self.d - self.c)


def _rect_points(p: _Panel):
    th = p.a + (p.b - p.a) * _U
    ph = p.c + (p.d - p.c) * _V
    return th, ph


def _duffy_points(p: _Panel):
    """Points and Jacobians for the two Duffy triangles of a corner panel."""
    sx, sy = p.corner
    xs = [p.a, p.b]
    ys = [p.c, p.d]
    ox = xs[1] if sx == xs[0] else xs[0]
    oy = ys[1] if sy == ys[0] else ys[0]
    S = np.array([sx, sy])
    A = np.array([ox, sy])
    C = np.array([ox, oy])
    B = np.array([sx, oy])
    pts = []
    jac = []
    for P1, P2 in ((A, C), (C, B)):
        e1 = P1 - S
        e2 = P2 - P1
        det = abs(e1[0] * e2[1] - e1[1] * e2[0])
        x = S[0] + _U * (e1[0] + _V * e2[0])
        y = S[1] + _U * (e1[1] + _V * e2[1])
        pts.append((x, y))
        jac.append(_U * det)
    th = np.concatenate([pts[0][0], pts[1][0]])
    ph = np.concatenate([pts[0][1], pts[1][1]])
    return th, ph, np.concatenate(jac)


def _evaluate(f, panels):
    """Fill value/error of each panel with one vectorised call to f."""
    thetas, phis, layout = [], [], []
    for p in panels:
        if p.corner is None:
            th, ph = _rect_points(p)
            thetas.append(th)
            phis.append(ph)
            layout.append(None)
        else:
            th, ph, jac = _duffy_points(p)
            thetas.append(th)
            phis.append(ph)
            layout.append(jac)
    vals = np.asarray(f(np.concatenate(thetas), np.concatenate(phis)), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise FloatingPointError("integrand returned non-finite values")
    pos = 0
    n_eval = 0
    for p, jac in zip(panels, layout):
        if jac is None:
            v = vals[pos:pos + _NODES]
            scale = 0.25 * (p.b - p.a) * (p.d - p.c)
            k = scale * float(np.dot(_WK2, v))
            g = scale * float(np.dot(_WG2, v))
            pos += _NODES
            n_eval += _NODES
        else:
            v = vals[pos:pos + 2 * _NODES] * jac
            # (u, v) live on [0, 1]^2: weights scale by 1/4
            k = 0.25 * (float(np.dot(_WK2, v[:_NODES])) + float(np.dot(_WK2, v[_NODES:])))
            g = 0.25 * (float(np.dot(_WG2, v[:_NODES])) + float(np.dot(_WG2, v[_NODES:])))
            pos += 2 * _NODES
            n_eval += 2 * _NODES
        p.value = k
        p.error = abs(k - g)
    return n_eval


def _split(p: _Panel):
    ma = 0.5 * (p.a + p.b)
    mc = 0.5 * (p.c + p.d)
    kids = []
    for a, b in ((p.a, ma), (ma, p.b)):
        for c, d in ((p.c, mc), (mc, p.d)):
            corner = None
            if p.corner is not None and p.corner[0] in (a, b) and p.corner[1] in (c, d):
                corner = p.corner
            kids.append(_Panel(a, b, c, d, corner))
    return kids


def _initial_panels(theta_range, Phi_range, hint, n_init):
    a, b = map(float, theta_range)
    c, d = map(float, Phi_range)
    xs = list(np.linspace(a, b, n_init[0] + 1))
    ys = list(np.linspace(c, d, n_init[1] + 1))
    corner = None
    if hint is not None:
        hx, hy = float(hint[0]), float(hint[1])
        if a <= hx <= b and c <= hy <= d:
            corner = (hx, hy)
            # move the nearest grid line onto the hint so it becomes a vertex
            for grid, h, lo, hi in ((xs, hx, a, b), (ys, hy, c, d)):
                if h not in grid:
                    inner = range(1, len(grid) - 1)
                    j = min(inner, key=lambda i: abs(grid[i] - h), default=None)
                    if j is not None and abs(grid[j] - h) < 0.5 * (hi - lo) / (len(grid) - 1):
                        grid[j] = h
                    else:
                        grid.append(h)
                        grid.sort()
    panels = []
    for a0, b0 in zip(xs[:-1], xs[1:]):
        for c0, d0 in zip(ys[:-1], ys[1:]):
            cor = None
            if corner is not None and corner[0] in (a0, b0) and corner[1] in (c0, d0):
                cor = corner
            panels.append(_Panel(a0, b0, c0, d0, cor))
    return panels


class _Neumaier:
    __slots__ = ("s", "c")

    def __init__(self):
        self.s = 0.0
        self.c = 0.0

    def add(self, x):
        t = self.s + x
        if abs(self.s) >= abs(x):
            self.c += (self.s - t) + x
        else:
            self.c += (x - t) + self.s
        self.s = t

    @property
    def total(self):
        return self.s + self.c


def integrate_2d_adaptive(f, theta_range, Phi_range, rel_tol=1e-4, singular_hint=None,
                          abs_tol=0.0, max_evals=5_000_000, min_size=1e-6,
                          n_init=(4, 4), batch=16):
    """Integrate ``f(theta, Phi)`` dtheta dPhi over a rectangle.

    ``f`` must accept numpy arrays and return an array of the same shape.
    ``singular_hint`` is an optional (theta0, Phi0) where f may diverge like
    the inverse distance. Converges when the summed error estimate is below
    ``max(rel_tol * |value|, abs_tol)``; raises :class:`NonConvergenceError`
    (with the partial :class:`IntegrationResult` attached) when
    ``max_evals`` is exhausted or every panel reached ``min_size``.
    """
    if not rel_tol > 0:
        raise ValueError("rel_tol must be positive")
    panels = _initial_panels(theta_range, Phi_range, singular_hint, n_init)
    n_eval = _evaluate(f, panels)
    value = _Neumaier()
    error = _Neumaier()
    heap = []
    done = []
    counter = 0
    for p in panels:
        value.add(p.value)
        error.add(p.error)
        heapq.heappush(heap, (-p.error, counter, p))
        counter += 1

    def target():
        return max(rel_tol * abs(value.total), abs_tol)

    while error.total > target():
        if n_eval >= max_evals or not heap:
            break
        chosen = []
        while heap and len(chosen) < batch:
            _, _, p = heapq.heappop(heap)
            if p.size <= min_size:
                done.append(p)
                continue
            chosen.append(p)
        if not chosen:
            continue
        kids = [k for p in chosen for k in _split(p)]
        n_eval += _evaluate(f, kids)
        for p in chosen:
            value.add(-p.value)
            error.add(-p.error)
        for k in kids:
            value.add(k.value)
            error.add(k.error)
            heapq.heappush(heap, (-k.error, counter, k))
            counter += 1

    final = [p for _, _, p in heap] + done
    total = math.fsum(p.value for p in final)
    err = math.fsum(p.error for p in final)
    converged = err <= max(rel_tol * abs(total), abs_tol)
    result = IntegrationResult(total, err, n_eval, converged, len(final))
    if not converged:
        raise NonConvergenceError(
            f"adaptive quadrature did not converge: value={total:.6g}, "
            f"error={err:.3g}, evaluations={n_eval}", result)
    return result


def singular_point(target: Target, omega_i, E_e, phi1, t_mode=TMode.FIXED_UNITY,
                   rel_threshold=0.1):
    """Photon angles (theta, pi) minimising mu for this electron, or None.

    Only positronium has the moving resonance; a point is returned when the
    minimal relative momentum is below ``rel_threshold * k_i``.
    """
    if target.kind is not TargetKind.POSITRONIUM or E_e <= 0:
        return None
    k = omega_i / C_LIGHT

    def mu2(th):
        return kinematic_arrays(target, omega_i, E_e, th, phi1, math.pi, t_mode)["p_rho"] ** 2

    grid = np.linspace(0.0, math.pi, 721)
    vals = mu2(grid)
    i = int(np.argmin(vals))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    res = optimize.minimize_scalar(lambda x: float(mu2(x)), bounds=(lo, hi),
                                   method="bounded", options={"xatol": 1e-13})
    th0 = float(res.x) if res.fun <= vals[i] else float(grid[i])
    if math.sqrt(float(mu2(th0))) >= rel_threshold * k:
        return None
    # snap onto the boundary when the minimum sits there
    if math.pi - th0 < 1e-9:
        th0 = math.pi
    return th0, math.pi


def ddcs_phi1(target: Target, omega_i: float, E_e: float, phi1: float,
              rel_tol: float = 1e-4, epsilon: float = 0.0,
              t_mode=TMode.FIXED_UNITY,
              hydrogen_angle=HydrogenAngle.MOMENTUM_TRANSFER,
              max_evals: int = 5_000_000) -> CrossSectionSample:
    """DDCS d^2 sigma / (dE_e dphi1) = 2 pi int sin(theta) dtheta int dPhi FDCS.

    The FDCS is even in Phi about pi, so the Phi range is folded onto
    [0, pi] and doubled; the resonance point (theta0, pi) then lies on an
    edge of the domain.
    """
    if not omega_i > 0 or not E_e >= 0 or not 0.0 <= phi1 <= math.pi:
        raise ValueError("ddcs_phi1: invalid omega_i, E_e or phi1")

    def integrand(th, ph):
        return np.sin(th) * fdcs_values(target, omega_i, E_e, th, phi1, ph,
                                        epsilon, t_mode, hydrogen_angle)

    hint = singular_point(target, omega_i, E_e, phi1, t_mode)
    res = integrate_2d_adaptive(integrand, (0.0, math.pi), (0.0, math.pi),
                                rel_tol=rel_tol, singular_hint=hint,
                                max_evals=max_evals)
    scale = 2.0 * math.pi * 2.0
    kin = {"omega_i": float(omega_i), "E_e": float(E_e), "phi1": float(phi1),
           "t_mode": TMode(t_mode).value}
    extra = {
        "evaluations": res.evaluations,
        "rel_tol": rel_tol,
        "epsilon": float(epsilon),
        "singular_hint_theta": None if hint is None else hint[0],
    }
    return CrossSectionSample(scale * res.value, Units.ATOMIC, kin, target, "DDCS",
                              error_estimate=scale * res.error_estimate, extra=extra)
