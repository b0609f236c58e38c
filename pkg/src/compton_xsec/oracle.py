"""Brute-force partial-wave evaluation of the bound-free matrix element.

Independent check of the closed form for J0 = <phi^-(p)| e^{i q.r} |phi_0>.
Both the incoming Coulomb wave and the plane wave are expanded in Legendre
polynomials; after the angular integration only radial overlaps remain::

    J0 = 4 pi sqrt(Z^3/pi) / p * sum_l (2l + 1) e^{i sigma_l} P_l(cos)
         * int_0^R r F_l(eta, p r) j_l(q r) e^{-Z r} dr

with eta = -Z/p and sigma_l = arg Gamma(l + 1 + i eta). For q close to p
the l-series converges only geometrically (about 0.7^l for Z = 1/2), so the
partial sums are extrapolated with Wynn's epsilon algorithm. The regular Coulomb
functions F_l come from their power series near the origin, continued
outward by integrating the radial Coulomb equation for all l at once.

Slow by design: a single point takes a fraction of a second to seconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import eval_legendre, gammaln, spherical_jn

from .errors import OracleAccuracyError
from .special_functions import complex_log_gamma

__all__ = ["OracleConfig", "coulomb_f", "j0_numeric", "j0_numeric_terms", "sum_with_tail"]

_SERIES_RHO = 1.0


@dataclass(frozen=True)
class OracleConfig:
    l_max: int = 40
    radial_cutoff: float = 80.0
    radial_points: int = 6000
    tolerance: float = 1e-6
    accelerate: bool = True

    def __post_init__(self):
        if not 0 <= self.l_max <= 40:
            raise ValueError("l_max must lie in [0, 40]")
        if self.radial_cutoff < 50.0:
            raise ValueError("radial_cutoff must be >= 50 a.u.")
        if self.radial_points < 100:
            raise ValueError("radial_points must be >= 100")


def _coulomb_series(l, eta, rho, n_terms=120):
    """F_l and dF_l/drho from the ascending series (accurate for rho <~ 2)."""
    log_c = (l * math.log(2.0) - 0.5 * math.pi * eta
             + float(np.real(complex_log_gamma(l + 1 + 1j * eta))) - gammaln(2 * l + 2))
    rho = np.asarray(rho, dtype=float)
    a_prev2, a_prev = 0.0, 1.0
    s = np.ones_like(rho)
    ds = np.full_like(rho, l + 1.0)
    pw = np.ones_like(rho)
    for k in range(l + 2, l + 2 + n_terms):
        a = (2.0 * eta * a_prev - a_prev2) / ((k + l) * (k - l - 1))
        pw = pw * rho
        s = s + a * pw
        ds = ds + k * a * pw
        a_prev2, a_prev = a_prev, a
    c = math.exp(log_c)
    return c * rho ** (l + 1) * s, c * rho ** l * ds


def coulomb_f(l_max: int, eta: float, rho) -> np.ndarray:
    """Regular Coulomb functions F_l(eta, rho), l = 0..l_max, shape (l_max+1, len(rho))."""
    rho = np.asarray(rho, dtype=float)
    out = np.empty((l_max + 1, rho.size))
    inner = rho <= _SERIES_RHO
    for l in range(l_max + 1):
        if np.any(inner):
            out[l, inner] = _coulomb_series(l, eta, rho[inner])[0]
    outer = ~inner
    if not np.any(outer):
        return out
    y0 = np.empty(2 * (l_max + 1))
    for l in range(l_max + 1):
        f, d = _coulomb_series(l, eta, _SERIES_RHO)
        y0[2 * l] = f
        y0[2 * l + 1] = d
    centrifugal = np.arange(l_max + 1) * (np.arange(l_max + 1) + 1.0)

    def rhs(r, y):
        dy = np.empty_like(y)
        dy[0::2] = y[1::2]
        dy[1::2] = (centrifugal / (r * r) + 2.0 * eta / r - 1.0) * y[0::2]
        return dy

    order = np.argsort(rho[outer])
    r_sorted = rho[outer][order]
    sol = solve_ivp(rhs, (_SERIES_RHO, r_sorted[-1]), y0, method="DOP853",
                    t_eval=r_sorted, rtol=1e-13, atol=1e-300)
    if not sol.success:
        raise RuntimeError(f"Coulomb ODE integration failed: {sol.message}")
    block = np.empty((l_max + 1, r_sorted.size))
    block[:, order] = sol.y[0::2]
    out[:, outer] = block
    return out


def _radial_grid(cfg: OracleConfig, k_max: float):
    n_gauss = 20
    n_panels = max(cfg.radial_points // n_gauss, 1)
    wavelength = 2.0 * math.pi / k_max
    if n_panels * n_gauss < 20.0 * cfg.radial_cutoff / wavelength:
        raise ValueError("radial grid too coarse: fewer than 20 nodes per wavelength")
    x, w = np.polynomial.legendre.leggauss(n_gauss)
    edges = np.linspace(0.0, cfg.radial_cutoff, n_panels + 1)
    half = 0.5 * np.diff(edges)[:, None]
    mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
    return (mid + half * x).ravel(), (half * w).ravel()


def j0_numeric_terms(q_half_mag, p_mag, cos_angle, Z, cfg: OracleConfig = OracleConfig()):
    """Partial-wave terms of J0 (complex array, index l)."""
    if p_mag <= 0.05:
        raise ValueError("oracle accuracy domain needs p > 0.05 a.u.")
    if q_half_mag <= 0:
        raise ValueError("oracle needs q > 0")
    eta = -Z / p_mag
    r, w = _radial_grid(cfg, p_mag + q_half_mag)
    F = coulomb_f(cfg.l_max, eta, p_mag * r)
    weight = w * r * np.exp(-Z * r)
    ls = np.arange(cfg.l_max + 1)
    sigma = np.imag(complex_log_gamma(ls + 1 + 1j * eta))
    terms = np.empty(cfg.l_max + 1, dtype=complex)
    for l in ls:
        radial = float(np.dot(weight, F[l] * spherical_jn(l, q_half_mag * r)))
        terms[l] = (2 * l + 1) * np.exp(1j * sigma[l]) * eval_legendre(l, cos_angle) * radial
    return 4.0 * math.pi * math.sqrt(Z ** 3 / math.pi) / p_mag * terms


def _wynn_epsilon(partial_sums):
    """Even-column estimates of the Wynn epsilon table (last entry of each)."""
    cols = [np.zeros(len(partial_sums) + 1, dtype=complex)[:-1],
            np.asarray(partial_sums, dtype=complex)]
    estimates = [cols[1][-1]]
    with np.errstate(divide="ignore", invalid="ignore"):
        while len(cols[-1]) > 2:
            prev2, prev = cols[-2], cols[-1]
            cols.append(prev2[1:len(prev)] + 1.0 / np.diff(prev))
            # cols[j] holds eps_{j-1}; only even eps are estimates
            if len(cols) % 2 == 1:
                continue
            est = cols[-1][-1]
            if not np.isfinite(est):
                break
            estimates.append(est)
    return estimates


_RADIAL_FLOOR = 1e-12
_WYNN_SAFETY = 10.0


def sum_with_tail(terms, accelerate=True):
    """Sum a partial-wave series; returns (value, tail_estimate).

    Without acceleration the tail is the size of the last two terms. With
    Wynn's epsilon algorithm on the last 21 partial sums the value is the
    accelerated estimate whose change from its predecessor is smallest; the
    tail is ten times the larger of the two neighbouring changes, floored at
    the radial-quadrature accuracy (1e-12 relative).
    """
    terms = np.asarray(terms, dtype=complex)
    raw = complex(np.sum(terms))
    raw_tail = float(np.sum(np.abs(terms[-2:])))
    if not accelerate or len(terms) < 7:
        return raw, raw_tail
    ests = _wynn_epsilon(np.cumsum(terms)[-21:])
    gaps = [abs(b - a) for a, b in zip(ests[:-1], ests[1:])]
    if not gaps:
        return raw, raw_tail
    i = int(np.argmin(gaps))
    best = complex(ests[i + 1])
    # the first gap compares against the raw partial sum, not an estimate
    tail = _WYNN_SAFETY * max(gaps[max(i - 1, min(i, 1)):i + 1]) + _RADIAL_FLOOR * abs(best)
    if tail >= raw_tail:
        return raw, raw_tail
    return best, float(tail)


def j0_numeric(q_half_mag, p_mag, cos_angle, Z, cfg: OracleConfig = OracleConfig()) -> complex:
    """J0 by partial-wave summation.

    Raises :class:`OracleAccuracyError` when the tail estimate of the
    l-series exceeds ``cfg.tolerance`` relative to the sum.
    """
    terms = j0_numeric_terms(q_half_mag, p_mag, cos_angle, Z, cfg)
    total, tail = sum_with_tail(terms, cfg.accelerate)
    if tail > cfg.tolerance * abs(total):
        raise OracleAccuracyError(
            f"partial-wave tail {tail:.3g} exceeds tolerance relative to |J0|={abs(total):.3g}"
        )
    return total
