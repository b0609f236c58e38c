"""Complex special functions used by the Coulomb matrix elements.

Only three things are needed: log Gamma for complex arguments (the Coulomb
normalisation Gamma(1 + i*zeta)), complex powers on the principal sheet and
the closed form |Gamma(1 + iy)|^2 = pi*y / sinh(pi*y).

Log Gamma uses the Stirling series after shifting the argument with the
recurrence Gamma(z + 1) = z Gamma(z) until |z| >= 15. The shift sums
principal logs of points in the right half plane, which keeps the result on
the analytic (continuous) branch used by scipy/mpmath ``loggamma``; the real
part never needs any branch choice.
"""

from __future__ import annotations

import numpy as np

from .errors import PoleError, ZeroBaseError

__all__ = [
    "complex_log_gamma",
    "complex_pow",
    "gamma_mod_sq_one_plus_iy",
    "log_coulomb_factor",
]

_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)

# B_{2k} / (2k (2k - 1)) for k = 1..9
_STIRLING = np.array([
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
])

_STIRLING_MIN_ABS = 15.0
# Beyond this many recurrence steps the reflection formula is used instead.
_MAX_SHIFT = 4096


def _stirling(z):
    zinv = 1.0 / z
    zinv2 = zinv * zinv
    series = np.zeros_like(z)
    for c in _STIRLING[::-1]:
        series = series * zinv2 + c
    return (z - 0.5) * np.log(z) - z + _HALF_LOG_2PI + series * zinv


def _log_gamma_shifted(z):
    """log Gamma for Re z >= -_MAX_SHIFT via upward recurrence + Stirling."""
    w = z.copy()
    acc = np.zeros_like(z)
    need = (np.abs(w) < _STIRLING_MIN_ABS) | (w.real < 0.5)
    while np.any(need):
        acc[need] += np.log(w[need])
        w[need] += 1.0
        need = (np.abs(w) < _STIRLING_MIN_ABS) | (w.real < 0.5)
    return _stirling(w) - acc


def complex_log_gamma(z):
    """Logarithm of the gamma function for complex ``z``.

    Accepts scalars or arrays. The branch is the analytic continuation from
    the positive real axis (cut along the negative real axis), so
    ``complex_log_gamma(conj(z)) == conj(complex_log_gamma(z))``.

    Raises :class:`PoleError` at non-positive integers.
    """
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex)).copy()
    if not np.all(np.isfinite(z)):
        raise ValueError("complex_log_gamma: non-finite argument")
    pole = (z.imag == 0.0) & (z.real <= 0.0) & (z.real == np.round(z.real))
    if np.any(pole):
        raise PoleError(f"log Gamma has a pole at {z[pole][0].real:g}")

    out = np.empty_like(z)
    far_left = z.real < -_MAX_SHIFT
    near = ~far_left
    if np.any(near):
        out[near] = _log_gamma_shifted(z[near])
    if np.any(far_left):
        # log Gamma(z) = log pi - log sin(pi z) - log Gamma(1 - z); the
        # imaginary part is then only fixed modulo 2 pi.
        zl = z[far_left]
        out[far_left] = (np.log(np.pi) - np.log(np.sin(np.pi * zl))
                         - _log_gamma_shifted(1.0 - zl))
    return out[0] if scalar else out


def complex_pow(base, exponent):
    """``base ** exponent`` on the principal sheet, arg(base) in (-pi, pi].

    Raises :class:`ZeroBaseError` if any base is exactly zero.
    """
    base = np.asarray(base, dtype=complex)
    if np.any(base == 0):
        raise ZeroBaseError("complex_pow: base must be non-zero")
    return np.exp(np.asarray(exponent, dtype=complex) * np.log(base))


def gamma_mod_sq_one_plus_iy(y):
    """|Gamma(1 + iy)|^2 = pi*y / sinh(pi*y), with value 1 at y = 0.

    Written as 2x e^{-x} / (1 - e^{-2x}), x = pi|y|, so it neither overflows
    nor loses accuracy for large |y|.
    """
    x = np.pi * np.abs(np.asarray(y, dtype=float))
    small = x < 1e-8
    xs = np.where(small, 1.0, x)
    big = 2.0 * xs * np.exp(-xs) / -np.expm1(-2.0 * xs)
    out = np.where(small, 1.0 - x * x / 6.0, big)
    return out[()] if out.ndim == 0 else out


def log_coulomb_factor(zeta):
    """Complex log of exp(-pi*zeta/2) * Gamma(1 + i*zeta).

    Each factor overflows separately as zeta -> -inf while the product
    grows only like sqrt(2 pi |zeta|). The modulus is therefore taken from
    the closed form of |Gamma(1 + i zeta)|^2 and only the phase from
    log Gamma.
    """
    zeta = np.asarray(zeta, dtype=float)
    x = np.pi * np.abs(zeta)
    # log|Gamma(1 + i zeta)| = 0.5*log(2x) - x/2 - 0.5*log1p(-exp(-2x)); the
    # -x/2 cancels -pi*zeta/2 exactly for zeta < 0 and doubles for zeta > 0
    linear = np.where(zeta < 0, 0.0, -x)
    with np.errstate(divide="ignore"):
        log_mod = np.where(
            x < 1e-8,
            -x * x / 12.0 - 0.5 * np.pi * zeta,
            0.5 * np.log(np.where(x < 1e-8, 1.0, 2.0 * x))
            + linear
            - 0.5 * np.log1p(-np.exp(-2.0 * np.maximum(x, 1e-8))),
        )
    phase = np.imag(complex_log_gamma(1.0 + 1j * zeta))
    return log_mod + 1j * phase
