import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import loggamma

from compton_xsec.errors import PoleError, ZeroBaseError
from compton_xsec.special_functions import (
    complex_log_gamma,
    complex_pow,
    gamma_mod_sq_one_plus_iy,
    log_coulomb_factor,
)

finite = st.floats(min_value=-60, max_value=60, allow_nan=False)


def test_log_gamma_at_one_and_two():
    assert abs(complex_log_gamma(1.0)) < 1e-15
    assert abs(complex_log_gamma(2.0)) < 1e-15


def test_log_gamma_one_plus_i():
    val = abs(cmath.exp(complex_log_gamma(1 + 1j))) ** 2
    assert val == pytest.approx(math.pi / math.sinh(math.pi), abs=1e-10)
    assert val == pytest.approx(0.27203, abs=1e-5)


def test_log_gamma_matches_scipy_on_grid():
    x, y = np.meshgrid(np.linspace(-30.5, 40, 71), np.linspace(-80, 80, 81))
    z = (x + 1j * y).ravel()
    ours = complex_log_gamma(z)
    ref = loggamma(z)
    np.testing.assert_allclose(ours, ref, rtol=1e-12, atol=1e-12)


def test_log_gamma_poles():
    for n in (0, -1, -7):
        with pytest.raises(PoleError):
            complex_log_gamma(complex(n, 0.0))


@given(st.floats(0.5, 50), finite)
def test_conjugate_reflection(x, y):
    z = complex(x, y)
    a = complex_log_gamma(z)
    b = complex_log_gamma(z.conjugate())
    assert abs(a.conjugate() - b) <= 1e-12 * max(1.0, abs(a))


@given(st.floats(0.5, 30), st.floats(-30, 30))
def test_recurrence(x, y):
    z = complex(x, y)
    lhs = complex_log_gamma(z + 1)
    rhs = complex_log_gamma(z) + cmath.log(z)
    # equal modulo 2 pi i
    d = lhs - rhs
    assert abs(d.real) < 1e-11 * max(1.0, abs(lhs))
    assert abs(math.remainder(d.imag, 2 * math.pi)) < 1e-10 * max(1.0, abs(lhs))


def test_pow_trivial():
    assert complex_pow(1.0, 1j) == pytest.approx(1.0)
    assert complex_pow(2.0, 3.0) == pytest.approx(8.0, rel=1e-15)


@given(st.floats(1e-3, 1e3), finite)
def test_pow_unit_modulus(r, y):
    assert abs(complex_pow(r, 1j * y)) == pytest.approx(1.0, rel=1e-14)


def test_pow_zero_base():
    with pytest.raises(ZeroBaseError):
        complex_pow(0.0, 0.5)


@given(
    st.complex_numbers(min_magnitude=1e-2, max_magnitude=1e2, allow_nan=False, allow_infinity=False),
    st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
    st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
)
def test_pow_additivity(b, e1, e2):
    lhs = complex_pow(b, e1 + e2)
    rhs = complex_pow(b, e1) * complex_pow(b, e2)
    assert abs(lhs - rhs) <= 1e-12 * abs(lhs) + 1e-300


def test_gamma_mod_sq_values():
    assert gamma_mod_sq_one_plus_iy(0.0) == 1.0
    assert gamma_mod_sq_one_plus_iy(1.0) == pytest.approx(0.27203, abs=1e-5)
    assert gamma_mod_sq_one_plus_iy(-1.0) == gamma_mod_sq_one_plus_iy(1.0)
    assert gamma_mod_sq_one_plus_iy(1e-9) == pytest.approx(1.0, rel=1e-15)


@given(st.floats(-50, 50))
def test_gamma_mod_sq_even(y):
    assert gamma_mod_sq_one_plus_iy(y) == gamma_mod_sq_one_plus_iy(-y)


@given(st.floats(-20, -1e-3))
def test_log_coulomb_factor_real_part(zeta):
    # |e^{-pi zeta/2} Gamma(1 + i zeta)|^2 = 2 pi zeta / (e^{2 pi zeta} - 1)
    expected = 0.5 * math.log(2 * math.pi * zeta / math.expm1(2 * math.pi * zeta))
    assert complex(log_coulomb_factor(zeta)).real == pytest.approx(expected, rel=1e-12, abs=1e-14)


def test_log_coulomb_factor_large_zeta_stays_finite():
    # product tends to sqrt(2 pi |zeta|) while each factor overflows
    zeta = -1e6
    val = complex(log_coulomb_factor(zeta)).real
    assert val == pytest.approx(0.5 * math.log(2 * math.pi * 1e6), rel=1e-12)
