import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from compton_xsec.constants import C_LIGHT, to_au
from compton_xsec.errors import DegenerateGeometryError
from compton_xsec.kinematics import (
    HYDROGEN,
    POSITRONIUM,
    KinematicInput,
    Target,
    TargetKind,
    TMode,
    kinematic_arrays,
    min_mu_squared,
    momentum_vectors,
    mu_squared_form_a,
    mu_squared_form_b,
    resolve,
    resonance_energy,
)

from conftest import OMEGA_3KEV, OMEGA_5KEV, binary_phi1

angles = st.floats(0.0, math.pi)
azimuths = st.floats(0.0, 2 * math.pi, exclude_max=True)
energies = st.floats(1e-6, 5.0)


def point(E_e, theta, phi1, Phi, omega=OMEGA_5KEV, t_mode=TMode.FIXED_UNITY):
    return KinematicInput(omega, E_e, theta, phi1, Phi, t_mode)


def test_targets():
    assert POSITRONIUM.Z == 0.5 and POSITRONIUM.eps0 == -0.125
    assert HYDROGEN.Z == 1.0 and HYDROGEN.eps0 == -0.5
    assert Target.from_name("ps") is POSITRONIUM or Target.from_name("ps") == POSITRONIUM
    assert Target.from_name("H").kind is TargetKind.HYDROGEN
    with pytest.raises(ValueError):
        Target.from_name("helium")
    with pytest.raises(ValueError):
        Target(TargetKind.HYDROGEN, -1.0, -0.5)


@pytest.mark.parametrize("bad", [
    dict(omega_i=0.0), dict(E_e=-1.0), dict(theta=4.0), dict(phi1=-0.1), dict(Phi=2 * math.pi),
])
def test_input_validation(bad):
    kw = dict(omega_i=1.0, E_e=1.0, theta=1.0, phi1=1.0, Phi=1.0)
    kw.update(bad)
    with pytest.raises(ValueError):
        KinematicInput(**kw)


def test_k_at_5kev():
    r = resolve(POSITRONIUM, point(1.0, 1.0, 1.0, 1.0))
    assert r.k_i == pytest.approx(1.34122, abs=1e-5)


def test_forward_scattering_has_no_transfer():
    r = resolve(POSITRONIUM, point(1.0, 0.0, 0.3, 1.0))
    assert r.Q == 0.0
    with pytest.raises(DegenerateGeometryError):
        r.cos_gamma


@given(angles, angles)
def test_coplanar_cos_chi(theta, phi1):
    r = resolve(HYDROGEN, point(1.0, theta, phi1, 0.0))
    assert r.cos_chi == pytest.approx(math.cos(theta - phi1), abs=1e-14)


def test_full_mode_t_hydrogen():
    r = resolve(HYDROGEN, point(1.0, 1.0, 1.0, 1.0, t_mode=TMode.FULL))
    assert r.t == pytest.approx(1.0 - 1.5 / 183.747, abs=1e-6)
    assert r.t == pytest.approx(0.99184, abs=1e-5)


def test_full_mode_t_positronium_includes_recoil():
    inp = point(1.0, 1.0, 0.4, 1.0, t_mode=TMode.FULL)
    r = resolve(POSITRONIUM, inp)
    k, p1 = r.k_i, r.p1
    recoil = 0.5 * (k * k - 2 * k * p1 * math.cos(0.4) + p1 * p1)
    assert r.t == pytest.approx(1.0 - (0.5 * p1 * p1 + 0.125 + recoil) / OMEGA_5KEV, rel=1e-14)


@given(energies, angles, angles, azimuths, st.sampled_from([TMode.FIXED_UNITY, TMode.FULL]))
def test_scalars_match_vectors(E_e, theta, phi1, Phi, mode):
    inp = point(E_e, theta, phi1, Phi, t_mode=mode)
    r = resolve(POSITRONIUM, inp)
    _, k_f, p1, Q = momentum_vectors(inp, r.t)
    assert r.Q == pytest.approx(np.linalg.norm(Q), rel=1e-12, abs=1e-14)
    assert r.q_dot_p1 == pytest.approx(Q @ p1, rel=1e-10, abs=1e-12)
    assert r.p_rho == pytest.approx(np.linalg.norm(p1 - 0.5 * Q), rel=1e-8, abs=1e-7)
    # p_rho^2 + Q.p1 - p1^2 - Q^2/4 = 0 by construction
    assert r.p_rho ** 2 + r.q_dot_p1 - r.p1 ** 2 - r.Q ** 2 / 4 == pytest.approx(0.0, abs=1e-12)


@given(energies, angles, angles, azimuths)
def test_mu_squared_forms_agree(E_e, theta, phi1, Phi):
    inp = point(E_e, theta, phi1, Phi)
    r = resolve(POSITRONIUM, inp)
    a = mu_squared_form_a(r, inp)
    b = mu_squared_form_b(r.p1 / r.k_i, theta, phi1, Phi, r.k_i)
    assert a == pytest.approx(b, rel=1e-10, abs=1e-13)
    assert b >= 0.0


def test_mu_vanishes_on_binary_resonance():
    theta = 1.1
    E = resonance_energy(OMEGA_5KEV, theta)
    inp = point(E, theta, binary_phi1(theta), math.pi)
    r = resolve(POSITRONIUM, inp)
    assert mu_squared_form_a(r, inp) == pytest.approx(0.0, abs=1e-14)
    assert mu_squared_form_b(math.sin(theta / 2), theta, binary_phi1(theta), math.pi, r.k_i) == pytest.approx(0.0, abs=1e-15)
    assert r.cos_gamma == -1.0


def test_backscatter_condition():
    # phi1 = 0, theta = pi, p1 = k gives mu = 0
    k = OMEGA_3KEV / C_LIGHT
    inp = KinematicInput(OMEGA_3KEV, 0.5 * k * k, math.pi, 0.0, 0.0)
    r = resolve(POSITRONIUM, inp)
    assert mu_squared_form_a(r, inp) == pytest.approx(0.0, abs=1e-14)


def test_p1_zero_gives_quarter_q_squared():
    inp = point(0.0, 1.3, 0.2, 0.4)
    r = resolve(POSITRONIUM, inp)
    assert mu_squared_form_a(r, inp) == pytest.approx(r.Q ** 2 / 4, rel=1e-14)


@given(st.floats(1e-3, 3.0), st.floats(1e-3, math.pi), st.floats(1e-3, math.pi - 1e-3))
def test_in_plane_same_side_is_positive(g, theta, phi1):
    assert mu_squared_form_b(g, theta, phi1, 0.0, 1.3) > 0.0


@given(st.floats(0.0, math.pi))
def test_cos_beta_binary_form(theta):
    phi1 = 0.7
    r = resolve(POSITRONIUM, point(1.0, theta, phi1, math.pi))
    if r.Q > 1e-10:
        assert r.cos_beta == pytest.approx(math.sin(phi1 + theta / 2), abs=1e-12)


def test_resonance_energy_values():
    assert resonance_energy(OMEGA_5KEV, 0.0) == 0.0
    # 0.89944 when k is first rounded to 1.34122
    assert resonance_energy(OMEGA_5KEV, math.pi) == pytest.approx(0.89944, abs=2e-5)
    assert to_au(24.47, "eV") == pytest.approx(resonance_energy(OMEGA_5KEV, math.pi), rel=2e-4)
    assert resonance_energy(OMEGA_3KEV, math.pi) == pytest.approx(0.32379, abs=2e-5)


def test_no_resonance_above_threshold():
    k = OMEGA_5KEV / C_LIGHT
    E = 0.5 * (1.05 * k) ** 2
    g = math.sqrt(2 * E) / k
    th, ph1, Ph = np.meshgrid(np.linspace(0, math.pi, 41), np.linspace(0, math.pi, 41),
                              np.linspace(0, 2 * math.pi, 41), indexing="ij")
    assert np.min(mu_squared_form_b(g, th, ph1, Ph, k)) > 1e-4


def test_min_mu_squared_below_and_above():
    lo, angles = min_mu_squared(OMEGA_5KEV, to_au(20.0, "eV"), phi1=None)
    assert lo < 1e-10
    hi, _ = min_mu_squared(OMEGA_5KEV, to_au(25.0, "eV"), phi1=None)
    assert hi > 1e-6


def test_kinematic_arrays_broadcast():
    a = kinematic_arrays(POSITRONIUM, OMEGA_5KEV, 1.0, np.linspace(0, 1, 5)[:, None],
                         np.linspace(0, 1, 3)[None, :], 0.0)
    assert np.broadcast(a["Q"], a["p_rho"]).shape == (5, 3)
