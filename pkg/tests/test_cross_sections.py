import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from compton_xsec.constants import ALPHA, to_au
from compton_xsec.cross_sections import (
    FDCS_PREFACTOR,
    CrossSectionSample,
    Units,
    convert_units,
    fdcs,
    fdcs_values,
)
from compton_xsec.kinematics import HYDROGEN, POSITRONIUM, KinematicInput, TMode
from compton_xsec.scans import binary_geometry, scan_fdcs_vs_phi1

from conftest import OMEGA_5KEV, rel

E27 = to_au(27.2, "eV")


def point(E, theta, phi1, Phi, mode=TMode.FIXED_UNITY):
    return KinematicInput(OMEGA_5KEV, E, theta, phi1, Phi, mode)


def test_alpha_fourth():
    assert ALPHA ** 4 == pytest.approx(0.28e-8, rel=0.02)
    assert FDCS_PREFACTOR == pytest.approx(ALPHA ** 4 / (8 * math.pi ** 3), rel=1e-15)


@pytest.mark.parametrize("target", [POSITRONIUM, HYDROGEN])
def test_forward_scattering_zero(target):
    assert fdcs(target, point(E27, 0.0, 0.5, 1.0)).value == 0.0


def test_positronium_vanishes_at_low_energy():
    vals = [fdcs(POSITRONIUM, point(to_au(e, "eV"), math.pi / 2, math.pi / 4, math.pi)).value
            for e in (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    # roughly linear in p1
    assert vals[-1] < 2e-2 * vals[0]


def test_hydrogen_tends_to_constant():
    vals = [fdcs(HYDROGEN, point(to_au(e, "eV"), math.pi / 2, math.pi / 4, math.pi)).value
            for e in (1e-4, 1e-5, 1e-8)]
    assert vals[0] > 0
    assert rel(vals[0], vals[1]) < 0.02
    # p1 = 0 uses the analytic limit
    zero = fdcs(HYDROGEN, point(0.0, math.pi / 2, math.pi / 4, math.pi)).value
    assert rel(vals[2], zero) < 1e-3


@given(st.floats(1e-4, 4.0), st.floats(0, math.pi), st.floats(0, math.pi),
       st.floats(0, 2 * math.pi, exclude_max=True), st.sampled_from([POSITRONIUM, HYDROGEN]),
       st.sampled_from([TMode.FIXED_UNITY, TMode.FULL]))
def test_non_negative_and_vectorised(E, theta, phi1, Phi, target, mode):
    eps = 1e-3 if target is POSITRONIUM else 0.0
    s = fdcs(target, point(E, theta, phi1, Phi, mode), epsilon=eps)
    assert s.value >= 0
    arr = fdcs_values(target, OMEGA_5KEV, E, np.array([theta, theta]), phi1, Phi, eps, mode)
    assert arr[0] == pytest.approx(s.value, rel=1e-13, abs=1e-300)


def test_sample_metadata():
    s = fdcs(POSITRONIUM, point(E27, 1.0, 0.5, 1.0), epsilon=0.01)
    assert s.units is Units.ATOMIC
    assert s.quantity == "FDCS"
    assert s.kinematics["E_e"] == E27
    assert s.extra["epsilon"] == 0.01
    with pytest.raises(ValueError):
        CrossSectionSample(-1.0, Units.ATOMIC, {}, POSITRONIUM)
    with pytest.raises(ValueError):
        fdcs(POSITRONIUM, point(E27, 1.0, 0.5, 1.0), epsilon=-1.0)


def test_unit_conversion():
    s = CrossSectionSample(1.0, Units.ATOMIC, {}, POSITRONIUM)
    assert convert_units(s, "cm2").value == pytest.approx(1.03e-18, rel=1e-15)
    barn = convert_units(CrossSectionSample(2.84e-9, Units.ATOMIC, {}, POSITRONIUM), Units.BARN_PER_EV_SR2)
    assert barn.value == pytest.approx(0.29e-2, rel=0.01)


@given(st.floats(0, 1e6), st.sampled_from(list(Units)))
def test_unit_round_trip(x, unit):
    s = CrossSectionSample(x, Units.ATOMIC, {}, HYDROGEN, error_estimate=0.1 * x)
    back = convert_units(convert_units(s, unit), Units.ATOMIC)
    assert back.value == pytest.approx(x, rel=1e-12)
    assert back.error_estimate == pytest.approx(0.1 * x, rel=1e-12)


@pytest.mark.parametrize("theta_deg", [60.0, 90.0])
def test_binary_peak_position(theta_deg):
    theta = math.radians(theta_deg)
    recs = scan_fdcs_vs_phi1(POSITRONIUM, OMEGA_5KEV, E27, theta, math.pi, 721)
    best = max(recs, key=lambda r: r.value)
    assert abs(best.coordinates[0] - (math.pi / 2 - theta / 2)) <= math.radians(2.0)


def test_recoil_peak_in_positronium_only():
    phi1 = np.linspace(0, math.pi, 361)
    ps = fdcs_values(POSITRONIUM, OMEGA_5KEV, E27, math.pi / 3, phi1, 0.0)
    h = fdcs_values(HYDROGEN, OMEGA_5KEV, E27, math.pi / 3, phi1, 0.0)
    back = phi1 > math.radians(90)
    i_ps = np.argmax(np.where(back, ps, -1.0))
    # interior local maximum for Ps in the backward half
    assert 0 < i_ps < len(phi1) - 1 and ps[i_ps] > ps[i_ps - 1] and ps[i_ps] > ps[i_ps + 1]
    # hydrogen has a local minimum at the same place
    j = np.argmin(np.abs(phi1 - phi1[i_ps]))
    window = h[j - 10:j + 11]
    assert h[j] <= window.min() * (1 + 1e-2)
    binary = fdcs_values(POSITRONIUM, OMEGA_5KEV, E27, math.pi / 3, math.pi / 3, math.pi)
    assert binary / ps[i_ps] > 1e3


def test_binary_geometry_full_mode_is_consistent():
    theta = 1.2
    phi1, Phi = binary_geometry(POSITRONIUM, OMEGA_5KEV, 0.9, theta, TMode.FULL)
    from compton_xsec.kinematics import resolve
    r = resolve(POSITRONIUM, KinematicInput(OMEGA_5KEV, 0.9, theta, float(phi1), Phi, TMode.FULL))
    assert r.cos_beta == pytest.approx(1.0, abs=1e-12)
