import numpy as np
from hypothesis import given, strategies as st

from gyrocp.units import (CONST, debye_to_cm, dipole_to_normalized, f0_normalized, f0_si,
                          force_unit, length_unit, rate_unit)


def test_debye():
    assert np.isclose(debye_to_cm(1.0), 3.33564e-30, rtol=1e-5)


def test_length_unit_terahertz_plasma():
    wp = 2 * np.pi * 4.9e12
    assert np.isclose(length_unit(wp), 9.7374e-6, rtol=1e-4)
    assert rate_unit(wp) == wp


@given(st.floats(1e12, 1e16), st.floats(0.1, 1e4), st.floats(1e-9, 1e-4))
def test_force_scale_round_trip(wp, debye, d_m):
    p = debye_to_cm(debye)
    g = dipole_to_normalized(p, wp)
    d = d_m / length_unit(wp)
    via_normalized = f0_normalized([0, 0, g], d) * force_unit(wp)
    assert np.isclose(via_normalized, f0_si(p, d_m), rtol=1e-12)


def test_f0_uses_full_dipole_norm():
    g = np.array([1 + 1j, 0.5, -2j])
    assert np.isclose(f0_normalized(g, 0.1), f0_normalized([0, 0, np.linalg.norm(g)], 0.1))


def test_normalized_dipole_is_dimensionless_energy_ratio():
    # gamma^2 / (length unit)^3 = p^2 / (eps0 (c/wp)^3) measured in hbar wp
    wp, p = 1e14, 1e-29
    g = dipole_to_normalized(p, wp)
    ratio = p ** 2 / (CONST.eps0 * length_unit(wp) ** 3) / (CONST.hbar * wp)
    assert np.isclose(g ** 2, ratio)
