"""Conversion between SI quantities and the normalized unit system.

Normalized units set omega_p = c = eps0 = hbar = 1.  Lengths are in
c/omega_p, times in 1/omega_p, and a dipole moment p (C m) becomes
p * omega_p / sqrt(hbar eps0 c^3).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import constants as _sc


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = _sc.hbar
    eps0: float = _sc.epsilon_0
    c: float = _sc.c
    debye: float = 1e-21 / _sc.c  # 1 D = 1e-21/c  C m


CONST = PhysicalConstants()


def f0_normalized(gamma_vec, d):
    """Force scale F0 = 3 |gamma|^2 / (16 pi d^4) in normalized units."""
    g2 = float(np.sum(np.abs(np.asarray(gamma_vec, dtype=complex)) ** 2))
    return 3.0 * g2 / (16.0 * np.pi * d**4)


def f0_si(dipole_cm, d_m, const: PhysicalConstants = CONST):
    """F0 = 3 |p|^2 / (16 pi eps0 d^4) in newtons."""
    return 3.0 * dipole_cm**2 / (16.0 * np.pi * const.eps0 * d_m**4)


def dipole_to_normalized(dipole_cm, omega_p, const: PhysicalConstants = CONST):
    """Normalize a dipole moment given in C m for plasma frequency ``omega_p`` (rad/s)."""
    return dipole_cm * omega_p / np.sqrt(const.hbar * const.eps0 * const.c**3)


def debye_to_cm(debye, const: PhysicalConstants = CONST):
    return debye * const.debye


def length_unit(omega_p, const: PhysicalConstants = CONST):
    """c / omega_p in metres."""
    return const.c / omega_p


def force_unit(omega_p, const: PhysicalConstants = CONST):
    """SI value of one normalized force unit, hbar omega_p^2 / c."""
    return const.hbar * omega_p**2 / const.c


def rate_unit(omega_p):
    """SI value (1/s) of one normalized rate unit."""
    return omega_p
