"""Magnetized-plasma (gyrotropic) permittivity.

Frequencies are in units of the plasma frequency of the reference
material; complex frequencies are accepted everywhere, so the real axis,
the loss-regularized resonance and the imaginary axis share one code path.
The bias field points along +y when ``omega_c > 0``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

_POLE_FLOOR = 1e-300


@dataclass(frozen=True)
class PlasmaMaterial:
    """Drude plasma with a static magnetic bias along y.

    omega_p : plasma frequency (1.0 in the normalized unit system; 0 gives vacuum)
    omega_c : signed cyclotron frequency, the sign encodes the bias direction
    gamma_coll : collision rate, must be non-negative
    """

    omega_p: float = 1.0
    omega_c: float = 0.0
    gamma_coll: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.omega_p) or self.omega_p < 0:
            raise DomainError(f"omega_p must be finite and >= 0, got {self.omega_p}")
        if not np.isfinite(self.omega_c):
            raise DomainError(f"omega_c must be finite, got {self.omega_c}")
        if not np.isfinite(self.gamma_coll) or self.gamma_coll < 0:
            raise DomainError(f"gamma_coll must be >= 0, got {self.gamma_coll}")

    @property
    def is_vacuum(self) -> bool:
        return self.omega_p == 0.0

    @property
    def is_reciprocal(self) -> bool:
        return self.omega_c == 0.0 or self.is_vacuum

    def flipped(self) -> "PlasmaMaterial":
        """Same plasma with the bias reversed."""
        return PlasmaMaterial(self.omega_p, -self.omega_c, self.gamma_coll)

    def lossless(self) -> "PlasmaMaterial":
        return PlasmaMaterial(self.omega_p, self.omega_c, 0.0)


@dataclass(frozen=True)
class PermittivityComponents:
    """Relative permittivity scalars (eps_t, eps_a, eps_g); arrays broadcast."""

    eps_t: complex
    eps_a: complex
    eps_g: complex


def _check_poles(*denominators):
    for den in denominators:
        if np.any(np.abs(den) < _POLE_FLOOR):
            raise DomainError("frequency sits exactly on a pole of the plasma response")


def eval_components(mat: PlasmaMaterial, omega) -> PermittivityComponents:
    """Evaluate eps_t, eps_a, eps_g of the lossy magnetized plasma at ``omega``.

    ``omega`` may be a complex scalar or array.  Raises DomainError when a
    denominator vanishes (omega = 0, or the lossless cyclotron pole).
    """
    w = np.asarray(omega, dtype=complex)
    if mat.is_vacuum:
        one = np.ones_like(w)
        return PermittivityComponents(one, one.copy(), np.zeros_like(w))
    wp2 = mat.omega_p**2
    wc = mat.omega_c
    u = w + 1j * mat.gamma_coll
    den_t = u * u - wc * wc
    den_a = w * u
    _check_poles(w, den_t, den_a)
    eps_t = 1.0 - wp2 * (1.0 + 1j * mat.gamma_coll / w) / den_t
    eps_a = 1.0 - wp2 / den_a
    eps_g = -(wc * wp2) / (w * den_t)
    return PermittivityComponents(eps_t, eps_a, eps_g)


def dispersive_derivatives(mat: PlasmaMaterial, omega):
    """Return d(omega*eps_t)/domega, d(omega*eps_a)/domega, d(omega*eps_g)/domega.

    These enter the energy normalization of the electrostatic surface modes.
    """
    w = np.asarray(omega, dtype=complex)
    if mat.is_vacuum:
        one = np.ones_like(w)
        return one, one.copy(), np.zeros_like(w)
    wp2 = mat.omega_p**2
    wc2 = mat.omega_c**2
    u = w + 1j * mat.gamma_coll
    den = u * u - wc2
    _check_poles(u, den)
    d_t = 1.0 + wp2 * (u * u + wc2) / den**2
    d_a = 1.0 + wp2 / (u * u)
    d_g = 2.0 * u * mat.omega_c * wp2 / den**2
    return d_t, d_a, d_g


def anisotropy(mat: PlasmaMaterial, omega):
    """eps_a - eps_t evaluated without cancellation.

    Equals (omega_p^2/omega) * omega_c^2 / (u (u^2 - omega_c^2)), u = omega + i Gamma,
    which stays accurate when both components are close to one.
    """
    w = np.asarray(omega, dtype=complex)
    if mat.is_vacuum or mat.omega_c == 0.0:
        return np.zeros_like(w)
    u = w + 1j * mat.gamma_coll
    den = u * (u * u - mat.omega_c**2)
    _check_poles(w, den)
    return mat.omega_p**2 * mat.omega_c**2 / (w * den)


def assemble_tensor(c: PermittivityComponents) -> np.ndarray:
    """Build eps/eps0 = eps_t I_t + eps_a yy + i eps_g (y x I); shape (..., 3, 3)."""
    et, ea, eg = np.broadcast_arrays(
        np.asarray(c.eps_t, dtype=complex),
        np.asarray(c.eps_a, dtype=complex),
        np.asarray(c.eps_g, dtype=complex),
    )
    out = np.zeros(et.shape + (3, 3), dtype=complex)
    out[..., 0, 0] = et
    out[..., 2, 2] = et
    out[..., 1, 1] = ea
    out[..., 0, 2] = 1j * eg
    out[..., 2, 0] = -1j * eg
    return out


def permittivity_tensor(mat: PlasmaMaterial, omega) -> np.ndarray:
    return assemble_tensor(eval_components(mat, omega))
