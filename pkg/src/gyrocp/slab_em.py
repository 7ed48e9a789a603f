"""Plane waves at the vacuum / magnetized-plasma interface.

Geometry: vacuum in z > 0, plasma in z < 0, bias along y.  A plane wave
varies as exp(i kx x + i ky y) along the interface.  In the plasma the
two bulk modes decay as exp(gamma_i z) with Re(gamma_i) > 0; in vacuum
the reflected wave goes as exp(-gamma0 z).

Tangential fields are ordered (Ex, Ey) throughout.  An admittance Y maps
(Ex, Ey) to (eta*Hy, -eta*Hx); Y0 belongs to the upgoing vacuum wave and
Yg is minus the admittance of the downgoing plasma wave, so that the
reflection matrix is R = (Y0 + Yg)^-1 (Y0 - Yg).

The scalar functions at the top are the public interface.  The
underscore-prefixed ones take broadcastable arrays and are what the
Green-function integrals call.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateRoots, LightLineSingular, SingularMatrix
from .material import PlasmaMaterial, anisotropy, eval_components

COND_LIMIT = 1e14
# below this |omega_c| / omega_p the two plasma modes are degenerate to
# round-off and the isotropic formulas are exact to machine precision
ISOTROPIC_BIAS = 1e-15


@dataclass(frozen=True)
class TangentialWavevector:
    kx: float
    ky: float

    @property
    def k_par(self) -> float:
        return float(np.hypot(self.kx, self.ky))

    @property
    def theta(self) -> float:
        return float(np.arctan2(self.ky, self.kx))

    @classmethod
    def polar(cls, k_par, theta):
        return cls(k_par * np.cos(theta), k_par * np.sin(theta))


@dataclass(frozen=True)
class BulkModePair:
    """Decay constants and polarization parameters of the two plasma modes."""

    gamma_z: np.ndarray
    delta: np.ndarray
    theta_pol: np.ndarray


# ---------------------------------------------------------------- helpers

def _principal_decay(g2):
    """Square root with Re > 0; on the cut (Re ~ 0) pick Im < 0 (outgoing)."""
    g = np.sqrt(np.asarray(g2, dtype=complex))
    flip = (g.real < 0) | ((np.abs(g.real) <= 1e-14 * np.abs(g)) & (g.imag > 0))
    return np.where(flip, -g, g)


def vacuum_decay(omega, k_par):
    """gamma0 = sqrt(k_par^2 - k0^2) on the physical branch.

    Real positive above the light line, -i*sqrt(k0^2 - k_par^2) below it,
    and for complex omega the root with Re >= 0 continued from the
    evanescent side.
    """
    k0 = complex(omega)
    return _principal_decay(np.asarray(k_par, dtype=float) ** 2 - k0 * k0)


def _inv2(m):
    """Closed-form inverse of a stack of 2x2 matrices plus Frobenius condition."""
    det = m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
    inv = np.empty_like(m)
    inv[..., 0, 0] = m[..., 1, 1]
    inv[..., 1, 1] = m[..., 0, 0]
    inv[..., 0, 1] = -m[..., 0, 1]
    inv[..., 1, 0] = -m[..., 1, 0]
    fro2 = np.sum(np.abs(m) ** 2, axis=(-2, -1))
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = inv / det[..., None, None]
        cond = fro2 / np.abs(det)
    return inv, cond


def _check_cond(cond, what):
    c = np.max(np.where(np.isfinite(cond), cond, np.inf))
    if c > COND_LIMIT:
        raise SingularMatrix(f"{what}: condition number {c:.3g} exceeds {COND_LIMIT:.0e}")


# ------------------------------------------------------------ vector core

def _bulk_roots(et, ea, eg, k0sq, kx, ky, dlt=None):
    """Roots a_i = k0^2 ea - kt_i^2 and b_i = a_i - s of the bulk dispersion.

    ``dlt`` is ea - et (computed in closed form by the caller when the
    medium is nearly isotropic).  Sums and the discriminant are written in
    terms of it so that no O(1) terms cancel; each quadratic takes its
    large-magnitude root directly and the other from the root product.
    Returns (a1, a2, b1, b2, s, q, disc).
    """
    if dlt is None:
        dlt = ea - et
    ky2 = ky * ky
    eg2 = eg * eg
    s = ky2 + k0sq * dlt
    big_s = k0sq * (et * dlt + eg2) + ky2 * (2 * et + dlt)
    big_b = k0sq * (eg2 - et * dlt) + ky2 * dlt
    disc = (ky2 * ky2 * dlt * dlt
            + 2 * ky2 * k0sq * (2 * et * eg2 + eg2 * dlt - et * dlt * dlt)
            + (k0sq * (et * dlt + eg2)) ** 2)
    sq = np.sqrt(disc)
    sign = np.where(np.abs(big_s + sq) >= np.abs(big_s - sq), 1.0, -1.0)
    q = 0.5 * (big_s + sign * sq)
    pa = ea * ky2 * s
    a1 = q / et
    with np.errstate(divide="ignore", invalid="ignore"):
        a2 = np.where(q != 0, pa / q, 0.0)
        b1 = (big_b + sign * sq) / (2 * et)
        b2 = (big_b - sign * sq) / (2 * et)
        pb = -eg2 * k0sq * s / et
        small1 = np.abs(b1) < np.abs(b2)
        b1 = np.where(small1 & (b2 != 0), pb / b2, b1)
        b2 = np.where(~small1 & (b1 != 0), pb / b1, b2)
    return a1, a2, b1, b2, s, q, disc


def _gyro_modes(et, ea, eg, k0, kx, ky, dlt=None):
    """Tangential field columns of the two downgoing plasma modes.

    Returns (gamma1, gamma2, Q, P) with Q[..., :, i] the (Ex, Ey) of mode i
    and P[..., :, i] such that (eta Hy, -eta Hx) = -P Q^-1 (Ex, Ey).  Mode 1
    is scaled by b1 and mode 2 by a2*b2/ky, which removes the ky = 0
    singularity analytically; each column is then normalized to unit
    max-norm.
    """
    k0sq = k0 * k0
    a1, a2, b1, b2, s, q, _ = _bulk_roots(et, ea, eg, k0sq, kx, ky, dlt)
    kx2 = kx * kx
    g1 = _principal_decay(a1 - k0sq * ea + kx2)
    g2 = _principal_decay(a2 - k0sq * ea + kx2)
    kt1 = k0sq * ea - a1
    kt2 = k0sq * ea - a2
    egk = eg * k0sq

    shape = np.broadcast(a1, kx, ky).shape
    Q = np.empty(shape + (2, 2), dtype=complex)
    P = np.empty(shape + (2, 2), dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        # mode 1 (scaled by b1)
        Q[..., 0, 0] = kx * b1 - g1 * egk
        Q[..., 1, 0] = -kt1 * ky * b1 / a1
        P[..., 0, 0] = 1j * eg * k0 * kt1
        P[..., 1, 0] = 1j * ky * k0 * (eg * kx - g1 * ea * b1 / a1)
        # mode 2 (scaled by a2*b2/ky); ra = a2/ky without dividing by ky
        ra = np.where(q != 0, ea * ky * s / q, 0.0)
        Q[..., 0, 1] = (kx * b2 - g2 * egk) * ra
        Q[..., 1, 1] = -kt2 * b2
        P[..., 0, 1] = 1j * eg * k0 * kt2 * ra
        P[..., 1, 1] = 1j * k0 * (eg * kx * a2 - g2 * ea * b2)
    for col in (0, 1):
        nrm = np.max(np.abs(Q[..., :, col]), axis=-1)
        nrm = np.where(nrm > 0, nrm, 1.0)
        Q[..., :, col] /= nrm[..., None]
        P[..., :, col] /= nrm[..., None]
    return g1, g2, Q, P


def _rotation(kx, ky):
    """Columns: in-plane (TM) direction k_hat and TE direction z x k_hat."""
    kp = np.hypot(kx, ky)
    safe = kp > 0
    c = np.where(safe, kx / np.where(safe, kp, 1.0), 1.0)
    s = np.where(safe, ky / np.where(safe, kp, 1.0), 0.0)
    U = np.empty(np.shape(kp) + (2, 2))
    U[..., 0, 0] = c
    U[..., 1, 0] = s
    U[..., 0, 1] = -s
    U[..., 1, 1] = c
    return U


def _diag_rotate(U, d_tm, d_te):
    """U diag(d_tm, d_te) U^T for stacks."""
    D = np.zeros(np.broadcast(d_tm, d_te).shape + (2, 2), dtype=complex)
    D[..., 0, 0] = d_tm
    D[..., 1, 1] = d_te
    return U @ D @ np.swapaxes(U, -1, -2)


def _iso_admittance(eps, k0, kx, ky):
    """Admittance of an isotropic half-space, same convention as Yg."""
    gd = _principal_decay(kx * kx + ky * ky - k0 * k0 * eps)
    y_te = 1j * gd / k0
    y_tm = -1j * k0 * eps / gd
    return _diag_rotate(_rotation(kx, ky), y_tm, y_te)


def _vacuum_admittance(k0, kx, ky, g0):
    """Y0 for given (possibly complex) gamma0; no light-line guard."""
    Y = np.empty(np.broadcast(kx, ky, g0).shape + (2, 2), dtype=complex)
    pref = 1.0 / (1j * k0 * g0)
    Y[..., 0, 0] = pref * (kx * kx - g0 * g0)
    Y[..., 0, 1] = pref * kx * ky
    Y[..., 1, 0] = pref * kx * ky
    Y[..., 1, 1] = pref * (ky * ky - g0 * g0)
    return Y


def effectively_isotropic(mat: PlasmaMaterial) -> bool:
    """True when the bias is too weak to split the plasma modes in double precision."""
    return mat.is_reciprocal or abs(mat.omega_c) <= ISOTROPIC_BIAS * mat.omega_p


class Medium(tuple):
    """(eps_t, eps_a, eps_g) at one frequency plus flags for the special cases."""

    def __new__(cls, mat: PlasmaMaterial, omega):
        c = eval_components(mat, omega)
        self = super().__new__(cls, (complex(c.eps_t), complex(c.eps_a), complex(c.eps_g)))
        self.anisotropy = complex(anisotropy(mat, omega))
        self.isotropic = effectively_isotropic(mat)
        self.vacuum = mat.is_vacuum
        return self


def _gyro_admittance_tm_te(comps, k0, kx, ky, check=False):
    """Yg expressed in the rotated (TM, TE) basis U^T Yg U.

    Working in this basis keeps the TM block accurate when the TE and TM
    admittances differ by many orders of magnitude (small |omega|).
    """
    et, ea, eg = comps
    if comps.isotropic:
        gd = _principal_decay(kx * kx + ky * ky - k0 * k0 * et)
        shape = np.broadcast(kx, ky, gd).shape
        Y = np.zeros(shape + (2, 2), dtype=complex)
        Y[..., 0, 0] = -1j * k0 * et / gd
        Y[..., 1, 1] = 1j * gd / k0
        return Y
    _, _, Q, P = _gyro_modes(et, ea, eg, k0, kx, ky, comps.anisotropy)
    Ut = np.swapaxes(_rotation(kx, ky), -1, -2)
    Qi, cond = _inv2(Ut @ Q)
    if check:
        _check_cond(cond, "mode matrix")
    return (Ut @ P) @ Qi


def _gyro_admittance(comps, k0, kx, ky, check=False):
    U = _rotation(kx, ky)
    return U @ _gyro_admittance_tm_te(comps, k0, kx, ky, check) @ np.swapaxes(U, -1, -2)


def _reflection(comps, k0, kx, ky, g0, check=False):
    """Vectorized R = (Y0 + Yg)^-1 (Y0 - Yg), formed in the (TM, TE) basis."""
    shape = np.broadcast(kx, ky, g0).shape
    if comps.vacuum:
        return np.zeros(shape + (2, 2), dtype=complex)
    Yg = _gyro_admittance_tm_te(comps, k0, kx, ky, check=check)
    Y0 = np.zeros(shape + (2, 2), dtype=complex)
    Y0[..., 0, 0] = -1j * k0 / g0
    Y0[..., 1, 1] = 1j * g0 / k0
    Mi, cond = _inv2(Y0 + Yg)
    if check:
        _check_cond(cond, "Y0 + Yg")
    U = _rotation(kx, ky)
    return U @ (Mi @ (Y0 - Yg)) @ np.swapaxes(U, -1, -2)


# --------------------------------------------------------- public scalars

def bulk_modes(mat: PlasmaMaterial, omega, k: TangentialWavevector) -> BulkModePair:
    """Decay constants gamma_z,i and the polarization parameters Delta_i, theta_i.

    Raises DegenerateRoots when the two gamma_z^2 coincide (for instance in
    the unbiased plasma, where both roots equal k_par^2 - eps k0^2); the
    admittance routines handle that case with the isotropic formula.
    """
    med = Medium(mat, omega)
    et, ea, eg = med
    k0 = complex(omega)
    k0sq = k0 * k0
    a1, a2, b1, b2, s, q, disc = _bulk_roots(et, ea, eg, k0sq, k.kx, k.ky, med.anisotropy)
    gsq = np.array([a1, a2]) - k0sq * ea + k.kx**2
    if abs(gsq[0] - gsq[1]) < 1e-10 * max(abs(gsq[0]), abs(gsq[1])):
        raise DegenerateRoots("bulk decay constants coincide; use the isotropic formulas")
    gam = _principal_decay(gsq)
    a = np.array([a1, a2])
    b = np.array([b1, b2])
    kt2 = k0sq * ea - a
    with np.errstate(divide="ignore", invalid="ignore"):
        theta_pol = -kt2 / a
        delta = 1j * eg * k0sq / b
    return BulkModePair(gam, delta, theta_pol)


def admittance_gyro(mat: PlasmaMaterial, omega, k: TangentialWavevector) -> np.ndarray:
    """Surface admittance Yg of the plasma half-space, (Ex, Ey) ordering."""
    comps = Medium(mat, omega)
    return _gyro_admittance(comps, complex(omega), float(k.kx), float(k.ky), check=True)


def admittance_vacuum(omega, k: TangentialWavevector) -> np.ndarray:
    """Y0 = (1/(i k0 gamma0)) [[kx^2 - gamma0^2, kx ky], [kx ky, ky^2 - gamma0^2]]."""
    k0 = complex(omega)
    g0 = complex(vacuum_decay(k0, k.k_par))
    if abs(g0) < 1e-9 * abs(k0):
        raise LightLineSingular("gamma0 vanishes on the light line")
    return _vacuum_admittance(k0, float(k.kx), float(k.ky), g0)


def reflection_matrix(mat: PlasmaMaterial, omega, k: TangentialWavevector) -> np.ndarray:
    """2x2 matrix mapping incident to reflected tangential E at the interface."""
    k0 = complex(omega)
    g0 = complex(vacuum_decay(k0, k.k_par))
    if abs(g0) < 1e-9 * abs(k0):
        raise LightLineSingular("gamma0 vanishes on the light line")
    comps = Medium(mat, omega)
    return _reflection(comps, k0, float(k.kx), float(k.ky), g0, check=True)


def fresnel_reflection(eps, omega, k: TangentialWavevector) -> np.ndarray:
    """Textbook Fresnel reflection of an isotropic half-space in the (Ex, Ey) basis.

    Written directly from r_s and r_p (the latter defined for H), so it is an
    independent check on the admittance route.  Tangential E of a TM wave
    reflects with -r_p.
    """
    k0 = complex(omega)
    kz1 = 1j * complex(vacuum_decay(k0, k.k_par))
    kz2 = 1j * complex(_principal_decay(k.k_par**2 - k0 * k0 * eps))
    r_s = (kz1 - kz2) / (kz1 + kz2)
    r_p = (eps * kz1 - kz2) / (eps * kz1 + kz2)
    return _diag_rotate(_rotation(np.float64(k.kx), np.float64(k.ky)), -r_p, r_s)
