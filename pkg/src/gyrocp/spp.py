"""Surface plasmons of the magnetized-plasma interface.

Quasi-static theory: for k_par >> omega/c the surface-plasmon frequency
depends only on the propagation angle theta (measured from x, the bias
being along y),

    omega_theta = (omega_c/2) cos(theta) + sqrt(omega_p^2/2 + (omega_c^2/4)(1 + sin^2 theta)),

and fills the band [omega_-, omega_+].  The exact, retarded dispersion is
obtained from the boundary-condition determinant at real frequency for a
lossless plasma.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import BandEdgeDivergence, BranchLost, DomainError, NoSolution
from .material import PlasmaMaterial, dispersive_derivatives, eval_components
from .slab_em import Medium, effectively_isotropic, _gyro_admittance_tm_te, _gyro_modes, _principal_decay


@dataclass(frozen=True)
class SppResonance:
    omega_theta: float
    theta: float
    omega_plus: float
    omega_minus: float


@dataclass(frozen=True)
class QsMode:
    """Quasi-static mode normalization, independent of k_par.

    a_theta : k_par |A|^2 eps0, the weight entering the force formulas
    lambda_val : Lambda / k_par^2
    k_tilde : k_tilde / k_par
    """

    a_theta: float
    lambda_val: float
    k_tilde: float


def omega_theta(mat: PlasmaMaterial, theta):
    """Quasi-static SPP resonance at propagation angle ``theta`` (vectorized)."""
    th = np.asarray(theta, dtype=float)
    wc = mat.omega_c
    root = np.sqrt(mat.omega_p**2 / 2 + (wc * wc / 4) * (1 + np.sin(th) ** 2))
    return (wc / 2) * np.cos(th) + root


def domega_dtheta(mat: PlasmaMaterial, theta):
    """Angular derivative of omega_theta."""
    th = np.asarray(theta, dtype=float)
    wc = mat.omega_c
    root = np.sqrt(mat.omega_p**2 / 2 + (wc * wc / 4) * (1 + np.sin(th) ** 2))
    return -(wc / 2) * np.sin(th) + (wc * wc / 4) * np.sin(th) * np.cos(th) / root


def band_edges(mat: PlasmaMaterial):
    """(omega_-, omega_+) = (-|omega_c| + sqrt(2 omega_p^2 + omega_c^2)) / 2 and the + analogue."""
    wc = abs(mat.omega_c)
    r = np.sqrt(2 * mat.omega_p**2 + wc * wc)
    return 0.5 * (r - wc), 0.5 * (r + wc)


def resonance(mat: PlasmaMaterial, theta) -> SppResonance:
    lo, hi = band_edges(mat)
    return SppResonance(float(omega_theta(mat, theta)), float(theta), hi, lo)


def solve_theta0(mat: PlasmaMaterial, omega0, rtol=1e-13):
    """Angles +-theta0 (theta0 in [0, pi]) where omega_theta equals ``omega0``.

    omega_theta is strictly monotone in cos(theta), so the root is bracketed
    in cos(theta) on [-1, 1] and refined by bisection.  Raises NoSolution
    outside the band; in the unbiased case every angle resonates at
    omega_p/sqrt(2), which is reported as BandEdgeDivergence.
    """
    lo, hi = band_edges(mat)
    w0 = float(omega0)
    if mat.omega_c == 0.0:
        if abs(w0 - lo) <= 1e-12 * lo:
            raise BandEdgeDivergence("unbiased plasma: the whole SPP band collapses onto omega0")
        raise NoSolution(f"omega0 = {w0} differs from the unbiased resonance {lo}")
    tol = 1e-12 * hi
    if w0 < lo - tol or w0 > hi + tol:
        raise NoSolution(f"omega0 = {w0} outside the SPP band [{lo}, {hi}]")

    def g(c):
        return float(omega_theta(mat, np.arccos(c))) - w0

    ga, gb = g(-1.0), g(1.0)
    if ga == 0.0:
        c = -1.0
    elif gb == 0.0:
        c = 1.0
    elif np.sign(ga) == np.sign(gb):
        # omega0 within round-off of a band edge
        c = -1.0 if abs(ga) < abs(gb) else 1.0
    else:
        c = brentq(g, -1.0, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    th0 = float(np.arccos(np.clip(c, -1.0, 1.0)))
    return th0, -th0


def _lossless(mat):
    return mat if mat.gamma_coll == 0 else mat.lossless()


def _qs_norm_arrays(mat, theta):
    m = _lossless(mat)
    th = np.asarray(theta, dtype=float)
    w = omega_theta(m, th)
    c = eval_components(m, w)
    et, ea = np.real(c.eps_t), np.real(c.eps_a)
    d_t, d_a, d_g = (np.real(x) for x in dispersive_derivatives(m, w))
    kx, ky = np.cos(th), np.sin(th)
    kt2 = kx * kx + (ea / et) * ky * ky
    if np.any(kt2 < 0):
        raise DomainError("k_tilde^2 < 0: the quasi-static surface mode is not bound at this angle")
    kt = np.sqrt(kt2)
    lam = d_t * (kt2 + kx * kx) + d_a * ky * ky + d_g * 2 * kx * kt
    a = 2.0 / (1.0 + lam / (2.0 * kt))
    return a, lam, kt


def a_theta(mat: PlasmaMaterial, theta):
    """Vectorized quasi-static weight a_theta (see :func:`qs_mode_norm`)."""
    return _qs_norm_arrays(mat, theta)[0]


def qs_mode_norm(mat: PlasmaMaterial, theta) -> QsMode:
    """Normalization weight a_theta = 2 k / (k + Lambda / (2 k_tilde)) of the quasi-static SPP.

    Everything is evaluated for a lossless plasma at omega_theta.  At zero
    bias a_theta is exactly 1/2.
    """
    a, lam, kt = _qs_norm_arrays(mat, float(theta))
    return QsMode(float(a), float(lam), float(kt))


def qs_dispersion_residual(mat: PlasmaMaterial, theta):
    """k + kx eps_g + k_tilde eps_t at omega_theta with k = 1 (zero on the resonance)."""
    m = _lossless(mat)
    w = float(omega_theta(m, theta))
    c = eval_components(m, w)
    et, ea, eg = (float(np.real(x)) for x in (c.eps_t, c.eps_a, c.eps_g))
    kx, ky = np.cos(theta), np.sin(theta)
    kt = np.sqrt(kx * kx + (ea / et) * ky * ky)
    return 1.0 + kx * eg + kt * et


# ----------------------------------------------------------- exact dispersion

def _bound_check(omega, k_par):
    if not k_par > abs(omega):
        raise DomainError("bound surface modes need k_par > omega/c")


def spp_det(mat: PlasmaMaterial, omega, k_par, theta) -> complex:
    """Determinant of the 4x4 tangential-field matching system.

    Rows: Ex, Ey and the two tangential magnetic components; unknowns are
    the two plasma-mode amplitudes and the two vacuum amplitudes.  The
    plasma columns use the regularized mode fields (finite at ky = 0), so
    the determinant differs from the textbook form by a non-vanishing
    factor and has the same zeros.
    """
    w = float(omega)
    _bound_check(w, k_par)
    med = Medium(_lossless(mat), w)
    et, ea, eg = med
    k0 = complex(w)
    kx, ky = k_par * np.cos(theta), k_par * np.sin(theta)
    g0 = np.sqrt(k_par**2 - w * w)
    M = np.zeros((4, 4), dtype=complex)
    if med.isotropic:
        raise DomainError("use the isotropic dispersion for an unbiased plasma")
    _, _, Q, P = _gyro_modes(et, ea, eg, k0, np.float64(kx), np.float64(ky), med.anisotropy)
    M[0, :2] = Q[0]
    M[1, :2] = Q[1]
    M[2, :2] = k0 * P[1]
    M[3, :2] = -k0 * P[0]
    M[:, 2] = [ky, -kx, 1j * kx * g0, 1j * ky * g0]
    M[:, 3] = [1j * kx * g0 / k0, 1j * ky * g0 / k0, -ky * k0, kx * k0]
    return complex(np.linalg.det(M))


def admittance_det(mat: PlasmaMaterial, omega, k_par, theta) -> float:
    """det(Y0 + Yg) in the (TM, TE) basis, scaled to be O(1).

    For a lossless plasma and a bound mode Y0 + Yg is anti-Hermitian, so the
    determinant is real; its zeros are the surface-plasmon frequencies.
    """
    w = float(omega)
    _bound_check(w, k_par)
    med = Medium(_lossless(mat), w)
    kx, ky = np.float64(k_par * np.cos(theta)), np.float64(k_par * np.sin(theta))
    g0 = np.sqrt(k_par**2 - w * w)
    Y = _gyro_admittance_tm_te(med, complex(w), kx, ky).copy()
    Y[0, 0] += -1j * w / g0
    Y[1, 1] += 1j * g0 / w
    # row scaling by the vacuum admittances makes the entries O(1)
    Y[0] *= g0 / w
    Y[1] *= w / g0
    return float(np.real(np.linalg.det(Y)))


def _bulk_evanescent(mat, omega, k_par, theta):
    """True when both plasma modes decay (no leakage into the bulk)."""
    med = Medium(mat, omega)
    et, ea, eg = med
    kx, ky = k_par * np.cos(theta), k_par * np.sin(theta)
    g1, g2, _, _ = _gyro_modes(et, ea, eg, complex(omega), np.float64(kx), np.float64(ky),
                               med.anisotropy)
    return min(abs(g1.real), abs(g2.real)) > 1e-9 * k_par


def isotropic_spp_k(omega, mat: PlasmaMaterial):
    """k_par = omega sqrt(eps/(eps+1)) of the lossless unbiased plasma."""
    eps = 1 - mat.omega_p**2 / float(omega) ** 2
    return float(omega) * np.sqrt(eps / (eps + 1))


def _roots_in(mat, k_par, theta, lo, hi, n=200):
    """All verified roots of the admittance determinant in (lo, hi)."""
    if effectively_isotropic(mat):
        f = lambda w: _iso_residual(mat, w, k_par)
    else:
        f = lambda w: admittance_det(mat, w, k_par, theta)
    ws = np.linspace(lo, hi, n)
    vals = []
    for w in ws:
        try:
            vals.append(f(w) if _bulk_evanescent(mat, w, k_par, theta) else np.nan)
        except (DomainError, FloatingPointError, ZeroDivisionError):
            vals.append(np.nan)
    vals = np.asarray(vals)
    roots = []
    for i in range(n - 1):
        a, b = vals[i], vals[i + 1]
        if not (np.isfinite(a) and np.isfinite(b)) or np.sign(a) == np.sign(b):
            continue
        r = brentq(f, ws[i], ws[i + 1], xtol=1e-14, rtol=1e-13, maxiter=200)
        # a sign change through a pole is not a root: |f| must shrink there
        fr = abs(f(r))
        if fr <= 1e-6 * max(abs(a), abs(b)) or fr < 1e-9:
            roots.append(r)
    return roots


def _iso_residual(mat, w, k_par):
    """TM surface-mode condition eps gamma0 + gamma_d = 0 (scaled)."""
    eps = 1 - mat.omega_p**2 / (w * w)
    g0 = np.sqrt(k_par**2 - w * w)
    gd = np.sqrt(k_par**2 - w * w * eps)
    return (eps * g0 + gd) / k_par


def _continue(m, theta, k_from, w_from, k_to, window, n, depth=0):
    """Follow a root from (k_from, w_from) to k_to, halving the step when needed."""
    top = min(1.2 * band_edges(m)[1], k_to * (1 - 1e-9))
    lo, hi = w_from * (1 - window), min(w_from * (1 + window), top)
    roots = _roots_in(m, k_to, theta, lo, hi, n) if hi > lo else []
    if roots:
        return min(roots, key=lambda x: abs(x - w_from))
    if depth >= 8:
        return None
    k_mid = 0.5 * (k_from + k_to)
    w_mid = _continue(m, theta, k_from, w_from, k_mid, window, n, depth + 1)
    if w_mid is None:
        return None
    return _continue(m, theta, k_mid, w_mid, k_to, window, n, depth + 1)


def solve_spp_dispersion(mat: PlasmaMaterial, theta, k_grid, window=0.05, n_scan=200):
    """Exact lossless SPP frequency along a branch at fixed angle.

    The first grid point is searched over the whole bound region below
    1.2 omega_+ and takes the root closest to omega_theta.  Each later
    point is searched within +-``window`` of the previous root; when that
    fails the k step is subdivided and the branch followed through the
    intermediate points.  A point that still has no bracketed root gets
    NaN (a gap marker) and the next point restarts from the last good root.
    """
    m = _lossless(mat)
    k_grid = np.asarray(k_grid, dtype=float)
    _, hi_band = band_edges(m)
    wt = float(omega_theta(m, theta))
    out = np.full(k_grid.size, np.nan)
    prev = None
    for i, k in enumerate(k_grid):
        if prev is None:
            top = min(1.2 * hi_band, k * (1 - 1e-9))
            roots = _roots_in(m, k, theta, 1e-3, top, max(n_scan, 400)) if top > 1e-3 else []
            r = min(roots, key=lambda x: abs(x - wt)) if roots else None
        else:
            r = _continue(m, theta, prev[0], prev[1], k, window, max(n_scan // 4, 20))
        if r is None:
            continue
        out[i] = r
        prev = (k, r)
    return out


def spp_branch_point(mat, theta, k_par, guess=None, window=0.05):
    """Single exact SPP root near ``guess`` (default omega_theta); raises BranchLost."""
    m = _lossless(mat)
    g = float(omega_theta(m, theta)) if guess is None else float(guess)
    top = min(1.2 * band_edges(m)[1], k_par * (1 - 1e-9))
    roots = _roots_in(m, k_par, theta, g * (1 - window), min(g * (1 + window), top), 100)
    if not roots:
        raise BranchLost(f"no SPP root near {g:.6g} at k_par={k_par}, theta={theta}")
    return min(roots, key=lambda x: abs(x - g))
