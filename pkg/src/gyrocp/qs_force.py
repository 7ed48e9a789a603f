"""Quasi-static forces from the surface-plasmon resonances.

When the atom sits much closer to the interface than a wavelength, only
large-k_par surface plasmons matter.  Their frequency omega_theta and
weight a_theta depend on the propagation angle alone, the k_par integral
is elementary, and every force component reduces to an angular integral
in units of F0 = 3|gamma|^2 / (16 pi d^4).

The lateral force comes from the two angles +-theta0 where omega_theta
equals the transition frequency.  The normal force is a principal-value
integral over theta (resonant, excited state) plus a regular integral
(ground-state Casimir-Polder term).  Loss is ignored throughout.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BandEdgeDivergence, NoSolution, OutsideWindow
from .material import PlasmaMaterial
from .spp import a_theta, domega_dtheta, omega_theta, solve_theta0

EDGE_SLOPE = 1e-10


@dataclass(frozen=True)
class PolarizationFactors:
    """Angular coupling of a dipole to the surface plasmon travelling along theta.

    gamma_plus and gamma_minus lie in [0, 2].  ``g_factor`` is the
    symmetric average of gamma_plus over +-theta, the quantity that scales
    the lateral force when theta is the resonance angle theta0.
    """

    gamma_plus: float
    gamma_minus: float
    g_factor: float


def _unit(gamma_vec):
    g = np.asarray(gamma_vec, dtype=complex)
    if g.shape != (3,):
        raise ValueError("gamma_vec must have three components")
    n = np.sqrt(np.sum(np.abs(g) ** 2))
    if not n > 0:
        raise ValueError("gamma_vec must be non-zero")
    return g / n


def _gamma_pm(g, theta):
    """Gamma_{+,theta} and Gamma_{-,theta} for a unit vector g (vectorized in theta)."""
    th = np.asarray(theta, dtype=float)
    proj = -1j * (np.cos(th) * g[0] + np.sin(th) * g[1]) - g[2]
    proj_c = -1j * (np.cos(th) * np.conj(g[0]) + np.sin(th) * np.conj(g[1])) - np.conj(g[2])
    return np.abs(proj) ** 2, np.abs(proj_c) ** 2


def polarization_factors(gamma_vec, theta) -> PolarizationFactors:
    """Coupling factors for dipole ``gamma_vec`` and plasmon direction ``theta``.

    Gamma_{+,theta} = |(-i k_hat - z_hat) . gamma|^2 / |gamma|^2 with
    k_hat = (cos theta, sin theta, 0).  Gamma_{-,theta} uses conj(gamma).
    No complex conjugation enters the dot product itself.
    """
    g = _unit(gamma_vec)
    gp, gm = _gamma_pm(g, theta)
    gp_neg, _ = _gamma_pm(g, -float(theta))
    return PolarizationFactors(float(gp), float(gm), float(0.5 * (gp + gp_neg)))


def _rho(atom, rho_ee):
    return atom.rho_ee0 if rho_ee is None else float(rho_ee)


def _resonance_angle(mat, omega0):
    """theta0 >= 0, or None when the transition misses the band."""
    try:
        th0, _ = solve_theta0(mat, omega0)
    except NoSolution:
        return None
    slope = abs(float(domega_dtheta(mat, th0)))
    if slope < EDGE_SLOPE:
        raise BandEdgeDivergence(
            f"omega0 = {omega0} sits on a band edge (|d omega/d theta| = {slope:.3g}); "
            "the quasi-static force diverges there")
    return th0


def qs_lateral_force(mat: PlasmaMaterial, atom, geom=None, rho_ee=None) -> np.ndarray:
    """Lateral force (F_x, F_y) / F0 from the resonant plasmons at +-theta0.

    Outside [omega_-, omega_+] there is no resonant plasmon and the result
    is exactly zero.  On a band edge the force diverges and
    BandEdgeDivergence is raised.  ``geom`` is accepted for symmetry with
    the exact path; the normalized force does not depend on d.
    """
    rho = _rho(atom, rho_ee)
    th0 = _resonance_angle(mat, atom.omega0)
    if th0 is None:
        return np.zeros(2)
    g = _unit(atom.gamma_vec)
    gp, _ = _gamma_pm(g, th0)
    gn, _ = _gamma_pm(g, -th0)
    w = float(omega_theta(mat, th0))
    a = float(a_theta(mat, th0))
    weight = -rho * w * a / abs(float(domega_dtheta(mat, th0)))
    return np.array([weight * np.cos(th0) * 0.5 * (gp + gn),
                     weight * np.sin(th0) * 0.5 * (gp - gn)])


def _pv_periodic(f, poles, residues, rel_tol=1e-11, n_start=256, n_max=1 << 20):
    """Principal value of the 2 pi periodic integral of f with simple poles.

    Each pole theta_r with residue c_r is removed by subtracting
    c_r * cot((theta - theta_r)/2) / 2, whose principal value over a period
    vanishes.  The smooth remainder is integrated with the trapezoid rule on
    a grid shifted away from the poles, doubling until it settles.
    """
    poles = np.asarray(poles, dtype=float)
    residues = np.asarray(residues, dtype=float)

    def remainder(th):
        out = f(th)
        for p, c in zip(poles, residues):
            out = out - c * 0.5 / np.tan(0.5 * (th - p))
        return out

    def rule(n):
        h = 2 * np.pi / n
        best, best_gap = 0.5, -1.0
        for shift in (0.5, 0.25, 0.75, 0.125, 0.375, 0.625, 0.875):
            nodes = h * (np.arange(n) + shift)
            if poles.size:
                dist = np.abs(np.angle(np.exp(1j * (nodes[:, None] - poles[None, :]))))
                gap = dist.min()
            else:
                gap = np.inf
            if gap > best_gap:
                best, best_gap = shift, gap
        nodes = h * (np.arange(n) + best)
        vals = remainder(nodes)
        return h * np.sum(vals), h * np.sum(np.abs(vals))

    n = n_start
    prev, _ = rule(n)
    while n < n_max:
        n *= 2
        cur, scale = rule(n)
        if abs(cur - prev) <= rel_tol * max(scale, 1e-300):
            return cur
        prev = cur
    return prev


def casimir_qs(mat: PlasmaMaterial, atom) -> float:
    """Ground-state Casimir-Polder force / F0 in the quasi-static limit (always negative)."""
    g = _unit(atom.gamma_vec)
    w0 = float(atom.omega0)

    def f(th):
        _, gm = _gamma_pm(g, th)
        w = omega_theta(mat, th)
        return a_theta(mat, th) * w * gm / (w + w0)

    return -_pv_periodic(f, [], []) / (2 * np.pi)


def _resonant_pv(mat, atom) -> float:
    """(1/2 pi) PV integral of a_theta omega_theta Gamma_+ / (omega_theta - omega0)."""
    g = _unit(atom.gamma_vec)
    w0 = float(atom.omega0)

    def f(th):
        gp, _ = _gamma_pm(g, th)
        w = omega_theta(mat, th)
        return a_theta(mat, th) * w * gp / (w - w0)

    if mat.omega_c == 0.0:
        if abs(w0 - float(omega_theta(mat, 0.0))) <= 1e-12 * w0:
            raise BandEdgeDivergence("unbiased plasma with omega0 on the surface-plasmon resonance")
        th0 = None
    else:
        th0 = _resonance_angle(mat, w0)
    poles, res = [], []
    if th0 is not None:
        poles = [th0, -th0]
        for p in poles:
            gp, _ = _gamma_pm(g, p)
            res.append(float(a_theta(mat, p)) * w0 * float(gp) / float(domega_dtheta(mat, p)))
    return _pv_periodic(f, poles, res) / (2 * np.pi)


def qs_normal_components(mat: PlasmaMaterial, atom):
    """Resonant and Casimir parts (F_R,z, F_C,z) / F0 in the quasi-static limit.

    They combine as rho F_R + (1 - 2 rho) F_C, the same bookkeeping as the
    exact path.
    """
    f_cas = casimir_qs(mat, atom)
    return f_cas - _resonant_pv(mat, atom), f_cas


def qs_normal_force(mat: PlasmaMaterial, atom, geom=None, rho_ee=None) -> float:
    """Normal force F_z / F0 for excited-state population ``rho_ee``.

    The excited-state part is a principal-value theta integral with poles
    at +-theta0; the ground-state part is the Casimir-Polder term.  With
    ``rho_ee`` omitted the atom's initial population is used.
    """
    rho = _rho(atom, rho_ee)
    f_cas = casimir_qs(mat, atom)
    if rho == 0.0:
        return f_cas
    return -rho * _resonant_pv(mat, atom) + (1.0 - rho) * f_cas


def _omega_spp(mat):
    return mat.omega_p / np.sqrt(2.0)


def _window(mat, omega0):
    """Signed detuning from omega_spp and the squared half-width difference."""
    det = float(omega0) - _omega_spp(mat)
    half = 0.5 * abs(mat.omega_c)
    gap = half * half - det * det
    if abs(gap) <= 1e-12 * max(half * half, det * det, 1e-300):
        raise BandEdgeDivergence(f"omega0 = {omega0} is on a weak-bias band edge")
    return det, gap


def weak_bias_lateral(mat: PlasmaMaterial, atom, rho_ee=None) -> float:
    """Small-omega_c limit of F_x / F0 for a z-directed dipole.

    Valid inside the window |omega0 - omega_spp| < |omega_c|/2 and raises
    OutsideWindow elsewhere, where the lateral force is zero.
    """
    rho = _rho(atom, rho_ee)
    det, gap = _window(mat, atom.omega0)
    if gap < 0:
        raise OutsideWindow(
            f"|omega0 - omega_spp| = {abs(det):.6g} exceeds |omega_c|/2 = {abs(mat.omega_c) / 2:.6g}")
    return float(-rho * (_omega_spp(mat) / mat.omega_c) * det / np.sqrt(gap))


def weak_bias_normal(mat: PlasmaMaterial, atom, rho_ee=None) -> float:
    """Small-omega_c limit of F_z / F0 for a z-directed dipole.

    Inside the resonance window only the ground-state term
    -(1 - rho) omega_spp / (2 (omega_spp + omega0)) survives.  Outside it
    the excited state adds a resonant term whose sign is that of
    omega0 - omega_spp.  Cross-checks against the full quasi-static
    integral support |omega_c| <= 0.1 omega_p.
    """
    rho = _rho(atom, rho_ee)
    ws = _omega_spp(mat)
    w0 = float(atom.omega0)
    cas = -0.5 * ws / (ws + w0)
    if mat.omega_c == 0.0:
        det = w0 - ws
        if abs(det) <= 1e-12 * ws:
            raise BandEdgeDivergence("unbiased plasma with omega0 on the surface-plasmon resonance")
        gap = -det * det
    else:
        det, gap = _window(mat, w0)
    out = (1.0 - rho) * cas
    if gap < 0:
        out += -rho * 0.5 * ws * np.sign(-det) / np.sqrt(-gap)
    return float(out)


def orientation_average_g(mat: PlasmaMaterial, omega0, n: int = 16) -> float:
    """Average of g_factor over real dipole orientations uniform on the sphere.

    Product rule: Gauss-Legendre in cos(beta) times the trapezoid rule in
    the azimuth.  The integrand is a quadratic form in the direction, so
    the rule is exact up to round-off.
    """
    th0 = _resonance_angle(mat, omega0)
    if th0 is None:
        raise NoSolution(f"omega0 = {omega0} has no resonant plasmon")
    mu, wmu = np.polynomial.legendre.leggauss(n)
    phi = 2 * np.pi * np.arange(2 * n) / (2 * n)
    st = np.sqrt(1 - mu * mu)
    ux = st[:, None] * np.cos(phi)[None, :]
    uy = st[:, None] * np.sin(phi)[None, :]
    uz = np.broadcast_to(mu[:, None], ux.shape)
    g = 0.0
    for th in (th0, -th0):
        g = g + 0.5 * ((np.cos(th) * ux + np.sin(th) * uy) ** 2 + uz ** 2)
    return float(np.sum(wmu[:, None] * g) / (2 * 2 * n))
