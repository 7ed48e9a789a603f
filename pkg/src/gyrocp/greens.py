"""Electric Green dyadic above the plasma half-space.

Every matrix returned here is ``(-i omega) G_EE`` in normalized units
(omega_p = c = eps0 = 1), i.e. the field radiated by a unit dipole.

The scattered part is a Sommerfeld integral over the tangential
wavevector.  Instead of integrating over k_par (which has an inverse
square-root singularity at the light line) the radial variable is the
vacuum decay constant gamma0 = sqrt(k_par^2 - k0^2):

* evanescent waves: gamma0 in [0, inf), k dk / (2 gamma0) = d gamma0 / 2
* propagating waves (real omega only): gamma0 = -i q, q in [0, k0],
  k dk / (2 gamma0) = (i/2) dq

On the imaginary frequency axis omega = i xi every wave is evanescent
and gamma0 runs over [|xi|, inf).  The angle is integrated with the
periodic trapezoid rule.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CoincidentPoints, DomainError, ImagPartTooLarge, ToleranceNotMet
from .material import PlasmaMaterial
from .quadrature import QuadSpec, integrate_polar
from .slab_em import Medium, TangentialWavevector, _reflection, vacuum_decay

DEFAULT_SPEC = QuadSpec(rel_tol=1e-9, max_subdivisions=4000)


@dataclass(frozen=True)
class HalfSpaceGeometry:
    """Atom at r0 = (0, 0, d) above the interface z = 0."""

    d: float

    def __post_init__(self):
        if not (np.isfinite(self.d) and self.d > 0):
            raise DomainError(f"atom height must be positive, got {self.d}")

    @property
    def r0(self) -> np.ndarray:
        return np.array([0.0, 0.0, self.d])


@dataclass(frozen=True)
class Channel:
    """One requested output of the Sommerfeld integral.

    ``rho`` is the lateral separation r - r', ``zsum`` is z + z', and
    ``deriv`` lists derivatives with respect to the first argument among
    'x', 'y', 'z' (or 'd' for moving both points together along z).
    """

    rho: tuple = (0.0, 0.0)
    zsum: float = 1.0
    deriv: tuple = ()


def c_tensor_batch(comps, k0, kx, ky, g0):
    """C = L R Rt on broadcast arrays; shape (..., 3, 3)."""
    R = _reflection(comps, k0, kx, ky, g0)
    shape = R.shape[:-2]
    with np.errstate(divide="ignore", invalid="ignore"):
        L = np.zeros(shape + (3, 2), dtype=complex)
        L[..., 0, 0] = 1.0
        L[..., 1, 1] = 1.0
        L[..., 2, 0] = 1j * kx / g0
        L[..., 2, 1] = 1j * ky / g0
    Rt = np.empty(shape + (2, 3), dtype=complex)
    k0sq = k0 * k0
    Rt[..., 0, 0] = k0sq - kx * kx
    Rt[..., 0, 1] = -kx * ky
    Rt[..., 1, 0] = -kx * ky
    Rt[..., 1, 1] = k0sq - ky * ky
    Rt[..., 0, 2] = 1j * g0 * kx
    Rt[..., 1, 2] = 1j * g0 * ky
    return L @ R @ Rt


def c_tensor(mat: PlasmaMaterial, omega, k: TangentialWavevector) -> np.ndarray:
    """Plane-wave coupling tensor C for one tangential wavevector."""
    k0 = complex(omega)
    g0 = complex(vacuum_decay(k0, k.k_par))
    comps = Medium(mat, omega)
    # go through the checked public route first so singular cases raise
    from .slab_em import reflection_matrix
    reflection_matrix(mat, omega, k)
    return c_tensor_batch(comps, k0, np.float64(k.kx), np.float64(k.ky), g0)


def _factor(ch: Channel, kx, ky, g0):
    """Spectral multiplier of one channel: phase, decay and derivatives."""
    f = np.exp(1j * (kx * ch.rho[0] + ky * ch.rho[1]) - g0 * ch.zsum)
    for d in ch.deriv:
        if d == "x":
            f = f * (1j * kx)
        elif d == "y":
            f = f * (1j * ky)
        elif d == "z":
            f = f * (-g0)
        elif d == "d":
            f = f * (-2 * g0)
        else:
            raise ValueError(f"unknown derivative {d!r}")
    return f


def _make_integrand(comps, k0, channels, branch):
    """Integrand f(u, theta) -> (n, m, nch, 3, 3) for the given radial branch."""
    k0sq = k0 * k0
    pref = 1.0 / (2.0 * (2 * np.pi) ** 2)
    if branch == "propagating":
        pref = pref * 1j

    def f(u, theta):
        u = np.asarray(u, dtype=float)[:, None]
        if branch == "propagating":
            g0 = -1j * u
            kpar = np.sqrt(np.maximum((k0sq - u * u).real, 0.0))
        else:
            g0 = u + 0j
            kpar = np.sqrt(np.maximum((u * u + k0sq).real, 0.0))
        kx = kpar * np.cos(theta)[None, :]
        ky = kpar * np.sin(theta)[None, :]
        g0b = np.broadcast_to(g0, kx.shape)
        C = c_tensor_batch(comps, k0, kx, ky, g0b)
        out = np.empty(kx.shape + (len(channels), 3, 3), dtype=complex)
        for i, ch in enumerate(channels):
            out[..., i, :, :] = (pref * _factor(ch, kx, ky, g0b))[..., None, None] * C
        # far tail: exp(-gamma0 zsum) underflows while C grows polynomially
        bad = ~np.isfinite(out)
        if np.any(bad):
            out[bad] = 0.0
        return out

    return f


def sommerfeld(mat: PlasmaMaterial, omega, channels, spec: QuadSpec = DEFAULT_SPEC,
               strict=True):
    """Integrate the scattered spectral kernel for several channels at once.

    Returns (values (nch, 3, 3), error estimate, converged flag).  ``omega``
    must be real and positive (then the material needs loss to keep the
    surface-plasmon pole off the path) or purely imaginary.
    """
    omega = complex(omega)
    nch = len(channels)
    if mat.is_vacuum:
        return np.zeros((nch, 3, 3), dtype=complex), 0.0, True
    comps = Medium(mat, omega)
    zmin = min(ch.zsum for ch in channels)
    if zmin <= 0:
        raise DomainError("observation and source must both lie above the interface")
    spec_ev = QuadSpec(abs_tol=spec.abs_tol, rel_tol=spec.rel_tol,
                       max_subdivisions=spec.max_subdivisions,
                       decay_scale=1.0 / zmin, max_angle_points=spec.max_angle_points)

    if omega.real == 0.0 and omega.imag != 0.0:
        xi = abs(omega.imag)
        k0 = 1j * omega.imag
        res = integrate_polar(_make_integrand(comps, k0, channels, "evanescent"),
                              spec_ev, k_min=xi, strict=False)
        if strict and not res.converged:
            raise ToleranceNotMet("Sommerfeld integral did not converge", estimate=res.value,
                                  error=res.error)
        return res.value, res.error, res.converged

    if omega.imag != 0.0 or omega.real <= 0.0:
        raise DomainError("frequency must be real positive or purely imaginary")
    if not mat.gamma_coll > 0:
        raise DomainError("real frequencies need gamma_coll > 0 to keep the plasmon pole "
                          "off the integration path")
    k0 = omega.real
    ev = integrate_polar(_make_integrand(comps, k0, channels, "evanescent"),
                         spec_ev, k_min=0.0, strict=False)
    pr = integrate_polar(_make_integrand(comps, k0, channels, "propagating"),
                         spec_ev, k_min=0.0, k_max=k0, strict=False)
    value = ev.value + pr.value
    ok = ev.converged and pr.converged
    err = ev.error + pr.error
    if strict and not ok:
        raise ToleranceNotMet("Sommerfeld integral did not converge", estimate=value, error=err)
    return value, err, ok


def green_scattered(mat: PlasmaMaterial, omega, geom: HalfSpaceGeometry, r, rp,
                    spec: QuadSpec = DEFAULT_SPEC) -> np.ndarray:
    """Scattered part of (-i omega) G_EE(r, r') for z, z' > 0.

    ``geom`` is accepted for interface symmetry; the points are explicit.
    """
    r = np.asarray(r, dtype=float)
    rp = np.asarray(rp, dtype=float)
    if r[2] <= 0 or rp[2] <= 0:
        raise DomainError("both points must satisfy z > 0")
    ch = Channel(rho=(r[0] - rp[0], r[1] - rp[1]), zsum=r[2] + rp[2])
    val, _, _ = sommerfeld(mat, omega, [ch], spec)
    return val[0]


def green_free(omega, r, rp) -> np.ndarray:
    """Vacuum dyadic (grad grad + k0^2) exp(i k0 R)/(4 pi R)."""
    rv = np.asarray(r, dtype=float) - np.asarray(rp, dtype=float)
    dist = float(np.linalg.norm(rv))
    if dist < 1e-12:
        raise CoincidentPoints("free-space dyadic is singular at coinciding points")
    k = complex(omega)
    rh = rv / dist
    outer = np.outer(rh, rh)
    if k == 0:
        return (3 * outer - np.eye(3)) / (4 * np.pi * dist**3)
    kr = k * dist
    phi = np.exp(1j * kr) / (4 * np.pi * dist)
    a = (1 + 1j / kr - 1 / kr**2) * k * k
    b = (-1 - 3j / kr + 3 / kr**2) * k * k
    return phi * (a * np.eye(3) + b * outer)


def free_space_ldos(omega) -> float:
    """Im (-i omega) G_EE,0 at coincidence: k0^3 / (6 pi) times the identity."""
    return float(np.real(omega)) ** 3 / (6 * np.pi)


def field_map(mat: PlasmaMaterial, omega, geom: HalfSpaceGeometry, gamma_vec, points,
              part="scattered", spec: QuadSpec = DEFAULT_SPEC) -> np.ndarray:
    """Field of the dipole ``gamma_vec`` at r0 sampled on ``points`` (shape (n, 3)).

    All scattered samples share one adaptive Sommerfeld integration.  With
    ``part='total'`` the vacuum dipole field is added (points must then
    avoid r0).
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if np.any(pts[:, 2] <= 0):
        raise DomainError("field points must lie above the interface")
    gam = np.asarray(gamma_vec, dtype=complex)
    r0 = geom.r0
    chans = [Channel(rho=(p[0], p[1]), zsum=p[2] + geom.d) for p in pts]
    vals, _, _ = sommerfeld(mat, omega, chans, spec)
    E = vals @ gam
    if part == "total":
        E = E + np.array([green_free(omega, p, r0) @ gam for p in pts])
    elif part != "scattered":
        raise ValueError("part must be 'scattered' or 'total'")
    return E


def green_imag_axis(mat: PlasmaMaterial, xi, geom: HalfSpaceGeometry,
                    spec: QuadSpec = DEFAULT_SPEC, deriv=()) -> np.ndarray:
    """Real matrix (-i omega) G_EE,s at omega = i xi and r = r' = r0.

    Negative ``xi`` is evaluated at |xi| with the bias reversed, which is the
    physical continuation for a gyrotropic medium; by generalized
    reciprocity the result equals the transpose of the positive-xi matrix.
    ``deriv=('d',)`` gives the derivative with respect to the atom height.
    """
    xi = float(xi)
    if xi == 0.0:
        raise DomainError("xi must be non-zero")
    m = mat if xi > 0 else mat.flipped()
    ch = Channel(zsum=2 * geom.d, deriv=tuple(deriv))
    val, _, _ = sommerfeld(m, 1j * abs(xi), [ch], spec)
    val = val[0]
    nrm = np.max(np.abs(val))
    if nrm > 0 and np.max(np.abs(val.imag)) > 1e-8 * nrm:
        raise ImagPartTooLarge(
            f"imaginary residue {np.max(np.abs(val.imag)) / nrm:.2e} of the norm")
    return val.real


__all__ = [
    "HalfSpaceGeometry", "Channel", "c_tensor", "c_tensor_batch", "sommerfeld",
    "green_scattered", "green_free", "free_space_ldos", "field_map", "green_imag_axis",
    "DEFAULT_SPEC",
]
