"""Exact (Green-function) forces, Casimir energy and decay rate of a two-level atom.

Conventions
-----------
* ``gamma_vec`` is the normalized transition dipole (see :mod:`gyrocp.units`).
* Forces are returned in units of F0 = 3|gamma|^2/(16 pi d^4) unless a
  function says otherwise; ``ForceResult.f0`` converts back.
* The resonant part is evaluated on the real frequency axis and needs a
  lossy plasma (gamma_coll > 0) to keep the surface-plasmon pole off the
  integration path.
* Spatial derivatives act on the first argument of the Green function and
  are applied analytically inside the spectral integral.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateLevels, DomainError, NegativeRate
from .greens import DEFAULT_SPEC, Channel, HalfSpaceGeometry, field_map, sommerfeld
from .material import PlasmaMaterial
from .quadrature import QuadSpec, integrate_semiinf
from .units import f0_normalized

CASIMIR_SPEC = QuadSpec(rel_tol=1e-7, max_subdivisions=400, decay_scale=1.0)


@dataclass(frozen=True)
class AtomState:
    """Two-level atom: transition dipole, transition frequency and initial population."""

    gamma_vec: np.ndarray
    omega0: float
    rho_ee0: float = 1.0

    def __post_init__(self):
        g = np.asarray(self.gamma_vec, dtype=complex).reshape(3)
        object.__setattr__(self, "gamma_vec", g)
        if not np.any(g != 0):
            raise DomainError("dipole must be non-zero")
        if not (self.omega0 > 0 and np.isfinite(self.omega0)):
            raise DomainError("transition frequency must be positive")
        if not 0.0 <= self.rho_ee0 <= 1.0:
            raise DomainError("rho_ee0 must lie in [0, 1]")

    @property
    def gamma_sq(self) -> float:
        return float(np.sum(np.abs(self.gamma_vec) ** 2))


@dataclass
class ForceResult:
    """Resonant and Casimir forces (F0 units), decay rate and Casimir energy.

    ``energy_cas`` is in normalized energy units (hbar omega_p); ``f0`` is the
    force scale in normalized force units.
    """

    f_res: np.ndarray
    f_cas: np.ndarray
    decay: float
    energy_cas: float
    f0: float
    rho_ee0: float = 1.0
    info: dict = field(default_factory=dict)

    def rho(self, t, rate=None):
        """Excited population rho_ee0 exp(-Gamma t); ``rate`` overrides the computed one."""
        g = self.decay if rate is None else rate
        return self.rho_ee0 * np.exp(-g * t)


def _f0(atom: AtomState, geom: HalfSpaceGeometry) -> float:
    return f0_normalized(atom.gamma_vec, geom.d)


def _sesq(g, m):
    """gamma^* . M . gamma for a stack of matrices."""
    return np.einsum("i,...ij,j->...", g.conj(), m, g)


def _real_axis_checks(mat, atom):
    if mat.gamma_coll <= 0 and not mat.is_vacuum:
        raise DomainError("resonant evaluation on the real axis needs gamma_coll > 0")


def resonant_and_decay(mat: PlasmaMaterial, atom: AtomState, geom: HalfSpaceGeometry,
                       spec: QuadSpec = DEFAULT_SPEC):
    """F_R (F0 units) and decay rate from a single Sommerfeld integration."""
    _real_axis_checks(mat, atom)
    z2 = 2 * geom.d
    chans = [Channel(zsum=z2), Channel(zsum=z2, deriv=("x",)),
             Channel(zsum=z2, deriv=("y",)), Channel(zsum=z2, deriv=("z",))]
    vals, _, _ = sommerfeld(mat, atom.omega0, chans, spec)
    g = atom.gamma_vec
    q = _sesq(g, vals)
    f_res = 2 * q[1:].real / _f0(atom, geom)
    free = atom.gamma_sq * atom.omega0**3 / (3 * np.pi)
    decay = free + 2 * q[0].imag
    if decay < -1e-12 * free:
        raise NegativeRate(f"decay rate {decay:.3e} is negative; integration failed")
    return f_res, max(decay, 0.0)


def resonant_force(mat, atom, geom, spec: QuadSpec = DEFAULT_SPEC) -> np.ndarray:
    """F_R,i = 2 Re{gamma^* . (-i omega d_i G_s) . gamma} at omega0, in F0 units."""
    return resonant_and_decay(mat, atom, geom, spec)[0]


def decay_rate(mat, atom, geom, spec: QuadSpec = DEFAULT_SPEC) -> float:
    """Spontaneous emission rate 2 Im{gamma^* . (-i omega G) . gamma}, free part included."""
    if mat.is_vacuum:
        return atom.gamma_sq * atom.omega0**3 / (3 * np.pi)
    return resonant_and_decay(mat, atom, geom, spec)[1]


def _imag_axis_kernel(mat, xi, d, spec):
    """(M(xi), dM/dd) at r = r0 for xi > 0, both real 3x3."""
    chans = [Channel(zsum=2 * d), Channel(zsum=2 * d, deriv=("d",))]
    vals, _, _ = sommerfeld(mat, 1j * xi, chans, spec)
    return vals.real


def casimir_energy_and_force(mat: PlasmaMaterial, atom: AtomState, geom: HalfSpaceGeometry,
                             spec: QuadSpec = CASIMIR_SPEC, inner: QuadSpec = None,
                             full_axis=False):
    """Casimir energy (normalized units) and normal force (F0 units).

    The frequency integral runs over the whole imaginary axis.  For xi < 0
    the kernel equals the positive-xi kernel of the bias-reversed plasma,
    which makes the two halves equal; by default only xi > 0 is integrated
    and doubled.  ``full_axis=True`` evaluates both halves independently.
    """
    if mat.is_vacuum:
        return 0.0, np.zeros(3)
    if inner is None:
        inner = QuadSpec(rel_tol=spec.rel_tol * 0.1, max_subdivisions=4000)
    g = atom.gamma_vec
    w0 = atom.omega0
    d = geom.d
    # absolute floor for the inner integrals, from a representative frequency
    ref = np.max(np.abs(_imag_axis_kernel(mat, max(w0, 0.5), d, inner)))
    inner = inner.with_tol(abs_tol=1e-3 * inner.rel_tol * ref)

    def half(m):
        def integrand(xis):
            out = np.empty((xis.size, 2), dtype=complex)
            for i, xi in enumerate(xis):
                k = _imag_axis_kernel(m, xi, d, inner)
                out[i] = _sesq(g, k) / (w0 - 1j * xi)
            return out.real
        return integrate_semiinf(integrand, 0.0, spec).value

    if full_axis:
        # xi < 0: substitute xi -> -xi, kernel from the flipped bias, and the
        # pairing of gamma and gamma^* swaps with the denominator
        pos = half(mat)
        gc = g.conj()

        def neg_integrand(xis):
            out = np.empty((xis.size, 2))
            for i, xi in enumerate(xis):
                k = _imag_axis_kernel(mat.flipped(), xi, d, inner)
                a = np.einsum("i,...ij,j->...", gc, k, g) / (w0 + 1j * xi)
                b = np.einsum("i,...ij,j->...", g, k, gc) / (w0 - 1j * xi)
                out[i] = (0.5 * (a + b)).real
            return out

        neg = integrate_semiinf(neg_integrand, 0.0, spec).value
        total = pos + neg
    else:
        total = 2 * half(mat)
    energy = -total[0] / (2 * np.pi)
    dE_dd = -total[1] / (2 * np.pi)
    f_cas = np.array([0.0, 0.0, -dE_dd / _f0(atom, geom)])
    return float(energy), f_cas


def casimir_energy(mat, atom, geom, spec: QuadSpec = CASIMIR_SPEC) -> float:
    """E_C = -(1/4 pi) int dxi tr(alpha(i xi) (-i omega G_s)(i xi)) over the full axis."""
    return casimir_energy_and_force(mat, atom, geom, spec)[0]


def casimir_force(mat, atom, geom, spec: QuadSpec = CASIMIR_SPEC) -> np.ndarray:
    """-grad E_C in F0 units; lateral components vanish identically."""
    return casimir_energy_and_force(mat, atom, geom, spec)[1]


def compute_forces(mat: PlasmaMaterial, atom: AtomState, geom: HalfSpaceGeometry,
                   spec: QuadSpec = DEFAULT_SPEC, casimir_spec: QuadSpec = CASIMIR_SPEC,
                   casimir=True) -> ForceResult:
    """Everything needed for F(t): F_R, F_C, decay rate and E_C."""
    if mat.is_vacuum:
        f_res = np.zeros(3)
        decay = atom.gamma_sq * atom.omega0**3 / (3 * np.pi)
    else:
        f_res, decay = resonant_and_decay(mat, atom, geom, spec)
    if casimir:
        e_c, f_cas = casimir_energy_and_force(mat, atom, geom, casimir_spec)
    else:
        e_c, f_cas = float("nan"), np.full(3, np.nan)
    return ForceResult(f_res, f_cas, decay, e_c, _f0(atom, geom), atom.rho_ee0)


def total_force(fr: ForceResult, t=0.0, rate=None) -> np.ndarray:
    """F(t) = rho(t) F_R + (1 - 2 rho(t)) F_C, F0 units.

    For rho > 1/2 the Casimir term enters with a reversed sign; this is the
    formula as it stands and is not clipped.
    """
    rho = fr.rho(t, rate)
    return rho * np.asarray(fr.f_res) + (1 - 2 * rho) * np.asarray(fr.f_cas)


def lateral_force_field_slope(mat, atom: AtomState, geom: HalfSpaceGeometry, t=0.0,
                              rate=None, spec: QuadSpec = DEFAULT_SPEC, h=None):
    """Lateral resonant force 2 rho Re{gamma^* . dE/dx_alpha} from the scattered field.

    The slope comes from a Richardson-extrapolated fourth-order central
    difference of the field sampled around the atom, an independent route
    to the lateral components of :func:`resonant_force`.  Returns
    (F_x, F_y) in F0 units.  ``rho`` decays with the scenario's own rate
    unless ``rate`` is given.
    """
    _real_axis_checks(mat, atom)
    d = geom.d
    h = 0.04 * d if h is None else h
    steps = (-2, -1, 1, 2)
    pts = []
    for axis in (0, 1):
        for hh in (h, h / 2):
            for s in steps:
                p = np.array([0.0, 0.0, d])
                p[axis] = s * hh
                pts.append(p)
    E = field_map(mat, atom.omega0, geom, atom.gamma_vec, np.array(pts), spec=spec)
    E = E.reshape(2, 2, 4, 3)
    slopes = []
    for axis in (0, 1):
        ders = []
        for j, hh in enumerate((h, h / 2)):
            em2, em1, ep1, ep2 = E[axis, j]
            ders.append((em2 - 8 * em1 + 8 * ep1 - ep2) / (12 * hh))
        slopes.append((16 * ders[1] - ders[0]) / 15)
    if rate is None and t != 0.0:
        rate = decay_rate(mat, atom, geom, spec)
    rho = atom.rho_ee0 * (np.exp(-rate * t) if t else 1.0)
    g = atom.gamma_vec
    f = np.array([2 * rho * np.real(g.conj() @ s) for s in slopes])
    return f / _f0(atom, geom)


@dataclass(frozen=True)
class MultiLevelAtom:
    """Atom with non-degenerate levels and off-diagonal transition dipoles.

    levels : increasing energies (normalized units)
    dipoles : mapping (m, n) -> dipole vector for levels[m] < levels[n]
    populations : array of rho_nn, or a callable t -> array
    """

    levels: tuple
    dipoles: dict
    populations: object

    def __post_init__(self):
        lv = np.asarray(self.levels, dtype=float)
        if np.any(np.diff(lv) <= 0):
            if np.any(np.abs(np.diff(np.sort(lv))) < 1e-12):
                raise DegenerateLevels("levels must be non-degenerate")
            raise DomainError("levels must be strictly increasing")
        for (m, n) in self.dipoles:
            if m == n:
                raise DomainError("diagonal dipole elements are not allowed")
            if not 0 <= m < n < lv.size:
                raise DomainError(f"dipole key {(m, n)} must satisfy 0 <= m < n < {lv.size}")

    def rho_at(self, t):
        p = self.populations(t) if callable(self.populations) else self.populations
        p = np.asarray(p, dtype=float)
        if p.shape != (len(self.levels),):
            raise DomainError("one population per level is required")
        if np.any(p < 0) or p.sum() > 1 + 1e-12:
            raise DomainError("populations must be non-negative with sum <= 1")
        return p


def multilevel_force(mat, mla: MultiLevelAtom, geom: HalfSpaceGeometry, t=0.0,
                     spec: QuadSpec = DEFAULT_SPEC, casimir_spec: QuadSpec = CASIMIR_SPEC):
    """Sum of two-level contributions rho_nn F_R^mn + (rho_mm - rho_nn) F_C^mn.

    Returned in normalized force units (not F0, since every pair has its
    own dipole).
    """
    rho = mla.rho_at(t)
    lv = np.asarray(mla.levels, dtype=float)
    total = np.zeros(3)
    for (m, n), gam in sorted(mla.dipoles.items()):
        gam = np.asarray(gam, dtype=complex)
        if not np.any(gam != 0):
            continue
        w = lv[n] - lv[m]
        if abs(w) < 1e-12:
            raise DegenerateLevels(f"levels {m} and {n} coincide")
        fr = compute_forces(mat, AtomState(gam, w, 1.0), geom, spec, casimir_spec)
        total += fr.f0 * (rho[n] * fr.f_res + (rho[m] - rho[n]) * fr.f_cas)
    return total
