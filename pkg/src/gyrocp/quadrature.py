"""Adaptive quadrature for smooth, possibly sharply peaked, complex integrands.

All integrands are *vectorized*: they receive a 1-D array of abscissae and
return an array whose leading axis matches it (trailing axes are allowed,
so 3x3 Green tensors integrate in a single pass).

The 1-D engine is a globally adaptive Gauss-Kronrod (7, 15) scheme that
bisects every panel whose local error is close to the worst one, so each
round costs one batched integrand call.  The polar engine wraps it around
a periodic trapezoid rule in the angle.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ToleranceNotMet

# Kronrod 15-point nodes (non-negative half) and weights; the Gauss
# 7-point rule uses the odd-indexed nodes.  Values from QUADPACK (qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])          # 15 nodes, ascending
_KW = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GW = np.zeros(15)
_GW[1:7:2] = _WG[:3]
_GW[7] = _WG[3]
_GW[9:15:2] = _WG[2::-1]


@dataclass(frozen=True)
class QuadSpec:
    """Tolerances and budget for the adaptive integrators.

    ``max_subdivisions`` caps the number of panels kept by the 1-D engine;
    ``decay_scale`` sets the length scale of the semi-infinite map.
    ``max_angle_points`` caps the periodic trapezoid grid of the polar engine.
    """

    abs_tol: float = 0.0
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000
    decay_scale: float = 1.0
    max_angle_points: int = 2**15

    def __post_init__(self):
        if not (self.abs_tol > 0 or self.rel_tol > 0):
            raise ValueError("need abs_tol > 0 or rel_tol > 0")
        if self.abs_tol < 0 or self.rel_tol < 0:
            raise ValueError("tolerances must be non-negative")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if not self.decay_scale > 0:
            raise ValueError("decay_scale must be positive")

    def with_tol(self, rel_tol=None, abs_tol=None) -> "QuadSpec":
        return QuadSpec(
            abs_tol=self.abs_tol if abs_tol is None else abs_tol,
            rel_tol=self.rel_tol if rel_tol is None else rel_tol,
            max_subdivisions=self.max_subdivisions,
            decay_scale=self.decay_scale,
            max_angle_points=self.max_angle_points,
        )


@dataclass(frozen=True)
class QuadResult:
    value: object
    error: float
    neval: int
    converged: bool


def _norm(v):
    """Max-abs norm over trailing axes, shape (n_panels,)."""
    v = np.abs(v)
    if v.ndim == 1:
        return v
    return v.reshape(v.shape[0], -1).max(axis=1)


def _gk_panels(f, lo, hi):
    """Apply G7-K15 on every panel [lo_i, hi_i] with one call of f."""
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = (mid[:, None] + half[:, None] * _NODES[None, :]).ravel()
    fx = np.asarray(f(x))
    if fx.shape[0] != x.size:
        raise ValueError("integrand must return an array whose first axis matches its input")
    fx = fx.reshape((lo.size, 15) + fx.shape[1:])
    kron = np.tensordot(_KW, fx, axes=([0], [1])) if fx.ndim > 2 else fx @ _KW
    gauss = np.tensordot(_GW, fx, axes=([0], [1])) if fx.ndim > 2 else fx @ _GW
    scale = half.reshape((-1,) + (1,) * (kron.ndim - 1))
    kron = kron * scale
    gauss = gauss * scale
    resabs = np.abs(half) * (_norm(fx.reshape(fx.shape[0] * 15, -1)).reshape(lo.size, 15) @ _KW)
    return kron, _norm(kron - gauss), resabs, x.size


def _finish(total, err, neval, ok, strict, what):
    if not ok and strict:
        raise ToleranceNotMet(
            f"{what}: tolerance not met (error estimate {err:.3g})", estimate=total, error=err
        )
    return QuadResult(total, float(err), int(neval), bool(ok))


def integrate_1d(f, a, b, spec: QuadSpec = QuadSpec(), points=None, strict=True) -> QuadResult:
    """Integrate a vectorized ``f`` over [a, b] adaptively.

    Parameters
    ----------
    f : callable
        ``f(x)`` with ``x`` of shape (n,) returns shape (n,) or (n, ...).
    a, b : float
        Finite limits, ``a < b``.
    spec : QuadSpec
    points : sequence of float, optional
        Interior break points (e.g. known peak locations) used to seed panels.
    strict : bool
        Raise ToleranceNotMet on budget exhaustion; otherwise return the
        best estimate with ``converged=False``.
    """
    a = float(a)
    b = float(b)
    if not a < b:
        raise ValueError(f"need a < b, got [{a}, {b}]")
    edges = [a]
    if points is not None:
        edges += sorted(p for p in np.atleast_1d(points) if a < p < b)
    edges.append(b)
    edges = np.unique(np.asarray(edges, dtype=float))
    lo, hi = edges[:-1], edges[1:]

    vals, errs, absv, neval = _gk_panels(f, lo, hi)
    while True:
        total = vals.sum(axis=0)
        err = errs.sum()
        # round-off floor: a cancelling integrand cannot beat eps * int|f|
        tol = max(spec.abs_tol, spec.rel_tol * float(np.max(np.abs(total))),
                  50 * np.finfo(float).eps * absv.sum())
        if err <= tol:
            return _finish(total, err, neval, True, strict, "integrate_1d")
        # bisect the panels that carry most of the error
        split = errs > 0.25 * errs.max()
        if lo.size + int(split.sum()) > spec.max_subdivisions:
            return _finish(total, err, neval, False, strict, "integrate_1d")
        mid = 0.5 * (lo[split] + hi[split])
        if np.any(mid <= lo[split]) or np.any(mid >= hi[split]):
            # panels too small to split further in floating point
            return _finish(total, err, neval, False, strict, "integrate_1d")
        nlo = np.concatenate([lo[split], mid])
        nhi = np.concatenate([mid, hi[split]])
        nv, ne, na, n = _gk_panels(f, nlo, nhi)
        neval += n
        keep = ~split
        lo = np.concatenate([lo[keep], nlo])
        hi = np.concatenate([hi[keep], nhi])
        vals = np.concatenate([vals[keep], nv])
        errs = np.concatenate([errs[keep], ne])
        absv = np.concatenate([absv[keep], na])


def semiinf_map(a, scale):
    """Return (x(t), dx/dt) for the map x = a + scale*t/(1-t), t in [0, 1)."""
    def x_of(t):
        return a + scale * t / (1.0 - t)

    def jac(t):
        return scale / (1.0 - t) ** 2

    return x_of, jac


def integrate_semiinf(f, a, spec: QuadSpec = QuadSpec(), points=None, strict=True) -> QuadResult:
    """Integrate ``f`` over [a, inf) through x = a + s t/(1-t), s = spec.decay_scale.

    ``f`` must decay fast enough that f(x)*dx/dt -> 0 as t -> 1; values that
    come back non-finite for astronomically large x are treated as zero.
    """
    s = spec.decay_scale
    x_of, jac = semiinf_map(float(a), s)

    def g(t):
        x = x_of(t)
        fx = np.asarray(f(x))
        j = jac(t).reshape((-1,) + (1,) * (fx.ndim - 1))
        out = fx * j
        bad = ~np.isfinite(out)
        if np.any(bad):
            far = (x > a + 1e6 * s).reshape((-1,) + (1,) * (fx.ndim - 1))
            if np.any(bad & ~np.broadcast_to(far, bad.shape)):
                raise FloatingPointError("integrand returned non-finite values")
            out = np.where(bad, 0.0, out)
        return out

    tpts = None
    if points is not None:
        p = np.asarray(points, dtype=float)
        p = p[p > a]
        tpts = (p - a) / (p - a + s)
    return integrate_1d(g, 0.0, 1.0, spec, points=tpts, strict=strict)


_CHUNK_POINTS = 1 << 15


def _angle_sums(f, x, theta):
    """Sum of f(x, theta) over theta, plus the mean of |f|, evaluated in row blocks.

    Only the sums are kept, so memory stays bounded however fine the
    angle grid becomes.
    """
    rows = max(1, _CHUNK_POINTS // max(theta.size, 1))
    sums, absm = [], []
    for i in range(0, x.size, rows):
        fx = np.asarray(f(x[i:i + rows], theta))
        sums.append(fx.sum(axis=1))
        absm.append(_norm(np.abs(fx).mean(axis=1)))
    return np.concatenate(sums, axis=0), np.concatenate(absm)


def periodic_trapezoid(f, x, spec: QuadSpec = QuadSpec(), n_start=16):
    """Integrate a 2*pi-periodic function of angle for every row of ``x``.

    ``f(x, theta)`` gets ``x`` of shape (n,) and ``theta`` of shape (m,) and
    must return shape (n, m, ...).  Rows are refined independently by
    doubling until successive estimates agree.  A row whose successive
    differences stop shrinking while already below sqrt(rel_tol) of its
    value is accepted: it has reached the round-off level of the integrand.

    Returns
    -------
    value : array (n, ...)
        Integral over one period.
    converged : bool
    n_points : int
        Largest number of angle samples used by any row.
    abs_integral : array (n,)
        Coarse estimate of the integral of |f| (max over trailing axes),
        useful as a round-off scale for an enclosing integral.
    """
    x = np.asarray(x, dtype=float)
    n = n_start
    theta = 2 * np.pi * np.arange(n) / n
    sums, absm = _angle_sums(f, x, theta)
    result = sums * (2 * np.pi / n)
    absf = absm * 2 * np.pi
    absf_max = float(absf.max()) if absf.size else 0.0
    prev = np.full(x.size, np.inf)
    active = np.arange(x.size)
    converged = True
    nmax = n
    noise_gate = np.sqrt(spec.rel_tol) if spec.rel_tol > 0 else 0.0
    while active.size:
        if 2 * n > spec.max_angle_points:
            converged = False
            break
        theta_new = 2 * np.pi * (np.arange(n) + 0.5) / n
        snew, _ = _angle_sums(f, x[active], theta_new)
        sums_new = sums[active] + snew
        n *= 2
        nmax = n
        est_new = sums_new * (2 * np.pi / n)
        diff = _norm(est_new - result[active])
        scale = _norm(est_new)
        floor = spec.rel_tol * 1e-2 * max(float(np.max(scale)), absf_max)
        floor = np.maximum(floor, 100 * np.finfo(float).eps * absf[active])
        tol = np.maximum(np.maximum(spec.abs_tol, spec.rel_tol * scale), floor)
        stalled = (n >= 128) & (diff > 0.5 * prev[active]) & (diff <= noise_gate * scale)
        done = (diff <= tol) | stalled
        result[active] = est_new
        sums[active] = sums_new
        prev[active] = diff
        active = active[~done]
    return result, converged, nmax, absf


def integrate_polar(f, spec: QuadSpec = QuadSpec(), k_min=0.0, k_max=None,
                    points=None, strict=True) -> QuadResult:
    """Integrate ``f(k, theta)`` over the angle and then over the radial variable.

    The radial range is [k_min, k_max] or [k_min, inf) when ``k_max`` is None.
    No polar Jacobian is inserted: pass ``k * g(k, theta)`` for an area
    integral.
    """
    inner_ok = [True]
    shape = []

    def radial(k):
        val, ok, _, absf = periodic_trapezoid(f, k, spec)
        inner_ok[0] &= ok
        if not shape:
            shape.append(val.shape[1:])
        # the extra column carries int|f| so the outer tolerance sees the
        # true magnitude even when the angular integral cancels
        return np.concatenate([val.reshape(val.shape[0], -1), absf[:, None]], axis=1)

    if k_max is None:
        res = integrate_semiinf(radial, k_min, spec, points=points, strict=False)
    else:
        res = integrate_1d(radial, k_min, k_max, spec, points=points, strict=False)
    ok = res.converged and inner_ok[0]
    value = res.value[:-1].reshape(shape[0])
    if value.shape == ():
        value = value[()]
    return _finish(value, res.error, res.neval, ok, strict, "integrate_polar")
