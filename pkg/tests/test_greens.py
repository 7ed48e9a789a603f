import numpy as np
import pytest

from gyrocp.errors import CoincidentPoints, DomainError
from gyrocp.greens import (Channel, HalfSpaceGeometry, c_tensor, field_map, free_space_ldos,
                           green_free, green_imag_axis, green_scattered, sommerfeld)
from gyrocp.material import PlasmaMaterial
from gyrocp.quadrature import QuadSpec
from gyrocp.slab_em import TangentialWavevector

BIASED = PlasmaMaterial(1.0, 0.4, 0.015)
FAST = QuadSpec(rel_tol=1e-7, max_subdivisions=4000)


def _drude(w, gamma):
    return 1 - 1 / (w * (w + 1j * gamma))


def test_vacuum_has_no_scattered_field():
    g = HalfSpaceGeometry(0.05)
    out = green_scattered(PlasmaMaterial(0.0, 0.0, 0.0), 0.5, g, g.r0, g.r0)
    assert np.all(out == 0)


def test_image_dipole_limit():
    # very close to an unbiased surface the reflected field is the electrostatic image
    w, gam, d = 0.3, 1e-4, 1e-3
    mat = PlasmaMaterial(1.0, 0.0, gam)
    g = HalfSpaceGeometry(d)
    G = green_scattered(mat, w, g, g.r0, g.r0, spec=FAST)
    eps = _drude(w, gam)
    ref = (eps - 1) / (eps + 1) / (16 * np.pi * d ** 3)
    assert abs(G[2, 2] - ref) < 0.02 * abs(ref)
    assert abs(G[0, 0] - ref / 2) < 0.02 * abs(ref)


def test_reciprocity_unbiased():
    mat = PlasmaMaterial(1.0, 0.0, 0.02)
    g = HalfSpaceGeometry(0.05)
    r, rp = np.array([0.03, -0.02, 0.04]), np.array([-0.01, 0.01, 0.06])
    a = green_scattered(mat, 0.6, g, r, rp, spec=FAST)
    b = green_scattered(mat, 0.6, g, rp, r, spec=FAST)
    assert np.allclose(a, b.T, rtol=1e-6, atol=1e-6 * np.abs(a).max())


def test_reciprocity_with_reversed_bias():
    g = HalfSpaceGeometry(0.05)
    r, rp = np.array([0.04, 0.01, 0.05]), np.array([-0.02, 0.02, 0.03])
    a = green_scattered(BIASED, 0.7, g, r, rp, spec=FAST)
    b = green_scattered(BIASED.flipped(), 0.7, g, rp, r, spec=FAST)
    assert np.allclose(a, b.T, rtol=1e-6, atol=1e-6 * np.abs(a).max())
    # and the bias genuinely breaks plain reciprocity
    c = green_scattered(BIASED, 0.7, g, rp, r, spec=FAST)
    assert np.abs(a - c.T).max() > 1e-3 * np.abs(a).max()


def test_free_dyadic_far_field_is_transverse():
    k0 = 1.0
    r = np.array([0.0, 0.0, 1e3])
    G = green_free(k0, r, np.zeros(3))
    assert abs(G[2, 2]) < 1e-2 * abs(G[0, 0])
    assert np.isclose(abs(G[0, 0]), k0 ** 2 / (4 * np.pi * 1e3), rtol=1e-2)


def test_free_dyadic_static_kernel():
    r = np.array([0.3, -0.4, 1.2])
    rh = r / np.linalg.norm(r)
    ref = (3 * np.outer(rh, rh) - np.eye(3)) / (4 * np.pi * np.linalg.norm(r) ** 3)
    assert np.allclose(green_free(0.0, r, np.zeros(3)), ref)
    # small k0 r approaches the static kernel
    assert np.allclose(green_free(1e-5, r, np.zeros(3)).real, ref, rtol=1e-6)


def test_free_space_ldos_matches_small_distance_limit():
    k0 = 0.8
    G = green_free(k0, np.array([0.0, 0.0, 1e-4]), np.zeros(3))
    assert np.isclose(G[0, 0].imag, free_space_ldos(k0), rtol=1e-6)
    assert np.isclose(G[2, 2].imag, free_space_ldos(k0), rtol=1e-6)


def test_coincident_points():
    with pytest.raises(CoincidentPoints):
        green_free(1.0, np.ones(3), np.ones(3))


def test_points_below_interface_rejected():
    g = HalfSpaceGeometry(0.05)
    with pytest.raises(DomainError):
        green_scattered(BIASED, 0.7, g, np.array([0, 0, -0.1]), g.r0)
    with pytest.raises(DomainError):
        field_map(BIASED, 0.7, g, [0, 0, 1], [[0.0, 0.0, 0.0]])


def test_real_frequency_needs_loss():
    g = HalfSpaceGeometry(0.05)
    with pytest.raises(DomainError):
        green_scattered(PlasmaMaterial(1.0, 0.4, 0.0), 0.7, g, g.r0, g.r0)


def test_lateral_field_gradient_needs_bias():
    # d E_z / dx at the dipole vanishes by mirror symmetry without bias
    d, h = 0.05, 1e-3
    g = HalfSpaceGeometry(d)
    pts = [[h, 0.0, d], [-h, 0.0, d]]
    grads = []
    for mat in (PlasmaMaterial(1.0, 0.0, 0.015), BIASED):
        E = field_map(mat, 0.7, g, [0, 0, 1], pts, spec=FAST)
        scale = np.abs(field_map(mat, 0.7, g, [0, 0, 1], [[0, 0, d]], spec=FAST)).max()
        grads.append(abs(E[0, 2] - E[1, 2]) / (2 * h) * d / scale)
    assert grads[0] < 1e-6
    assert grads[1] > 1e-2


def test_field_map_is_linear_in_dipole():
    g = HalfSpaceGeometry(0.05)
    pts = [[0.02, 0.01, 0.03], [-0.05, 0.0, 0.1]]
    ex = field_map(BIASED, 0.7, g, [1, 0, 0], pts, spec=FAST)
    ez = field_map(BIASED, 0.7, g, [0, 0, 1], pts, spec=FAST)
    both = field_map(BIASED, 0.7, g, [2, 0, 1j], pts, spec=FAST)
    assert np.allclose(both, 2 * ex + 1j * ez, rtol=1e-9, atol=1e-12)


def test_total_field_adds_vacuum_part():
    g = HalfSpaceGeometry(0.05)
    pts = np.array([[0.1, 0.0, 0.05]])
    sc = field_map(BIASED, 0.7, g, [0, 0, 1], pts, spec=FAST)
    tot = field_map(BIASED, 0.7, g, [0, 0, 1], pts, part="total", spec=FAST)
    assert np.allclose(tot - sc, green_free(0.7, pts[0], g.r0) @ [0, 0, 1])


def test_imag_axis_decays_and_transposes():
    g = HalfSpaceGeometry(0.05)
    low = green_imag_axis(BIASED, 0.5, g, spec=FAST)
    high = green_imag_axis(BIASED, 600.0, g, spec=FAST)
    assert np.abs(high).max() < 1e-10 * np.abs(low).max()
    neg = green_imag_axis(BIASED, -0.5, g, spec=FAST)
    assert np.allclose(neg, low.T, rtol=1e-7, atol=1e-9 * np.abs(low).max())


def test_imag_axis_symmetric_without_bias():
    g = HalfSpaceGeometry(0.05)
    m = green_imag_axis(PlasmaMaterial(1.0, 0.0, 0.015), 0.3, g, spec=FAST)
    assert np.allclose(m, m.T, atol=1e-9 * np.abs(m).max())
    assert np.all(np.diag(m) > 0)


def test_imag_axis_rejects_zero():
    with pytest.raises(DomainError):
        green_imag_axis(BIASED, 0.0, HalfSpaceGeometry(0.05))


def test_c_tensor_vacuum_and_mirror_structure():
    k = TangentialWavevector(2.0, 0.0)
    assert np.allclose(c_tensor(PlasmaMaterial(0.0, 0.0, 0.0), 0.7, k), 0)
    C = c_tensor(PlasmaMaterial(1.0, 0.0, 0.015), 0.7, k)
    for i, j in ((0, 1), (1, 0), (2, 1), (1, 2)):
        assert abs(C[i, j]) < 1e-12 * np.abs(C).max()
    # k along x is perpendicular to the bias (y): still no TE/TM mixing
    Cb = c_tensor(BIASED, 0.7, k)
    assert abs(Cb[0, 1]) < 1e-12 * np.abs(Cb).max()
    # k along the bias mixes the polarizations
    ky = TangentialWavevector(0.0, 2.0)
    assert abs(c_tensor(PlasmaMaterial(1.0, 0.0, 0.015), 0.7, ky)[0, 1]) < 1e-12
    Cy = c_tensor(BIASED, 0.7, ky)
    assert abs(Cy[0, 1]) > 1e-2 * np.abs(Cy).max()


def test_tolerance_refinement_is_cauchy():
    g = HalfSpaceGeometry(0.02)
    ch = [Channel(zsum=2 * g.d)]
    vals = [sommerfeld(BIASED, 0.7, ch, QuadSpec(rel_tol=t, max_subdivisions=4000))[0][0]
            for t in (1e-5, 1e-7, 1e-9)]
    scale = np.abs(vals[-1]).max()
    assert np.abs(vals[0] - vals[-1]).max() < 1e-4 * scale
    assert np.abs(vals[1] - vals[-1]).max() < 1e-6 * scale
