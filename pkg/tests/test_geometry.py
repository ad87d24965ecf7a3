import math

import numpy as np
import pytest

from szegolab.geometry import (
    ProjectivePoint,
    TangentVector,
    angle_to_ray,
    circle_normalization_residual,
    displace,
    geometry_report,
    gm_det_identity_residual,
    gram_C,
    grassmann_preset_eval,
    ker_phi_basis,
    moment_map,
    normal_component_residual,
    normal_space_basis,
    omega_form,
    on_ray_points,
    orbit_vectors,
    random_point,
    scaling_invariants,
)
from szegolab.weights import validate_action

A12 = validate_action([[1, 2]])
A123 = validate_action([[1, 2, 3]])
AI2 = validate_action([[1, 0], [0, 1]])
AT2 = validate_action([[1, 0, 1], [0, 1, 1]])


def interior_point(a, rng, min_p=1e-3):
    p = rng.dirichlet(np.ones(a.n_coords))
    while p.min() < min_p:
        p = rng.dirichlet(np.ones(a.n_coords))
    return ProjectivePoint.from_p(p, rng.uniform(0, 2 * math.pi, a.n_coords))


# ---------------------------------------------------------------------------
# points, tangents, moment map
# ---------------------------------------------------------------------------


def test_point_normalization_and_support():
    m = ProjectivePoint.from_coords([3, 4j])
    assert math.isclose(np.linalg.norm(m.z), 1.0, abs_tol=1e-15)
    assert math.isclose(m.p.sum(), 1.0, abs_tol=1e-15)
    assert m.support == (0, 1)
    assert ProjectivePoint.from_coords([0, 5]).support == (1,)
    with pytest.raises(ValueError):
        ProjectivePoint(np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        ProjectivePoint.from_coords([0, 0])


def test_tangent_horizontality():
    m = ProjectivePoint.from_coords([1, 1j])
    v = TangentVector.horizontal(m, np.array([1.0 + 0j, 2.0]))
    assert abs(np.vdot(m.z, v.v)) < 1e-14
    with pytest.raises(ValueError):
        TangentVector(m, m.z)


def test_moment_map_examples():
    assert moment_map(A123, ProjectivePoint.from_coords([1, 0, 0]))[0] == pytest.approx(1.0)
    assert moment_map(A123, ProjectivePoint.from_coords([0, 0, 1]))[0] == pytest.approx(3.0)
    s = 4
    a1s = validate_action([[1, s]])
    assert moment_map(a1s, ProjectivePoint.from_coords([0, 1]))[0] == pytest.approx(s)
    m = ProjectivePoint.from_p([0.5, 0.5])
    assert moment_map(AI2, m) == pytest.approx([0.5, 0.5])


def test_moment_image_in_convex_hull():
    rng = np.random.default_rng(0)
    for a in (A123, AT2):
        cols = a.W.T.astype(float)
        for _ in range(40):
            phi = moment_map(a, random_point(a.d, rng))
            # least-squares convex combination reproduces phi
            coeffs, *_ = np.linalg.lstsq(
                np.vstack([cols.T, np.ones(a.n_coords)]),
                np.concatenate([phi, [1.0]]),
                rcond=None,
            )
            assert np.linalg.norm(cols.T @ coeffs - phi) < 1e-10


def test_moment_and_gram_torus_invariance():
    rng = np.random.default_rng(1)
    for a in (A123, AT2):
        m = random_point(a.d, rng)
        theta = rng.uniform(0, 1, size=a.g)
        phases = np.exp(2j * math.pi * (a.W.astype(float).T @ theta))
        m2 = ProjectivePoint(m.z * phases)
        assert moment_map(a, m2) == pytest.approx(moment_map(a, m), abs=1e-14)
        assert gram_C(a, m2) == pytest.approx(gram_C(a, m), abs=1e-14)


def test_grassmann_examples():
    e = np.zeros(6)
    e[0] = 1
    assert grassmann_preset_eval(e) == pytest.approx(1.0)
    e = np.zeros(6)
    e[5] = 1
    assert grassmann_preset_eval(e) == pytest.approx(5.0)
    ok = np.array([1, 0, 0, 0, 1, 0]) / math.sqrt(2)
    assert grassmann_preset_eval(ok) == pytest.approx(2.5)
    bad = np.array([1, 0, 0, 0, 0, 1]) / math.sqrt(2)
    with pytest.raises(ValueError):
        grassmann_preset_eval(bad)


def test_grassmann_matches_ambient_moment_map():
    # on Klein-relation points the preset equals the (1,2,3,3,4,5) moment map
    a = validate_action([[1, 2, 3, 3, 4, 5]])
    rng = np.random.default_rng(2)
    for _ in range(10):
        # rank-2 plane in C^4 -> Pluecker coordinates satisfy the relation
        Mx = rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4))
        pl = []
        for i in range(4):
            for j in range(i + 1, 4):
                pl.append(Mx[0, i] * Mx[1, j] - Mx[0, j] * Mx[1, i])
        z = np.array(pl)
        got = grassmann_preset_eval(z)
        want = moment_map(a, ProjectivePoint.from_coords(z))[0]
        assert got == pytest.approx(want, rel=1e-12)


# ---------------------------------------------------------------------------
# Gram matrices, kernels of Phi, reports
# ---------------------------------------------------------------------------


def test_gram_examples():
    rng = np.random.default_rng(3)
    p0 = rng.uniform(0.1, 0.9)
    m = ProjectivePoint.from_p([p0, 1 - p0])
    assert gram_C(A12, m)[0, 0] == pytest.approx(p0 * (1 - p0), rel=1e-12)
    mf = ProjectivePoint.from_coords([1, 0, 0])
    assert np.allclose(gram_C(A123, mf), 0.0, atol=1e-20)
    mI = ProjectivePoint.from_p([0.5, 0.5])
    assert gram_C(AI2, mI) == pytest.approx(np.array([[0.25, -0.25], [-0.25, 0.25]]))


def test_gram_is_generator_gram():
    rng = np.random.default_rng(4)
    for a in (A123, AT2, AI2):
        m = random_point(a.d, rng)
        vecs = orbit_vectors(a, m)
        gram = np.real(np.conj(vecs) @ vecs.T)
        assert gram == pytest.approx(gram_C(a, m), abs=1e-13)
        evals = np.linalg.eigvalsh(gram_C(a, m))
        assert evals.min() > -1e-12


def test_ker_phi_basis():
    assert ker_phi_basis([2.0]).shape == (0, 1)
    b = ker_phi_basis([1.0, 1.0])
    assert b.shape == (1, 2)
    assert abs(b[0] @ [1, 1]) < 1e-14
    assert np.linalg.norm(b[0]) == pytest.approx(1.0)
    b = ker_phi_basis([3.0, 4.0])
    assert np.allclose(np.abs(b[0]), [0.8, 0.6])
    b3 = ker_phi_basis([1.0, 2.0, 2.0])
    assert b3.shape == (2, 3)
    assert np.allclose(b3 @ np.array([1.0, 2.0, 2.0]), 0.0, atol=1e-13)
    assert np.allclose(b3 @ b3.T, np.eye(2), atol=1e-13)
    with pytest.raises(ValueError):
        ker_phi_basis([0.0, 0.0])


def test_geometry_report_onray_values():
    for varpi in ((1, 1), (2, 3)):
        m = ProjectivePoint.from_p(np.array(varpi) / sum(varpi))
        rep = geometry_report(AI2, m, varpi)
        nv = math.sqrt(varpi[0] ** 2 + varpi[1] ** 2)
        assert rep.script_d == pytest.approx(math.sqrt(varpi[0] * varpi[1]) / nv, rel=1e-12)
        assert rep.lambda_varpi == pytest.approx(nv / (nv / sum(varpi)), rel=1e-12)
        assert rep.transversal
        assert rep.on_ray_angle < 1e-12


def test_geometry_report_g1():
    rng = np.random.default_rng(5)
    m = interior_point(A12, rng)
    rep = geometry_report(A12, m, (1,))
    assert rep.script_d == 1.0
    assert rep.D.shape == (0, 0)
    assert rep.locally_free and rep.transversal
    assert rep.v_eff == pytest.approx(
        2 * math.pi * math.sqrt(gram_C(A12, m)[0, 0]), rel=1e-12
    )


def test_geometry_report_fixed_point_not_transversal():
    mf = ProjectivePoint.from_coords([1, 0, 0])
    rep = geometry_report(AT2, mf, (1, 1))
    assert not rep.transversal
    assert rep.rank_val == 0
    assert rep.script_d is None and rep.v_eff is None


def test_transversality_on_p2_t2_ray():
    rng = np.random.default_rng(6)
    for m in on_ray_points(AT2, (1, 1), 10, rng):
        rep = geometry_report(AT2, m, (1, 1))
        assert rep.transversal and rep.locally_free
        # closed-form locus: p0 = p1
        assert m.p[0] == pytest.approx(m.p[1], abs=1e-9)


def test_identity_residuals():
    rng = np.random.default_rng(7)
    for _ in range(200):
        m = interior_point(AT2, rng)
        assert gm_det_identity_residual(AT2, m) <= 1e-10
    for _ in range(200):
        m = interior_point(A12, rng)
        assert circle_normalization_residual(A12, m) <= 1e-10
    # g=1 identity reduces trivially
    m = interior_point(A12, rng)
    assert gm_det_identity_residual(A12, m) == 0.0


def test_circle_normalization_closed_values():
    m = ProjectivePoint.from_p([0.5, 0.5])
    assert circle_normalization_residual(A12, m) <= 1e-12
    a22 = validate_action([[2, 2]])
    m22 = ProjectivePoint.from_p([0.3, 0.7])
    # both sides equal Phi = 2
    assert circle_normalization_residual(a22, m22) <= 1e-12
    with pytest.raises(ValueError):
        circle_normalization_residual(A12, ProjectivePoint.from_coords([1, 0]))


# ---------------------------------------------------------------------------
# scaling invariants, normal spaces
# ---------------------------------------------------------------------------


def test_scaling_invariants_basics():
    m = ProjectivePoint.from_p([0.5, 0.5])
    zero = TangentVector(m, np.zeros(2, dtype=complex))
    E, H = scaling_invariants(AI2, m, (1, 1), zero, zero)
    assert H == 0 and E is None
    basis = normal_space_basis(AI2, m, (1, 1))
    v = TangentVector(m, basis[0])
    _, H = scaling_invariants(AI2, m, (1, 1), v, v)
    lam = geometry_report(AI2, m, (1, 1)).lambda_varpi
    assert H == pytest.approx(-2 * lam * v.norm**2)
    assert H.imag == 0.0


def test_re_H_nonpositive():
    rng = np.random.default_rng(8)
    m = interior_point(AT2, rng)
    for _ in range(50):
        v1 = TangentVector.horizontal(m, rng.standard_normal(3) + 1j * rng.standard_normal(3))
        v2 = TangentVector.horizontal(m, rng.standard_normal(3) + 1j * rng.standard_normal(3))
        _, H = scaling_invariants(AT2, m, (1, 1), v1, v2)
        assert H.real <= 0
        if v1.norm > 1e-9 or v2.norm > 1e-9:
            assert H.real < 0


def test_E_invariant_kernel_direction():
    rng = np.random.default_rng(9)
    m = interior_point(A12, rng)
    phi = float(moment_map(A12, m)[0])
    xi = orbit_vectors(A12, m)[0]
    w = TangentVector.horizontal(m, rng.standard_normal(2) + 1j * rng.standard_normal(2))
    tau = 0.37
    # difference of displacements parallel to the lifted generator (-Phi, xi_M)
    v1 = TangentVector(m, w.v + tau * xi)
    v2 = TangentVector(m, w.v)
    E, _ = scaling_invariants(A12, m, (1,), v1, v2, theta1=0.0, theta2=phi * tau)
    assert abs(E.real) < 1e-12
    # perturb off the generator span: strictly negative real part
    E2, _ = scaling_invariants(
        A12, m, (1,), v1, v2, theta1=0.0, theta2=phi * tau + 0.05
    )
    assert E2.real < -1e-6


def test_E_real_part_nonpositive_random():
    rng = np.random.default_rng(10)
    m = interior_point(A12, rng)
    for _ in range(50):
        v1 = TangentVector.horizontal(m, rng.standard_normal(2) + 1j * rng.standard_normal(2))
        v2 = TangentVector.horizontal(m, rng.standard_normal(2) + 1j * rng.standard_normal(2))
        E, _ = scaling_invariants(A12, m, (1,), v1, v2, theta1=rng.uniform(-1, 1), theta2=rng.uniform(-1, 1))
        assert E.real <= 1e-15


def test_normal_space_orthonormal_and_detected():
    rng = np.random.default_rng(11)
    pts = on_ray_points(AT2, (2, 1), 3, rng)
    for m in pts:
        basis = normal_space_basis(AT2, m, (2, 1))
        assert basis.shape == (1, 3)
        assert np.linalg.norm(basis[0]) == pytest.approx(1.0, rel=1e-12)
        v = TangentVector(m, basis[0])
        assert normal_component_residual(AT2, m, (2, 1), v) < 1e-10
        orb = TangentVector.horizontal(m, orbit_vectors(AT2, m)[0])
        if orb.norm > 1e-6:
            assert normal_component_residual(AT2, m, (2, 1), orb) > 0.5


def test_normal_space_is_J_of_kernel_generators():
    m = ProjectivePoint.from_p([0.5, 0.5])
    basis = normal_space_basis(AI2, m, (1, 1))
    # J * val takes the orbit direction i(xi o z) to -(xi o z): real multiples
    # of (z0, -z1), which is already metric-unit here
    expected = np.array([m.z[0], -m.z[1]])
    overlap = abs(np.vdot(expected, basis[0]))
    assert overlap == pytest.approx(1.0, rel=1e-12)


def test_displace_and_omega():
    m = ProjectivePoint.from_p([0.4, 0.6])
    v = TangentVector.horizontal(m, np.array([1.0, 1j]))
    x = displace(m, v, 0.01)
    assert math.isclose(np.linalg.norm(x.z), 1.0, abs_tol=1e-15)
    u = np.array([1.0 + 0j, 0.0])
    w = np.array([1j, 0.0])
    assert omega_form(u, w) == pytest.approx(1.0)
    assert omega_form(u, u) == 0.0


def test_on_ray_points_quality():
    rng = np.random.default_rng(12)
    pts = on_ray_points(AT2, (2, 1), 20, rng)
    assert len(pts) == 20
    for m in pts:
        assert angle_to_ray(moment_map(AT2, m), (2, 1)) < 1e-9
    with pytest.raises(ValueError):
        on_ray_points(AI2, (1, -1), 2, rng)
