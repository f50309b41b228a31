import numpy as np
import pytest

from fracdg.mesh import (Mesh, DGFunction, build_mesh, trace, l2_project,
                         inner_product, l2_norm, legendre_table,
                         legendre_deriv_table, gauss_legendre)


def test_build_mesh_partition():
    mesh = build_mesh(2 * np.pi, 17)
    widths = np.diff(mesh.nodes)
    assert np.allclose(widths, mesh.h)
    assert abs(widths.sum() - mesh.L) < 1e-14
    assert mesh.nodes[0] == 0.0 and abs(mesh.nodes[-1] - mesh.L) < 1e-14


def test_build_mesh_validation():
    with pytest.raises(ValueError):
        build_mesh(-1.0, 8)
    with pytest.raises(ValueError):
        build_mesh(1.0, 1)
    with pytest.raises(ValueError):
        build_mesh(1.0, 2.5)


def test_legendre_tables_match_numpy():
    xi = np.linspace(-1, 1, 7)
    P = legendre_table(5, xi)
    for m in range(6):
        ref = np.polynomial.legendre.Legendre.basis(m)(xi)
        assert np.allclose(P[m], ref, atol=1e-14)
        dref = np.polynomial.legendre.Legendre.basis(m).deriv()(xi)
        assert np.allclose(legendre_deriv_table(5, xi)[m], dref, atol=1e-13)


@pytest.mark.parametrize("k", [0, 1, 2, 3, 4])
def test_basis_orthonormal(k):
    # quadrature with k+2 points integrates products b_m b_n exactly
    mesh = build_mesh(1.7, 5)
    xi, w, _ = mesh.quad(k + 2)
    m = np.arange(k + 1)
    B = legendre_table(k, xi) * np.sqrt((2 * m + 1) / mesh.h)[:, None]
    gram = 0.5 * mesh.h * (B * w) @ B.T
    assert np.allclose(gram, np.eye(k + 1), atol=1e-14)


def test_quadrature_exactness_degree_2kp3():
    # k+2 Gauss points must integrate x^(2k+3) exactly on a cell
    k = 2
    mesh = build_mesh(3.0, 3)
    xi, w, xq = mesh.quad(k + 2)
    deg = 2 * k + 3
    got = 0.5 * mesh.h * np.sum(w * xq[1] ** deg)
    a, b = mesh.nodes[1], mesh.nodes[2]
    exact = (b ** (deg + 1) - a ** (deg + 1)) / (deg + 1)
    assert abs(got - exact) < 1e-13 * abs(exact)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_projection_reproduces_polynomials(k):
    mesh = build_mesh(2.0, 4)

    def v(x):
        return sum((0.3 + m) * x ** m for m in range(k + 1))

    u = l2_project(v, mesh, k)
    x = np.linspace(0.01, 1.99, 231)
    assert np.allclose(u.evaluate(x), v(x), atol=1e-12)


def test_projection_idempotent_and_orthogonal():
    mesh = build_mesh(2 * np.pi, 16)
    k = 2
    u = l2_project(np.sin, mesh, k, npts=12)
    # projecting the projection changes nothing
    again = l2_project(u.evaluate, mesh, k, npts=k + 2)
    assert np.allclose(again.coeffs, u.coeffs, atol=1e-13)
    # Pythagoras: ||v||^2 = ||Pv||^2 + ||v - Pv||^2, ||sin||^2 = pi on [0, 2pi)
    xi, w, xq = mesh.quad(12)
    res = np.sin(xq) - u.eval_at_ref(xi)
    res_sq = 0.5 * mesh.h * np.sum(res ** 2 * w)
    assert abs(l2_norm(u) ** 2 + res_sq - np.pi) < 1e-12


def test_norm_and_inner_product_are_coefficient_sums():
    mesh = build_mesh(1.0, 8)
    rng = np.random.default_rng(7)
    u = DGFunction(mesh, 2, rng.standard_normal((8, 3)))
    v = DGFunction(mesh, 2, rng.standard_normal((8, 3)))
    xi, w, _ = mesh.quad(8)
    quad_ip = 0.5 * mesh.h * np.sum(u.eval_at_ref(xi) * v.eval_at_ref(xi) * w)
    assert abs(inner_product(u, v) - quad_ip) < 1e-12
    assert abs(l2_norm(u) ** 2 - inner_product(u, u)) < 1e-13


def test_traces_and_jumps():
    mesh = build_mesh(2 * np.pi, 32)
    u = l2_project(np.sin, mesh, 1)
    minus, plus = u.traces()
    # traces approximate sin at the nodes from either side
    assert np.max(np.abs(plus - np.sin(mesh.nodes[:-1]))) < 5e-3
    assert np.max(np.abs(minus - np.sin(mesh.nodes[:-1]))) < 5e-3
    assert np.allclose(u.jumps(), plus - minus)
    # scalar accessor agrees, including periodic wrap
    assert trace(u, 0, "-") == pytest.approx(minus[0])
    assert trace(u, 32, "+") == pytest.approx(plus[0])


def test_evaluate_is_right_continuous_at_nodes():
    mesh = build_mesh(1.0, 4)
    coeffs = np.zeros((4, 2))
    coeffs[1, 0] = 1.0  # indicator-ish bump on cell 1
    u = DGFunction(mesh, 1, coeffs)
    node = mesh.nodes[1]
    assert u.evaluate(node) == pytest.approx(1.0 / np.sqrt(mesh.h))
    assert u.evaluate(node - 1e-9) == pytest.approx(0.0)


def test_evaluate_periodic_wrap():
    mesh = build_mesh(2 * np.pi, 16)
    u = l2_project(np.cos, mesh, 2)
    x = np.array([0.3, 1.1, 5.9])
    assert np.allclose(u.evaluate(x + 2 * np.pi), u.evaluate(x), atol=1e-13)


def test_mass_and_cell_means():
    mesh = build_mesh(2 * np.pi, 24)
    u = l2_project(lambda x: 1.5 + np.sin(x), mesh, 1)
    assert abs(u.mass() - 1.5 * 2 * np.pi) < 1e-12
    assert np.allclose(u.cell_means().mean(), 1.5, atol=1e-13)


def test_arithmetic_guards_mesh_mismatch():
    u = DGFunction(build_mesh(1.0, 4), 1)
    v = DGFunction(build_mesh(1.0, 8), 1)
    with pytest.raises(ValueError):
        _ = u + v
