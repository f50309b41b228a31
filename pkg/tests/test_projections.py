import numpy as np
import pytest

from fracdg.mesh import build_mesh, DGFunction, l2_norm, legendre_table, trace
from fracdg.fluxes import burgers_flux, linear_flux
from fracdg.projections import (gauss_radau_project, cell_speed_range, SwitchTracker,
                                upwind_project, verify_switch_bound,
                                synthetic_switch_study, switch_slope)


def eval_dg(u, x):
    return u.evaluate(np.asarray(x, dtype=float))


class TestGaussRadau:
    def test_reproduces_polynomials(self):
        mesh = build_mesh(2.0, 5)
        for k in (1, 2, 3):
            poly = lambda x: 0.3 - 1.2 * x + 0.7 * x ** 2 * (k >= 2) + 0.2 * x ** 3 * (k >= 3)
            for side in (1, -1):
                proj = gauss_radau_project(poly, mesh, k, side)
                x = np.linspace(0.01, 1.99, 113)
                assert np.abs(eval_dg(proj, x) - poly(x)).max() < 1e-12

    def test_endpoint_interpolation(self):
        mesh = build_mesh(2 * np.pi, 8)
        v = np.sin
        right = gauss_radau_project(v, mesh, 2, 1)
        left = gauss_radau_project(v, mesh, 2, -1)
        for j in range(mesh.N):
            assert abs(trace(right, j + 1, "-") - np.sin(mesh.nodes[j + 1])) < 1e-13
            assert abs(trace(left, j, "+") - np.sin(mesh.nodes[j])) < 1e-13

    def test_orthogonal_to_lower_degree(self):
        # pair with the same quadrature the projection used so the check
        # sees the projection property, not quadrature-rule differences
        mesh = build_mesh(2 * np.pi, 6)
        k = 2
        proj = gauss_radau_project(np.sin, mesh, k, 1, npts=10)
        xi, w, xq = mesh.quad(10)
        m = np.arange(k + 1)
        B = legendre_table(k, xi) * np.sqrt((2 * m + 1) / mesh.h)[:, None]
        resid = np.sin(xq) - proj.eval_at_ref(xi)
        pair = 0.5 * mesh.h * np.einsum("jq,q,mq->jm", resid, w, B)
        assert np.abs(pair[:, :k]).max() < 1e-13

    def test_mixed_sides(self):
        mesh = build_mesh(2 * np.pi, 4)
        sides = np.array([1, -1, 1, -1])
        proj = gauss_radau_project(np.cos, mesh, 1, sides)
        assert abs(trace(proj, 1, "-") - np.cos(mesh.nodes[1])) < 1e-13   # cell 0 right
        assert abs(trace(proj, 1, "+") - np.cos(mesh.nodes[1])) < 1e-13   # cell 1 left

    def test_convergence_rate(self):
        for k in (1, 2):
            errs = []
            for N in (8, 16, 32, 64):
                mesh = build_mesh(2 * np.pi, N)
                proj = gauss_radau_project(np.sin, mesh, k, 1)
                xi, w, xq = mesh.quad(k + 6)
                resid = np.sin(xq) - proj.eval_at_ref(xi)
                errs.append(np.sqrt(0.5 * mesh.h * np.sum(w * resid ** 2)))
            rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
            assert abs(rates[-1] - (k + 1)) < 0.1


class TestSpeedRangeAndTracker:
    def test_cell_speed_range_callable(self):
        mesh = build_mesh(2 * np.pi, 4)
        lo, hi = cell_speed_range(burgers_flux(), lambda x: np.sin(x), mesh)
        assert lo.shape == (4,)
        assert np.all(lo <= hi)
        assert lo[0] >= -1e-12 and hi[0] <= 1.0 + 1e-12   # f' = u on [0, pi/2]

    def test_cell_speed_range_dg(self):
        mesh = build_mesh(2 * np.pi, 8)
        coeffs = np.zeros((8, 2))
        coeffs[:, 0] = np.sqrt(mesh.h) * 2.0   # constant value 2
        u = DGFunction(mesh, 1, coeffs)
        lo, hi = cell_speed_range(burgers_flux(), u)
        assert np.abs(lo - 2.0).max() < 1e-12 and np.abs(hi - 2.0).max() < 1e-12
        lo, hi = cell_speed_range(linear_flux(c=-0.3), u)
        assert np.abs(lo + 0.3).max() < 1e-12

    def test_tracker_hysteresis(self):
        tr = SwitchTracker(2)
        assert np.all(tr.observe(0.5, 0.5) == 1)          # strictly positive: right
        assert np.all(tr.observe(-0.05, -0.05, band=0.1) == 1)  # inside band: hold
        assert np.all(tr.observe(-0.2, -0.2, band=0.1) == -1)   # clears band: flip
        assert np.all(tr.observe(0.05, 0.05, band=0.1) == -1)
        assert np.all(tr.observe(0.3, 0.3, band=0.1) == 1)
        assert np.all(tr.counts == 2)

    def test_tracker_initial_zero_goes_left(self):
        tr = SwitchTracker(3)
        assert np.all(tr.observe(0.0, 0.0) == -1)

    def test_upwind_project_positive_field(self):
        mesh = build_mesh(2 * np.pi, 8)
        v = lambda x: 2.0 + 0.5 * np.sin(x)
        proj = upwind_project(v, mesh, 2, burgers_flux())
        want = gauss_radau_project(v, mesh, 2, 1)
        assert np.abs(proj.coeffs - want.coeffs).max() < 1e-14


class TestSwitchStudy:
    def test_counts_track_the_modulation(self):
        # about two flips per period of the prescribed speed
        T, omega = 8 * np.pi, 1.0   # four periods
        counts = synthetic_switch_study([0.1, 0.05, 0.025], T, 1.0, omega)
        assert np.all(counts >= 6) and np.all(counts <= 10)

    def test_slope_flat(self):
        h = np.array([0.2, 0.1, 0.05, 0.025])
        counts = synthetic_switch_study(h, 8 * np.pi, 1.0, 1.0)
        assert switch_slope(h, counts) > -0.6

    def test_bound(self):
        h = 0.05
        counts = synthetic_switch_study([h], 8 * np.pi, 1.0, 1.0)
        rep = verify_switch_bound(counts, 8 * np.pi, (1.0 * 1.0) ** 2, 2.0, h)
        assert rep["passed"]
        assert rep["max_count"] <= rep["bound"]

    def test_slope_needs_positive_counts(self):
        with pytest.raises(ValueError):
            switch_slope([0.1, 0.05], [3, 0])
