import numpy as np
import pytest

from fracdg.fluxes import (FluxModel, NumericalFlux, linear_flux, burgers_flux,
                           godunov_flux, engquist_osher_flux, upwind_flux,
                           a_quantity, check_lemma31)


def brute_godunov(model, a, b, n=20001):
    lo, hi = (a, b) if a <= b else (b, a)
    s = np.linspace(lo, hi, n)
    vals = model.f(s)
    return float(vals.min() if a <= b else vals.max())


def sine_flux():
    # nonconvex flux with interior extrema at +-pi/2
    return FluxModel(f=np.sin, df=np.cos,
                     d2f=lambda u: -np.sin(u), d3f=lambda u: -np.cos(u),
                     u_range=(-2.0, 2.0), name="sine")


class TestGodunov:
    def test_burgers_frozen_cases(self):
        m = burgers_flux()
        # transonic shock, sonic rarefaction, one-sided cases
        assert godunov_flux(m, 1.0, -1.0) == pytest.approx(0.5)
        assert godunov_flux(m, -1.0, 1.0) == pytest.approx(0.0, abs=1e-14)
        assert godunov_flux(m, 0.5, 1.5) == pytest.approx(0.125)
        assert godunov_flux(m, 1.5, 0.5) == pytest.approx(1.125)

    def test_matches_brute_force_burgers(self):
        m = burgers_flux()
        rng = np.random.default_rng(42)
        for a, b in rng.uniform(-2, 2, (200, 2)):
            assert godunov_flux(m, a, b) == pytest.approx(brute_godunov(m, a, b), abs=1e-7)

    def test_matches_brute_force_nonconvex(self):
        m = sine_flux()
        rng = np.random.default_rng(3)
        for a, b in rng.uniform(-2, 2, (100, 2)):
            assert godunov_flux(m, a, b) == pytest.approx(brute_godunov(m, a, b), abs=1e-7)

    def test_closed_form_matches_scalar_path(self):
        m = burgers_flux()
        flux = NumericalFlux(m, "godunov")
        rng = np.random.default_rng(11)
        a = rng.uniform(-2, 2, 500)
        b = rng.uniform(-2, 2, 500)
        fast = flux.evaluate_many(a, b)
        slow = np.array([godunov_flux(m, x, y) for x, y in zip(a, b)])
        assert np.allclose(fast, slow, atol=1e-13)


class TestEngquistOsher:
    def test_burgers_closed_form(self):
        m = burgers_flux()
        rng = np.random.default_rng(5)
        for a, b in rng.uniform(-2, 2, (50, 2)):
            expect = 0.5 * (max(a, 0.0) ** 2 + min(b, 0.0) ** 2)
            assert engquist_osher_flux(m, a, b) == pytest.approx(expect, abs=1e-10)

    def test_linear_reduces_to_upwind(self):
        m = linear_flux(1.5)
        assert engquist_osher_flux(m, 0.7, -0.3) == pytest.approx(1.5 * 0.7)
        m = linear_flux(-2.0)
        assert engquist_osher_flux(m, 0.7, -0.3) == pytest.approx(-2.0 * -0.3)


class TestUpwind:
    def test_linear(self):
        assert upwind_flux(linear_flux(2.0), 0.3, 0.9) == pytest.approx(0.6)
        assert upwind_flux(linear_flux(-2.0), 0.3, 0.9) == pytest.approx(-1.8)

    def test_sign_definite_burgers_takes_upwind_side(self):
        m = burgers_flux()
        assert upwind_flux(m, 0.5, 1.5) == pytest.approx(0.125)
        assert upwind_flux(m, -1.5, -0.5) == pytest.approx(0.125)

    def test_falls_back_to_godunov_on_sign_change(self):
        m = burgers_flux()
        assert upwind_flux(m, 1.0, -1.0) == pytest.approx(godunov_flux(m, 1.0, -1.0))
        assert upwind_flux(m, -1.0, 1.0) == pytest.approx(godunov_flux(m, -1.0, 1.0))


@pytest.mark.parametrize("kind", NumericalFlux.KINDS)
@pytest.mark.parametrize("make", [lambda: linear_flux(1.0), burgers_flux, sine_flux])
def test_flux_conditions(kind, make):
    """Consistency and monotonicity, sampled over the working square."""
    model = make()
    flux = NumericalFlux(model, kind)
    rng = np.random.default_rng(17)
    pts = rng.uniform(*model.u_range, 25)
    for p in pts:
        assert flux(p, p) == pytest.approx(float(model.f(p)), abs=1e-9)
    grid = np.linspace(*model.u_range, 9)
    eps = 1e-9
    for a in grid:
        for b in grid:
            h0 = flux(a, b)
            assert flux(a + 1e-4, b) >= h0 - eps  # nondecreasing in first arg
            assert flux(a, b + 1e-4) <= h0 + eps  # nonincreasing in second


class TestAQuantity:
    def test_zero_jump_gives_characteristic_speed(self):
        m = burgers_flux()
        flux = NumericalFlux(m, "godunov")
        assert a_quantity(m, flux, 0.7, 0.7) == pytest.approx(0.7)
        assert a_quantity(m, flux, -0.4, -0.4) == pytest.approx(0.4)

    def test_linear_flux_gives_half_speed(self):
        m = linear_flux(1.0)
        flux = NumericalFlux(m, "godunov")
        rng = np.random.default_rng(23)
        for pm, pp in rng.uniform(-2, 2, (50, 2)):
            if pm != pp:
                assert a_quantity(m, flux, pm, pp) == pytest.approx(0.5)

    def test_burgers_transonic_shock(self):
        m = burgers_flux()
        flux = NumericalFlux(m, "godunov")
        # hhat(1,-1) = 1/2, f(pbar) = 0, jump = -2 -> a = 1/4
        assert a_quantity(m, flux, 1.0, -1.0) == pytest.approx(0.25)

    def test_accepts_bare_flux_function(self):
        m = burgers_flux()
        assert a_quantity(m, godunov_flux, 1.0, -1.0) == pytest.approx(0.25)


class TestInterfaceViscositySampler:
    def test_burgers_godunov_no_violations(self):
        report = check_lemma31(burgers_flux(), NumericalFlux(burgers_flux(), "godunov"),
                               n_samples=10000, seed=0)
        assert report["passed"]
        assert report["violations"] == 0
        assert report["a_min"] >= -1e-12
        assert report["a_max"] <= report["c_star"] * 0 + 2.0 + 1e-12  # M1 = 2 on [-2,2]

    def test_burgers_engquist_osher_no_violations(self):
        m = burgers_flux()
        report = check_lemma31(m, NumericalFlux(m, "engquist_osher"),
                               n_samples=500, seed=1)
        assert report["passed"], report["margins"]

    def test_linear_no_violations(self):
        m = linear_flux(1.0)
        report = check_lemma31(m, NumericalFlux(m, "godunov"), n_samples=2000, seed=2)
        assert report["passed"], report["margins"]
        # a = c/2 everywhere for linear flux
        assert report["a_min"] == pytest.approx(0.5)
        assert report["a_max"] == pytest.approx(0.5)

    def test_deterministic_given_seed(self):
        m = burgers_flux()
        flux = NumericalFlux(m, "godunov")
        r1 = check_lemma31(m, flux, n_samples=200, seed=9)
        r2 = check_lemma31(m, flux, n_samples=200, seed=9)
        assert r1 == r2


def test_unknown_kind_rejected():
    with pytest.raises(ValueError):
        NumericalFlux(burgers_flux(), "lax_friedrichs")
