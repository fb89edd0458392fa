import numpy as np
import pytest

from stovaq.grid import (
    CLAMPED,
    PERIODIC,
    ComplexField,
    Grid1D,
    GridMismatchError,
    RealField,
    gradient,
    integrate,
    l1_distance,
    laplacian,
)


def max_err(field, exact):
    return float(np.max(np.abs(field.values - exact)))


class TestGrid1D:
    def test_invariants(self):
        with pytest.raises(ValueError):
            Grid1D(0.0, 1.0, 4)
        with pytest.raises(ValueError):
            Grid1D(1.0, 0.0, 32)
        with pytest.raises(ValueError):
            Grid1D(0.0, 1.0, 32, "reflecting")

    def test_spacing(self):
        assert Grid1D(0.0, 1.0, 11, CLAMPED).h == pytest.approx(0.1)
        assert Grid1D(0.0, 1.0, 10, PERIODIC).h == pytest.approx(0.1)

    def test_field_validation(self):
        g = Grid1D(0.0, 1.0, 16)
        with pytest.raises(ValueError):
            RealField(g, np.zeros(17))
        with pytest.raises(ValueError):
            RealField(g, np.full(16, np.nan))
        ComplexField(g, np.zeros(16, dtype=complex))


class TestGradient:
    def test_linear_clamped(self):
        g = Grid1D(-2.0, 3.0, 41, CLAMPED)
        f = RealField(g, 3.0 * g.points)
        assert max_err(gradient(f), 3.0) < 1e-12

    def test_constant(self):
        g = Grid1D(0.0, 1.0, 32, PERIODIC)
        assert max_err(gradient(RealField(g, np.full(32, 7.5))), 0.0) == 0.0

    def test_sin_periodic_richardson(self):
        # halving h must cut the max error ~4x (second order)
        L = 2.0
        errs = []
        for n in (64, 128):
            g = Grid1D(0.0, L, n, PERIODIC)
            k = 2 * np.pi / L
            f = RealField(g, np.sin(k * g.points))
            errs.append(max_err(gradient(f), k * np.cos(k * g.points)))
        assert 3.5 < errs[0] / errs[1] < 4.5


class TestLaplacian:
    def test_linear_zero(self):
        g = Grid1D(0.0, 2.0, 32, CLAMPED)
        assert max_err(laplacian(RealField(g, 5.0 - 2.0 * g.points)), 0.0) < 1e-10

    def test_quadratic_interior(self):
        g = Grid1D(-1.0, 1.0, 33, CLAMPED)
        lap = laplacian(RealField(g, g.points**2))
        assert max_err(lap, 2.0) < 1e-9

    def test_sin_periodic_richardson(self):
        L, errs = 4.0, []
        for n in (64, 128):
            g = Grid1D(0.0, L, n, PERIODIC)
            k = 2 * np.pi * 2 / L
            f = RealField(g, np.sin(k * g.points))
            errs.append(max_err(laplacian(f), -(k**2) * np.sin(k * g.points)))
        assert 3.5 < errs[0] / errs[1] < 4.5


class TestIntegrate:
    def test_unit_constant(self):
        g = Grid1D(0.0, 3.0, 61, CLAMPED)
        assert integrate(RealField(g, np.ones(61))) == pytest.approx(3.0, abs=1e-14)

    def test_normalized_gaussian(self):
        g = Grid1D(-10.0, 10.0, 401, CLAMPED)
        x = g.points
        rho = np.exp(-(x**2)) / np.sqrt(np.pi)
        assert integrate(RealField(g, rho)) == pytest.approx(1.0, abs=1e-8)

    def test_sin_periodic_zero(self):
        g = Grid1D(0.0, 5.0, 50, PERIODIC)
        f = RealField(g, np.sin(2 * np.pi * g.points / 5.0))
        assert abs(integrate(f)) < 1e-12

    def test_gradient_telescopes(self):
        g = Grid1D(0.0, 1.0, 64, PERIODIC)
        f = RealField(g, np.exp(np.sin(2 * np.pi * g.points)))
        assert abs(integrate(gradient(f))) < 1e-12


class TestL1Distance:
    def test_identical(self):
        g = Grid1D(0.0, 1.0, 32)
        f = RealField(g, np.random.default_rng(0).random(32))
        assert l1_distance(f, f) == 0.0

    def test_disjoint_bumps(self):
        g = Grid1D(0.0, 10.0, 501, CLAMPED)
        x = g.points

        def bump(c):
            v = np.exp(-((x - c) ** 2) / 0.02)
            return v / integrate(RealField(g, v))

        f, h = RealField(g, bump(2.5)), RealField(g, bump(7.5))
        assert l1_distance(f, h) == pytest.approx(2.0, abs=1e-6)

    def test_direct_summation_oracle(self):
        g = Grid1D(0.0, 1.0, 64, PERIODIC)
        rng = np.random.default_rng(3)
        eps = rng.standard_normal(64)
        eps -= eps.mean()
        f = RealField(g, np.ones(64))
        gfield = RealField(g, np.ones(64) + eps)
        oracle = float(np.sum(np.abs(eps)) * g.h)  # plain Riemann sum
        assert l1_distance(f, gfield) == pytest.approx(oracle, rel=1e-13)

    def test_symmetry_and_mismatch(self):
        g = Grid1D(0.0, 1.0, 32)
        rng = np.random.default_rng(1)
        f = RealField(g, rng.random(32))
        h = RealField(g, rng.random(32))
        assert l1_distance(f, h) == l1_distance(h, f) >= 0
        with pytest.raises(GridMismatchError):
            l1_distance(f, RealField(Grid1D(0.0, 1.0, 33), rng.random(33)))
