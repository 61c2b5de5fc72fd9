import numpy as np
import pytest

from orliczflow.grid import make_grid
from orliczflow.modular import ModularSpace
from orliczflow.phi import PhiFunction
from orliczflow.solver import SolverConfig, SolverError, minimize, weighted_grad_norm


class Quadratic:
    def __init__(self, c):
        self.c = np.asarray(c, float)
        self.weights = np.ones_like(self.c)

    def value(self, x):
        return 0.5 * float(np.sum((x - self.c) ** 2))

    def gradient(self, x):
        return x - self.c

    def hessian(self, x, floor):
        return np.ones_like(x)


class Quartic:
    def __init__(self, w):
        self.weights = np.asarray(w, float)

    def value(self, x):
        return float(self.weights @ (x ** 4 / 4))

    def gradient(self, x):
        return self.weights * x ** 3

    def hessian(self, x, floor):
        return np.diag(self.weights * np.maximum(3 * x ** 2, floor))


class ModularMinusLinear:
    """rho_phi(x) - <g, x>."""

    def __init__(self, space, g):
        self.space, self.g = space, g
        self.weights = space.grid.weights

    def value(self, x):
        return self.space.modular(x) - self.space.grid.pairing(self.g, x)

    def gradient(self, x):
        return self.weights * (self.space.phi.deriv(x) - self.g)

    def hessian(self, x, floor):
        return self.weights * np.clip(self.space.phi.curvature(x), floor, 1 / floor)


class GradientOnly(Quadratic):
    hessian = None


def test_quadratic_in_one_newton_step():
    c = np.array([1.0, -2.0, 3.0])
    x, rep = minimize(Quadratic(c), np.zeros(3))
    np.testing.assert_allclose(x, c)
    assert rep.converged and rep.iterations <= 2


def test_quartic_minimizer_at_origin():
    tol = 1e-10
    x, rep = minimize(Quartic(np.full(5, 0.2)), np.linspace(-1, 1, 5), SolverConfig(grad_tol=tol))
    assert rep.converged
    assert np.max(np.abs(x)) <= 10 * (tol / 0.2 ** 0.5) ** (1 / 3)


def test_modular_first_order_condition(rng):
    g = make_grid(0, 1, 10)
    space = ModularSpace(g, PhiFunction.power(3.0))
    rhs = rng.standard_normal(10) * 3
    x, rep = minimize(ModularMinusLinear(space, rhs), np.zeros(10), SolverConfig(grad_tol=1e-12))
    assert rep.converged
    np.testing.assert_allclose(x, np.sign(rhs) * np.abs(rhs) ** 0.5, rtol=1e-8)


def test_gradient_fallback_without_hessian():
    c = np.array([0.5, -1.5])
    x, rep = minimize(GradientOnly(c), np.zeros(2))
    assert rep.converged
    np.testing.assert_allclose(x, c)


def test_max_iterations_reported():
    x, rep = minimize(Quartic(np.ones(2)), np.ones(2), SolverConfig(grad_tol=1e-300, max_iters=3))
    assert not rep.converged and rep.iterations == 3
    assert "maximum iterations" in rep.message


def test_non_finite_start():
    class Bad(Quadratic):
        def value(self, x):
            return np.inf

    with pytest.raises(SolverError):
        minimize(Bad([0.0]), np.ones(1))


def test_weighted_grad_norm():
    assert weighted_grad_norm(np.array([2.0, 2.0]), np.array([4.0, 1.0])) == pytest.approx(np.sqrt(5.0))


@pytest.mark.parametrize("kw", [dict(grad_tol=0), dict(shrink=1.0), dict(decrease=0.6), dict(max_iters=0)])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        SolverConfig(**kw)
