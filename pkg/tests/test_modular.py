import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from orliczflow.grid import Grid, TimeGrid, make_grid
from orliczflow.modular import (ModularSpace, apply_A, gauge_norm, holder_check, luxemburg_norm, modular,
                                spacetime_modular)
from orliczflow.phi import PhiFunction

N = 12
grid = make_grid(0.0, 1.0, N)
SPACES = {
    "power2": ModularSpace(grid, PhiFunction.power(2.0)),
    "power3": ModularSpace(grid, PhiFunction.power(3.0)),
    "power_log": ModularSpace(grid, PhiFunction.power_log(2.0, 1.0)),
    "two_power": ModularSpace(grid, PhiFunction.two_power(1.5, 3.0)),
}
vectors = arrays(float, N, elements=st.floats(-1e3, 1e3)).filter(lambda v: np.max(np.abs(v)) > 1e-3)


@pytest.fixture(scope="module", params=sorted(SPACES))
def space(request):
    return SPACES[request.param]


def test_constant_quadratic():
    sp = SPACES["power2"]
    assert sp.modular(np.full(N, 3.0)) == pytest.approx(4.5 * grid.measure)
    assert sp.modular(np.zeros(N)) == 0.0
    assert sp.norm(np.zeros(N)) == 0.0


def test_unit_weight_norm():
    sp = ModularSpace(Grid.with_weights([1.0]), PhiFunction.power(2.0))
    assert sp.norm(np.ones(1)) == pytest.approx(1 / math.sqrt(2), rel=1e-12)


@pytest.mark.parametrize("n", [10, 100, 1000])
def test_two_cell_modular_and_norm(n):
    L = math.log1p(n)
    E = 1.0 / (n * L * L)
    sp = ModularSpace(Grid.with_weights([E, 1 - E]), PhiFunction.from_expression("r*log(1+r)**2"), validate=False)
    v = np.array([n * L, 0.0])
    assert sp.modular(v) == pytest.approx(math.log1p(n * L) ** 2 / L, rel=1e-12)
    assert sp.norm(v) == pytest.approx(L, abs=1e-6)


def test_validation_on_construction():
    with pytest.raises(ValueError, match="delta2_conjugate"):
        ModularSpace(grid, PhiFunction.from_expression("r*log(1+r)**2"))
    with pytest.raises(ValueError):
        ModularSpace(grid, PhiFunction.power(np.full(N + 1, 2.0)))


@given(v=vectors)
def test_unit_ball(space, v):
    assert space.modular(v / space.norm(v)) == pytest.approx(1.0, abs=1e-8)


@given(v=vectors, c=st.floats(-50, 50).filter(lambda c: abs(c) > 1e-3))
def test_norm_homogeneous(space, v, c):
    assert space.norm(c * v) == pytest.approx(abs(c) * space.norm(v), rel=1e-10)


@given(u=vectors, v=vectors)
def test_triangle_inequality(space, u, v):
    assert space.norm(u + v) <= (space.norm(u) + space.norm(v)) * (1 + 1e-10)


@given(u=vectors, v=vectors)
def test_holder(space, u, v):
    lhs, rhs = holder_check(space, u, v)
    assert lhs <= rhs * (1 + 1e-10)


def test_holder_examples():
    sp = ModularSpace(Grid.with_weights([1.0]), PhiFunction.power(2.0))
    assert holder_check(sp, np.zeros(1), np.zeros(1)) == (0.0, 0.0)
    lhs, rhs = holder_check(sp, np.ones(1), np.ones(1))
    assert lhs == 1.0 and rhs == pytest.approx(1.0, rel=1e-12)


@given(v=vectors)
def test_fenchel_identity_for_modulars(space, v):
    A = space.A(v)
    assert grid.pairing(A, v) == pytest.approx(space.modular(v) + space.dual_modular(A), rel=1e-8)


def test_duality_map_examples():
    v = np.linspace(-2, 2, N)
    np.testing.assert_array_equal(apply_A(SPACES["power2"], v), v)
    np.testing.assert_array_equal(SPACES["power3"].A(np.zeros(N)), 0.0)
    sp = ModularSpace(Grid.with_weights([1.0]), PhiFunction.power(3.0))
    v = np.array([2.0])
    assert float(sp.A(v) @ v) == 8.0
    assert sp.modular(v) == pytest.approx(8 / 3)
    assert sp.dual_modular(sp.A(v)) == pytest.approx(16 / 3)


def test_dual_norm_of_quadratic_is_norm():
    v = np.linspace(-1, 3, N)
    sp = SPACES["power2"]
    assert sp.dual_norm(v) == pytest.approx(sp.norm(v), rel=1e-12)
    assert luxemburg_norm(sp, v, dual=True) == sp.dual_norm(v)


def test_gauge_norm_generic():
    # rho(v) = sum |v|: the gauge is the l1 norm
    v = np.array([1.0, -2.0, 0.5])
    assert gauge_norm(lambda z: float(np.sum(np.abs(z))), v) == pytest.approx(3.5, rel=1e-12)


def test_modular_rejects_wrong_length():
    with pytest.raises(ValueError):
        modular(SPACES["power2"], np.zeros(N + 1))


def test_spacetime_modular():
    phi = PhiFunction.power(2.0)
    sp = SPACES["power2"]
    tg = TimeGrid(2.0, 2)
    v1, v2 = np.linspace(0, 1, N), np.linspace(1, -1, N)
    assert spacetime_modular(phi, grid, tg, np.zeros((2, N))) == 0.0
    assert spacetime_modular(phi, grid, tg, np.stack([v1, v1])) == pytest.approx(2.0 * sp.modular(v1))
    assert spacetime_modular(phi, grid, tg, np.stack([v1, v2])) == pytest.approx(sp.modular(v1) + sp.modular(v2))
    assert spacetime_modular(phi, grid, tg, np.stack([v1, v2]), dual=True) == pytest.approx(
        sp.dual_modular(v1) + sp.dual_modular(v2))
    with pytest.raises(ValueError):
        spacetime_modular(phi, grid, tg, np.zeros((3, N)))
