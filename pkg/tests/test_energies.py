import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from orliczflow.energies import Energy, dirichlet_laplacian, eval_energy, subgradient
from orliczflow.grid import make_grid, node_profile

from conftest import central_difference

grid16 = make_grid(0.0, 1.0, 16)
vectors16 = arrays(float, 16, elements=st.floats(-10, 10))


def test_quadratic_energy_of_parabola():
    g = make_grid(0.0, 1.0, 128)
    w = g.nodes * (1 - g.nodes)
    assert eval_energy(Energy.m_laplacian(g, 2.0), w) == pytest.approx(1 / 6, abs=1e-3)


@pytest.mark.parametrize("E", [Energy.zero(grid16), Energy.m_laplacian(grid16, 2.5), Energy.fractional(grid16, 0.3)])
def test_zero_function(E):
    assert E.value(np.zeros(16)) == 0.0
    np.testing.assert_array_equal(E.gradient(np.zeros(16)), 0.0)


@given(w=vectors16)
def test_even(w):
    E = Energy.m_laplacian(grid16, node_profile({"ramp": [1.5, 3.0]}, grid16))
    assert E.value(-w) == pytest.approx(E.value(w), rel=1e-14)


def test_quadratic_gradient_is_three_point_laplacian(rng):
    w = rng.standard_normal(16)
    g = subgradient(Energy.m_laplacian(grid16, 2.0), w)
    np.testing.assert_allclose(g, dirichlet_laplacian(grid16) @ w, rtol=1e-12, atol=1e-9)


def test_cubic_gradient_matches_difference(rng):
    E = Energy.m_laplacian(grid16, 3.0)
    w = rng.standard_normal(16)
    for _ in range(20):
        d = rng.standard_normal(16)
        fd = central_difference(E.value, w, d)
        assert grid16.pairing(E.gradient(w), d) == pytest.approx(fd, rel=1e-6)


@pytest.mark.parametrize("E", [Energy.m_laplacian(grid16, node_profile({"ramp": [1.8, 2.5]}, grid16)),
                               Energy.fractional(grid16, 0.4, c_s=2.0)])
def test_hessian_matches_gradient_difference(E, rng):
    w = rng.standard_normal(16)
    H = E.hessian(w)
    H = H.toarray() if hasattr(H, "toarray") else H
    for _ in range(5):
        d = rng.standard_normal(16)
        fd = central_difference(E.euclidean_gradient, w, d)
        np.testing.assert_allclose(H @ d, fd, rtol=1e-5, atol=1e-6 * np.max(np.abs(fd)))


@given(w=vectors16, v=vectors16, t=st.floats(0, 1))
def test_convexity(w, v, t):
    E = Energy.m_laplacian(grid16, node_profile({"ramp": [1.5, 3.0]}, grid16))
    lhs = E.value(t * w + (1 - t) * v)
    assert lhs <= (t * E.value(w) + (1 - t) * E.value(v)) * (1 + 1e-12) + 1e-12


def test_fractional_matrix_symmetric_positive():
    E = Energy.fractional(grid16, 0.5)
    M = E.hessian(np.zeros(16))
    np.testing.assert_allclose(M, M.T)
    assert np.min(np.linalg.eigvalsh(M)) > 0


def test_fractional_quadratic_form(rng):
    E = Energy.fractional(grid16, 0.25)
    w = rng.standard_normal(16)
    M = E.hessian(w)
    assert E.value(w) == pytest.approx(0.5 * w @ M @ w)
    np.testing.assert_allclose(E.gradient(w), M @ w / grid16.weights)


def test_fractional_tends_to_pairwise_sum():
    # the energy equals (c_s/4) of the sum over all ordered cell pairs, exterior included
    g = make_grid(0.0, 1.0, 8)
    s = 0.3
    E = Energy.fractional(g, s)
    w = np.sin(np.pi * g.nodes)
    x, h = g.nodes, g.h
    pair = sum(h * h * (w[i] - w[j]) ** 2 / abs(x[i] - x[j]) ** (1 + 2 * s)
               for i in range(8) for j in range(8) if i != j)
    ext = sum(2 * h * w[i] ** 2 * ((x[i]) ** (-2 * s) + (1 - x[i]) ** (-2 * s)) / (2 * s) for i in range(8))
    assert E.value(w) == pytest.approx(0.25 * (pair + ext), rel=1e-12)


def test_bad_parameters():
    with pytest.raises(ValueError):
        Energy.m_laplacian(grid16, 1.0)
    with pytest.raises(ValueError):
        Energy.fractional(grid16, 1.0)
    with pytest.raises(ValueError):
        Energy.fractional(grid16, 0.5, c_s=0.0)
    with pytest.raises(ValueError):
        Energy.m_laplacian(grid16, 2.0).value(np.zeros(3))


def test_hessian_floor_clamps_degenerate_edges():
    E = Energy.m_laplacian(grid16, 3.0)
    H = E.hessian(np.zeros(16), floor=1e-8).toarray()
    assert np.all(np.diag(H) > 0)
