import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from orliczflow.energies import Energy, dirichlet_laplacian
from orliczflow.grid import TimeGrid, make_grid, node_profile
from orliczflow.modular import ModularSpace
from orliczflow.phi import PhiFunction
from orliczflow.proximal import (ProximalOperator, chain_rule_residual, inclusion_residual, moreau_yosida_value,
                                 resolvent, resolvent_convergence, resolvent_slices, yosida)
from orliczflow.stepper import Problem, ZeroSource, solve


def quadratic(n):
    g = make_grid(0.0, 1.0, n)
    return ProximalOperator(ModularSpace(g, PhiFunction.power(2.0)), Energy.m_laplacian(g, 2.0))


def nonlinear(n):
    g = make_grid(0.0, 1.0, n)
    return ProximalOperator(ModularSpace(g, PhiFunction.power_log(2.0, 1.0)),
                            Energy.m_laplacian(g, node_profile({"ramp": [1.8, 2.5]}, g)))


Q16, NL16 = quadratic(16), nonlinear(16)
u16 = arrays(float, 16, elements=st.floats(-3, 3))


def test_zero_energy_is_identity(rng):
    g = make_grid(0, 1, 8)
    P = ProximalOperator(ModularSpace(g, PhiFunction.power_log(2.0, 1.0)), Energy.zero(g))
    u = rng.standard_normal(8)
    for lam in (1.0, 0.1):
        np.testing.assert_allclose(resolvent(P, lam, u), u)
        np.testing.assert_allclose(yosida(P, lam, u), 0.0)
        assert moreau_yosida_value(P, lam, u) == 0.0
    rows = resolvent_convergence(P, u, [1.0, 0.5])
    assert all(r["distance"] == 0.0 for r in rows)


def test_quadratic_resolvent_and_yosida(rng):
    L = dirichlet_laplacian(Q16.space.grid)
    u = rng.standard_normal(16)
    for lam in (1.0, 0.1, 1e-3):
        ref = np.linalg.solve(np.eye(16) + lam * L, u)
        J = resolvent(Q16, lam, u)
        np.testing.assert_allclose(J, ref, atol=1e-10)
        np.testing.assert_allclose(yosida(Q16, lam, u, J), L @ ref, rtol=1e-7, atol=1e-7)


def test_quadratic_moreau_yosida_value():
    P = quadratic(4)
    g = P.space.grid
    L = dirichlet_laplacian(g)
    u = np.array([0.3, -1.0, 2.0, 0.5])
    lam = 0.1
    ref = 0.5 * g.pairing(u, L @ np.linalg.solve(np.eye(4) + lam * L, u))
    assert moreau_yosida_value(P, lam, u) == pytest.approx(ref, rel=1e-10)


def test_zero_input():
    assert moreau_yosida_value(NL16, 0.5, np.zeros(16)) == 0.0
    np.testing.assert_array_equal(resolvent(NL16, 0.5, np.zeros(16)), 0.0)


@settings(max_examples=15)
@given(u=u16, lam=st.sampled_from([1.0, 0.25, 1 / 64]))
def test_sandwich(u, lam):
    for P in (Q16, NL16):
        J = resolvent(P, lam, u)
        E_lam = moreau_yosida_value(P, lam, u, J)
        assert P.energy.value(J) <= E_lam + 1e-12
        assert E_lam <= P.energy.value(u) + 1e-10


@settings(max_examples=10)
@given(u=u16)
def test_inclusion_residual_small(u):
    for lam in (1.0, 0.1):
        assert inclusion_residual(NL16, lam, u) <= 1e-12


def test_yosida_bounded_in_lambda(rng):
    u = np.sin(np.pi * Q16.space.grid.nodes) + 0.1 * rng.standard_normal(16)
    bound = Q16.space.dual_modular(Q16.energy.gradient(u))
    vals = [Q16.space.dual_modular(yosida(Q16, lam, u)) for lam in (1.0, 0.5, 0.25)]
    assert max(vals) <= bound


def test_distance_first_order_in_lambda():
    P = quadratic(64)
    u = 0.1 * np.sin(np.pi * P.space.grid.nodes)
    rows = resolvent_convergence(P, u)
    d = np.array([r["distance"] for r in rows])
    assert np.all(np.diff(d) < 0)
    # asymptotic regime: halving lambda halves the distance within 10%
    ratios = d[1:] / d[:-1]
    assert np.all(ratios[-4:] <= 0.55)
    assert all(r["E_J"] <= r["E_u"] for r in rows)


def test_resolvent_slices(rng):
    U = rng.standard_normal((3, 16))
    S = resolvent_slices(NL16, 0.1, U)
    for k in range(3):
        np.testing.assert_allclose(S[k], resolvent(NL16, 0.1, U[k]))


def test_bad_inputs():
    with pytest.raises(ValueError):
        resolvent(Q16, 0.0, np.zeros(16))
    with pytest.raises(ValueError):
        ProximalOperator(Q16.space, Energy.zero(make_grid(0, 1, 8)))


def _heat(K):
    P = quadratic(16)
    g = P.space.grid
    prob = Problem(P.space, P.energy, TimeGrid(1.0, K), np.sin(np.pi * g.nodes), ZeroSource(16))
    return P, solve(prob)


def test_chain_rule_residual_quadratic_closed_form():
    P, traj = _heat(16)
    L = dirichlet_laplacian(P.space.grid)
    tau = traj.tg.tau
    d = traj.rates
    expected = sum(0.5 * tau ** 2 * P.space.grid.pairing(L @ dk, dk) for dk in d)
    assert chain_rule_residual(P, traj, traj.eta, 0, 16) == pytest.approx(expected, rel=1e-8)
    assert chain_rule_residual(P, traj, traj.eta, 5, 5) == 0.0
    with pytest.raises(IndexError):
        chain_rule_residual(P, traj, traj.eta, 3, 17)


def test_chain_rule_residual_constant_trajectory():
    P, traj = _heat(4)
    traj.us[:] = traj.us[0]
    assert chain_rule_residual(P, traj, np.zeros((4, 16)), 0, 4) == 0.0


def test_chain_rule_residual_refines():
    res = []
    for K in (8, 16, 32):
        P, traj = _heat(K)
        res.append(chain_rule_residual(P, traj, traj.eta, 0, K))
    assert res[0] > res[1] > res[2]
