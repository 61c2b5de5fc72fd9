import numpy as np
import pytest

from orliczflow.energies import Energy, dirichlet_laplacian
from orliczflow.grid import TimeGrid, make_grid, node_profile
from orliczflow.modular import ModularSpace, spacetime_modular
from orliczflow.phi import PhiFunction, delta2_constant
from orliczflow.solver import SolverConfig
from orliczflow.stepper import (ConstantSource, Mode, Nonlinearity, Problem, StepError, TableSource, ZeroSource,
                                a_priori_bound, average_source, energy_identity_report, max_regularity_report,
                                separable_source, sinusoidal_source, solve, step, verify_hp_M)


def quad_space(n):
    return ModularSpace(make_grid(0.0, 1.0, n), PhiFunction.power(2.0))


def heat(n=16, K=16, source=None, u0=None):
    sp = quad_space(n)
    g = sp.grid
    u0 = np.sin(np.pi * g.nodes) if u0 is None else u0
    return Problem(sp, Energy.m_laplacian(g, 2.0), TimeGrid(1.0, K), u0, source or ZeroSource(n))


# -- sources ---------------------------------------------------------------


def test_constant_source_average():
    tg = TimeGrid(1.0, 3)
    g = np.array([1.0, 2.0])
    for k in (1, 2, 3):
        np.testing.assert_array_equal(average_source(ConstantSource(g), k, tg), g)
    with pytest.raises(IndexError):
        average_source(ConstantSource(g), 4, tg)


def test_linear_in_time_source_average():
    tg = TimeGrid(1.0, 2)
    f = separable_source(np.ones(3), [0.0, 1.0])
    np.testing.assert_allclose(average_source(f, 1, tg), 0.25)
    np.testing.assert_allclose(average_source(f, 2, tg), 0.75)


def test_sinusoidal_average_exact():
    tg = TimeGrid(1.0, 4)
    f = sinusoidal_source(np.ones(2), amplitude=2.0, omega=3.0, offset=0.5)
    t0, t1 = 0.25, 0.5
    exact = 0.5 + 2.0 * (np.cos(3 * t0) - np.cos(3 * t1)) / (3 * (t1 - t0))
    np.testing.assert_allclose(average_source(f, 2, tg), exact, rtol=1e-12)


def test_table_source_averages_contract_dual_modular(rng):
    sp = ModularSpace(make_grid(0, 1, 6), PhiFunction.power_log(2.0, 1.0))
    values = rng.standard_normal((7, 6)) * 3
    src = TableSource(values, 1.0)
    tg = TimeGrid(1.0, 5)
    avgs = np.stack([average_source(src, k, tg) for k in range(1, 6)])
    lhs = spacetime_modular(sp.phi, sp.grid, tg, avgs, dual=True)
    rhs = spacetime_modular(sp.phi, sp.grid, TimeGrid(1.0, 7), values, dual=True)
    assert lhs <= rhs
    # averaging preserves the time integral
    np.testing.assert_allclose(avgs.sum(axis=0) / 5, values.sum(axis=0) / 7)


# -- stepping --------------------------------------------------------------


def test_heat_equation_matches_implicit_euler():
    prob = heat(32, 32)
    traj = solve(prob)
    M = np.eye(32) + prob.tg.tau * dirichlet_laplacian(prob.grid)
    u = prob.u0
    for k in range(1, 33):
        u = np.linalg.solve(M, u)
        np.testing.assert_allclose(traj.us[k], u, atol=1e-10)


def test_heat_with_constant_source():
    f = np.cos(np.linspace(0, 3, 16))
    prob = heat(source=ConstantSource(f))
    traj = solve(prob)
    M = np.eye(16) + prob.tg.tau * dirichlet_laplacian(prob.grid)
    u = prob.u0
    for k in range(1, 17):
        u = np.linalg.solve(M, u + prob.tg.tau * f)
        np.testing.assert_allclose(traj.us[k], u, atol=1e-10)


def test_zero_energy_freezes_state():
    sp = ModularSpace(make_grid(0, 1, 8), PhiFunction.power_log(2.0, 1.0))
    u0 = np.linspace(-1, 1, 8)
    traj = solve(Problem(sp, Energy.zero(sp.grid), TimeGrid(1.0, 4), u0, ZeroSource(8)))
    np.testing.assert_array_equal(traj.us, np.tile(u0, (5, 1)))


def test_equilibrium_is_stationary():
    sp = quad_space(16)
    E = Energy.m_laplacian(sp.grid, 2.0)
    u0 = np.sin(2 * np.pi * sp.grid.nodes)
    f = E.gradient(u0)
    traj = solve(Problem(sp, E, TimeGrid(1.0, 8), u0, ConstantSource(f)))
    np.testing.assert_allclose(traj.us, np.tile(u0, (9, 1)), atol=1e-12)
    r, total = energy_identity_report(traj)
    assert total <= 1e-12
    rate_q, conj_A_q, conj_eta_q = max_regularity_report(traj)
    assert rate_q <= 1e-20 and conj_A_q <= 1e-20
    assert conj_eta_q == pytest.approx(sp.dual_modular(f), rel=1e-10)


@pytest.mark.parametrize("phi", [PhiFunction.power(1.5), PhiFunction.power(3.0), PhiFunction.power_log(2.0, 1.0),
                                 PhiFunction.two_power(1.5, 3.0)])
@pytest.mark.parametrize("energy", ["m", "frac"])
def test_energy_nonincreasing_without_source(phi, energy):
    g = make_grid(0, 1, 16)
    E = Energy.m_laplacian(g, node_profile({"ramp": [1.8, 2.5]}, g)) if energy == "m" else Energy.fractional(g, 0.4)
    traj = solve(Problem(ModularSpace(g, phi), E, TimeGrid(0.5, 8), np.sin(np.pi * g.nodes), ZeroSource(16)))
    assert np.all(np.diff(traj.energy) <= 1e-14)
    assert np.max(traj.ineq_slack) <= 1e-8 * (1 + traj.energy[0])


def test_step_diagnostics():
    prob = heat()
    f = np.zeros(16)
    u1, diag = step(prob, prob.u0, f)
    assert diag.report.converged
    np.testing.assert_allclose(diag.rate, (u1 - prob.u0) / prob.tg.tau)
    np.testing.assert_allclose(diag.eta, -diag.rate)
    assert diag.el_residual <= 1e-20


def test_failure_keeps_partial_trajectory():
    prob = heat()
    prob.solver = SolverConfig(grad_tol=1e-300, max_iters=1)
    with pytest.raises(StepError) as info:
        solve(prob)
    exc = info.value
    assert exc.step == 1
    assert exc.trajectory.steps_done == 0 and not exc.trajectory.complete


def test_problem_validation():
    sp = quad_space(8)
    E = Energy.m_laplacian(sp.grid, 2.0)
    with pytest.raises(ValueError):
        Problem(sp, E, TimeGrid(1, 2), np.zeros(8), ZeroSource(8), mode=Mode.GENERALIZED)
    with pytest.raises(ValueError):
        Problem(sp, E, TimeGrid(1, 2), np.zeros(8), ZeroSource(9))
    with pytest.raises(ValueError):
        Problem(sp, E, TimeGrid(1, 2), np.zeros(7), ZeroSource(8))


# -- reports ---------------------------------------------------------------


def test_energy_identity_quadratic_closed_form():
    prob = heat()
    traj = solve(prob)
    L = dirichlet_laplacian(prob.grid)
    tau = prob.tg.tau
    expected = np.array([0.5 * tau ** 2 * prob.grid.pairing(L @ d, d) for d in traj.rates])
    r, total = energy_identity_report(traj)
    np.testing.assert_allclose(r, expected, rtol=1e-8, atol=1e-10)
    assert total == pytest.approx(expected.sum(), abs=1e-10)


def test_energy_identity_refines():
    totals = [energy_identity_report(solve(heat(K=K)))[1] for K in (8, 16, 32)]
    assert totals[0] > totals[1] > totals[2]


def test_max_regularity_heat_eigen_oracle():
    n, K = 4, 10
    prob = heat(n=n, K=K)
    traj = solve(prob)
    g, tau = prob.grid, prob.tg.tau
    mu, V = np.linalg.eigh(dirichlet_laplacian(g))
    c = V.T @ prob.u0
    total = 0.0
    for k in range(1, K + 1):
        d = V @ (((1 + tau * mu) ** -k - (1 + tau * mu) ** -(k - 1)) / tau * c)
        total += tau * float(g.weights @ (d * d / 2))
    rate_q, conj_A_q, conj_eta_q = max_regularity_report(traj)
    for val in (rate_q, conj_A_q, conj_eta_q):
        assert val == pytest.approx(total, rel=1e-8)


def test_a_priori_bound():
    traj = solve(heat(source=ConstantSource(np.ones(16))))
    lhs, rhs = a_priori_bound(traj)
    assert 0 < lhs <= rhs


# -- growth conditions -------------------------------------------------------


@pytest.mark.parametrize("phi", [PhiFunction.power(2.0), PhiFunction.power(3.0), PhiFunction.power_log(2.0, 1.0)])
def test_hp_for_alpha_itself(phi):
    sp = ModularSpace(make_grid(0, 1, 4), phi)
    res = verify_hp_M(sp, Nonlinearity.from_phi(phi))
    assert res.passed and res.alpha0 == 1.0 and res.C1 == 0.0
    K = delta2_constant(phi, r_max=1e6)
    assert res.C2 <= K - 1 + 1e-9


def test_hp_for_scaled_alpha():
    phi = PhiFunction.power_log(2.0, 1.0)
    sp = ModularSpace(make_grid(0, 1, 4), phi)
    assert verify_hp_M(sp, Nonlinearity.from_phi(phi, 2.0)).passed


def test_hp_rejects_bounded_beta():
    sp = ModularSpace(make_grid(0, 1, 4), PhiFunction.power(2.0))
    res = verify_hp_M(sp, Nonlinearity.arctan())
    assert not res.passed
    assert any("decays" in note for note in res.notes)


def test_hp_rejects_fast_beta():
    sp = ModularSpace(make_grid(0, 1, 4), PhiFunction.power(2.0))
    assert not verify_hp_M(sp, Nonlinearity.from_phi(PhiFunction.power(4.0))).passed


def test_nonlinearity_from_expression():
    b = Nonlinearity.from_expression("r + r**3")
    r = np.array([-2.0, 0.0, 0.5, 3.0])
    np.testing.assert_allclose(b.deriv(r), r + r ** 3)
    np.testing.assert_allclose(b.value(r), r ** 2 / 2 + r ** 4 / 4, rtol=1e-10)
    np.testing.assert_allclose(b.curvature(r), 1 + 3 * r ** 2)


def test_generalized_mode_with_alpha_matches():
    g = make_grid(0, 1, 16)
    phi = PhiFunction.power_log(2.0, 1.0)
    sp = ModularSpace(g, phi)
    E = Energy.m_laplacian(g, node_profile({"ramp": [1.8, 2.5]}, g))
    src = sinusoidal_source(np.sin(np.pi * g.nodes), offset=1.0)
    args = (sp, E, TimeGrid(1.0, 16), np.sin(np.pi * g.nodes), src)
    a = solve(Problem(*args))
    b = solve(Problem(*args, mode=Mode.GENERALIZED, beta=Nonlinearity.from_phi(phi)))
    np.testing.assert_allclose(a.us, b.us, atol=1e-8)


def test_generalized_mode_different_beta_runs():
    g = make_grid(0, 1, 16)
    sp = ModularSpace(g, PhiFunction.two_power(1.5, 3.0))
    beta = Nonlinearity.from_phi(PhiFunction.two_power(1.5, 3.0, a=2.0, b=0.5))
    prob = Problem(sp, Energy.m_laplacian(g, 2.0), TimeGrid(1.0, 8), np.sin(np.pi * g.nodes), ZeroSource(16),
                   Mode.GENERALIZED, beta)
    traj = solve(prob)
    assert traj.complete
    assert np.all(np.diff(traj.energy) <= 1e-14)
