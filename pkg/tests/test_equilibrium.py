"""Equilibrium-problem tests: pseudo-gradients, interval distance, offline solver.

Reference solutions come from independent oracles computed in the tests:
direct linear solves for quadratic problems, grid refinement for constrained
ones, and hand chain-rule evaluations for the pseudo-gradient closures.
"""

import math

import numpy as np
import pytest

from feslab import (
    BoxSet,
    EquilibriumProblem,
    GamePartition,
    InvalidInterval,
    NoConvergence,
    ShapeError,
    box_resolvent,
    dist_to_interval_grad,
    fo_pseudo_gradient,
    game_pseudo_gradient,
    identity_resolvent,
    solve_offline,
)

RBAR = 4.0 * np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
COUPLING = 0.25


# --- fo_pseudo_gradient ---------------------------------------------------


def test_fo_gradient_input_only_cost():
    # phi1 = 0.5 ||u||^2, no output term: F = u
    F = fo_pseudo_gradient(
        grad_u_phi1=lambda u, y: u,
        grad_y_phi1=lambda u, y: np.zeros(1),
        jac_h_u=lambda u: np.zeros((1, 2)),
    )
    u = np.array([1.5, -2.0])
    assert np.allclose(F(u, np.zeros(1)), u)


def test_fo_gradient_chain_rule():
    # phi1 = 0.5 ||y||^2 with sensitivity dh/du = 2 I: F = 2 y
    F = fo_pseudo_gradient(
        grad_u_phi1=lambda u, y: np.zeros_like(u),
        grad_y_phi1=lambda u, y: y,
        jac_h_u=lambda u: 2.0 * np.eye(len(u)),
    )
    y = np.array([3.0, -1.0])
    assert np.allclose(F(np.zeros(2), y), 2.0 * y)


def test_fo_gradient_quadratic_mix():
    # phi1 = 0.5 u'Hu + c'u + 0.5 rho ||y - yref||^2, h sensitivity S:
    # F = Hu + c + rho S'(y - yref); compare against numerical gradient of
    # the reduced cost u -> phi1(u, S u) at matching points
    rng = np.random.default_rng(7)
    n, m = 3, 2
    A = rng.normal(size=(n, n))
    H = A @ A.T + n * np.eye(n)
    c = rng.normal(size=n)
    S = rng.normal(size=(m, n))
    rho = 0.7
    yref = rng.normal(size=m)
    F = fo_pseudo_gradient(
        grad_u_phi1=lambda u, y: H @ u + c,
        grad_y_phi1=lambda u, y: rho * (y - yref),
        jac_h_u=lambda u: S,
    )

    def reduced(u):
        y = S @ u
        return 0.5 * u @ H @ u + c @ u + 0.5 * rho * np.sum((y - yref) ** 2)

    u = rng.normal(size=n)
    g_numeric = np.empty(n)
    h = 1e-6
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        g_numeric[i] = (reduced(u + e) - reduced(u - e)) / (2 * h)
    assert np.allclose(F(u, S @ u), g_numeric, atol=1e-5)


def test_fo_gradient_shape_check():
    F = fo_pseudo_gradient(
        grad_u_phi1=lambda u, y: u,
        grad_y_phi1=lambda u, y: y,
        jac_h_u=lambda u: np.zeros((3, 5)),  # wrong inner dimension
    )
    with pytest.raises(ShapeError):
        F(np.zeros(2), np.zeros(3))


# --- game_pseudo_gradient -------------------------------------------------


def robot_partition(n=4):
    boxes = [BoxSet(np.array([-5.0, -6.0]), np.array([10.0, 6.0])) for _ in range(n)]
    return GamePartition(agent_dims=[2] * n, boxes=boxes)


def robot_game_F(rbar=RBAR, coupling=COUPLING):
    """Stacked pseudo-gradient of the coordination game with y = positions."""
    n = len(rbar)
    part = robot_partition(n)

    def grad_ui(i):
        def g(ui, y):
            return 2.0 * (ui - rbar[i])
        return g

    def grad_yi(i):
        def g(ui, y):
            r = y.reshape(n, 2)
            return 2.0 * coupling * sum(r[i] - r[j] for j in range(n) if j != i)
        return g

    def jac(i):
        return lambda ui: np.eye(2)

    F = game_pseudo_gradient(
        part,
        [grad_ui(i) for i in range(n)],
        [grad_yi(i) for i in range(n)],
        [jac(i) for i in range(n)],
    )
    return part, F


def test_game_gradient_at_steady_state():
    # with positions equal to commands: F_i = 2(u_i - rbar_i) + 0.5 sum (u_i - u_j)
    part, F = robot_game_F()
    rng = np.random.default_rng(2)
    u = rng.normal(size=8)
    got = F(u, u.copy())
    ui = u.reshape(4, 2)
    expect = np.concatenate([
        2.0 * (ui[i] - RBAR[i]) + 2.0 * COUPLING * sum(ui[i] - ui[j] for j in range(4) if j != i)
        for i in range(4)
    ])
    assert np.allclose(got, expect)


def test_game_gradient_single_agent():
    # one agent reduces to the plain chained gradient
    box = [BoxSet(np.array([-10.0]), np.array([10.0]))]
    part = GamePartition(agent_dims=[1], boxes=box)
    F = game_pseudo_gradient(
        part,
        [lambda ui, y: 3.0 * ui],
        [lambda ui, y: y],
        [lambda ui: 2.0 * np.eye(1)],
    )
    assert np.allclose(F(np.array([1.0]), np.array([5.0])), [13.0])


def test_game_gradient_zero_at_nash():
    # closed-form equilibrium u_i* = 0.5 rbar_i + 0.125 sum rbar (sum is zero here)
    part, F = robot_game_F()
    ne = (0.5 * RBAR + 0.125 * RBAR.sum(axis=0)).ravel()
    assert np.linalg.norm(F(ne, ne.copy())) < 1e-12


# --- dist_to_interval_grad --------------------------------------------------


def test_dist_inside():
    v, g = dist_to_interval_grad(np.array([22.0]), 20.0, 25.0)
    assert v == 0.0 and g[0] == 0.0


def test_dist_above():
    v, g = dist_to_interval_grad(np.array([27.0]), 20.0, 25.0)
    assert abs(v - 2.0) < 1e-12  # 0.5 * 2^2
    assert abs(g[0] - 2.0) < 1e-12


def test_dist_below():
    v, g = dist_to_interval_grad(np.array([19.0]), 20.0, 25.0)
    assert abs(v - 0.5) < 1e-12
    assert abs(g[0] + 1.0) < 1e-12


def test_dist_vector_and_validation():
    v, g = dist_to_interval_grad(np.array([19.0, 22.0, 27.0]), 20.0, 25.0)
    assert abs(v - 2.5) < 1e-12
    assert np.allclose(g, [-1.0, 0.0, 2.0])
    with pytest.raises(InvalidInterval):
        dist_to_interval_grad(np.array([0.0]), 5.0, 1.0)


def test_dist_gradient_is_derivative():
    # finite-difference check of the gradient at random points
    rng = np.random.default_rng(9)
    for _ in range(50):
        y = rng.uniform(10, 35, size=3)
        _, g = dist_to_interval_grad(y, 20.0, 25.0)
        h = 1e-7
        for i in range(3):
            e = np.zeros(3)
            e[i] = h
            vp, _ = dist_to_interval_grad(y + e, 20.0, 25.0)
            vm, _ = dist_to_interval_grad(y - e, 20.0, 25.0)
            assert abs((vp - vm) / (2 * h) - g[i]) < 1e-5


# --- solve_offline ----------------------------------------------------------


def test_solve_offline_scalar():
    # F(u) = u - 5 unconstrained: solution 5
    prob = EquilibriumProblem(
        dim=1,
        F=lambda u, y: u - 5.0,
        resolvent=identity_resolvent(),
        lipschitz_F=1.0,
        strong_monotonicity=1.0,
        lipschitz_solution=1.0,
    )
    u = solve_offline(prob, h=lambda u: np.zeros(1), gamma=1.0, tol=1e-12)
    assert abs(u[0] - 5.0) < 1e-10


def test_solve_offline_active_box():
    # F(u) = u with box [1, 2]: solution pinned at the lower corner 1
    # oracle: grid search over the box
    box = BoxSet(np.array([1.0]), np.array([2.0]))
    grid = np.linspace(1.0, 2.0, 100001)
    oracle = grid[np.argmin(0.5 * grid**2)]
    prob = EquilibriumProblem(
        dim=1,
        F=lambda u, y: u,
        resolvent=box_resolvent(box),
        lipschitz_F=1.0,
        strong_monotonicity=1.0,
        lipschitz_solution=0.0,
    )
    u = solve_offline(prob, h=lambda u: np.zeros(1), gamma=1.0)
    assert abs(u[0] - oracle) < 1e-9
    assert abs(u[0] - 1.0) < 1e-9


def test_solve_offline_matches_direct_solve():
    # strongly convex quadratic, unconstrained: compare with linear solve
    rng = np.random.default_rng(21)
    n = 6
    A = rng.normal(size=(n, n))
    Q = A @ A.T + n * np.eye(n)
    b = rng.normal(size=n)
    m = float(np.linalg.eigvalsh(Q)[0])
    L = float(np.linalg.eigvalsh(Q)[-1])
    prob = EquilibriumProblem(
        dim=n,
        F=lambda u, y: Q @ u + b,
        resolvent=identity_resolvent(),
        lipschitz_F=L,
        strong_monotonicity=m,
        lipschitz_solution=1.0,
    )
    u = solve_offline(prob, h=lambda u: np.zeros(1), gamma=m / L**2, tol=1e-13)
    direct = np.linalg.solve(Q, -b)
    assert np.linalg.norm(u - direct) < 1e-9


def test_solve_offline_robot_nash():
    # closed loop of the coordination game at steady state y = u; the
    # equilibrium from the fixed-point iteration must match the direct
    # linear solve of the stacked stationarity system
    part, F = robot_game_F()
    prob = EquilibriumProblem(
        dim=8,
        F=F,
        resolvent=box_resolvent(part.joint_box()),
        lipschitz_F=4.0,
        strong_monotonicity=2.0,
        lipschitz_solution=1.0,
    )
    u = solve_offline(prob, h=lambda u: u.copy(), gamma=0.125, tol=1e-13)
    n = 4
    A = np.zeros((8, 8))
    rhs = np.zeros(8)
    for i in range(n):
        for d in range(2):
            row = 2 * i + d
            A[row, row] = 2.0 + 2.0 * COUPLING * (n - 1)
            for j in range(n):
                if j != i:
                    A[row, 2 * j + d] = -2.0 * COUPLING
            rhs[row] = 2.0 * RBAR[i, d]
    direct = np.linalg.solve(A, rhs)
    assert np.linalg.norm(u - direct) < 1e-9
    assert np.allclose(direct.reshape(4, 2), 0.5 * RBAR, atol=1e-12)


def test_solve_offline_no_convergence():
    prob = EquilibriumProblem(
        dim=1,
        F=lambda u, y: u - 5.0,
        resolvent=identity_resolvent(),
        lipschitz_F=1.0,
        strong_monotonicity=1.0,
        lipschitz_solution=1.0,
    )
    with pytest.raises(NoConvergence):
        solve_offline(prob, h=lambda u: np.zeros(1), gamma=1e-9, tol=1e-16, max_iters=10)


def test_problem_validation():
    with pytest.raises(InvalidInterval):
        EquilibriumProblem(dim=1, F=lambda u, y: u, resolvent=identity_resolvent(),
                           lipschitz_F=0.5, strong_monotonicity=1.0, lipschitz_solution=0.0)
