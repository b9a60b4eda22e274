import numpy as np
import pytest

from monotone_nash.games import (
    BoxSet,
    GameDefinition,
    MissingGradientError,
    best_unilateral_improvement,
    registry,
)
from monotone_nash.solvers import (
    ConvergenceError,
    SolverSettings,
    TikhonovPoint,
    fixed_point_residual,
    path_max_norm,
    solve_tikhonov,
    solve_vi,
    tikhonov_path,
)
from oracles import solve_2x2

TIGHT = SolverSettings(tol=1e-11)


def shifted_sum_tikhonov_exact(epsilon):
    # (1 + eps) y1 + y2 = 1 and y1 + (1 + eps) y2 = 1
    return np.array(solve_2x2(1 + epsilon, 1.0, 1.0, 1 + epsilon, 1.0, 1.0))


# --- solve_tikhonov ----------------------------------------------------------


def test_bilinear_tikhonov_is_origin_for_any_epsilon():
    game = registry("bilinear")
    for eps in (2.0, 0.5, 0.01):
        point = solve_tikhonov(game, eps, TIGHT, y0=[0.8, -0.6])
        assert np.linalg.norm(point.y) <= 1e-9
        assert point.residual <= TIGHT.tol


def test_shifted_sum_tikhonov_closed_form():
    game = registry("shifted-sum")
    for eps in (1.0, 0.1, 0.01):
        point = solve_tikhonov(game, eps, TIGHT)
        assert np.linalg.norm(point.y - shifted_sum_tikhonov_exact(eps)) <= 1e-8
        assert point.epsilon == eps


def test_quadratic_tikhonov_closed_form():
    game = registry("quadratic-strong")
    eps = 0.25
    exact = np.array(solve_2x2(2 + eps, 0.1, 0.1, 2 + eps, 0.6, -0.4))
    point = solve_tikhonov(game, eps, TIGHT)
    assert np.linalg.norm(point.y - exact) <= 1e-8


def test_large_epsilon_crushes_the_solution_norm():
    # closed form gives ||y(100)|| = sqrt(2)/102 ~ 0.0139 <= 0.02
    game = registry("shifted-sum")
    point = solve_tikhonov(game, 100.0, SolverSettings(tol=1e-12))
    assert np.linalg.norm(point.y) <= 0.02
    assert np.linalg.norm(point.y) == pytest.approx(np.sqrt(2) / 102, abs=1e-9)


def test_tikhonov_rejects_nonpositive_epsilon():
    with pytest.raises(ValueError):
        solve_tikhonov(registry("bilinear"), 0.0)


def test_tikhonov_feasible_and_in_budget():
    game = registry("shifted-sum")
    point = solve_tikhonov(game, 0.05, TIGHT)
    lower, upper = game.joint_bounds()
    assert np.all(point.y >= lower) and np.all(point.y <= upper)
    assert isinstance(point, TikhonovPoint)
    assert point.iterations <= TIGHT.max_iters


def test_convergence_failure_carries_residual():
    settings = SolverSettings(tol=1e-14, max_iters=3)
    with pytest.raises(ConvergenceError) as info:
        solve_tikhonov(registry("quadratic-strong"), 0.01, settings, y0=[1.0, 1.0])
    assert info.value.residual > 0
    assert info.value.iterations == 3


# --- tikhonov_path -----------------------------------------------------------


def test_path_converges_to_least_norm_point():
    game = registry("shifted-sum")
    path = tikhonov_path(game, [1.0, 0.1, 0.01, 0.001], SolverSettings(tol=1e-10))
    assert len(path) == 4
    # y(0.001) sits within sqrt(2) * (0.5 - 1/2.001) ~ 3.5e-4 of (0.5, 0.5)
    assert np.linalg.norm(path[-1].y - [0.5, 0.5]) <= 4e-4
    for point, eps in zip(path, [1.0, 0.1, 0.01, 0.001]):
        assert np.linalg.norm(point.y - shifted_sum_tikhonov_exact(eps)) <= 1e-7


def test_bilinear_path_stays_at_origin():
    path = tikhonov_path(registry("bilinear"), [1.0, 0.1, 0.01], TIGHT)
    for point in path:
        assert np.linalg.norm(point.y) <= 1e-9


def test_path_increment_bound():
    # ||y(t) - y(t-1)|| <= M_y |eps(t-1) - eps(t)| / eps(t) with M_y the
    # measured maximum path norm, both for the power-law schedule and the
    # decade schedule (a small slack absorbs the solver tolerance)
    game = registry("shifted-sum")
    for epsilons in (
        [1.0, 0.1, 0.01, 0.001],
        [t ** (-1.0 / 27.0) for t in range(2, 40)],
    ):
        path = tikhonov_path(game, list(epsilons), SolverSettings(tol=1e-11))
        bound_norm = path_max_norm(path)
        for previous, current in zip(path, path[1:]):
            lhs = np.linalg.norm(current.y - previous.y)
            rhs = bound_norm * abs(previous.epsilon - current.epsilon) / current.epsilon
            assert lhs <= rhs + 1e-9


def test_path_requires_strictly_decreasing_schedule():
    game = registry("bilinear")
    with pytest.raises(ValueError):
        tikhonov_path(game, [0.1, 0.1])
    with pytest.raises(ValueError):
        tikhonov_path(game, [0.1, 0.2])
    with pytest.raises(ValueError):
        tikhonov_path(game, [])
    with pytest.raises(ValueError):
        tikhonov_path(game, [1.0, -0.5])


def test_path_failure_carries_partial_path():
    settings = SolverSettings(tol=1e-13, max_iters=2)
    with pytest.raises(ConvergenceError) as info:
        tikhonov_path(registry("quadratic-strong"), [1.0, 0.5], settings)
    assert info.value.partial_path == []


# --- solve_vi ----------------------------------------------------------------


def test_vi_bilinear_converges_where_plain_projection_orbits():
    game = registry("bilinear")
    y = solve_vi(game, SolverSettings(tol=1e-9), y0=[0.9, -0.7])
    assert np.linalg.norm(y) <= 1e-8

    # the one-projection iteration spirals outward on this skew mapping
    # and keeps orbiting the box, never entering a neighborhood of the
    # equilibrium (its norm oscillates with the rotation phase, so the
    # assertion tracks the window minimum)
    z = np.array([0.9, -0.7])
    norms = []
    for _ in range(300):
        grad = np.array([z[1], -z[0]])
        z = np.clip(z - 0.5 * grad, -1.0, 1.0)
        norms.append(np.linalg.norm(z))
    assert min(norms[100:]) >= 0.5


def test_vi_quadratic_matches_linear_solve_oracle():
    game = registry("quadratic-strong")
    y = solve_vi(game, SolverSettings(tol=1e-9), y0=[-0.9, 0.9])
    exact = np.array(solve_2x2(2.0, 0.1, 0.1, 2.0, 0.6, -0.4))
    assert np.linalg.norm(y - exact) <= 1e-6


def test_vi_shifted_sum_lands_on_solution_segment():
    game = registry("shifted-sum")
    for y0 in ([0.9, -0.5], [-0.3, 0.2], None):
        y = solve_vi(game, SolverSettings(tol=1e-9), y0=y0)
        assert abs(y.sum() - 1.0) <= 1e-6
        lower, upper = game.joint_bounds()
        assert np.all(y >= lower) and np.all(y <= upper)


def test_vi_solution_is_not_necessarily_least_norm():
    game = registry("shifted-sum")
    y = solve_vi(game, SolverSettings(tol=1e-9), y0=[0.9, -0.5])
    assert np.linalg.norm(y - [0.5, 0.5]) > 0.1


def test_vi_requires_analytic_gradients():
    game = GameDefinition(
        name="payoff-only",
        n_players=1,
        dim=1,
        action_sets=(BoxSet([-1], [1]),),
        cost=lambda i, a: a[..., 0] ** 2,
    )
    with pytest.raises(MissingGradientError):
        solve_vi(game)


@pytest.mark.parametrize("name", ["bilinear", "quadratic-strong", "shifted-sum"])
def test_vi_points_survive_grid_scan(name):
    game = registry(name)
    y = solve_vi(game, SolverSettings(tol=1e-10), y0=[0.7, -0.4])
    assert best_unilateral_improvement(game, y) <= 1e-6


def test_cross_solver_consistency_on_strongly_monotone_game():
    # the path limit approaches the unique equilibrium at rate O(eps),
    # so driving eps to 1e-8 brings it within 10x the solver tolerance
    game = registry("quadratic-strong")
    settings = SolverSettings(tol=1e-9)
    y_vi = solve_vi(game, settings, y0=[0.9, 0.9])
    path = tikhonov_path(game, [10.0**-k for k in range(0, 9)], settings)
    assert np.linalg.norm(y_vi - path[-1].y) <= 10 * settings.tol


def test_fixed_point_residual_zero_only_at_solutions():
    game = registry("quadratic-strong")
    exact = game.reference_equilibrium
    assert fixed_point_residual(game, exact, step=1.0) <= 1e-12
    assert fixed_point_residual(game, [0.9, 0.9], step=1.0) > 0.1


def test_solver_settings_validation():
    with pytest.raises(ValueError):
        SolverSettings(step=-0.1)
    with pytest.raises(ValueError):
        SolverSettings(tol=0.0)
    with pytest.raises(ValueError):
        SolverSettings(max_iters=0)
