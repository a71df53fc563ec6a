import numpy as np
import pytest

from app.bdomain import AngularBelief, AngularGrid, map_update
from app.beamform import (
    AllocationProblem,
    allocate_power,
    allocation_coeffs,
    build_plan,
    crb,
    exact_fisher_info,
    fisher_info,
    plan_from_beliefs,
    select_beams,
)
from app.signal import complex_normal, steering_matrix, steering_vector


def test_fisher_closed_form_single_beam():
    # broadside beam, gamma = 0.5: J = L^2/sigma^2 * pi^2 * sum(g^2) * gamma * nt^2
    F = steering_matrix([np.pi / 2], 4) * np.sqrt(0.5)
    J = fisher_info(np.pi / 2, 1.0, F, 32, 0.16, 4)
    assert J == pytest.approx(32 ** 2 / 0.16 * np.pi ** 2 * 14 * 0.5 * 16)


def test_endfire_has_no_angle_information():
    F = steering_matrix([0.0], 8)
    assert fisher_info(0.0, 1.0, F, 64, 1.0, 8) == pytest.approx(0.0, abs=1e-20)
    assert crb(0.0, 1.0, F, 64, 1.0, 8) == np.inf


def test_fisher_is_linear_in_beam_power():
    A = steering_matrix([1.0, 2.0], 8)
    base = fisher_info(1.1, 0.7, A * np.sqrt([0.2, 0.3]), 64, 0.5, 8)
    doubled = fisher_info(1.1, 0.7, A * np.sqrt([0.4, 0.6]), 64, 0.5, 8)
    assert doubled == pytest.approx(2 * base)


def test_crb_is_reciprocal():
    F = steering_matrix([1.0], 8)
    J = fisher_info(1.0, 0.3, F, 64, 0.1, 8)
    assert crb(1.0, 0.3, F, 64, 0.1, 8) == pytest.approx(1 / J)
    J_exact = exact_fisher_info(1.0, 0.3, F, 64, 0.1, 8)
    assert crb(1.0, 0.3, F, 64, 0.1, 8, model="exact") == pytest.approx(1 / J_exact)


def test_single_receive_element_is_unestimable():
    F = steering_matrix([1.0], 8)
    assert crb(1.0, 1.0, F, 64, 0.1, 1) == np.inf


def test_fisher_matches_vectorized_norm():
    rng = np.random.default_rng(0)
    nt, nr, theta = 6, 5, 0.9
    F = complex_normal(rng, (nt, 3))
    db = -1j * np.pi * np.sin(theta) * np.arange(nr) * steering_vector(theta, nr)
    vec = np.kron(F.T, db[:, np.newaxis]) @ steering_vector(theta, nt).conj()
    expected = 16 ** 2 * 0.4 ** 2 / 0.2 * np.sum(np.abs(vec) ** 2)
    assert fisher_info(theta, 0.4, F, 16, 0.2, nr) == pytest.approx(expected)


def test_allocation_coeffs_zero_for_single_receiver():
    A = steering_matrix([1.0, 2.0], 8)
    assert np.array_equal(allocation_coeffs(A, [1.0, 2.0], 1), np.zeros((2, 2)))


def test_allocation_coeffs_reproduce_fisher():
    """J_i = L^2 pi^2 / sigma^2 * a_i^2 * sum_n gamma_n c_{i,n} for any power split"""
    nt, nr, L, sigma_z2 = 8, 6, 32, 0.3
    angles, gains = [0.8, 1.9], [0.5, 1.2]
    A = steering_matrix([1.0, 2.1], nt)
    gamma = np.array([0.35, 0.15])
    coeffs = allocation_coeffs(A, angles, nr)
    for i, (theta, gain) in enumerate(zip(angles, gains)):
        amplitude = gain * np.sin(theta)
        expected = L ** 2 * np.pi ** 2 / sigma_z2 * amplitude ** 2 * coeffs[i] @ gamma
        assert fisher_info(theta, gain, A * np.sqrt(gamma), L, sigma_z2, nr) == pytest.approx(expected)


def test_allocation_coeffs_ignore_beam_phase():
    A = steering_matrix([1.0, 2.0], 8)
    rotated = A * np.exp(1j * np.array([0.3, -2.0]))
    assert np.allclose(allocation_coeffs(A, [1.2, 1.7], 8), allocation_coeffs(rotated, [1.2, 1.7], 8))


def test_single_path_takes_best_beam():
    problem = AllocationProblem(coeffs=[[0.2, 0.9, 0.4]], amplitudes=[1.0], budget=0.5)
    result = allocate_power(problem)
    assert np.allclose(result.gamma, [0.0, 0.5, 0.0])
    assert result.t == pytest.approx(0.45)


def test_symmetric_paths_split_evenly():
    problem = AllocationProblem(coeffs=[[1.0, 0.2], [0.2, 1.0]], amplitudes=[1.0, 1.0], budget=2.0)
    result = allocate_power(problem)
    assert np.allclose(result.gamma, [1.0, 1.0])
    assert result.t == pytest.approx(1.2)


def test_allocation_matches_brute_force():
    rng = np.random.default_rng(1)
    budget = 0.5
    step = 1e-4 * budget
    gamma1 = np.arange(0.0, budget + step / 2, step)
    sweep = np.stack([gamma1, budget - gamma1])
    for _ in range(100):
        problem = AllocationProblem(rng.uniform(0.05, 1.0, (2, 2)), rng.uniform(0.5, 1.5, 2), budget)
        result = allocate_power(problem)
        brute = np.max(np.min(problem.weighted @ sweep, axis=0))

        assert result.gamma.sum() == pytest.approx(budget)
        assert np.all(result.gamma >= 0)
        assert result.t == pytest.approx(problem.objective(result.gamma))
        assert brute <= result.t + 1e-9
        assert result.t <= brute + problem.weighted.max() * step


def test_degenerate_row_gives_equal_split():
    problem = AllocationProblem(coeffs=[[0.0, 0.0], [1.0, 0.5]], amplitudes=[1.0, 1.0], budget=0.5)
    result = allocate_power(problem)
    assert result.degenerate
    assert np.allclose(result.gamma, [0.25, 0.25])
    assert result.t == 0.0


def test_non_positive_budget_rejected():
    with pytest.raises(ValueError, match="budget"):
        allocate_power(AllocationProblem([[1.0]], [1.0], 0.0))


def test_allocation_scaling():
    rng = np.random.default_rng(2)
    coeffs, amplitudes = rng.uniform(0.1, 1.0, (2, 3)), rng.uniform(0.5, 1.5, 2)
    base = allocate_power(AllocationProblem(coeffs, amplitudes, 0.5))
    scaled = allocate_power(AllocationProblem(1000 * coeffs, amplitudes, 0.5))
    assert np.allclose(scaled.gamma, base.gamma)
    assert scaled.t == pytest.approx(1000 * base.t)

    doubled = allocate_power(AllocationProblem(coeffs, amplitudes, 1.0))
    assert doubled.t == pytest.approx(2 * base.t)


def test_select_beams_strongest_paths():
    predicted = [(1.0, 0.5), (2.0, 0.9)]
    one = select_beams(predicted, 1, 8)
    assert one.path_ids == (2,) and one.angles == (2.0,)
    assert one.A.shape == (8, 1)

    two = select_beams(predicted, 2, 8)
    assert two.path_ids == (1, 2)

    three = select_beams(predicted, 3, 8)
    assert three.path_ids == (1, 2, 2)
    assert np.allclose(three.A[:, 2], steering_vector(2.0, 8))


def test_select_beams_ties_prefer_lower_id():
    assert select_beams([(1.0, 0.5), (2.0, 0.5)], 1, 8).path_ids == (1,)
    with pytest.raises(ValueError):
        select_beams([], 1, 8)


def test_equal_plan_splits_budget():
    plan = build_plan([1.0, 2.0], [1.0, 0.5], ns=2, nt=32, nr=32, budget=0.5, mode="equal")
    assert np.allclose(plan.gamma, [0.25, 0.25])
    assert plan.beamformer.total_power == pytest.approx(16.0)


def test_none_plan_single_beam_on_strongest():
    plan = build_plan([1.0, 2.0], [0.3, 0.8], ns=2, nt=16, nr=16, budget=0.5, mode="none")
    assert np.allclose(plan.gamma, [0.5, 0.0])
    assert plan.angles == (2.0, 2.0)
    assert plan.path_ids == (2, 2)
    assert np.allclose(plan.F[:, 0], np.sqrt(0.5) * steering_vector(2.0, 16))


def test_optimized_plan_within_budget_and_beats_equal():
    rng = np.random.default_rng(3)
    nt = nr = 16
    for _ in range(20):
        angles = sorted(rng.uniform(0.3, np.pi - 0.3, 2))
        gains = rng.uniform(0.1, 1.0, 2)
        opt = build_plan(angles, gains, 2, nt, nr, 0.5, "optimized")
        equal = build_plan(angles, gains, 2, nt, nr, 0.5, "equal")

        assert opt.beamformer.total_power <= nt * 0.5 * (1 + 1e-9)
        amplitudes = gains * np.sin(angles)
        problem = AllocationProblem(allocation_coeffs(opt.beamformer.A, angles, nr), amplitudes, 0.5)
        assert opt.t_star == pytest.approx(problem.objective(opt.gamma))
        assert opt.t_star >= problem.objective(equal.gamma) * (1 - 1e-9)


def test_plan_from_beliefs_uses_hard_predictions():
    grid = AngularGrid(360)
    beliefs = [AngularBelief.one_hot(360, 60), AngularBelief.one_hot(360, 250)]
    plan = plan_from_beliefs(beliefs, grid, [1.0, 0.4], ns=2, nt=8, nr=8, budget=0.5, mode="equal")
    assert plan.angles == (grid.angles[60], grid.angles[250])


@pytest.mark.slow
def test_estimator_reaches_exact_bound():
    """MAP with a flat prior at high SNR: MSE within sampling error of the exact CRB"""
    nt = nr = 4
    L, sigma_z2, n_theta = 32, 0.16, 7200
    grid = AngularGrid(n_theta)
    theta = grid.angles[grid.nearest_index(1.2)]
    F = steering_matrix([theta], nt)
    clean = L * np.outer(steering_vector(theta, nr), steering_vector(theta, nt).conj() @ F)
    prior = AngularBelief.uniform(n_theta)

    rng = np.random.default_rng(4)
    errors = []
    for _ in range(500):
        R_i = clean + complex_normal(rng, (nr, 1), sigma_z2 * L)
        errors.append(map_update(prior, R_i, F, L, sigma_z2, grid).theta - theta)

    ratio = np.mean(np.square(errors)) / crb(theta, 1.0, F, L, sigma_z2, nr, model="exact")
    assert 0.8 <= ratio <= 3.0
