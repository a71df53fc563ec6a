import numpy as np
import pytest

from app.bdomain import (
    AngularBelief,
    AngularGrid,
    TransitionKind,
    TransitionSpec,
    band_halfwidth,
    hard_predict,
    map_update,
    propagate_belief,
    tpm_ckm_row,
    tpm_temporal_row_weights,
)
from app.signal import complex_normal, steering_matrix, steering_vector


def test_grid_spacing():
    grid = AngularGrid(7200)
    assert grid.angles[0] == 0.0
    assert grid.angles[-1] < np.pi
    assert np.allclose(np.diff(grid.angles), np.pi / 7200)
    assert grid.nearest_index(np.pi / 2) == 3600


def test_temporal_weights_example():
    w = tpm_temporal_row_weights(0.8, 2)
    assert np.allclose(w, [0.16495, 0.20619, 0.25773, 0.20619, 0.16495], atol=1e-5)


def test_temporal_weights_identity_and_normalization():
    assert np.array_equal(tpm_temporal_row_weights(0.0, 3), [0, 0, 0, 1, 0, 0, 0])
    for xi in (0.0, 0.3, 0.8, 1.0):
        for eps in (0, 1, 5, 72):
            assert tpm_temporal_row_weights(xi, eps).sum() == pytest.approx(1.0, abs=1e-12)


def test_ckm_row_is_symmetric_and_normalized():
    grid = AngularGrid(7200)
    row = tpm_ckm_row(grid.angles[2000], 1e-3, grid).pmf
    assert row.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(row[2000 - 10:2000], row[2001:2011][::-1])
    assert int(np.argmax(row)) == 2000


def test_ckm_row_narrow_limit_is_one_hot():
    grid = AngularGrid(360)
    row = tpm_ckm_row(grid.angles[100] + 0.2 * grid.step, 1e-9, grid).pmf
    assert row[100] == pytest.approx(1.0)


def test_ckm_row_random_centers():
    grid = AngularGrid(720)
    rng = np.random.default_rng(0)
    for center in rng.uniform(0, np.pi, 1000):
        assert tpm_ckm_row(center, 1e-3, grid).pmf.sum() == pytest.approx(1.0, abs=1e-12)


def test_identity_transition_keeps_belief():
    grid = AngularGrid(360)
    belief = AngularBelief(np.random.default_rng(1).dirichlet(np.ones(360)))
    spec = TransitionSpec(TransitionKind.STATIONARY, c_pi=0.0, xi=0.0, band_halfwidth=4)
    assert np.allclose(propagate_belief(belief, spec, grid).pmf, belief.pmf, atol=1e-15)


def test_full_fusion_weight_returns_ckm_row():
    grid = AngularGrid(360)
    belief = AngularBelief.one_hot(360, 12)
    spec = TransitionSpec(TransitionKind.STATIONARY, c_pi=1.0, sigma_ckm=0.01, predicted_angle=1.3)
    assert np.allclose(propagate_belief(belief, spec, grid).pmf, tpm_ckm_row(1.3, 0.01, grid).pmf)


def test_predictable_transition_ignores_belief():
    grid = AngularGrid(360)
    spec = TransitionSpec(TransitionKind.PREDICTABLE, c_pi=0.2, sigma_ckm=0.01, predicted_angle=0.7)
    out = propagate_belief(AngularBelief.one_hot(360, 300), spec, grid)
    assert np.allclose(out.pmf, tpm_ckm_row(0.7, 0.01, grid).pmf)


def test_unpredictable_transition_is_uniform():
    grid = AngularGrid(7200)
    spec = TransitionSpec(TransitionKind.UNPREDICTABLE)
    out = propagate_belief(AngularBelief.one_hot(7200, 5), spec, grid)
    assert np.allclose(out.pmf, 1 / 7200)


def test_banded_pass_conserves_mass_at_boundaries():
    grid = AngularGrid(50)
    spec = TransitionSpec(TransitionKind.STATIONARY, c_pi=0.0, xi=0.9, band_halfwidth=6)
    for index in (0, 1, 25, 48, 49):
        out = propagate_belief(AngularBelief.one_hot(50, index), spec, grid)
        assert out.pmf.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(out.pmf >= 0)


def test_random_propagation_invariants():
    """Valid PMFs out of every kind, and the fusion is the convex combination of its parts"""
    grid = AngularGrid(720)
    rng = np.random.default_rng(2)
    kinds = list(TransitionKind)
    for _ in range(10_000):
        belief = AngularBelief(rng.dirichlet(np.full(720, 0.2)))
        c_pi = float(rng.uniform())
        spec = TransitionSpec(
            kind=kinds[rng.integers(3)],
            c_pi=c_pi,
            xi=float(rng.uniform()),
            band_halfwidth=int(rng.integers(0, 30)),
            sigma_ckm=float(rng.uniform(1e-3, 0.1)),
            predicted_angle=float(rng.uniform(0, np.pi)),
        )
        out = propagate_belief(belief, spec, grid)
        assert abs(out.pmf.sum() - 1.0) <= 1e-12
        assert np.all(out.pmf >= 0)

        if spec.kind == TransitionKind.STATIONARY:
            temporal_only = propagate_belief(belief, TransitionSpec(
                spec.kind, 0.0, spec.xi, spec.band_halfwidth, spec.sigma_ckm, spec.predicted_angle), grid)
            ckm_row = tpm_ckm_row(spec.predicted_angle, spec.sigma_ckm, grid).pmf
            assert np.allclose(out.pmf, (1 - c_pi) * temporal_only.pmf + c_pi * ckm_row, rtol=0, atol=1e-12)


def test_belief_validation():
    with pytest.raises(ValueError):
        AngularBelief(np.array([0.5, 0.6]))
    with pytest.raises(ValueError):
        TransitionSpec(TransitionKind.STATIONARY, c_pi=1.5)


def test_hard_predict():
    grid = AngularGrid(360)
    assert hard_predict(AngularBelief.one_hot(360, 77), grid) == grid.angles[77]
    assert hard_predict(AngularBelief.uniform(360), grid) == 0.0
    pmf = np.zeros(360)
    pmf[10], pmf[200] = 0.4, 0.6
    assert hard_predict(AngularBelief(pmf), grid) == grid.angles[200]


def test_band_halfwidth():
    # 10 m/s over 20 ms at broadside: 0.2 m of travel -> 72 cells
    assert band_halfwidth(10.0, 0.02, np.pi / 2, 7200) == 72
    assert band_halfwidth(0.0, 0.02, np.pi / 2, 7200) == 1
    assert band_halfwidth(0.0, 0.02, np.pi / 2, 7200, minimum=0) == 0


def _block(theta, F, nr, L, beta=1.0):
    return L * beta * np.outer(steering_vector(theta, nr), steering_vector(theta, F.shape[0]).conj() @ F)


def test_uniform_prior_noiseless_map_is_exact():
    grid = AngularGrid(720)
    theta = grid.angles[211]
    F = steering_matrix([theta, 2.0], 8) * np.sqrt(0.5)
    update = map_update(AngularBelief.uniform(720), _block(theta, F, 8, 64), F, 64, 1e-3, grid)
    assert update.theta == theta
    assert not update.misaligned
    assert update.posterior.pmf[211] == update.posterior.pmf.max()


def test_one_hot_prior_fixes_estimate():
    grid = AngularGrid(720)
    F = steering_matrix([1.0], 8)
    update = map_update(AngularBelief.one_hot(720, 400), _block(1.0, F, 8, 64), F, 64, 1e-3, grid)
    assert update.theta == grid.angles[400]
    assert update.posterior.pmf[400] == 1.0


def test_all_candidates_orthogonal_is_misaligned():
    grid = AngularGrid(12)
    # a broadside beam on four elements is blind at cos(theta) = 0.5
    F = steering_matrix([np.pi / 2], 4)
    index = 4  # pi/3
    prior = AngularBelief.one_hot(12, index)
    update = map_update(prior, np.ones((4, 1), dtype=complex), F, 16, 1.0, grid)
    assert update.misaligned
    assert update.theta == grid.angles[index]
    assert update.posterior is prior


def test_stationary_prior_tracks_at_high_snr():
    """Prior band around the truth, 20 dB per element: within one grid step in at least 95% of trials"""
    n_theta, nt, nr, L = 7200, 32, 32, 64
    grid = AngularGrid(n_theta)
    truth_index = 2700
    theta = grid.angles[truth_index]
    F = steering_matrix([theta], nt)
    # per-element SNR |beta|^2 |a^H F|^2 / sigma_z2 = 100
    sigma_z2 = nt ** 2 / 100
    spec = TransitionSpec(TransitionKind.STATIONARY, c_pi=0.6, xi=0.8, band_halfwidth=72,
                          sigma_ckm=1e-3, predicted_angle=theta)
    prior = propagate_belief(AngularBelief.one_hot(n_theta, truth_index), spec, grid)
    rng = np.random.default_rng(3)
    hits = 0
    for _ in range(200):
        R_i = _block(theta, F, nr, L) + complex_normal(rng, (nr, 1), sigma_z2 * L)
        update = map_update(prior, R_i, F, L, sigma_z2, grid)
        hits += abs(update.theta - theta) <= grid.step + 1e-12
    assert hits >= 190
