"""Smoke tests for the Python bindings: every exposed operation runs and
returns sane values. Numeric depth lives in the C++ test suite; these checks
guard the binding layer (shapes, dtypes, argument plumbing, determinism)."""

import numpy as np
import pytest

import cps


def test_prox_scalar_and_vector():
    # large dispersion ~ identity, small ~ hard threshold at the origin
    assert cps.prox_cauchy(3.0, 1000.0, 1.0) == pytest.approx(3.0, rel=1e-4)
    assert cps.prox_cauchy(0.0, 0.5, 1.0) == 0.0
    x = np.linspace(-5, 5, 41)
    z = cps.prox_cauchy(x, 1.0, 1.0)
    assert z.shape == x.shape
    assert np.all(np.abs(z) <= np.abs(x) + 1e-15)
    np.testing.assert_allclose(z, -cps.prox_cauchy(-x, 1.0, 1.0), atol=1e-14)

    np.testing.assert_allclose(cps.prox_l1(np.array([-2.0, 0.3, 2.0]), 1.0),
                               [-1.0, 0.0, 1.0], atol=1e-15)
    np.testing.assert_allclose(cps.prox_hard(np.array([-2.0, 0.3, 2.0]), 1.0),
                               [-2.0, 0.0, 2.0], atol=1e-15)


def test_tv_prox_preserves_mean():
    rng = np.random.default_rng(1)
    x = rng.normal(size=64)
    y = cps.prox_tv_1d(x, 0.5)
    assert y.shape == x.shape
    assert y.mean() == pytest.approx(x.mean(), abs=1e-10)
    img = rng.normal(size=(16, 12))
    den = cps.prox_tv_2d(img, 0.5)
    assert den.shape == img.shape
    assert den.mean() == pytest.approx(img.mean(), abs=1e-10)


def test_policies():
    mu = 1.5
    assert cps.gamma_min_step(mu) == pytest.approx(np.sqrt(mu) / 2)
    assert cps.gamma_min_frame(0.2, 4.0) == pytest.approx(0.05)
    assert cps.step_size_policy(2.0) == pytest.approx(0.75)
    gamma, clamped = cps.gamma_policy(1.0, 10.0)
    assert gamma == pytest.approx(5.0)
    assert not clamped
    _, clamped_low = cps.gamma_policy(1.0, 0.1)
    assert clamped_low


def test_operators_roundtrip():
    op = cps.make_partial_idft(16, 64)
    assert (op.domain_dim, op.range_dim) == (128, 16)
    y = np.sin(np.arange(16.0))
    back = op.apply(op.adjoint(y))
    np.testing.assert_allclose(back, y, atol=1e-10)  # A A^T = I on the range
    assert cps.dot_test(op, trials=8, seed=3) < 1e-10

    ident = cps.make_identity(5)
    assert ident.frame_constant == pytest.approx(1.0)
    dense = cps.make_dense(np.diag([2.0, 2.0, 2.0]))
    assert dense.frame_constant == pytest.approx(4.0)
    value, converged, _ = cps.opnorm_sq(dense, tol=1e-10, max_iter=500)
    assert converged
    assert value == pytest.approx(4.0, rel=1e-8)

    conv = cps.make_conv2d(8, 8, psf_side=3, psf_sigma=1.0)
    flat = np.ones(64)
    np.testing.assert_allclose(conv.apply(flat), flat, atol=1e-12)  # unit-sum psf


def test_fb_solve_denoises():
    n = 128
    rng = np.random.default_rng(7)
    clean = np.zeros(n)
    clean[[10, 40, 90]] = [5.0, -4.0, 6.0]
    noisy = clean + 0.1 * rng.normal(size=n)
    out = cps.fb_solve(noisy, cps.make_identity(n), "cauchy", 0.8,
                       mu=1.0, lipschitz=1.0, record_history=True)
    assert out["converged"]
    assert cps.rmse(out["x_hat"], clean) < cps.rmse(noisy, clean)
    costs = out["costs"]
    assert len(costs) == out["iterations"] + 1
    assert costs[-1] <= costs[0]


def test_signals_and_metrics():
    s = cps.heavy_sine(8)
    np.testing.assert_allclose(s, [0, 4, 0, -6, -2, 2, 0, -4], atol=1e-12)
    noisy, sigma = cps.add_awgn(s, 10.0, seed=5)
    assert noisy.shape == s.shape and sigma > 0
    noisy2, sigma2 = cps.add_awgn(s, 10.0, seed=5)
    np.testing.assert_array_equal(noisy, noisy2)
    assert sigma == sigma2

    img = cps.phantom(64, 64)
    assert img.shape == (64, 64)
    assert img.min() >= 0 and img.max() <= 255
    assert cps.psnr(img, img) == pytest.approx(99.0)
    assert cps.ssim(img, img) == pytest.approx(1.0)
    assert cps.mae(np.zeros(4), np.ones(4)) == pytest.approx(1.0)


def test_denoise_1d_harness():
    out = cps.run_denoise_1d(64, 256, snr_db=4.0, trials=2, penalty="cauchy",
                             scale=0.05, seed=7, threads=2)
    assert len(out["trial_rmse"]) == 2
    assert out["mean_rmse"] == pytest.approx(np.mean(out["trial_rmse"]))
    assert out["mu"] == pytest.approx(cps.denoise_1d_mu(64, 256), rel=1e-12)
    assert len(out["example_clean"]) == 64


def test_restore_2d_harness():
    img = cps.phantom(32, 32)
    mu = cps.restore_2d_mu(img, "denoise", snr_db=15.0)
    res = cps.run_restore_2d(img, "denoise", "tv", 0.05, snr_db=15.0, seed=21,
                             max_iter=120)
    assert res["mu"] == pytest.approx(mu, rel=1e-12)
    assert res["estimate"].shape == (32, 32)
    assert res["psnr_est"] > res["psnr_degraded"] + 1.0


def test_sweeps():
    s1 = cps.sweep_gamma_1d(32, 128, 4.0, np.array([0.1, 1.0]), seed=2)
    assert len(s1["rmse"]) == 2 and np.all(np.isfinite(s1["rmse"]))
    assert s1["critical_step"] == pytest.approx(np.sqrt(1.5) / 2)

    img = cps.phantom(24, 24)
    s2 = cps.sweep_gamma_2d(img, "denoise", np.array([1.0, 10.0]), snr_db=15.0)
    assert len(s2["psnr"]) == 2 and np.all(np.isfinite(s2["psnr"]))


def test_ber_curve_smoke():
    out = cps.run_ber_curve(n_tx=4, n_rx=4, snr_grid_db=np.array([10.0]),
                            n_symbols=400, n_trials=2, seed=3, threads=2)
    for key in ("ber_zf", "ber_mmse", "ber_cauchy"):
        assert out[key].shape == (1,)
        assert 0.0 <= out[key][0] <= 1.0
    assert out["symbols_counted"] == 800
    rerun = cps.run_ber_curve(n_tx=4, n_rx=4, snr_grid_db=np.array([10.0]),
                              n_symbols=400, n_trials=2, seed=3, threads=1)
    np.testing.assert_array_equal(out["ber_cauchy"], rerun["ber_cauchy"])


def test_input_validation():
    with pytest.raises(ValueError):
        cps.run_denoise_1d(0, 16, 4.0, 1, "cauchy", 1.0)
    with pytest.raises(ValueError):
        cps.fb_solve(np.ones(4), cps.make_identity(4), "bogus", 1.0, mu=0.5)
    with pytest.raises(ValueError):
        cps.make_identity(3).apply(np.ones(4))
