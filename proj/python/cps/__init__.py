"""Cauchy proximal splitting: non-convex sparse regularization with a
convergence-guaranteed forward-backward solver.

The heavy lifting lives in the C++ extension ``cps._core``; this package
re-exports its public surface.
"""

from cps._core import (
    LinearOperator,
    add_awgn,
    cauchy_neglog,
    denoise_1d_mu,
    dot_test,
    fb_solve,
    gamma_min_frame,
    gamma_min_step,
    gamma_policy,
    heavy_sine,
    mae,
    make_conv2d,
    make_dense,
    make_identity,
    make_partial_idft,
    opnorm_sq,
    phantom,
    prox_cauchy,
    prox_hard,
    prox_l1,
    prox_tv_1d,
    prox_tv_2d,
    psnr,
    restore_2d_mu,
    rmse,
    run_ber_curve,
    run_denoise_1d,
    run_restore_2d,
    ssim,
    step_size_policy,
    sweep_gamma_1d,
    sweep_gamma_2d,
)

__version__ = "0.1.0"

__all__ = [
    "LinearOperator",
    "add_awgn",
    "cauchy_neglog",
    "denoise_1d_mu",
    "dot_test",
    "fb_solve",
    "gamma_min_frame",
    "gamma_min_step",
    "gamma_policy",
    "heavy_sine",
    "mae",
    "make_conv2d",
    "make_dense",
    "make_identity",
    "make_partial_idft",
    "opnorm_sq",
    "phantom",
    "prox_cauchy",
    "prox_hard",
    "prox_l1",
    "prox_tv_1d",
    "prox_tv_2d",
    "psnr",
    "restore_2d_mu",
    "rmse",
    "run_ber_curve",
    "run_denoise_1d",
    "run_restore_2d",
    "ssim",
    "step_size_policy",
    "sweep_gamma_1d",
    "sweep_gamma_2d",
]
