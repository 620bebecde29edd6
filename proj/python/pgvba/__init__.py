"""Variational Bayesian restoration of images under mixed Poisson-Gaussian noise."""

from ._core import (
    degrade,
    dphi,
    exact_pg_nll_pixel,
    nltv_weights,
    phi,
    restore,
    snr,
    ssim,
    synthetic_phantom,
)

__all__ = [
    "degrade",
    "dphi",
    "exact_pg_nll_pixel",
    "nltv_weights",
    "phi",
    "restore",
    "snr",
    "ssim",
    "synthetic_phantom",
]
