"""Smoothed Frechet means of curves under time deformations."""

from ._curvemean import (
    __version__,
    alignment_criterion,
    benchmark,
    euclidean_mean,
    flow,
    frechet_mean,
    gcv_cutoff,
    procrustes_mean,
    simulate,
    smooth,
)

__all__ = [
    "__version__",
    "alignment_criterion",
    "benchmark",
    "euclidean_mean",
    "flow",
    "frechet_mean",
    "gcv_cutoff",
    "procrustes_mean",
    "simulate",
    "smooth",
]
