"""Seeded random-stream derivation and Gaussian sampling.

Every stochastic stage derives its generator from the scenario seed plus a
stable integer path (stream tag, index). Streams are therefore independent
of evaluation order and of how many workers the engine is allowed to use.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError

# Stream tags. Changing these changes every downstream draw.
STREAM_POPULATION = 1
STREAM_SUITORS = 2
STREAM_ROLLOUTS = 3

_PSD_TOLERANCE = 1e-8


def child_rng(seed: int, *path: int) -> np.random.Generator:
    """Generator for the stream identified by (seed, *path)."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *[int(p) for p in path]]))


def child_seed(seed: int, *path: int) -> int:
    """A derived integer seed, for APIs that take a seed rather than a generator."""
    return int(np.random.SeedSequence([int(seed), *[int(p) for p in path]]).generate_state(1)[0])


def validated_covariance(cov: np.ndarray, dim: int, field_path: str | None = None) -> np.ndarray:
    """Check that ``cov`` is a symmetric PSD (dim x dim) matrix.

    Returns the symmetrized matrix. Eigenvalues may be negative only within
    a small tolerance relative to the largest one (clipped later at sampling
    time).
    """
    cov = np.asarray(cov, dtype=np.float64)
    if cov.shape != (dim, dim):
        raise ValidationError(f"covariance must be {dim}x{dim}, got {cov.shape}", field_path)
    if not np.all(np.isfinite(cov)):
        raise ValidationError("covariance contains non-finite entries", field_path)
    scale = max(float(np.max(np.abs(cov))), 1.0)
    if np.max(np.abs(cov - cov.T)) > _PSD_TOLERANCE * scale:
        raise ValidationError("covariance is not symmetric", field_path)
    cov = (cov + cov.T) / 2.0
    eigenvalues = np.linalg.eigvalsh(cov)
    if eigenvalues.min() < -_PSD_TOLERANCE * scale:
        raise ValidationError(
            f"covariance is not positive semidefinite (min eigenvalue {eigenvalues.min():.3e})",
            field_path,
        )
    return cov


def gaussian_draws(
    rng: np.random.Generator, mean: np.ndarray, cov: np.ndarray, count: int
) -> np.ndarray:
    """Draw ``count`` vectors from N(mean, cov), clipped to [0, 1] per dimension.

    Sampling goes through the eigendecomposition: x = mean + sum_k z_k sqrt(l_k) v_k.
    A zero covariance therefore degenerates to the mean with no error.
    """
    mean = np.asarray(mean, dtype=np.float64)
    dim = mean.shape[0]
    eigenvalues, eigenvectors = np.linalg.eigh(np.asarray(cov, dtype=np.float64))
    eigenvalues = np.clip(eigenvalues, 0.0, None)
    z = rng.standard_normal((count, dim))
    draws = mean + (z * np.sqrt(eigenvalues)) @ eigenvectors.T
    return np.clip(draws, 0.0, 1.0)
