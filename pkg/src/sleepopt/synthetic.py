"""Seeded synthetic cohorts with planted ground truth.

Used by the experiment suite and tests because the original survey data is
not redistributable. Features are drawn uniformly over each schema field's
integer range; the label follows a logistic model on standardized features
with optional label-flip noise.
"""
from __future__ import annotations

import numpy as np

from .errors import BadNoise
from .preprocess import FeatureVector
from .schema import SurveySchema


def _uniform_moments(lo: int, hi: int) -> tuple[float, float]:
    """Mean and standard deviation of the discrete uniform on lo..hi."""
    k = hi - lo + 1
    mean = (lo + hi) / 2.0
    var = (k * k - 1) / 12.0
    return mean, np.sqrt(var) if var > 0 else 1.0


def standardize(X: np.ndarray, schema: SurveySchema) -> np.ndarray:
    """Standardize columns by their theoretical uniform-draw moments."""
    Z = np.empty_like(X, dtype=float)
    for j, f in enumerate(schema.fields):
        mean, std = _uniform_moments(f.lower_bound, f.upper_bound)
        Z[:, j] = (X[:, j] - mean) / std
    return Z


def generate_synthetic(
    n: int,
    planted: list[float] | np.ndarray,
    noise: float,
    seed: int,
    schema: SurveySchema,
    bias: float = 0.0,
) -> list[FeatureVector]:
    """Draw n records; label = Bernoulli(sigmoid(planted . z + bias)) with flips.

    A positive bias shifts the class balance toward label 1, mirroring the
    good-sleep majority seen in real survey cohorts.
    """
    if not 0 <= noise < 0.5:
        raise BadNoise(f"noise {noise} outside [0, 0.5)")
    if n <= 0:
        raise ValueError("n must be positive")
    planted = np.asarray(planted, dtype=float)
    if planted.shape != (schema.feature_count,):
        raise ValueError(
            f"planted vector has {planted.shape[0]} coefficients, "
            f"schema has {schema.feature_count} fields"
        )
    rng = np.random.default_rng(seed)
    X = np.empty((n, schema.feature_count), dtype=float)
    for j, f in enumerate(schema.fields):
        X[:, j] = rng.integers(f.lower_bound, f.upper_bound + 1, size=n)

    logits = standardize(X, schema) @ planted + bias
    p_good = 1.0 / (1.0 + np.exp(-logits))
    labels = (rng.random(n) < p_good).astype(int)
    if noise > 0:
        flips = rng.random(n) < noise
        labels = np.where(flips, 1 - labels, labels)

    return [
        FeatureVector(values=tuple(X[i]), label=int(labels[i]), record_id=i)
        for i in range(n)
    ]
