"""Deterministic sampling utilities.

Every random draw in the repository flows through :class:`Rng`, a thin
wrapper over numpy's counter-based Philox bit generator keyed by
``(seed, stream)``. Philox produces the same stream on every platform, so
a fixed seed reproduces entire pipelines bit-for-bit. Parallel work must
not share one Rng; fork child streams with :meth:`Rng.spawn`.
"""

from __future__ import annotations

import numpy as np

from .space import DesignPoint, DesignSpace

__all__ = ["Rng", "uniform_sample", "latin_hypercube", "train_test_split"]


class Rng:
    """Counter-based deterministic random generator (Philox4x64 keyed by
    seed and stream id)."""

    def __init__(self, seed: int, stream: int = 0):
        self.seed = int(seed)
        self.stream = int(stream)
        key = np.array([self.seed, self.stream], dtype=np.uint64)
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def spawn(self, stream: int) -> "Rng":
        """Independent child stream derived from (seed, stream)."""
        return Rng(self.seed, stream)

    def uniform(self, low=0.0, high=1.0, size=None):
        return self._gen.uniform(low, high, size)

    def integers(self, low, high=None, size=None):
        return self._gen.integers(low, high, size)

    def permutation(self, n: int) -> np.ndarray:
        return self._gen.permutation(n)

    def standard_normal(self, size=None):
        return self._gen.standard_normal(size)


def uniform_sample(space: DesignSpace, n: int, rng: Rng) -> list[DesignPoint]:
    """Draw n points coordinate-wise uniform over the box."""
    if n < 1:
        raise ValueError("n must be at least 1")
    coords = rng.uniform(space.lower, space.upper, size=(n, space.dim))
    return [DesignPoint(space, row) for row in coords]


def latin_hypercube(space: DesignSpace, n: int, rng: Rng) -> list[DesignPoint]:
    """Stratified sample: per dimension, one jittered draw from each of n
    equal-width strata, with an independent stratum permutation per
    dimension."""
    if n < 1:
        raise ValueError("n must be at least 1")
    coords = np.empty((n, space.dim))
    for j in range(space.dim):
        strata = rng.permutation(n)
        jitter = rng.uniform(size=n)
        unit = (strata + jitter) / n
        coords[:, j] = space.lower[j] + unit * (space.upper[j] - space.lower[j])
    return [DesignPoint(space, row) for row in coords]


def train_test_split(points, values, train_fraction: float, rng: Rng):
    """Random disjoint, exhaustive partition with round(frac * n) training
    entries. Returns ((train_points, train_values), (test_points, test_values))."""
    values = np.asarray(values, dtype=float)
    n = len(points)
    if n != values.size:
        raise ValueError("points and values must have equal length")
    if n < 2:
        raise ValueError("need at least 2 observations to split")
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must lie strictly between 0 and 1")
    n_train = int(round(train_fraction * n))
    if n_train < 1 or n_train >= n:
        raise ValueError("split would leave an empty side")
    perm = rng.permutation(n)
    train_idx = np.sort(perm[:n_train])
    test_idx = np.sort(perm[n_train:])
    train = ([points[i] for i in train_idx], values[train_idx])
    test = ([points[i] for i in test_idx], values[test_idx])
    return train, test
