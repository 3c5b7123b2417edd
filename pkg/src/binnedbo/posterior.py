"""Binned predictive posteriors and the two expected-improvement rules.

A binned (discrete) posterior is a set of ascending support values with
probability masses. Expected improvement over such a posterior is an exact
O(K) sum; for a Gaussian posterior the classical closed form applies, and
discretizing the Gaussian makes the two agree in the limit of many bins.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

__all__ = [
    "DiscretePosterior",
    "GaussianPosterior",
    "moments",
    "closed_form_ei",
    "dei",
    "discretize_gaussian",
    "feasibility_mass",
]

# Probability vectors further than this from unit mass are rejected rather
# than silently renormalized.
PROB_SUM_TOL = 1e-6


@dataclass(frozen=True)
class DiscretePosterior:
    """Probability masses on strictly ascending support values."""

    centers: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        centers = np.asarray(self.centers, dtype=float)
        probs = np.asarray(self.probs, dtype=float)
        if centers.ndim != 1 or probs.shape != centers.shape or centers.size < 1:
            raise ValueError("centers and probs must be equal-length 1-d arrays")
        if centers.size > 1 and not np.all(np.diff(centers) > 0):
            raise ValueError("centers must be strictly ascending")
        if np.any(probs < 0):
            raise ValueError("probabilities must be nonnegative")
        total = probs.sum()
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise ValueError(f"probabilities sum to {total!r}, expected 1")
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "probs", probs / total)

    @property
    def num_bins(self) -> int:
        return self.centers.size


@dataclass(frozen=True)
class GaussianPosterior:
    mean: float
    std: float

    def __post_init__(self):
        if self.std < 0:
            raise ValueError("std must be nonnegative")


def moments(p: DiscretePosterior) -> tuple[float, float]:
    """Mean and variance of a binned posterior."""
    mean = float(p.centers @ p.probs)
    variance = float(((p.centers - mean) ** 2) @ p.probs)
    return mean, max(variance, 0.0)


def closed_form_ei(g: GaussianPosterior, f_star: float) -> float:
    """Classical Gaussian expected improvement above the incumbent."""
    delta = g.mean - f_star
    if g.std == 0.0:
        return max(delta, 0.0)
    z = delta / g.std
    value = delta * norm.cdf(z) + g.std * norm.pdf(z)
    return max(float(value), 0.0)


def dei(p: DiscretePosterior, f_star: float) -> float:
    """Expected improvement computed exactly over the bins."""
    return float(np.maximum(p.centers - f_star, 0.0) @ p.probs)


def dei_batch(centers: np.ndarray, probs: np.ndarray, f_star: float) -> np.ndarray:
    """Row-wise `dei` over (n, K) center/mass arrays."""
    return np.einsum("ij,ij->i", np.maximum(centers - f_star, 0.0), probs)


def discretize_gaussian(
    g: GaussianPosterior, num_bins: int, span_sigmas: float = 8.0
) -> DiscretePosterior:
    """Equal-width binning of a Gaussian over mean +/- span_sigmas * std,
    with the two tails folded into the end bins."""
    if num_bins < 1:
        raise ValueError("num_bins must be at least 1")
    if span_sigmas <= 0:
        raise ValueError("span_sigmas must be positive")
    if g.std == 0.0:
        raise ValueError("zero-variance Gaussian: use a single-bin point mass")
    if num_bins == 1:
        return DiscretePosterior(np.array([g.mean]), np.array([1.0]))
    edges = np.linspace(
        g.mean - span_sigmas * g.std, g.mean + span_sigmas * g.std, num_bins + 1
    )
    cdf = norm.cdf(edges, loc=g.mean, scale=g.std)
    probs = np.diff(cdf)
    probs[0] += cdf[0]
    probs[-1] += 1.0 - cdf[-1]
    centers = 0.5 * (edges[:-1] + edges[1:])
    return DiscretePosterior(centers, probs / probs.sum())


def point_mass(value: float) -> DiscretePosterior:
    return DiscretePosterior(np.array([float(value)]), np.array([1.0]))


def feasibility_mass(p: DiscretePosterior, threshold: float) -> float:
    """Probability mass at or above the threshold."""
    return float(p.probs[p.centers >= threshold].sum())
