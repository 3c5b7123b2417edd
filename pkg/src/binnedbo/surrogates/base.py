"""Surrogate backend contract.

A backend maps a context of (input, output) observations and a batch of
query points to one binned posterior per query. Backends carry no state
beyond the most recent context: refitting with a new context fully replaces
the old one, and identical (context, query) pairs always yield identical
posteriors.

Backends follow the scikit-learn estimator idiom: constructor arguments are
hyperparameters, ``fit(X, y)`` installs the context, and ``get_params`` /
``set_params`` come from :class:`sklearn.base.BaseEstimator`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array

from ..posterior import DiscretePosterior, moments

__all__ = ["SurrogateBackend", "InputNormalizer", "OutputStandardizer"]


@dataclass(frozen=True)
class InputNormalizer:
    """Affine map from design-space bounds to the unit cube."""

    lower: np.ndarray
    upper: np.ndarray

    @classmethod
    def from_bounds(cls, lower, upper) -> "InputNormalizer":
        lower = np.asarray(lower, dtype=float)
        upper = np.asarray(upper, dtype=float)
        return cls(lower, upper)

    @classmethod
    def from_data(cls, X: np.ndarray) -> "InputNormalizer":
        lower = X.min(axis=0)
        upper = X.max(axis=0)
        # Guard constant columns so the affine map stays invertible.
        flat = upper <= lower
        upper = np.where(flat, lower + 1.0, upper)
        return cls(lower, upper)

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (X - self.lower) / (self.upper - self.lower)


@dataclass(frozen=True)
class OutputStandardizer:
    mean: float
    std: float

    @classmethod
    def from_data(cls, y: np.ndarray) -> "OutputStandardizer":
        std = float(y.std())
        return cls(float(y.mean()), std if std > 0 else 1.0)

    def transform(self, y: np.ndarray) -> np.ndarray:
        return (y - self.mean) / self.std

    def inverse_mean(self, y: np.ndarray) -> np.ndarray:
        return y * self.std + self.mean

    def inverse_std(self, s: np.ndarray) -> np.ndarray:
        return s * self.std


class SurrogateBackend(BaseEstimator):
    """Base class for context-in / binned-posterior-out backends.

    Subclasses implement ``_fit(Xn, y)`` and ``_predict_batch(Qn)`` in
    normalized input coordinates; output de-standardization is the
    subclass's responsibility where it standardizes.
    """

    def __init__(self, bounds=None):
        self.bounds = bounds

    # -- estimator surface -------------------------------------------------
    def fit(self, X, y):
        X = check_array(np.asarray(X, dtype=float))
        y = np.asarray(y, dtype=float).ravel()
        if y.size != X.shape[0]:
            raise ValueError("X and y must have the same number of rows")
        if self.bounds is not None:
            lower, upper = self.bounds
            self._normalizer = InputNormalizer.from_bounds(lower, upper)
        else:
            self._normalizer = InputNormalizer.from_data(X)
        self._fit(self._normalizer.transform(X), y)
        return self

    # Alias emphasizing the in-context (no weight training) semantics.
    set_context = fit

    def predict_batch(self, X) -> list[DiscretePosterior]:
        if not hasattr(self, "_normalizer"):
            raise RuntimeError("backend has no context; call fit/set_context first")
        X = check_array(np.asarray(X, dtype=float))
        return self._predict_batch(self._normalizer.transform(X))

    def predict(self, X) -> np.ndarray:
        """Posterior means, for point-prediction use (e.g. regression R^2)."""
        return np.array([moments(p)[0] for p in self.predict_batch(X)])

    # -- subclass hooks ----------------------------------------------------
    def _fit(self, Xn: np.ndarray, y: np.ndarray) -> None:
        raise NotImplementedError

    def _predict_batch(self, Qn: np.ndarray) -> list[DiscretePosterior]:
        raise NotImplementedError
