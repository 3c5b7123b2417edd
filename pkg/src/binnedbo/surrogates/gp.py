"""Gaussian-process backend with RBF, Matern-5/2, and linear kernels.

Hyperparameters (isotropic lengthscale, signal variance, noise variance)
are selected by maximizing the log marginal likelihood with a derivative-
free multi-start coordinate search in log space, which is deterministic
given the seed. Inference is the standard Cholesky solve with escalating
jitter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.spatial.distance import cdist

from ..posterior import DiscretePosterior, GaussianPosterior, discretize_gaussian, point_mass
from ..sampling import Rng
from .base import OutputStandardizer, SurrogateBackend

__all__ = ["GpHyperparams", "GpFitError", "kernel_eval", "kernel_matrix", "GpBackend"]

KERNELS = ("rbf", "matern52", "linear")
LINEAR_BIAS = 1e-6

LN10 = math.log(10.0)
# Search box in natural-log space: lengthscale 1e-3..1e3, signal variance
# 1e-2..1e2, noise variance 1e-8..1.
LOG_BOUNDS = np.array([[-3 * LN10, 3 * LN10], [-2 * LN10, 2 * LN10], [-8 * LN10, 0.0]])
RESTARTS = 5
EVALS_PER_RESTART = 60

JITTERS = (1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2)


class GpFitError(RuntimeError):
    """Cholesky factorization failed even at maximum jitter."""


@dataclass(frozen=True)
class GpHyperparams:
    log_lengthscale: float
    log_signal_variance: float
    log_noise_variance: float
    kernel: str

    def __post_init__(self):
        if self.kernel not in KERNELS:
            raise ValueError(f"unknown kernel {self.kernel!r}")

    @property
    def lengthscale(self) -> float:
        return math.exp(self.log_lengthscale)

    @property
    def signal_variance(self) -> float:
        return math.exp(self.log_signal_variance)

    @property
    def noise_variance(self) -> float:
        return max(math.exp(self.log_noise_variance), 1e-8)


def kernel_matrix(hp: GpHyperparams, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    sf2 = hp.signal_variance
    if hp.kernel == "linear":
        return sf2 * (A @ B.T) + LINEAR_BIAS
    r = cdist(A, B)
    ell = hp.lengthscale
    if hp.kernel == "rbf":
        return sf2 * np.exp(-0.5 * (r / ell) ** 2)
    s = math.sqrt(5.0) * r / ell
    return sf2 * (1.0 + s + s**2 / 3.0) * np.exp(-s)


def kernel_eval(kind: str, hp: GpHyperparams, a, b) -> float:
    hp = GpHyperparams(hp.log_lengthscale, hp.log_signal_variance, hp.log_noise_variance, kind)
    A = np.atleast_2d(np.asarray(a, dtype=float))
    B = np.atleast_2d(np.asarray(b, dtype=float))
    return float(kernel_matrix(hp, A, B)[0, 0])


def kernel_diag(hp: GpHyperparams, A: np.ndarray) -> np.ndarray:
    if hp.kernel == "linear":
        return hp.signal_variance * np.einsum("ij,ij->i", A, A) + LINEAR_BIAS
    return np.full(A.shape[0], hp.signal_variance)


def _chol_with_jitter(K: np.ndarray):
    for jitter in JITTERS:
        try:
            return cho_factor(K + jitter * np.eye(K.shape[0]), lower=True), jitter
        except np.linalg.LinAlgError:
            continue
    raise GpFitError("Cholesky failed at maximum jitter")


def log_marginal_likelihood(Xn: np.ndarray, y: np.ndarray, hp: GpHyperparams) -> float:
    n = Xn.shape[0]
    K = kernel_matrix(hp, Xn, Xn) + hp.noise_variance * np.eye(n)
    try:
        (L, lower), _ = _chol_with_jitter(K)
    except GpFitError:
        return -np.inf
    alpha = cho_solve((L, lower), y)
    return float(
        -0.5 * y @ alpha - np.log(np.diag(L)).sum() - 0.5 * n * math.log(2 * math.pi)
    )


def _lhs_starts(rng: Rng, n: int) -> np.ndarray:
    starts = np.empty((n, 3))
    for j in range(3):
        strata = rng.permutation(n)
        jitter = rng.uniform(size=n)
        unit = (strata + jitter) / n
        lo, hi = LOG_BOUNDS[j]
        starts[:, j] = lo + unit * (hi - lo)
    return starts


def fit_hyperparams(Xn: np.ndarray, y: np.ndarray, kernel: str, rng: Rng) -> GpHyperparams:
    """Multi-start coordinate search maximizing the log marginal likelihood."""
    if Xn.shape[0] < 2:
        raise ValueError("hyperparameter fitting needs a context of size >= 2")

    def objective(theta):
        return log_marginal_likelihood(
            Xn, y, GpHyperparams(theta[0], theta[1], theta[2], kernel)
        )

    best_theta, best_val = None, -np.inf
    for start in _lhs_starts(rng, RESTARTS):
        theta = start.copy()
        val = objective(theta)
        evals = 1
        step = LN10  # one decade
        while evals < EVALS_PER_RESTART and step > 1e-3:
            improved = False
            for j in range(3):
                for sign in (1.0, -1.0):
                    if evals >= EVALS_PER_RESTART:
                        break
                    cand = theta.copy()
                    cand[j] = np.clip(cand[j] + sign * step, *LOG_BOUNDS[j])
                    if cand[j] == theta[j]:
                        continue
                    cand_val = objective(cand)
                    evals += 1
                    if cand_val > val:
                        theta, val = cand, cand_val
                        improved = True
                        break
            if not improved:
                step *= 0.5
        if val > best_val:
            best_theta, best_val = theta, val
    if best_theta is None or not np.isfinite(best_val):
        raise GpFitError("no hyperparameter setting produced a finite likelihood")
    return GpHyperparams(best_theta[0], best_theta[1], best_theta[2], kernel)


def gp_predict_raw(
    Xn: np.ndarray, y: np.ndarray, hp: GpHyperparams, Qn: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Latent posterior mean and variance at the queries (same units as y)."""
    n = Xn.shape[0]
    K = kernel_matrix(hp, Xn, Xn) + hp.noise_variance * np.eye(n)
    (L, lower), _ = _chol_with_jitter(K)
    Ks = kernel_matrix(hp, Xn, Qn)
    alpha = cho_solve((L, lower), y)
    mean = Ks.T @ alpha
    from scipy.linalg import solve_triangular

    V = solve_triangular(L, Ks, lower=lower)
    var = kernel_diag(hp, Qn) - np.einsum("ij,ij->j", V, V)
    return mean, np.maximum(var, 0.0)


class GpBackend(SurrogateBackend):
    """Context-in / binned-posterior-out Gaussian-process backend.

    Parameters
    ----------
    kernel : {"rbf", "matern52", "linear"}
    num_bins : bins used when discretizing the Gaussian posterior
    span_sigmas : half-width of the discretization range in posterior stds
    bounds : optional (lower, upper) design-space bounds for input scaling
    seed : seed for the deterministic hyperparameter search
    hyperparams : optional fixed GpHyperparams, skipping the search
    """

    def __init__(
        self,
        kernel: str = "matern52",
        num_bins: int = 100,
        span_sigmas: float = 8.0,
        bounds=None,
        seed: int = 0,
        hyperparams: GpHyperparams | None = None,
    ):
        super().__init__(bounds=bounds)
        self.kernel = kernel
        self.num_bins = num_bins
        self.span_sigmas = span_sigmas
        self.seed = seed
        self.hyperparams = hyperparams

    def _fit(self, Xn, y):
        self._Xn = Xn
        self._standardizer = OutputStandardizer.from_data(y)
        self._ys = self._standardizer.transform(y)
        self._fallback = False
        if self.hyperparams is not None:
            self._hp = self.hyperparams
            return
        try:
            self._hp = fit_hyperparams(Xn, self._ys, self.kernel, Rng(self.seed))
        except (GpFitError, ValueError):
            # Degrade to the context-prior posterior rather than aborting a run.
            self._hp = None
            self._fallback = True

    def predict_gaussian(self, X) -> list[GaussianPosterior]:
        """Gaussian posteriors in raw output units."""
        if not hasattr(self, "_normalizer"):
            raise RuntimeError("backend has no context; call fit/set_context first")
        X = np.asarray(X, dtype=float)
        Qn = self._normalizer.transform(X)
        if self._fallback:
            mean = np.zeros(Qn.shape[0])
            std = np.ones(Qn.shape[0])
        else:
            try:
                mean, var = gp_predict_raw(self._Xn, self._ys, self._hp, Qn)
                std = np.sqrt(var)
            except GpFitError:
                mean = np.zeros(Qn.shape[0])
                std = np.ones(Qn.shape[0])
        mean = self._standardizer.inverse_mean(mean)
        std = self._standardizer.inverse_std(std)
        return [GaussianPosterior(float(m), float(s)) for m, s in zip(mean, std)]

    def _predict_batch(self, Qn) -> list[DiscretePosterior]:
        raise NotImplementedError  # predict_batch is overridden directly

    def predict_batch(self, X) -> list[DiscretePosterior]:
        out = []
        for g in self.predict_gaussian(X):
            if g.std == 0.0:
                out.append(point_mass(g.mean))
            else:
                out.append(discretize_gaussian(g, self.num_bins, self.span_sigmas))
        return out

    def predict(self, X) -> np.ndarray:
        return np.array([g.mean for g in self.predict_gaussian(X)])
