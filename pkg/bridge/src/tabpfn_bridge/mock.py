"""Protocol-complete fake server with a fixed, documented posterior.

Every query receives the same fixture: ``num_bins`` equal-width bins with
centers at ``(k + 0.5) / num_bins`` over the unit interval and a symmetric
triangular probability profile peaking at the middle bin,

    w_k = 1 + min(k, K - 1 - k),    p_k = w_k / sum(w),

renormalized to machine precision before transmission. The fixture is
deliberately independent of the context so client-side round trips can be
asserted bit-for-bit.
"""

from __future__ import annotations

import numpy as np

from .protocol import serve_loop

__all__ = ["fixture_posterior", "mock_serve"]

MOCK_MAX_CONTEXT = 4096


def fixture_posterior(num_bins: int) -> tuple[np.ndarray, np.ndarray]:
    k = np.arange(num_bins)
    centers = (k + 0.5) / num_bins
    weights = 1.0 + np.minimum(k, num_bins - 1 - k)
    return centers, weights / weights.sum()


def _predict(context_x, context_y, query_x, num_bins):
    centers, probs = fixture_posterior(num_bins)
    n = query_x.shape[0]
    return np.tile(centers, (n, 1)), np.tile(probs, (n, 1))


def mock_serve(stdin=None, stdout=None) -> None:
    serve_loop(_predict, "mock", MOCK_MAX_CONTEXT, stdin=stdin, stdout=stdout)
