"""Real-model server wrapping the TabPFN v2 regressor.

The regressor's native predictive output is a bar distribution (logits over
a fixed support grid). When a request asks for a different bin count than
the native grid provides, the posterior is re-expressed with quantile-placed
centers carrying uniform mass, which preserves the distribution's shape
without inventing smoothing parameters.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .protocol import serve_loop

__all__ = ["BridgeConfig", "serve"]

log = logging.getLogger(__name__)

# Minimum center spacing enforced after quantile placement; duplicated
# quantiles would violate the strictly-ascending wire contract.
MIN_SPACING = 1e-12


@dataclass(frozen=True)
class BridgeConfig:
    model_path: str | None = None
    device: str = "cpu"
    max_context: int = 1000
    num_bins: int | None = None  # override the per-request bin count

    def __post_init__(self):
        if self.max_context <= 0:
            raise ValueError("max_context must be positive")


def _load_regressor(config: BridgeConfig):
    import torch
    from tabpfn import TabPFNRegressor

    torch.manual_seed(0)
    torch.use_deterministic_algorithms(True, warn_only=True)
    kwargs = {"device": config.device, "random_state": 0}
    if config.model_path:
        kwargs["model_path"] = config.model_path
    return TabPFNRegressor(**kwargs)


def _native_bars(regressor, query_x: np.ndarray):
    """Native support centers and per-query masses from the bar distribution."""
    import torch

    out = regressor.predict(query_x, output_type="full")
    logits = out["logits"]
    criterion = out["criterion"]
    with torch.no_grad():
        masses = torch.softmax(torch.as_tensor(logits), dim=-1).cpu().numpy()
        borders = np.asarray(criterion.borders.cpu(), dtype=float)
    centers = 0.5 * (borders[:-1] + borders[1:])
    # The two edge bars extend to infinity; pin their centers just outside
    # the finite grid so the support stays ascending and finite.
    width = borders[2] - borders[1]
    centers[0] = borders[1] - 0.5 * width
    centers[-1] = borders[-2] + 0.5 * width
    return centers, masses


def _requantize(centers: np.ndarray, masses: np.ndarray, num_bins: int):
    """Uniform-mass posterior on quantile-placed centers."""
    cdf = np.cumsum(masses, axis=1)
    cdf /= cdf[:, -1:]
    targets = (np.arange(num_bins) + 0.5) / num_bins
    out_centers = np.empty((masses.shape[0], num_bins))
    for i in range(masses.shape[0]):
        out_centers[i] = np.interp(targets, cdf[i], centers)
        out_centers[i] = np.maximum.accumulate(out_centers[i])
        # Break exact ties so centers stay strictly ascending.
        for k in range(1, num_bins):
            if out_centers[i, k] <= out_centers[i, k - 1]:
                out_centers[i, k] = out_centers[i, k - 1] + MIN_SPACING
    out_probs = np.full((masses.shape[0], num_bins), 1.0 / num_bins)
    return out_centers, out_probs


def serve(config: BridgeConfig, stdin=None, stdout=None) -> None:
    """Run the request loop until EOF; exits nonzero if the model fails to load."""
    try:
        regressor = _load_regressor(config)
    except Exception as exc:
        import json
        import sys

        out = stdout if stdout is not None else sys.stdout
        out.write(json.dumps({"op": "error", "message": f"model load failed: {exc}"}) + "\n")
        out.flush()
        raise SystemExit(1)

    fitted = {"key": None}

    def predict(context_x, context_y, query_x, num_bins):
        if config.num_bins is not None:
            num_bins = config.num_bins
        key = (context_x.tobytes(), context_y.tobytes())
        if fitted["key"] != key:
            regressor.fit(context_x, context_y)
            fitted["key"] = key
        centers, masses = _native_bars(regressor, query_x)
        if num_bins == centers.size:
            return np.tile(centers, (query_x.shape[0], 1)), masses
        return _requantize(centers, masses, num_bins)

    serve_loop(predict, "tabpfn-v2", config.max_context, stdin=stdin, stdout=stdout)
