"""JSON-lines request loop shared by the real and the mock server.

One frame per line on standard input, one reply per line on standard
output; nothing else is ever written to standard output (logs go to
standard error):

    -> {"op": "handshake", "version": 1}
    <- {"op": "handshake_ok", "backend": "<name>", "max_context": <int>}
    -> {"op": "predict", "context_x": [[...]], "context_y": [...],
        "query_x": [[...]], "num_bins": K}
    <- {"op": "posterior", "centers": [[...]], "probs": [[...]]}
    <- {"op": "error", "message": "..."}

Every emitted posterior row has strictly ascending centers and
probabilities renormalized to sum to 1 within 1e-9 before transmission.
"""

from __future__ import annotations

import json
import logging
import sys

import numpy as np

__all__ = ["serve_loop", "normalize_rows"]

log = logging.getLogger(__name__)

PROTOCOL_VERSION = 1
# Exact mass tolerance guaranteed on every emitted frame.
EMIT_TOL = 1e-9


def normalize_rows(centers: np.ndarray, probs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Enforce the wire contract on a (n, K) posterior batch."""
    centers = np.asarray(centers, dtype=float)
    probs = np.asarray(probs, dtype=float)
    if centers.shape != probs.shape or centers.ndim != 2:
        raise ValueError("centers and probs must be matching 2-d arrays")
    if np.any(np.diff(centers, axis=1) <= 0):
        raise ValueError("bin centers must be strictly ascending per row")
    if np.any(probs < 0):
        raise ValueError("probabilities must be nonnegative")
    probs = probs / probs.sum(axis=1, keepdims=True)
    assert np.all(np.abs(probs.sum(axis=1) - 1.0) <= EMIT_TOL)
    return centers, probs


def _reply(out, frame: dict) -> None:
    out.write(json.dumps(frame) + "\n")
    out.flush()


def serve_loop(predict_fn, backend_name: str, max_context: int,
               stdin=None, stdout=None) -> None:
    """Answer frames until EOF.

    predict_fn(context_x, context_y, query_x, num_bins) -> (centers, probs)
    with (n_query, num_bins) arrays in raw output units.
    """
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    for line in stdin:
        if not line.strip():
            continue
        try:
            frame = json.loads(line)
            if not isinstance(frame, dict):
                raise ValueError("frame must be a JSON object")
        except (json.JSONDecodeError, ValueError) as exc:
            _reply(stdout, {"op": "error", "message": f"malformed frame: {exc}"})
            continue
        op = frame.get("op")
        if op == "handshake":
            if frame.get("version") != PROTOCOL_VERSION:
                _reply(stdout, {"op": "error",
                                "message": f"unsupported version {frame.get('version')!r}"})
                continue
            _reply(stdout, {"op": "handshake_ok", "backend": backend_name,
                            "max_context": max_context})
            continue
        if op != "predict":
            _reply(stdout, {"op": "error", "message": f"unknown op {op!r}"})
            continue
        try:
            context_x = np.asarray(frame["context_x"], dtype=float)
            context_y = np.asarray(frame["context_y"], dtype=float)
            query_x = np.asarray(frame["query_x"], dtype=float)
            num_bins = int(frame["num_bins"])
            if context_x.ndim != 2 or query_x.ndim != 2 or context_y.ndim != 1:
                raise ValueError("context_x/query_x must be 2-d, context_y 1-d")
            if context_x.shape[0] != context_y.size:
                raise ValueError("context_x and context_y disagree on size")
            if num_bins < 1:
                raise ValueError("num_bins must be positive")
            if context_x.shape[0] > max_context:
                raise ValueError(
                    f"context of {context_x.shape[0]} exceeds max_context {max_context}"
                )
            centers, probs = predict_fn(context_x, context_y, query_x, num_bins)
            centers, probs = normalize_rows(centers, probs)
        except Exception as exc:
            log.warning("predict failed: %s", exc)
            _reply(stdout, {"op": "error", "message": str(exc)})
            continue
        _reply(stdout, {"op": "posterior",
                        "centers": centers.tolist(), "probs": probs.tolist()})
