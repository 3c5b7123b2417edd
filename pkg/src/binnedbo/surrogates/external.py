"""Client for external surrogate processes speaking the JSON-lines protocol.

The external backend is a child process exchanging one JSON frame per line
over its standard input/output:

    -> {"op": "handshake", "version": 1}
    <- {"op": "handshake_ok", "backend": "<name>", "max_context": <int>}
    -> {"op": "predict", "context_x": [[...]], "context_y": [...],
        "query_x": [[...]], "num_bins": K}
    <- {"op": "posterior", "centers": [[...]], "probs": [[...]]}
    <- {"op": "error", "message": "..."}

Inputs are sent normalized to the unit cube; outputs are raw. The client
validates every returned posterior (ascending centers, probability mass
within 1e-6 of one) and keeps a single in-flight request per process.
"""

from __future__ import annotations

import json
import logging
import shlex
import subprocess

import numpy as np

from ..posterior import DiscretePosterior, PROB_SUM_TOL
from .base import SurrogateBackend

__all__ = [
    "ExternalBackend",
    "ExternalBackendError",
    "TransportError",
    "MalformedFrameError",
    "ProtocolError",
    "validate_posterior_frame",
]

log = logging.getLogger(__name__)

PROTOCOL_VERSION = 1


class ExternalBackendError(RuntimeError):
    pass


class TransportError(ExternalBackendError):
    """Child process died or its pipe closed."""


class MalformedFrameError(ExternalBackendError):
    """Frame was not valid JSON or missed required fields."""


class ProtocolError(ExternalBackendError):
    """Frame was structurally valid but violated the posterior contract."""


def validate_posterior_frame(centers, probs) -> DiscretePosterior:
    """Validate one per-query (centers, probs) pair from the wire."""
    centers = np.asarray(centers, dtype=float)
    probs = np.asarray(probs, dtype=float)
    if centers.ndim != 1 or probs.shape != centers.shape or centers.size < 1:
        raise ProtocolError("centers/probs must be equal-length nonempty vectors")
    if centers.size > 1 and not np.all(np.diff(centers) > 0):
        raise ProtocolError("centers must be strictly ascending")
    total = probs.sum()
    if np.any(probs < 0) or abs(total - 1.0) > PROB_SUM_TOL:
        raise ProtocolError(f"probabilities sum to {total!r}, expected 1 +/- {PROB_SUM_TOL}")
    return DiscretePosterior(centers, probs / total)


class ExternalBackend(SurrogateBackend):
    """Surrogate backed by a subprocess; spawned lazily from a command line."""

    def __init__(self, command: str = "", num_bins: int = 100, bounds=None):
        super().__init__(bounds=bounds)
        self.command = command
        self.num_bins = num_bins
        self._proc: subprocess.Popen | None = None
        self._max_context: int | None = None

    # -- process / framing -------------------------------------------------
    def _ensure_started(self):
        if self._proc is not None and self._proc.poll() is None:
            return
        if not self.command:
            raise ValueError("external backend requires a command line")
        argv = shlex.split(self.command) if isinstance(self.command, str) else list(self.command)
        self._proc = subprocess.Popen(
            argv,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            bufsize=1,
        )
        reply = self._roundtrip({"op": "handshake", "version": PROTOCOL_VERSION})
        if reply.get("op") != "handshake_ok":
            raise ProtocolError(f"unexpected handshake reply: {reply!r}")
        self._backend_name = reply.get("backend", "external")
        self._max_context = int(reply.get("max_context", 0)) or None

    def _roundtrip(self, frame: dict) -> dict:
        proc = self._proc
        try:
            proc.stdin.write(json.dumps(frame) + "\n")
            proc.stdin.flush()
            line = proc.stdout.readline()
        except (BrokenPipeError, OSError) as exc:
            raise TransportError(f"backend process pipe failed: {exc}") from exc
        if not line:
            raise TransportError("backend process closed its output")
        try:
            reply = json.loads(line)
        except json.JSONDecodeError as exc:
            log.error("malformed frame from backend: %r", line)
            raise MalformedFrameError(f"invalid JSON frame: {line!r}") from exc
        if not isinstance(reply, dict) or "op" not in reply:
            log.error("malformed frame from backend: %r", line)
            raise MalformedFrameError(f"frame missing op: {line!r}")
        if reply["op"] == "error":
            raise ProtocolError(f"backend error: {reply.get('message', '')}")
        return reply

    def close(self):
        if self._proc is not None:
            if self._proc.poll() is None:
                self._proc.stdin.close()
                self._proc.wait(timeout=10)
            self._proc = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    # -- backend hooks -----------------------------------------------------
    def _fit(self, Xn, y):
        self._ensure_started()
        if self._max_context is not None and Xn.shape[0] > self._max_context:
            raise ProtocolError(
                f"context of {Xn.shape[0]} exceeds backend max_context {self._max_context}"
            )
        self._context_x = Xn
        self._context_y = y

    def _predict_batch(self, Qn):
        self._ensure_started()
        reply = self._roundtrip(
            {
                "op": "predict",
                "context_x": self._context_x.tolist(),
                "context_y": self._context_y.tolist(),
                "query_x": Qn.tolist(),
                "num_bins": self.num_bins,
            }
        )
        if reply.get("op") != "posterior":
            log.error("unexpected frame from backend: %r", reply)
            raise MalformedFrameError(f"expected posterior frame, got {reply.get('op')!r}")
        centers = reply.get("centers")
        probs = reply.get("probs")
        if centers is None or probs is None or len(centers) != Qn.shape[0] or len(probs) != Qn.shape[0]:
            log.error("malformed posterior frame: %r", reply)
            raise MalformedFrameError("posterior frame must carry one centers/probs row per query")
        out = []
        for c_row, p_row in zip(centers, probs):
            try:
                out.append(validate_posterior_frame(c_row, p_row))
            except ProtocolError:
                log.error("offending posterior frame: centers=%r probs=%r", c_row, p_row)
                raise
        return out
