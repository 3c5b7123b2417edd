"""Sanity oracle against the real model; skipped unless tabpfn is installed."""

import io
import json

import numpy as np
import pytest

pytest.importorskip("tabpfn")

from tabpfn_bridge.model import BridgeConfig, serve  # noqa: E402


def test_posterior_mean_on_identity_context():
    x = np.linspace(0.0, 1.0, 40).reshape(-1, 1)
    frames = [
        {"op": "handshake", "version": 1},
        {
            "op": "predict",
            "context_x": x.tolist(),
            "context_y": x.ravel().tolist(),
            "query_x": [[0.5]],
            "num_bins": 100,
        },
    ]
    stdin = io.StringIO("".join(json.dumps(f) + "\n" for f in frames))
    stdout = io.StringIO()
    serve(BridgeConfig(), stdin=stdin, stdout=stdout)
    replies = [json.loads(line) for line in stdout.getvalue().splitlines()]
    assert replies[0]["op"] == "handshake_ok"
    assert replies[1]["op"] == "posterior"
    centers = np.asarray(replies[1]["centers"][0])
    probs = np.asarray(replies[1]["probs"][0])
    mean = float(centers @ probs)
    assert abs(mean - 0.5) < 0.2


def test_identical_requests_identical_bytes():
    x = np.linspace(0.0, 1.0, 20).reshape(-1, 1)
    predict = {
        "op": "predict",
        "context_x": x.tolist(),
        "context_y": x.ravel().tolist(),
        "query_x": [[0.25], [0.75]],
        "num_bins": 100,
    }
    frames = [{"op": "handshake", "version": 1}, predict, predict]
    stdin = io.StringIO("".join(json.dumps(f) + "\n" for f in frames))
    stdout = io.StringIO()
    serve(BridgeConfig(), stdin=stdin, stdout=stdout)
    lines = stdout.getvalue().splitlines()
    assert lines[1] == lines[2]
