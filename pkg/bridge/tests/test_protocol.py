"""Bridge protocol conformance against the primary client's validator."""

import io
import json

import numpy as np
import pytest

from tabpfn_bridge.mock import MOCK_MAX_CONTEXT, fixture_posterior, mock_serve
from tabpfn_bridge.protocol import EMIT_TOL, normalize_rows

# The primary client's frame validator is the conformance oracle; skip these
# checks cleanly when the primary package is absent.
external = pytest.importorskip("binnedbo.surrogates.external")


def roundtrip(frames):
    stdin = io.StringIO("".join(json.dumps(f) + "\n" for f in frames))
    stdout = io.StringIO()
    mock_serve(stdin=stdin, stdout=stdout)
    return [json.loads(line) for line in stdout.getvalue().splitlines()]


def predict_frame(rng, num_bins):
    n_ctx = int(rng.integers(2, 30))
    n_query = int(rng.integers(1, 8))
    d = int(rng.integers(1, 10))
    return {
        "op": "predict",
        "context_x": rng.uniform(size=(n_ctx, d)).tolist(),
        "context_y": rng.standard_normal(n_ctx).tolist(),
        "query_x": rng.uniform(size=(n_query, d)).tolist(),
        "num_bins": num_bins,
    }


def test_handshake():
    (reply,) = roundtrip([{"op": "handshake", "version": 1}])
    assert reply == {"op": "handshake_ok", "backend": "mock",
                     "max_context": MOCK_MAX_CONTEXT}


def test_wrong_version_rejected():
    (reply,) = roundtrip([{"op": "handshake", "version": 99}])
    assert reply["op"] == "error"


def test_thousand_frames_pass_client_validation():
    rng = np.random.default_rng(1234)
    frames = [{"op": "handshake", "version": 1}]
    frames += [predict_frame(rng, int(rng.integers(2, 200))) for _ in range(1000)]
    replies = roundtrip(frames)
    assert replies[0]["op"] == "handshake_ok"
    assert len(replies) == 1001
    for frame, reply in zip(frames[1:], replies[1:]):
        assert reply["op"] == "posterior"
        assert len(reply["centers"]) == len(frame["query_x"])
        for c_row, p_row in zip(reply["centers"], reply["probs"]):
            posterior = external.validate_posterior_frame(c_row, p_row)
            assert posterior.num_bins == frame["num_bins"]
            assert abs(sum(p_row) - 1.0) <= EMIT_TOL


def test_fixture_round_trip_is_exact():
    (reply,) = roundtrip([predict_frame(np.random.default_rng(0), 10)])
    centers, probs = fixture_posterior(10)
    for c_row, p_row in zip(reply["centers"], reply["probs"]):
        assert np.array_equal(np.asarray(c_row), centers)
        assert np.allclose(p_row, probs, atol=1e-15)


def test_malformed_json_answered_with_error_and_loop_survives():
    stdin = io.StringIO(
        "not json\n" + json.dumps({"op": "handshake", "version": 1}) + "\n"
    )
    stdout = io.StringIO()
    mock_serve(stdin=stdin, stdout=stdout)
    replies = [json.loads(line) for line in stdout.getvalue().splitlines()]
    assert replies[0]["op"] == "error"
    assert replies[1]["op"] == "handshake_ok"


def test_oversized_context_gets_error_frame():
    rng = np.random.default_rng(2)
    frame = predict_frame(rng, 10)
    frame["context_x"] = rng.uniform(size=(MOCK_MAX_CONTEXT + 1, 3)).tolist()
    frame["context_y"] = rng.standard_normal(MOCK_MAX_CONTEXT + 1).tolist()
    (reply,) = roundtrip([frame])
    assert reply["op"] == "error" and "max_context" in reply["message"]


def test_unknown_op_gets_error_frame():
    (reply,) = roundtrip([{"op": "train"}])
    assert reply["op"] == "error"


class TestNormalizeRows:
    def test_renormalizes(self):
        centers = np.array([[0.0, 1.0]])
        probs = np.array([[2.0, 6.0]])
        _, out = normalize_rows(centers, probs)
        assert np.allclose(out, [[0.25, 0.75]])

    def test_rejects_descending(self):
        with pytest.raises(ValueError):
            normalize_rows(np.array([[1.0, 0.0]]), np.array([[0.5, 0.5]]))

    def test_rejects_negative_mass(self):
        with pytest.raises(ValueError):
            normalize_rows(np.array([[0.0, 1.0]]), np.array([[1.5, -0.5]]))
