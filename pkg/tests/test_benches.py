"""Synthetic testbench registry: shapes, finiteness, and frozen coefficients."""

import json
import os

import numpy as np
import pytest

from binnedbo.circuits import build_registry, evaluate, get_testbench
from binnedbo.circuits.benches import DOMINANT_METRIC, manifest_dict
from binnedbo.sampling import Rng, latin_hypercube
from binnedbo.space import DesignPoint
from binnedbo.specs import fom

EXPECTED_DIMS = {
    "ota2-analytic": 12,
    "ota3-analytic": 18,
    "bandgap-analytic": 20,
    "gm-highdim": 53,
    "ldo-regime": 21,
    "chargepump-regime": 36,
}

MANIFEST = os.path.join(
    os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
    "src",
    "binnedbo",
    "circuits",
    "manifest.json",
)


def test_registry_names_and_dims():
    reg = build_registry()
    assert {name: tb.space.dim for name, tb in reg.items()} == EXPECTED_DIMS


def test_registry_is_cached():
    assert build_registry() is build_registry()


def test_get_testbench_unknown_name():
    with pytest.raises(KeyError):
        get_testbench("no-such-bench")


def test_dominant_metric_covers_every_bench():
    reg = build_registry()
    assert set(DOMINANT_METRIC) == set(reg)
    for bench, metric in DOMINANT_METRIC.items():
        assert metric in reg[bench].specs.names


@pytest.mark.parametrize("name", sorted(EXPECTED_DIMS))
def test_midpoint_evaluates_finite(name):
    tb = get_testbench(name)
    metrics = evaluate(tb, DesignPoint(tb.space, tb.space.midpoint))
    assert set(metrics) == set(tb.specs.names)
    assert all(np.isfinite(v) for v in metrics.values())


@pytest.mark.parametrize("name", sorted(EXPECTED_DIMS))
def test_fom_finite_over_lhs_sweep(name):
    tb = get_testbench(name)
    points = latin_hypercube(tb.space, 200, Rng(0).spawn(77))
    for p in points:
        value = fom(tb.specs, evaluate(tb, p))
        assert np.isfinite(value) and value > 0


@pytest.mark.parametrize("name", sorted(EXPECTED_DIMS))
def test_deterministic_evaluation(name):
    tb = get_testbench(name)
    p = DesignPoint(tb.space, tb.space.midpoint)
    assert evaluate(tb, p) == evaluate(tb, p)


def test_every_bench_has_exactly_one_target():
    for tb in build_registry().values():
        assert len(tb.specs.target_items) == 1
        assert len(tb.specs.hard_items) >= 2


def test_bandgap_tc_is_bias_sensitive():
    # The reference's temperature coefficient is dominated by exponential
    # bias terms: a small bias step must move it by orders of magnitude more
    # than the same relative step on a resistor.
    tb = get_testbench("bandgap-analytic")
    x0 = tb.space.midpoint.copy()
    base = evaluate(tb, DesignPoint(tb.space, x0))["tc"]
    xb = x0.copy()
    xb[0] += 0.01  # 10 mV on an exponential bias
    bias_delta = abs(evaluate(tb, DesignPoint(tb.space, xb))["tc"] - base)
    xr = x0.copy()
    xr[8] *= 1.02  # 2% on a resistor
    res_delta = abs(evaluate(tb, DesignPoint(tb.space, xr))["tc"] - base)
    assert bias_delta > 5.0 * res_delta


def test_regime_benches_switch_discontinuously():
    # Sweeping the supply of the regulator across the dropout boundary moves
    # psrr sharply; the same sweep well inside regulation barely moves it.
    tb = get_testbench("ldo-regime")
    x = tb.space.midpoint.copy()
    vdd_index = 17

    def psrr_at(vdd):
        xi = x.copy()
        xi[vdd_index] = vdd
        return evaluate(tb, DesignPoint(tb.space, xi))["psrr"]

    inside = abs(psrr_at(1.99) - psrr_at(1.95))
    values = [psrr_at(v) for v in np.linspace(1.4, 2.0, 61)]
    largest_step = max(abs(b - a) for a, b in zip(values, values[1:]))
    assert largest_step > 5.0 * max(inside, 1e-9)


def test_manifest_file_matches_builders():
    with open(MANIFEST) as fh:
        frozen = json.load(fh)
    live = json.loads(json.dumps(manifest_dict()))  # normalize types via JSON
    assert frozen == live


def test_manifest_records_bounds_and_specs():
    with open(MANIFEST) as fh:
        frozen = json.load(fh)
    for name, tb in build_registry().items():
        entry = frozen[name]
        assert entry["dim"] == tb.space.dim
        assert entry["lower"] == list(tb.space.lower)
        assert entry["upper"] == list(tb.space.upper)
        assert [s["name"] for s in entry["specs"]] == tb.specs.names
