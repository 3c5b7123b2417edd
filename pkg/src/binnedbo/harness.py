"""Experiment protocols, metrics, and result persistence.

Three protocols live here: the small-sample regression study (shared LHS
datasets, one split per dataset, R^2 per backend), optimization campaigns
over a (method x testbench x seed) matrix, and the EI-vs-DEI acquisition
ablation derived from campaign traces. Every report value is recomputable
from the persisted per-run trace files; the report generator only ever
reads traces.
"""

from __future__ import annotations

import csv
import json
import logging
import os
from dataclasses import dataclass, field

import numpy as np

from .circuits import DOMINANT_METRIC, build_registry, evaluate, get_testbench
from .optimize import RunConfig, RunTrace, method_label, random_search, run
from .sampling import Rng, latin_hypercube, train_test_split
from .space import points_to_array
from .specs import MINIMIZE
from .surrogates import GpBackend, KernelHistogramBackend

__all__ = [
    "r_squared",
    "itr_at_threshold",
    "improvement_factor",
    "constrained_best",
    "RegressionConfig",
    "run_regression_protocol",
    "CampaignConfig",
    "run_campaign",
    "write_reports",
]

log = logging.getLogger(__name__)

REGRESSION_HEADER = ["testbench", "metric", "backend", "samples", "seed", "r_squared"]
AGGREGATE_HEADER = [
    "method",
    "bench",
    "seed",
    "final_fom",
    "itr_at_threshold",
    "constrained_objective",
    "constrained_objective_normalized",
    "trace_file",
]
CURVES_HEADER = ["method", "bench", "seed", "iteration", "incumbent_fom"]
FACTORS_HEADER = ["bench", "strategy", "backend", "seed", "checkpoint", "factor"]
SUMMARY_HEADER = ["method", "bench", "median_final_fom", "runs", "reached_threshold"]

REGRESSION_BACKENDS = ("gp_rbf", "gp_matern", "gp_linear", "khist")


def _fmt(value: float) -> str:
    return repr(float(value))


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------

def r_squared(predictions, truths) -> float:
    """Coefficient of determination about the truth mean; may be negative."""
    predictions = np.asarray(predictions, dtype=float)
    truths = np.asarray(truths, dtype=float)
    if predictions.shape != truths.shape or truths.size == 0:
        raise ValueError("predictions and truths must be equal-length and nonempty")
    ss_tot = float(np.sum((truths - truths.mean()) ** 2))
    if ss_tot == 0.0:
        raise ValueError("truths are constant; R^2 is undefined")
    ss_res = float(np.sum((truths - predictions) ** 2))
    return 1.0 - ss_res / ss_tot


def itr_at_threshold(trace: RunTrace, threshold: float) -> int | None:
    """First evaluation index (1-based, initialization included) whose
    incumbent meets the threshold, or None when never reached."""
    for record in trace.records:
        if record.incumbent_fom >= threshold:
            return record.iteration
    return None


def constrained_best(trace: RunTrace, up_to: int | None = None) -> float:
    """Best objective value among feasible evaluated points, else the
    objective at the point of maximal FoM when nothing is feasible."""
    specs = get_testbench(trace.bench).specs
    target = specs.target_items[0]
    records = trace.records if up_to is None else trace.records[:up_to]
    if not records:
        raise ValueError("empty trace")
    feasible_vals = [
        r.metrics[target.name]
        for r in records
        if all(it.satisfied(r.metrics[it.name]) for it in specs.hard_items)
    ]
    if feasible_vals:
        return min(feasible_vals) if target.direction == MINIMIZE else max(feasible_vals)
    best = max(records, key=lambda r: r.fom)
    return best.metrics[target.name]


def improvement_factor(
    trace_a: RunTrace, trace_b: RunTrace, objective_direction: str, checkpoint: int
) -> float:
    """Ratio of best constrained objectives at the checkpoint, oriented so
    values above 1 favor trace_b."""
    if len(trace_a.records) < checkpoint or len(trace_b.records) < checkpoint:
        raise ValueError("both traces must reach the checkpoint")
    a = constrained_best(trace_a, checkpoint)
    b = constrained_best(trace_b, checkpoint)
    num, den = (a, b) if objective_direction == MINIMIZE else (b, a)
    if den == 0.0:
        raise ValueError("zero denominator in improvement factor")
    return num / den


# ---------------------------------------------------------------------------
# Regression protocol
# ---------------------------------------------------------------------------

@dataclass
class RegressionConfig:
    benches: list[str] = field(default_factory=lambda: sorted(build_registry()))
    sizes: list[int] = field(default_factory=lambda: [50, 100, 500])
    seeds: list[int] = field(default_factory=lambda: list(range(10)))
    backends: list[str] = field(default_factory=lambda: list(REGRESSION_BACKENDS))
    train_fraction: float = 0.8
    num_bins: int = 100

    @classmethod
    def from_dict(cls, d: dict) -> "RegressionConfig":
        return cls(**d)


def _make_regression_backend(name: str, space, seed: int, num_bins: int):
    bounds = (space.lower, space.upper)
    if name == "khist":
        return KernelHistogramBackend(num_bins=num_bins, bounds=bounds)
    kernel = {"gp_rbf": "rbf", "gp_matern": "matern52", "gp_linear": "linear"}[name]
    return GpBackend(kernel=kernel, num_bins=num_bins, bounds=bounds, seed=seed)


def build_dataset(bench: str, metric: str, size: int, seed: int):
    """Shared LHS dataset for one (bench, size, seed) cell."""
    tb = get_testbench(bench)
    bench_index = sorted(build_registry()).index(bench)
    rng = Rng(seed).spawn(1000 + size * 10 + bench_index)
    points = latin_hypercube(tb.space, size, rng)
    values = np.array([evaluate(tb, p)[metric] for p in points])
    return tb, points, values, rng


def run_regression_protocol(config: RegressionConfig) -> list[dict]:
    """One LHS dataset and one split per (bench, size, seed), identical for
    every backend; fit on the train side, R^2 on the test side."""
    rows = []
    for bench in config.benches:
        metric = DOMINANT_METRIC[bench]
        for size in config.sizes:
            for seed in config.seeds:
                tb, points, values, rng = build_dataset(bench, metric, size, seed)
                (ptr, ytr), (pte, yte) = train_test_split(
                    points, values, config.train_fraction, rng
                )
                Xtr, Xte = points_to_array(ptr), points_to_array(pte)
                for backend_name in config.backends:
                    backend = _make_regression_backend(
                        backend_name, tb.space, seed, config.num_bins
                    )
                    try:
                        backend.fit(Xtr, ytr)
                        r2 = r_squared(backend.predict(Xte), yte)
                        r2_text = _fmt(r2)
                    except Exception as exc:
                        log.warning("backend %s failed on %s/%d/%d: %s",
                                    backend_name, bench, size, seed, exc)
                        r2_text = "failed"
                    rows.append(
                        {
                            "testbench": bench,
                            "metric": metric,
                            "backend": backend_name,
                            "samples": size,
                            "seed": seed,
                            "r_squared": r2_text,
                        }
                    )
    return rows


def write_regression_csv(rows: list[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=REGRESSION_HEADER)
        writer.writeheader()
        writer.writerows(rows)


# ---------------------------------------------------------------------------
# Campaign
# ---------------------------------------------------------------------------

@dataclass
class CampaignConfig:
    benches: list[str]
    seeds: list[int]
    methods: list[dict]
    budget: int = 400
    init_count: int = 5
    candidate_count: int = 2048
    num_bins: int = 100
    fom_samples: int = 256
    checkpoints: list[int] = field(default_factory=lambda: [30, 50])
    threshold_fraction: float = 0.8

    @classmethod
    def from_dict(cls, d: dict) -> "CampaignConfig":
        return cls(**d)

    def to_dict(self) -> dict:
        from dataclasses import asdict

        return asdict(self)


def _cell_config(campaign: CampaignConfig, method: dict, bench: str, seed: int) -> RunConfig:
    if method.get("method") == "random_search":
        return RunConfig(bench=bench, seed=seed, budget=campaign.budget,
                         init_count=campaign.init_count)
    return RunConfig(
        bench=bench,
        strategy=method.get("strategy", "direct_fom"),
        backend=method.get("backend", "khist"),
        acquisition=method.get("acquisition", "dei"),
        budget=campaign.budget,
        init_count=campaign.init_count,
        candidate_count=campaign.candidate_count,
        seed=seed,
        num_bins=campaign.num_bins,
        fom_samples=campaign.fom_samples,
        external_backend_cmd=method.get("external_backend_cmd"),
    )


def _method_name(method: dict) -> str:
    if method.get("method") == "random_search":
        return "random_search"
    return "{}+{}+{}".format(
        method.get("strategy", "direct_fom"),
        method.get("backend", "khist"),
        method.get("acquisition", "dei"),
    )


def _atomic_write(path: str, payload: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(payload)
    os.replace(tmp, path)


def run_campaign(config: CampaignConfig, out_dir: str) -> None:
    """Execute the full matrix, persist one trace file per cell, then
    regenerate all reports from the trace files alone."""
    traces_dir = os.path.join(out_dir, "traces")
    os.makedirs(traces_dir, exist_ok=True)
    _atomic_write(
        os.path.join(out_dir, "resolved_config.json"),
        json.dumps(config.to_dict(), indent=1, sort_keys=True) + "\n",
    )
    errors = []
    for method in config.methods:
        for bench in config.benches:
            for seed in config.seeds:
                name = _method_name(method)
                fname = f"{name}__{bench}__seed{seed}.json"
                path = os.path.join(traces_dir, fname)
                cell = _cell_config(config, method, bench, seed)
                try:
                    trace = (
                        random_search(cell)
                        if method.get("method") == "random_search"
                        else run(cell)
                    )
                    _atomic_write(
                        path,
                        json.dumps(trace.to_dict(), indent=1, sort_keys=True) + "\n",
                    )
                except Exception as exc:
                    log.error("campaign cell %s failed: %s", fname, exc)
                    errors.append(f"{fname}\t{exc}")
    if errors:
        _atomic_write(os.path.join(out_dir, "errors.txt"), "\n".join(errors) + "\n")
    write_reports(out_dir, config.checkpoints, config.threshold_fraction)


def load_traces(out_dir: str) -> list[RunTrace]:
    traces_dir = os.path.join(out_dir, "traces")
    traces = []
    for fname in sorted(os.listdir(traces_dir)):
        if fname.endswith(".json"):
            traces.append(RunTrace.load(os.path.join(traces_dir, fname)))
    return traces


def _trace_seed(trace: RunTrace) -> int:
    return int(trace.config["seed"])


def write_reports(out_dir: str, checkpoints=(30, 50), threshold_fraction=0.8) -> None:
    """Regenerate aggregate, summary, curves, and factor CSVs from traces."""
    traces = load_traces(out_dir)
    if not traces:
        raise ValueError(f"no traces under {out_dir}")

    best_fom = {}
    for t in traces:
        best_fom[t.bench] = max(best_fom.get(t.bench, -np.inf), max(r.fom for r in t.records))
    # Min-max anchors for the normalized constrained objective, per bench.
    obj_by_bench: dict[str, list[float]] = {}
    for t in traces:
        obj_by_bench.setdefault(t.bench, []).append(constrained_best(t))

    def sort_key(t):
        return (t.method, t.bench, _trace_seed(t))

    aggregate_rows = []
    curves_rows = []
    for t in sorted(traces, key=sort_key):
        threshold = threshold_fraction * best_fom[t.bench]
        reached = itr_at_threshold(t, threshold)
        budget = len(t.records)
        obj = constrained_best(t)
        lo, hi = min(obj_by_bench[t.bench]), max(obj_by_bench[t.bench])
        specs = get_testbench(t.bench).specs
        direction = specs.target_items[0].direction
        if hi > lo:
            norm = (obj - lo) / (hi - lo)
            if direction == MINIMIZE:
                norm = 1.0 - norm
        else:
            norm = 1.0
        aggregate_rows.append(
            {
                "method": t.method,
                "bench": t.bench,
                "seed": _trace_seed(t),
                "final_fom": _fmt(t.final_fom),
                "itr_at_threshold": str(reached) if reached is not None else f"{budget}+",
                "constrained_objective": _fmt(obj),
                "constrained_objective_normalized": _fmt(norm),
                "trace_file": f"traces/{t.method}__{t.bench}__seed{_trace_seed(t)}.json",
            }
        )
        for r in t.records:
            curves_rows.append(
                {
                    "method": t.method,
                    "bench": t.bench,
                    "seed": _trace_seed(t),
                    "iteration": r.iteration,
                    "incumbent_fom": _fmt(r.incumbent_fom),
                }
            )

    summary_rows = []
    groups: dict[tuple, list[RunTrace]] = {}
    for t in traces:
        groups.setdefault((t.method, t.bench), []).append(t)
    for (method, bench), group in sorted(groups.items()):
        threshold = threshold_fraction * best_fom[bench]
        reached = sum(1 for t in group if itr_at_threshold(t, threshold) is not None)
        summary_rows.append(
            {
                "method": method,
                "bench": bench,
                "median_final_fom": _fmt(float(np.median([t.final_fom for t in group]))),
                "runs": len(group),
                "reached_threshold": reached,
            }
        )

    factor_rows = []
    by_cell: dict[tuple, dict[str, RunTrace]] = {}
    for t in traces:
        cfg = t.config
        if t.method == "random_search":
            continue
        key = (t.bench, cfg["strategy"], cfg["backend"], _trace_seed(t))
        by_cell.setdefault(key, {})[cfg["acquisition"]] = t
    for (bench, strategy, backend, seed), pair in sorted(by_cell.items()):
        if "ei" not in pair or "dei" not in pair:
            continue
        direction = get_testbench(bench).specs.target_items[0].direction
        for checkpoint in checkpoints:
            if len(pair["ei"].records) < checkpoint or len(pair["dei"].records) < checkpoint:
                continue
            factor = improvement_factor(pair["ei"], pair["dei"], direction, checkpoint)
            factor_rows.append(
                {
                    "bench": bench,
                    "strategy": strategy,
                    "backend": backend,
                    "seed": seed,
                    "checkpoint": checkpoint,
                    "factor": _fmt(factor),
                }
            )

    def write(name, header, rows):
        lines = []
        import io

        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        _atomic_write(os.path.join(out_dir, name), buf.getvalue())

    write("aggregate.csv", AGGREGATE_HEADER, aggregate_rows)
    write("curves.csv", CURVES_HEADER, curves_rows)
    write("summary.csv", SUMMARY_HEADER, summary_rows)
    write("factors.csv", FACTORS_HEADER, factor_rows)


# ---------------------------------------------------------------------------
# Dataset export
# ---------------------------------------------------------------------------

def export_dataset(bench: str, samples: int, seed: int, path) -> None:
    """CSV of LHS samples and all metrics: x_0..x_{D-1}, then metric names."""
    tb = get_testbench(bench)
    rng = Rng(seed).spawn(7)
    points = latin_hypercube(tb.space, samples, rng)
    names = tb.specs.names
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"x_{j}" for j in range(tb.space.dim)] + names)
        for p in points:
            metrics = evaluate(tb, p)
            writer.writerow(
                [_fmt(c) for c in np.asarray(p)] + [_fmt(metrics[n]) for n in names]
            )
