"""Candidate-set Bayesian optimization loop and its acquisition strategies.

One iteration: sample a fresh uniform candidate set, score every candidate
with the configured strategy's acquisition, evaluate the argmax on the
testbench, append to the context, update the incumbent. Three strategies
structure the surrogate task: a single model on the aggregated FoM, one
model per metric, or one model for the objective plus one per constraint
margin. A random-search baseline shares the trace format.
"""

from __future__ import annotations

import json
import logging
import subprocess
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .circuits import Testbench, evaluate, get_testbench
from scipy.stats import norm

from .posterior import (
    GaussianPosterior,
    closed_form_ei,
    dei,
    dei_batch,
    feasibility_mass,
    moments,
)
from .sampling import Rng, uniform_sample
from .space import DesignPoint, ObservationSet, points_to_array
from .specs import SpecSet, constraint_margin, fom, fom_batch, target_score
from .surrogates import ExternalBackend, GpBackend, KernelHistogramBackend

__all__ = ["RunConfig", "RunTrace", "TraceRecord", "run", "random_search", "select_next"]

log = logging.getLogger(__name__)

TRACE_SCHEMA_VERSION = 1

STRATEGIES = ("direct_fom", "metric_decomposed", "constraint_decomposed")
BACKENDS = ("gp_rbf", "gp_matern", "gp_linear", "khist", "external")
ACQUISITIONS = ("ei", "dei")


@dataclass
class RunConfig:
    bench: str
    strategy: str = "direct_fom"
    backend: str = "khist"
    acquisition: str = "dei"
    budget: int = 400
    init_count: int = 5
    candidate_count: int = 2048
    seed: int = 0
    num_bins: int = 100
    fom_samples: int = 256
    external_backend_cmd: str | None = None
    external_eval_cmd: str | None = None
    eval_timeout: float = 600.0

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.backend not in BACKENDS:
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.acquisition not in ACQUISITIONS:
            raise ValueError(f"unknown acquisition {self.acquisition!r}")
        if not (self.budget >= self.init_count >= 1):
            raise ValueError("need budget >= init_count >= 1")
        if self.candidate_count < 1:
            raise ValueError("candidate_count must be at least 1")
        if self.backend == "external" and not self.external_backend_cmd:
            raise ValueError("external backend requires external_backend_cmd")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        return cls(**d)


@dataclass
class TraceRecord:
    iteration: int  # 1-based, counting every evaluation incl. initialization
    x: list[float]
    metrics: dict[str, float]
    fom: float
    incumbent_fom: float
    acq_value: float | None
    surrogate_queries: int
    acq_seconds: float
    eval_seconds: float
    fallback: bool = False


@dataclass
class RunTrace:
    bench: str
    method: str
    config: dict
    records: list[TraceRecord] = field(default_factory=list)
    schema_version: int = TRACE_SCHEMA_VERSION

    def incumbent_curve(self) -> np.ndarray:
        return np.array([r.incumbent_fom for r in self.records])

    @property
    def final_fom(self) -> float:
        return self.records[-1].incumbent_fom

    @property
    def best_index(self) -> int:
        foms = [r.fom for r in self.records]
        return int(np.argmax(foms))

    @property
    def best_point(self) -> list[float]:
        return self.records[self.best_index].x

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "bench": self.bench,
            "method": self.method,
            "config": self.config,
            "records": [asdict(r) for r in self.records],
        }

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1, sort_keys=True)
            fh.write("\n")

    @classmethod
    def from_dict(cls, d: dict) -> "RunTrace":
        trace = cls(
            bench=d["bench"],
            method=d["method"],
            config=d["config"],
            schema_version=d["schema_version"],
        )
        trace.records = [TraceRecord(**r) for r in d["records"]]
        return trace

    @classmethod
    def load(cls, path) -> "RunTrace":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def method_label(config: RunConfig) -> str:
    return f"{config.strategy}+{config.backend}+{config.acquisition}"


def strategy_instances(strategy: str, specs: SpecSet) -> int:
    """Surrogate instances the strategy queries per candidate."""
    if strategy == "direct_fom":
        return 1
    if strategy == "metric_decomposed":
        return len(specs)
    return len(specs.hard_items) + 1


def make_backend(config: RunConfig, space) -> "callable":
    """Factory for fresh backend instances (one per surrogate slot)."""
    bounds = (space.lower, space.upper)

    def factory(slot: int):
        if config.backend == "khist":
            return KernelHistogramBackend(num_bins=config.num_bins, bounds=bounds)
        if config.backend == "external":
            return ExternalBackend(
                command=config.external_backend_cmd,
                num_bins=config.num_bins,
                bounds=bounds,
            )
        kernel = {"gp_rbf": "rbf", "gp_matern": "matern52", "gp_linear": "linear"}[
            config.backend
        ]
        return GpBackend(
            kernel=kernel,
            num_bins=config.num_bins,
            bounds=bounds,
            seed=config.seed * 1000 + slot,
        )

    return factory


def make_evaluator(config: RunConfig, tb: Testbench):
    """In-repo analytic evaluation, or an external command receiving
    {"x": [...]} on stdin and answering {"metrics": {...}} on stdout."""
    if not config.external_eval_cmd:
        return lambda point: evaluate(tb, point)

    import shlex

    argv = shlex.split(config.external_eval_cmd)

    def external(point: DesignPoint) -> dict[str, float]:
        payload = json.dumps({"x": np.asarray(point).tolist()})
        proc = subprocess.run(
            argv,
            input=payload,
            capture_output=True,
            text=True,
            timeout=config.eval_timeout,
        )
        if proc.returncode != 0:
            raise RuntimeError(f"external evaluator failed: {proc.stderr.strip()}")
        reply = json.loads(proc.stdout)
        return {k: float(v) for k, v in reply["metrics"].items()}

    return external


# ---------------------------------------------------------------------------
# Acquisition scoring
# ---------------------------------------------------------------------------

def _acq_over_posterior(posterior, acquisition: str, f_star: float) -> float:
    if acquisition == "dei":
        return dei(posterior, f_star)
    mean, var = moments(posterior)
    return closed_form_ei(GaussianPosterior(mean, np.sqrt(var)), f_star)


def score_posteriors(posteriors, acquisition: str, f_star: float) -> np.ndarray:
    """Acquisition values for a batch of posteriors, vectorized when all
    posteriors share one bin count."""
    bins = {p.num_bins for p in posteriors}
    if len(bins) != 1:
        return np.array(
            [_acq_over_posterior(p, acquisition, f_star) for p in posteriors]
        )
    centers = np.stack([p.centers for p in posteriors])
    probs = np.stack([p.probs for p in posteriors])
    if acquisition == "dei":
        return dei_batch(centers, probs, f_star)
    means = np.einsum("ij,ij->i", centers, probs)
    variances = np.einsum("ij,ij->i", (centers - means[:, None]) ** 2, probs)
    stds = np.sqrt(np.maximum(variances, 0.0))
    delta = means - f_star
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(stds > 0, delta / np.where(stds > 0, stds, 1.0), 0.0)
        ei = delta * norm.cdf(z) + stds * norm.pdf(z)
    return np.maximum(np.where(stds > 0, ei, delta), 0.0)


def acquire_direct(backend, X_context, y_fom, candidates, acquisition, f_star):
    """One surrogate on the aggregated FoM; one prediction per candidate."""
    backend.fit(X_context, y_fom)
    posteriors = backend.predict_batch(candidates)
    scores = score_posteriors(posteriors, acquisition, f_star)
    return scores, len(candidates)


def _sample_posterior(posterior, rng: Rng, m: int) -> np.ndarray:
    cdf = np.cumsum(posterior.probs)
    u = rng.uniform(size=m)
    idx = np.minimum(np.searchsorted(cdf, u, side="right"), posterior.num_bins - 1)
    return posterior.centers[idx]


def acquire_metric_decomposed(
    backends, X_context, metric_contexts, candidates, specs, f_star, rng, m
):
    """One surrogate per metric; joint FoM samples via independent
    inverse-CDF draws from each metric's posterior."""
    per_metric = {}
    for name, backend in backends.items():
        backend.fit(X_context, metric_contexts[name])
        per_metric[name] = backend.predict_batch(candidates)
    n = len(candidates)
    scores = np.empty(n)
    for i in range(n):
        samples = {
            name: _sample_posterior(per_metric[name][i], rng, m) for name in backends
        }
        fom_samples = fom_batch(specs, samples)
        scores[i] = float(np.mean(np.maximum(fom_samples - f_star, 0.0)))
    return scores, n * len(backends)


def acquire_constraint_decomposed(
    backends, X_context, objective_context, margin_contexts, candidates, f_star_objective
):
    """Objective surrogate gated by the product of per-constraint
    probabilities of a nonnegative margin."""
    objective_backend = backends["__objective__"]
    objective_backend.fit(X_context, objective_context)
    obj_posteriors = objective_backend.predict_batch(candidates)
    scores = score_posteriors(obj_posteriors, "dei", f_star_objective)
    queries = len(candidates)
    for name, backend in backends.items():
        if name == "__objective__":
            continue
        backend.fit(X_context, margin_contexts[name])
        margin_posteriors = backend.predict_batch(candidates)
        mass = np.array([feasibility_mass(p, 0.0) for p in margin_posteriors])
        scores *= mass
        queries += len(candidates)
    return scores, queries


def select_next(scores: np.ndarray) -> int:
    """Argmax with deterministic lowest-index tie breaking."""
    scores = np.asarray(scores)
    if scores.size == 0:
        raise ValueError("no scored candidates")
    return int(np.argmax(scores))


# ---------------------------------------------------------------------------
# Main loop
# ---------------------------------------------------------------------------

class _RunState:
    """Rolling per-strategy contexts kept alongside the observation set."""

    def __init__(self, tb: Testbench, config: RunConfig):
        self.tb = tb
        self.config = config
        self.observations = ObservationSet()  # keyed on FoM
        self.metric_history: dict[str, list[float]] = {n: [] for n in tb.specs.names}
        self.objective_history: list[float] = []
        self.margin_history: dict[str, list[float]] = {
            it.name: [] for it in tb.specs.hard_items
        }

    def record(self, point: DesignPoint, metrics: dict[str, float]) -> float:
        value = fom(self.tb.specs, metrics)
        self.observations.append(point, value)
        for name in self.metric_history:
            self.metric_history[name].append(metrics[name])
        self.objective_history.append(target_score(self.tb.specs, metrics))
        for it in self.tb.specs.hard_items:
            self.margin_history[it.name].append(constraint_margin(it, metrics[it.name]))
        return value


def run(config: RunConfig) -> RunTrace:
    tb = get_testbench(config.bench)
    rng = Rng(config.seed)
    sample_rng = rng.spawn(1)
    acq_rng = rng.spawn(2)
    evaluator = make_evaluator(config, tb)
    factory = make_backend(config, tb.space)

    specs = tb.specs
    n_instances = strategy_instances(config.strategy, specs)
    if config.strategy == "direct_fom":
        backends = {"__fom__": factory(0)}
    elif config.strategy == "metric_decomposed":
        backends = {name: factory(i) for i, name in enumerate(specs.names)}
    else:
        backends = {"__objective__": factory(0)}
        backends.update(
            {it.name: factory(i + 1) for i, it in enumerate(specs.hard_items)}
        )

    state = _RunState(tb, config)
    trace = RunTrace(bench=config.bench, method=method_label(config), config=config.to_dict())

    def evaluate_and_record(point, acq_value, queries, acq_seconds, fallback=False):
        t0 = time.perf_counter()
        metrics = evaluator(point)
        eval_seconds = time.perf_counter() - t0
        state.record(point, metrics)
        trace.records.append(
            TraceRecord(
                iteration=len(state.observations),
                x=np.asarray(point).tolist(),
                metrics=metrics,
                fom=state.observations.values[-1],
                incumbent_fom=state.observations.incumbent_value,
                acq_value=acq_value,
                surrogate_queries=queries,
                acq_seconds=acq_seconds,
                eval_seconds=eval_seconds,
                fallback=fallback,
            )
        )

    for point in uniform_sample(tb.space, config.init_count, sample_rng):
        evaluate_and_record(point, None, 0, 0.0)

    for _ in range(config.budget - config.init_count):
        candidates = uniform_sample(tb.space, config.candidate_count, sample_rng)
        X_cand = points_to_array(candidates)
        X_ctx = state.observations.x_array()
        t0 = time.perf_counter()
        try:
            if config.strategy == "direct_fom":
                scores, queries = acquire_direct(
                    backends["__fom__"],
                    X_ctx,
                    state.observations.values,
                    X_cand,
                    config.acquisition,
                    state.observations.incumbent_value,
                )
            elif config.strategy == "metric_decomposed":
                scores, queries = acquire_metric_decomposed(
                    backends,
                    X_ctx,
                    {k: np.array(v) for k, v in state.metric_history.items()},
                    X_cand,
                    specs,
                    state.observations.incumbent_value,
                    acq_rng,
                    config.fom_samples,
                )
            else:
                scores, queries = acquire_constraint_decomposed(
                    backends,
                    X_ctx,
                    np.array(state.objective_history),
                    {k: np.array(v) for k, v in state.margin_history.items()},
                    X_cand,
                    max(state.objective_history),
                )
            chosen = select_next(scores)
            acq_value = float(scores[chosen])
            fallback = False
        except (KeyboardInterrupt, SystemExit):
            raise
        except Exception as exc:  # degrade to random selection, keep the run alive
            log.warning("surrogate failure, falling back to random choice: %s", exc)
            chosen = int(acq_rng.integers(0, config.candidate_count))
            acq_value = None
            queries = 0
            fallback = True
        acq_seconds = time.perf_counter() - t0
        evaluate_and_record(candidates[chosen], acq_value, queries, acq_seconds, fallback)

    for backend in backends.values():
        if isinstance(backend, ExternalBackend):
            backend.close()
    return trace


def random_search(config: RunConfig) -> RunTrace:
    tb = get_testbench(config.bench)
    rng = Rng(config.seed).spawn(1)
    evaluator = make_evaluator(config, tb)
    state = _RunState(tb, config)
    trace = RunTrace(bench=config.bench, method="random_search", config=config.to_dict())
    for point in uniform_sample(tb.space, config.budget, rng):
        t0 = time.perf_counter()
        metrics = evaluator(point)
        eval_seconds = time.perf_counter() - t0
        state.record(point, metrics)
        trace.records.append(
            TraceRecord(
                iteration=len(state.observations),
                x=np.asarray(point).tolist(),
                metrics=metrics,
                fom=state.observations.values[-1],
                incumbent_fom=state.observations.incumbent_value,
                acq_value=None,
                surrogate_queries=0,
                acq_seconds=0.0,
                eval_seconds=eval_seconds,
            )
        )
    return trace
