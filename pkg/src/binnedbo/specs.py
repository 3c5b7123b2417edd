"""Specification scoring and figure-of-merit aggregation.

Each specification contributes a normalized score: hard constraints are
clipped at 1 once satisfied, optimization targets keep growing past their
threshold but only after every hard constraint of the evaluated design is
met. The figure of merit (FoM) is the plain sum of the scores, so a design
meeting every spec exactly scores N.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping

import numpy as np

__all__ = [
    "SpecItem",
    "SpecSet",
    "score_item",
    "fom",
    "fom_batch",
    "constraint_margin",
    "MAXIMIZE",
    "MINIMIZE",
    "HARD_CONSTRAINT",
    "OPTIMIZATION_TARGET",
]

log = logging.getLogger(__name__)

MAXIMIZE = "maximize"
MINIMIZE = "minimize"
HARD_CONSTRAINT = "hard_constraint"
OPTIMIZATION_TARGET = "optimization_target"

# Ratio scoring is undefined at zero; raw metric values below this floor are
# clamped (and flagged) before dividing.
METRIC_FLOOR = 1e-12


@dataclass(frozen=True)
class SpecItem:
    name: str
    direction: str
    threshold: float
    role: str

    def __post_init__(self):
        if self.direction not in (MAXIMIZE, MINIMIZE):
            raise ValueError(f"unknown direction {self.direction!r}")
        if self.role not in (HARD_CONSTRAINT, OPTIMIZATION_TARGET):
            raise ValueError(f"unknown role {self.role!r}")
        if not self.threshold > 0:
            raise ValueError("spec thresholds must be strictly positive")

    def satisfied(self, value: float) -> bool:
        if self.direction == MAXIMIZE:
            return value >= self.threshold
        return value <= self.threshold


@dataclass(frozen=True)
class SpecSet:
    items: tuple[SpecItem, ...]

    def __post_init__(self):
        items = tuple(self.items)
        if not items:
            raise ValueError("a spec set needs at least one item")
        names = [it.name for it in items]
        if len(set(names)) != len(names):
            raise ValueError("spec names must be unique")
        object.__setattr__(self, "items", items)

    @property
    def names(self) -> list[str]:
        return [it.name for it in self.items]

    @property
    def hard_items(self) -> list[SpecItem]:
        return [it for it in self.items if it.role == HARD_CONSTRAINT]

    @property
    def target_items(self) -> list[SpecItem]:
        return [it for it in self.items if it.role == OPTIMIZATION_TARGET]

    def __len__(self) -> int:
        return len(self.items)


def _ratio(spec: SpecItem, value):
    value = np.asarray(value, dtype=float)
    if np.any(value < METRIC_FLOOR):
        log.warning(
            "metric %r produced values below %g; clamping before ratio scoring",
            spec.name,
            METRIC_FLOOR,
        )
        value = np.maximum(value, METRIC_FLOOR)
    if spec.direction == MAXIMIZE:
        return value / spec.threshold
    return spec.threshold / value


def score_item(spec: SpecItem, value: float, all_hard_met: bool) -> float:
    """Normalized score of one metric value against one spec."""
    ratio = _ratio(spec, value)
    if spec.role == OPTIMIZATION_TARGET and all_hard_met:
        return float(ratio)
    return float(np.minimum(ratio, 1.0))


def _check_keys(specs: SpecSet, metrics: Mapping[str, float]) -> None:
    expected = set(specs.names)
    got = set(metrics)
    if expected != got:
        raise ValueError(
            f"metric keys {sorted(got)} do not match spec names {sorted(expected)}"
        )


def fom(specs: SpecSet, metrics: Mapping[str, float]) -> float:
    """Figure of merit: sum of normalized per-spec scores."""
    _check_keys(specs, metrics)
    for name, value in metrics.items():
        if not np.isfinite(value):
            raise ValueError(f"metric {name!r} is not finite: {value!r}")
    all_hard_met = all(it.satisfied(metrics[it.name]) for it in specs.hard_items)
    return float(
        sum(score_item(it, metrics[it.name], all_hard_met) for it in specs.items)
    )


def fom_batch(specs: SpecSet, metrics: Mapping[str, np.ndarray]) -> np.ndarray:
    """Vectorized `fom` over aligned metric arrays (any common shape)."""
    _check_keys(specs, metrics)
    arrays = {k: np.asarray(v, dtype=float) for k, v in metrics.items()}
    shape = next(iter(arrays.values())).shape
    all_hard_met = np.ones(shape, dtype=bool)
    for it in specs.hard_items:
        v = arrays[it.name]
        sat = v >= it.threshold if it.direction == MAXIMIZE else v <= it.threshold
        all_hard_met &= sat
    total = np.zeros(shape)
    for it in specs.items:
        ratio = _ratio(it, arrays[it.name])
        clipped = np.minimum(ratio, 1.0)
        if it.role == OPTIMIZATION_TARGET:
            total += np.where(all_hard_met, ratio, clipped)
        else:
            total += clipped
    return total


def feasible(specs: SpecSet, metrics: Mapping[str, float]) -> bool:
    return all(it.satisfied(metrics[it.name]) for it in specs.hard_items)


def constraint_margin(spec: SpecItem, value: float) -> float:
    """Signed distance from the threshold; nonnegative iff satisfied."""
    if spec.role != HARD_CONSTRAINT:
        raise ValueError("constraint_margin applies to hard constraints only")
    if spec.direction == MAXIMIZE:
        return float(value - spec.threshold)
    return float(spec.threshold - value)


def target_score(specs: SpecSet, metrics: Mapping[str, float]) -> float:
    """Unclipped sum of the optimization targets' ratio scores. Used as the
    scalar objective by the constraint-decomposed strategy."""
    return float(sum(_ratio(it, metrics[it.name]) for it in specs.target_items))
