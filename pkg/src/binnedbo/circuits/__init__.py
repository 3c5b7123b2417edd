from .benches import DOMINANT_METRIC, Testbench, build_registry, evaluate, get_testbench
from .primitives import (
    exp_law,
    phase_margin,
    power_law,
    rational_response,
    regime_indicator,
    unity_gain_crossover,
)

__all__ = [
    "Testbench",
    "build_registry",
    "get_testbench",
    "evaluate",
    "DOMINANT_METRIC",
    "exp_law",
    "power_law",
    "rational_response",
    "unity_gain_crossover",
    "phase_margin",
    "regime_indicator",
]
