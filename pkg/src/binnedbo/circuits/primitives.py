"""Physics-derived function-family primitives.

Transistor-level behavior is built from a small vocabulary: exponential
device laws (weak inversion), power laws (strong inversion), single-real-
pole/zero rational transfer responses, and near-step regime indicators at
threshold boundaries. The synthetic testbenches compose only these.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "exp_law",
    "power_law",
    "rational_response",
    "unity_gain_crossover",
    "regime_indicator",
]

EXP_CLAMP = 40.0  # exponent cap; exp(40) ~ 2.35e17, far past any metric scale
DEFAULT_SHARPNESS = 200.0  # 1/V; ~10 mV transition width
CROSSOVER_RANGE = (1e-2, 1e12)  # Hz


def exp_law(v: float, n: float = 1.0, vt: float = 0.026) -> float:
    """Weak-inversion exponential exp(v / (n * vt)), overflow-clamped."""
    if vt <= 0 or n <= 0:
        raise ValueError("ideality factor and thermal voltage must be positive")
    return math.exp(min(v / (n * vt), EXP_CLAMP))


def power_law(w: float, l: float, vov: float, alpha: float = 2.0) -> float:
    """Strong-inversion drive (w/l) * max(vov, 0)**alpha."""
    if w <= 0 or l <= 0:
        raise ValueError("device dimensions must be positive")
    if not 1.0 <= alpha <= 2.0:
        raise ValueError("alpha must lie in [1, 2]")
    return (w / l) * max(vov, 0.0) ** alpha


def rational_response(f, dc_gain: float, poles, zeros=()) -> tuple:
    """Magnitude (dB) and phase (degrees) of a product of single real
    poles/zeros at frequency f (Hz). Accepts scalar or array f."""
    poles = np.asarray(poles, dtype=float)
    zeros = np.asarray(zeros, dtype=float)
    if np.any(poles <= 0) or np.any(zeros <= 0):
        raise ValueError("pole and zero frequencies must be positive")
    if zeros.size > poles.size:
        raise ValueError("need at least as many poles as zeros")
    f = np.asarray(f, dtype=float)
    fu = f[..., None]
    mag_db = 20.0 * np.log10(dc_gain)
    mag_db = mag_db + 10.0 * np.log10(1.0 + (fu / zeros) ** 2).sum(axis=-1)
    mag_db = mag_db - 10.0 * np.log10(1.0 + (fu / poles) ** 2).sum(axis=-1)
    phase = np.degrees(
        np.arctan(fu / zeros).sum(axis=-1) - np.arctan(fu / poles).sum(axis=-1)
    )
    if f.ndim == 0:
        return float(mag_db), float(phase)
    return mag_db, phase


def unity_gain_crossover(dc_gain: float, poles, zeros=()) -> tuple[float, bool]:
    """Frequency where the rational response crosses 0 dB, by bisection.

    Returns (frequency_hz, crossed). When the magnitude never reaches 0 dB
    inside the search range the upper end is returned with crossed=False
    (treated as unbounded gain-bandwidth by callers).
    """
    lo, hi = CROSSOVER_RANGE

    def mag(f):
        return rational_response(f, dc_gain, poles, zeros)[0]

    if mag(lo) <= 0.0:
        return lo, True
    if mag(hi) > 0.0:
        return hi, False
    for _ in range(200):
        mid = math.sqrt(lo * hi)  # bisect in log-frequency
        m = mag(mid)
        if abs(m) < 1e-6:
            return mid, True
        if m > 0.0:
            lo = mid
        else:
            hi = mid
    return math.sqrt(lo * hi), True


def phase_margin(dc_gain: float, poles, zeros=()) -> float:
    """180 degrees plus the phase at the unity-gain crossover, floored at 1
    (bench metrics are positive-valued for ratio scoring)."""
    fc, _ = unity_gain_crossover(dc_gain, poles, zeros)
    return max(180.0 + rational_response(fc, dc_gain, poles, zeros)[1], 1.0)


def regime_indicator(v: float, vth: float, sharpness: float = DEFAULT_SHARPNESS) -> float:
    """Logistic operating-region indicator in [0, 1], near-step at vth."""
    if sharpness <= 0:
        raise ValueError("sharpness must be positive")
    x = sharpness * (v - vth)
    if x >= EXP_CLAMP:
        return 1.0
    if x <= -EXP_CLAMP:
        return 0.0
    return 1.0 / (1.0 + math.exp(-x))
