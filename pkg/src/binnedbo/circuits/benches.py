"""Synthetic analog testbenches composed from the function-family primitives.

Each testbench is a pure, deterministic map from a design point to a vector
of performance metrics, replacing a circuit simulator at desk scale while
keeping the structural traits that matter for surrogate modeling:
exponential bias sensitivity (bandgap), rational gain/bandwidth/phase
coupling (amplifiers), and near-discontinuous regime switching (regulator
and charge pump). Generated coefficients derive from a fixed per-bench
seed and are frozen in ``manifest.json``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from ..sampling import Rng
from ..space import DesignPoint, DesignSpace
from ..specs import (
    HARD_CONSTRAINT,
    MAXIMIZE,
    MINIMIZE,
    OPTIMIZATION_TARGET,
    SpecItem,
    SpecSet,
)
from .primitives import (
    exp_law,
    phase_margin,
    power_law,
    rational_response,
    regime_indicator,
    unity_gain_crossover,
)

__all__ = ["Testbench", "build_registry", "evaluate"]

VTH = 0.4  # V, nominal threshold
LAMBDA_L = 0.018e-6  # m/V, channel-length modulation scale (lambda = LAMBDA_L / l)
BOLTZMANN_VT = 8.617e-5  # V/K, thermal voltage slope kT/q


@dataclass(frozen=True)
class Testbench:
    name: str
    space: DesignSpace
    specs: SpecSet
    metric_fns: Mapping[str, Callable[[np.ndarray], float]]
    provenance: str
    constants: Mapping[str, list] = field(default_factory=dict)

    def __post_init__(self):
        missing = set(self.specs.names) - set(self.metric_fns)
        if missing:
            raise ValueError(f"specs without metric functions: {sorted(missing)}")


def evaluate(tb: Testbench, x: DesignPoint) -> dict[str, float]:
    """All metrics of one design; pure and deterministic."""
    coords = np.asarray(x, dtype=float)
    out = {}
    for name in tb.specs.names:
        value = float(tb.metric_fns[name](coords))
        if not math.isfinite(value):
            raise AssertionError(f"{tb.name}:{name} produced non-finite value at {coords}")
        out[name] = value
    return out


def _stage_gain(l: float, vb: float, drain_current: float) -> tuple[float, float]:
    """Transconductance and output resistance of one saturated stage."""
    vov = max(vb - VTH, 0.02)
    gm = 2.0 * drain_current / vov
    ro = l / (LAMBDA_L * drain_current)
    return gm, ro


# ---------------------------------------------------------------------------
# Two-stage amplifier, 12 variables
# ---------------------------------------------------------------------------

def _build_ota2() -> Testbench:
    names = ["w1", "l1", "w3", "l3", "w5", "l5", "ib1", "ib2", "cc", "vb1", "vb2", "rz"]
    lower = np.array([1e-6, 0.18e-6, 1e-6, 0.18e-6, 2e-6, 0.18e-6, 1e-6, 5e-6, 1e-13, 0.45, 0.45, 100.0])
    upper = np.array([100e-6, 2e-6, 100e-6, 2e-6, 200e-6, 2e-6, 50e-6, 200e-6, 5e-12, 0.9, 0.9, 1e4])
    space = DesignSpace(lower, upper)
    CL = 2e-12

    def small_signal(x):
        w1, l1, w3, l3, w5, l5, ib1, ib2, cc, vb1, vb2, rz = x
        gm1, ro1 = _stage_gain(l1, vb1, ib1 / 2.0)
        gm5, ro5 = _stage_gain(l5, vb2, ib2)
        av1 = gm1 * ro1 * (1.0 + 0.05 * math.log10(w1 / 1e-5))
        av2 = gm5 * ro5 * (1.0 + 0.05 * math.log10(w5 / 2e-5))
        p_miller = 1.0 / (2 * math.pi * ro1 * cc * av2)
        p_out = gm5 / (2 * math.pi * (CL + 1e-15 * w3 / 1e-6))
        gm3 = ib1 / 0.2
        p_mirror = gm3 / (2 * math.pi * (5e-15 * (w3 * l3) / (1e-6 * 0.18e-6)))
        z = 1.0 / (2 * math.pi * rz * cc)
        return av1 * av2, [p_miller, p_out, p_mirror], [z]

    def gain(x):
        a0, _, _ = small_signal(x)
        return 20.0 * math.log10(a0)

    def gbw(x):
        a0, poles, zeros = small_signal(x)
        return unity_gain_crossover(a0, poles, zeros)[0]

    def pm(x):
        a0, poles, zeros = small_signal(x)
        return phase_margin(a0, poles, zeros)

    def current(x):
        w1, _, w3, _, w5, _, ib1, ib2 = x[:8]
        return ib1 + ib2 + 1e-9 * (w1 + w3 + w5) / 1e-6

    specs = SpecSet(
        (
            SpecItem("gain", MAXIMIZE, 80.0, HARD_CONSTRAINT),
            SpecItem("pm", MAXIMIZE, 60.0, HARD_CONSTRAINT),
            SpecItem("gbw", MAXIMIZE, 1e6, HARD_CONSTRAINT),
            SpecItem("current", MINIMIZE, 1e-4, OPTIMIZATION_TARGET),
        )
    )
    fns = {"gain": gain, "pm": pm, "gbw": gbw, "current": current}
    return Testbench("ota2-analytic", space, specs, fns, "analytic",
                     constants={"variables": names})


# ---------------------------------------------------------------------------
# Three-stage amplifier, 18 variables
# ---------------------------------------------------------------------------

def _build_ota3() -> Testbench:
    names = [
        "w1", "l1", "w2", "l2", "w3", "l3", "w4", "l4",
        "ib1", "ib2", "ib3", "vb1", "vb2", "vb3",
        "cc1", "cc2", "rz1", "rz2",
    ]
    lower = np.array([1e-6, 0.18e-6, 1e-6, 0.18e-6, 2e-6, 0.18e-6, 1e-6, 0.18e-6,
                      1e-6, 2e-6, 5e-6, 0.45, 0.45, 0.45, 1e-13, 1e-13, 100.0, 100.0])
    upper = np.array([100e-6, 2e-6, 100e-6, 2e-6, 200e-6, 2e-6, 100e-6, 2e-6,
                      50e-6, 100e-6, 200e-6, 0.9, 0.9, 0.9, 5e-12, 5e-12, 1e4, 1e4])
    space = DesignSpace(lower, upper)
    CL = 5e-12

    def small_signal(x):
        (w1, l1, w2, l2, w3, l3, w4, l4,
         ib1, ib2, ib3, vb1, vb2, vb3, cc1, cc2, rz1, rz2) = x
        gm1, ro1 = _stage_gain(l1, vb1, ib1 / 2.0)
        gm2, ro2 = _stage_gain(l2, vb2, ib2)
        gm3, ro3 = _stage_gain(l3, vb3, ib3)
        av1 = gm1 * ro1 * (1.0 + 0.05 * math.log10(w1 / 1e-5))
        av2 = gm2 * ro2 * (1.0 + 0.05 * math.log10(w2 / 1e-5))
        av3 = gm3 * ro3 * (1.0 + 0.05 * math.log10(w3 / 2e-5))
        # Nested-Miller style pole stack: dominant pole from cc1, compressed
        # inner poles from cc2 and the load.
        p1 = 1.0 / (2 * math.pi * ro1 * cc1 * av2 * av3)
        p2 = gm2 / (2 * math.pi * cc2 * 50.0)
        p3 = gm3 / (2 * math.pi * (CL + 1e-15 * w4 / 1e-6))
        z1 = 1.0 / (2 * math.pi * rz1 * cc1)
        z2 = 1.0 / (2 * math.pi * rz2 * cc2)
        # Load pair trims the first nondominant pole.
        p2 = p2 * (1.0 + 0.05 * math.log10((w4 / l4) / (1e-6 / 0.18e-6)))
        return av1 * av2 * av3, [p1, p2, p3], [z1, z2]

    def gain(x):
        a0, _, _ = small_signal(x)
        return 20.0 * math.log10(a0)

    def gbw(x):
        a0, poles, zeros = small_signal(x)
        return unity_gain_crossover(a0, poles, zeros)[0]

    def pm(x):
        a0, poles, zeros = small_signal(x)
        return phase_margin(a0, poles, zeros)

    def current(x):
        return float(x[8] + x[9] + x[10] + 1e-9 * (x[0] + x[2] + x[4] + x[6]) / 1e-6)

    specs = SpecSet(
        (
            SpecItem("gain", MAXIMIZE, 100.0, HARD_CONSTRAINT),
            SpecItem("pm", MAXIMIZE, 55.0, HARD_CONSTRAINT),
            SpecItem("gbw", MAXIMIZE, 5e5, HARD_CONSTRAINT),
            SpecItem("current", MINIMIZE, 2e-4, OPTIMIZATION_TARGET),
        )
    )
    fns = {"gain": gain, "pm": pm, "gbw": gbw, "current": current}
    return Testbench("ota3-analytic", space, specs, fns, "analytic",
                     constants={"variables": names})


# ---------------------------------------------------------------------------
# Bandgap reference, 20 variables, exponential-dominated
# ---------------------------------------------------------------------------

BANDGAP_SEED = 103
N_EXP = 8
TEMPS_K = (253.15, 300.15, 358.15)  # -20C, 27C, 85C


def _build_bandgap() -> Testbench:
    rng = Rng(BANDGAP_SEED)
    # Mixed-sign weights and per-branch ideality factors; frozen via seed.
    weights = rng.uniform(-1.0, 1.0, size=N_EXP)
    weights = np.where(np.abs(weights) < 0.2, np.sign(weights) * 0.2 + (weights == 0) * 0.2, weights)
    idealities = rng.uniform(1.0, 2.0, size=N_EXP)

    lower = np.concatenate([np.full(N_EXP, 0.05), np.full(N_EXP, 1e3),
                            [1.0, 1e-6, 0.5e-6, 1e-6]])
    upper = np.concatenate([np.full(N_EXP, 0.45), np.full(N_EXP, 1e5),
                            [24.0, 50e-6, 5e-6, 20e-6]])
    space = DesignSpace(lower, upper)

    def branch_voltage(x, temp_k):
        v = x[:N_EXP]
        r = x[N_EXP : 2 * N_EXP]
        vt = BOLTZMANN_VT * temp_k
        total = 0.0
        for j in range(N_EXP):
            total += weights[j] * (r[j] / 1e4) * 1e-5 * exp_law(v[j], idealities[j], vt)
        return total

    def tc(x):
        v1, v2, v3 = (branch_voltage(x, t) for t in TEMPS_K)
        curvature = v1 - 2.0 * v2 + v3
        return math.sqrt(curvature**2 + 1.0)

    def current(x):
        m, w, l, ib = x[2 * N_EXP :]
        vt = BOLTZMANN_VT * 300.15
        weak = sum(exp_law(x[j] * 0.5, 2.0, vt) for j in range(N_EXP)) * 1e-9
        return ib * (1.0 + m / 48.0) + weak + 1e-9 * w / l

    def psrr(x):
        r = x[N_EXP : 2 * N_EXP]
        m, w, l, ib = x[2 * N_EXP :]
        a0 = (ib / 1e-6) * (float(np.mean(r)) / 1e4) * 10.0 * (1.0 + 0.1 * math.log10(m))
        pole = 1.0 / (2 * math.pi * float(np.mean(r)) * 10e-12)
        mag_db, _ = rational_response(1e3, max(a0, 1.1), [pole])
        return max(mag_db, 1.0)

    specs = SpecSet(
        (
            SpecItem("current", MINIMIZE, 1.5e-5, HARD_CONSTRAINT),
            SpecItem("psrr", MAXIMIZE, 40.0, HARD_CONSTRAINT),
            SpecItem("tc", MINIMIZE, 50.0, OPTIMIZATION_TARGET),
        )
    )
    fns = {"tc": tc, "current": current, "psrr": psrr}
    return Testbench(
        "bandgap-analytic", space, specs, fns, f"generated(seed={BANDGAP_SEED})",
        constants={
            "weights": weights.tolist(),
            "idealities": idealities.tolist(),
            "temps_k": list(TEMPS_K),
        },
    )


# ---------------------------------------------------------------------------
# High-dimensional transconductor, 53 variables, mostly smooth
# ---------------------------------------------------------------------------

GM_SEED = 104
N_SEG = 16


def _build_gm_highdim() -> Testbench:
    rng = Rng(GM_SEED)
    seg_gain = rng.uniform(0.5, 1.5, size=N_SEG)  # per-segment process factor

    # Layout: 16x w, 16x l, 16x vb, then [ib1, ib2, cdeg, rdeg, vtail].
    lower = np.concatenate([np.full(N_SEG, 1e-6), np.full(N_SEG, 0.2e-6),
                            np.full(N_SEG, 0.45), [1e-6, 1e-6, 1e-13, 100.0, 0.45]])
    upper = np.concatenate([np.full(N_SEG, 50e-6), np.full(N_SEG, 2e-6),
                            np.full(N_SEG, 0.9), [50e-6, 50e-6, 5e-12, 1e4, 0.9]])
    space = DesignSpace(lower, upper)
    KP = 1e-4

    def segment_gms(x):
        w = x[:N_SEG]
        l = x[N_SEG : 2 * N_SEG]
        vb = x[2 * N_SEG : 3 * N_SEG]
        rdeg = x[3 * N_SEG + 3]
        gms = np.empty(N_SEG)
        for i in range(N_SEG):
            g = KP * seg_gain[i] * power_law(w[i], l[i], vb[i] - VTH, 1.5)
            gms[i] = g / (1.0 + g * rdeg)  # source degeneration
        return gms

    def gm_total(x):
        return float(np.sum(segment_gms(x)) * 1e3)  # mS

    def pm(x):
        ib1, ib2, cdeg, rdeg, vtail = x[3 * N_SEG :]
        g = np.sum(segment_gms(x))
        a0 = max(g * 5e4, 2.0)
        p1 = 1.0 / (2 * math.pi * 5e4 * max(cdeg, 1e-14))
        p2 = (g + 1e-5) / (2 * math.pi * 2e-12)
        return phase_margin(a0, [p1, p2])

    def noise(x):
        g = np.sum(segment_gms(x))
        ib1 = x[3 * N_SEG]
        return 1e9 * math.sqrt(1.66e-20 / (g + 1e-6)) * (1.0 + 1e-6 / ib1)

    def thd(x):
        gms = segment_gms(x)
        vtail = x[3 * N_SEG + 4]
        spread = float(np.std(gms) / (np.mean(gms) + 1e-12))
        return 100.0 * spread * (1.0 + (vtail - VTH))

    specs = SpecSet(
        (
            SpecItem("gm", MAXIMIZE, 5.0, OPTIMIZATION_TARGET),
            SpecItem("pm", MAXIMIZE, 60.0, HARD_CONSTRAINT),
            SpecItem("noise", MINIMIZE, 3.5, HARD_CONSTRAINT),
            SpecItem("thd", MINIMIZE, 80.0, HARD_CONSTRAINT),
        )
    )
    fns = {"gm": gm_total, "pm": pm, "noise": noise, "thd": thd}
    return Testbench(
        "gm-highdim", space, specs, fns, f"generated(seed={GM_SEED})",
        constants={"segment_gain": seg_gain.tolist()},
    )


# ---------------------------------------------------------------------------
# Low-dropout regulator, 21 variables, regime-gated response
# ---------------------------------------------------------------------------

LDO_SEED = 105


def _build_ldo() -> Testbench:
    names = ["wp", "lp", "w1", "l1", "w2", "l2", "ib1", "ib2", "vb1", "vb2",
             "cc", "cload", "resr", "rfb1", "rfb2", "vref", "iload", "vdd",
             "wbuf", "lbuf", "ibuf"]
    lower = np.array([100e-6, 0.18e-6, 1e-6, 0.18e-6, 1e-6, 0.18e-6, 1e-6, 1e-6,
                      0.45, 0.3, 1e-13, 1e-10, 0.01, 1e4, 1e4, 0.5, 1e-4, 1.4,
                      1e-6, 0.18e-6, 1e-6])
    upper = np.array([5000e-6, 1e-6, 100e-6, 2e-6, 100e-6, 2e-6, 50e-6, 50e-6,
                      0.9, 0.9, 5e-12, 1e-8, 10.0, 1e6, 1e6, 1.2, 1e-2, 2.0,
                      100e-6, 2e-6, 50e-6])
    space = DesignSpace(lower, upper)

    def regime(x):
        # Pass-device saturation indicator: headroom vs. required overdrive.
        vb2, vref, vdd = x[9], x[15], x[17]
        headroom = vdd - vref - (vb2 - VTH)
        return regime_indicator(headroom, 0.35, sharpness=40.0)

    def loop(x):
        wp, lp, w1, l1, w2, l2, ib1, ib2, vb1 = x[:9]
        cc, cload, resr = x[10], x[11], x[12]
        iload = x[16]
        gm1, ro1 = _stage_gain(l1, vb1, ib1 / 2.0)
        av1 = gm1 * ro1
        gmp = 2.0 * iload / 0.2 * (1.0 + 0.5 * math.log10(wp / 1e-3))
        rop = lp / (LAMBDA_L * iload)
        s = regime(x)
        # Dropout collapses the pass-device gain by ~30x.
        avp = gmp * rop * (0.03 + 0.97 * s)
        a0 = max(av1 * avp, 1.5)
        p1 = 1.0 / (2 * math.pi * ro1 * cc * max(avp, 1.0))
        p2 = 1.0 / (2 * math.pi * (rop / (1.0 + gmp * rop * 0.5) + resr) * cload)
        z_esr = 1.0 / (2 * math.pi * resr * cload)
        return a0, [p1, p2], [min(z_esr, 1e11)], s

    def psrr(x):
        a0, poles, zeros, s = loop(x)
        mag_db, _ = rational_response(1e3, a0, poles, zeros)
        return max(mag_db * (0.25 + 0.75 * s), 0.5)

    def gbw(x):
        a0, poles, zeros, _ = loop(x)
        return unity_gain_crossover(a0, poles, zeros)[0]

    def pm(x):
        a0, poles, zeros, _ = loop(x)
        return phase_margin(a0, poles, zeros)

    def power(x):
        ib1, ib2, iload, vdd, ibuf = x[6], x[7], x[16], x[17], x[20]
        s = regime(x)
        drop = (0.2 + 0.3 * (1.0 - s)) * vdd
        return vdd * (ib1 + ib2 + ibuf) + drop * iload

    def area(x):
        wp, lp, w1, l1, w2, l2 = x[:6]
        wbuf, lbuf = x[18], x[19]
        return (wp * lp + w1 * l1 + w2 * l2 + wbuf * lbuf) / 1e-12  # um^2

    specs = SpecSet(
        (
            SpecItem("psrr", MAXIMIZE, 30.0, HARD_CONSTRAINT),
            SpecItem("gbw", MAXIMIZE, 1e5, HARD_CONSTRAINT),
            SpecItem("pm", MAXIMIZE, 45.0, HARD_CONSTRAINT),
            SpecItem("power", MINIMIZE, 5e-3, HARD_CONSTRAINT),
            SpecItem("area", MINIMIZE, 5000.0, OPTIMIZATION_TARGET),
        )
    )
    fns = {"psrr": psrr, "gbw": gbw, "pm": pm, "power": power, "area": area}
    return Testbench("ldo-regime", space, specs, fns, f"generated(seed={LDO_SEED})",
                     constants={"variables": names})


# ---------------------------------------------------------------------------
# Charge pump, 36 variables, piecewise via gated branches
# ---------------------------------------------------------------------------

CP_SEED = 106
N_SW = 8


def _build_chargepump() -> Testbench:
    rng = Rng(CP_SEED)
    branch_gain = rng.uniform(0.8, 1.2, size=N_SW)
    branch_vth = rng.uniform(0.55, 0.75, size=N_SW)  # gate thresholds inside vb range

    # Layout: 8x w, 8x l, 8x vb, 6x cap, then [iref, vdd, fclk, rload, cfilt, vctrl].
    lower = np.concatenate([np.full(N_SW, 1e-6), np.full(N_SW, 0.18e-6),
                            np.full(N_SW, 0.45), np.full(6, 1e-13),
                            [1e-5, 1.4, 1e6, 1e3, 1e-12, 0.3]])
    upper = np.concatenate([np.full(N_SW, 100e-6), np.full(N_SW, 2e-6),
                            np.full(N_SW, 0.9), np.full(6, 1e-11),
                            [5e-4, 2.0, 1e8, 1e5, 1e-9, 1.2]])
    space = DesignSpace(lower, upper)
    KP = 2e-4

    def branch_currents(x):
        w = x[:N_SW]
        l = x[N_SW : 2 * N_SW]
        vb = x[2 * N_SW : 3 * N_SW]
        cur = np.empty(N_SW)
        for i in range(N_SW):
            gate = regime_indicator(vb[i], branch_vth[i], sharpness=60.0)
            cur[i] = gate * KP * branch_gain[i] * power_law(w[i], l[i], vb[i] - VTH, 2.0)
        return cur

    def matching(x):
        cur = branch_currents(x)
        iup = float(np.sum(cur[: N_SW // 2]))
        idn = float(np.sum(cur[N_SW // 2 :]))
        return 100.0 * abs(iup - idn) / (iup + idn + 1e-9)

    def deviation(x):
        caps = x[3 * N_SW : 3 * N_SW + 6]
        iref, vdd, fclk = x[30], x[31], x[32]
        cur = branch_currents(x)
        itot = float(np.sum(cur)) + iref
        ripple = itot / (fclk * (float(np.sum(caps)) + 1e-13))
        return 10.0 * ripple / vdd

    def stability(x):
        rload, cfilt, vctrl = x[33], x[34], x[35]
        iref = x[30]
        cur = branch_currents(x)
        kcp = (float(np.sum(cur)) + iref) / (2 * math.pi)
        a0 = max(kcp * rload * 1e3, 2.0)
        p1 = 1.0 / (2 * math.pi * rload * (cfilt + 1e-13))
        p2 = x[32] / 10.0  # sampling pole at fclk/10
        z = 1.0 / (2 * math.pi * rload * 0.2 * (cfilt + 1e-13))
        gate = regime_indicator(vctrl, 0.75, sharpness=30.0)
        return phase_margin(a0, [p1, p2], [min(z, 1e11)]) * (0.4 + 0.6 * gate)

    def cost(x):
        w = x[:N_SW]
        l = x[N_SW : 2 * N_SW]
        caps = x[3 * N_SW : 3 * N_SW + 6]
        area = float(np.sum(w * l)) / 1e-12 + float(np.sum(caps)) / 1e-15 * 0.001
        return area

    specs = SpecSet(
        (
            SpecItem("matching", MINIMIZE, 20.0, HARD_CONSTRAINT),
            SpecItem("deviation", MINIMIZE, 30.0, HARD_CONSTRAINT),
            SpecItem("stability", MAXIMIZE, 45.0, HARD_CONSTRAINT),
            SpecItem("cost", MINIMIZE, 500.0, OPTIMIZATION_TARGET),
        )
    )
    fns = {"matching": matching, "deviation": deviation, "stability": stability, "cost": cost}
    return Testbench(
        "chargepump-regime", space, specs, fns, f"generated(seed={CP_SEED})",
        constants={"branch_gain": branch_gain.tolist(), "branch_vth": branch_vth.tolist()},
    )


# ---------------------------------------------------------------------------

_BUILDERS = (
    _build_ota2,
    _build_ota3,
    _build_bandgap,
    _build_gm_highdim,
    _build_ldo,
    _build_chargepump,
)

_REGISTRY: dict[str, Testbench] | None = None

# Dominant metric modeled in the regression protocol, per bench.
DOMINANT_METRIC = {
    "ota2-analytic": "gain",
    "ota3-analytic": "gain",
    "bandgap-analytic": "tc",
    "gm-highdim": "gm",
    "ldo-regime": "psrr",
    "chargepump-regime": "matching",
}


def build_registry() -> dict[str, Testbench]:
    global _REGISTRY
    if _REGISTRY is None:
        _REGISTRY = {tb.name: tb for tb in (b() for b in _BUILDERS)}
    return _REGISTRY


def get_testbench(name: str) -> Testbench:
    registry = build_registry()
    if name not in registry:
        raise KeyError(f"unknown testbench {name!r}; available: {sorted(registry)}")
    return registry[name]


def manifest_dict() -> dict:
    """Frozen description of every testbench (dims, bounds, specs, generated
    constants); committed as manifest.json and golden-tested."""
    out = {}
    for name, tb in build_registry().items():
        out[name] = {
            "dim": tb.space.dim,
            "lower": tb.space.lower.tolist(),
            "upper": tb.space.upper.tolist(),
            "provenance": tb.provenance,
            "specs": [
                {
                    "name": it.name,
                    "direction": it.direction,
                    "threshold": it.threshold,
                    "role": it.role,
                }
                for it in tb.specs.items
            ],
            "constants": {k: list(v) for k, v in tb.constants.items()},
        }
    return out
