"""Function-family primitives against hand-derived analytic oracles."""

import math

import numpy as np
import pytest

from binnedbo.circuits.primitives import (
    EXP_CLAMP,
    exp_law,
    phase_margin,
    power_law,
    rational_response,
    regime_indicator,
    unity_gain_crossover,
)


class TestExpLaw:
    def test_hand_value(self):
        assert exp_law(0.13, n=1.0, vt=0.026) == pytest.approx(math.exp(5.0), rel=1e-12)

    def test_ideality_scales_slope(self):
        assert exp_law(0.13, n=2.0, vt=0.026) == pytest.approx(math.exp(2.5), rel=1e-12)

    def test_overflow_clamped(self):
        assert exp_law(100.0) == math.exp(EXP_CLAMP)

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            exp_law(0.1, n=0.0)
        with pytest.raises(ValueError):
            exp_law(0.1, vt=-1.0)


class TestPowerLaw:
    def test_hand_value(self):
        assert power_law(2e-6, 1e-6, 0.3, alpha=2.0) == pytest.approx(0.18, rel=1e-12)

    def test_negative_overdrive_cut_off(self):
        assert power_law(1e-6, 1e-6, -0.2) == 0.0

    def test_alpha_bounds(self):
        with pytest.raises(ValueError):
            power_law(1e-6, 1e-6, 0.3, alpha=0.5)
        with pytest.raises(ValueError):
            power_law(1e-6, 1e-6, 0.3, alpha=2.5)


class TestRationalResponse:
    def test_corner_frequency(self):
        # At the pole frequency: -3.0103 dB below dc, -45 degrees.
        mag, phase = rational_response(1e3, 100.0, [1e3])
        assert mag == pytest.approx(40.0 - 10.0 * math.log10(2.0), abs=1e-12)
        assert phase == pytest.approx(-45.0, abs=1e-12)

    def test_zero_cancels_pole(self):
        mag, phase = rational_response(123.0, 10.0, [1e4], [1e4])
        assert mag == pytest.approx(20.0, abs=1e-12)
        assert phase == pytest.approx(0.0, abs=1e-12)

    def test_two_poles_sum_in_db(self):
        m1, p1 = rational_response(5e2, 1.0, [1e3])
        m2, p2 = rational_response(5e2, 1.0, [1e4])
        m12, p12 = rational_response(5e2, 1.0, [1e3, 1e4])
        assert m12 == pytest.approx(m1 + m2, abs=1e-12)
        assert p12 == pytest.approx(p1 + p2, abs=1e-12)

    def test_vectorized_over_frequency(self):
        f = np.array([1e2, 1e3, 1e4])
        mag, phase = rational_response(f, 100.0, [1e3])
        assert mag.shape == (3,) and phase.shape == (3,)
        m_scalar, _ = rational_response(1e3, 100.0, [1e3])
        assert mag[1] == pytest.approx(m_scalar, abs=1e-12)

    def test_rejects_more_zeros_than_poles(self):
        with pytest.raises(ValueError):
            rational_response(1.0, 1.0, [1e3], [1e2, 1e4])

    def test_rejects_nonpositive_pole(self):
        with pytest.raises(ValueError):
            rational_response(1.0, 1.0, [-5.0])


class TestUnityGainCrossover:
    def test_single_pole_analytic(self):
        # |A0 / sqrt(1 + (f/p)^2)| = 1 at f = p sqrt(A0^2 - 1)
        a0, p = 1000.0, 1e4
        f, crossed = unity_gain_crossover(a0, [p])
        assert crossed
        assert f == pytest.approx(p * math.sqrt(a0**2 - 1.0), rel=1e-6)

    def test_gain_below_unity_returns_low_edge(self):
        f, crossed = unity_gain_crossover(0.5, [1e6])
        assert crossed and f == 1e-2

    def test_never_crossing_flagged(self):
        f, crossed = unity_gain_crossover(1e30, [1e30])
        assert not crossed and f == 1e12


class TestPhaseMargin:
    def test_single_pole_analytic(self):
        a0 = 1000.0
        pm = phase_margin(a0, [1e4])
        expected = 180.0 - math.degrees(math.atan(math.sqrt(a0**2 - 1.0)))
        assert pm == pytest.approx(expected, abs=1e-4)

    def test_floored_at_one(self):
        # Three coincident poles drive the phase far past -180 at crossover.
        assert phase_margin(1e6, [1e3, 1e3, 1e3]) == 1.0


class TestRegimeIndicator:
    def test_midpoint(self):
        assert regime_indicator(0.5, 0.5) == 0.5

    def test_saturates(self):
        assert regime_indicator(10.0, 0.5) == 1.0
        assert regime_indicator(-10.0, 0.5) == 0.0

    def test_logistic_hand_value(self):
        got = regime_indicator(0.51, 0.5, sharpness=200.0)
        assert got == pytest.approx(1.0 / (1.0 + math.exp(-2.0)), rel=1e-12)

    def test_monotone(self):
        vals = [regime_indicator(v, 0.5, 50.0) for v in np.linspace(0.3, 0.7, 41)]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_rejects_nonpositive_sharpness(self):
        with pytest.raises(ValueError):
            regime_indicator(0.5, 0.5, 0.0)
