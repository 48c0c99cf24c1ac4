import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.constants import c as C

from spdc_tuner import (
    BeyondCone,
    EVANESCENT,
    PumpSpec,
    TransverseMomentum,
    amplitude_sq,
    degenerate_poling_period,
    emission_angle,
    longitudinal_mismatch,
    pump_amplitude,
    qpm_residual,
    refractive_index,
    sinc,
    wavevector_magnitude,
)

from conftest import make_crystal

Q0 = TransverseMomentum(0.0, 0.0)


def _omega(lam_m):
    return 2.0 * np.pi * C / lam_m


class TestSinc:
    def test_exact_at_zero(self):
        assert sinc(0.0) == 1.0

    def test_series_region(self):
        x = 1e-7
        assert sinc(x) == pytest.approx(1.0 - x * x / 6.0, rel=1e-15)

    def test_root_at_pi(self):
        assert abs(sinc(math.pi)) < 1e-15

    @given(x=st.floats(min_value=-50.0, max_value=50.0))
    @settings(max_examples=100, deadline=None)
    def test_matches_reference(self, x):
        expected = 1.0 if x == 0 else math.sin(x) / x
        assert sinc(x) == pytest.approx(expected, rel=1e-12, abs=1e-15)

    def test_vectorized(self):
        x = np.array([0.0, 1e-8, 0.5, math.pi])
        out = sinc(x)
        assert out.shape == x.shape
        assert out[0] == 1.0


class TestMismatch:
    def test_collinear_collapse(self, ktp, pump, crystal):
        omega_s = pump.omega / 2.0
        dk = longitudinal_mismatch(Q0, Q0, omega_s, pump, 25.0, crystal)
        k_s = wavevector_magnitude(omega_s, 25.0, ktp)
        k_p = wavevector_magnitude(pump.omega, 25.0, ktp)
        assert dk == pytest.approx(2.0 * k_s - k_p, rel=1e-12)

    def test_hand_evaluated_three_terms(self, ktp, pump, crystal):
        # degenerate point: idler and signal both at twice the pump wavelength
        n_ir = refractive_index(1.064e-6, 25.0, ktp)
        n_p = refractive_index(0.532e-6, 25.0, ktp)
        expected = 2.0 * (2.0 * np.pi * n_ir / 1.064e-6) - 2.0 * np.pi * n_p / 0.532e-6
        dk = longitudinal_mismatch(Q0, Q0, _omega(1.064e-6), pump, 25.0, crystal)
        assert dk == pytest.approx(expected, rel=1e-12)

    def test_signal_beyond_cone_is_evanescent(self, ktp, pump, crystal):
        omega_s = pump.omega / 2.0
        k_s = wavevector_magnitude(omega_s, 25.0, ktp)
        q = TransverseMomentum(1.01 * k_s, 0.0)
        assert longitudinal_mismatch(Q0, q, omega_s, pump, 25.0, crystal) is EVANESCENT

    def test_frequency_preconditions(self, pump, crystal):
        with pytest.raises(ValueError):
            longitudinal_mismatch(Q0, Q0, 0.0, pump, 25.0, crystal)
        with pytest.raises(ValueError):
            longitudinal_mismatch(Q0, Q0, pump.omega, pump, 25.0, crystal)


class TestResidual:
    def test_exact_cancellation(self, ktp):
        crystal = make_crystal(ktp, poling_m=9.018e-6)
        from spdc_tuner import poling_period_at
        g = poling_period_at(40.0, crystal)
        assert qpm_residual(-2.0 * np.pi / g, 40.0, crystal) == pytest.approx(0.0, abs=1e-9)

    def test_hand_value_for_nine_micron_grating(self, ktp):
        crystal = make_crystal(ktp, poling_m=9e-6, alpha=0.0, beta=0.0)
        assert qpm_residual(0.0, 25.0, crystal) == pytest.approx(
            2.0 * np.pi / 9e-6, rel=1e-12)

    @given(g_um=st.floats(min_value=5.0, max_value=20.0),
           dg_um=st.floats(min_value=1e-4, max_value=5.0))
    @settings(max_examples=50, deadline=None)
    def test_strictly_decreasing_in_period(self, ktp, g_um, dg_um):
        a = make_crystal(ktp, poling_m=g_um * 1e-6, alpha=0.0, beta=0.0)
        b = make_crystal(ktp, poling_m=(g_um + dg_um) * 1e-6, alpha=0.0, beta=0.0)
        assert qpm_residual(0.0, 25.0, b) < qpm_residual(0.0, 25.0, a)

    def test_requires_finite_mismatch(self, crystal):
        with pytest.raises(ValueError):
            qpm_residual(float("nan"), 25.0, crystal)


class TestPumpAmplitude:
    def test_peak(self, pump):
        assert pump_amplitude(Q0, pump) == 1.0

    def test_width_definition(self, pump):
        q = TransverseMomentum(2.0 / pump.waist, 0.0)
        assert pump_amplitude(q, pump) == pytest.approx(math.exp(-1.0), rel=1e-12)

    @given(qx=st.floats(-3e5, 3e5), qy=st.floats(-3e5, 3e5))
    @settings(max_examples=50, deadline=None)
    def test_doubling_waist_raises_to_fourth_power(self, qx, qy):
        q = TransverseMomentum(qx, qy)
        narrow = PumpSpec.from_wavelength(532e-9, 20e-6)
        wide = PumpSpec.from_wavelength(532e-9, 40e-6)
        assert pump_amplitude(q, wide) == pytest.approx(
            pump_amplitude(q, narrow) ** 4, rel=1e-9)

    @given(qx=st.floats(-1e6, 1e6), qy=st.floats(-1e6, 1e6))
    @settings(max_examples=50, deadline=None)
    def test_bounded(self, pump, qx, qy):
        value = pump_amplitude(TransverseMomentum(qx, qy), pump)
        assert 0.0 < value <= 1.0


def _matched_crystal(ktp, pump, q, omega_s):
    """Crystal whose grating exactly cancels the mismatch at (q_i=-q_s=q)."""
    probe = make_crystal(ktp, poling_m=9e-6, alpha=0.0, beta=0.0)
    q_s = TransverseMomentum(q, 0.0)
    q_i = TransverseMomentum(-q, 0.0)
    dk = longitudinal_mismatch(q_i, q_s, omega_s, pump, 25.0, probe)
    assert dk is not EVANESCENT and dk < 0
    return make_crystal(ktp, poling_m=-2.0 * np.pi / dk, alpha=0.0, beta=0.0)


class TestAmplitudeSq:
    def test_evanescent_point_is_zero(self, ktp, pump, crystal):
        omega_s = pump.omega / 2.0
        k_s = wavevector_magnitude(omega_s, 25.0, ktp)
        q = TransverseMomentum(1.5 * k_s, 0.0)
        assert amplitude_sq(Q0, q, omega_s, pump, 25.0, crystal) == 0.0

    def test_matched_point_equals_weight(self, ktp, pump):
        omega_s = pump.omega / 2.0
        omega_i = pump.omega - omega_s
        q = 0.05e6
        matched = _matched_crystal(ktp, pump, q, omega_s)
        got = amplitude_sq(TransverseMomentum(-q, 0.0), TransverseMomentum(q, 0.0),
                           omega_s, pump, 25.0, matched)
        n_s = refractive_index(2.0 * np.pi * C / omega_s, 25.0, ktp)
        n_i = refractive_index(2.0 * np.pi * C / omega_i, 25.0, ktp)
        weight = omega_i * omega_s / (n_i * n_s) ** 2
        assert got == pytest.approx(weight, rel=1e-12)

    def test_matched_point_is_local_max_along_pump_direction(self, ktp, pump):
        omega_s = pump.omega / 2.0
        q = 0.05e6
        matched = _matched_crystal(ktp, pump, q, omega_s)
        q_s = TransverseMomentum(q, 0.0)
        center = amplitude_sq(TransverseMomentum(-q, 0.0), q_s, omega_s, pump, 25.0, matched)
        for dq in (-2e4, -1e4, 1e4, 2e4):
            off = amplitude_sq(TransverseMomentum(-q + dq, 0.0), q_s,
                               omega_s, pump, 25.0, matched)
            assert off < center

    def test_first_sinc_zero(self, ktp, pump):
        # grating detuned so that residual * L/2 = pi exactly
        omega_s = pump.omega / 2.0
        probe = make_crystal(ktp, poling_m=9e-6, alpha=0.0, beta=0.0)
        dk = longitudinal_mismatch(Q0, Q0, omega_s, pump, 25.0, probe)
        length = probe.length_m
        g = 2.0 * np.pi / (2.0 * np.pi / length - dk)
        detuned = make_crystal(ktp, poling_m=g, alpha=0.0, beta=0.0)
        got = amplitude_sq(Q0, Q0, omega_s, pump, 25.0, detuned)
        scale = amplitude_sq(Q0, Q0, omega_s, pump, 25.0,
                             make_crystal(ktp, poling_m=-2 * np.pi / dk, alpha=0.0, beta=0.0))
        assert got <= 1e-25 * scale

    @given(qix=st.floats(-2e5, 2e5), qiy=st.floats(-2e5, 2e5),
           qsx=st.floats(-2e5, 2e5), qsy=st.floats(-2e5, 2e5),
           lam_nm=st.floats(1000.0, 1140.0))
    @settings(max_examples=40, deadline=None)
    def test_swap_symmetry(self, ktp, pump, crystal, qix, qiy, qsx, qsy, lam_nm):
        omega_s = _omega(lam_nm * 1e-9)
        q_i = TransverseMomentum(qix, qiy)
        q_s = TransverseMomentum(qsx, qsy)
        a = amplitude_sq(q_i, q_s, omega_s, pump, 25.0, crystal)
        b = amplitude_sq(q_s, q_i, pump.omega - omega_s, pump, 25.0, crystal)
        assert b == pytest.approx(a, rel=1e-9, abs=1e-280)

    @given(angle=st.floats(0.0, 2.0 * math.pi), qi_mag=st.floats(0.0, 2e5),
           qs_mag=st.floats(0.0, 2e5), rel_angle=st.floats(0.0, 2.0 * math.pi))
    @settings(max_examples=40, deadline=None)
    def test_rotational_symmetry(self, ktp, pump, crystal, angle, qi_mag, qs_mag, rel_angle):
        omega_s = _omega(1.05e-6)

        def rot(mag, phi):
            return TransverseMomentum(mag * math.cos(phi), mag * math.sin(phi))

        a = amplitude_sq(rot(qi_mag, rel_angle), rot(qs_mag, 0.0),
                         omega_s, pump, 25.0, crystal)
        b = amplitude_sq(rot(qi_mag, rel_angle + angle), rot(qs_mag, angle),
                         omega_s, pump, 25.0, crystal)
        assert b == pytest.approx(a, rel=1e-9, abs=1e-280)

    @given(qsx=st.floats(-5e5, 5e5), lam_nm=st.floats(1010.0, 1130.0))
    @settings(max_examples=40, deadline=None)
    def test_nonnegative(self, ktp, pump, crystal, qsx, lam_nm):
        value = amplitude_sq(Q0, TransverseMomentum(qsx, 0.0),
                             _omega(lam_nm * 1e-9), pump, 25.0, crystal)
        assert value >= 0.0


class TestEmissionAngle:
    def test_axis(self, pump, crystal):
        assert emission_angle(0.0, pump.omega / 2.0, 25.0, crystal) == 0.0

    def test_grazing(self, ktp, pump, crystal):
        omega_s = pump.omega / 2.0
        k_s = wavevector_magnitude(omega_s, 25.0, ktp)
        assert emission_angle(k_s, omega_s, 25.0, crystal) == pytest.approx(math.pi / 2)

    def test_hand_value(self, ktp, pump, crystal):
        q = 0.1181e6
        n = refractive_index(1.064e-6, 25.0, ktp)
        expected = math.asin(q * 1.064e-6 / (2.0 * np.pi * n))
        got = emission_angle(q, _omega(1.064e-6), 25.0, crystal)
        assert got == pytest.approx(expected, rel=1e-12)

    def test_beyond_cone(self, ktp, pump, crystal):
        omega_s = pump.omega / 2.0
        k_s = wavevector_magnitude(omega_s, 25.0, ktp)
        with pytest.raises(BeyondCone):
            emission_angle(1.001 * k_s, omega_s, 25.0, crystal)


class TestDegeneratePoling:
    def test_matches_published_calibration(self, gstar):
        assert abs(gstar - 9.018e-6) <= 50e-9

    def test_grating_cancels_collinear_mismatch(self, ktp, pump, gstar):
        crystal = make_crystal(ktp, poling_m=gstar)
        dk = longitudinal_mismatch(Q0, Q0, pump.omega / 2.0, pump, 25.0, crystal)
        from spdc_tuner import qpm_residual as residual
        assert abs(residual(dk, 25.0, crystal)) < 1e-6 * abs(dk)


class TestSpecTypes:
    def test_pump_invariants(self):
        with pytest.raises(ValueError):
            PumpSpec(omega=-1.0, waist=20e-6)
        with pytest.raises(ValueError):
            PumpSpec.from_wavelength(532e-9, waist=0.0)
        with pytest.raises(ValueError):
            PumpSpec.from_wavelength(532e-9, waist=20e-6, power=-1.0)

    def test_momentum_finite(self):
        with pytest.raises(ValueError):
            TransverseMomentum(float("inf"), 0.0)

    def test_pump_wavelength_roundtrip(self):
        pump = PumpSpec.from_wavelength(532e-9, 20e-6)
        assert pump.wavelength_m == pytest.approx(532e-9, rel=1e-12)
