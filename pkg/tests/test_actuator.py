import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import cumulative_trapezoid

import oracles
from micromixer.actuator import (
    average_power,
    dilation_displacement,
    displacement_per_kelvin,
    fundamental_amplitude,
    instantaneous_power,
    steady_periodic_state,
    thermal_response,
    transverse_waveform,
)
from micromixer.errors import (
    BoilingRegimeError,
    ConfigError,
    ConvergenceError,
    InvalidParameterError,
)
from micromixer.model import DriveSignal, FluidProperties, Geometry, SubstrateThermal


def waveform(V=30.0, f=3.0, duty=0.5, delay=0.0, **kw):
    return transverse_waveform(DriveSignal(V, f, duty, delay), SubstrateThermal(), Geometry(),
                               FluidProperties(), **kw)


# -- power ---------------------------------------------------------------

def test_average_power_at_full_drive():
    assert average_power(DriveSignal(30.0, resistance=88.0, duty_cycle=0.5)) == pytest.approx(
        5.11, abs=0.005)


def test_average_power_zero_drive():
    assert average_power(DriveSignal(voltage_amplitude=0.0)) == 0.0


def test_average_power_quadratic():
    p15 = average_power(DriveSignal(15.0))
    assert p15 == pytest.approx(1.28, abs=0.005)
    assert p15 == pytest.approx(average_power(DriveSignal(30.0)) / 4, rel=1e-12)


def test_instantaneous_power_phases():
    d = DriveSignal(30.0, 3.0, 0.5)
    eps = 1e-6
    assert instantaneous_power(d, eps) == pytest.approx((30.0**2 / 88.0, 0.0))
    assert instantaneous_power(d, eps)[0] == pytest.approx(10.23, abs=0.005)
    assert instantaneous_power(d, d.period / 2 + eps) == pytest.approx((0.0, 10.2272727))


def test_instantaneous_power_gap_with_short_duty():
    d = DriveSignal(30.0, 3.0, 0.25)
    assert instantaneous_power(d, 0.4 * d.period) == (0.0, 0.0)


def test_instantaneous_power_rejects_negative_time():
    with pytest.raises(InvalidParameterError):
        instantaneous_power(DriveSignal(), -1e-3)


@given(st.floats(0.0, 100.0), st.floats(0.01, 0.99), st.floats(0.0, 0.3))
def test_instantaneous_power_values_and_mean(t, duty, delay):
    d = DriveSignal(20.0, 2.0, duty, delay)
    p_a, p_b = instantaneous_power(d, t)
    assert p_a in (0.0, d.on_power) and p_b in (0.0, d.on_power)
    grid = (np.arange(200000) + 0.5) * d.period / 200000
    mean_a = np.mean(instantaneous_power(d, grid)[0])
    assert mean_a == pytest.approx(average_power(d), rel=1e-4)


# -- thermal lag ------------------------------------------------------------

def test_step_response_limit():
    d = DriveSignal(30.0, 0.1, 0.99)
    s = SubstrateThermal()
    dt = 1e-3
    trace = thermal_response(d, s, d.period, dt)
    tau = s.time_constant
    t_on = s.power_to_temperature_gain * d.on_power
    window = trace.t < 0.99 * d.period
    expected = t_on * (1 - np.exp(-trace.t[window] / tau))
    np.testing.assert_allclose(trace.T_A[window], expected, rtol=1e-12, atol=1e-12 * t_on)
    assert trace.T_A[window][-1] == pytest.approx(t_on, rel=1e-12)


def test_quasi_static_full_swing():
    d = DriveSignal(30.0, 0.1, 0.5)
    s = SubstrateThermal()
    trace = thermal_response(d, s, 3 * d.period, 1e-3)
    last = trace.t >= 2 * d.period
    swing = trace.T_A[last].max() - trace.T_A[last].min()
    assert swing == pytest.approx(s.power_to_temperature_gain * d.on_power, rel=1e-6)


def test_fundamental_attenuation_at_cutoff():
    fc = SubstrateThermal().cutoff_frequency
    low = fundamental_amplitude(waveform(f=0.1))
    at_fc = fundamental_amplitude(waveform(f=fc))
    expected = oracles.lowpass_gain(fc, fc) / oracles.lowpass_gain(0.1, fc)
    assert at_fc / low == pytest.approx(expected, rel=1e-4)
    assert at_fc / low == pytest.approx(1 / math.sqrt(2), rel=1e-3)


@pytest.mark.parametrize("f, duty, delay", [(2.5, 0.5, 0.0), (5.0, 0.3, 0.0), (1.0, 0.5, 0.05)])
def test_exact_integration_matches_stepped_oracle(f, duty, delay):
    d = DriveSignal(25.0, f, duty, delay)
    s = SubstrateThermal()
    # switches of A and B land on the oracle's grid
    h = d.period / 20000
    dt = 100 * h
    duration = 4 * d.period
    trace = thermal_response(d, s, duration, dt)
    k = s.power_to_temperature_gain
    ref_a = oracles.stepped_lag(oracles.square_wave(d.on_power, d.period, duty), k,
                                s.time_constant, duration, h)[::100]
    ref_b = oracles.stepped_lag(
        oracles.square_wave(d.on_power, d.period, duty, shift=d.period / 2 + delay), k,
        s.time_constant, duration, h)[::100]
    scale = k * d.on_power
    np.testing.assert_allclose(trace.T_A, ref_a, rtol=0, atol=1e-6 * scale)
    np.testing.assert_allclose(trace.T_B, ref_b, rtol=0, atol=1e-6 * scale)


def test_steady_state_matches_closed_form():
    d = DriveSignal(30.0, 3.0, 0.4)
    s = SubstrateThermal()
    cyc = steady_periodic_state(d, s)
    peak, trough = oracles.steady_square_response(
        s.power_to_temperature_gain * d.on_power, d.period, 0.4, s.time_constant)
    assert cyc.peak_temperature == pytest.approx(peak, rel=1e-12)
    assert cyc.start_temperature == pytest.approx(trough, rel=1e-12)
    assert cyc.settling_periods >= 1


def test_non_convergence_is_reported():
    with pytest.raises(ConvergenceError):
        steady_periodic_state(DriveSignal(30.0, 100.0), SubstrateThermal(cutoff_frequency=0.1),
                              max_periods=5)


def test_thermal_response_guards():
    d, s = DriveSignal(), SubstrateThermal()
    with pytest.raises(InvalidParameterError):
        thermal_response(d, s, d.period, 0.0)
    with pytest.raises(InvalidParameterError):
        thermal_response(d, s, 0.5 * d.period, 1e-3)
    with pytest.raises(ConfigError):
        thermal_response(DriveSignal(duty_cycle=1.0), s, 1.0, 1e-3)


@given(st.floats(0.1, 100.0), st.floats(0.01, 0.99), st.floats(0.0, 60.0))
def test_temperatures_bounded(f, duty, V):
    d = DriveSignal(V, f, duty)
    s = SubstrateThermal()
    trace = thermal_response(d, s, 3 * d.period, d.period / 50)
    top = s.power_to_temperature_gain * d.on_power
    for T in (trace.T_A, trace.T_B):
        assert T.min() >= 0.0
        assert T.max() <= top * (1 + 1e-12) + 1e-15
    states = list(trace)
    assert len(states) == len(trace)
    assert states[0].T_A == 0.0


# -- dilation ------------------------------------------------------------------

def test_dilation_coefficient():
    g, fl = Geometry(), FluidProperties()
    per_k = dilation_displacement(1.0, g, fl)
    assert per_k == pytest.approx(oracles.dilation_per_kelvin(0.425e-3, 2e-3, 100e-6, 100e-6,
                                                              100e-6), rel=1e-12)
    assert per_k == pytest.approx(13.35e-6, rel=1e-3)
    assert per_k == pytest.approx(13e-6, rel=0.03)


def test_dilation_zero_and_ten_kelvin():
    g, fl = Geometry(), FluidProperties()
    assert dilation_displacement(0.0, g, fl) == 0.0
    mean = dilation_displacement(10.0, g, fl)
    assert mean == pytest.approx(133.5e-6, rel=1e-3)
    assert 2 * mean == pytest.approx(260e-6, rel=0.05)


def test_dilation_rejects_cooling():
    with pytest.raises(InvalidParameterError):
        dilation_displacement(-1.0, Geometry(), FluidProperties())


# -- waveform ------------------------------------------------------------------

def test_zero_drive_gives_zero_waveform():
    w = waveform(V=0.0)
    assert w.steady_amplitude == 0.0
    assert not np.any(w.mean_velocity) and not np.any(w.mean_displacement)


def test_quasi_static_peak_to_peak():
    d = DriveSignal(30.0, 0.1)
    s, g, fl = SubstrateThermal(), Geometry(), FluidProperties()
    w = transverse_waveform(d, s, g, fl)
    full = dilation_displacement(s.power_to_temperature_gain * d.on_power, g, fl)
    ptp = w.mean_displacement.max() - w.mean_displacement.min()
    assert ptp == pytest.approx(2 * full, rel=1e-6)
    assert w.steady_amplitude == pytest.approx(full, rel=1e-6)
    # hand value: 13.35 um/K * 2 K/W * 10.227 W
    assert w.steady_amplitude == pytest.approx(273.1e-6, rel=1e-3)


def test_amplitude_quadratic_in_voltage():
    volts = np.array([5.0, 10.0, 15.0, 20.0, 25.0, 30.0])
    amps = np.array([waveform(V=v).steady_amplitude for v in volts])
    c = np.sum(amps * volts**2) / np.sum(volts**4)
    resid = amps - c * volts**2
    r2 = 1 - np.sum(resid**2) / np.sum((amps - amps.mean()) ** 2)
    assert r2 > 0.999


@given(st.floats(1.0, 25.0), st.floats(0.1, 100.0))
def test_amplitude_exact_v_squared(V, f):
    assert waveform(V=2 * V, f=f).steady_amplitude / waveform(V=V, f=f).steady_amplitude \
        == pytest.approx(4.0, rel=1e-9)


@given(st.floats(0.1, 99.0), st.floats(0.0, 1.0))
def test_amplitude_non_increasing_in_frequency(f, frac):
    f2 = f + frac * (100.0 - f)
    assert waveform(f=f2).steady_amplitude <= waveform(f=f).steady_amplitude * (1 + 1e-12)


@pytest.mark.parametrize("f", [0.5, 3.0, 10.0])
def test_displacement_is_integral_of_velocity(f):
    errs = []
    for n in (5000, 10000, 20000):
        dt = 1.0 / f / n
        w = waveform(f=f, duration=1.0 / f, dt=dt)
        integral = cumulative_trapezoid(w.mean_velocity, w.sample_times, initial=0.0)
        errs.append(np.max(np.abs(integral - w.mean_displacement)))
        # trapezoid smears each velocity jump over one step
        assert errs[-1] <= 2 * w.peak_velocity * dt
    assert errs[2] < 0.6 * errs[1] < 0.36 * errs[0]


@pytest.mark.parametrize("f", [1.0, 3.0, 7.0])
def test_period_closure_and_half_period_antisymmetry(f):
    w = waveform(f=f)
    T = w.period
    t = np.linspace(0.0, T, 401)
    x = w.displacement(t)
    assert abs(w.displacement(T) - w.displacement(0.0)) < 1e-3 * w.steady_amplitude
    mean = 0.5 * (x.max() + x.min())
    np.testing.assert_allclose(w.displacement(t + T / 2) - mean, -(x - mean),
                               atol=1e-6 * w.steady_amplitude)


def test_sampled_and_closed_form_agree():
    w = waveform(duration=2 / 3.0, dt=1e-4)
    np.testing.assert_allclose(w.velocity(w.sample_times), w.mean_velocity, rtol=1e-12)
    np.testing.assert_allclose(w.displacement(w.sample_times), w.mean_displacement,
                               atol=1e-18)


def test_peak_velocity_bounds_samples():
    w = waveform(dt=1e-5)
    assert np.max(np.abs(w.mean_velocity)) <= w.peak_velocity * (1 + 1e-9)


def test_gain_matches_displacement_per_kelvin():
    assert waveform().gain == displacement_per_kelvin(Geometry(), FluidProperties())


def test_boiling_regime_refused():
    with pytest.raises(BoilingRegimeError):
        waveform(V=80.0, f=0.5)
    ok = thermal_response(DriveSignal(30.0), SubstrateThermal(), 1.0, 1e-3)
    assert not ok.exceeds_boiling(FluidProperties())
    assert ok.exceeds_boiling(FluidProperties(boiling_point=30.0))
