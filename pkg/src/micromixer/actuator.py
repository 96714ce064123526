"""Electro-thermal actuator: square-wave drive -> cavity temperatures -> transverse flow.

Each heating cavity is a first-order lag

    tau * dT/dt = K * P(t) - T,      tau = 1 / (2 pi f_c)

driven by piecewise-constant power, so it is integrated exactly with the
exponential solution on every constant-power segment. The liquid in a
cavity dilates by ``alpha * V_cavity * T`` and that volume is pushed through
the channel cross-section. The two cavities face each other across the
junction and are driven in antiphase, so the transverse mean velocity is

    v(t) = alpha * V_cavity / (w * h) * (dT_A/dt - dT_B/dt).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BoilingRegimeError, ConfigError, ConvergenceError, InvalidParameterError
from .model import validate_config

__all__ = [
    "ThermalState",
    "ThermalTrace",
    "CavityCycle",
    "ActuatorWaveform",
    "average_power",
    "instantaneous_power",
    "heater_on",
    "thermal_response",
    "steady_periodic_state",
    "dilation_displacement",
    "displacement_per_kelvin",
    "transverse_waveform",
    "default_time_step",
    "fundamental_amplitude",
]


@dataclass(frozen=True)
class ThermalState:
    t: float
    T_A: float
    T_B: float


def average_power(drive):
    """Time-averaged power of one heater, duty * V^2 / R."""
    return drive.duty_cycle * drive.voltage_amplitude**2 / drive.resistance


def heater_on(drive, t, shift=0.0):
    """Boolean on-state of a heater whose cycle starts at ``shift``."""
    period = drive.period
    phase = np.mod(np.asarray(t, dtype=float) - shift, period)
    return phase < drive.duty_cycle * period


def _shift_b(drive):
    return 0.5 * drive.period + drive.phase_delay


def instantaneous_power(drive, t):
    """Instantaneous powers (P_A, P_B) at time(s) ``t``.

    Heater B runs the same square wave as A, delayed by half a period plus
    the drive's ``phase_delay``.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise InvalidParameterError("t must be >= 0")
    p_on = drive.on_power
    p_a = np.where(heater_on(drive, t), p_on, 0.0)
    p_b = np.where(heater_on(drive, t, _shift_b(drive)), p_on, 0.0)
    if p_a.ndim == 0:
        return float(p_a), float(p_b)
    return p_a, p_b


def default_time_step(drive, substrate):
    """Sampling step resolving both the drive period and the thermal lag."""
    return min(drive.period / 200.0, substrate.time_constant / 20.0)


def _switch_times(drive, shift, duration):
    period = drive.period
    k0 = math.floor(-shift / period) - 1
    k1 = math.ceil((duration - shift) / period) + 1
    k = np.arange(k0, k1 + 1, dtype=float)
    starts = shift + k * period
    edges = np.concatenate([starts, starts + drive.duty_cycle * period])
    edges = edges[(edges > 0.0) & (edges < duration)]
    return np.unique(edges)


def _march(drive, substrate, shift, initial, times):
    """Exact temperature and derivative of one cavity at sorted ``times``."""
    tau = substrate.time_constant
    t_on = substrate.power_to_temperature_gain * drive.on_power
    duration = float(times[-1]) if times.size else 0.0
    bounds = np.concatenate([[0.0], _switch_times(drive, shift, duration)])
    mids = 0.5 * (bounds + np.append(bounds[1:], max(duration, bounds[-1])))
    targets = np.where(heater_on(drive, mids, shift), t_on, 0.0)
    # segment start temperatures; one exponential per switch
    starts = np.empty_like(bounds)
    starts[0] = initial
    decay = np.exp(-np.diff(bounds) / tau)
    for j in range(bounds.size - 1):
        starts[j + 1] = targets[j] + (starts[j] - targets[j]) * decay[j]
    seg = np.searchsorted(bounds, times, side="right") - 1
    seg = np.clip(seg, 0, bounds.size - 1)
    target = targets[seg]
    temp = target + (starts[seg] - target) * np.exp(-(times - bounds[seg]) / tau)
    return temp, (target - temp) / tau


@dataclass(frozen=True)
class ThermalTrace:
    """Sampled cavity temperatures (K above ambient) and their exact derivatives."""

    t: np.ndarray
    T_A: np.ndarray
    T_B: np.ndarray
    dT_A: np.ndarray
    dT_B: np.ndarray
    P_A: np.ndarray
    P_B: np.ndarray
    settling_periods: int

    def __len__(self):
        return self.t.size

    def __getitem__(self, i):
        return ThermalState(float(self.t[i]), float(self.T_A[i]), float(self.T_B[i]))

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def exceeds_boiling(self, fluid):
        peak = max(float(self.T_A.max()), float(self.T_B.max()))
        return fluid.ambient_temperature + peak > fluid.boiling_point


def steady_periodic_state(drive, substrate, max_periods=200):
    """Iterate whole drive periods from rest until the response is periodic.

    The per-period maximum of a cavity is tracked; convergence is declared
    once it changes by less than ``1e-6 * K * V^2 / R`` between periods.

    Returns
    -------
    CavityCycle
        The exact periodic single-cavity response, plus ``settling_periods``.

    Raises
    ------
    ConvergenceError
        If ``max_periods`` periods are not enough.
    """
    tau = substrate.time_constant
    t_on = substrate.power_to_temperature_gain * drive.on_power
    on_time = drive.duty_cycle * drive.period
    e_on = math.exp(-on_time / tau)
    e_off = math.exp(-(drive.period - on_time) / tau)
    tol = 1e-6 * t_on

    start, previous_peak, settled = 0.0, None, None
    for k in range(1, max_periods + 1):
        peak = t_on + (start - t_on) * e_on
        start = peak * e_off
        if previous_peak is not None and abs(peak - previous_peak) <= tol:
            settled = k
            break
        previous_peak = peak
    if settled is None:
        raise ConvergenceError(
            f"thermal response not periodic after {max_periods} periods "
            f"(f={drive.frequency} Hz, tau={tau:.3g} s)"
        )
    # exact fixed point of the period map
    peak = t_on * (1.0 - e_on) / (1.0 - e_on * e_off)
    return CavityCycle(
        period=drive.period,
        duty_cycle=drive.duty_cycle,
        time_constant=tau,
        on_temperature=t_on,
        start_temperature=peak * e_off,
        settling_periods=settled,
    )


def thermal_response(drive, substrate, duration, dt, initial=(0.0, 0.0), max_periods=200):
    """Cavity temperatures from ``initial`` over ``[0, duration]`` sampled every ``dt``."""
    if not dt > 0:
        raise InvalidParameterError(f"dt must be positive (got {dt!r})")
    if duration < drive.period * (1 - 1e-12):
        raise InvalidParameterError("duration must cover at least one drive period")
    violations = drive.violations() + substrate.violations()
    if violations:
        raise ConfigError(violations)
    cycle = steady_periodic_state(drive, substrate, max_periods)
    n = int(round(duration / dt))
    t = np.arange(n + 1) * dt
    T_A, dT_A = _march(drive, substrate, 0.0, initial[0], t)
    T_B, dT_B = _march(drive, substrate, _shift_b(drive), initial[1], t)
    P_A, P_B = instantaneous_power(drive, t)
    return ThermalTrace(t, T_A, T_B, dT_A, dT_B, P_A, P_B, cycle.settling_periods)


@dataclass(frozen=True)
class CavityCycle:
    """Exact steady periodic temperature of one cavity, phase 0 = heater switch-on."""

    period: float
    duty_cycle: float
    time_constant: float
    on_temperature: float
    start_temperature: float
    settling_periods: int = 0

    @property
    def peak_temperature(self):
        on_time = self.duty_cycle * self.period
        t_on = self.on_temperature
        return t_on + (self.start_temperature - t_on) * math.exp(-on_time / self.time_constant)

    def temperature(self, t):
        """Temperature and its time derivative at times ``t`` (periodic)."""
        s = np.mod(np.asarray(t, dtype=float), self.period)
        on_time = self.duty_cycle * self.period
        on = s < on_time
        tau = self.time_constant
        t_on = self.on_temperature
        heating = t_on + (self.start_temperature - t_on) * np.exp(-s / tau)
        cooling = self.peak_temperature * np.exp(-(s - on_time) / tau)
        temp = np.where(on, heating, cooling)
        deriv = (np.where(on, t_on, 0.0) - temp) / tau
        return temp, deriv


def displacement_per_kelvin(geometry, fluid):
    """Mean transverse displacement per kelvin of cavity heating (m/K)."""
    return fluid.dilation_coefficient * geometry.cavity_volume / geometry.cross_section


def dilation_displacement(delta_t, geometry, fluid):
    """Mean displacement in the channel produced by heating one cavity by ``delta_t``.

    The dilated volume ``alpha * dT * (pi d^2 / 4) * h_cavity`` is spread over
    the channel cross-section ``w * h``.
    """
    if np.any(np.asarray(delta_t) < 0):
        raise InvalidParameterError("temperature rise must be >= 0")
    return displacement_per_kelvin(geometry, fluid) * delta_t


@dataclass(frozen=True)
class ActuatorWaveform:
    """Steady periodic transverse mean velocity and displacement.

    ``sample_times`` start at a switch-on of heater A in the steady state.
    The sampled arrays are for output; ``velocity`` and ``displacement``
    evaluate the exact closed form at arbitrary times, extended
    periodically.
    """

    sample_times: np.ndarray
    mean_velocity: np.ndarray
    mean_displacement: np.ndarray
    steady_amplitude: float
    temperature_a: np.ndarray
    temperature_b: np.ndarray
    power_a: np.ndarray
    power_b: np.ndarray
    cycle: CavityCycle
    gain: float  # m per K of temperature difference
    shift_b: float
    period: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "period", self.cycle.period)

    def temperatures(self, t):
        T_A, dT_A = self.cycle.temperature(t)
        T_B, dT_B = self.cycle.temperature(np.asarray(t, dtype=float) - self.shift_b)
        return T_A, T_B, dT_A, dT_B

    def velocity(self, t):
        _, _, dT_A, dT_B = self.temperatures(t)
        return self.gain * (dT_A - dT_B)

    def displacement(self, t):
        T_A, T_B, _, _ = self.temperatures(t)
        T_A0, T_B0, _, _ = self.temperatures(0.0)
        return self.gain * ((T_A - T_A0) - (T_B - T_B0))

    @property
    def peak_velocity(self):
        """Largest |mean velocity|, reached right after a heater switches."""
        cyc = self.cycle
        on_time = cyc.duty_cycle * cyc.period
        candidates = np.array([0.0, on_time, self.shift_b, self.shift_b + on_time])
        # derivatives jump at switches, so probe both sides
        eps = 1e-9 * cyc.period
        probes = np.concatenate([candidates, candidates - eps, candidates + eps])
        return float(np.max(np.abs(self.velocity(probes))))

    @property
    def scalar_parameters(self):
        """Tuple consumed by the compiled transport kernel."""
        cyc = self.cycle
        return (cyc.period, cyc.duty_cycle, cyc.time_constant, cyc.on_temperature,
                cyc.start_temperature, self.gain, self.shift_b, cyc.peak_temperature)


def transverse_waveform(drive, substrate, geometry, fluid, duration=None, dt=None,
                        max_periods=200):
    """Steady periodic transverse flow produced by the antiphase heaters.

    Raises
    ------
    BoilingRegimeError
        When ambient plus the peak cavity rise exceeds the boiling point;
        the bubble regime is outside the model.
    """
    validate_config(geometry, fluid, drive, substrate)
    period = drive.period
    dt = default_time_step(drive, substrate) if dt is None else dt
    duration = period if duration is None else duration
    if not dt > 0 or not duration > 0:
        raise InvalidParameterError("duration and dt must be positive")

    cycle = steady_periodic_state(drive, substrate, max_periods)
    if fluid.ambient_temperature + cycle.peak_temperature > fluid.boiling_point:
        raise BoilingRegimeError(
            f"cavity reaches {fluid.ambient_temperature + cycle.peak_temperature:.1f} C, "
            f"above boiling point {fluid.boiling_point} C: boiling regime is out of modeled scope"
        )

    gain = displacement_per_kelvin(geometry, fluid)
    shift = _shift_b(drive)
    n = int(round(duration / dt))
    t = np.arange(n + 1) * dt

    # extrema of T_A - T_B sit on switch instants (monotone relaxation in between)
    on_time = drive.duty_cycle * period
    events = np.mod(np.array([0.0, on_time, shift, shift + on_time]), period)
    diff_a, _ = cycle.temperature(events)
    diff_b, _ = cycle.temperature(events - shift)
    diff = diff_a - diff_b
    amplitude = 0.5 * gain * float(diff.max() - diff.min())

    T_A, dT_A = cycle.temperature(t)
    T_B, dT_B = cycle.temperature(t - shift)
    T_A0, _ = cycle.temperature(0.0)
    T_B0, _ = cycle.temperature(-shift)
    P_A, P_B = instantaneous_power(drive, t)
    return ActuatorWaveform(
        sample_times=t,
        mean_velocity=gain * (dT_A - dT_B),
        mean_displacement=gain * ((T_A - T_A0) - (T_B - T_B0)),
        steady_amplitude=amplitude,
        temperature_a=T_A,
        temperature_b=T_B,
        power_a=np.asarray(P_A, dtype=float),
        power_b=np.asarray(P_B, dtype=float),
        cycle=cycle,
        gain=gain,
        shift_b=shift,
    )


def fundamental_amplitude(waveform, n_samples=4096):
    """Amplitude of the first Fourier harmonic of the mean displacement."""
    t = np.arange(n_samples) * (waveform.period / n_samples)
    coeff = np.fft.rfft(waveform.displacement(t))[1]
    return 2.0 * abs(coeff) / n_samples
