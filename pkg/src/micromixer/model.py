"""Physical configuration types and kinematic helpers.

All quantities are SI internally (m, s, kg, Pa s, W, V, ohm). Temperatures
are stored in degrees Celsius for absolute values and kelvin for rises.
Defaults reproduce the glycerol/water device: 100 um square channels,
2 mm x 100 um heating cavities, 88 ohm heaters, 10 Hz thermal cutoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import ConfigError, InvalidParameterError

__all__ = [
    "Geometry",
    "FluidProperties",
    "DriveSignal",
    "SubstrateThermal",
    "reynolds",
    "mean_velocity_from_flow_rate",
    "validate_config",
    "MIN_DUTY",
    "MAX_DUTY",
    "MIN_FREQUENCY",
    "MAX_FREQUENCY",
]

MIN_DUTY, MAX_DUTY = 0.01, 0.99
MIN_FREQUENCY, MAX_FREQUENCY = 0.1, 100.0


@dataclass(frozen=True)
class Geometry:
    """Cross-junction chip geometry.

    The main channel runs along x, the transverse channel along y, and the
    junction is the ``channel_width`` square centred on the origin. Only the
    square-section case (width == height) matches the device, but the two are
    kept separate so the cross-section stays explicit in every formula.
    """

    channel_width: float = 100e-6
    channel_height: float = 100e-6
    main_length: float = 4e-3
    transverse_length: float = 4e-3
    cavity_diameter: float = 2e-3
    cavity_height: float = 100e-6

    @property
    def cross_section(self):
        return self.channel_width * self.channel_height

    @property
    def cavity_volume(self):
        return math.pi * self.cavity_diameter**2 / 4.0 * self.cavity_height

    def violations(self):
        out = []
        for name in ("channel_width", "channel_height", "main_length",
                     "transverse_length", "cavity_diameter", "cavity_height"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                out.append(f"geometry.{name} must be > 0 (got {value!r})")
        w = self.channel_width
        if w > 0 and self.main_length <= w:
            out.append("geometry.main_length must exceed channel_width")
        if w > 0 and self.transverse_length <= w:
            out.append("geometry.transverse_length must exceed channel_width")
        return out


@dataclass(frozen=True)
class FluidProperties:
    """Working liquid. Defaults: 70/30 glycerol/water labelled with fluorescein.

    Density, viscosity, diffusivity and boiling point are estimates for the
    mixture; only the dilation coefficient comes from the device study.
    """

    density: float = 1180.0
    dynamic_viscosity: float = 0.02
    dilation_coefficient: float = 0.425e-3
    tracer_diffusivity: float = 1e-11
    boiling_point: float = 100.0
    ambient_temperature: float = 20.0

    def violations(self):
        out = []
        for name in ("density", "dynamic_viscosity", "dilation_coefficient",
                     "tracer_diffusivity"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                out.append(f"fluid.{name} must be > 0 (got {value!r})")
        if not self.boiling_point > self.ambient_temperature:
            out.append(
                f"fluid.boiling_point ({self.boiling_point}) must exceed "
                f"ambient_temperature ({self.ambient_temperature})"
            )
        return out


@dataclass(frozen=True)
class DriveSignal:
    """Antiphase square-wave drive of the two heating resistors.

    Heater A is on during the first ``duty_cycle`` fraction of every period;
    heater B runs the same wave shifted by half a period plus ``phase_delay``.
    """

    voltage_amplitude: float = 30.0
    frequency: float = 3.0
    duty_cycle: float = 0.5
    phase_delay: float = 0.0
    resistance: float = 88.0

    @property
    def period(self):
        return 1.0 / self.frequency

    @property
    def on_power(self):
        """Power dissipated by a heater while it is switched on."""
        return self.voltage_amplitude**2 / self.resistance

    def replace(self, **changes):
        return replace(self, **changes)

    def violations(self):
        out = []
        if not MIN_DUTY <= self.duty_cycle <= MAX_DUTY:
            out.append(
                f"drive.duty_cycle must lie in [{MIN_DUTY}, {MAX_DUTY}] (got {self.duty_cycle!r})"
            )
        if not MIN_FREQUENCY <= self.frequency <= MAX_FREQUENCY:
            out.append(
                f"drive.frequency must lie in [{MIN_FREQUENCY}, {MAX_FREQUENCY}] Hz "
                f"(got {self.frequency!r})"
            )
        if not (self.voltage_amplitude >= 0 and math.isfinite(self.voltage_amplitude)):
            out.append(f"drive.voltage_amplitude must be >= 0 (got {self.voltage_amplitude!r})")
        if not (self.resistance > 0 and math.isfinite(self.resistance)):
            out.append(f"drive.resistance must be > 0 (got {self.resistance!r})")
        if not math.isfinite(self.phase_delay):
            out.append(f"drive.phase_delay must be finite (got {self.phase_delay!r})")
        return out


@dataclass(frozen=True)
class SubstrateThermal:
    """First-order thermal lag of a heating cavity on its substrate.

    ``power_to_temperature_gain`` maps a constant heater power to the
    steady temperature rise. The time constant is derived from the cutoff.
    """

    cutoff_frequency: float = 10.0
    power_to_temperature_gain: float = 2.0

    @property
    def time_constant(self):
        return 1.0 / (2.0 * math.pi * self.cutoff_frequency)

    def violations(self):
        out = []
        if not (self.cutoff_frequency > 0 and math.isfinite(self.cutoff_frequency)):
            out.append(f"substrate.cutoff_frequency must be > 0 (got {self.cutoff_frequency!r})")
        if not (self.power_to_temperature_gain > 0
                and math.isfinite(self.power_to_temperature_gain)):
            out.append(
                "substrate.power_to_temperature_gain must be > 0 "
                f"(got {self.power_to_temperature_gain!r})"
            )
        return out


def _require_positive(**values):
    for name, value in values.items():
        if not (value > 0 and math.isfinite(value)):
            raise InvalidParameterError(f"{name} must be positive (got {value!r})")


def reynolds(fluid, mean_velocity, characteristic_length):
    """Reynolds number rho * V * L / mu."""
    _require_positive(
        density=fluid.density,
        dynamic_viscosity=fluid.dynamic_viscosity,
        mean_velocity=mean_velocity,
        characteristic_length=characteristic_length,
    )
    return fluid.density * mean_velocity * characteristic_length / fluid.dynamic_viscosity


def mean_velocity_from_flow_rate(flow_rate, geometry):
    """Mean velocity of a volumetric flow rate (m^3/s) through the channel section."""
    _require_positive(flow_rate=flow_rate)
    area = geometry.channel_width * geometry.channel_height
    if not area > 0:
        raise InvalidParameterError(f"channel cross-section must be positive (got {area!r})")
    return flow_rate / area


def validate_config(geometry, fluid, drive, substrate):
    """Check every type invariant and return the inputs unchanged.

    Raises
    ------
    ConfigError
        Carrying the full list of violations across all four objects.
    """
    violations = (geometry.violations() + fluid.violations()
                  + drive.violations() + substrate.violations())
    if violations:
        raise ConfigError(violations)
    return geometry, fluid, drive, substrate
