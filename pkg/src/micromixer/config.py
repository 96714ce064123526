"""Plain-text run configuration with unit suffixes.

Files are sectioned ``key = value unit`` text::

    [geometry]
    channel_width = 100 um

    [flow]
    flow_rate = 10 ul/hr

    [drive]
    voltage_amplitude = 30 V
    resistance = 88 ohm

Values are converted to SI at load time. Unknown sections, unknown keys and
units of the wrong dimension are errors, so a typo never silently falls
back to a default. Lists (sweep grids) are comma separated with one unit
at the end: ``frequencies = 1, 2, 3 Hz``.
"""

from __future__ import annotations

import configparser
import hashlib
import json
import math
import re
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .errors import ConfigError
from .model import (
    DriveSignal,
    FluidProperties,
    Geometry,
    SubstrateThermal,
    mean_velocity_from_flow_rate,
    validate_config,
)

__all__ = [
    "MixerConfig",
    "TransportSettings",
    "MetricSettings",
    "SweepSettings",
    "load_config",
    "parse_config",
    "parse_quantity",
    "config_hash",
    "UNITS",
]

# dimension -> {suffix: factor to SI}
UNITS = {
    "length": {"m": 1.0, "mm": 1e-3, "um": 1e-6, "µm": 1e-6, "nm": 1e-9},
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6},
    "frequency": {"Hz": 1.0, "kHz": 1e3},
    "voltage": {"V": 1.0, "mV": 1e-3},
    "resistance": {"ohm": 1.0, "Ohm": 1.0, "kohm": 1e3},
    "density": {"kg/m3": 1.0, "g/cm3": 1e3},
    "viscosity": {"Pa.s": 1.0, "Pa s": 1.0, "mPa.s": 1e-3, "cP": 1e-3},
    "per_kelvin": {"1/K": 1.0},
    "diffusivity": {"m2/s": 1.0, "um2/s": 1e-12},
    "celsius": {"degC": 1.0, "C": 1.0},
    "gain": {"K/W": 1.0},
    "flow_rate": {"m3/s": 1.0, "ul/hr": 1e-9 / 3600.0, "ul/h": 1e-9 / 3600.0,
                  "ul/min": 1e-9 / 60.0, "nl/min": 1e-12 / 60.0},
    "none": {"": 1.0},
}


@dataclass(frozen=True)
class TransportSettings:
    """Tracer transport options; planes are measured from the junction centre."""

    particles: int = 20000
    injection_plane: float = -100e-6
    exit_plane: float = 150e-6
    release_transits: float = 2.0
    max_transits: float = 10.0


@dataclass(frozen=True)
class MetricSettings:
    n_bins: int = 50
    levels: int = 32
    smoothing: float = 3.0
    min_prominence: float = 0.25


@dataclass(frozen=True)
class SweepSettings:
    frequencies: tuple = (1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0)
    voltages: tuple = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
    sensitivity_bins: tuple = (25, 100)


@dataclass(frozen=True)
class MixerConfig:
    """Everything a run or sweep needs, in SI units."""

    geometry: Geometry = field(default_factory=Geometry)
    fluid: FluidProperties = field(default_factory=FluidProperties)
    drive: DriveSignal = field(default_factory=DriveSignal)
    substrate: SubstrateThermal = field(default_factory=SubstrateThermal)
    flow_rate: float = 10e-9 / 3600.0
    profile_peak_factor: float = 2.0
    transport: TransportSettings = field(default_factory=TransportSettings)
    metrics: MetricSettings = field(default_factory=MetricSettings)
    sweep: SweepSettings = field(default_factory=SweepSettings)

    @property
    def mean_velocity(self):
        return mean_velocity_from_flow_rate(self.flow_rate, self.geometry)

    def with_drive(self, **changes):
        return replace(self, drive=replace(self.drive, **changes))

    def violations(self):
        out = (self.geometry.violations() + self.fluid.violations()
               + self.drive.violations() + self.substrate.violations())
        if not (self.flow_rate > 0 and math.isfinite(self.flow_rate)):
            out.append(f"flow.flow_rate must be > 0 (got {self.flow_rate!r})")
        if not self.profile_peak_factor >= 1.0:
            out.append(f"flow.profile_peak_factor must be >= 1 (got {self.profile_peak_factor!r})")
        tr = self.transport
        w = self.geometry.channel_width
        if tr.particles < 2:
            out.append(f"transport.particles must be >= 2 (got {tr.particles})")
        if not tr.injection_plane <= -0.5 * w:
            out.append("transport.injection_plane must lie upstream of the junction")
        if not 0.5 * w <= tr.exit_plane < 0.5 * self.geometry.main_length:
            out.append("transport.exit_plane must lie between the junction and the channel end")
        if not -0.5 * self.geometry.main_length < tr.injection_plane:
            out.append("transport.injection_plane must lie inside the main channel")
        if not tr.release_transits > 0:
            out.append("transport.release_transits must be > 0")
        if not tr.max_transits > 1:
            out.append("transport.max_transits must be > 1")
        m = self.metrics
        if m.n_bins < 1 or m.levels < 2:
            out.append("metrics.n_bins must be >= 1 and metrics.levels >= 2")
        if m.smoothing < 0 or not 0 <= m.min_prominence < 1:
            out.append("metrics.smoothing must be >= 0 and metrics.min_prominence in [0, 1)")
        return out

    def validate(self):
        validate_config(self.geometry, self.fluid, self.drive, self.substrate)
        bad = self.violations()
        if bad:
            raise ConfigError(bad)
        return self

    def to_dict(self):
        d = asdict(self)
        d["sweep"] = {k: list(v) for k, v in d["sweep"].items()}
        return d


# section -> key -> (target object, dimension, kind)
_SCHEMA = {
    "geometry": {f.name: ("geometry", "length", float) for f in fields(Geometry)},
    "fluid": {
        "density": ("fluid", "density", float),
        "dynamic_viscosity": ("fluid", "viscosity", float),
        "dilation_coefficient": ("fluid", "per_kelvin", float),
        "tracer_diffusivity": ("fluid", "diffusivity", float),
        "boiling_point": ("fluid", "celsius", float),
        "ambient_temperature": ("fluid", "celsius", float),
    },
    "drive": {
        "voltage_amplitude": ("drive", "voltage", float),
        "frequency": ("drive", "frequency", float),
        "duty_cycle": ("drive", "none", float),
        "phase_delay": ("drive", "time", float),
        "resistance": ("drive", "resistance", float),
    },
    "substrate": {
        "cutoff_frequency": ("substrate", "frequency", float),
        "power_to_temperature_gain": ("substrate", "gain", float),
    },
    "flow": {
        "flow_rate": (None, "flow_rate", float),
        "profile_peak_factor": (None, "none", float),
    },
    "transport": {
        "particles": ("transport", "none", int),
        "injection_plane": ("transport", "length", float),
        "exit_plane": ("transport", "length", float),
        "release_transits": ("transport", "none", float),
        "max_transits": ("transport", "none", float),
    },
    "metrics": {
        "n_bins": ("metrics", "none", int),
        "levels": ("metrics", "none", int),
        "smoothing": ("metrics", "none", float),
        "min_prominence": ("metrics", "none", float),
    },
    "sweep": {
        "frequencies": ("sweep", "frequency", tuple),
        "voltages": ("sweep", "voltage", tuple),
        "sensitivity_bins": ("sweep", "none", tuple),
    },
}

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(.*?)\s*$")


def parse_quantity(text, dimension):
    """Parse ``"100 um"`` into SI given the expected dimension."""
    m = _QUANTITY.match(text)
    if not m:
        raise ValueError(f"cannot parse a number from {text!r}")
    number, unit = float(m.group(1)), m.group(2)
    table = UNITS[dimension]
    if unit not in table:
        allowed = ", ".join(repr(u) for u in table)
        raise ValueError(f"unit {unit!r} is not a {dimension} unit (expected one of {allowed})")
    return number * table[unit]


def _parse_list(text, dimension):
    parts = [p.strip() for p in text.split(",")]
    if not parts or not parts[-1]:
        raise ValueError(f"empty list {text!r}")
    # a single trailing unit applies to every element
    m = _QUANTITY.match(parts[-1])
    unit = m.group(2) if m else ""
    return tuple(parse_quantity(p if _QUANTITY.match(p).group(2) else f"{p} {unit}", dimension)
                 for p in parts)


def parse_config(text, source="<string>"):
    """Build a validated MixerConfig from configuration text.

    Raises
    ------
    ConfigError
        Listing every syntax, unknown-key, unit and invariant problem found.
    """
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError([f"{source}: {exc}"]) from exc

    errors = []
    groups = {name: {} for name in ("geometry", "fluid", "drive", "substrate", "transport",
                                    "metrics", "sweep")}
    top = {}
    for section in parser.sections():
        schema = _SCHEMA.get(section)
        if schema is None:
            errors.append(f"{source}: unknown section [{section}]")
            continue
        for key, raw in parser.items(section):
            if key not in schema:
                errors.append(f"{source}: unknown key {section}.{key}")
                continue
            target, dimension, kind = schema[key]
            try:
                if kind is tuple:
                    value = _parse_list(raw, dimension)
                    if key == "sensitivity_bins":
                        value = tuple(int(v) for v in value)
                elif kind is int:
                    number = parse_quantity(raw, dimension)
                    if number != int(number):
                        raise ValueError(f"expected an integer, got {raw!r}")
                    value = int(number)
                else:
                    value = parse_quantity(raw, dimension)
            except ValueError as exc:
                errors.append(f"{source}: {section}.{key}: {exc}")
                continue
            if target is None:
                top[key] = value
            else:
                groups[target][key] = value
    if errors:
        raise ConfigError(errors)

    try:
        config = MixerConfig(
            geometry=Geometry(**groups["geometry"]),
            fluid=FluidProperties(**groups["fluid"]),
            drive=DriveSignal(**groups["drive"]),
            substrate=SubstrateThermal(**groups["substrate"]),
            transport=TransportSettings(**groups["transport"]),
            metrics=MetricSettings(**groups["metrics"]),
            sweep=SweepSettings(**groups["sweep"]),
            **top,
        )
    except TypeError as exc:
        raise ConfigError([f"{source}: {exc}"]) from exc
    bad = config.violations()
    if bad:
        raise ConfigError([f"{source}: {v}" for v in bad])
    return config


def load_config(path):
    """Read and validate a configuration file; None gives the defaults."""
    if path is None:
        return MixerConfig().validate()
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError([f"cannot read config {path}: {exc}"]) from exc
    return parse_config(text, source=str(path))


def config_hash(config):
    """SHA-256 of the canonical SI form of the configuration.

    Floats are rounded to 12 significant digits first, so the same value
    written in different units (``100 um`` vs ``0.1 mm``) hashes equal while
    any physically meaningful change does not.
    """
    canonical = json.dumps(_canonical(config.to_dict()), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _canonical(value):
    if isinstance(value, dict):
        return {k: _canonical(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_canonical(v) for v in value]
    if isinstance(value, float):
        return format(value, ".12g")
    return value
