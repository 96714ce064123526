"""Single runs and (frequency, voltage) sweeps of the full pipeline.

A run chains actuator -> junction flow -> tracer transport -> exit metrics.
Sweep points get their own seed derived from (sweep seed, f index, V
index) and every tracer its own counter-based noise stream, so the results
do not depend on how many worker processes execute the grid or in what
order. Reports are written sorted by (f, V) with fixed number formatting,
which makes reruns byte-identical.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import platform
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numba
import numpy as np
import scipy

from .actuator import average_power, transverse_waveform
from .config import MixerConfig, config_hash
from .errors import ConfigError, MicromixerError, RunError
from .flowfield import JunctionFlow
from .metrics import concentration_profile, mixing_report, rms_of_profile
from .model import MAX_FREQUENCY, MIN_FREQUENCY
from .rng import derive_seed
from .transport import seed_inlet, simulate_to_exit

__all__ = [
    "RunSummary",
    "SweepPlan",
    "SweepRecord",
    "SweepResult",
    "build_run",
    "run_single",
    "run_sweep",
    "emit_reports",
    "format_number",
    "write_csv",
    "RUN_COLUMNS",
]

RUN_COLUMNS = ("f_Hz", "V_volts", "power_W", "displacement_m", "sigma", "efficiency", "M",
               "peak_count", "n_particles", "n_bins")


@dataclass(frozen=True)
class RunSummary:
    """Actuator summary and exit metrics of one pipeline run."""

    frequency: float
    voltage: float
    power: float
    displacement: float
    report: object
    n_released: int
    n_timed_out: int
    sensitivity: dict = field(default_factory=dict)


def _release_window(config):
    # whole forcing periods covering the requested number of junction transits
    w = config.geometry.channel_width
    span = config.transport.release_transits * w / config.mean_velocity
    period = config.drive.period
    return math.ceil(span / period - 1e-9) * period


def build_run(config, seed):
    """Waveform, flow and seeded ensemble for one configuration."""
    g = config.geometry
    drive = config.drive
    waveform = transverse_waveform(drive, config.substrate, g, config.fluid)
    flow = JunctionFlow(g, config.mean_velocity,
                        waveform if drive.voltage_amplitude > 0 else None,
                        config.profile_peak_factor)
    tr = config.transport
    ensemble = seed_inlet(tr.particles, g, tr.injection_plane, tr.exit_plane, rng_seed=seed,
                          release_window=_release_window(config))
    return waveform, flow, ensemble


def run_single(config, seed, records_out=None):
    """Run actuator -> flow -> transport -> metrics for one configuration.

    ``records_out``, when a list, receives the raw exit records.

    Raises
    ------
    RunError
        Wrapping any module error with the (f, V) point attached.
    """
    drive = config.drive
    try:
        config.validate()
        waveform, flow, ensemble = build_run(config, seed)
        tr = config.transport
        transit = (tr.exit_plane - tr.injection_plane) / config.mean_velocity
        max_time = float(ensemble.release_time.max()) + tr.max_transits * transit
        with warnings.catch_warnings():
            # timed-out tracers are reported in the run summary instead
            warnings.simplefilter("ignore", RuntimeWarning)
            records = simulate_to_exit(ensemble, flow, config.fluid.tracer_diffusivity,
                                       max_time=max_time)
        if records_out is not None:
            records_out.append(records)
        m = config.metrics
        w = config.geometry.channel_width
        profile = concentration_profile(records, m.n_bins, w)
        report = mixing_report(profile, m.levels, m.smoothing, m.min_prominence)
        sensitivity = {
            int(nb): rms_of_profile(concentration_profile(records, int(nb), w,
                                                          check_sampling=False))
            for nb in config.sweep.sensitivity_bins
        }
    except MicromixerError as exc:
        raise RunError(f"run f={drive.frequency:g} Hz, V={drive.voltage_amplitude:g} V: {exc}",
                       drive.frequency, drive.voltage_amplitude) from exc
    return RunSummary(
        frequency=drive.frequency,
        voltage=drive.voltage_amplitude,
        power=average_power(drive),
        displacement=waveform.steady_amplitude,
        report=report,
        n_released=len(ensemble),
        n_timed_out=records.n_timed_out,
        sensitivity=sensitivity,
    )


@dataclass(frozen=True)
class SweepPlan:
    """Grid of drive frequencies (Hz) and voltages (V) over a fixed configuration."""

    frequencies: tuple
    voltages: tuple
    config: MixerConfig
    seed: int = 0
    particles: int = 20000
    out_dir: object = None

    def __post_init__(self):
        object.__setattr__(self, "frequencies", tuple(float(f) for f in self.frequencies))
        object.__setattr__(self, "voltages", tuple(float(v) for v in self.voltages))
        bad = []
        if not self.frequencies:
            bad.append("sweep frequency grid is empty")
        if not self.voltages:
            bad.append("sweep voltage grid is empty")
        for f in self.frequencies:
            if not MIN_FREQUENCY <= f <= MAX_FREQUENCY:
                bad.append(f"sweep frequency {f} Hz outside [{MIN_FREQUENCY}, {MAX_FREQUENCY}]")
        for v in self.voltages:
            if not (v >= 0 and math.isfinite(v)):
                bad.append(f"sweep voltage {v} V must be >= 0")
        if len(set(self.frequencies)) != len(self.frequencies):
            bad.append("sweep frequency grid has duplicates")
        if len(set(self.voltages)) != len(self.voltages):
            bad.append("sweep voltage grid has duplicates")
        if self.particles < 2:
            bad.append(f"particles per run must be >= 2 (got {self.particles})")
        if not 0 <= int(self.seed) < 2**64:
            bad.append("seed must be an unsigned 64-bit integer")
        if bad:
            raise ConfigError(bad)

    @classmethod
    def from_config(cls, config, seed=0, particles=None, out_dir=None):
        particles = config.transport.particles if particles is None else particles
        return cls(config.sweep.frequencies, config.sweep.voltages, config, seed, particles,
                   out_dir)

    @property
    def n_runs(self):
        return len(self.frequencies) * len(self.voltages)

    def points(self):
        """(f index, V index, f, V) for every grid point."""
        return [(i, j, f, v) for i, f in enumerate(self.frequencies)
                for j, v in enumerate(self.voltages)]

    def run_config(self, f, v):
        config = replace(self.config, transport=replace(self.config.transport,
                                                        particles=self.particles))
        return config.with_drive(frequency=f, voltage_amplitude=v)


@dataclass(frozen=True)
class SweepRecord:
    frequency: float
    voltage: float
    seed: int
    summary: RunSummary = None
    error: str = ""


@dataclass(frozen=True)
class SweepResult:
    plan: SweepPlan
    records: tuple

    def record(self, f, v):
        for r in self.records:
            if r.frequency == f and r.voltage == v:
                return r
        raise KeyError((f, v))

    @property
    def failures(self):
        return [r for r in self.records if r.error]


def _execute(task):
    plan, (i, j, f, v) = task
    seed = derive_seed(plan.seed, i, j)
    try:
        summary = run_single(plan.run_config(f, v), seed)
    except MicromixerError as exc:
        return SweepRecord(f, v, seed, None, str(exc))
    return SweepRecord(f, v, seed, summary)


def run_sweep(plan, workers=1):
    """Execute every grid point; failed runs are recorded and the sweep continues."""
    tasks = [(plan, p) for p in plan.points()]
    if workers <= 1:
        records = [_execute(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_execute, tasks))
    records.sort(key=lambda r: (r.frequency, r.voltage))
    return SweepResult(plan, tuple(records))


def format_number(x):
    """Deterministic text form used in every CSV cell."""
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".10g")


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([c if isinstance(c, str) else format_number(c) for c in row])


def _sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def emit_reports(result, out_dir):
    """Write run, figure and diagnostic CSVs plus ``manifest.json``.

    Returns the manifest as a dict. Failed runs leave empty metric cells in
    ``runs.csv`` and their message in ``diagnostics.csv``.
    """
    if not result.records:
        raise ConfigError(["sweep result holds no runs; nothing to emit"])
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc

    plan = result.plan
    bins = tuple(int(b) for b in plan.config.sweep.sensitivity_bins)
    runs, fig6, fig7, diag = [], [], [], []
    for r in result.records:
        s = r.summary
        if s is None:
            runs.append([r.frequency, r.voltage, "", "", "", "", "", "", "", ""])
            diag.append([r.frequency, r.voltage, r.seed, "", ""] + [""] * len(bins) + [r.error])
            continue
        rep = s.report
        runs.append([s.frequency, s.voltage, s.power, s.displacement, rep.rms, rep.efficiency,
                     rep.normalized_index, rep.peak_count, rep.n_particles, rep.n_bins])
        fig6.append([s.frequency, s.voltage, s.power, s.displacement])
        fig7.append([s.frequency, s.displacement, rep.efficiency, s.voltage])
        diag.append([s.frequency, s.voltage, r.seed, s.n_timed_out, rep.noise_floor]
                    + [s.sensitivity.get(b, float("nan")) for b in bins] + [""])
    fig7.sort(key=lambda row: (row[0], row[1], row[3]))

    files = {
        "runs.csv": (RUN_COLUMNS, runs),
        "fig6_displacement.csv": (("f_Hz", "V_volts", "power_W", "displacement_m"), fig6),
        "fig7_efficiency.csv": (("f_Hz", "displacement_m", "efficiency", "V_volts"), fig7),
        "diagnostics.csv": (("f_Hz", "V_volts", "seed", "n_timed_out", "noise_floor")
                            + tuple(f"sigma_{b}_bins" for b in bins) + ("error",), diag),
    }
    hashes = {}
    for name, (header, rows) in files.items():
        path = out / name
        try:
            write_csv(path, header, rows)
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc}") from exc
        hashes[name] = _sha256(path)

    from . import __version__
    manifest = {
        "config_hash": config_hash(plan.config),
        "seed": int(plan.seed),
        "particles_per_run": int(plan.particles),
        "frequencies_Hz": [format_number(f) for f in plan.frequencies],
        "voltages_V": [format_number(v) for v in plan.voltages],
        "n_runs": len(result.records),
        "n_failed": len(result.failures),
        "versions": {
            "micromixer": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "numba": numba.__version__,
        },
        "files": {name: {"sha256": h} for name, h in sorted(hashes.items())},
    }
    path = out / "manifest.json"
    try:
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return manifest
