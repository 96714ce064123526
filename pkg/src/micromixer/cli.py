"""Command-line entry point: ``micromixer <subcommand> [options]``.

Subcommands
-----------
simulate   one full run; exit-record CSV, metrics CSV, optional trajectories
sweep      (f, V) grid; run, figure and diagnostic CSVs plus manifest
actuator   one steady period of powers, temperatures, velocity, displacement
field      velocity samples on a grid around the junction
interface  interface length versus time

All outputs go to ``--out-dir`` (default: current directory). Exit status is
0 on success, 1 on validation or run failure, 2 on bad usage.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .actuator import transverse_waveform
from .config import load_config
from .errors import MicromixerError
from .flowfield import JunctionFlow, in_domain
from .sweep import (
    RUN_COLUMNS,
    SweepPlan,
    build_run,
    emit_reports,
    run_single,
    run_sweep,
    write_csv,
)
from .transport import InterfaceLine, trace_particles, track_interface


def _u64(text):
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _common(p):
    p.add_argument("--config", type=Path, default=None, help="configuration file")
    p.add_argument("--seed", type=_u64, default=0, help="unsigned 64-bit seed")
    p.add_argument("--out-dir", type=Path, default=Path("."), help="output directory")


def _drive_overrides(p):
    p.add_argument("--frequency", type=float, default=None, help="drive frequency (Hz)")
    p.add_argument("--voltage", type=float, default=None, help="drive voltage amplitude (V)")


def _load(args):
    config = load_config(args.config)
    changes = {}
    if getattr(args, "frequency", None) is not None:
        changes["frequency"] = args.frequency
    if getattr(args, "voltage", None) is not None:
        changes["voltage_amplitude"] = args.voltage
    if changes:
        config = config.with_drive(**changes)
    if getattr(args, "particles", None) is not None:
        config = replace(config, transport=replace(config.transport, particles=args.particles))
    return config.validate()


def _out(args):
    args.out_dir.mkdir(parents=True, exist_ok=True)
    return args.out_dir


def cmd_simulate(args):
    config = _load(args)
    captured = []
    summary = run_single(config, args.seed, records_out=captured)
    records = captured[0]
    out = _out(args)
    order = np.argsort(records.particle_id)
    write_csv(out / "exit_records.csv", ("particle_id", "species", "y_exit_m", "t_exit_s"),
              ([int(records.particle_id[i]), "A" if records.species[i] else "B",
                float(records.y_exit[i]), float(records.t_exit[i])] for i in order))
    rep = summary.report
    write_csv(out / "metrics.csv", RUN_COLUMNS,
              [[summary.frequency, summary.voltage, summary.power, summary.displacement,
                rep.rms, rep.efficiency, rep.normalized_index, rep.peak_count,
                rep.n_particles, rep.n_bins]])
    if args.trajectories:
        _, flow, ensemble = build_run(config, args.seed)
        idx = np.linspace(0, len(ensemble) - 1, args.trajectories).astype(int)
        transit = (ensemble.x_out - ensemble.x_in) / config.mean_velocity
        dt = min(config.drive.period / 200.0, 0.1 * config.geometry.channel_width
                 / flow.peak_speed())
        t_end = float(ensemble.release_time.max()) + config.transport.max_transits * transit
        paths = trace_particles(ensemble, flow, config.fluid.tracer_diffusivity, dt, t_end,
                                every=args.every, indices=idx)
        write_csv(out / "trajectories.csv", ("particle_id", "t_s", "x_m", "y_m"),
                  ([pid, *row] for pid, rows in paths for row in rows))
    print(f"sigma={rep.rms:.4f} efficiency={rep.efficiency:.3f} M={rep.normalized_index:.3f} "
          f"peaks={rep.peak_count} displacement={summary.displacement * 1e6:.1f} um "
          f"timed_out={summary.n_timed_out}/{summary.n_released}")
    return 0


def cmd_sweep(args):
    config = _load(args)
    plan = SweepPlan.from_config(config, seed=args.seed, particles=config.transport.particles,
                                 out_dir=args.out_dir)
    result = run_sweep(plan, workers=args.workers)
    emit_reports(result, args.out_dir)
    for r in result.failures:
        print(f"failed: {r.error}", file=sys.stderr)
    print(f"{plan.n_runs} runs, {len(result.failures)} failed; reports in {args.out_dir}")
    return 1 if result.failures else 0


def cmd_actuator(args):
    config = _load(args)
    period = config.drive.period
    dt = args.dt if args.dt else None
    wave = transverse_waveform(config.drive, config.substrate, config.geometry, config.fluid,
                               duration=args.periods * period, dt=dt)
    write_csv(_out(args) / "actuator.csv",
              ("t_s", "P_A_W", "P_B_W", "T_A_K", "T_B_K", "v_mps", "x_m"),
              zip(wave.sample_times, wave.power_a, wave.power_b, wave.temperature_a,
                  wave.temperature_b, wave.mean_velocity, wave.mean_displacement))
    print(f"steady amplitude {wave.steady_amplitude * 1e6:.2f} um, "
          f"peak |v| {wave.peak_velocity * 1e3:.3f} mm/s")
    return 0


def _flow(config):
    wave = None
    if config.drive.voltage_amplitude > 0:
        wave = transverse_waveform(config.drive, config.substrate, config.geometry,
                                   config.fluid)
    return JunctionFlow(config.geometry, config.mean_velocity, wave,
                        config.profile_peak_factor)


def cmd_field(args):
    config = _load(args)
    flow = _flow(config)
    w = config.geometry.channel_width
    half = 0.5 * args.extent * w
    axis = np.linspace(-half, half, args.n)
    x, y = np.meshgrid(axis, axis, indexing="ij")
    keep = in_domain(config.geometry, x, y)
    x, y = x[keep], y[keep]
    times = np.linspace(0.0, config.drive.period, args.times, endpoint=False)
    rows = []
    for t in times:
        ux, uy = flow.velocity(x, y, np.full(x.shape, t))
        rows.extend(zip(x, y, np.full(x.shape, t), ux, uy))
    write_csv(_out(args) / "field.csv", ("x_m", "y_m", "t_s", "ux_mps", "uy_mps"), rows)
    print(f"{len(rows)} samples at {args.times} times")
    return 0


def cmd_interface(args):
    config = _load(args)
    flow = _flow(config)
    period = config.drive.period
    duration = args.periods * period
    steps_per_period = math.ceil(period / (0.1 * config.geometry.channel_width
                                           / flow.peak_speed()))
    line = InterfaceLine.across_junction(config.geometry)
    history = track_interface(line, flow, duration, period / steps_per_period,
                              record_every=max(1, steps_per_period // args.samples_per_period))
    write_csv(_out(args) / "interface.csv", ("t_s", "length_m"),
              zip(history.times, history.lengths))
    print(f"length x{history.lengths[-1] / history.lengths[0]:.3f}, "
          f"exponential rate {history.exponential_rate():.4g} 1/s")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="micromixer", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="single pipeline run")
    _common(p)
    _drive_overrides(p)
    p.add_argument("--particles", type=_positive_int, default=None)
    p.add_argument("--trajectories", type=int, default=0,
                   help="number of tracers whose decimated paths are dumped")
    p.add_argument("--every", type=_positive_int, default=20, help="trajectory decimation")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="frequency x voltage sweep")
    _common(p)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--particles", type=_positive_int, default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("actuator", help="steady actuator waveform")
    _common(p)
    _drive_overrides(p)
    p.add_argument("--periods", type=_positive_int, default=1)
    p.add_argument("--dt", type=float, default=None, help="sample step (s)")
    p.set_defaults(func=cmd_actuator)

    p = sub.add_parser("field", help="sampled velocity field")
    _common(p)
    _drive_overrides(p)
    p.add_argument("--n", type=_positive_int, default=41, help="grid points per axis")
    p.add_argument("--extent", type=float, default=3.0, help="box size in channel widths")
    p.add_argument("--times", type=_positive_int, default=8, help="samples per period")
    p.set_defaults(func=cmd_field)

    p = sub.add_parser("interface", help="interface stretching")
    _common(p)
    _drive_overrides(p)
    p.add_argument("--periods", type=float, default=2.0)
    p.add_argument("--samples-per-period", type=_positive_int, default=20)
    p.set_defaults(func=cmd_interface)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MicromixerError as exc:
        print(f"micromixer: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"micromixer: I/O error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
