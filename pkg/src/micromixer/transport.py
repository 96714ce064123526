"""Lagrangian tracer transport through the junction.

Two labelled species enter side by side (A above the centreline, B below),
are advected with classical RK4 through the junction flow and diffuse with
Brownian steps of standard deviation sqrt(2 D dt) per axis. Walls reflect
specularly. Particles are recorded when they cross the exit plane.

Outside the junction column (``|x| > w/2``) the flow is steady and depends
only on y, so particles there take longer steps; advection is exact there
for any step length.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import InterfaceTruncationError, InvalidParameterError
from .flowfield import in_domain
from .rng import normal_pair, stream_key

__all__ = [
    "SPECIES_A",
    "SPECIES_B",
    "Particle",
    "TracerEnsemble",
    "ExitRecords",
    "InterfaceLine",
    "InterfaceHistory",
    "seed_inlet",
    "step",
    "reflect",
    "default_dt",
    "simulate_to_exit",
    "track_interface",
    "trace_particles",
]

SPECIES_A = 1
SPECIES_B = 0


@dataclass(frozen=True)
class Particle:
    x: float
    y: float
    species: int
    alive: bool = True


@dataclass(frozen=True)
class TracerEnsemble:
    """Tracers injected at ``x_in`` and collected at ``x_out``.

    ``release_time`` spreads injection uniformly over a time window so that
    exit statistics average over the forcing phase, as a steady inflow does.
    """

    x: np.ndarray
    y: np.ndarray
    species: np.ndarray
    release_time: np.ndarray
    rng_seed: int
    x_in: float
    x_out: float

    def __len__(self):
        return self.x.size

    @property
    def particle_id(self):
        return np.arange(self.x.size, dtype=np.uint64)

    def particle(self, i):
        return Particle(float(self.x[i]), float(self.y[i]), int(self.species[i]))


def _flux_weighted_offsets(u):
    # inverse CDF of the plane-Poiseuille flux density 3/4 (1 - eta^2) on [-1, 1]
    return 2.0 * np.sin(np.arcsin(2.0 * u - 1.0) / 3.0)


def seed_inlet(n, geometry, x_in, x_out=None, rng_seed=0, release_window=0.0, release_start=0.0):
    """Seed ``n`` tracers across the inlet section, weighted by the Poiseuille flux.

    Species follows the sign of y: A for y > 0, B otherwise.
    """
    if n < 2:
        raise InvalidParameterError(f"need at least 2 particles (got {n})")
    w = geometry.channel_width
    if x_out is None:
        x_out = 1.5 * w
    if not x_out > x_in:
        raise InvalidParameterError("exit plane must lie downstream of the injection plane")
    rng = np.random.default_rng(rng_seed)
    y = 0.5 * w * _flux_weighted_offsets(rng.random(n))
    release = release_start + release_window * rng.random(n)
    species = np.where(y > 0, SPECIES_A, SPECIES_B).astype(np.int8)
    return TracerEnsemble(
        x=np.full(n, float(x_in)),
        y=y,
        species=species,
        release_time=release,
        rng_seed=int(rng_seed),
        x_in=float(x_in),
        x_out=float(x_out),
    )


def _wave_vector(flow):
    if flow.waveform is None:
        return np.array([1.0, 0.5, 1.0, 0.0, 0.0, 0.0, 0.5, 0.0])
    return np.array(flow.waveform.scalar_parameters, dtype=float)


def _halves(geometry):
    return (0.5 * geometry.channel_width, 0.5 * geometry.main_length,
            0.5 * geometry.transverse_length)


def reflect(geometry, old, new):
    """Specularly reflect moves ``old -> new`` ((n, 2) arrays) off the channel walls."""
    half_w, half_lm, half_lt = _halves(geometry)
    old = np.atleast_2d(np.asarray(old, dtype=float))
    out = np.array(np.atleast_2d(new), dtype=float)
    outside = np.flatnonzero(~in_domain(geometry, out[:, 0], out[:, 1]))
    for i in outside:
        xn, yn, ok = _kernels.reflect(old[i, 0], old[i, 1], out[i, 0], out[i, 1],
                                      half_w, half_lm, half_lt)
        assert ok, f"reflection failed for move {old[i]} -> {out[i]}"
        out[i] = xn, yn
    return out


def step(positions, flow, t, dt, diffusivity, rng=None, noise=None):
    """Advance tracer positions by one RK4 + Brownian step.

    Parameters
    ----------
    positions : (n, 2) array
    rng : numpy Generator, optional
        Source of the Brownian increments when ``noise`` is not given.
    noise : (n, 2) array, optional
        Standard-normal increments to use instead of drawing from ``rng``.
    """
    if not dt > 0:
        raise InvalidParameterError("dt must be positive")
    p = np.atleast_2d(np.asarray(positions, dtype=float))
    x, y = p[:, 0], p[:, 1]
    k1x, k1y = flow.velocity(x, y, t)
    k2x, k2y = flow.velocity(x + 0.5 * dt * k1x, y + 0.5 * dt * k1y, t + 0.5 * dt)
    k3x, k3y = flow.velocity(x + 0.5 * dt * k2x, y + 0.5 * dt * k2y, t + 0.5 * dt)
    k4x, k4y = flow.velocity(x + dt * k3x, y + dt * k3y, t + dt)
    new = np.column_stack([
        x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
        y + dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
    ])
    if diffusivity > 0:
        if noise is None:
            if rng is None:
                raise InvalidParameterError("diffusive step needs rng or noise")
            noise = rng.standard_normal(new.shape)
        new = new + math.sqrt(2.0 * diffusivity) * math.sqrt(dt) * np.asarray(noise)
    return reflect(flow.geometry, p, new)


def default_dt(flow):
    """Junction time step: resolves the forcing period and junction transit."""
    w = flow.geometry.channel_width
    dt = 0.1 * w / flow.peak_speed()
    if flow.period is not None:
        dt = min(dt, flow.period / 200.0)
    return dt


def default_outer_dt(flow, dt):
    """Step length used away from the junction, where the flow is steady."""
    w = flow.geometry.channel_width
    outer = 0.1 * w / (1.5 * flow.mean_main_velocity)
    if flow.period is not None:
        outer = min(outer, flow.period / 20.0)
    return max(dt, outer)


@dataclass(frozen=True)
class ExitRecords:
    """Exit-plane crossings; NaN ``y_exit``/``t_exit`` mark timed-out tracers."""

    particle_id: np.ndarray
    species: np.ndarray
    y_exit: np.ndarray
    t_exit: np.ndarray
    y_inject: np.ndarray
    release_time: np.ndarray
    last_position: np.ndarray = None
    steps: np.ndarray = None

    @property
    def exited(self):
        return ~np.isnan(self.y_exit)

    @property
    def n_timed_out(self):
        return int(np.count_nonzero(~self.exited))

    def completed(self):
        """Records of the tracers that reached the exit plane."""
        m = self.exited
        return ExitRecords(self.particle_id[m], self.species[m], self.y_exit[m],
                           self.t_exit[m], self.y_inject[m], self.release_time[m],
                           None if self.last_position is None else self.last_position[m],
                           None if self.steps is None else self.steps[m])


def simulate_to_exit(ensemble, flow, diffusivity, dt=None, max_time=None, outer_dt=None,
                     adaptive=True):
    """Integrate every tracer from its release until it crosses ``x_out``.

    In the junction column the step is ``dt`` (default: period/200 capped by
    0.1 w / peak speed). With ``adaptive`` the peak speed is the bound valid
    until the next heater switch, and steps never straddle a switch, so
    the short velocity burst after each switch is resolved without paying for
    it over the whole period.

    Tracers still inside at ``max_time`` (absolute time) are reported as timed
    out; more than 1 % timed out raises a warning since it points at trapped
    fluid.
    """
    geometry = flow.geometry
    if not np.all(in_domain(geometry, ensemble.x, ensemble.y)):
        raise InvalidParameterError("tracers must start inside the channel")
    if ensemble.x_out >= 0.5 * geometry.main_length:
        raise InvalidParameterError("exit plane beyond the end of the main channel")
    if dt is None:
        dt = flow.period / 200.0 if (adaptive and flow.period is not None) else default_dt(flow)
    outer_dt = default_outer_dt(flow, dt) if outer_dt is None else outer_dt
    if max_time is None:
        transit = (ensemble.x_out - ensemble.x_in) / flow.mean_main_velocity
        max_time = float(ensemble.release_time.max()) + 10.0 * transit
    half_w, half_lm, half_lt = _halves(geometry)
    margin = 2.0 * (1.5 * flow.mean_main_velocity * outer_dt
                    + 6.0 * math.sqrt(2.0 * diffusivity * outer_dt))
    keys = stream_key(ensemble.rng_seed, ensemble.particle_id)
    y_exit, t_exit, x_last, y_last, steps, failures = _kernels.simulate(
        ensemble.x.astype(float), ensemble.y.astype(float), ensemble.release_time.astype(float),
        keys, float(max_time), float(dt), float(outer_dt), float(margin), float(ensemble.x_out),
        half_w, half_lm, half_lt, float(flow.mean_main_velocity), float(flow.profile_peak_factor),
        _wave_vector(flow), float(diffusivity), bool(adaptive),
    )
    assert failures == 0, f"{failures} tracer moves could not be reflected back into the domain"
    records = ExitRecords(ensemble.particle_id, ensemble.species.copy(), y_exit, t_exit,
                          ensemble.y.copy(), ensemble.release_time.copy(),
                          np.column_stack([x_last, y_last]), steps)
    if records.n_timed_out > 0.01 * len(ensemble):
        warnings.warn(
            f"{records.n_timed_out} of {len(ensemble)} tracers did not reach the exit plane "
            "(recirculation trap suspected)",
            RuntimeWarning,
            stacklevel=2,
        )
    return records


def brownian_noise(seed, particle_id, step_index):
    """Counter-based (n, 2) standard normals used by the compiled integrator."""
    gx, gy = normal_pair(stream_key(seed, particle_id), step_index)
    return np.column_stack([gx, gy])


def trace_particles(ensemble, flow, diffusivity, dt, t_end, every=10, indices=None):
    """Fixed-step trajectories of selected tracers for visualisation.

    Each tracer starts at its release time and is stepped with ``step`` and
    its own counter-based noise until it crosses ``x_out`` or ``t_end``.
    Every ``every``-th position is kept.

    Returns
    -------
    list of (particle_id, (k, 3) array of t, x, y)
    """
    if every < 1:
        raise InvalidParameterError("every must be >= 1")
    ids = np.arange(len(ensemble)) if indices is None else np.asarray(indices, dtype=int)
    out = []
    for i in ids:
        pos = np.array([[ensemble.x[i], ensemble.y[i]]])
        t = float(ensemble.release_time[i])
        rows = [(t, pos[0, 0], pos[0, 1])]
        k = 0
        while t < t_end and pos[0, 0] < ensemble.x_out:
            noise = brownian_noise(ensemble.rng_seed, np.uint64(i), k)
            pos = step(pos, flow, t, dt, diffusivity, noise=noise)
            t += dt
            k += 1
            if k % every == 0 or pos[0, 0] >= ensemble.x_out:
                rows.append((t, pos[0, 0], pos[0, 1]))
        out.append((int(i), np.array(rows)))
    return out


@dataclass
class InterfaceLine:
    """Material line between the two liquids, as an ordered polyline."""

    vertices: np.ndarray
    refinement_threshold: float

    @classmethod
    def across_junction(cls, geometry, x_start=None, x_end=None, n=64, refinement_threshold=None):
        """Straight y = 0 interface from upstream of the junction to its exit edge."""
        w = geometry.channel_width
        x_start = -1.5 * w if x_start is None else x_start
        x_end = 0.5 * w if x_end is None else x_end
        xs = np.linspace(x_start, x_end, n)
        threshold = w / 50.0 if refinement_threshold is None else refinement_threshold
        return cls(np.column_stack([xs, np.zeros_like(xs)]), threshold)

    def length(self):
        return float(np.sum(np.hypot(*np.diff(self.vertices, axis=0).T)))

    def refine(self):
        """Insert midpoints until every segment is within the threshold."""
        v = self.vertices
        seg = np.hypot(*np.diff(v, axis=0).T)
        pieces = np.maximum(1, np.ceil(seg / self.refinement_threshold).astype(int))
        if np.all(pieces == 1):
            return self
        frac = [np.arange(k) / k for k in pieces]
        starts = np.repeat(v[:-1], pieces, axis=0)
        ends = np.repeat(v[1:], pieces, axis=0)
        f = np.concatenate(frac)[:, None]
        self.vertices = np.vstack([starts + f * (ends - starts), v[-1:]])
        return self


@dataclass(frozen=True)
class InterfaceHistory:
    times: np.ndarray
    lengths: np.ndarray
    line: InterfaceLine

    def exponential_rate(self, t_start=None, t_end=None):
        """Least-squares growth rate of log(length) over a time window."""
        m = np.ones_like(self.times, dtype=bool)
        if t_start is not None:
            m &= self.times >= t_start
        if t_end is not None:
            m &= self.times <= t_end
        slope, _ = np.polyfit(self.times[m], np.log(self.lengths[m]), 1)
        return float(slope)


def track_interface(line, flow, duration, dt, t0=0.0, record_every=1, max_vertices=1_000_000):
    """Advect an interface polyline (no diffusion) and record its length.

    The line is refined by subdivision after every step so no segment
    exceeds ``line.refinement_threshold``; subdivision never shortens it.

    Raises
    ------
    InterfaceTruncationError
        When refinement would exceed ``max_vertices``; partial history attached.
    """
    if not dt > 0 or not duration > 0:
        raise InvalidParameterError("duration and dt must be positive")
    geometry = flow.geometry
    half_w, half_lm, half_lt = _halves(geometry)
    wave = _wave_vector(flow)
    line.refine()
    n_steps = int(round(duration / dt))
    times, lengths = [t0], [line.length()]
    for k in range(1, n_steps + 1):
        t = t0 + (k - 1) * dt
        x = np.ascontiguousarray(line.vertices[:, 0])
        y = np.ascontiguousarray(line.vertices[:, 1])
        failures = _kernels.advect_points(x, y, t, dt, 1, half_w, half_lm, half_lt,
                                          float(flow.mean_main_velocity),
                                          float(flow.profile_peak_factor), wave)
        assert failures == 0
        line.vertices = np.column_stack([x, y])
        line.refine()
        if line.vertices.shape[0] > max_vertices:
            raise InterfaceTruncationError(
                f"interface exceeded {max_vertices} vertices at t={t + dt:.4g} s",
                np.array(times), np.array(lengths), line,
            )
        if k % record_every == 0 or k == n_steps:
            times.append(t0 + k * dt)
            lengths.append(line.length())
    return InterfaceHistory(np.array(times), np.array(lengths), line)
