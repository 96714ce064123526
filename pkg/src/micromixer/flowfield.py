"""Analytic 2D velocity field of the cross junction.

Main flow along x is the plane Poiseuille parabola with mean ``U``; the
transverse flow along y carries the actuator's mean velocity with a
symmetric profile of peak factor ``kappa``. Because ``u_x`` depends only on
``y`` and ``u_y`` only on ``x`` (and t), the superposition is exactly
divergence-free, and both profiles vanish on the walls so the field is
continuous across the junction edges.

Transverse profile family (mean 1, peak kappa, zero at the walls)::

    p(s) = kappa * (1 - |2 s / w| ** (1 / (kappa - 1)))

kappa = 1.5 is the parabola, kappa = 2 the triangle implied by the
"double of the mean displacement" estimate, kappa -> 1 the plug limit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidParameterError

__all__ = [
    "JunctionFlow",
    "main_profile",
    "transverse_profile",
    "in_domain",
    "velocity_at",
    "divergence_at",
    "transverse_displacement_of_centerline",
    "MAIN_PEAK_FACTOR",
]

MAIN_PEAK_FACTOR = 1.5


def main_profile(s, width):
    """Plane Poiseuille profile normalised to mean 1 (peak 1.5), zero outside."""
    eta = 2.0 * np.asarray(s, dtype=float) / width
    return np.where(np.abs(eta) <= 1.0, MAIN_PEAK_FACTOR * (1.0 - eta * eta), 0.0)


def transverse_profile(s, width, kappa):
    """Mean-1 profile with peak ``kappa``; zero outside ``|s| <= width/2``."""
    a = np.abs(2.0 * np.asarray(s, dtype=float) / width)
    inside = a <= 1.0
    if kappa == 1.0:
        return np.where(inside, 1.0, 0.0)
    exponent = 1.0 / (kappa - 1.0)
    return np.where(inside, kappa * (1.0 - np.minimum(a, 1.0) ** exponent), 0.0)


def in_domain(geometry, x, y, tol=0.0):
    """True where (x, y) is inside the wetted cross (walls included)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    half_w = 0.5 * geometry.channel_width + tol
    main = (np.abs(y) <= half_w) & (np.abs(x) <= 0.5 * geometry.main_length + tol)
    cross = (np.abs(x) <= half_w) & (np.abs(y) <= 0.5 * geometry.transverse_length + tol)
    return main | cross


@dataclass(frozen=True)
class JunctionFlow:
    """Quasi-steady junction flow: steady main stream plus actuator cross flow.

    ``waveform`` may be None for an unactuated channel.
    """

    geometry: object
    mean_main_velocity: float
    waveform: object = None
    profile_peak_factor: float = 2.0

    def __post_init__(self):
        if not self.mean_main_velocity > 0:
            raise InvalidParameterError("mean_main_velocity must be positive")
        if not self.profile_peak_factor >= 1.0:
            raise InvalidParameterError("profile_peak_factor must be >= 1")

    @property
    def width(self):
        return self.geometry.channel_width

    def transverse_mean_velocity(self, t):
        if self.waveform is None:
            return np.zeros_like(np.asarray(t, dtype=float))
        return self.waveform.velocity(t)

    @property
    def period(self):
        return None if self.waveform is None else self.waveform.period

    def peak_speed(self):
        """Upper bound on |u| anywhere, used to size time steps."""
        cross = 0.0
        if self.waveform is not None:
            cross = self.profile_peak_factor * self.waveform.peak_velocity
        return max(MAIN_PEAK_FACTOR * self.mean_main_velocity, cross)

    def velocity(self, x, y, t):
        """Velocity without the domain check (zero outside each channel strip)."""
        w = self.width
        ux = self.mean_main_velocity * main_profile(y, w)
        uy = self.transverse_mean_velocity(t) * transverse_profile(x, w, self.profile_peak_factor)
        return ux, uy


def _split(point):
    point = np.asarray(point, dtype=float)
    return point[..., 0], point[..., 1]


def velocity_at(flow, point, t):
    """Velocity (u_x, u_y) at ``point`` = (x, y) or an (..., 2) array of points.

    Raises
    ------
    DomainError
        If any point is outside the main channel, transverse channel or junction.
    """
    x, y = _split(point)
    if not np.all(in_domain(flow.geometry, x, y)):
        raise DomainError(f"point(s) outside the wetted domain: {np.asarray(point).tolist()}")
    ux, uy = flow.velocity(x, y, t)
    if np.ndim(ux) == 0:
        return float(ux), float(uy)
    return ux, uy


def divergence_at(flow, point, t, spacing):
    """Central-difference divergence with a 4-point stencil of half-width ``spacing``."""
    if not spacing > 0:
        raise InvalidParameterError("spacing must be positive")
    x, y = _split(point)
    stencil_x = np.stack([x - spacing, x + spacing, x, x])
    stencil_y = np.stack([np.broadcast_to(y, np.shape(x))] * 2 + [y - spacing, y + spacing])
    if not np.all(in_domain(flow.geometry, stencil_x, stencil_y)):
        raise DomainError("divergence stencil leaves the wetted domain")
    ux_m, _ = flow.velocity(x - spacing, y, t)
    ux_p, _ = flow.velocity(x + spacing, y, t)
    _, uy_m = flow.velocity(x, y - spacing, t)
    _, uy_p = flow.velocity(x, y + spacing, t)
    div = (ux_p - ux_m) / (2 * spacing) + (uy_p - uy_m) / (2 * spacing)
    return float(div) if np.ndim(div) == 0 else div


def transverse_displacement_of_centerline(flow, n_samples=None):
    """Peak-to-peak lateral excursion on the transverse centreline over one period.

    Integrates ``u_y(0, 0, t)`` over a steady period. The time grid contains
    every heater switch and each interval is integrated with 4-point
    Gauss-Legendre nodes, which never sit on a velocity jump.
    """
    wave = flow.waveform
    if wave is None:
        return 0.0
    period = wave.period
    tau = wave.cycle.time_constant
    if n_samples is None:
        n_samples = int(max(4000, 50 * period / tau))
    on_time = wave.cycle.duty_cycle * period
    events = np.mod([on_time, wave.shift_b, wave.shift_b + on_time], period)
    t = np.unique(np.concatenate([np.linspace(0.0, period, n_samples + 1), events]))
    nodes, weights = np.polynomial.legendre.leggauss(4)
    half = 0.5 * np.diff(t)
    mid = 0.5 * (t[1:] + t[:-1])
    times = mid[:, None] + half[:, None] * nodes[None, :]
    pts = np.zeros(times.shape + (2,))
    _, uy = velocity_at(flow, pts, times)
    pieces = half * (uy @ weights)
    excursion = np.concatenate([[0.0], np.cumsum(pieces)])
    return float(excursion.max() - excursion.min())
