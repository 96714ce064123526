"""Compiled per-particle integrator used by ``transport.simulate_to_exit``.

Mirrors the numpy path in ``transport``/``flowfield`` operation for operation;
tests check the two agree to round-off.
"""

import math

import numpy as np
from numba import njit

from .rng import normal_pair_scalar

# wave parameter vector layout; PEAK is the cavity temperature at heater switch-off
PERIOD, DUTY, TAU, T_ON, T_START, GAIN, SHIFT, PEAK = range(8)


@njit(cache=True, inline="always")
def _cycle_rate(t, wave):
    period = wave[PERIOD]
    s = t - math.floor(t / period) * period
    on_time = wave[DUTY] * period
    tau = wave[TAU]
    t_on = wave[T_ON]
    if s < on_time:
        return (t_on - wave[T_START]) * math.exp(-s / tau) / tau
    return -wave[PEAK] * math.exp(-(s - on_time) / tau) / tau


@njit(cache=True, inline="always")
def transverse_mean_velocity(t, wave):
    if wave[GAIN] == 0.0:
        return 0.0
    return wave[GAIN] * (_cycle_rate(t, wave) - _cycle_rate(t - wave[SHIFT], wave))


@njit(cache=True, inline="always")
def speed_bound(t, wave, kappa, u_mean):
    """Bound on |u| from t up to the next heater switch (rates only decay)."""
    cross = kappa * abs(wave[GAIN]) * (abs(_cycle_rate(t, wave)) + abs(_cycle_rate(t - wave[SHIFT], wave)))
    return max(1.5 * u_mean, cross)


@njit(cache=True, inline="always")
def time_to_switch(t, wave):
    """Time from t to the next heater switch of either cavity."""
    period = wave[PERIOD]
    s = t - math.floor(t / period) * period
    on_time = wave[DUTY] * period
    shift = wave[SHIFT] - math.floor(wave[SHIFT] / period) * period
    b_off = shift + on_time
    b_off = b_off - math.floor(b_off / period) * period
    tol = 1e-9 * period
    best = period
    for e in (0.0, on_time, shift, b_off, period):
        d = e - s
        while d <= tol:
            d += period
        if d < best:
            best = d
    return best


@njit(cache=True, inline="always")
def _profile(a, kappa):
    if kappa == 1.0:
        return 1.0
    if kappa == 2.0:
        return 2.0 * (1.0 - a)
    return kappa * (1.0 - a ** (1.0 / (kappa - 1.0)))


@njit(cache=True, inline="always")
def velocity_given(x, y, vbar, half_w, u_mean, kappa):
    """Velocity at (x, y) for a known transverse mean velocity ``vbar``."""
    ux = 0.0
    eta = y / half_w
    if abs(eta) <= 1.0:
        ux = u_mean * 1.5 * (1.0 - eta * eta)
    uy = 0.0
    a = abs(x / half_w)
    if a <= 1.0 and vbar != 0.0:
        uy = vbar * _profile(a, kappa)
    return ux, uy


@njit(cache=True, inline="always")
def velocity(x, y, t, half_w, u_mean, kappa, wave):
    return velocity_given(x, y, transverse_mean_velocity(t, wave), half_w, u_mean, kappa)


@njit(cache=True, inline="always")
def inside(x, y, half_w, half_lm, half_lt):
    if abs(y) <= half_w and abs(x) <= half_lm:
        return True
    return abs(x) <= half_w and abs(y) <= half_lt


@njit(cache=True)
def reflect(xo, yo, xn, yn, half_w, half_lm, half_lt):
    """Specular reflection of the move (xo, yo) -> (xn, yn) off the cross walls.

    Returns the corrected point and a success flag.
    """
    for _ in range(16):
        if inside(xn, yn, half_w, half_lm, half_lt):
            return xn, yn, True
        if abs(xn) <= half_w:
            # transverse stub: only its far end can be crossed
            lim = half_lt if yn > 0 else -half_lt
            yn = 2.0 * lim - yn
            continue
        if abs(yn) <= half_w:
            lim = half_lm if xn > 0 else -half_lm
            xn = 2.0 * lim - xn
            continue
        # landed in a solid corner block: find which wall was hit
        wx = half_w if xn > 0 else -half_w
        wy = half_w if yn > 0 else -half_w
        if abs(yo) <= half_w and abs(xo) > half_w:
            hit_y = True
        elif abs(xo) <= half_w and abs(yo) > half_w:
            hit_y = False
        else:
            sx = (wx - xo) / (xn - xo) if xn != xo else 2.0
            sy = (wy - yo) / (yn - yo) if yn != yo else 2.0
            hit_y = sx < sy
        if hit_y:
            yn = 2.0 * wy - yn
        else:
            xn = 2.0 * wx - xn
    return xo, yo, False


@njit(cache=True)
def rk4(x, y, t, h, half_w, u_mean, kappa, wave):
    v0 = transverse_mean_velocity(t, wave)
    v1 = transverse_mean_velocity(t + 0.5 * h, wave)
    v2 = transverse_mean_velocity(t + h, wave)
    k1x, k1y = velocity_given(x, y, v0, half_w, u_mean, kappa)
    k2x, k2y = velocity_given(x + 0.5 * h * k1x, y + 0.5 * h * k1y, v1, half_w, u_mean, kappa)
    k3x, k3y = velocity_given(x + 0.5 * h * k2x, y + 0.5 * h * k2y, v1, half_w, u_mean, kappa)
    k4x, k4y = velocity_given(x + h * k3x, y + h * k3y, v2, half_w, u_mean, kappa)
    return (x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
            y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y))


@njit(cache=True)
def simulate(x0, y0, release, keys, t_end, dt_in, dt_out, margin, x_out,
             half_w, half_lm, half_lt, u_mean, kappa, wave, diffusivity, adaptive):
    n = x0.size
    y_exit = np.full(n, np.nan)
    t_exit = np.full(n, np.nan)
    x_last = np.empty(n)
    y_last = np.empty(n)
    steps = np.zeros(n, dtype=np.int64)
    failures = 0
    sqrt_2d = math.sqrt(2.0 * diffusivity)
    for i in range(n):
        x = x0[i]
        y = y0[i]
        t = release[i]
        k = 0
        while t < t_end:
            if abs(x) < half_w + margin:
                h = dt_in
                if adaptive and wave[GAIN] != 0.0:
                    h = min(h, 0.2 * half_w / speed_bound(t, wave, kappa, u_mean))
                    h = min(h, time_to_switch(t, wave))
            else:
                h = dt_out
            xn, yn = rk4(x, y, t, h, half_w, u_mean, kappa, wave)
            if diffusivity > 0.0:
                gx, gy = normal_pair_scalar(keys[i], k)
                s = sqrt_2d * math.sqrt(h)
                xn += s * gx
                yn += s * gy
            xn, yn, ok = reflect(x, y, xn, yn, half_w, half_lm, half_lt)
            if not ok:
                failures += 1
            k += 1
            if xn >= x_out:
                frac = (x_out - x) / (xn - x)
                y_exit[i] = y + frac * (yn - y)
                t_exit[i] = t + frac * h
                break
            x = xn
            y = yn
            t += h
        x_last[i] = x
        y_last[i] = y
        steps[i] = k
    return y_exit, t_exit, x_last, y_last, steps, failures


@njit(cache=True)
def advect_points(x, y, t, h, n_steps, half_w, half_lm, half_lt, u_mean, kappa, wave):
    """Noise-free RK4 advection of many points over ``n_steps`` steps (in place)."""
    failures = 0
    for i in range(x.size):
        xi = x[i]
        yi = y[i]
        ti = t
        for _ in range(n_steps):
            xn, yn = rk4(xi, yi, ti, h, half_w, u_mean, kappa, wave)
            xn, yn, ok = reflect(xi, yi, xn, yn, half_w, half_lm, half_lt)
            if not ok:
                failures += 1
            xi = xn
            yi = yn
            ti += h
        x[i] = xi
        y[i] = yi
    return failures
