import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from micromixer.actuator import transverse_waveform
from micromixer.errors import DomainError, InvalidParameterError
from micromixer.flowfield import (
    JunctionFlow,
    divergence_at,
    in_domain,
    transverse_displacement_of_centerline,
    transverse_profile,
    velocity_at,
)
from micromixer.model import DriveSignal, FluidProperties, SubstrateThermal

W = 100e-6


@pytest.fixture
def actuated(geometry, mean_velocity):
    wave = transverse_waveform(DriveSignal(30.0, 3.0), SubstrateThermal(), geometry,
                               FluidProperties())
    return JunctionFlow(geometry, mean_velocity, wave, 2.0)


@pytest.fixture
def steady(geometry, mean_velocity):
    return JunctionFlow(geometry, mean_velocity)


def test_main_channel_centre_undriven(steady, mean_velocity):
    ux, uy = velocity_at(steady, (-1e-3, 0.0), 0.0)
    assert ux == pytest.approx(1.5 * mean_velocity, rel=1e-14)
    assert uy == 0.0


def test_no_slip_on_walls(actuated, mean_velocity):
    t = np.linspace(0.0, actuated.period, 37)
    for x in (-1.5e-3, -0.8 * W, 0.7 * W, 1.5e-3):
        for y in (-W / 2, W / 2):
            ux, uy = velocity_at(actuated, np.array([[x, y]] * t.size), t)
            assert np.max(np.hypot(ux, uy)) < 1e-12 * mean_velocity
    for y in (-1.5e-3, -0.9 * W, 0.9 * W, 1.5e-3):
        for x in (-W / 2, W / 2):
            ux, uy = velocity_at(actuated, np.array([[x, y]] * t.size), t)
            assert np.max(np.hypot(ux, uy)) < 1e-12 * mean_velocity


def test_junction_centre_at_peak_transverse_velocity(actuated, mean_velocity):
    wave = actuated.waveform
    # mean velocity peaks right after heater A switches on
    t_peak = 1e-12
    vbar = wave.velocity(t_peak)
    assert abs(vbar) == pytest.approx(wave.peak_velocity, rel=1e-6)
    ux, uy = velocity_at(actuated, (0.0, 0.0), t_peak)
    assert ux == pytest.approx(1.5 * mean_velocity, rel=1e-14)
    assert uy == pytest.approx(2.0 * vbar, rel=1e-14)


@pytest.mark.parametrize("point", [(0.0, 3e-3), (3e-3, 0.0), (2 * W, 2 * W), (-W, -3e-3)])
def test_outside_domain_rejected(actuated, point):
    with pytest.raises(DomainError):
        velocity_at(actuated, point, 0.0)


def test_outside_domain_corner_block(actuated):
    with pytest.raises(DomainError):
        velocity_at(actuated, (0.6 * W, 0.6 * W), 0.0)


def _interior_grid(n=50):
    # covers the junction, both arms of each channel near it, and the corners
    axis = np.linspace(-2.0 * W, 2.0 * W, n)
    x, y = np.meshgrid(axis, axis, indexing="ij")
    return x.ravel(), y.ravel()


def test_divergence_free_on_grid(actuated, mean_velocity):
    x, y = _interior_grid()
    h = 1e-7
    keep = in_domain(actuated.geometry, x - h, y) & in_domain(actuated.geometry, x + h, y) \
        & in_domain(actuated.geometry, x, y - h) & in_domain(actuated.geometry, x, y + h)
    pts = np.column_stack([x[keep], y[keep]])
    assert pts.shape[0] > 1000
    bound = 1e-8 * mean_velocity / W
    for t in np.linspace(0.0, actuated.period, 10, endpoint=False):
        div = divergence_at(actuated, pts, np.full(pts.shape[0], t), h)
        assert np.max(np.abs(div)) < bound


def test_divergence_near_junction_corner(actuated, mean_velocity):
    bound = 1e-8 * mean_velocity / W
    for h in (1e-7, 5e-8, 2.5e-8):
        for t in np.linspace(0.0, actuated.period, 7):
            assert abs(divergence_at(actuated, (0.5 * W - 2 * h, 0.5 * W - 2 * h), t, h)) < bound


def test_divergence_stencil_leaving_domain(actuated):
    with pytest.raises(DomainError):
        divergence_at(actuated, (-1e-3, 0.5 * W - 1e-8), 0.0, 1e-7)
    with pytest.raises(InvalidParameterError):
        divergence_at(actuated, (0.0, 0.0), 0.0, 0.0)


def test_flux_through_main_channel(actuated, mean_velocity):
    for t in np.linspace(0.0, actuated.period, 5):
        for x in (-1e-3, 0.0, 0.3 * W):
            flux, _ = quad(lambda y: velocity_at(actuated, (x, y), t)[0], -W / 2, W / 2,
                           epsabs=0, epsrel=1e-13)
            assert flux == pytest.approx(mean_velocity * W, rel=1e-9)


def test_undriven_field_translation_invariant(steady):
    y = np.linspace(-W / 2, W / 2, 21)
    a = np.column_stack(velocity_at(steady, np.column_stack([np.full_like(y, -1e-3), y]), 0.0))
    b = np.column_stack(velocity_at(steady, np.column_stack([np.full_like(y, 1e-3), y]), 7.0))
    np.testing.assert_array_equal(a, b)


@given(st.floats(1.1, 6.0))
def test_transverse_profile_mean_peak_walls(kappa):
    mean, _ = quad(lambda s: transverse_profile(s, W, kappa), -W / 2, W / 2, points=[0.0],
                   epsabs=0, epsrel=1e-12, limit=500)
    assert mean / W == pytest.approx(1.0, rel=1e-7)
    assert float(transverse_profile(0.0, W, kappa)) == pytest.approx(kappa)
    assert float(transverse_profile(W / 2, W, kappa)) == pytest.approx(0.0, abs=1e-12)


def test_plug_limit_is_flat():
    s = np.linspace(-W / 2, W / 2, 11)
    np.testing.assert_array_equal(transverse_profile(s, W, 1.0), np.ones_like(s))


def test_parabolic_member_of_profile_family():
    s = np.linspace(-W / 2, W / 2, 11)
    np.testing.assert_allclose(transverse_profile(s, W, 1.5), 1.5 * (1 - (2 * s / W) ** 2),
                               atol=1e-14)


def test_construction_guards(geometry):
    with pytest.raises(InvalidParameterError):
        JunctionFlow(geometry, 0.0)
    with pytest.raises(InvalidParameterError):
        JunctionFlow(geometry, 1e-4, None, 0.5)


def _ten_kelvin_swing(geometry, kappa):
    # quasi-static drive whose T_A - T_B swing is exactly 10 K
    drive = DriveSignal(30.0, 0.1)
    substrate = SubstrateThermal(power_to_temperature_gain=5.0 / drive.on_power)
    wave = transverse_waveform(drive, substrate, geometry, FluidProperties())
    return JunctionFlow(geometry, 2.78e-4, wave, kappa)


def test_centreline_displacement_ten_kelvin(geometry):
    ptp = transverse_displacement_of_centerline(_ten_kelvin_swing(geometry, 2.0))
    assert ptp == pytest.approx(267e-6, rel=2e-3)
    assert ptp == pytest.approx(260e-6, rel=0.05)


def test_centreline_displacement_plug_profile(geometry):
    flow = _ten_kelvin_swing(geometry, 1.0)
    ptp = transverse_displacement_of_centerline(flow)
    assert ptp == pytest.approx(133.5e-6, rel=2e-3)
    wave = flow.waveform
    assert ptp == pytest.approx(2 * wave.steady_amplitude, rel=1e-3)


def test_centreline_displacement_zero_drive(steady):
    assert transverse_displacement_of_centerline(steady) == 0.0
