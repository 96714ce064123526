# coding: utf-8

# # Junction velocity field
#
# Main-channel Poiseuille flow plus the oscillating transverse stream, built
# from stream functions so the composite is divergence free by construction.

# %%
import numpy as np

from micromixer.actuator import transverse_waveform
from micromixer.flowfield import (
    JunctionFlow,
    divergence_at,
    transverse_displacement_of_centerline,
    velocity_at,
)
from micromixer.model import (
    DriveSignal,
    FluidProperties,
    Geometry,
    SubstrateThermal,
    mean_velocity_from_flow_rate,
)

g = Geometry()
U = mean_velocity_from_flow_rate(10e-9 / 3600, g)
wave = transverse_waveform(DriveSignal(30.0, 3.0), SubstrateThermal(), g, FluidProperties())
flow = JunctionFlow(g, U, wave, 2.0)
print(f"U = {U * 1e3:.3f} mm/s, peak transverse speed {wave.peak_velocity * 1e3:.2f} mm/s")

# %% [markdown]
# Velocity at the junction centre over one period.

# %%
for t in np.linspace(0.0, flow.period, 6, endpoint=False):
    u, v = velocity_at(flow, (0.0, 0.0), t)
    print(f"t={t:.3f} s  u={u * 1e3:7.3f}  v={v * 1e3:7.3f} mm/s")

# %% [markdown]
# Finite-difference divergence at a few interior points, compared with U/w.

# %%
pts = np.array([[0.0, 0.0], [2e-5, -3e-5], [-4e-5, 4e-5], [-2e-4, 1e-5]])
div = divergence_at(flow, pts, np.full(len(pts), 0.05), 1e-7)
print("|div| / (U/w):", np.abs(div) / (U / g.channel_width))

# %% [markdown]
# Centreline excursion: the profile peak factor doubles the mean displacement.

# %%
print(f"centreline peak-to-peak {transverse_displacement_of_centerline(flow) * 1e6:.0f} um, "
      f"mean peak-to-peak {2 * wave.steady_amplitude * 1e6:.0f} um")
