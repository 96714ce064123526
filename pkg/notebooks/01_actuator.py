# coding: utf-8

# # Thermal actuator
#
# Two heaters driven in antiphase warm their cavities; the liquid dilates and
# pushes a transverse flow through the junction. This walk-through checks the
# chain from drive voltage to mean transverse displacement.

# %%
import numpy as np

from micromixer.actuator import (
    average_power,
    displacement_per_kelvin,
    fundamental_amplitude,
    transverse_waveform,
)
from micromixer.model import DriveSignal, FluidProperties, Geometry, SubstrateThermal

geometry, fluid, substrate = Geometry(), FluidProperties(), SubstrateThermal()

# %% [markdown]
# Displacement per kelvin of cavity temperature, and the average electrical
# power at full drive.

# %%
print(f"dilation gain {displacement_per_kelvin(geometry, fluid) * 1e6:.2f} um/K")
print(f"average power at 30 V: {average_power(DriveSignal(30.0, 3.0)):.3f} W")

# %% [markdown]
# Steady amplitude against voltage at a few frequencies. Amplitude scales with
# V squared and falls with frequency once the period nears the thermal lag.

# %%
volts = np.arange(0.0, 31.0, 5.0)
for f in (1.0, 3.0, 7.0, 10.0):
    amps = [transverse_waveform(DriveSignal(v, f), substrate, geometry, fluid).steady_amplitude
            for v in volts]
    print(f"{f:5.1f} Hz  " + "  ".join(f"{a * 1e6:6.1f}" for a in amps) + "  um")

# %% [markdown]
# First-harmonic attenuation at the substrate cutoff frequency.

# %%
fc = substrate.cutoff_frequency
low = fundamental_amplitude(transverse_waveform(DriveSignal(30.0, 0.1), substrate, geometry, fluid))
at_fc = fundamental_amplitude(transverse_waveform(DriveSignal(30.0, fc), substrate, geometry, fluid))
print(f"gain at f_c = {at_fc / low:.4f} (1/sqrt 2 = {1 / np.sqrt(2):.4f})")
