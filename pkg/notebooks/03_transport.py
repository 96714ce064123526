# coding: utf-8

# # Tracers and interface stretching
#
# Two labelled streams enter side by side, are advected through the forced
# junction with Brownian steps, and are binned at the exit plane.

# %%
from dataclasses import replace

import numpy as np

from micromixer.config import MixerConfig
from micromixer.sweep import build_run, run_single
from micromixer.transport import InterfaceLine, track_interface

config = MixerConfig()
config = replace(config, transport=replace(config.transport, particles=5000))

# %% [markdown]
# Exit statistics without forcing and at the operating point.

# %%
for v in (0.0, 10.0, 30.0):
    s = run_single(config.with_drive(frequency=3.0, voltage_amplitude=v), seed=1)
    r = s.report
    print(f"V={v:4.0f}  <x>={s.displacement * 1e6:6.1f} um  sigma={r.rms:.3f}  "
          f"efficiency={r.efficiency:5.2f}  peaks={r.peak_count}  timed out={s.n_timed_out}")

# %% [markdown]
# A material line across the inlet, followed stroboscopically. Its length
# grows much faster than linearly while it crosses the junction.

# %%
_, flow, _ = build_run(config.with_drive(frequency=3.0, voltage_amplitude=30.0), seed=0)
T = flow.period
steps = 200
hist = track_interface(InterfaceLine.across_junction(config.geometry), flow, 2 * T, T / steps,
                       record_every=steps // 4)
print(np.round(hist.lengths / hist.lengths[0], 2))
print(f"fitted exponential rate {hist.exponential_rate():.2f} 1/s")
