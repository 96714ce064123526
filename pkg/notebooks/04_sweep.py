# coding: utf-8

# # Frequency x voltage sweep
#
# A reduced grid runs in about a minute. The full default grid is
# `micromixer sweep --out-dir out` (49 runs, 2e4 tracers each).

# %%
import csv
import tempfile
from pathlib import Path

import numpy as np

from micromixer.config import MixerConfig
from micromixer.sweep import SweepPlan, emit_reports, run_sweep

plan = SweepPlan((1.0, 3.0, 5.0, 7.0), (0.0, 15.0, 30.0), MixerConfig(), seed=0,
                 particles=4000)
result = run_sweep(plan)
out = Path(tempfile.mkdtemp())
manifest = emit_reports(result, out)
print(f"{manifest['n_runs']} runs, {manifest['n_failed']} failed, written to {out}")

# %% [markdown]
# Efficiency against displacement per frequency, the layout of the
# efficiency figure.

# %%
with open(out / "fig7_efficiency.csv", newline="") as fh:
    rows = list(csv.DictReader(fh))
for f in sorted({r["f_Hz"] for r in rows}, key=float):
    pts = [(float(r["displacement_m"]) * 1e6, float(r["efficiency"])) for r in rows
           if r["f_Hz"] == f]
    print(f"{float(f):3.0f} Hz  " + "  ".join(f"({d:5.0f} um, {e:5.2f})" for d, e in pts))

# %% [markdown]
# Best frequency at the largest voltage.

# %%
top = [r for r in result.records if r.voltage == max(plan.voltages)]
best = max(top, key=lambda r: r.summary.report.efficiency)
print(f"best: {best.frequency:g} Hz, sigma {best.summary.report.rms:.3f}")
print("efficiency spread:", np.ptp([r.summary.report.efficiency for r in top]).round(2))
