import csv
import hashlib
import json
from dataclasses import replace

import pytest

from micromixer.config import MixerConfig
from micromixer.errors import ConfigError, RunError
from micromixer.sweep import (
    RUN_COLUMNS,
    SweepPlan,
    SweepResult,
    emit_reports,
    format_number,
    run_single,
    run_sweep,
)

W = 100e-6


def small(config=None, particles=1000):
    config = config or MixerConfig()
    return replace(config, transport=replace(config.transport, particles=particles))


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


@pytest.mark.parametrize("kwargs, fragment", [
    (dict(frequencies=(), voltages=(10,)), "frequency grid is empty"),
    (dict(frequencies=(3,), voltages=()), "voltage grid is empty"),
    (dict(frequencies=(0.01,), voltages=(10,)), "outside"),
    (dict(frequencies=(3,), voltages=(-1,)), "must be >= 0"),
    (dict(frequencies=(3, 3), voltages=(10,)), "duplicates"),
    (dict(frequencies=(3,), voltages=(10,), particles=1), "particles"),
])
def test_plan_validation(kwargs, fragment):
    kwargs.setdefault("config", MixerConfig())
    with pytest.raises(ConfigError, match=fragment):
        SweepPlan(**kwargs)


def test_default_plan_cardinality():
    plan = SweepPlan.from_config(MixerConfig())
    assert plan.n_runs == 49 == len(plan.points())
    assert plan.particles == 20000


def test_empty_result_writes_nothing(tmp_path):
    plan = SweepPlan((3,), (10,), MixerConfig())
    with pytest.raises(ConfigError):
        emit_reports(SweepResult(plan, ()), tmp_path / "out")
    assert not (tmp_path / "out").exists()


def test_format_number():
    assert format_number(0.1 + 0.2) == "0.3"
    assert format_number(3) == "3"
    assert format_number(float("nan")) == "nan"
    assert format_number(float("-inf")) == "-inf"


@pytest.fixture(scope="module")
def tiny_sweep(tmp_path_factory):
    # grid given out of order; one voltage boils the fluid
    plan = SweepPlan((4.0, 2.0), (80.0, 0.0, 30.0), small(), seed=7, particles=1000)
    result = run_sweep(plan)
    out = tmp_path_factory.mktemp("sweep")
    manifest = emit_reports(result, out)
    return plan, result, out, manifest


def test_one_record_per_point_sorted(tiny_sweep):
    plan, result, _, _ = tiny_sweep
    keys = [(r.frequency, r.voltage) for r in result.records]
    assert keys == sorted(keys)
    assert len(keys) == plan.n_runs == 6


def test_failed_runs_are_recorded(tiny_sweep):
    _, result, out, manifest = tiny_sweep
    failed = result.failures
    assert [(r.frequency, r.voltage) for r in failed] == [(2.0, 80.0), (4.0, 80.0)]
    assert all("boil" in r.error for r in failed)
    assert manifest["n_failed"] == 2
    diag = read_rows(out / "diagnostics.csv")
    assert diag[0][-1] == "error"
    assert sum(1 for row in diag[1:] if row[-1]) == 2
    runs = read_rows(out / "runs.csv")
    assert tuple(runs[0]) == RUN_COLUMNS
    assert len(runs) == 7
    # failed rows keep their key but no metrics
    assert runs[3][:2] == ["2", "80"] and runs[3][2:] == [""] * 8


def test_manifest_hashes_match_files(tiny_sweep):
    _, _, out, manifest = tiny_sweep
    on_disk = json.loads((out / "manifest.json").read_text())
    assert on_disk == manifest
    for name, entry in manifest["files"].items():
        assert hashlib.sha256((out / name).read_bytes()).hexdigest() == entry["sha256"]
    assert manifest["seed"] == 7
    assert manifest["particles_per_run"] == 1000


def test_reports_are_byte_identical_on_rerun(tiny_sweep, tmp_path):
    plan, _, out, _ = tiny_sweep
    emit_reports(run_sweep(plan), tmp_path)
    for name in ("runs.csv", "fig6_displacement.csv", "fig7_efficiency.csv", "diagnostics.csv",
                 "manifest.json"):
        assert (tmp_path / name).read_bytes() == (out / name).read_bytes()


def test_worker_count_does_not_change_results(tiny_sweep, tmp_path):
    plan, _, out, _ = tiny_sweep
    emit_reports(run_sweep(plan, workers=2), tmp_path)
    assert (tmp_path / "runs.csv").read_bytes() == (out / "runs.csv").read_bytes()


def test_sensitivity_columns(tiny_sweep):
    _, _, out, _ = tiny_sweep
    header = read_rows(out / "diagnostics.csv")[0]
    assert "sigma_25_bins" in header and "sigma_100_bins" in header


def test_undriven_run_stays_segregated():
    s = run_single(small(particles=5000).with_drive(voltage_amplitude=0.0), seed=1)
    assert s.displacement == 0.0
    assert s.report.peak_count == 2
    # only the diffusion layer at the interface is mixed
    assert s.report.rms > 0.45


def test_operating_point_mixes():
    s = run_single(small(particles=5000).with_drive(frequency=3.0, voltage_amplitude=30.0),
                   seed=1)
    assert s.displacement > W
    assert s.report.peak_count == 1
    assert s.report.rms < 0.25


def test_seed_stability():
    c = small(particles=5000).with_drive(frequency=3.0, voltage_amplitude=30.0)
    a, b = run_single(c, seed=1), run_single(c, seed=2)
    assert a.report.rms != b.report.rms
    assert abs(a.report.rms - b.report.rms) < 3 * a.report.noise_floor


def test_run_error_carries_point():
    c = small().with_drive(frequency=3.0, voltage_amplitude=80.0)
    with pytest.raises(RunError) as err:
        run_single(c, seed=0)
    assert (err.value.frequency, err.value.voltage) == (3.0, 80.0)
