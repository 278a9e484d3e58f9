"""
Command line routes and config resolution.
"""

import json

import pytest

from clocknet.cli import build_parser, main
from clocknet.core.errors import ConfigError
from clocknet.core.presets import PRESETS, apply_override, resolve_experiment
from clocknet.schemas.trace import SamplerKind

SMALL = ["--set", "trace.total_time=0.2", "--set", "trace.shots_per_point=20"]


def run(capsys, *argv) -> dict:
    code = main(list(argv))
    assert code == 0
    return json.loads(capsys.readouterr().out)


def test_every_preset_resolves():
    for name in PRESETS:
        config = resolve_experiment(preset=name)
        assert config.preset == name
        config.to_trace_config()


def test_preset_values():
    config = resolve_experiment(preset="fig4-top")
    assert config.trace.noise.t2 == 50.0
    assert config.to_trace_config().n_points == 250_000
    bottom = resolve_experiment(preset="fig4-bottom")
    assert bottom.protocol.ghz_n == 100
    assert bottom.to_trace_config().n_points == 50_000


def test_resolution_order(tmp_path):
    file = tmp_path / "exp.json"
    file.write_text(json.dumps({"seed": 4, "trace": {"total_time": 10.0}}))
    config = resolve_experiment(
        preset="fig4-top", config_path=str(file), overrides=["trace.total_time=20"], seed=9
    )
    assert config.trace.total_time == 20.0
    assert config.trace.noise.t2 == 50.0
    assert config.seed == 9


def test_override_parsing():
    data = apply_override({}, "trace.sampler=CircuitShots")
    assert data == {"trace": {"sampler": "CircuitShots"}}
    assert apply_override({}, "spectra.band=[1, 2]")["spectra"]["band"] == [1, 2]
    with pytest.raises(ConfigError):
        apply_override({}, "trace.total_time")
    with pytest.raises(ConfigError):
        apply_override({"seed": 1}, "seed.value=2")


@pytest.mark.parametrize(
    "kwargs",
    [
        {"preset": "nope"},
        {"overrides": ["trace.unknown=1"]},
        {"overrides": ["trace.total_time=-1"]},
        {"overrides": ["trace.sample_rate=3", "trace.total_time=0.5"]},
        {"config_path": "/does/not/exist.json"},
    ],
)
def test_invalid_configs(kwargs):
    with pytest.raises(ConfigError):
        resolve_experiment(**kwargs)


def test_bad_config_exits_with_config_code(tmp_path, capsys):
    assert main(["freq", "--set", "trace.unknown=1", "--out", str(tmp_path)]) == 1


def test_fractional_point_count_exits_with_config_code(tmp_path):
    argv = ["simulate", "--set", "trace.sample_rate=3", "--set", "trace.total_time=0.5", "--out", str(tmp_path)]
    assert main(argv) == 1
    assert not (tmp_path / "trace.csv").exists()


def test_parser_lists_subcommands():
    parser = build_parser()
    args = parser.parse_args(["simulate", "--preset", "flat", "--exact"])
    assert args.command == "simulate" and args.exact
    with pytest.raises(SystemExit):
        parser.parse_args(["simulate", "--preset", "nope"])


def test_freq(tmp_path, capsys):
    table = run(capsys, "freq", "--preset", "fig4-top", "--out", str(tmp_path))
    assert table["f12_hz"] == pytest.approx(56.81, abs=0.01)
    assert table["split_leading_hz"] == pytest.approx(0.0178, abs=2e-4)
    assert table["effective_t2_s"] == pytest.approx(50.0)
    assert (tmp_path / "freq.json").exists()
    assert (tmp_path / "resolved_config.json").exists()


def test_freq_flat_reports_note(tmp_path, capsys):
    table = run(capsys, "freq", "--preset", "flat", "--out", str(tmp_path))
    assert "wall_time_note" in table
    assert "cubic_coefficient_fitted" not in table


def test_simulate_then_spectrum(tmp_path, capsys):
    summary = run(capsys, "simulate", "--seed", "3", "--out", str(tmp_path), "--plot-data", *SMALL)
    assert summary["points"] == 100
    assert summary["sampler"] == SamplerKind.ANALYTIC_BERNOULLI.value
    trace_path = summary["outputs"]["trace"]
    assert (tmp_path / "trace_inset.csv").exists()

    result = run(capsys, "spectrum", trace_path, "--out", str(tmp_path), "--band", "50", "60", "--window", "Hann")
    assert result["window"] == "Hann"
    assert "split" in result
    assert {line["name"] for line in result["expected_lines"]} == {"f12", "f23", "f13"}
    assert (tmp_path / "spectrum_peaks.json").exists()


def test_simulate_exact(tmp_path, capsys):
    summary = run(capsys, "simulate", "--exact", "--out", str(tmp_path), *SMALL)
    assert summary["shots"] == 0
    assert summary["sampler"] == "ExactExpectation"


def test_spectrum_of_broken_trace(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("t_s,p0\n0,1\n")
    assert main(["spectrum", str(bad), "--out", str(tmp_path)]) == 2


def test_born(tmp_path, capsys):
    report = run(capsys, "born", "--exact", "--out", str(tmp_path))
    assert max(abs(i) for i in report["i123"]) < 1e-12
    injected = run(capsys, "born", "--exact", "--inject", "0.01", "--out", str(tmp_path))
    assert injected["i123"] == pytest.approx([0.01, 0.01, 0.01], abs=1e-12)
    assert not injected["consistent_with_zero"]


def test_born_with_given_phases(tmp_path, capsys):
    report = run(
        capsys, "born", "--out", str(tmp_path),
        "--set", "foundations.theta=[0.1, 2.0, 4.0]", "--set", "foundations.phi=[0.3, 0.5]",
        "--set", "foundations.shots=50000",
    )
    assert report["consistent_with_zero"]
    assert report["shots"] == 50000


def test_linearity(tmp_path, capsys):
    report = run(capsys, "linearity", "--exact", "--out", str(tmp_path))
    assert report["success_probability"] == pytest.approx(2.0 / 9.0, abs=1e-12)
    assert report["total_variation"] < 1e-12
    assert (tmp_path / "linearity.json").exists()


def test_verify(tmp_path, capsys):
    checks = run(capsys, "verify", "--samples", "4", "--out", str(tmp_path))
    assert all(check["passed"] for check in checks.values())
    assert (tmp_path / "verify.json").exists()
