"""
Trace and spectrum files.
"""

import json

import numpy as np
import pytest

from clocknet.core.errors import TraceFormatError
from clocknet.schemas.trace import TraceConfig
from clocknet.services.sampling_service import SamplingService
from clocknet.services.spectra_service import SpectraService
from clocknet.services.storage_service import TRACE_COLUMNS, StorageService, sidecar_path


@pytest.fixture
def trace():
    cfg = TraceConfig(sample_rate=500.0, total_time=0.05, shots_per_point=20, master_seed=11)
    return SamplingService.generate_trace(cfg)


def write_rows(path, rows, header=TRACE_COLUMNS):
    path.write_text("\n".join([",".join(header)] + rows) + "\n")
    return path


def test_trace_file_keeps_everything(tmp_path, trace):
    path = StorageService.write_trace(trace, tmp_path / "trace.csv")
    assert path.read_text().splitlines()[0] == ",".join(TRACE_COLUMNS)

    loaded = StorageService.read_trace(path)
    assert np.array_equal(loaded.times, trace.times)
    assert np.array_equal(loaded.fractions, trace.fractions)
    assert np.array_equal(loaded.p_plus, trace.p_plus)
    assert loaded.shots == 20 and loaded.seed == 11
    assert TraceConfig.model_validate(loaded.config) == TraceConfig.model_validate(trace.config)


def test_sidecar_contents(tmp_path, trace):
    path = StorageService.write_trace(trace, tmp_path / "trace.csv")
    meta = json.loads(sidecar_path(path).read_text())
    assert meta["n_points"] == trace.n_points
    assert meta["columns"] == TRACE_COLUMNS


def test_trace_without_sidecar(tmp_path):
    path = write_rows(tmp_path / "bare.csv", ["0,1,0,0,0,1,10", "0.002,0.5,0.5,0,0,0.5,10"])
    loaded = StorageService.read_trace(path)
    assert loaded.n_points == 2
    assert loaded.config == {}


@pytest.mark.parametrize(
    "rows, line",
    [
        (["0,1,0,0,0,1,10", "0.002,0.5,0.5,0,0,0.5"], 3),
        (["0,1,0,0,0,1,10", "0.002,abc,0.5,0,0,0.5,10"], 3),
        (["0,0.5,0.4,0,0,1,10"], 2),
        (["0,1.5,-0.5,0,0,1,10"], 2),
        (["0,nan,0,0,0,1,10"], 2),
        (["0,1,0,0,0,1,10", "0.002,1,0,0,0,1,20"], 3),
    ],
)
def test_malformed_rows_report_line(tmp_path, rows, line):
    path = write_rows(tmp_path / "bad.csv", rows)
    with pytest.raises(TraceFormatError) as info:
        StorageService.read_trace(path)
    assert info.value.line == line
    assert info.value.detail.startswith(f"line {line}:")


def test_bad_header(tmp_path):
    path = write_rows(tmp_path / "bad.csv", ["0,1,0,0,0,1,10"], header=["t", "p0"])
    with pytest.raises(TraceFormatError) as info:
        StorageService.read_trace(path)
    assert info.value.line == 1


def test_missing_and_empty_files(tmp_path):
    with pytest.raises(TraceFormatError):
        StorageService.read_trace(tmp_path / "nope.csv")
    with pytest.raises(TraceFormatError):
        StorageService.read_trace(write_rows(tmp_path / "empty.csv", []))


def test_spectrum_report(tmp_path, trace):
    spec = SpectraService.fft_power(trace)
    spec = spec.model_copy(update={"peaks": SpectraService.find_peaks(spec)})
    path = StorageService.write_spectrum(spec, tmp_path / "spectrum.csv")
    report = json.loads((tmp_path / "spectrum_peaks.json").read_text())
    assert report["resolution"] == pytest.approx(spec.resolution)
    assert len(path.read_text().splitlines()) == spec.n_bins + 1
