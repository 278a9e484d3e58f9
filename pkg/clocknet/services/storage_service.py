"""
Trace, spectrum and report files.

Floats are written with 17 significant digits so every value reads back
bit-identical. File contents never include timestamps: the same run writes the
same bytes.
"""

import csv
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel

from clocknet.core.config import settings
from clocknet.core.errors import TraceFormatError
from clocknet.schemas.spectra import Spectrum
from clocknet.schemas.trace import SignalTrace

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ["t_s", "p0", "p1", "p2", "p_null", "p_plus", "shots"]
SPECTRUM_COLUMNS = ["freq_hz", "power"]
SUM_TOLERANCE = 1e-9

PathLike = Union[str, Path]


def _fmt(value: float) -> str:
    return format(float(value), f".{settings.float_digits}g")


def sidecar_path(path: PathLike) -> Path:
    return Path(path).with_suffix(".json")


class StorageService:

    @staticmethod
    def write_json(data: Union[BaseModel, Dict[str, Any]], path: PathLike) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = data.model_dump(mode="json") if isinstance(data, BaseModel) else data
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        logger.info("Wrote %s", path)
        return path

    @staticmethod
    def read_json(path: PathLike) -> Dict[str, Any]:
        path = Path(path)
        try:
            return json.loads(path.read_text())
        except json.JSONDecodeError as e:
            raise TraceFormatError(f"{path}: invalid JSON ({e.msg})", line=e.lineno)

    @staticmethod
    def write_trace(trace: SignalTrace, path: PathLike) -> Path:
        """CSV columns t_s, p0, p1, p2, p_null, p_plus, shots plus a JSON sidecar."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(TRACE_COLUMNS)
            for t, row, plus in zip(trace.times, trace.fractions, trace.p_plus):
                writer.writerow([_fmt(t), *(_fmt(v) for v in row), _fmt(plus), trace.shots])

        StorageService.write_json(
            {
                "columns": TRACE_COLUMNS,
                "n_points": trace.n_points,
                "seed": trace.seed,
                "shots": trace.shots,
                "config": trace.config,
            },
            sidecar_path(path),
        )
        logger.info("Wrote %d-point trace to %s", trace.n_points, path)
        return path

    @staticmethod
    def read_trace(path: PathLike) -> SignalTrace:
        """Parse a trace CSV; malformed content raises TraceFormatError with its line number."""
        path = Path(path)
        if not path.exists():
            raise TraceFormatError(f"trace file {path} does not exist")

        times, fractions, plus = [], [], []
        shots: Optional[int] = None
        with path.open(newline="") as handle:
            reader = csv.reader(handle)
            header = next(reader, None)
            if header != TRACE_COLUMNS:
                raise TraceFormatError(f"expected header {','.join(TRACE_COLUMNS)}, got {header}", line=1)
            for row in reader:
                line = reader.line_num
                if not row:
                    continue
                if len(row) != len(TRACE_COLUMNS):
                    raise TraceFormatError(f"expected {len(TRACE_COLUMNS)} columns, got {len(row)}", line=line)
                try:
                    values = [float(v) for v in row[:-1]]
                    row_shots = int(row[-1])
                except ValueError as e:
                    raise TraceFormatError(f"non-numeric value ({e})", line=line)
                if not all(math.isfinite(v) for v in values):
                    raise TraceFormatError("non-finite value", line=line)
                probs = values[1:5]
                if any(p < -SUM_TOLERANCE or p > 1.0 + SUM_TOLERANCE for p in probs):
                    raise TraceFormatError("fraction outside [0, 1]", line=line)
                if abs(sum(probs) - 1.0) > SUM_TOLERANCE:
                    raise TraceFormatError(f"fractions sum to {sum(probs):.12g}, not 1", line=line)
                if shots is not None and row_shots != shots:
                    raise TraceFormatError("shot count changes within the trace", line=line)
                shots = row_shots
                times.append(values[0])
                fractions.append(probs)
                plus.append(values[5])

        if not times:
            raise TraceFormatError(f"trace file {path} has no data rows", line=2)

        seed, config = 0, {}
        sidecar = sidecar_path(path)
        if sidecar.exists():
            meta = StorageService.read_json(sidecar)
            seed, config = int(meta.get("seed", 0)), meta.get("config", {})
        else:
            logger.warning("No sidecar next to %s; seed and config unknown", path)

        return SignalTrace(
            times=np.array(times),
            fractions=np.array(fractions),
            p_plus=np.array(plus),
            shots=shots or 0,
            seed=seed,
            config=config,
        )

    @staticmethod
    def write_spectrum(spec: Spectrum, path: PathLike) -> Path:
        """Spectrum CSV (freq_hz, power) and a JSON peak report next to it."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(SPECTRUM_COLUMNS)
            for f, p in zip(spec.frequencies, spec.power):
                writer.writerow([_fmt(f), _fmt(p)])

        report = {
            "outcome": spec.outcome,
            "window": spec.window.value,
            "sample_rate": spec.sample_rate,
            "resolution": spec.resolution,
            "peaks": [p.model_dump() for p in spec.peaks],
            "split": spec.split.model_dump() if spec.split is not None else None,
        }
        StorageService.write_json(report, path.with_name(path.stem + "_peaks.json"))
        return path

    @staticmethod
    def write_plot_series(path: PathLike, x: Sequence[float], y: Sequence[float], labels: Sequence[str]) -> Path:
        """Two-column x/y series for external plotting."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(list(labels))
            for a, b in zip(x, y):
                writer.writerow([_fmt(a), _fmt(b)])
        return path
