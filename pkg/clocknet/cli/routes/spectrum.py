import argparse
import logging
from typing import Any, Dict, Optional

from pydantic import ValidationError

from clocknet.cli.common import add_common_arguments, emit, output_dir, resolve, write_resolved
from clocknet.schemas.spectra import WindowKind
from clocknet.schemas.trace import TraceConfig
from clocknet.services.spectra_service import SpectraService
from clocknet.services.storage_service import StorageService

logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("spectrum", help="power spectrum, peaks and line split of a trace")
    parser.add_argument("trace", help="trace CSV written by 'simulate'")
    add_common_arguments(parser)
    parser.add_argument("--band", nargs=2, type=float, metavar=("LOW", "HIGH"), help="split search band (Hz)")
    parser.add_argument("--outcome", type=int, choices=[0, 1, 2], help="Fourier outcome x to analyse")
    parser.add_argument("--window", choices=[w.value for w in WindowKind], help="FFT window")
    parser.add_argument("--threshold", type=float, help="peak threshold, multiple of the median power")
    parser.add_argument("--plot-data", action="store_true", help="also write the spectrum as an x/y series")
    parser.set_defaults(handler=run, action="analyse spectrum")


def _trace_config(echo: Dict[str, Any]) -> Optional[TraceConfig]:
    if not echo:
        return None
    try:
        return TraceConfig.model_validate(echo)
    except ValidationError:
        logger.warning("Trace sidecar config is not readable; expected line positions skipped")
        return None


def run(args: argparse.Namespace) -> int:
    config = resolve(args)
    section = config.spectra
    outcome = section.outcome if args.outcome is None else args.outcome
    window = WindowKind(args.window) if args.window else section.window
    band = tuple(args.band) if args.band else section.band
    threshold = args.threshold if args.threshold is not None else section.threshold

    trace = StorageService.read_trace(args.trace)
    spec = SpectraService.fft_power(trace, outcome, window)
    peaks = SpectraService.find_peaks(spec, threshold)
    split = SpectraService.measure_split(spec, band, peaks) if band else None
    spec = spec.model_copy(update={"peaks": peaks, "split": split})

    directory = output_dir(config)
    write_resolved(config, directory)
    path = StorageService.write_spectrum(spec, directory / "spectrum.csv")
    result: Dict[str, Any] = {
        "outcome": outcome,
        "window": window.value,
        "resolution_hz": spec.resolution,
        "peaks": [{"frequency": p.frequency, "centroid": p.centroid, "power": p.power} for p in peaks],
        "outputs": {"spectrum": str(path)},
    }
    if split is not None:
        result["split"] = {
            "verdict": split.verdict,
            "resolvable": split.resolvable,
            "delta_f_hz": split.delta_f,
            "bins_apart": split.bins_apart,
        }

    source = _trace_config(trace.config)
    if source is not None:
        lines = SpectraService.expected_lines(
            source.spacetime, source.clocks, source.protocol.ghz_n, spec.sample_rate
        )
        result["expected_lines"] = [line.model_dump() for line in lines]

    if args.plot_data:
        result["outputs"]["plot"] = str(
            StorageService.write_plot_series(
                directory / "spectrum_plot.csv", spec.frequencies, spec.power, ["freq_hz", "power"]
            )
        )

    emit(result)
    return 0
