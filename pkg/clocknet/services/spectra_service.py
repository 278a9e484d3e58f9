"""
Power spectra of sampled clock signals, beat-note peaks and the line split.
"""

import logging
from typing import List, Optional, Tuple

import numpy as np
from scipy import fft, signal

from clocknet.core.config import settings
from clocknet.core.errors import DomainError
from clocknet.schemas.spacetime import ClockSpec, SpacetimeConfig
from clocknet.schemas.spectra import ExpectedLine, Peak, Spectrum, SplitResult, WindowKind
from clocknet.schemas.trace import SignalTrace
from clocknet.services.spacetime_service import SpacetimeService

logger = logging.getLogger(__name__)

GRID_TOLERANCE = 1e-9
MIN_SPLIT_BINS = 2
# weaker split partner relative to the stronger one; rejects window sidelobes
SPLIT_PARTNER_FLOOR = 0.1


class SpectraService:

    @staticmethod
    def fft_power(trace: SignalTrace, x: int = 0, window: WindowKind = WindowKind.NONE) -> Spectrum:
        """One-sided power of the mean-subtracted estimate of Pi_x.

        Normalised so that the bins sum to the mean square of the (windowed,
        mean-subtracted) signal divided by the window's mean square.
        """
        times = np.asarray(trace.times, dtype=float)
        n = len(times)
        if n < 2:
            raise DomainError(f"a spectrum needs at least two samples, got {n}")
        steps = np.diff(times)
        step = float(steps[0])
        if step <= 0.0 or np.max(np.abs(steps - step)) > GRID_TOLERANCE * max(step, abs(times[-1])):
            raise DomainError("trace time grid is not uniform")

        values = trace.estimate(x) - np.mean(trace.estimate(x))
        if window == WindowKind.HANN:
            taper = signal.windows.hann(n, sym=False)
        else:
            taper = np.ones(n)

        coefficients = fft.rfft(values * taper)
        power = np.abs(coefficients) ** 2 / (n ** 2 * np.mean(taper ** 2))
        # fold negative frequencies onto the one-sided grid
        if n % 2 == 0:
            power[1:-1] *= 2.0
        else:
            power[1:] *= 2.0

        sample_rate = 1.0 / step
        return Spectrum(
            frequencies=fft.rfftfreq(n, d=step),
            power=power,
            window=window,
            outcome=x,
            sample_rate=sample_rate,
            resolution=sample_rate / n,
        )

    @staticmethod
    def find_peaks(
        spec: Spectrum,
        threshold: Optional[float] = None,
        relative_floor: Optional[float] = None,
    ) -> List[Peak]:
        """Local maxima above the detection level, sorted by frequency.

        The level is the larger of ``threshold`` x median power and
        ``relative_floor`` x the strongest bin (DC excluded from both). The floor
        keeps window sidelobes of a strong line from counting as peaks when the
        median is near zero (noiseless traces); pass 0 to use the median test alone.
        """
        threshold = settings.peak_threshold if threshold is None else threshold
        relative_floor = settings.peak_relative_floor if relative_floor is None else relative_floor
        if threshold <= 0:
            raise ValueError(f"peak threshold must be positive, got {threshold}")

        power = np.asarray(spec.power, dtype=float)
        if len(power) < 2:
            return []
        body = power[1:]
        level = max(threshold * float(np.median(body)), relative_floor * float(np.max(body)))
        if level <= 0.0:
            return []

        indices, _ = signal.find_peaks(body, height=level)
        peaks = []
        for i in indices + 1:
            peaks.append(
                Peak(
                    index=int(i),
                    frequency=float(spec.frequencies[i]),
                    power=float(power[i]),
                    centroid=SpectraService._centroid(spec, int(i)),
                )
            )
        return peaks

    @staticmethod
    def _centroid(spec: Spectrum, i: int) -> float:
        power = spec.power
        if i <= 0 or i >= len(power) - 1:
            return float(spec.frequencies[i])
        left, mid, right = power[i - 1], power[i], power[i + 1]
        curvature = left - 2.0 * mid + right
        if curvature >= 0.0:
            return float(spec.frequencies[i])
        offset = 0.5 * (left - right) / curvature
        return float(spec.frequencies[i] + offset * spec.resolution)

    @staticmethod
    def measure_split(
        spec: Spectrum,
        band: Tuple[float, float],
        peaks: Optional[List[Peak]] = None,
    ) -> SplitResult:
        """Split between the two dominant in-band peaks with a Rayleigh-style dip test."""
        low, high = sorted(band)
        peaks = SpectraService.find_peaks(spec) if peaks is None else peaks
        in_band = [p for p in peaks if low <= p.frequency <= high]
        if not in_band:
            return SplitResult(band=(low, high), resolvable=False, verdict="no peak in band")

        strongest = max(p.power for p in in_band)
        partners = sorted(
            (p for p in in_band if p.power >= SPLIT_PARTNER_FLOOR * strongest),
            key=lambda p: p.power,
            reverse=True,
        )
        if len(partners) < 2:
            return SplitResult(band=(low, high), resolvable=False, verdict="unresolved", peaks=partners[:1])

        pair = sorted(partners[:2], key=lambda p: p.frequency)
        bins_apart = pair[1].index - pair[0].index
        dip = float(np.min(spec.power[pair[0].index:pair[1].index + 1]))
        resolvable = bins_apart >= MIN_SPLIT_BINS and dip < min(pair[0].power, pair[1].power)
        return SplitResult(
            band=(low, high),
            resolvable=resolvable,
            verdict="resolved" if resolvable else "unresolved",
            delta_f=pair[1].centroid - pair[0].centroid if resolvable else None,
            peaks=pair,
            bins_apart=bins_apart,
            dip_power=dip,
        )

    @staticmethod
    def fold_frequency(frequency: float, sample_rate: float) -> Tuple[float, bool]:
        """Apparent frequency of a tone sampled at ``sample_rate``; flags aliasing."""
        if sample_rate <= 0:
            raise ValueError(f"sample rate must be positive, got {sample_rate}")
        f = abs(frequency) % sample_rate
        folded = sample_rate - f if f > sample_rate / 2.0 else f
        return folded, abs(frequency) > sample_rate / 2.0

    @staticmethod
    def expected_lines(
        spacetime: SpacetimeConfig, clocks: ClockSpec, ghz_n: int, sample_rate: float
    ) -> List[ExpectedLine]:
        """Beat notes (x N) and where they land after sampling."""
        beats = SpacetimeService.beat_frequencies(spacetime, clocks).in_hz()
        lines = []
        for name, f in beats.items():
            folded, aliased = SpectraService.fold_frequency(f * ghz_n, sample_rate)
            if aliased:
                logger.warning("%s = %.4f Hz lies above Nyquist; appears at %.4f Hz", name, f * ghz_n, folded)
            lines.append(ExpectedLine(name=name, frequency=abs(f) * ghz_n, folded=folded, aliased=aliased))
        return lines

    @staticmethod
    def total_power(spec: Spectrum) -> float:
        return float(np.sum(spec.power))
