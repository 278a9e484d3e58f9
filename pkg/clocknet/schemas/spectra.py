from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class WindowKind(str, Enum):
    NONE = "None"
    HANN = "Hann"


class Peak(BaseModel):
    index: int = Field(..., description="FFT bin of the local maximum")
    frequency: float = Field(..., description="Bin frequency (Hz)")
    power: float
    centroid: float = Field(..., description="Parabolic 3-bin interpolated frequency (Hz)")


class SplitResult(BaseModel):
    band: Tuple[float, float]
    resolvable: bool
    verdict: str
    delta_f: Optional[float] = Field(None, description="Centroid distance of the two dominant peaks (Hz)")
    peaks: List[Peak] = Field(default_factory=list)
    bins_apart: Optional[int] = None
    dip_power: Optional[float] = None


class ExpectedLine(BaseModel):
    name: str
    frequency: float
    folded: float
    aliased: bool


class Spectrum(BaseModel):
    """One-sided power spectrum of the mean-subtracted estimate of one outcome."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    frequencies: np.ndarray
    power: np.ndarray
    window: WindowKind = WindowKind.NONE
    outcome: int = 0
    sample_rate: float
    resolution: float = Field(..., description="Bin width 1/T (Hz)")
    peaks: List[Peak] = Field(default_factory=list)
    split: Optional[SplitResult] = None

    @property
    def n_bins(self) -> int:
        return len(self.frequencies)
