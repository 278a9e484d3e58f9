from enum import Enum
from typing import Any, Dict

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from clocknet.schemas.protocol import NoiseConfig, ProtocolConfig
from clocknet.schemas.spacetime import ClockSpec, SpacetimeConfig

POINT_COUNT_TOLERANCE = 1e-9


def check_point_count(sample_rate: float, total_time: float) -> None:
    points = sample_rate * total_time
    if abs(points - round(points)) > POINT_COUNT_TOLERANCE * max(1.0, points) or round(points) < 1:
        raise ValueError(f"sample_rate * total_time must be a positive integer point count, got {points}")


class SamplerKind(str, Enum):
    CIRCUIT_SHOTS = "CircuitShots"
    ANALYTIC_BERNOULLI = "AnalyticBernoulli"
    EXACT_EXPECTATION = "ExactExpectation"


class TraceConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    sample_rate: float = Field(500.0, gt=0.0, description="Sampling rate f_s (Hz)")
    total_time: float = Field(500.0, gt=0.0, description="Wall time T (s)")
    shots_per_point: int = Field(100, ge=1, description="Shots M averaged into each point")
    sampler: SamplerKind = SamplerKind.ANALYTIC_BERNOULLI
    master_seed: int = Field(0, ge=0)
    noise: NoiseConfig = Field(default_factory=NoiseConfig)
    protocol: ProtocolConfig = Field(default_factory=ProtocolConfig)
    spacetime: SpacetimeConfig = Field(default_factory=SpacetimeConfig)
    clocks: ClockSpec = Field(default_factory=ClockSpec)

    @model_validator(mode="after")
    def integer_point_count(self) -> "TraceConfig":
        check_point_count(self.sample_rate, self.total_time)
        return self

    @property
    def n_points(self) -> int:
        return int(round(self.sample_rate * self.total_time))

    @property
    def total_shots(self) -> int:
        return self.n_points * self.shots_per_point

    def times(self) -> np.ndarray:
        """t_k = k / f_s for k = 0 .. n_points - 1."""
        return np.arange(self.n_points, dtype=float) / self.sample_rate


class SignalTrace(BaseModel):
    """Per-point outcome fractions; columns of ``fractions`` are (x=0, x=1, x=2, null)."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    times: np.ndarray
    fractions: np.ndarray
    p_plus: np.ndarray
    shots: int = Field(..., ge=0, description="Shots per point; 0 for expectation traces")
    seed: int = 0
    config: Dict[str, Any] = Field(default_factory=dict, description="Echo of the generating config")

    @model_validator(mode="after")
    def shapes_agree(self) -> "SignalTrace":
        n = len(self.times)
        if self.fractions.shape != (n, 4):
            raise ValueError(f"fractions must have shape ({n}, 4), got {self.fractions.shape}")
        if self.p_plus.shape != (n,):
            raise ValueError(f"p_plus must have shape ({n},), got {self.p_plus.shape}")
        return self

    @property
    def n_points(self) -> int:
        return len(self.times)

    @property
    def null_rate(self) -> np.ndarray:
        return self.fractions[:, 3]

    def estimate(self, x: int) -> np.ndarray:
        if x not in (0, 1, 2):
            raise ValueError(f"Fourier outcome must be 0, 1 or 2, got {x}")
        return self.fractions[:, x]

    @property
    def sample_rate(self) -> float:
        if self.n_points < 2:
            return 0.0
        return 1.0 / float(self.times[1] - self.times[0])
