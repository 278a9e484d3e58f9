from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from clocknet.schemas.protocol import NoiseConfig, ProtocolConfig
from clocknet.schemas.spacetime import ClockSpec, SpacetimeConfig
from clocknet.schemas.spectra import WindowKind
from clocknet.schemas.trace import SamplerKind, TraceConfig, check_point_count


class TraceSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    sample_rate: float = Field(500.0, gt=0.0)
    total_time: float = Field(500.0, gt=0.0)
    shots_per_point: int = Field(100, ge=1)
    sampler: SamplerKind = SamplerKind.ANALYTIC_BERNOULLI
    noise: NoiseConfig = Field(default_factory=NoiseConfig)

    @model_validator(mode="after")
    def integer_point_count(self) -> "TraceSection":
        check_point_count(self.sample_rate, self.total_time)
        return self


class SpectraSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    outcome: int = Field(0, ge=0, le=2)
    window: WindowKind = WindowKind.NONE
    band: Optional[Tuple[float, float]] = Field(None, description="Band (Hz) searched for the line split")
    threshold: Optional[float] = Field(None, gt=0.0, description="Peak threshold, multiple of the median power")


class FoundationsSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    time: float = Field(1.0, ge=0.0, description="Coordinate time (s) whose phases the checks use")
    theta: Optional[List[float]] = Field(None, min_length=3, max_length=3)
    phi: Optional[List[float]] = Field(None, min_length=2, max_length=2)
    shots: int = Field(1_000_000, ge=0, description="Shots per sub-experiment; 0 for exact mode")
    inject: float = Field(0.0, description="Synthetic three-way term added to P123")


class ExperimentConfig(BaseModel):
    """Everything one command needs; unknown keys are rejected at every level."""

    model_config = ConfigDict(extra="forbid")

    preset: Optional[str] = None
    seed: int = Field(0, ge=0)
    output_dir: Optional[str] = None
    threads: Optional[int] = Field(None, ge=1)

    spacetime: SpacetimeConfig = Field(default_factory=SpacetimeConfig)
    clocks: ClockSpec = Field(default_factory=ClockSpec)
    protocol: ProtocolConfig = Field(default_factory=ProtocolConfig)
    trace: TraceSection = Field(default_factory=TraceSection)
    spectra: SpectraSection = Field(default_factory=SpectraSection)
    foundations: FoundationsSection = Field(default_factory=FoundationsSection)

    def to_trace_config(self) -> TraceConfig:
        return TraceConfig(
            sample_rate=self.trace.sample_rate,
            total_time=self.trace.total_time,
            shots_per_point=self.trace.shots_per_point,
            sampler=self.trace.sampler,
            master_seed=self.seed,
            noise=self.trace.noise,
            protocol=self.protocol,
            spacetime=self.spacetime,
            clocks=self.clocks,
        )
