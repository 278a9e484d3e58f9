from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

CIRCUIT_GHZ_LIMIT = 6


class NetworkMode(str, Enum):
    LOGICAL = "Logical"
    FULL_NETWORK = "FullNetwork"


class GhzPath(str, Enum):
    CIRCUIT = "Circuit"
    FAST_PHASE = "FastPhase"


class MeasurementRealization(str, Enum):
    DIRECT_PROJECTOR = "DirectProjector"
    QFT_CIRCUIT = "QFTCircuit"


class ProtocolConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    mode: NetworkMode = NetworkMode.LOGICAL
    ghz_n: int = Field(1, ge=1, description="Atoms per node forming one GHZ super-atom")
    ghz_path: GhzPath = GhzPath.FAST_PHASE
    measurement: MeasurementRealization = MeasurementRealization.DIRECT_PROJECTOR

    @model_validator(mode="after")
    def circuit_ghz_is_desk_scale(self) -> "ProtocolConfig":
        if self.ghz_path == GhzPath.CIRCUIT and self.ghz_n > CIRCUIT_GHZ_LIMIT:
            raise ValueError(
                f"ghz_path=Circuit supports ghz_n <= {CIRCUIT_GHZ_LIMIT}; use FastPhase for N={self.ghz_n}"
            )
        return self


class NoiseConfig(BaseModel):
    """Per-shot noise knobs; everything defaults off."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    t2: Optional[float] = Field(None, gt=0.0, description="Single-atom clock ({ab}) dephasing time (s)")
    ga_t2: Optional[float] = Field(None, gt=0.0, description="Single-atom {ga} dephasing time (s)")
    leakage_rate: float = Field(0.0, ge=0.0, le=1.0, description="Per-shot probability of a |g>->|a> jump")
    bell_phase_sigma: float = Field(0.0, ge=0.0, description="Std of a random phase on each Bell pair (rad)")

    @property
    def enabled(self) -> bool:
        return self.t2 is not None or self.ga_t2 is not None or self.leakage_rate > 0.0


class NoiseDraw(BaseModel):
    """Noise realisation of one shot."""

    ab: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    ga: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    leak_node: Optional[int] = None


class TeleportLog(BaseModel):
    outcomes: List[Tuple[str, str]] = Field(default_factory=list)
    corrections: List[str] = Field(default_factory=list)


class ShotOutcome(BaseModel):
    branch: str = Field(..., description="'+' or '-' global clock readout branch")
    outcome: Optional[int] = Field(None, description="Fourier outcome x, None for the null outcome")
    corrections: List[str] = Field(default_factory=list)
    noise: NoiseDraw = Field(default_factory=NoiseDraw)

    @property
    def is_null(self) -> bool:
        return self.outcome is None
