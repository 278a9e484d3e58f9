from typing import Dict, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from clocknet.schemas.spacetime import PAIR_KEYS, PhaseSet


class ObservableParams(BaseModel):
    """Readout inputs: phases, GHZ size and per-pair dephasing envelopes."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    theta: Tuple[float, float, float]
    phi: Tuple[float, float] = (0.0, 0.0)
    ghz_n: int = Field(1, ge=1)
    # Multiplies the clock-coherence (theta) interference term of each pair
    ab_envelopes: Dict[str, float] = Field(default_factory=lambda: {k: 1.0 for k in PAIR_KEYS})
    # Multiplies both interference terms of a pair ({ga} coherence dephasing)
    ga_envelopes: Dict[str, float] = Field(default_factory=lambda: {k: 1.0 for k in PAIR_KEYS})

    @field_validator("ab_envelopes", "ga_envelopes")
    @classmethod
    def envelopes_in_unit_interval(cls, v: Dict[str, float]) -> Dict[str, float]:
        missing = set(PAIR_KEYS) - set(v)
        if missing:
            raise ValueError(f"missing envelope pairs {sorted(missing)}")
        for key, value in v.items():
            if key not in PAIR_KEYS:
                raise ValueError(f"unknown pair {key!r}")
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"envelope {key}={value} outside [0, 1]")
        return v

    @classmethod
    def from_phases(
        cls,
        phases: PhaseSet,
        ghz_n: int = 1,
        ab_envelope: float = 1.0,
        ga_envelope: Optional[float] = None,
    ) -> "ObservableParams":
        return cls(
            theta=tuple(phases.theta_reduced[:3]),
            phi=tuple(phases.phi_reduced[:2]),
            ghz_n=ghz_n,
            ab_envelopes={k: ab_envelope for k in PAIR_KEYS},
            ga_envelopes={k: (1.0 if ga_envelope is None else ga_envelope) for k in PAIR_KEYS},
        )
