from typing import Dict, List, Optional

from pydantic import BaseModel, Field, field_validator

SUBSET_KEYS = ("123", "12", "13", "23", "1", "2", "3")


class BornReport(BaseModel):
    """Seven sub-experiment tables (per Fourier outcome x) and I123 = P123 - P12 - P13 - P23 + P1 + P2 + P3."""

    probabilities: Dict[str, List[float]] = Field(..., description="Subset key -> P(x) for x = 0, 1, 2")
    errors: Dict[str, List[float]] = Field(default_factory=dict)
    i123: List[float]
    i123_error: List[float]
    shots: int = Field(0, ge=0, description="Shots per sub-experiment; 0 for exact mode")
    seed: Optional[int] = None
    injected: float = Field(0.0, description="Synthetic three-way term added to P123 after the Born rule")

    @field_validator("probabilities")
    @classmethod
    def in_unit_interval(cls, v: Dict[str, List[float]]) -> Dict[str, List[float]]:
        for key, values in v.items():
            for p in values:
                if not -1e-12 <= p <= 1.0 + 1e-12:
                    raise ValueError(f"P{key} = {p} outside [0, 1]")
        return v

    def consistent_with_zero(self, sigmas: float = 5.0) -> bool:
        return all(abs(i) <= sigmas * e + 1e-12 for i, e in zip(self.i123, self.i123_error))


class LinearityReport(BaseModel):
    entangled: List[float] = Field(..., description="Entangled-protocol P(x), x = 0, 1, 2")
    conditional: Optional[List[float]] = Field(None, description="Product-state P(x | single-excitation Fourier outcome)")
    success_probability: float = Field(..., ge=0.0, le=1.0)
    sector_weights: Dict[int, float] = Field(default_factory=dict, description="Excitation number -> weight")
    total_variation: Optional[float] = None
    total_variation_error: Optional[float] = None
    shots: int = 0
    successes: Optional[int] = None
    seed: Optional[int] = None

    @property
    def defined(self) -> bool:
        return self.conditional is not None
