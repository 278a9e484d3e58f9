from typing import Optional

from pydantic import BaseModel, Field


class MeasurementRecord(BaseModel):
    """Outcome of one projective measurement."""

    target: str = Field(..., description="Measured site index or projector-set name")
    outcome: str
    outcome_index: int
    probability: float = Field(..., ge=0.0, le=1.0, description="Born weight before collapse")
    draw: Optional[float] = Field(None, description="Uniform variate used for sampling; None when forced")
    forced: bool = False
