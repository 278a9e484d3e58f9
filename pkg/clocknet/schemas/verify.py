from typing import List, Optional

from pydantic import BaseModel, Field


class CheckResult(BaseModel):
    name: str
    passed: bool
    value: Optional[float] = Field(None, description="Worst observed deviation")
    tolerance: Optional[float] = None
    detail: str = ""


class VerifyReport(BaseModel):
    checks: List[CheckResult] = Field(default_factory=list)
    seed: int = 0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed]
