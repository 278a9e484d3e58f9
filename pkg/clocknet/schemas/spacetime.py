import cmath
import math
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

# CODATA / IAU values for Earth
EARTH_GM = 3.986004418e14
EARTH_RADIUS = 6.371e6
LIGHT_SPEED = 299792458.0


class MetricMode(str, Enum):
    EXACT = "Exact"
    WEAK_FIELD = "WeakField"


class SpacetimeConfig(BaseModel):
    """Static nodes above a spherically symmetric body."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    gm: float = Field(EARTH_GM, ge=0.0, description="Gravitational parameter GM (m^3/s^2)")
    radius_ref: float = Field(EARTH_RADIUS, gt=0.0, description="Reference radius R (m)")
    light_speed: float = Field(LIGHT_SPEED, gt=0.0, description="Speed of light c (m/s)")
    elevations: List[float] = Field(
        default_factory=lambda: [0.0, 1000.0, 2000.0],
        description="Node heights d_j above the reference radius (m); index order is authoritative",
    )
    metric_mode: MetricMode = MetricMode.EXACT

    @field_validator("elevations")
    @classmethod
    def at_least_three_nodes(cls, v: List[float]) -> List[float]:
        if len(v) < 3:
            raise ValueError("at least three node elevations are required")
        return v

    @classmethod
    def equally_spaced(cls, spacing: float, **kwargs) -> "SpacetimeConfig":
        return cls(elevations=[0.0, spacing, 2.0 * spacing], **kwargs)


class ClockSpec(BaseModel):
    """Clock energy scales expressed as frequencies (E/h)."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    clock_freq: float = Field(5.2e14, gt=0.0, description="(E_b - E_a)/h, clock transition (Hz)")
    metastable_freq: float = Field(1.0e5, ge=0.0, description="E_m/h, nuclear qubit splitting (Hz)")
    # (E_g - E_a)/h = ground_sign * metastable_freq
    ground_sign: float = Field(-1.0, description="Sign of (E_g - E_a); 0 switches the phi phases off")

    @property
    def ground_freq(self) -> float:
        return self.ground_sign * self.metastable_freq


PAIRS: Tuple[Tuple[int, int], ...] = ((0, 1), (0, 2), (1, 2))
PAIR_KEYS: Tuple[str, ...] = ("12", "13", "23")


def wrap_angle(angle: float) -> float:
    """Angle in (-pi, pi]."""
    wrapped = math.remainder(angle, 2.0 * math.pi)
    return math.pi if wrapped == -math.pi else wrapped


def clock_overlap(theta_i: float, theta_j: float) -> Tuple[float, float]:
    """<c(tau_i)|c(tau_j)> = |.| exp(-i lambda_ij); returns (magnitude, lambda_ij)."""
    overlap = (1.0 + cmath.exp(-1j * (theta_j - theta_i))) / 2.0
    magnitude = abs(overlap)
    if magnitude < 1e-15:
        return 0.0, 0.0
    return float(magnitude), wrap_angle(-cmath.phase(overlap))


def overlap_phases(theta: Tuple[float, ...]) -> Dict[str, float]:
    return {key: clock_overlap(theta[i], theta[j])[1] for key, (i, j) in zip(PAIR_KEYS, PAIRS)}


class PhaseSet(BaseModel):
    """Evolved node phases at one coordinate time.

    ``theta`` and ``phi`` are accumulated (unreduced) phases. ``theta_reduced`` and
    ``phi_reduced`` are the same phases reduced into [0, 2*pi); the reduction is
    exact even when the accumulated value exceeds double precision.
    ``lambda_ij`` is the clock-overlap phase for the pairs (1,2), (1,3), (2,3)
    in (-pi, pi].
    """

    model_config = ConfigDict(frozen=True)

    coordinate_time: float
    theta: Tuple[float, ...]
    phi: Tuple[float, ...]
    theta_reduced: Tuple[float, ...]
    phi_reduced: Tuple[float, ...]
    lambda_ij: Dict[str, float]

    @classmethod
    def from_reduced(cls, theta: List[float], phi: List[float], t: float = 0.0) -> "PhaseSet":
        """Build a phase set directly from phase values (tests, random phase tuples)."""
        theta_r = tuple(float(x) % (2.0 * math.pi) for x in theta)
        phi_r = tuple(float(x) % (2.0 * math.pi) for x in phi)
        return cls(
            coordinate_time=t,
            theta=tuple(float(x) for x in theta),
            phi=tuple(float(x) for x in phi),
            theta_reduced=theta_r,
            phi_reduced=phi_r,
            lambda_ij=overlap_phases(theta_r),
        )


class BeatFrequencies(BaseModel):
    """Angular beat frequencies (rad/s)."""

    omega12: float
    omega23: float
    omega13: float

    def in_hz(self) -> Dict[str, float]:
        two_pi = 2.0 * math.pi
        return {
            "f12": self.omega12 / two_pi,
            "f23": self.omega23 / two_pi,
            "f13": self.omega13 / two_pi,
        }


class CurvatureSplit(BaseModel):
    """Curvature split omega12 - omega23 (rad/s)."""

    exact: float
    leading_order: float
    residual: float
    spacing: float


class WallTime(BaseModel):
    inverse_split: float = Field(..., description="1/Delta omega (s)")
    fft_resolution: float = Field(..., description="2*pi/Delta omega = 1/Delta f (s)")
    ghz_n: int = 1


class CubicFit(BaseModel):
    coefficient: float
    quoted_coefficient: float = 5.0
    series_coefficient: float = -6.0
    spacings: List[float]
    normalized_residuals: List[float]


class GhzEffective(BaseModel):
    ghz_n: int
    beats: BeatFrequencies
    split: CurvatureSplit
    wall_time: WallTime
    effective_t2: Optional[float] = None
