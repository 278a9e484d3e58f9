"""
Proper times, clock phases and beat notes for static nodes in a
spherically symmetric field.

Rates are handled through their deficits ``1 - dtau/dt`` (~1e-9 at Earth's
surface). The beat notes are differences of deficits and the curvature split is
a second difference (~3e-17), so every quantity below is formed from deficits
directly and never from rates close to one.
"""

import logging
import math
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from clocknet.core.errors import DomainError
from clocknet.schemas.spacetime import (
    BeatFrequencies,
    ClockSpec,
    CubicFit,
    CurvatureSplit,
    GhzEffective,
    MetricMode,
    PhaseSet,
    SpacetimeConfig,
    WallTime,
    overlap_phases,
)

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
SPACING_TOLERANCE = 1e-9


class SpacetimeService:

    @staticmethod
    def proper_time_deficit(cfg: SpacetimeConfig, node: int) -> float:
        """1 - dtau/dt for a static node."""
        if node < 0 or node >= len(cfg.elevations):
            raise DomainError(f"node {node} out of range for {len(cfg.elevations)} nodes")

        radius = cfg.radius_ref + cfg.elevations[node]
        if radius <= 0.0:
            raise DomainError(f"node {node} sits at non-positive radius {radius} m")
        potential = cfg.gm / (radius * cfg.light_speed ** 2)

        if cfg.metric_mode == MetricMode.WEAK_FIELD:
            return potential

        x = 2.0 * potential
        if x >= 1.0:
            raise DomainError(
                f"node {node} at r={radius} m is inside the horizon (2GM/rc^2 = {x:.3g})"
            )
        # 1 - sqrt(1 - x) without cancellation
        return x / (1.0 + math.sqrt(1.0 - x))

    @staticmethod
    def proper_time_rate(cfg: SpacetimeConfig, node: int) -> float:
        """dtau/dt at the node: sqrt(1 - 2GM/rc^2) (Exact) or 1 - GM/rc^2 (WeakField)."""
        return 1.0 - SpacetimeService.proper_time_deficit(cfg, node)

    @staticmethod
    def deficits(cfg: SpacetimeConfig) -> List[float]:
        return [SpacetimeService.proper_time_deficit(cfg, j) for j in range(len(cfg.elevations))]

    @staticmethod
    def phases_at(cfg: SpacetimeConfig, clocks: ClockSpec, t: float) -> PhaseSet:
        """Phases theta_j, phi_j of the evolved W state at coordinate time t.

        theta_j = 2*pi * clock_freq * tau_j, so a higher node (faster proper time)
        leads: theta_2 - theta_1 > 0 for increasing elevation.
        """
        if t < 0:
            raise DomainError(f"coordinate time must be non-negative, got {t}")

        deficits = SpacetimeService.deficits(cfg)
        taus = [(1.0 - dj) * t for dj in deficits]

        theta = tuple(TWO_PI * clocks.clock_freq * tau for tau in taus)
        phi = tuple(
            TWO_PI * clocks.ground_freq * t * (deficits[j] - deficits[0])
            for j in range(1, len(deficits))
        )

        # clock_freq * t can exceed 2**53 cycles; take its fractional part exactly
        common_cycles = Fraction(clocks.clock_freq) * Fraction(t)
        common_frac = float(common_cycles - math.floor(common_cycles))
        theta_reduced = tuple(
            TWO_PI * ((common_frac - math.fmod(clocks.clock_freq * t * dj, 1.0)) % 1.0)
            for dj in deficits
        )
        phi_reduced = tuple(p % TWO_PI for p in phi)

        return PhaseSet(
            coordinate_time=t,
            theta=theta,
            phi=phi,
            theta_reduced=theta_reduced,
            phi_reduced=phi_reduced,
            lambda_ij=overlap_phases(theta_reduced),
        )

    @staticmethod
    def laser_frame_phases(
        cfg: SpacetimeConfig, clocks: ClockSpec, times: np.ndarray
    ) -> Tuple[np.ndarray, np.ndarray]:
        """Vectorised phases in the frame of the Node-1 interrogation laser.

        Returns ``(theta, phi)`` with shapes (len(times), nodes) and
        (len(times), nodes - 1). theta_j here is theta_j - 2*pi*clock_freq*t, a
        shift common to all nodes; phase differences are identical to
        :meth:`phases_at`.
        """
        times = np.asarray(times, dtype=float)
        deficits = np.asarray(SpacetimeService.deficits(cfg))
        cycles = np.multiply.outer(clocks.clock_freq * times, deficits)
        theta = TWO_PI * np.mod(-cycles, 1.0)
        phi = TWO_PI * clocks.ground_freq * np.multiply.outer(times, deficits[1:] - deficits[0])
        return theta, phi

    @staticmethod
    def beat_frequencies(cfg: SpacetimeConfig, clocks: ClockSpec) -> BeatFrequencies:
        """Angular beat notes between node pairs, positive for increasing elevation."""
        if len(cfg.elevations) != 3:
            raise DomainError(f"beat frequencies need exactly 3 nodes, got {len(cfg.elevations)}")

        d1, d2, d3 = SpacetimeService.deficits(cfg)
        omega0 = TWO_PI * clocks.clock_freq
        omega12 = omega0 * (d1 - d2)
        omega23 = omega0 * (d2 - d3)
        return BeatFrequencies(omega12=omega12, omega23=omega23, omega13=omega12 + omega23)

    @staticmethod
    def node_spacing(cfg: SpacetimeConfig) -> float:
        """Common spacing d of nodes placed at d_j = d_0 + j*d."""
        e = cfg.elevations
        if len(e) != 3:
            raise DomainError("curvature split needs exactly 3 nodes")
        lower, upper = e[1] - e[0], e[2] - e[1]
        if abs(upper - lower) > SPACING_TOLERANCE * max(1.0, abs(lower)):
            raise DomainError(
                f"curvature split series assumes equal spacing; got {lower} m and {upper} m "
                "(the exact difference is available from beat_frequencies)"
            )
        return lower

    @staticmethod
    def _second_difference(cfg: SpacetimeConfig) -> float:
        """deficit_1 - 2 deficit_2 + deficit_3."""
        if cfg.metric_mode == MetricMode.WEAK_FIELD:
            r1, r2, r3 = (cfg.radius_ref + e for e in cfg.elevations)
            spacing = SpacetimeService.node_spacing(cfg)
            # 1/r1 - 2/r2 + 1/r3 = 2 d^2 / (r1 r2 r3) for equal spacing
            return cfg.gm / cfg.light_speed ** 2 * 2.0 * spacing ** 2 / (r1 * r2 * r3)
        d1, d2, d3 = SpacetimeService.deficits(cfg)
        return (d1 - d2) - (d2 - d3)

    @staticmethod
    def curvature_split(cfg: SpacetimeConfig, clocks: ClockSpec) -> CurvatureSplit:
        """omega12 - omega23 exactly and to leading order in d/R."""
        spacing = SpacetimeService.node_spacing(cfg)
        omega0 = TWO_PI * clocks.clock_freq
        radius = cfg.radius_ref + cfg.elevations[0]

        exact = omega0 * SpacetimeService._second_difference(cfg)
        leading = 2.0 * omega0 * cfg.gm * spacing ** 2 / (cfg.light_speed ** 2 * radius ** 3)
        return CurvatureSplit(exact=exact, leading_order=leading, residual=exact - leading, spacing=spacing)

    @staticmethod
    def linear_potential_split(cfg: SpacetimeConfig, clocks: ClockSpec) -> float:
        """Split a homogeneous field (dtau = g h t / c^2) would produce; zero for equal spacing."""
        e = cfg.elevations
        g = cfg.gm / (cfg.radius_ref + e[0]) ** 2
        omega0 = TWO_PI * clocks.clock_freq
        return omega0 * g / cfg.light_speed ** 2 * ((e[1] - e[0]) - (e[2] - e[1]))

    @staticmethod
    def required_wall_time(cfg: SpacetimeConfig, clocks: ClockSpec, ghz_n: int = 1) -> WallTime:
        """Wall time needed to resolve the split, optionally for N-atom GHZ super-atoms."""
        split = SpacetimeService.curvature_split(cfg, clocks).leading_order * ghz_n
        if split == 0.0:
            raise DomainError("curvature split is zero (flat spacetime or zero spacing); wall time is unbounded")
        return WallTime(inverse_split=1.0 / split, fft_resolution=TWO_PI / split, ghz_n=ghz_n)

    @staticmethod
    def fitted_cubic_coefficient(
        cfg: SpacetimeConfig, clocks: ClockSpec, spacings: Sequence[float] = (500.0, 1000.0, 2000.0, 4000.0)
    ) -> CubicFit:
        """Fit the cubic coefficient k in residual ~ k * omega0 GM d^3 / (c^2 R^4)."""
        if cfg.gm <= 0.0:
            raise DomainError("the cubic coefficient is undefined without a gravitating mass")
        omega0 = TWO_PI * clocks.clock_freq
        radius = cfg.radius_ref
        scaled = []
        for d in spacings:
            trial = cfg.model_copy(update={"elevations": [0.0, d, 2.0 * d]})
            residual = SpacetimeService.curvature_split(trial, clocks).residual
            unit = omega0 * cfg.gm * d ** 3 / (cfg.light_speed ** 2 * radius ** 4)
            scaled.append(residual / unit)

        # normalized residual = k + O(d/R); the intercept is the cubic coefficient
        u = np.asarray(spacings) / radius
        slope, intercept = np.polyfit(u, np.asarray(scaled), 1)
        logger.debug("cubic fit: intercept=%.6f slope=%.3f", intercept, slope)
        return CubicFit(coefficient=float(intercept), spacings=list(spacings), normalized_residuals=scaled)

    @staticmethod
    def ghz_effective(
        cfg: SpacetimeConfig, clocks: ClockSpec, ghz_n: int, t2: Optional[float] = None
    ) -> GhzEffective:
        """Beat notes, split and wall time of N-atom super-atoms (all phases x N)."""
        beats = SpacetimeService.beat_frequencies(cfg, clocks)
        split = SpacetimeService.curvature_split(cfg, clocks)
        return GhzEffective(
            ghz_n=ghz_n,
            beats=BeatFrequencies(
                omega12=beats.omega12 * ghz_n,
                omega23=beats.omega23 * ghz_n,
                omega13=beats.omega13 * ghz_n,
            ),
            split=CurvatureSplit(
                exact=split.exact * ghz_n,
                leading_order=split.leading_order * ghz_n,
                residual=split.residual * ghz_n,
                spacing=split.spacing,
            ),
            wall_time=SpacetimeService.required_wall_time(cfg, clocks, ghz_n),
            effective_t2=None if t2 is None else t2 / ghz_n,
        )
