"""
Built-in acceptance suite: fast oracle checks of the simulator against the
closed forms and of the circuits against their contracts.
"""

import logging
import math
from typing import Callable, List, Tuple

import numpy as np

from clocknet.core.errors import ClockNetError
from clocknet.core.rng import make_generator
from clocknet.models.register import Register, SiteSpec
from clocknet.schemas.analytic import ObservableParams
from clocknet.schemas.protocol import ProtocolConfig
from clocknet.schemas.spacetime import ClockSpec, PhaseSet, SpacetimeConfig
from clocknet.schemas.verify import CheckResult, VerifyReport
from clocknet.services.analytic_service import AnalyticService
from clocknet.services.foundations_service import FoundationsService
from clocknet.services.protocol_service import ProtocolService
from clocknet.services.spacetime_service import SpacetimeService

logger = logging.getLogger(__name__)

VERIFY_STREAM = 0x7E51
QUBIT_BRANCHES = [(a, b) for a in "ga" for b in "ga"]
QUTRIT_BRANCHES = [(a, b, c, d) for a in "ga" for b in "ga" for c in "ga" for d in "ga"]


def _random_state(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def _random_phases(rng: np.random.Generator) -> PhaseSet:
    return PhaseSet.from_reduced(list(rng.uniform(0, 2 * math.pi, 3)), list(rng.uniform(0, 2 * math.pi, 2)))


def _remaining(reg: Register, keep: int) -> np.ndarray:
    """Amplitudes of site ``keep`` once every other site sits in a definite level."""
    index = []
    for site, spec in enumerate(reg.sites):
        if site == keep:
            index.append(slice(None))
            continue
        level = reg.definite_level(site, tolerance=1e-9)
        if level is None:
            raise ClockNetError(f"site {site} is still entangled after teleportation")
        index.append(spec.index(level))
    return reg.amplitudes[tuple(index)]


class VerifyService:

    @staticmethod
    def teleport_qubit_infidelity(psi: np.ndarray, force: Tuple[str, str]) -> float:
        sites = [SiteSpec.qubit("src"), SiteSpec.qubit("sender"), SiteSpec.qubit("dst")]
        amps = np.kron(np.kron(psi, [1, 0]), [1, 0])
        reg, pair = ProtocolService.prepare_bell(Register(sites, amps), 1, 2)
        reg, _ = ProtocolService.teleport_qubit(reg, 0, pair, 2, force=force)
        return 1.0 - abs(np.vdot(psi, _remaining(reg, 2))) ** 2

    @staticmethod
    def teleport_qutrit_infidelity(psi: np.ndarray, force: Tuple[str, str, str, str]) -> float:
        sites = [
            SiteSpec.qutrit("src"),
            SiteSpec.qubit("scratch"),
            SiteSpec.qubit("sender1"),
            SiteSpec.qutrit("dst"),
            SiteSpec.qubit("sender2"),
            SiteSpec.qubit("helper"),
        ]
        amps = psi
        for spec in sites[1:]:
            amps = np.kron(amps, np.eye(spec.dim)[0])
        reg = Register(sites, amps)
        reg, first = ProtocolService.prepare_bell(reg, 2, 3)
        reg, second = ProtocolService.prepare_bell(reg, 4, 5)
        reg, _ = ProtocolService.teleport_qutrit(reg, 0, (first, second), 3, 1, force=force)
        return 1.0 - abs(np.vdot(psi, _remaining(reg, 3))) ** 2

    @staticmethod
    def ghz_deviation(ghz_n: int, phases: PhaseSet) -> float:
        """Largest entry-wise gap between the GHZ circuit and N-multiplied single-atom evolution."""
        worst = 0.0
        for node in range(3):
            circuit = ProtocolService.ghz_node_operator(ghz_n, node, phases)
            fast = ProtocolService.fast_phase_node_operator(ghz_n, node, phases)
            worst = max(worst, float(np.max(np.abs(circuit[:, :2] - fast[:, :2]))))
        return worst

    @staticmethod
    def run(seed: int = 0, samples: int = 20) -> VerifyReport:
        rng = make_generator(seed, VERIFY_STREAM)
        checks: List[CheckResult] = []

        def check(name: str, tolerance: float, measure: Callable[[], float]) -> None:
            try:
                value = float(measure())
                passed = value < tolerance
                detail = "" if passed else f"deviation {value:.3g} exceeds {tolerance:g}"
            except ClockNetError as e:
                value, passed, detail = None, False, e.detail
            checks.append(CheckResult(name=name, passed=passed, value=value, tolerance=tolerance, detail=detail))
            logger.info("%-28s %s", name, "ok" if passed else f"FAILED {detail}")

        def oracle() -> float:
            worst = 0.0
            for _ in range(samples):
                phases = _random_phases(rng)
                circuit = ProtocolService.circuit_distribution(ProtocolConfig(), phases)[:3]
                closed = AnalyticService.pi_distribution(phases.theta_reduced, phases.phi_reduced)
                worst = max(worst, float(np.max(np.abs(circuit - closed))))
            return worst

        def completeness() -> float:
            theta = rng.uniform(0, 2 * math.pi, (1000, 3))
            phi = rng.uniform(0, 2 * math.pi, (1000, 2))
            ab = rng.uniform(0, 1, (1000, 3))
            ga = rng.uniform(0, 1, (1000, 3))
            total = AnalyticService.pi_distribution(theta, phi, ab, ga).sum(axis=-1)
            return float(np.max(np.abs(total - 1.0)))

        def teleport_qubit() -> float:
            return max(
                VerifyService.teleport_qubit_infidelity(_random_state(rng, 2), force)
                for _ in range(max(1, samples // 2))
                for force in QUBIT_BRANCHES
            )

        def teleport_qutrit() -> float:
            return max(
                VerifyService.teleport_qutrit_infidelity(_random_state(rng, 3), force)
                for _ in range(max(1, samples // 4))
                for force in QUTRIT_BRANCHES
            )

        def ghz() -> float:
            return max(VerifyService.ghz_deviation(n, _random_phases(rng)) for n in range(2, 5))

        def frequencies() -> float:
            cfg, clocks = SpacetimeConfig(), ClockSpec()
            split = SpacetimeService.curvature_split(cfg, clocks)
            return abs(split.exact - split.leading_order) / split.leading_order

        def beat_sum() -> float:
            cfg, clocks = SpacetimeConfig(), ClockSpec()
            beats = SpacetimeService.beat_frequencies(cfg, clocks)
            d1, _, d3 = SpacetimeService.deficits(cfg)
            direct = 2.0 * math.pi * clocks.clock_freq * (d1 - d3)
            return abs(beats.omega13 - direct) / abs(direct)

        def born() -> float:
            worst = 0.0
            for _ in range(max(1, samples // 4)):
                params = ObservableParams.from_phases(_random_phases(rng))
                report = FoundationsService.born_i123(params)
                worst = max(worst, max(abs(i) for i in report.i123))
            return worst

        def linearity() -> float:
            worst = 0.0
            for _ in range(max(1, samples // 4)):
                params = ObservableParams.from_phases(_random_phases(rng))
                report = FoundationsService.product_state_protocol(params)
                worst = max(worst, report.total_variation, abs(report.success_probability - 2.0 / 9.0))
            return worst

        check("oracle equivalence", 1e-10, oracle)
        check("projector completeness", 1e-12, completeness)
        check("qubit teleportation", 1e-12, teleport_qubit)
        check("qutrit teleportation", 1e-12, teleport_qutrit)
        check("GHZ phase multiplication", 1e-10, ghz)
        check("curvature split series", 1e-2, frequencies)
        check("beat note sum", 1e-9, beat_sum)
        check("third-order interference", 1e-12, born)
        check("product-state linearity", 1e-12, linearity)
        return VerifyReport(checks=checks, seed=seed)
