"""
Circuits of the distributed clock protocol.

Level conventions: qutrit levels (g, a, b); the W state lives in the {ga}
sector, the clock coherence in {ab}. Teleportation corrections and the
conditional global X are applied as gates, so the register always holds the
state the protocol describes.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from clocknet.core.errors import MeasurementError, ProtocolError
from clocknet.models.register import Register, SectorUnitary, SiteSpec
from clocknet.schemas.protocol import (
    GhzPath,
    MeasurementRealization,
    NetworkMode,
    NoiseConfig,
    NoiseDraw,
    ProtocolConfig,
    ShotOutcome,
    TeleportLog,
)
from clocknet.schemas.qsim import MeasurementRecord
from clocknet.schemas.spacetime import ClockSpec, PhaseSet, SpacetimeConfig
from clocknet.services.analytic_service import AnalyticService
from clocknet.services.qsim_service import NULL_OUTCOME, QSimService
from clocknet.services.spacetime_service import SpacetimeService

logger = logging.getLogger(__name__)

GA = ("g", "a")
AB = ("a", "b")
GB = ("g", "b")

W_ROTATION = 2.0 * math.acos(1.0 / math.sqrt(3.0))
LEAK_TOLERANCE = 1e-10


@dataclass
class BellPair:
    """Bell resource shared between ``sender`` and ``receiver``; single use."""

    sender: int
    receiver: int
    consumed: bool = False

    def consume(self) -> None:
        if self.consumed:
            raise ProtocolError(f"Bell pair ({self.sender}, {self.receiver}) was already consumed")
        self.consumed = True


@dataclass(frozen=True)
class NetworkLayout:
    sites: Tuple[SiteSpec, ...]
    science: Tuple[int, int, int]
    readout: Tuple[int, int, int]
    ancilla: int
    node1_bell: Optional[int] = None
    # remote node -> (first pair sender, second pair sender, scratch)
    remote: Dict[int, Tuple[int, int, int]] = field(default_factory=dict)
    returns: Dict[int, int] = field(default_factory=dict)


def _fresh(reg: Register, sites: Sequence[int], what: str) -> None:
    for s in sites:
        if reg.definite_level(s, tolerance=1e-9) != "g":
            raise ProtocolError(f"{what} requires site {s} in |g>")


@lru_cache(maxsize=None)
def _fourier_vectors(dims: Tuple[int, int, int], a_index: Tuple[int, int, int]) -> Tuple[np.ndarray, ...]:
    """Fourier basis state |x> on a trio of sites, flattened in site order."""
    size = int(np.prod(dims))
    vectors = []
    for x in range(3):
        w = 2.0 * np.pi * x / 3.0
        vec = np.zeros(dims, dtype=complex)
        for j in range(3):
            index = [0, 0, 0]
            index[j] = a_index[j]
            vec[tuple(index)] = np.exp(1j * j * w) / np.sqrt(3.0)
        vectors.append(vec.reshape(size))
    return tuple(vectors)


def _qft_matrix() -> np.ndarray:
    """Fourier unitary on the encoding qutrit: branch j sits on level (a, g, b)[j], outcome x on level x."""
    in_level = (1, 0, 2)
    m = np.zeros((3, 3), dtype=complex)
    for x in range(3):
        for j in range(3):
            m[x, in_level[j]] = np.exp(-2j * np.pi * j * x / 3.0) / np.sqrt(3.0)
    return m


class ProtocolService:

    # Layouts

    @staticmethod
    def build_layout(mode: NetworkMode) -> NetworkLayout:
        if mode == NetworkMode.LOGICAL:
            sites = (
                SiteSpec.qutrit("n1"),
                SiteSpec.qutrit("n2"),
                SiteSpec.qutrit("n3"),
                SiteSpec.qubit("ancilla"),
            )
            return NetworkLayout(sites=sites, science=(0, 1, 2), readout=(0, 1, 2), ancilla=3)

        sites = (
            SiteSpec.qutrit("n1"),
            SiteSpec.qutrit("n2"),
            SiteSpec.qutrit("n3"),
            SiteSpec.qutrit("w2"),
            SiteSpec.qutrit("w3"),
            SiteSpec.qubit("bell1"),
            SiteSpec.qubit("bell2"),
            SiteSpec.qubit("bell2b"),
            SiteSpec.qubit("scratch2"),
            SiteSpec.qubit("bell3"),
            SiteSpec.qubit("bell3b"),
            SiteSpec.qubit("scratch3"),
            SiteSpec.qubit("ancilla"),
        )
        return NetworkLayout(
            sites=sites,
            science=(0, 1, 2),
            readout=(0, 3, 4),
            ancilla=12,
            node1_bell=5,
            remote={1: (6, 7, 8), 2: (9, 10, 11)},
            returns={1: 3, 2: 4},
        )

    # State preparation

    @staticmethod
    def prepare_bell(
        reg: Register,
        site_a: int,
        site_b: int,
        rng: Optional[np.random.Generator] = None,
        phase_sigma: float = 0.0,
    ) -> Tuple[Register, BellPair]:
        """(|g,a> + |a,g>)/sqrt(2) on two fresh sites."""
        _fresh(reg, (site_a, site_b), "Bell preparation")
        reg = QSimService.apply_sector_unitary(reg, site_a, SectorUnitary.h(GA))
        reg = QSimService.apply_controlled(reg, (site_a, ("a",)), site_b, SectorUnitary.x(GA))
        reg = QSimService.apply_sector_unitary(reg, site_b, SectorUnitary.x(GA))
        if phase_sigma > 0.0 and rng is not None:
            reg = QSimService.apply_phase(reg, site_b, "a", float(rng.normal(0.0, phase_sigma)))
        return reg, BellPair(sender=site_a, receiver=site_b)

    @staticmethod
    def prepare_w(reg: Register, sites: Sequence[int]) -> Register:
        """W state on three local sites in |g>."""
        if len(sites) != 3:
            raise ProtocolError(f"W preparation needs three sites, got {len(sites)}")
        _fresh(reg, sites, "W preparation")
        s0, s1, s2 = sites
        reg = QSimService.apply_sector_unitary(reg, s0, SectorUnitary.ry(GA, W_ROTATION))
        reg = QSimService.apply_controlled(reg, (s0, ("a",)), s1, SectorUnitary.ry(GA, math.pi / 2.0))
        reg = QSimService.apply_controlled(reg, (s1, ("a",)), s0, SectorUnitary.x(GA))
        reg = QSimService.apply_sector_unitary(reg, s2, SectorUnitary.x(GA))
        reg = QSimService.apply_controlled(reg, (s0, ("a",)), s2, SectorUnitary.x(GA))
        reg = QSimService.apply_controlled(reg, (s1, ("a",)), s2, SectorUnitary.x(GA))
        return reg

    # Teleportation

    @staticmethod
    def teleport_qubit(
        reg: Register,
        src: int,
        pair: BellPair,
        dst: int,
        rng: Optional[np.random.Generator] = None,
        force: Optional[Tuple[str, str]] = None,
    ) -> Tuple[Register, TeleportLog]:
        """Move the {ga} state of ``src`` onto ``dst`` (the pair's receiving half)."""
        if pair.receiver != dst:
            raise ProtocolError(f"site {dst} is not the receiving half of the Bell pair")
        if src in (pair.sender, pair.receiver):
            raise ProtocolError("source cannot be part of its own Bell pair")
        if "b" in reg.sites[src].labels and reg.population(src, "b") > 1e-12:
            raise ProtocolError(f"qubit teleportation needs site {src} inside the {{ga}} sector")
        pair.consume()

        reg = QSimService.apply_controlled(reg, (src, ("a",)), pair.sender, SectorUnitary.x(GA))
        reg = QSimService.apply_sector_unitary(reg, src, SectorUnitary.h(GA))
        rec_src, reg = QSimService.measure(reg, src, rng, force=None if force is None else force[0])
        rec_pair, reg = QSimService.measure(reg, pair.sender, rng, force=None if force is None else force[1])

        log = TeleportLog(outcomes=[(rec_src.outcome, rec_pair.outcome)])
        # The resource is X on one half of (|gg> + |aa>)/sqrt(2): X correction when the pair half reads g
        if rec_pair.outcome == "g":
            reg = QSimService.apply_sector_unitary(reg, dst, SectorUnitary.x(GA))
            log.corrections.append(f"X{{ga}}@{dst}")
        if rec_src.outcome == "a":
            reg = QSimService.apply_sector_unitary(reg, dst, SectorUnitary.z(GA))
            log.corrections.append(f"Z{{ga}}@{dst}")
        return reg, log

    @staticmethod
    def teleport_qutrit(
        reg: Register,
        src: int,
        pairs: Sequence[BellPair],
        dst: int,
        scratch: int,
        rng: Optional[np.random.Generator] = None,
        force: Optional[Tuple[str, str, str, str]] = None,
    ) -> Tuple[Register, TeleportLog]:
        """Move a {gab} qutrit in two sector-wise qubit rounds.

        The b content of ``src`` is first parked on ``scratch`` (b -> g on the
        qutrit, flag on the scratch qubit). Round one teleports the qutrit's
        {ga} part to ``dst``, round two teleports the flag to the second pair's
        receiver, and the flag is swapped back into level b of ``dst``.
        """
        fresh_pairs = [p for p in pairs if not p.consumed]
        if len(pairs) < 2 or len(fresh_pairs) < 2:
            raise ProtocolError("qutrit teleportation needs two unused Bell pairs")
        first, second = pairs[0], pairs[1]
        if first.receiver != dst:
            raise ProtocolError(f"site {dst} is not the receiving half of the first Bell pair")
        if "b" not in reg.sites[dst].labels:
            raise ProtocolError(f"destination site {dst} is not a qutrit")
        _fresh(reg, (scratch,), "qutrit teleportation scratch")
        helper = second.receiver

        # park b content on the scratch qubit
        reg = QSimService.apply_controlled(reg, (src, ("b",)), scratch, SectorUnitary.x(GA))
        reg = QSimService.apply_controlled(reg, (scratch, ("a",)), src, SectorUnitary.x(GB))

        reg, log_ga = ProtocolService.teleport_qubit(
            reg, src, first, dst, rng, None if force is None else (force[0], force[1])
        )
        reg, log_b = ProtocolService.teleport_qubit(
            reg, scratch, second, helper, rng, None if force is None else (force[2], force[3])
        )

        # unpark: flag -> level b of the destination, helper back to |g>
        reg = QSimService.apply_controlled(reg, (helper, ("a",)), dst, SectorUnitary.x(GB))
        reg = QSimService.apply_controlled(reg, (dst, ("b",)), helper, SectorUnitary.x(GA))

        log = TeleportLog(
            outcomes=log_ga.outcomes + log_b.outcomes,
            corrections=log_ga.corrections + [c.replace(f"@{helper}", "@flag") for c in log_b.corrections],
        )
        return reg, log

    # Clock interrogation

    @staticmethod
    def start_clock(reg: Register, sites: Sequence[int]) -> Register:
        """pi/2 pulse in {ab}: |a> -> (|a> + |b>)/sqrt(2)."""
        for s in sites:
            reg = QSimService.apply_sector_unitary(reg, s, SectorUnitary.ry(AB, math.pi / 2.0))
        return reg

    @staticmethod
    def _evolve_node(
        reg: Register,
        atoms: Sequence[int],
        theta: float,
        ground_phase: float,
        ab_noise: float = 0.0,
        ga_noise: float = 0.0,
    ) -> Register:
        for s in atoms:
            reg = QSimService.apply_phase(reg, s, "b", theta)
            if ground_phase:
                reg = QSimService.apply_phase(reg, s, "g", ground_phase)
        if ab_noise:
            reg = QSimService.apply_phase(reg, atoms[0], "b", ab_noise)
        if ga_noise:
            reg = QSimService.apply_phase(reg, atoms[0], "g", ga_noise)
        return reg

    @staticmethod
    def node_phases(phases: PhaseSet, node: int) -> Tuple[float, float]:
        """(theta on level b, phase on level g) of one node, relative to node 1."""
        theta = phases.theta_reduced[node]
        ground = 0.0 if node == 0 else -phases.phi_reduced[node - 1]
        return theta, ground

    @staticmethod
    def free_evolve(
        reg: Register,
        nodes: Sequence[Sequence[int]],
        phases: PhaseSet,
        multiplier: int = 1,
        draw: Optional[NoiseDraw] = None,
    ) -> Register:
        """Free evolution of every node; ``multiplier`` = N for the FastPhase GHZ path.

        ``nodes[k]`` lists the atoms of node k, the science atom first.
        """
        draw = draw or NoiseDraw()
        for k, atoms in enumerate(nodes):
            theta, ground = ProtocolService.node_phases(phases, k)
            reg = ProtocolService._evolve_node(
                reg, atoms, theta * multiplier, ground * multiplier, draw.ab[k], draw.ga[k]
            )
        return reg

    @staticmethod
    def ghz_build(reg: Register, nodes: Sequence[Sequence[int]], sector: Tuple[str, str]) -> Register:
        """Cascaded CNOTs spreading each science atom over its node (science atom first)."""
        if sector == GA:
            for atoms in nodes:
                _fresh(reg, atoms[1:], "GHZ build")
                for k in range(1, len(atoms)):
                    reg = QSimService.apply_controlled(reg, (atoms[k - 1], ("a",)), atoms[k], SectorUnitary.x(GA))
        elif sector == AB:
            for atoms in nodes:
                for k in range(1, len(atoms)):
                    reg = QSimService.apply_controlled(reg, (atoms[k - 1], ("b",)), atoms[k], SectorUnitary.x(AB))
        else:
            raise ProtocolError(f"GHZ states are built in the {{ga}} or {{ab}} sector, not {sector}")
        return reg

    @staticmethod
    def ghz_unbuild(reg: Register, nodes: Sequence[Sequence[int]], sector: Tuple[str, str]) -> Register:
        """Inverse cascade; {ab} first, then {ga} returns the extra atoms to |g>."""
        if sector == AB:
            for atoms in nodes:
                for k in range(len(atoms) - 1, 0, -1):
                    reg = QSimService.apply_controlled(reg, (atoms[k - 1], ("b",)), atoms[k], SectorUnitary.x(AB))
        elif sector == GA:
            for atoms in nodes:
                for k in range(len(atoms) - 1, 0, -1):
                    reg = QSimService.apply_controlled(
                        reg, (atoms[k - 1], ("a", "b")), atoms[k], SectorUnitary.x(GA)
                    )
        else:
            raise ProtocolError(f"GHZ states are unbuilt in the {{ga}} or {{ab}} sector, not {sector}")
        return reg

    @staticmethod
    def ghz_interrogate(
        reg: Register,
        nodes: Sequence[Sequence[int]],
        phases: PhaseSet,
        draw: Optional[NoiseDraw] = None,
    ) -> Register:
        """Build, start, evolve and unbuild super-atoms on an explicit register."""
        reg = ProtocolService.ghz_build(reg, nodes, GA)
        reg = ProtocolService.start_clock(reg, [atoms[0] for atoms in nodes])
        reg = ProtocolService.ghz_build(reg, nodes, AB)
        reg = ProtocolService.free_evolve(reg, nodes, phases, 1, draw)
        reg = ProtocolService.ghz_unbuild(reg, nodes, AB)
        return ProtocolService.ghz_unbuild(reg, nodes, GA)

    @staticmethod
    def ghz_node_operator(
        ghz_n: int, node: int, phases: PhaseSet, draw: Optional[NoiseDraw] = None
    ) -> np.ndarray:
        """Science-atom operator of one node's GHZ build -> evolve -> unbuild circuit.

        The node's N atoms are simulated explicitly for the science atom in |g>
        and |a> with the extra atoms in |g>; the extras must come back to |g>.
        Every GHZ stage is node-local, so applying this 3x3 operator to each
        science site equals running the circuit on the whole network.
        """
        draw = draw or NoiseDraw()
        sites = [SiteSpec.qutrit(f"node{node + 1}_{m}") for m in range(ghz_n)]
        atoms = list(range(ghz_n))
        theta, ground = ProtocolService.node_phases(phases, node)
        operator = np.zeros((3, 3), dtype=complex)

        for column, level in ((0, "g"), (1, "a")):
            reg = Register.basis_state(sites, [level] + ["g"] * (ghz_n - 1))
            reg = ProtocolService.ghz_build(reg, [atoms], GA)
            reg = ProtocolService.start_clock(reg, [0])
            reg = ProtocolService.ghz_build(reg, [atoms], AB)
            reg = ProtocolService._evolve_node(reg, atoms, theta, ground, draw.ab[node], draw.ga[node])
            reg = ProtocolService.ghz_unbuild(reg, [atoms], AB)
            reg = ProtocolService.ghz_unbuild(reg, [atoms], GA)

            science = reg.amplitudes[(slice(None),) + (0,) * (ghz_n - 1)]
            leak = 1.0 - float(np.sum(np.abs(science) ** 2))
            if leak > LEAK_TOLERANCE:
                raise ProtocolError(f"GHZ unbuild left extra atoms of node {node + 1} excited (weight {leak:.3g})")
            operator[:, column] = science
        return operator

    @staticmethod
    def fast_phase_node_operator(
        ghz_n: int, node: int, phases: PhaseSet, draw: Optional[NoiseDraw] = None
    ) -> np.ndarray:
        """Single-atom clock start and evolution with all phases multiplied by N."""
        draw = draw or NoiseDraw()
        theta, ground = ProtocolService.node_phases(phases, node)
        site = [SiteSpec.qutrit(f"node{node + 1}")]
        operator = np.zeros((3, 3), dtype=complex)
        for column, level in ((0, "g"), (1, "a")):
            reg = ProtocolService.start_clock(Register.basis_state(site, [level]), [0])
            reg = ProtocolService._evolve_node(
                reg, [0], theta * ghz_n, ground * ghz_n, draw.ab[node], draw.ga[node]
            )
            operator[:, column] = reg.vector
        return operator

    # Readout

    @staticmethod
    def global_clock_readout(
        reg: Register,
        trio: Sequence[int],
        ancilla: int,
        rng: Optional[np.random.Generator] = None,
        force: Optional[str] = None,
    ) -> Tuple[str, MeasurementRecord, Register]:
        """Ancilla parity check of the {ab} clock; '+' when the ancilla stays in |g>."""
        _fresh(reg, (ancilla,), "global clock readout")
        for q in trio:
            reg = QSimService.apply_sector_unitary(reg, q, SectorUnitary.h(AB))
        for q in trio:
            reg = QSimService.apply_controlled(reg, (q, ("b",)), ancilla, SectorUnitary.x(GA))

        forced_level = None if force is None else ("g" if force == "+" else "a")
        record, reg = QSimService.measure(reg, ancilla, rng, force=forced_level)
        branch = "+" if record.outcome == "g" else "-"
        return branch, record, QSimService.reset(reg, ancilla)

    @staticmethod
    def conditional_global_x(reg: Register, trio: Sequence[int], branch: str) -> Register:
        if branch not in ("+", "-"):
            raise ProtocolError(f"unknown readout branch {branch!r}")
        if branch == "-":
            for q in trio:
                reg = QSimService.apply_sector_unitary(reg, q, SectorUnitary.x(AB))
        return reg

    @staticmethod
    def fourier_projectors(reg: Register, trio: Sequence[int]) -> List[np.ndarray]:
        dims = tuple(reg.sites[q].dim for q in trio)
        a_index = tuple(reg.sites[q].index("a") for q in trio)
        return [QSimService.rank_one(v) for v in _fourier_vectors(dims, a_index)]

    @staticmethod
    def fourier_measure(
        reg: Register,
        trio: Sequence[int],
        rng: Optional[np.random.Generator] = None,
        realization: MeasurementRealization = MeasurementRealization.DIRECT_PROJECTOR,
        force: Optional[str] = None,
    ) -> Tuple[Optional[int], MeasurementRecord, Register]:
        """Fourier-basis measurement; returns x or None for the null outcome."""
        if realization == MeasurementRealization.DIRECT_PROJECTOR:
            record, reg = QSimService.measure_projectors(
                reg,
                trio,
                ProtocolService.fourier_projectors(reg, trio),
                rng,
                labels=["0", "1", "2"],
                force=force,
                name="fourier",
            )
            outcome = None if record.outcome == NULL_OUTCOME else int(record.outcome)
            return outcome, record, reg

        t1, t2, t3 = trio
        for q in trio:
            if reg.sites[q].dim != 3:
                raise ProtocolError("the QFT realization encodes the excitation on qutrit sites")
        # |agg>, |gag>, |gga> -> levels a, g, b of t1 with t2 = t3 = g
        reg = QSimService.apply_controlled(reg, (t3, ("a",)), t1, SectorUnitary.x(GB))
        reg = QSimService.apply_controlled(reg, (t1, ("b",)), t3, SectorUnitary.x(GA))
        reg = QSimService.apply_controlled(reg, (t1, ("g",)), t2, SectorUnitary.x(GA), extra_controls=[(t3, ("g",))])
        reg = QSimService.apply_site_unitary(reg, t1, _qft_matrix())

        for q in (t2, t3):
            record, reg = QSimService.measure(reg, q, rng)
            if record.outcome != "g":
                return None, record.model_copy(update={"outcome": NULL_OUTCOME}), reg
        record, reg = QSimService.measure(reg, t1, rng, labels=None, force=None)
        return reg.sites[t1].index(record.outcome), record, reg

    # Shots

    @staticmethod
    def draw_noise(noise: NoiseConfig, t: float, ghz_n: int, rng: np.random.Generator) -> NoiseDraw:
        ab = (0.0, 0.0, 0.0)
        ga = (0.0, 0.0, 0.0)
        leak_node = None
        if noise.t2 is not None:
            ab = tuple(rng.standard_normal(3) * float(AnalyticService.noise_sigma(t, noise.t2, ghz_n)))
        if noise.ga_t2 is not None:
            ga = tuple(rng.standard_normal(3) * float(AnalyticService.noise_sigma(t, noise.ga_t2, ghz_n)))
        if noise.leakage_rate > 0.0 and rng.random() < noise.leakage_rate:
            leak_node = int(rng.integers(3))
        return NoiseDraw(ab=ab, ga=ga, leak_node=leak_node)

    @staticmethod
    def interrogate(
        cfg: ProtocolConfig,
        phases: PhaseSet,
        draw: Optional[NoiseDraw] = None,
        rng: Optional[np.random.Generator] = None,
        noise: Optional[NoiseConfig] = None,
    ) -> Tuple[Register, NetworkLayout, List[str]]:
        """Everything before the global clock readout: the register holds |W_T> on the readout trio."""
        draw = draw or NoiseDraw()
        noise = noise or NoiseConfig()
        rng = rng if rng is not None else np.random.default_rng(0)
        layout = ProtocolService.build_layout(cfg.mode)
        reg = Register.ground(layout.sites)
        corrections: List[str] = []
        n1, n2, n3 = layout.science

        if cfg.mode == NetworkMode.LOGICAL:
            reg = ProtocolService.prepare_w(reg, layout.science)
        else:
            bell = layout.node1_bell
            reg = ProtocolService.prepare_w(reg, (n1, layout.returns[1], layout.returns[2]))
            for node in (1, 2):
                local, remote = layout.returns[node], layout.science[node]
                reg, pair = ProtocolService.prepare_bell(reg, bell, remote, rng, noise.bell_phase_sigma)
                reg, log = ProtocolService.teleport_qubit(reg, local, pair, remote, rng)
                corrections.extend(log.corrections)
                reg = QSimService.reset(QSimService.reset(reg, local), bell)

        for s in layout.science:
            if reg.population(s, "b") > 1e-12:
                raise ProtocolError("clock start needs the science atoms inside the {ga} sector")

        if cfg.ghz_n > 1 and cfg.ghz_path == GhzPath.CIRCUIT:
            for k, s in enumerate(layout.science):
                operator = ProtocolService.ghz_node_operator(cfg.ghz_n, k, phases, draw)
                reg = QSimService.apply_site_operator(reg, s, operator)
            reg.check_norm(1e-10)
        else:
            reg = ProtocolService.start_clock(reg, layout.science)
            reg = ProtocolService.free_evolve(reg, [[s] for s in layout.science], phases, cfg.ghz_n, draw)

        if draw.leak_node is not None:
            reg, _ = QSimService.apply_transition(reg, layout.science[draw.leak_node], "g", "a")

        if cfg.mode == NetworkMode.FULL_NETWORK:
            bell = layout.node1_bell
            for node in (1, 2):
                first_sender, second_sender, scratch = layout.remote[node]
                local, remote = layout.returns[node], layout.science[node]
                reg, first = ProtocolService.prepare_bell(reg, first_sender, local, rng, noise.bell_phase_sigma)
                reg, second = ProtocolService.prepare_bell(reg, second_sender, bell, rng, noise.bell_phase_sigma)
                reg, log = ProtocolService.teleport_qutrit(reg, remote, (first, second), local, scratch, rng)
                corrections.extend(log.corrections)
                for s in (remote, scratch, first_sender, second_sender):
                    reg = QSimService.reset(reg, s)
        return reg, layout, corrections

    @staticmethod
    def run_shot(
        cfg: ProtocolConfig,
        spacetime: SpacetimeConfig,
        clocks: ClockSpec,
        t: float,
        noise: NoiseConfig,
        rng: np.random.Generator,
        phases: Optional[PhaseSet] = None,
    ) -> ShotOutcome:
        """One pass of the full circuit at coordinate time ``t``."""
        phases = phases or SpacetimeService.phases_at(spacetime, clocks, t)
        draw = ProtocolService.draw_noise(noise, t, cfg.ghz_n, rng)
        reg, layout, corrections = ProtocolService.interrogate(cfg, phases, draw, rng, noise)

        branch, _, reg = ProtocolService.global_clock_readout(reg, layout.readout, layout.ancilla, rng)
        reg = ProtocolService.conditional_global_x(reg, layout.readout, branch)
        outcome, _, _ = ProtocolService.fourier_measure(reg, layout.readout, rng, cfg.measurement)
        return ShotOutcome(branch=branch, outcome=outcome, corrections=corrections, noise=draw)

    @staticmethod
    def branch_states(reg: Register, trio: Sequence[int], ancilla: int) -> Dict[str, Tuple[float, Register]]:
        """Post-readout register of each possible branch after the conditional X, with its probability."""
        states = {}
        for branch in ("+", "-"):
            try:
                _, record, post = ProtocolService.global_clock_readout(reg, trio, ancilla, force=branch)
            except MeasurementError:
                continue
            states[branch] = (record.probability, ProtocolService.conditional_global_x(post, trio, branch))
        return states

    @staticmethod
    def readout_distribution(reg: Register, trio: Sequence[int], ancilla: int) -> np.ndarray:
        """Exact [p0, p1, p2, p_null] of readout + Fourier measurement, marginalised over the branch."""
        total = np.zeros(4)
        for probability, post in ProtocolService.branch_states(reg, trio, ancilla).values():
            projectors = ProtocolService.fourier_projectors(post, trio)
            total += probability * QSimService.projector_probabilities(post, trio, projectors)
        return total

    @staticmethod
    def circuit_distribution(
        cfg: ProtocolConfig,
        phases: PhaseSet,
        draw: Optional[NoiseDraw] = None,
        rng: Optional[np.random.Generator] = None,
    ) -> np.ndarray:
        """Exact outcome distribution of the full circuit for one noise realisation."""
        reg, layout, _ = ProtocolService.interrogate(cfg, phases, draw, rng)
        return ProtocolService.readout_distribution(reg, layout.readout, layout.ancilla)
