"""
Network protocol circuits: W state, teleportation, GHZ super-atoms, readout.
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from clocknet.core.errors import ProtocolError
from clocknet.models.register import Register, SiteSpec
from clocknet.schemas.protocol import (
    GhzPath,
    MeasurementRealization,
    NetworkMode,
    NoiseConfig,
    NoiseDraw,
    ProtocolConfig,
)
from clocknet.schemas.spacetime import PhaseSet
from clocknet.services.analytic_service import AnalyticService
from clocknet.services.protocol_service import ProtocolService
from clocknet.services.verify_service import QUBIT_BRANCHES, QUTRIT_BRANCHES, VerifyService


def three_qutrits() -> Register:
    return Register.ground([SiteSpec.qutrit(), SiteSpec.qutrit(), SiteSpec.qutrit()])


def test_w_state():
    reg = ProtocolService.prepare_w(three_qutrits(), (0, 1, 2))
    target = Register.from_terms(
        reg.sites, {("a", "g", "g"): 1.0, ("g", "a", "g"): 1.0, ("g", "g", "a"): 1.0}
    )
    assert reg.fidelity(target) == pytest.approx(1.0, abs=1e-12)


def test_w_state_needs_fresh_sites():
    reg = ProtocolService.prepare_w(three_qutrits(), (0, 1, 2))
    with pytest.raises(ProtocolError):
        ProtocolService.prepare_w(reg, (0, 1, 2))
    with pytest.raises(ProtocolError):
        ProtocolService.prepare_w(three_qutrits(), (0, 1))


def test_bell_pair_is_single_use():
    reg = Register.ground([SiteSpec.qubit(), SiteSpec.qubit(), SiteSpec.qubit(), SiteSpec.qubit()])
    reg, pair = ProtocolService.prepare_bell(reg, 1, 2)
    reg = ProtocolService.teleport_qubit(reg, 0, pair, 2, force=("g", "g"))[0]
    with pytest.raises(ProtocolError):
        ProtocolService.teleport_qubit(reg, 3, pair, 2, force=("g", "g"))


def test_bell_pair_state():
    reg = Register.ground([SiteSpec.qubit(), SiteSpec.qubit()])
    reg, _ = ProtocolService.prepare_bell(reg, 0, 1)
    target = Register.from_terms(reg.sites, {("g", "a"): 1.0, ("a", "g"): 1.0})
    assert reg.fidelity(target) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("force", QUBIT_BRANCHES)
def test_qubit_teleportation_every_branch(force, rng):
    psi = rng.normal(size=2) + 1j * rng.normal(size=2)
    psi /= np.linalg.norm(psi)
    assert VerifyService.teleport_qubit_infidelity(psi, force) < 1e-12


@pytest.mark.parametrize("force", QUTRIT_BRANCHES)
def test_qutrit_teleportation_every_branch(force, rng):
    psi = rng.normal(size=3) + 1j * rng.normal(size=3)
    psi /= np.linalg.norm(psi)
    assert VerifyService.teleport_qutrit_infidelity(psi, force) < 1e-12


def test_circuit_matches_closed_form(random_phases):
    for _ in range(5):
        phases = random_phases()
        circuit = ProtocolService.circuit_distribution(ProtocolConfig(), phases)
        closed = AnalyticService.pi_distribution(phases.theta_reduced, phases.phi_reduced)
        assert np.max(np.abs(circuit[:3] - closed)) < 1e-10
        assert circuit[3] == pytest.approx(0.0, abs=1e-12)


def test_full_network_matches_logical(random_phases, rng):
    phases = random_phases()
    logical = ProtocolService.circuit_distribution(ProtocolConfig(), phases)
    full = ProtocolService.circuit_distribution(ProtocolConfig(mode=NetworkMode.FULL_NETWORK), phases, rng=rng)
    assert np.max(np.abs(full - logical)) < 1e-10


@pytest.mark.parametrize("ghz_n", [2, 3, 4, 5, 6])
def test_ghz_circuit_multiplies_phases(ghz_n, random_phases):
    assert VerifyService.ghz_deviation(ghz_n, random_phases()) < 1e-10


def test_ghz_build_spreads_the_clock_over_the_node():
    reg = Register.basis_state([SiteSpec.qutrit(), SiteSpec.qutrit(), SiteSpec.qutrit()], ["a", "g", "g"])
    nodes = [[0, 1, 2]]
    reg = ProtocolService.ghz_build(reg, nodes, ("g", "a"))
    reg = ProtocolService.start_clock(reg, [0])
    reg = ProtocolService.ghz_build(reg, nodes, ("a", "b"))
    target = Register.from_terms(reg.sites, {("a", "a", "a"): 1.0, ("b", "b", "b"): 1.0})
    assert reg.fidelity(target) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("ghz_n", [2, 3])
def test_full_register_ghz_matches_multiplied_evolution(ghz_n, random_phases):
    phases = random_phases()
    trio = (0, 1, 2)
    extras = [[3 + 3 * m + node for m in range(ghz_n - 1)] for node in range(3)]
    nodes = [[node] + extras[node] for node in trio]

    reg = Register.ground([SiteSpec.qutrit() for _ in range(3 * ghz_n)])
    reg = ProtocolService.prepare_w(reg, trio)
    reg = ProtocolService.ghz_interrogate(reg, nodes, phases)
    science = reg.amplitudes[(slice(None),) * 3 + (0,) * (3 * ghz_n - 3)]

    ref = ProtocolService.prepare_w(three_qutrits(), trio)
    ref = ProtocolService.start_clock(ref, trio)
    ref = ProtocolService.free_evolve(ref, [[j] for j in trio], phases, ghz_n)

    assert abs(np.vdot(ref.amplitudes.ravel(), science.ravel())) == pytest.approx(1.0, abs=1e-10)


def test_ghz_circuit_path_matches_fast_path(random_phases):
    phases = random_phases()
    fast = ProtocolService.circuit_distribution(ProtocolConfig(ghz_n=3), phases)
    circuit = ProtocolService.circuit_distribution(ProtocolConfig(ghz_n=3, ghz_path=GhzPath.CIRCUIT), phases)
    assert np.max(np.abs(fast - circuit)) < 1e-10


def test_circuit_ghz_path_is_limited_in_size():
    with pytest.raises(ValidationError):
        ProtocolConfig(ghz_n=50, ghz_path=GhzPath.CIRCUIT)


def test_plus_branch_probability(random_phases):
    phases = random_phases()
    reg, layout, _ = ProtocolService.interrogate(ProtocolConfig(), phases)
    branches = ProtocolService.branch_states(reg, layout.readout, layout.ancilla)
    expected = AnalyticService.branch_plus_probability(phases.theta_reduced)
    assert branches["+"][0] == pytest.approx(expected, abs=1e-12)


def test_leaked_shot_gives_null_outcome(random_phases):
    phases = random_phases()
    draw = NoiseDraw(leak_node=1)
    probs = ProtocolService.circuit_distribution(ProtocolConfig(), phases, draw)
    assert probs[3] == pytest.approx(1.0, abs=1e-12)

    reg, layout, _ = ProtocolService.interrogate(ProtocolConfig(), phases, draw)
    branches = ProtocolService.branch_states(reg, layout.readout, layout.ancilla)
    assert branches["+"][0] == pytest.approx(0.5, abs=1e-12)


def test_ab_noise_shifts_clock_phase(random_phases):
    phases = random_phases()
    shift = [0.3, -0.1, 0.7]
    noisy = ProtocolService.circuit_distribution(ProtocolConfig(), phases, NoiseDraw(ab=tuple(shift)))
    shifted = [t + s for t, s in zip(phases.theta_reduced, shift)]
    assert np.max(np.abs(noisy[:3] - AnalyticService.pi_distribution(shifted, phases.phi_reduced))) < 1e-10


def test_zero_phases_always_give_outcome_zero(earth, clocks, rng):
    phases = PhaseSet.from_reduced([0.0, 0.0, 0.0], [0.0, 0.0])
    for _ in range(20):
        shot = ProtocolService.run_shot(ProtocolConfig(), earth, clocks, 0.0, NoiseConfig(), rng, phases=phases)
        assert shot.outcome == 0
        assert shot.branch == "+"


def test_qft_realization_samples_same_distribution(earth, clocks, random_phases, rng):
    phases = random_phases()
    expected = AnalyticService.pi_distribution(phases.theta_reduced, phases.phi_reduced)
    cfg = ProtocolConfig(measurement=MeasurementRealization.QFT_CIRCUIT)
    shots = 1500
    counts = np.zeros(4)
    for _ in range(shots):
        shot = ProtocolService.run_shot(cfg, earth, clocks, 0.0, NoiseConfig(), rng, phases=phases)
        counts[3 if shot.is_null else shot.outcome] += 1
    assert counts[3] == 0
    sigma = np.sqrt(expected * (1.0 - expected) / shots)
    assert np.all(np.abs(counts[:3] / shots - expected) <= 5.0 * sigma + 2.0 / shots)


def test_full_network_shot_records_corrections(earth, clocks, random_phases, rng):
    cfg = ProtocolConfig(mode=NetworkMode.FULL_NETWORK)
    shot = ProtocolService.run_shot(cfg, earth, clocks, 0.0, NoiseConfig(), rng, phases=random_phases())
    assert shot.outcome in (0, 1, 2)
    assert all("@" in c for c in shot.corrections)


def test_unknown_branch_is_rejected():
    with pytest.raises(ProtocolError):
        ProtocolService.conditional_global_x(three_qutrits(), (0, 1, 2), "?")


def test_w_rotation_weight():
    reg = ProtocolService.prepare_w(three_qutrits(), (0, 1, 2))
    assert reg.population(0, "a") == pytest.approx(1.0 / 3.0)
    assert math.isclose(reg.norm(), 1.0, abs_tol=1e-12)


def test_opposite_clocks_always_read_minus():
    phases = PhaseSet.from_reduced([math.pi, math.pi, math.pi], [0.0, 0.0])
    reg, layout, _ = ProtocolService.interrogate(ProtocolConfig(), phases)
    branches = ProtocolService.branch_states(reg, layout.readout, layout.ancilla)
    assert branches.get("+", (0.0, None))[0] < 1e-12
    assert branches["-"][0] == pytest.approx(1.0, abs=1e-12)


@pytest.mark.slow
def test_circuit_matches_closed_form_on_many_phases(random_phases):
    worst = 0.0
    for _ in range(100):
        phases = random_phases()
        circuit = ProtocolService.circuit_distribution(ProtocolConfig(), phases)
        closed = AnalyticService.pi_distribution(phases.theta_reduced, phases.phi_reduced)
        worst = max(worst, float(np.max(np.abs(circuit[:3] - closed))))
    assert worst < 1e-10


@pytest.mark.slow
@pytest.mark.parametrize("force", QUBIT_BRANCHES)
def test_qubit_teleportation_many_states(force, rng):
    for _ in range(100):
        psi = rng.normal(size=2) + 1j * rng.normal(size=2)
        assert VerifyService.teleport_qubit_infidelity(psi / np.linalg.norm(psi), force) < 1e-12


@pytest.mark.slow
@pytest.mark.parametrize("force", QUTRIT_BRANCHES)
def test_qutrit_teleportation_many_states(force, rng):
    for _ in range(100):
        psi = rng.normal(size=3) + 1j * rng.normal(size=3)
        assert VerifyService.teleport_qutrit_infidelity(psi / np.linalg.norm(psi), force) < 1e-12
