"""
Interference-order and linearity checks run on the clock network.

Sub-experiments with fewer interfering clocks keep every branch amplitude at
1/sqrt(3): a left-out branch is moved onto its own flag qubit (|a> on node j ->
|g> on node j, |a> on flag j), which the readout never sees.
"""

import logging
import math
from itertools import combinations
from typing import Dict, Optional, Sequence

import numpy as np

from clocknet.core.errors import ProtocolError
from clocknet.core.rng import FOUNDATIONS_STREAM, make_generator
from clocknet.models.register import Register, SectorUnitary, SiteSpec
from clocknet.schemas.analytic import PAIR_KEYS, ObservableParams
from clocknet.schemas.foundations import SUBSET_KEYS, BornReport, LinearityReport
from clocknet.schemas.protocol import ProtocolConfig
from clocknet.schemas.spacetime import PhaseSet
from clocknet.services.analytic_service import AnalyticService
from clocknet.services.protocol_service import GA, W_ROTATION, ProtocolService
from clocknet.services.qsim_service import QSimService
from clocknet.services.sampling_service import SamplingService

logger = logging.getLogger(__name__)

TRIO = (0, 1, 2)
ANCILLA = 3
FLAGS = (4, 5, 6)


def _subset_key(subset: Sequence[int]) -> str:
    return "".join(str(j + 1) for j in sorted(subset))


def _noiseless(params: ObservableParams) -> bool:
    return all(params.ab_envelopes[k] == 1.0 and params.ga_envelopes[k] == 1.0 for k in PAIR_KEYS)


def _phases(params: ObservableParams) -> PhaseSet:
    return PhaseSet.from_reduced(list(params.theta), list(params.phi))


class FoundationsService:

    @staticmethod
    def shelved_register(subset: Sequence[int]) -> Register:
        """W state with each branch outside ``subset`` shelved on its own flag qubit."""
        if not subset:
            raise ProtocolError("a sub-experiment needs at least one participating clock")
        if any(j not in TRIO for j in subset) or len(set(subset)) != len(subset):
            raise ProtocolError(f"subset must hold distinct clocks from 0, 1, 2; got {list(subset)}")

        sites = [SiteSpec.qutrit("n1"), SiteSpec.qutrit("n2"), SiteSpec.qutrit("n3"),
                 SiteSpec.qubit("ancilla"), SiteSpec.qubit("flag1"), SiteSpec.qubit("flag2"), SiteSpec.qubit("flag3")]
        reg = ProtocolService.prepare_w(Register.ground(sites), TRIO)
        for j in TRIO:
            if j in subset:
                continue
            reg = QSimService.apply_controlled(reg, (j, ("a",)), FLAGS[j], SectorUnitary.x(GA))
            reg = QSimService.apply_controlled(reg, (FLAGS[j], ("a",)), j, SectorUnitary.x(GA))
        return reg

    @staticmethod
    def subset_circuit_distribution(params: ObservableParams, subset: Sequence[int]) -> np.ndarray:
        """Exact [p0, p1, p2, p_null] of the shelved circuit (noiseless phases)."""
        reg = FoundationsService.shelved_register(subset)
        reg = ProtocolService.start_clock(reg, TRIO)
        reg = ProtocolService.free_evolve(reg, [[j] for j in TRIO], _phases(params), params.ghz_n)
        return ProtocolService.readout_distribution(reg, TRIO, ANCILLA)

    @staticmethod
    def born_experiment(
        params: ObservableParams,
        subset: Sequence[int],
        shots: int = 0,
        rng: Optional[np.random.Generator] = None,
    ) -> np.ndarray:
        """[P(0), P(1), P(2), P(null)] with only ``subset`` interfering (0-based clock indices).

        Noiseless parameters run the shelving circuit; dephased ones use the
        closed form with the same shelving. ``shots`` > 0 samples Born-rule counts.
        """
        if _noiseless(params):
            probs = FoundationsService.subset_circuit_distribution(params, subset)
        else:
            if not subset:
                raise ProtocolError("a sub-experiment needs at least one participating clock")
            fourier = AnalyticService.distribution(params, subset=tuple(subset))
            probs = np.append(fourier, max(1.0 - float(np.sum(fourier)), 0.0))

        if shots <= 0:
            return probs
        if rng is None:
            raise ProtocolError("shot mode needs a random generator")
        weights = np.clip(probs, 0.0, None)
        counts = rng.multinomial(shots, weights / weights.sum())
        return counts / shots

    @staticmethod
    def born_i123(
        params: ObservableParams,
        shots: int = 0,
        seed: int = 0,
        inject: float = 0.0,
    ) -> BornReport:
        """All seven sub-experiments and the third-order interference term per x."""
        subsets = [TRIO] + list(combinations(TRIO, 2)) + [(j,) for j in TRIO]
        probabilities: Dict[str, list] = {}
        errors: Dict[str, list] = {}
        for index, subset in enumerate(subsets):
            rng = make_generator(seed, FOUNDATIONS_STREAM, index) if shots > 0 else None
            p = FoundationsService.born_experiment(params, subset, shots, rng)[:3]
            key = _subset_key(subset)
            probabilities[key] = [float(v) for v in p]
            if shots > 0:
                errors[key] = [float(e) for e in SamplingService.estimator_variance(np.clip(p, 0.0, 1.0), shots)]
            else:
                errors[key] = [0.0, 0.0, 0.0]

        if inject:
            logger.warning("Adding synthetic three-way term %.3g to P123", inject)
            probabilities["123"] = [p + inject for p in probabilities["123"]]

        sign = {"123": 1.0, "12": -1.0, "13": -1.0, "23": -1.0, "1": 1.0, "2": 1.0, "3": 1.0}
        i123 = [sum(sign[k] * probabilities[k][x] for k in SUBSET_KEYS) for x in range(3)]
        i123_error = [math.sqrt(sum(errors[k][x] ** 2 for k in SUBSET_KEYS)) for x in range(3)]
        return BornReport(
            probabilities=probabilities,
            errors=errors,
            i123=i123,
            i123_error=i123_error,
            shots=max(shots, 0),
            seed=seed if shots > 0 else None,
            injected=inject,
        )

    @staticmethod
    def product_register(params: ObservableParams) -> Register:
        """Evolved product state prod_j (|g> + sqrt(2)|c>)/sqrt(3) with a fresh ancilla."""
        sites = [SiteSpec.qutrit("n1"), SiteSpec.qutrit("n2"), SiteSpec.qutrit("n3"), SiteSpec.qubit("ancilla")]
        reg = Register.ground(sites)
        for j in TRIO:
            reg = QSimService.apply_sector_unitary(reg, j, SectorUnitary.ry(GA, W_ROTATION))
        reg = ProtocolService.start_clock(reg, TRIO)
        return ProtocolService.free_evolve(reg, [[j] for j in TRIO], _phases(params), params.ghz_n)

    @staticmethod
    def sector_weights(reg: Register, sites: Sequence[int] = TRIO) -> Dict[int, float]:
        """Weight of each excitation number (sites outside {g}) among ``sites``."""
        counts = reg.excitations(sites=sites)
        probs = np.abs(reg.amplitudes) ** 2
        return {k: float(probs[counts == k].sum()) for k in range(len(sites) + 1)}

    @staticmethod
    def product_state_protocol(
        params: ObservableParams, shots: int = 0, seed: int = 0
    ) -> LinearityReport:
        """Product-state run conditioned on the single-excitation Fourier outcomes."""
        phases = _phases(params)
        entangled = ProtocolService.circuit_distribution(ProtocolConfig(ghz_n=params.ghz_n), phases)[:3]

        reg = FoundationsService.product_register(params)
        weights = FoundationsService.sector_weights(reg)
        outcome = ProtocolService.readout_distribution(reg, TRIO, ANCILLA)
        success = float(np.sum(outcome[:3]))

        if shots > 0:
            rng = make_generator(seed, FOUNDATIONS_STREAM, len(SUBSET_KEYS))
            weights_all = np.clip(outcome, 0.0, None)
            counts = rng.multinomial(shots, weights_all / weights_all.sum())
            successes = int(counts[:3].sum())
            if successes == 0:
                logger.warning("No shot landed in the single-excitation Fourier outcomes")
                return LinearityReport(
                    entangled=list(map(float, entangled)),
                    success_probability=0.0,
                    sector_weights=weights,
                    shots=shots,
                    successes=0,
                    seed=seed,
                )
            conditional = counts[:3] / successes
            success_estimate = successes / shots
            tv_error = 0.5 * float(np.sum(SamplingService.estimator_variance(conditional, successes)))
        else:
            if success <= 0.0:
                return LinearityReport(entangled=list(map(float, entangled)), success_probability=0.0,
                                       sector_weights=weights)
            conditional = outcome[:3] / success
            success_estimate = success
            successes = None
            tv_error = 0.0

        tv = 0.5 * float(np.sum(np.abs(conditional - entangled)))
        return LinearityReport(
            entangled=list(map(float, entangled)),
            conditional=list(map(float, conditional)),
            success_probability=min(max(success_estimate, 0.0), 1.0),
            sector_weights=weights,
            total_variation=tv,
            total_variation_error=tv_error,
            shots=max(shots, 0),
            successes=successes,
            seed=seed if shots > 0 else None,
        )
