"""
Closed-form Fourier-outcome probabilities of the three-clock W state.

For branch phases Phi_j (Phi_1 = 0, Phi_2 = phi_1, Phi_3 = phi_2) and clock
phases Theta_j, marginalised over the global clock readout:

    P(x) = |S|/9 + 1/9 * sum_{i<j in S} g_ij [cos A_ij + e_ij cos(A_ij + Theta_i - Theta_j)]
    A_ij = (i - j) w_x + Phi_i - Phi_j,   w_x = 2 pi x / 3

S is the set of participating branches (all three for the plain protocol),
e_ij the clock-coherence envelope and g_ij the {ga}-coherence envelope of a pair.
Phases use the same signs as the circuit simulator; the plain readout is
|S| = 3 with no dephasing.
"""

import math
from typing import Dict, Sequence, Tuple, Union

import numpy as np

from clocknet.schemas.analytic import ObservableParams
from clocknet.schemas.spacetime import PAIR_KEYS, PAIRS, clock_overlap, overlap_phases

FOURIER_W = 2.0 * np.pi * np.arange(3) / 3.0
ALL_BRANCHES = (0, 1, 2)

ArrayLike = Union[float, Sequence[float], np.ndarray]


class AnalyticService:

    @staticmethod
    def clock_overlap(theta_i: float, theta_j: float) -> Tuple[float, float]:
        """<c(tau_i)|c(tau_j)> = |.| exp(-i lambda_ij); returns (magnitude, lambda_ij)."""
        return clock_overlap(theta_i, theta_j)

    @staticmethod
    def overlap_phases(theta: Sequence[float]) -> Dict[str, float]:
        return overlap_phases(tuple(theta))

    @staticmethod
    def pi_distribution(
        theta: ArrayLike,
        phi: ArrayLike,
        ab_envelopes: ArrayLike = 1.0,
        ga_envelopes: ArrayLike = 1.0,
        subset: Sequence[int] = ALL_BRANCHES,
    ) -> np.ndarray:
        """Vectorised P(x) for x = 0, 1, 2; theta (..., 3), phi (..., 2), envelopes (..., 3)."""
        theta = np.asarray(theta, dtype=float)
        phi = np.asarray(phi, dtype=float)
        batch = theta.shape[:-1]
        branch_phase = np.concatenate([np.zeros(batch + (1,)), phi], axis=-1)
        ab = np.broadcast_to(np.asarray(ab_envelopes, dtype=float), batch + (3,))
        ga = np.broadcast_to(np.asarray(ga_envelopes, dtype=float), batch + (3,))

        out = np.full(batch + (3,), len(subset) / 9.0)
        for k, (i, j) in enumerate(PAIRS):
            if i not in subset or j not in subset:
                continue
            a = (i - j) * FOURIER_W + (branch_phase[..., i] - branch_phase[..., j])[..., None]
            clock = (theta[..., i] - theta[..., j])[..., None]
            out = out + ga[..., k, None] / 9.0 * (np.cos(a) + ab[..., k, None] * np.cos(a + clock))
        return out

    @staticmethod
    def joint_distribution(theta: ArrayLike, branch_phase: ArrayLike) -> np.ndarray:
        """P(branch, x) for one realisation of the phases; shape (..., 2, 3), branch order (+, -).

        ``branch_phase`` holds Phi_j for all three branches (Phi_1 included).
        """
        theta = np.asarray(theta, dtype=float)
        branch_phase = np.asarray(branch_phase, dtype=float)
        clock = np.exp(-1j * theta)
        weight = np.exp(-1j * branch_phase) / (2.0 * np.sqrt(3.0))
        coeffs = np.stack([weight * (1.0 + clock), weight * (1.0 - clock)], axis=-2)
        fourier = np.exp(-1j * np.outer(FOURIER_W, np.arange(3))) / np.sqrt(3.0)
        amplitudes = np.einsum("xj,...bj->...bx", fourier, coeffs)
        return np.abs(amplitudes) ** 2

    @staticmethod
    def distribution(params: ObservableParams, subset: Sequence[int] = ALL_BRANCHES) -> np.ndarray:
        """P(x) for all x, phases scaled by the GHZ size."""
        n = params.ghz_n
        return AnalyticService.pi_distribution(
            np.asarray(params.theta) * n,
            np.asarray(params.phi) * n,
            [params.ab_envelopes[k] for k in PAIR_KEYS],
            [params.ga_envelopes[k] for k in PAIR_KEYS],
            subset,
        )

    @staticmethod
    def expected_pi(x: int, params: ObservableParams) -> float:
        """<Pi_x> of the plain three-node readout."""
        if x not in (0, 1, 2):
            raise ValueError(f"Fourier outcome must be 0, 1 or 2, got {x}")
        return float(AnalyticService.distribution(params)[x])

    @staticmethod
    def expected_pi_overlap_form(x: int, params: ObservableParams) -> float:
        """<Pi_x> written with clock overlaps: 1/3 + 2/9 sum |<c_i|c_j>| cos(A_ij - lambda_ij).

        Noiseless form only; used to cross-check :meth:`expected_pi`.
        """
        n = params.ghz_n
        theta = [t * n for t in params.theta]
        branch_phase = [0.0, params.phi[0] * n, params.phi[1] * n]
        total = 1.0 / 3.0
        for i, j in PAIRS:
            magnitude, lam = AnalyticService.clock_overlap(theta[i], theta[j])
            a = (i - j) * FOURIER_W[x] + branch_phase[i] - branch_phase[j]
            total += 2.0 / 9.0 * magnitude * math.cos(a - lam)
        return total

    @staticmethod
    def branch_plus_probability(theta: Sequence[float], ghz_n: int = 1) -> float:
        """Noiseless probability of the '+' global clock readout branch."""
        return (3.0 + sum(math.cos(ghz_n * t) for t in theta)) / 6.0

    @staticmethod
    def envelope(t: float, t2: float = None, ghz_n: int = 1) -> float:
        """Decay of one two-node interference term: exp(-2 N t / T2)."""
        if t2 is None:
            return 1.0
        if t2 <= 0:
            raise ValueError(f"T2 must be positive, got {t2}")
        return math.exp(-2.0 * ghz_n * t / t2)

    @staticmethod
    def single_coherence(t: float, t2: float = None, ghz_n: int = 1) -> float:
        """Ensemble coherence of one node: exp(-N t / T2)."""
        if t2 is None:
            return 1.0
        return math.exp(-ghz_n * t / t2)

    @staticmethod
    def noise_sigma(t: ArrayLike, t2: float = None, ghz_n: int = 1) -> np.ndarray:
        """Std of the per-shot random clock phase of one node (white frequency noise)."""
        t = np.asarray(t, dtype=float)
        if t2 is None:
            return np.zeros_like(t)
        return np.sqrt(2.0 * ghz_n * t / t2)
