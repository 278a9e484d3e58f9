"""
Sampled clock signal: M shots per time point, averaged into outcome fractions.

All samplers work in the frame of the Node-1 interrogation laser (see
``SpacetimeService.laser_frame_phases``). Every point draws from its own
counter-keyed stream, so a trace is identical for any worker count and any
sub-range can be regenerated alone.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Tuple, Union

import numpy as np

from clocknet.core.config import settings
from clocknet.core.errors import ResourceLimitError
from clocknet.core.rng import point_generator, shot_generator
from clocknet.schemas.spacetime import PhaseSet
from clocknet.schemas.trace import SamplerKind, SignalTrace, TraceConfig
from clocknet.services.analytic_service import AnalyticService
from clocknet.services.protocol_service import ProtocolService
from clocknet.services.spacetime_service import SpacetimeService

logger = logging.getLogger(__name__)

ChunkResult = Tuple[int, np.ndarray, np.ndarray]


def _chunks(n_points: int, size: int) -> List[Tuple[int, int]]:
    return [(start, min(start + size, n_points)) for start in range(0, n_points, size)]


class SamplingService:

    @staticmethod
    def generate_trace(cfg: TraceConfig, threads: Optional[int] = None) -> SignalTrace:
        """Sample the Fourier-outcome fractions at t_k = k / f_s."""
        if cfg.sampler == SamplerKind.CIRCUIT_SHOTS and cfg.total_shots > settings.circuit_shot_budget:
            raise ResourceLimitError(
                f"CircuitShots would run {cfg.total_shots} circuits (budget {settings.circuit_shot_budget}); "
                "use sampler=AnalyticBernoulli, which draws from the same outcome distribution, "
                "or subsample the grid"
            )

        times = cfg.times()
        theta, phi = SpacetimeService.laser_frame_phases(cfg.spacetime, cfg.clocks, times)
        logger.info(
            "Generating %d-point trace (%s, M=%d, seed=%d)",
            cfg.n_points, cfg.sampler.value, cfg.shots_per_point, cfg.master_seed,
        )

        if cfg.sampler == SamplerKind.EXACT_EXPECTATION:
            fractions, p_plus = SamplingService.expectation_fractions(cfg, times, theta, phi)
            shots = 0
        else:
            fractions = np.zeros((cfg.n_points, 4))
            p_plus = np.zeros(cfg.n_points)
            worker = (
                SamplingService._circuit_chunk
                if cfg.sampler == SamplerKind.CIRCUIT_SHOTS
                else SamplingService._bernoulli_chunk
            )
            jobs = _chunks(cfg.n_points, settings.point_chunk_size)
            workers = max(1, threads or settings.threads)

            def run(bounds: Tuple[int, int]) -> ChunkResult:
                start, stop = bounds
                return worker(cfg, start, times[start:stop], theta[start:stop], phi[start:stop])

            if workers == 1:
                results = [run(job) for job in jobs]
            else:
                with ThreadPoolExecutor(max_workers=workers) as pool:
                    results = list(pool.map(run, jobs))

            for start, chunk_fractions, chunk_plus in results:
                stop = start + len(chunk_plus)
                fractions[start:stop] = chunk_fractions
                p_plus[start:stop] = chunk_plus
            shots = cfg.shots_per_point

        return SignalTrace(
            times=times,
            fractions=fractions,
            p_plus=p_plus,
            shots=shots,
            seed=cfg.master_seed,
            config=cfg.model_dump(mode="json"),
        )

    @staticmethod
    def expectation_fractions(
        cfg: TraceConfig, times: np.ndarray, theta: np.ndarray, phi: np.ndarray
    ) -> Tuple[np.ndarray, np.ndarray]:
        """Exact <Pi_x>, null rate and '+' probability for every point, with ensemble dephasing."""
        n = cfg.protocol.ghz_n
        noise = cfg.noise
        ab = np.array([AnalyticService.envelope(t, noise.t2, n) for t in times])
        ga = np.array([AnalyticService.envelope(t, noise.ga_t2, n) for t in times])
        single = np.array([AnalyticService.single_coherence(t, noise.t2, n) for t in times])

        kept = 1.0 - noise.leakage_rate
        probs = AnalyticService.pi_distribution(theta * n, phi * n, ab[:, None], ga[:, None])
        fractions = np.column_stack([kept * probs, np.full(len(times), noise.leakage_rate)])
        plus = (3.0 + single * np.cos(n * theta).sum(axis=1)) / 6.0
        return fractions, kept * plus + noise.leakage_rate / 2.0

    @staticmethod
    def _bernoulli_chunk(
        cfg: TraceConfig, start: int, times: np.ndarray, theta: np.ndarray, phi: np.ndarray
    ) -> ChunkResult:
        """Born-rule shots drawn from the closed-form joint (branch, x) distribution."""
        m = cfg.shots_per_point
        n = cfg.protocol.ghz_n
        noise = cfg.noise
        points = len(times)

        ab = np.zeros((points, m, 3))
        ga = np.zeros((points, m, 3))
        leaked = np.zeros((points, m), dtype=bool)
        leaked_plus = np.zeros((points, m), dtype=bool)
        uniform = np.empty((points, m))

        # draw order per point: ab noise, ga noise, leakage, outcome
        for k in range(points):
            rng = point_generator(cfg.master_seed, start + k)
            if noise.t2 is not None:
                ab[k] = rng.standard_normal((m, 3)) * AnalyticService.noise_sigma(times[k], noise.t2, n)
            if noise.ga_t2 is not None:
                ga[k] = rng.standard_normal((m, 3)) * AnalyticService.noise_sigma(times[k], noise.ga_t2, n)
            if noise.leakage_rate > 0.0:
                leaked[k] = rng.random(m) < noise.leakage_rate
                leaked_plus[k] = rng.random(m) < 0.5
            uniform[k] = rng.random(m)

        shot_theta = n * theta[:, None, :] + ab
        branch_phase = n * np.concatenate([np.zeros((points, 1)), phi], axis=1)[:, None, :] - ga
        joint = AnalyticService.joint_distribution(shot_theta, branch_phase).reshape(points, m, 6)

        cdf = np.cumsum(joint, axis=-1)
        cdf /= cdf[..., -1:]
        category = np.minimum((uniform[..., None] >= cdf).sum(axis=-1), 5)
        outcome = category % 3
        plus = np.where(leaked, leaked_plus, category < 3)

        fractions = np.zeros((points, 4))
        for x in range(3):
            fractions[:, x] = np.sum((outcome == x) & ~leaked, axis=1) / m
        fractions[:, 3] = leaked.sum(axis=1) / m
        return start, fractions, plus.sum(axis=1) / m

    @staticmethod
    def _circuit_chunk(
        cfg: TraceConfig, start: int, times: np.ndarray, theta: np.ndarray, phi: np.ndarray
    ) -> ChunkResult:
        """Full circuit per shot with a (point, shot)-keyed stream."""
        m = cfg.shots_per_point
        fractions = np.zeros((len(times), 4))
        plus = np.zeros(len(times))
        for k, t in enumerate(times):
            phases = PhaseSet.from_reduced(list(theta[k]), list(phi[k]), float(t))
            for s in range(m):
                rng = shot_generator(cfg.master_seed, start + k, s)
                shot = ProtocolService.run_shot(
                    cfg.protocol, cfg.spacetime, cfg.clocks, float(t), cfg.noise, rng, phases=phases
                )
                fractions[k, 3 if shot.is_null else shot.outcome] += 1.0
                plus[k] += shot.branch == "+"
        return start, fractions / m, plus / m

    @staticmethod
    def estimator_variance(
        p: Union[float, np.ndarray], m: Union[int, np.ndarray]
    ) -> Union[float, np.ndarray]:
        """Standard error sqrt(p(1-p)/M) of a fraction estimated from M shots."""
        p = np.asarray(p, dtype=float)
        m = np.asarray(m)
        if np.any(p < -1e-12) or np.any(p > 1.0 + 1e-12):
            raise ValueError("probability must lie in [0, 1]")
        if np.any(m < 1):
            raise ValueError("shot count must be at least 1")
        p = np.clip(p, 0.0, 1.0)
        error = np.sqrt(p * (1.0 - p) / m)
        return float(error) if error.ndim == 0 else error
