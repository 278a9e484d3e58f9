"""
Trace generation: determinism, statistics and sampler agreement.
"""

import numpy as np
import pytest
from pydantic import ValidationError

from clocknet.core.config import settings
from clocknet.core.errors import ResourceLimitError
from clocknet.schemas.protocol import NoiseConfig
from clocknet.schemas.trace import SamplerKind, TraceConfig
from clocknet.services.analytic_service import AnalyticService
from clocknet.services.sampling_service import SamplingService
from clocknet.services.spacetime_service import SpacetimeService


def small_config(**kwargs) -> TraceConfig:
    values = {"sample_rate": 500.0, "total_time": 0.1, "shots_per_point": 100, "master_seed": 7}
    values.update(kwargs)
    return TraceConfig(**values)


def test_point_count_must_be_integral():
    with pytest.raises(ValidationError):
        TraceConfig(sample_rate=3.0, total_time=0.5)
    cfg = small_config()
    assert cfg.n_points == 50
    assert cfg.times()[1] == pytest.approx(0.002)


def test_exact_trace_matches_closed_form():
    cfg = small_config(sampler=SamplerKind.EXACT_EXPECTATION)
    trace = SamplingService.generate_trace(cfg)
    theta, phi = SpacetimeService.laser_frame_phases(cfg.spacetime, cfg.clocks, trace.times)
    expected = AnalyticService.pi_distribution(theta, phi)
    assert np.max(np.abs(trace.fractions[:, :3] - expected)) < 1e-12
    assert trace.shots == 0
    assert np.allclose(trace.fractions.sum(axis=1), 1.0)


def test_exact_trace_with_leakage():
    cfg = small_config(sampler=SamplerKind.EXACT_EXPECTATION, noise=NoiseConfig(leakage_rate=0.2))
    trace = SamplingService.generate_trace(cfg)
    assert np.allclose(trace.null_rate, 0.2)
    assert np.allclose(trace.fractions.sum(axis=1), 1.0)


def test_same_seed_same_trace():
    a = SamplingService.generate_trace(small_config())
    b = SamplingService.generate_trace(small_config())
    c = SamplingService.generate_trace(small_config(master_seed=8))
    assert np.array_equal(a.fractions, b.fractions)
    assert not np.array_equal(a.fractions, c.fractions)


def test_trace_independent_of_workers(monkeypatch):
    monkeypatch.setattr(settings, "point_chunk_size", 7)
    cfg = small_config(noise=NoiseConfig(t2=50.0, leakage_rate=0.05))
    serial = SamplingService.generate_trace(cfg, threads=1)
    parallel = SamplingService.generate_trace(cfg, threads=4)
    assert np.array_equal(serial.fractions, parallel.fractions)
    assert np.array_equal(serial.p_plus, parallel.p_plus)


def test_fractions_are_shot_counts():
    trace = SamplingService.generate_trace(small_config(shots_per_point=40))
    counts = trace.fractions * 40
    assert np.allclose(counts, np.round(counts))
    assert np.allclose(trace.fractions.sum(axis=1), 1.0)


def test_bernoulli_mean_follows_expectation():
    cfg = small_config(shots_per_point=2000)
    sampled = SamplingService.generate_trace(cfg)
    exact = SamplingService.generate_trace(cfg.model_copy(update={"sampler": SamplerKind.EXACT_EXPECTATION}))
    p = exact.fractions[:, :3]
    sigma = SamplingService.estimator_variance(p, 2000)
    assert np.all(np.abs(sampled.fractions[:, :3] - p) <= 5.0 * sigma + 2.0 / cfg.shots_per_point)
    plus_sigma = SamplingService.estimator_variance(exact.p_plus, 2000)
    assert np.all(np.abs(sampled.p_plus - exact.p_plus) <= 5.0 * plus_sigma + 2.0 / cfg.shots_per_point)


def test_leakage_rate_in_samples():
    cfg = small_config(shots_per_point=1000, noise=NoiseConfig(leakage_rate=0.1))
    trace = SamplingService.generate_trace(cfg)
    assert np.mean(trace.null_rate) == pytest.approx(0.1, abs=0.01)


def test_circuit_shots_agree_with_expectation():
    cfg = small_config(total_time=0.01, shots_per_point=300, sampler=SamplerKind.CIRCUIT_SHOTS)
    sampled = SamplingService.generate_trace(cfg)
    exact = SamplingService.generate_trace(cfg.model_copy(update={"sampler": SamplerKind.EXACT_EXPECTATION}))
    p = exact.fractions[:, :3]
    sigma = SamplingService.estimator_variance(p, 300)
    assert np.all(np.abs(sampled.fractions[:, :3] - p) <= 5.0 * sigma + 2.0 / cfg.shots_per_point)


def test_circuit_shots_independent_of_workers(monkeypatch):
    monkeypatch.setattr(settings, "point_chunk_size", 3)
    cfg = small_config(
        total_time=0.02,
        shots_per_point=20,
        sampler=SamplerKind.CIRCUIT_SHOTS,
        noise=NoiseConfig(t2=50.0, leakage_rate=0.05),
    )
    serial = SamplingService.generate_trace(cfg, threads=1)
    parallel = SamplingService.generate_trace(cfg, threads=4)
    assert np.array_equal(serial.fractions, parallel.fractions)
    assert np.array_equal(serial.p_plus, parallel.p_plus)


def test_circuit_shot_budget(monkeypatch):
    monkeypatch.setattr(settings, "circuit_shot_budget", 10)
    with pytest.raises(ResourceLimitError):
        SamplingService.generate_trace(small_config(sampler=SamplerKind.CIRCUIT_SHOTS))


def test_dephasing_washes_out_contrast():
    cfg = small_config(
        sample_rate=10.0, total_time=20.0, sampler=SamplerKind.EXACT_EXPECTATION, noise=NoiseConfig(t2=1.0)
    )
    trace = SamplingService.generate_trace(cfg)
    late = trace.fractions[-1, :3]
    assert np.max(np.abs(late - np.array([2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0]))) < 0.2


def test_estimator_variance():
    assert SamplingService.estimator_variance(0.5, 100) == pytest.approx(0.05)
    assert SamplingService.estimator_variance(np.array([0.0, 1.0]), 10).tolist() == [0.0, 0.0]
    with pytest.raises(ValueError):
        SamplingService.estimator_variance(1.5, 10)
    with pytest.raises(ValueError):
        SamplingService.estimator_variance(0.5, 0)
