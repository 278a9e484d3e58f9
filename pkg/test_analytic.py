"""
Closed-form outcome probabilities.
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from clocknet.schemas.analytic import PAIR_KEYS, ObservableParams
from clocknet.services.analytic_service import AnalyticService


def test_aligned_clocks_always_give_outcome_zero():
    params = ObservableParams(theta=(0.0, 0.0, 0.0))
    assert AnalyticService.distribution(params) == pytest.approx(np.array([1.0, 0.0, 0.0]), abs=1e-12)


def test_fully_dephased_clock_term():
    params = ObservableParams(theta=(0.4, 1.1, 2.9), ab_envelopes={k: 0.0 for k in PAIR_KEYS})
    probs = AnalyticService.distribution(params)
    assert probs == pytest.approx(np.array([2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0]), abs=1e-12)


def test_probabilities_sum_to_one(rng):
    theta = rng.uniform(0, 2 * math.pi, (500, 3))
    phi = rng.uniform(0, 2 * math.pi, (500, 2))
    ab = rng.uniform(0, 1, (500, 3))
    ga = rng.uniform(0, 1, (500, 3))
    probs = AnalyticService.pi_distribution(theta, phi, ab, ga)
    assert np.max(np.abs(probs.sum(axis=-1) - 1.0)) < 1e-12
    assert np.min(probs) > -1e-12


def test_overlap_form_agrees(rng):
    for _ in range(20):
        params = ObservableParams(
            theta=tuple(rng.uniform(0, 2 * math.pi, 3)), phi=tuple(rng.uniform(0, 2 * math.pi, 2))
        )
        for x in range(3):
            assert AnalyticService.expected_pi(x, params) == pytest.approx(
                AnalyticService.expected_pi_overlap_form(x, params), abs=1e-12
            )


def test_ghz_size_multiplies_phases():
    single = ObservableParams(theta=(0.3, 0.6, 0.9), phi=(0.1, 0.2), ghz_n=1)
    ghz = ObservableParams(theta=(0.1, 0.2, 0.3), phi=(0.1 / 3.0, 0.2 / 3.0), ghz_n=3)
    assert AnalyticService.distribution(ghz) == pytest.approx(AnalyticService.distribution(single), abs=1e-12)


def test_joint_distribution_marginalises_to_outcomes(rng):
    theta = rng.uniform(0, 2 * math.pi, (50, 3))
    phi = rng.uniform(0, 2 * math.pi, (50, 2))
    branch_phase = np.concatenate([np.zeros((50, 1)), phi], axis=1)
    joint = AnalyticService.joint_distribution(theta, branch_phase)
    assert joint.shape == (50, 2, 3)
    assert np.max(np.abs(joint.sum(axis=1) - AnalyticService.pi_distribution(theta, phi))) < 1e-12

    plus = np.array([AnalyticService.branch_plus_probability(t) for t in theta])
    assert np.max(np.abs(joint[:, 0, :].sum(axis=-1) - plus)) < 1e-12


def test_subset_of_one_clock():
    params = ObservableParams(theta=(0.5, 1.5, 2.5))
    probs = AnalyticService.distribution(params, subset=(1,))
    assert probs == pytest.approx(np.full(3, 1.0 / 9.0), abs=1e-12)


def test_overlap_phases():
    magnitude, lam = AnalyticService.clock_overlap(0.0, math.pi)
    assert magnitude == 0.0 and lam == 0.0
    magnitude, lam = AnalyticService.clock_overlap(0.0, 1.0)
    assert magnitude == pytest.approx(abs(math.cos(0.5)))
    assert lam == pytest.approx(0.5)


def test_invalid_inputs():
    params = ObservableParams(theta=(0.0, 0.0, 0.0))
    with pytest.raises(ValueError):
        AnalyticService.expected_pi(3, params)
    with pytest.raises(ValidationError):
        ObservableParams(theta=(0.0, 0.0, 0.0), ab_envelopes={"12": 1.5, "13": 1.0, "23": 1.0})
    with pytest.raises(ValidationError):
        ObservableParams(theta=(0.0, 0.0, 0.0), ghz_n=0)
    with pytest.raises(ValueError):
        AnalyticService.envelope(1.0, t2=-1.0)


def test_dephasing_envelopes():
    assert AnalyticService.envelope(5.0, t2=50.0) == pytest.approx(math.exp(-0.2))
    assert AnalyticService.envelope(5.0, t2=50.0, ghz_n=100) == pytest.approx(math.exp(-20.0))
    assert AnalyticService.single_coherence(5.0, t2=50.0) ** 2 == pytest.approx(AnalyticService.envelope(5.0, 50.0))
    assert AnalyticService.envelope(5.0) == 1.0
    assert np.all(AnalyticService.noise_sigma([0.0, 1.0]) == 0.0)
