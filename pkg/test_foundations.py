"""
Third-order interference and product-state linearity checks.
"""

import numpy as np
import pytest

from clocknet.core.errors import ProtocolError
from clocknet.schemas.analytic import PAIR_KEYS, ObservableParams
from clocknet.schemas.foundations import SUBSET_KEYS
from clocknet.services.analytic_service import AnalyticService
from clocknet.services.foundations_service import FoundationsService


@pytest.fixture
def params(random_phases) -> ObservableParams:
    return ObservableParams.from_phases(random_phases())


def test_single_clock_sub_experiment(params):
    probs = FoundationsService.born_experiment(params, (2,))
    assert probs[:3] == pytest.approx(np.full(3, 1.0 / 9.0), abs=1e-12)
    assert probs[3] == pytest.approx(2.0 / 3.0, abs=1e-12)


def test_shelving_circuit_matches_closed_form(params):
    for subset in [(0, 1, 2), (0, 1), (0, 2), (1, 2), (0,)]:
        circuit = FoundationsService.subset_circuit_distribution(params, subset)
        closed = AnalyticService.distribution(params, subset=subset)
        assert np.max(np.abs(circuit[:3] - closed)) < 1e-12


def test_invalid_subsets():
    with pytest.raises(ProtocolError):
        FoundationsService.shelved_register(())
    with pytest.raises(ProtocolError):
        FoundationsService.shelved_register((0, 0))
    with pytest.raises(ProtocolError):
        FoundationsService.shelved_register((3,))


@pytest.mark.parametrize("kept", [0, 1, 2])
def test_single_clock_shelving_empties_both_other_nodes(kept):
    reg = FoundationsService.shelved_register((kept,))
    for j in range(3):
        expected = 1.0 / 3.0 if j == kept else 0.0
        assert reg.population(j, "a") == pytest.approx(expected, abs=1e-12)
    for flag in (4, 5, 6):
        expected = 0.0 if flag - 4 == kept else 1.0 / 3.0
        assert reg.population(flag, "a") == pytest.approx(expected, abs=1e-12)


def test_exact_third_order_term_vanishes(params):
    report = FoundationsService.born_i123(params)
    assert set(report.probabilities) == set(SUBSET_KEYS)
    assert max(abs(i) for i in report.i123) < 1e-12
    assert report.shots == 0 and report.seed is None


def test_dephased_third_order_term_vanishes(random_phases):
    params = ObservableParams.from_phases(random_phases(), ab_envelope=0.4, ga_envelope=0.7)
    report = FoundationsService.born_i123(params)
    assert max(abs(i) for i in report.i123) < 1e-12


def test_sampled_third_order_term_is_consistent_with_zero(params):
    report = FoundationsService.born_i123(params, shots=200_000, seed=3)
    assert report.consistent_with_zero(5.0)
    assert all(e > 0.0 for e in report.i123_error)


def test_sampled_report_is_reproducible(params):
    a = FoundationsService.born_i123(params, shots=10_000, seed=9)
    b = FoundationsService.born_i123(params, shots=10_000, seed=9)
    assert a.i123 == b.i123


def test_injected_term_is_detected(params):
    report = FoundationsService.born_i123(params, inject=0.01)
    assert report.i123 == pytest.approx([0.01, 0.01, 0.01], abs=1e-12)
    assert not report.consistent_with_zero()

    sampled = FoundationsService.born_i123(params, shots=1_000_000, seed=1, inject=0.01)
    assert all(abs(i - 0.01) <= 5.0 * e for i, e in zip(sampled.i123, sampled.i123_error))


def test_product_state_sector_weights(params):
    reg = FoundationsService.product_register(params)
    weights = FoundationsService.sector_weights(reg)
    expected = [1.0 / 27.0, 6.0 / 27.0, 12.0 / 27.0, 8.0 / 27.0]
    assert [weights[k] for k in range(4)] == pytest.approx(expected, abs=1e-12)


def test_product_state_reproduces_entangled_statistics(params):
    report = FoundationsService.product_state_protocol(params)
    assert report.defined
    assert report.success_probability == pytest.approx(2.0 / 9.0, abs=1e-12)
    assert report.total_variation < 1e-12


def test_product_state_sampled(params):
    report = FoundationsService.product_state_protocol(params, shots=200_000, seed=5)
    assert report.successes == pytest.approx(200_000 * 2.0 / 9.0, rel=0.02)
    assert report.total_variation <= 5.0 * report.total_variation_error + 1e-3


def test_ghz_parameters_in_product_state(random_phases):
    params = ObservableParams.from_phases(random_phases(), ghz_n=3)
    report = FoundationsService.product_state_protocol(params)
    assert report.total_variation < 1e-12


def test_envelopes_are_per_pair():
    params = ObservableParams(theta=(0.1, 0.2, 0.3))
    assert set(params.ab_envelopes) == set(PAIR_KEYS)
