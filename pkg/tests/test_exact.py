"""Exact solver and product expansion tests."""

import numpy as np
import pytest

from persuasion import fixtures
from persuasion.errors import InstanceTooLargeError
from persuasion.exact import (
    expand_product,
    honest_scheme,
    no_information_scheme,
    solve_exact,
)
from persuasion.model import (
    ExplicitInstance,
    IIDInstance,
    IndependentInstance,
    Marginal,
    audit,
)


def test_prosecutor_optimum():
    sol = solve_exact(fixtures.prosecutor())
    assert sol.value == pytest.approx(2.0 / 3.0, abs=1e-9)
    # claim guilt always when guilty, exactly half the time when innocent
    assert sol.scheme.phi[1, 1] == pytest.approx(1.0, abs=1e-9)
    assert sol.scheme.phi[0, 1] == pytest.approx(0.5, abs=1e-9)
    assert sol.audit.epsilon_certified <= 1e-9
    assert sol.value == pytest.approx(sol.audit.sender_utility, abs=1e-9)


def test_investor_expansion_optimum():
    sol = solve_exact(expand_product(fixtures.investor()))
    assert sol.value == pytest.approx(5.0 / 9.0, abs=1e-9)
    assert sol.audit.epsilon_certified <= 1e-9


def test_single_action_instance():
    inst = ExplicitInstance([0.4, 0.6], [[2.0], [-1.0]], [[0.0], [0.0]])
    sol = solve_exact(inst)
    assert sol.value == pytest.approx(0.4 * 2.0 - 0.6, abs=1e-9)
    np.testing.assert_allclose(sol.scheme.phi, np.ones((2, 1)))


def test_value_monotone_in_epsilon():
    rng = np.random.default_rng(31)
    for _ in range(8):
        inst = fixtures.random_explicit(rng, 4, 3)
        values = [solve_exact(inst, epsilon=e).value for e in (0.0, 0.05, 0.2, 1.0)]
        for lo, hi in zip(values, values[1:]):
            assert hi >= lo - 1e-9


def test_relaxed_solution_stays_within_its_epsilon():
    rng = np.random.default_rng(33)
    for _ in range(6):
        inst = fixtures.random_explicit(rng, 4, 3)
        eps = float(rng.uniform(0.05, 0.5))
        sol = solve_exact(inst, epsilon=eps)
        # unnormalized slack can dip at most eps times the signal probability
        assert sol.audit.epsilon_certified <= eps + 1e-9


def test_dominates_honest_and_no_information():
    rng = np.random.default_rng(32)
    for _ in range(10):
        inst = fixtures.random_explicit(rng, 5, 3)
        v = solve_exact(inst).value
        assert v >= audit(inst, honest_scheme(inst)).sender_utility - 1e-9
        assert v >= audit(inst, no_information_scheme(inst)).sender_utility - 1e-9


def test_zero_probability_state_gets_valid_row():
    inst = ExplicitInstance(
        [0.0, 1.0], [[1.0, 0.0], [0.0, 1.0]], [[1.0, 0.0], [0.0, 1.0]]
    )
    sol = solve_exact(inst)
    np.testing.assert_allclose(sol.scheme.phi[0], [1.0, 0.0])


def test_expand_investor():
    full = expand_product(fixtures.investor())
    assert full.state_count == 9
    np.testing.assert_allclose(full.state_probs, np.full(9, 1.0 / 9.0))
    # second state is profile (low, moderate)
    np.testing.assert_allclose(full.sender_payoffs[1], [0.0, 1.0])
    np.testing.assert_allclose(full.receiver_payoffs[1], [0.0, 1.1])


def test_expand_single_action():
    inst = IIDInstance(1, [0.3, 0.7], [1.0, 2.0], [0.0, 0.0])
    full = expand_product(inst)
    np.testing.assert_allclose(full.state_probs, [0.3, 0.7])
    assert full.action_count == 1


def test_expand_independent_product_measure():
    inst = IndependentInstance([
        Marginal([0.25, 0.75], [1.0, 0.0], [0.5, 0.5]),
        Marginal([0.2, 0.3, 0.5], [0.0, 1.0, 2.0], [1.0, 0.0, 1.0]),
    ])
    full = expand_product(inst)
    assert full.state_count == 6
    np.testing.assert_allclose(
        full.state_probs,
        [0.25 * 0.2, 0.25 * 0.3, 0.25 * 0.5, 0.75 * 0.2, 0.75 * 0.3, 0.75 * 0.5],
    )


def test_expansion_cap_error_names_cap():
    inst = IIDInstance(8, np.full(5, 0.2), np.zeros(5), np.zeros(5))
    with pytest.raises(InstanceTooLargeError) as err:
        expand_product(inst, cap=1000)
    assert "1000" in str(err.value)
    assert err.value.size == 5 ** 8
