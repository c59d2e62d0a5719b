"""s-signature solver, Border feasibility, decomposition, symmetrization."""

import numpy as np
import pytest

from persuasion import fixtures
from persuasion.errors import InfeasibleReducedFormError, ValidationError
from persuasion.exact import expand_product, honest_scheme, solve_exact
from persuasion.iid import (
    SSignature,
    border_feasible,
    decompose_reduced_form,
    implement_s_signature,
    reduced_form_of,
    s_signature_of,
    scheme_from_allocation,
    signature_of,
    solve_s_signature,
    symmetrize,
    symmetrized_sampler,
)
from persuasion.model import IIDInstance, audit
from persuasion.verify import allocation_exists_bruteforce


def assert_valid_ssig(inst, ssig):
    n = inst.action_count
    assert ssig.recommended.sum() == pytest.approx(1.0 / n, abs=1e-9)
    assert ssig.other.sum() == pytest.approx(1.0 / n, abs=1e-9)
    ssig.check_prior(inst.type_probs)
    margin = inst.receiver_payoffs @ (ssig.recommended - ssig.other)
    assert margin >= -1e-9


# ---------------------------------------------------------------------------
# solve_s_signature


def test_investor_value_and_reference_point():
    inst = fixtures.investor()
    ssig, value = solve_s_signature(inst)
    assert value == pytest.approx(5.0 / 9.0, abs=1e-9)
    assert_valid_ssig(inst, ssig)
    tau = ssig.recommended / inst.type_probs
    assert border_feasible(tau, inst.type_probs, 2).feasible
    # the hand-derived optimum (1/9, 5/18, 1/9) attains the same value
    x_ref = np.array([1.0 / 9.0, 5.0 / 18.0, 1.0 / 9.0])
    y_ref = np.array([2.0 / 9.0, 1.0 / 18.0, 2.0 / 9.0])
    assert_valid_ssig(inst, SSignature(x_ref, y_ref, 2))
    assert 2.0 * inst.sender_payoffs @ x_ref == pytest.approx(value, abs=1e-12)


def test_single_type_instance():
    inst = IIDInstance(3, [1.0], [0.7], [0.4])
    ssig, value = solve_s_signature(inst)
    assert value == pytest.approx(0.7, abs=1e-9)
    np.testing.assert_allclose(ssig.recommended, [1.0 / 3.0], atol=1e-9)
    np.testing.assert_allclose(ssig.other, [1.0 / 3.0], atol=1e-9)


def test_aligned_interests_match_honest_value():
    rng = np.random.default_rng(51)
    q = fixtures.random_simplex(rng, 3)
    pay = rng.uniform(0, 1, 3)
    inst = IIDInstance(2, q, pay, pay)
    _, value = solve_s_signature(inst)
    full = expand_product(inst)
    honest = audit(full, honest_scheme(full)).sender_utility
    assert value == pytest.approx(solve_exact(full).value, abs=1e-9)
    assert value == pytest.approx(honest, abs=1e-9)


def test_zero_probability_types_are_dropped():
    inst = IIDInstance(2, [0.5, 0.0, 0.5], [0.0, 9.9, 1.0], [1.0, -5.0, 0.0])
    ssig, value = solve_s_signature(inst)
    assert ssig.recommended[1] == 0.0
    assert ssig.other[1] == 0.0
    ref = IIDInstance(2, [0.5, 0.5], [0.0, 1.0], [1.0, 0.0])
    _, ref_value = solve_s_signature(ref)
    assert value == pytest.approx(ref_value, abs=1e-9)


def test_type_relabeling_invariance():
    rng = np.random.default_rng(52)
    for _ in range(10):
        inst = fixtures.random_iid(rng, max_actions=3, max_types=3)
        perm = rng.permutation(inst.type_count)
        relabeled = IIDInstance(
            inst.action_count,
            inst.type_probs[perm],
            inst.sender_payoffs[perm],
            inst.receiver_payoffs[perm],
        )
        ssig, value = solve_s_signature(inst)
        ssig_p, value_p = solve_s_signature(relabeled)
        assert value_p == pytest.approx(value, abs=1e-9)
        # the relabeled copy of the original optimum attains the same value
        n = inst.action_count
        attained = n * relabeled.sender_payoffs @ ssig.recommended[perm]
        assert attained == pytest.approx(value_p, abs=1e-9)
        assert_valid_ssig(relabeled, SSignature(
            ssig.recommended[perm], ssig.other[perm], n))


# ---------------------------------------------------------------------------
# Border feasibility


def test_border_uniform_always_feasible():
    rng = np.random.default_rng(53)
    for n in (1, 2, 4):
        q = fixtures.random_simplex(rng, 3)
        assert border_feasible(np.full(3, 1.0 / n), q, n).feasible


def test_border_infeasible_example():
    check = border_feasible([1.0, 0.0], [0.5, 0.5], 2)
    assert not check.feasible
    assert check.violating_set == (0,)
    assert not allocation_exists_bruteforce([1.0, 0.0], [0.5, 0.5], 2)


def test_border_tight_feasible_example():
    # realized by: give to a type-0 bidder uniformly if any, else type-1
    check = border_feasible([0.75, 0.25], [0.5, 0.5], 2)
    assert check.feasible
    assert allocation_exists_bruteforce([0.75, 0.25], [0.5, 0.5], 2)


def test_border_agrees_with_bruteforce():
    rng = np.random.default_rng(54)
    for _ in range(60):
        n = int(rng.integers(1, 5))
        m = int(rng.integers(1, 4))
        q = fixtures.random_simplex(rng, m)
        tau = fixtures.random_reduced_form(rng, m)
        assert border_feasible(tau, q, n).feasible == \
            allocation_exists_bruteforce(tau, q, n)


# ---------------------------------------------------------------------------
# decomposition


def test_decompose_uniform_gives_uniform_lottery():
    rule = decompose_reduced_form(np.full(3, 0.5), np.full(3, 1.0 / 3.0), 2)
    np.testing.assert_allclose(rule.probs[:, :2], np.full((9, 2), 0.5), atol=1e-12)


def test_decompose_matches_explicit_construction():
    rule = decompose_reduced_form([0.75, 0.25], [0.5, 0.5], 2)
    got = reduced_form_of(rule, np.array([0.5, 0.5]))
    np.testing.assert_allclose(got, [[0.75, 0.25], [0.75, 0.25]], atol=1e-8)


def test_decompose_infeasible_reports_violating_set():
    with pytest.raises(InfeasibleReducedFormError) as err:
        decompose_reduced_form([1.0, 0.0], [0.5, 0.5], 2)
    assert err.value.violating_set == (0,)


def test_decompose_identity_on_random_feasible_draws():
    rng = np.random.default_rng(55)
    done = 0
    while done < 25:
        n = int(rng.integers(1, 5))
        m = int(rng.integers(1, 4))
        q = fixtures.random_simplex(rng, m)
        tau = fixtures.random_reduced_form(rng, m)
        if not border_feasible(tau, q, n).feasible:
            continue
        rule = decompose_reduced_form(tau, q, n)
        got = reduced_form_of(rule, q)
        np.testing.assert_allclose(got, np.tile(tau, (n, 1)), atol=1e-8)
        done += 1


# ---------------------------------------------------------------------------
# scheme from allocation


def test_scheme_single_action_always_first_signal():
    inst = IIDInstance(1, [0.6, 0.4], [1.0, 0.0], [1.0, 0.0])
    ssig, _ = solve_s_signature(inst)
    sampler = implement_s_signature(inst, ssig)
    rng = np.random.default_rng(0)
    assert sampler.sample([0], rng) == 0
    assert sampler.sample([1], rng) == 0


def test_scheme_uninformative_signature_statistics():
    inst = IIDInstance(2, [0.5, 0.5], [1.0, 0.0], [0.3, 0.9])
    q = inst.type_probs
    ssig = SSignature(q / 2, q / 2, 2)
    sampler = implement_s_signature(inst, ssig)
    rng = np.random.default_rng(77)
    profiles = rng.integers(0, 2, size=(40000, 2))
    recs = sampler.sample_many(profiles, rng)
    # summing the per-signal joint mass x_j = q_j/n over both signals, the
    # recommended action's type should simply follow the prior
    for j in (0, 1):
        hit = (profiles[np.arange(len(recs)), recs] == j).mean()
        assert hit == pytest.approx(q[j], abs=0.02)
    assert abs((recs == 0).mean() - 0.5) < 0.02


def test_scheme_reduced_form_mismatch_rejected():
    inst = IIDInstance(2, [0.5, 0.5], [1.0, 0.0], [0.3, 0.9])
    ssig = SSignature([0.375, 0.125], [0.125, 0.375], 2)
    rule = decompose_reduced_form([0.5, 0.5], inst.type_probs, 2)
    with pytest.raises(ValidationError):
        scheme_from_allocation(inst, ssig, rule)


def test_investor_sampler_hits_target_utility():
    inst = fixtures.investor()
    ssig, value = solve_s_signature(inst)
    sampler = implement_s_signature(inst, ssig)
    rng = np.random.default_rng(78)
    trials = 200000
    profiles = rng.integers(0, 3, size=(trials, 2))
    recs = sampler.sample_many(profiles, rng)
    util = inst.sender_payoffs[profiles[np.arange(trials), recs]]
    se = util.std(ddof=0) / np.sqrt(trials)
    assert abs(util.mean() - 5.0 / 9.0) <= 3 * se


# ---------------------------------------------------------------------------
# symmetrization


def test_symmetrize_preserves_value_and_evens_signature():
    inst = fixtures.investor()
    full = expand_product(inst)
    sol = solve_exact(full)
    sym = symmetrize(inst, sol.scheme)
    assert audit(full, sym).sender_utility == pytest.approx(sol.value, abs=1e-12)
    M = signature_of(inst, sym).matrices
    np.testing.assert_allclose(M[0, 0], M[1, 1], atol=1e-12)
    np.testing.assert_allclose(M[0, 1], M[1, 0], atol=1e-12)


def test_symmetrize_fixed_point():
    inst = fixtures.investor()
    once = symmetrize(inst, fixtures.investor_optimal_scheme(inst))
    twice = symmetrize(inst, once)
    np.testing.assert_allclose(twice.phi, once.phi, atol=1e-12)


def test_symmetrize_honest_scheme_keeps_utility():
    rng = np.random.default_rng(57)
    for _ in range(6):
        inst = fixtures.random_iid(rng, max_actions=3, max_types=3)
        full = expand_product(inst)
        scheme = honest_scheme(full)
        sym = symmetrize(inst, scheme)
        assert audit(full, sym).sender_utility == pytest.approx(
            audit(full, scheme).sender_utility, abs=1e-9
        )


def test_symmetrize_rejects_large_action_counts():
    inst = IIDInstance(7, [1.0], [1.0], [1.0])
    from persuasion.model import DirectScheme

    scheme = DirectScheme(np.full((1, 7), 1.0 / 7.0))
    with pytest.raises(ValidationError) as err:
        symmetrize(inst, scheme)
    assert "symmetrized_sampler" in str(err.value)


def test_symmetrized_sampler_matches_average():
    rng = np.random.default_rng(58)
    inst = fixtures.random_iid(rng, actions=3, types=2)
    full = expand_product(inst)
    scheme = honest_scheme(full)
    sym = symmetrize(inst, scheme)
    sampler = symmetrized_sampler(inst, scheme)
    counts = np.zeros((full.state_count, 3))
    from persuasion.exact import profiles_of

    for t, prof in enumerate(profiles_of(inst)):
        for _ in range(4000):
            counts[t, sampler.sample(prof, rng)] += 1
    emp = counts / counts.sum(axis=1, keepdims=True)
    assert np.max(np.abs(emp - sym.phi)) < 0.05


def test_s_signature_of_symmetrized_scheme():
    inst = fixtures.investor()
    sym = symmetrize(inst, fixtures.investor_optimal_scheme(inst))
    ssig = s_signature_of(inst, sym)
    assert_valid_ssig(inst, ssig)
    value = 2.0 * inst.sender_payoffs @ ssig.recommended
    assert value == pytest.approx(5.0 / 9.0, abs=1e-12)
