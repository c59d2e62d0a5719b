"""Polynomial-size optimal persuasion for i.i.d. actions.

The optimal scheme is symmetric: each of the n signals fires with
probability 1/n, the recommended action has posterior type mass
proportional to a vector x, and every other action has posterior mass
proportional to y. Feasibility of (x, y) reduces to whether the win
probabilities tau_j = x_j / q_j are realizable by a single-item allocation
rule with n i.i.d. bidders, which is exactly the family of subset
inequalities checked by border_feasible.

solve_s_signature optimizes over (x, y) directly, generating the binding
subset inequalities on demand: it solves, asks border_feasible for a
violated prefix set, adds that cut, and repeats. decompose_reduced_form
recovers an explicit allocation rule at desk scale by solving a
transportation-style LP over all type profiles, and
scheme_from_allocation converts a rule back into a signal sampler by
permutation symmetrization.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import (
    InfeasibleReducedFormError,
    InstanceTooLargeError,
    SolverError,
    ValidationError,
)
from .lp import Constraint, LinearProgram, solve
from .model import DirectScheme, IIDInstance

S_SIG_TOL = 1e-9
BORDER_TOL = 1e-9
REDUCED_FORM_MATCH_TOL = 1e-6
PROFILE_CAP = 2048
FACTORIAL_CAP = 6


@dataclass(frozen=True)
class SSignature:
    """Per-type joint probabilities (recommended action, other actions).

    recommended[j] is the joint probability that a given signal fires and
    its recommended action has type j; other[j] is the same for any one
    non-recommended action. Both sum to 1/n, and
    recommended + (n-1)*other equals the type prior.
    """

    recommended: np.ndarray
    other: np.ndarray
    action_count: int

    def __init__(self, recommended, other, action_count):
        x = np.array(recommended, dtype=float)
        y = np.array(other, dtype=float)
        n = int(action_count)
        if x.shape != y.shape or x.ndim != 1:
            raise ValidationError("s-signature vectors must share one shape")
        if np.any(x < -S_SIG_TOL) or np.any(y < -S_SIG_TOL):
            raise ValidationError("s-signature vectors must be nonnegative")
        if abs(x.sum() - 1.0 / n) > S_SIG_TOL or abs(y.sum() - 1.0 / n) > S_SIG_TOL:
            raise ValidationError("s-signature vectors must each sum to 1/n")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "recommended", x)
        object.__setattr__(self, "other", y)
        object.__setattr__(self, "action_count", n)

    def check_prior(self, type_probs: np.ndarray) -> None:
        resid = self.recommended + (self.action_count - 1) * self.other - type_probs
        if np.max(np.abs(resid)) > S_SIG_TOL:
            raise ValidationError("s-signature is inconsistent with the type prior")


@dataclass(frozen=True)
class ReducedForm:
    """Per-type conditional win probabilities of a symmetric allocation rule."""

    win_probs: np.ndarray

    def __init__(self, win_probs):
        tau = np.array(win_probs, dtype=float)
        if tau.ndim != 1 or tau.size == 0:
            raise ValidationError("reduced form must be a nonempty vector")
        if np.any(tau < -S_SIG_TOL) or np.any(tau > 1.0 + S_SIG_TOL):
            raise ValidationError("win probabilities must lie in [0, 1]")
        tau.setflags(write=False)
        object.__setattr__(self, "win_probs", tau)


@dataclass(frozen=True)
class Signature:
    """Per-signal joint matrices M[i][j, k] = Pr[signal i and action j has type k]."""

    matrices: np.ndarray

    def __init__(self, matrices, type_probs=None):
        M = np.array(matrices, dtype=float)
        if M.ndim != 3 or M.shape[0] != M.shape[1]:
            raise ValidationError("signature must be n matrices of shape (n, m)")
        row_sums = M.sum(axis=2)
        if np.max(np.abs(row_sums - row_sums[:, :1])) > S_SIG_TOL:
            raise ValidationError("each signal's rows must share one total mass")
        marg = M.sum(axis=0)
        if np.max(np.abs(marg - marg[0])) > S_SIG_TOL:
            raise ValidationError("per-action marginals disagree across actions")
        if type_probs is not None and np.max(np.abs(marg[0] - type_probs)) > S_SIG_TOL:
            raise ValidationError("signature marginals disagree with the type prior")
        M.setflags(write=False)
        object.__setattr__(self, "matrices", M)

    @property
    def signal_probs(self) -> np.ndarray:
        return self.matrices.sum(axis=2)[:, 0]


@dataclass(frozen=True)
class AllocationRule:
    """Randomized single-item allocation over all type profiles.

    profiles enumerates [m]^n in the product order used by expand_product;
    probs[t] is a distribution over the n bidders plus a final
    "keep the item" outcome.
    """

    profiles: np.ndarray
    probs: np.ndarray

    def __init__(self, profiles, probs):
        P = np.array(profiles, dtype=int)
        A = np.array(probs, dtype=float)
        if P.ndim != 2 or A.ndim != 2 or A.shape[0] != P.shape[0]:
            raise ValidationError("profiles and probs must have matching rows")
        if A.shape[1] != P.shape[1] + 1:
            raise ValidationError("probs rows need one entry per bidder plus none")
        if np.any(A < -S_SIG_TOL):
            raise ValidationError("allocation probabilities must be nonnegative")
        if np.max(np.abs(A.sum(axis=1) - 1.0)) > S_SIG_TOL:
            raise ValidationError("allocation rows must sum to 1")
        P.setflags(write=False)
        A.setflags(write=False)
        object.__setattr__(self, "profiles", P)
        object.__setattr__(self, "probs", A)

    @property
    def bidder_count(self) -> int:
        return self.profiles.shape[1]

    def probability(self, profile) -> np.ndarray:
        idx = _profile_index(np.asarray(profile, dtype=int)[None, :],
                             int(self.profiles.max()) + 1)
        return self.probs[idx[0]]


@dataclass(frozen=True)
class BorderCheck:
    feasible: bool
    violating_set: Optional[Tuple[int, ...]] = None


def _profile_index(profiles: np.ndarray, m: int) -> np.ndarray:
    n = profiles.shape[1]
    weights = m ** np.arange(n - 1, -1, -1)
    return profiles @ weights


def all_profiles(m: int, n: int, cap: int = PROFILE_CAP) -> np.ndarray:
    total = m ** n
    if total > cap:
        raise InstanceTooLargeError(total, cap)
    return np.array(list(itertools.product(range(m), repeat=n)), dtype=int)


def border_feasible(tau, q, n: int) -> BorderCheck:
    """Subset inequalities for realizability of a symmetric reduced form.

    For every type set A the expected wins handed to members of A cannot
    exceed the probability that some bidder's type falls in A:
    n * sum_{j in A} q_j tau_j <= 1 - (1 - q(A))^n. The binding sets are
    the top sets in tau order, so the m descending prefixes are checked.
    Returns the maximally violating prefix when infeasible.
    """
    tau = np.asarray(tau.win_probs if isinstance(tau, ReducedForm) else tau,
                     dtype=float)
    q = np.asarray(q, dtype=float)
    if tau.shape != q.shape:
        raise ValidationError("tau and q must have the same length")
    if np.any(q <= 0):
        raise ValidationError("type probabilities must be strictly positive")
    order = np.lexsort((np.arange(tau.size), -tau))
    lhs = n * np.cumsum(q[order] * tau[order])
    rhs = 1.0 - (1.0 - np.cumsum(q[order])) ** n
    gaps = lhs - rhs
    worst = int(np.argmax(gaps))
    if gaps[worst] > BORDER_TOL:
        return BorderCheck(False, tuple(sorted(int(j) for j in order[: worst + 1])))
    return BorderCheck(True, None)


def _drop_zero_types(instance: IIDInstance):
    keep = np.nonzero(instance.type_probs > 0)[0]
    if keep.size == instance.type_count:
        return instance, keep
    kept = IIDInstance(
        instance.action_count,
        instance.type_probs[keep],
        instance.sender_payoffs[keep],
        instance.receiver_payoffs[keep],
    )
    return kept, keep


def solve_s_signature(instance: IIDInstance) -> Tuple[SSignature, float]:
    """Optimal realizable s-signature and its sender value.

    Types with zero prior probability are dropped before solving and
    reinstated as zeros in the returned vectors.
    """
    work, keep = _drop_zero_types(instance)
    n, m = work.action_count, work.type_count
    q, xi, rho = work.type_probs, work.sender_payoffs, work.receiver_payoffs

    base = []
    ones_x = np.concatenate([np.ones(m), np.zeros(m)])
    ones_y = np.concatenate([np.zeros(m), np.ones(m)])
    base.append(Constraint(ones_x, "=", 1.0 / n))
    base.append(Constraint(ones_y, "=", 1.0 / n))
    for j in range(m):
        row = np.zeros(2 * m)
        row[j] = 1.0
        row[m + j] = n - 1.0
        base.append(Constraint(row, "=", float(q[j])))
    base.append(Constraint(np.concatenate([rho, -rho]), ">=", 0.0))
    objective = np.concatenate([n * xi, np.zeros(m)])

    cuts: list[tuple[int, ...]] = []
    while True:
        cons = list(base)
        for A in cuts:
            row = np.zeros(2 * m)
            row[list(A)] = float(n)
            qa = q[list(A)].sum()
            cons.append(Constraint(row, "<=", 1.0 - (1.0 - qa) ** n))
        out = solve(LinearProgram(objective, cons))
        if out.status != "optimal":
            raise SolverError(f"s-signature LP ended with status {out.status}")
        x = np.clip(out.point[:m], 0.0, None)
        check = border_feasible(x / q, q, n)
        if check.feasible or check.violating_set in cuts:
            break
        cuts.append(check.violating_set)

    y = np.clip(out.point[m:], 0.0, None)
    full_x = np.zeros(instance.type_count)
    full_y = np.zeros(instance.type_count)
    full_x[keep] = x
    full_y[keep] = y
    # clean residual drift so the returned signature meets its invariants
    full_x *= (1.0 / n) / full_x.sum()
    full_y *= (1.0 / n) / full_y.sum()
    return SSignature(full_x, full_y, n), float(out.value)


def decompose_reduced_form(tau, q, n: int, cap: int = PROFILE_CAP) -> AllocationRule:
    """Explicit allocation rule realizing a feasible symmetric reduced form.

    A constant reduced form is realized exactly by the uniform lottery, so
    that case is closed-form. Otherwise this solves a transportation LP
    over all m^n type profiles: allocation mass per (profile, bidder) is
    constrained to reproduce tau exactly for every bidder and type.
    """
    tau = np.asarray(tau.win_probs if isinstance(tau, ReducedForm) else tau,
                     dtype=float)
    q = np.asarray(q, dtype=float)
    check = border_feasible(tau, q, n)
    if not check.feasible:
        raise InfeasibleReducedFormError(check.violating_set)
    m = q.size
    profiles = all_profiles(m, n, cap)
    S = profiles.shape[0]
    lam = np.prod(q[profiles], axis=1)

    if np.ptp(tau) <= 1e-12 and tau[0] <= 1.0 / n + BORDER_TOL:
        share = min(tau[0], 1.0 / n)
        probs = np.full((S, n + 1), share)
        probs[:, n] = 1.0 - n * share
        return AllocationRule(profiles, probs)

    # variables: A[t, i] flattened row-major
    nv = S * n
    cons = []
    for t in range(S):
        row = np.zeros(nv)
        row[t * n:(t + 1) * n] = 1.0
        cons.append(Constraint(row, "<=", 1.0))
    for i in range(n):
        for j in range(m):
            row = np.zeros(nv)
            hits = np.nonzero(profiles[:, i] == j)[0]
            row[hits * n + i] = lam[hits]
            cons.append(Constraint(row, "=", float(q[j] * tau[j])))
    out = solve(LinearProgram(np.zeros(nv), cons))
    if out.status != "optimal":
        raise SolverError(f"decomposition LP ended with status {out.status}")
    A = np.clip(out.point.reshape(S, n), 0.0, None)
    none = np.clip(1.0 - A.sum(axis=1), 0.0, None)
    probs = np.hstack([A, none[:, None]])
    probs /= probs.sum(axis=1, keepdims=True)
    return AllocationRule(profiles, probs)


def reduced_form_of(rule: AllocationRule, q: np.ndarray) -> np.ndarray:
    """Exhaustive per-bidder-and-type win probabilities of a rule.

    Returns an (n, m) matrix; a symmetric reduced form has equal rows.
    """
    q = np.asarray(q, dtype=float)
    n = rule.bidder_count
    m = q.size
    lam = np.prod(q[rule.profiles], axis=1)
    out = np.empty((n, m))
    for i in range(n):
        w = lam * rule.probs[:, i]
        per_type = np.bincount(rule.profiles[:, i], weights=w, minlength=m)
        out[i] = per_type / q
    return out


class AllocationSchemeSampler:
    """Signal sampler implementing a realizable s-signature.

    Recommends the bidder picked by the allocation rule on a uniformly
    permuted copy of the type profile, which makes the induced scheme
    symmetric: every signal fires with probability 1/n and the
    recommended action's posterior type mass is n * recommended.
    Not thread-safe; clone with independent seeds instead of sharing.
    """

    def __init__(self, instance: IIDInstance, ssig: SSignature, rule: AllocationRule):
        if np.any(instance.type_probs <= 0):
            raise ValidationError("drop zero-probability types before sampling")
        n, m = instance.action_count, instance.type_count
        if rule.bidder_count != n or rule.profiles.max() >= m:
            raise ValidationError("allocation rule does not match the instance")
        tau_target = ssig.recommended / instance.type_probs
        got = reduced_form_of(rule, instance.type_probs)
        if np.max(np.abs(got - tau_target[None, :])) > REDUCED_FORM_MATCH_TOL:
            raise ValidationError(
                "allocation rule's reduced form does not match the s-signature"
            )
        self.instance = instance
        self.ssig = ssig
        self.rule = rule
        self._cum = np.cumsum(rule.probs, axis=1)

    def sample(self, profile, rng: np.random.Generator) -> int:
        return int(self.sample_many(np.asarray(profile, dtype=int)[None, :], rng)[0])

    def sample_many(self, profiles: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        T, n = profiles.shape
        m = self.instance.type_count
        perms = np.argsort(rng.random((T, n)), axis=1)
        permuted = np.take_along_axis(profiles, perms, axis=1)
        rows = self._cum[_profile_index(permuted, m)]
        draws = rng.random((T, 1))
        picked = np.minimum((rows <= draws).sum(axis=1), n)
        none = picked >= n
        if none.any():
            picked[none] = rng.integers(0, n, size=int(none.sum()))
        # the rule allocated in permuted coordinates; map back
        return np.take_along_axis(perms, picked[:, None], axis=1)[:, 0]


def scheme_from_allocation(instance: IIDInstance, ssig: SSignature,
                           rule: AllocationRule) -> AllocationSchemeSampler:
    """Sampler mapping type profiles to signals with s-signature (x, y)."""
    return AllocationSchemeSampler(instance, ssig, rule)


def implement_s_signature(instance: IIDInstance, ssig: SSignature,
                          cap: int = PROFILE_CAP) -> AllocationSchemeSampler:
    """Decompose the induced reduced form and wrap it as a signal sampler."""
    work, keep = _drop_zero_types(instance)
    x = ssig.recommended[keep]
    y = ssig.other[keep]
    tau = x / work.type_probs
    rule = decompose_reduced_form(tau, work.type_probs, work.action_count, cap)
    inner = AllocationSchemeSampler(work, SSignature(x, y, work.action_count), rule)
    if keep.size == instance.type_count:
        return inner
    return _RelabeledSampler(inner, keep, instance.type_count)


class _RelabeledSampler:
    """Adapter translating original type indices to the zero-trimmed ones."""

    def __init__(self, inner: AllocationSchemeSampler, keep: np.ndarray, m: int):
        self.inner = inner
        remap = np.full(m, -1, dtype=int)
        remap[keep] = np.arange(keep.size)
        self.remap = remap

    def sample(self, profile, rng: np.random.Generator) -> int:
        return int(self.sample_many(np.asarray(profile, dtype=int)[None, :], rng)[0])

    def sample_many(self, profiles: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        mapped = self.remap[profiles]
        if np.any(mapped < 0):
            raise ValidationError("profile contains a zero-probability type")
        return self.inner.sample_many(mapped, rng)


def signature_of(instance: IIDInstance, scheme: DirectScheme) -> Signature:
    """Signature of a scheme given over the product expansion's states."""
    n, m = instance.action_count, instance.type_count
    profiles = all_profiles(m, n, cap=max(PROFILE_CAP, scheme.state_count))
    if scheme.state_count != profiles.shape[0]:
        raise ValidationError("scheme rows must cover the product expansion")
    if scheme.signal_count != n:
        raise ValidationError("signature needs one signal per action")
    lam = np.prod(instance.type_probs[profiles], axis=1)
    M = np.empty((n, n, m))
    for i in range(n):
        w = lam * scheme.phi[:, i]
        for j in range(n):
            M[i, j] = np.bincount(profiles[:, j], weights=w, minlength=m)
    return Signature(M, type_probs=instance.type_probs)


def s_signature_of(instance: IIDInstance, scheme: DirectScheme) -> SSignature:
    """Average a scheme's signature into s-signature form."""
    M = signature_of(instance, scheme).matrices
    n = instance.action_count
    diag = np.mean([M[i, i] for i in range(n)], axis=0)
    if n > 1:
        off = sum(M[i, j] for i in range(n) for j in range(n) if i != j)
        off = off / (n * (n - 1))
    else:
        off = diag
    return SSignature(diag, off, n)


def symmetrize(instance: IIDInstance, scheme: DirectScheme) -> DirectScheme:
    """Average a scheme over all action permutations.

    Preserves sender utility and incentive compatibility, and the result's
    signature has identical recommended rows and identical other rows.
    Materializing the average needs n! passes, so this requires n <= 6;
    for larger n use symmetrized_sampler, which draws one permutation per
    invocation instead.
    """
    n, m = instance.action_count, instance.type_count
    if n > FACTORIAL_CAP:
        raise ValidationError(
            f"n={n} is too large to average over {n}! permutations; "
            "use symmetrized_sampler instead"
        )
    profiles = all_profiles(m, n, cap=max(PROFILE_CAP, scheme.state_count))
    if scheme.state_count != profiles.shape[0]:
        raise ValidationError("scheme rows must cover the product expansion")
    if scheme.signal_count != n:
        raise ValidationError("symmetrize needs one signal per action")
    out = np.zeros_like(scheme.phi)
    for perm in itertools.permutations(range(n)):
        p = np.array(perm)
        inv = np.empty(n, dtype=int)
        inv[p] = np.arange(n)
        # relabeled copy: signal i on profile theta is signal inv[i] on the
        # profile whose slot j holds theta[p[j]]
        rows = _profile_index(profiles[:, p], m)
        out += scheme.phi[rows][:, inv]
    out /= math.factorial(n)
    return DirectScheme(out)


class SymmetrizedSampler:
    """Permutation-sampling form of symmetrize for any action count."""

    def __init__(self, instance: IIDInstance, scheme: DirectScheme):
        self.instance = instance
        self.scheme = scheme
        self._m = instance.type_count

    def sample(self, profile, rng: np.random.Generator) -> int:
        n = self.instance.action_count
        perm = rng.permutation(n)
        prof = np.asarray(profile, dtype=int)[perm]
        row = self.scheme.phi[int(_profile_index(prof[None, :], self._m)[0])]
        signal = int(rng.choice(row.size, p=row / row.sum()))
        return int(perm[signal])


def symmetrized_sampler(instance: IIDInstance, scheme: DirectScheme) -> SymmetrizedSampler:
    return SymmetrizedSampler(instance, scheme)
