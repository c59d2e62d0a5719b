"""Khintchine-constant cross-validation oracle.

K(a) = E |theta . a| over uniform random sign vectors theta is a quantity
with two independent routes at desk scale: direct enumeration of all 2^n
sign vectors, and a linear program over realizable two-signal signatures
constrained to send each signal with probability exactly 1/2. The two
must agree, which exercises the realizable-signature machinery end to
end. Signature columns are indexed (type -1, type +1).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import InstanceTooLargeError, SolverError, ValidationError
from .lp import Constraint, LinearProgram, solve

BRUTE_CAP = 20
LP_CAP = 12
SIG_TOL = 1e-9


@dataclass(frozen=True)
class TwoSignalSignature:
    """Joint (signal, action-type) probabilities of a two-signal scheme.

    plus[i, t] is the joint probability of the first signal and action i
    having type (-1, +1)[t]; minus is the same for the second signal.
    plus + minus must be the all-1/2 matrix and each row of plus must sum
    to 1/2 (each signal fires with probability exactly 1/2).
    """

    plus: np.ndarray
    minus: np.ndarray

    def __init__(self, plus, minus):
        p = np.array(plus, dtype=float)
        m = np.array(minus, dtype=float)
        if p.ndim != 2 or p.shape[1] != 2 or p.shape != m.shape:
            raise ValidationError("signature matrices must both be (n, 2)")
        if np.any(p < -SIG_TOL) or np.any(m < -SIG_TOL):
            raise ValidationError("signature entries must be nonnegative")
        if np.max(np.abs(p + m - 0.5)) > SIG_TOL:
            raise ValidationError("plus + minus must equal the all-1/2 matrix")
        if np.max(np.abs(p.sum(axis=1) - 0.5)) > SIG_TOL:
            raise ValidationError("each signal must fire with probability 1/2")
        p.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, "plus", p)
        object.__setattr__(self, "minus", m)

    @property
    def action_count(self) -> int:
        return self.plus.shape[0]


def sign_dot_products(a: np.ndarray) -> np.ndarray:
    """theta . a for all 2^n sign vectors, ordered by binary state index.

    State index bits follow the action order: bit i of the index is 1
    exactly when action i has type +1, with action 0 the most significant
    bit.
    """
    dots = np.zeros(1)
    for ai in a[::-1]:
        dots = np.concatenate([dots - ai, dots + ai])
    return dots


def khintchine_constant(a) -> float:
    """Average |theta . a| by enumerating all sign vectors."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 1 or a.size == 0:
        raise ValidationError("a must be a nonempty vector")
    if a.size > BRUTE_CAP:
        raise InstanceTooLargeError(2 ** a.size, 2 ** BRUTE_CAP)
    return float(np.mean(np.abs(sign_dot_products(a))))


def _state_types(n: int) -> np.ndarray:
    """(2^n, n) matrix of +-1 types matching sign_dot_products order."""
    idx = np.arange(2 ** n)
    bits = (idx[:, None] >> np.arange(n - 1, -1, -1)) & 1
    return 2 * bits - 1


def _khintchine_lp(a: np.ndarray):
    """Build and solve the two-signal signature LP for objective vector a.

    Variables are the per-state signal probabilities of both signals plus
    the signature entries they induce; the signature is tied to the scheme
    by the realizability equalities and restricted to equal signal
    probabilities.
    """
    n = a.size
    if n > LP_CAP:
        raise InstanceTooLargeError(2 ** n, 2 ** LP_CAP)
    S = 2 ** n
    lam = 1.0 / S
    types = _state_types(n)  # (S, n) of +-1

    # layout: phi_plus (S), phi_minus (S), plus entries (n, 2), minus (n, 2)
    def m_col(sig: int, i: int, t: int) -> int:
        return 2 * S + sig * 2 * n + 2 * i + t

    nv = 2 * S + 4 * n
    cons = []
    for sig in range(2):
        for i in range(n):
            for t in range(2):  # column order (type -1, type +1)
                row = np.zeros(nv)
                row[m_col(sig, i, t)] = 1.0
                hits = np.nonzero(types[:, i] == (2 * t - 1))[0]
                row[hits + sig * S] = -lam
                cons.append(Constraint(row, "=", 0.0))
    for s in range(S):
        row = np.zeros(nv)
        row[s] = 1.0
        row[S + s] = 1.0
        cons.append(Constraint(row, "=", 1.0))
    for i in range(n):
        row = np.zeros(nv)
        row[m_col(0, i, 0)] = 1.0
        row[m_col(0, i, 1)] = 1.0
        cons.append(Constraint(row, "=", 0.5))

    c = np.zeros(nv)
    for i in range(n):
        c[m_col(0, i, 1)] += a[i]
        c[m_col(0, i, 0)] -= a[i]
        c[m_col(1, i, 1)] -= a[i]
        c[m_col(1, i, 0)] += a[i]
    out = solve(LinearProgram(c, cons))
    if out.status != "optimal":
        raise SolverError(f"two-signal signature LP ended with status {out.status}")
    plus = out.point[2 * S: 2 * S + 2 * n].reshape(n, 2)
    minus = out.point[2 * S + 2 * n:].reshape(n, 2)
    phi = np.stack([out.point[:S], out.point[S: 2 * S]], axis=1)
    return float(out.value), plus, minus, phi


def solve_khintchine_lp(a) -> float:
    """K(a) as the optimum of the two-signal signature LP."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 1 or a.size == 0:
        raise ValidationError("a must be a nonempty vector")
    value, _, _, _ = _khintchine_lp(a)
    return value


def khintchine_lp_witness(a) -> Tuple[float, TwoSignalSignature, np.ndarray]:
    """LP optimum together with its optimal signature and scheme."""
    a = np.asarray(a, dtype=float)
    value, plus, minus, phi = _khintchine_lp(a)
    return value, TwoSignalSignature(np.clip(plus, 0.0, None),
                                     np.clip(minus, 0.0, None)), phi


def membership_check(signature: TwoSignalSignature) -> bool:
    """Is a two-signal signature realizable by some signaling scheme?

    The equal-probability and prior-consistency equalities are enforced by
    the TwoSignalSignature type itself, so only realizability is decided
    here, as a feasibility LP over per-state signal probabilities.
    """
    n = signature.action_count
    if n > LP_CAP:
        raise InstanceTooLargeError(2 ** n, 2 ** LP_CAP)
    S = 2 ** n
    lam = 1.0 / S
    types = _state_types(n)
    nv = 2 * S
    cons = []
    targets = (signature.plus, signature.minus)
    for sig in range(2):
        for i in range(n):
            for t in range(2):
                row = np.zeros(nv)
                hits = np.nonzero(types[:, i] == (2 * t - 1))[0]
                row[hits + sig * S] = lam
                cons.append(Constraint(row, "=", float(targets[sig][i, t])))
    for s in range(S):
        row = np.zeros(nv)
        row[s] = 1.0
        row[S + s] = 1.0
        cons.append(Constraint(row, "=", 1.0))
    out = solve(LinearProgram(np.zeros(nv), cons))
    if out.status == "optimal":
        return True
    if out.status == "infeasible":
        return False
    raise SolverError(f"membership LP ended with status {out.status}")
