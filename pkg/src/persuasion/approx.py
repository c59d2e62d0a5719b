"""Independent per-action approximate signaling for i.i.d. actions.

Instead of coordinating one recommendation across actions, this scheme
signals HIGH or LOW for every action independently, calibrated by the
optimal solution of the s-signature relaxation that drops realizability.
Each component is HIGH with probability 1/n; conditioned on HIGH an
action's posterior type mass is n*x, on LOW it is n*y. Recommending any
HIGH action when one exists achieves at least a 1 - (1 - 1/n)^n fraction
of the relaxation value for nonnegative payoffs, and the relaxation value
upper-bounds the true optimum.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import SolverError, ValidationError
from .lp import Constraint, LinearProgram, solve
from .model import IIDInstance

HIGH = True
LOW = False
_X_VS_Q_TOL = 1e-9


@dataclass(frozen=True)
class ComponentSignalVector:
    """One binary component signal per action; True means HIGH."""

    high: np.ndarray

    def __init__(self, high):
        h = np.array(high, dtype=bool)
        if h.ndim != 1 or h.size == 0:
            raise ValidationError("need one component per action")
        h.setflags(write=False)
        object.__setattr__(self, "high", h)

    def __iter__(self):
        return iter(bool(v) for v in self.high)


def solve_relaxation(instance: IIDInstance) -> Tuple[np.ndarray, np.ndarray, float]:
    """Optimal (x, y) of the s-signature program without realizability.

    The value n * xi . x is an upper bound on the optimal sender utility;
    the gap to the true optimum is exactly what dropping the allocation
    feasibility constraints buys.
    """
    n, m = instance.action_count, instance.type_count
    q, xi, rho = instance.type_probs, instance.sender_payoffs, instance.receiver_payoffs
    cons = [Constraint(np.concatenate([np.ones(m), np.zeros(m)]), "=", 1.0 / n)]
    for j in range(m):
        row = np.zeros(2 * m)
        row[j] = 1.0
        row[m + j] = n - 1.0
        cons.append(Constraint(row, "=", float(q[j])))
    cons.append(Constraint(np.concatenate([rho, -rho]), ">=", 0.0))
    if n == 1:
        cons.append(Constraint(np.concatenate([np.zeros(m), np.ones(m)]), "=", 1.0))
    out = solve(LinearProgram(np.concatenate([n * xi, np.zeros(m)]), cons))
    if out.status != "optimal":
        raise SolverError(f"relaxation LP ended with status {out.status}")
    x = np.clip(out.point[:m], 0.0, None)
    y = np.clip(out.point[m:], 0.0, None)
    return x, y, float(out.value)


def independent_signal(x: np.ndarray, y: np.ndarray, q: np.ndarray,
                       profile, rng: np.random.Generator) -> ComponentSignalVector:
    """Draw the per-action HIGH/LOW vector for one type profile."""
    profile = np.asarray(profile, dtype=int)
    x = np.asarray(x, dtype=float)
    q = np.asarray(q, dtype=float)
    if np.any(x > q + _X_VS_Q_TOL):
        j = int(np.argmax(x - q))
        raise ValidationError(f"x[{j}]={x[j]!r} exceeds q[{j}]={q[j]!r}")
    if np.any(q[profile] <= 0):
        raise ValidationError("profile contains a zero-probability type")
    p_high = np.minimum(x / np.where(q > 0, q, 1.0), 1.0)
    return ComponentSignalVector(rng.random(profile.size) < p_high[profile])


def to_direct_recommendation(signal: ComponentSignalVector,
                             rng: np.random.Generator) -> int:
    """Uniform choice among HIGH components, or among all when none is HIGH."""
    high = np.nonzero(signal.high)[0]
    pool = high if high.size else np.arange(signal.high.size)
    return int(pool[rng.integers(pool.size)])


class IndependentSignalSampler:
    """End-to-end direct scheme built from independent component signals.

    Consumes type profiles. The multiplicative guarantee applies to
    nonnegative payoffs; negative payoffs are tolerated with a warning
    because the sampler itself stays well defined.
    """

    def __init__(self, instance: IIDInstance,
                 x: np.ndarray = None, y: np.ndarray = None):
        if x is None or y is None:
            x, y, _ = solve_relaxation(instance)
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        q = instance.type_probs
        if np.any(x > q + _X_VS_Q_TOL):
            raise ValidationError("x exceeds the type prior; y would be negative")
        if (np.min(instance.sender_payoffs) < 0
                or np.min(instance.receiver_payoffs) < 0):
            warnings.warn(
                "negative payoffs: the approximation guarantee does not apply",
                stacklevel=2,
            )
        self.instance = instance
        self.x = x
        self.y = y
        self._p_high = np.minimum(x / np.where(q > 0, q, 1.0), 1.0)

    def sample(self, profile, rng: np.random.Generator) -> int:
        sig = ComponentSignalVector(
            rng.random(len(profile)) < self._p_high[np.asarray(profile, dtype=int)]
        )
        return to_direct_recommendation(sig, rng)

    def sample_many(self, profiles: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return self.sample_many_detailed(profiles, rng)[0]

    def sample_many_detailed(self, profiles: np.ndarray, rng: np.random.Generator):
        """Recommendations plus the underlying HIGH/LOW component matrix."""
        T, n = profiles.shape
        highs = rng.random((T, n)) < self._p_high[profiles]
        # uniform random keys: the argmax over a masked subset is uniform on it
        keys = rng.random((T, n))
        masked = np.where(highs, keys, -1.0)
        any_high = highs.any(axis=1)
        recs = np.where(any_high, masked.argmax(axis=1), keys.argmax(axis=1))
        return recs, highs
