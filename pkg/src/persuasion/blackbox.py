"""Sample-and-solve signaling for black-box priors.

The scheme never materializes a full signaling policy. Given a realized
state, it draws K-1 fresh states from the oracle, inserts the real one at
a uniformly random position among them, solves the relaxed empirical
signaling LP on that multiset, and emits a signal from the inserted row.
Because the real state is exchangeable with the samples, the induced
scheme is epsilon-IC for the true prior, and its expected utility equals
the expected empirical LP optimum.

Payoffs must lie in [-1, 1]; the sample bound of sample_count (natural
log) makes the empirical optimum approach the true optimum from below up
to epsilon. Running with a smaller K keeps everything well defined but
forfeits that guarantee, and epsilon = 0 forfeits convergence entirely,
which is why it triggers a warning.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Protocol, Tuple

import numpy as np

from .errors import SolverError, ValidationError
from .lp import Constraint, LinearProgram, solve
from .model import ExplicitInstance

PAYOFF_BOUND = 1.0 + 1e-12
EMPIRICAL_IC_TOL = 1e-9


class SampleOracle(Protocol):
    """Seeded source of states with payoffs in [-1, 1].

    concurrent_safe declares whether draw_batch may be called from several
    threads at once (each call receives its own generator either way).
    """

    concurrent_safe: bool
    action_count: int

    def draw(self, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
        """Return one state as a (sender, receiver) payoff pair."""
        ...

    def draw_batch(self, k: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
        """Return (sender, receiver) payoff arrays of shape (k, n)."""
        ...


class ExplicitOracle:
    """Black-box wrapper over an explicit instance, for testing and fixtures."""

    concurrent_safe = True

    def __init__(self, instance: ExplicitInstance):
        if (np.abs(instance.sender_payoffs).max() > PAYOFF_BOUND
                or np.abs(instance.receiver_payoffs).max() > PAYOFF_BOUND):
            raise ValidationError("oracle payoffs must lie in [-1, 1]")
        self.instance = instance
        self.action_count = instance.action_count
        self._cum = np.cumsum(instance.state_probs)

    def draw_indices(self, k: int, rng: np.random.Generator) -> np.ndarray:
        return np.searchsorted(self._cum, rng.random(k), side="right").clip(
            0, self.instance.state_count - 1
        )

    def draw(self, rng: np.random.Generator):
        idx = int(self.draw_indices(1, rng)[0])
        return (self.instance.sender_payoffs[idx],
                self.instance.receiver_payoffs[idx])

    def draw_batch(self, k: int, rng: np.random.Generator):
        idx = self.draw_indices(k, rng)
        return (self.instance.sender_payoffs[idx],
                self.instance.receiver_payoffs[idx])


def sample_count(n: int, epsilon: float) -> int:
    """Samples sufficient for an epsilon-optimal epsilon-IC guarantee.

    ceil(256 n^2 / eps^4 * log(4 n / eps)) with the natural logarithm.
    Desk-scale experiments may run with a smaller K (the CLI requires an
    explicit override flag for that), at the price of the guarantee.
    """
    if not 0.0 < epsilon <= 1.0:
        raise ValidationError("epsilon must lie in (0, 1]")
    if n < 1:
        raise ValidationError("need at least one action")
    return math.ceil(256.0 * n * n / epsilon ** 4 * math.log(4.0 * n / epsilon))


@dataclass(frozen=True)
class EmpiricalScheme:
    """Optimal epsilon-IC scheme for the uniform distribution on a sample.

    phi has one row per sample (identical samples share identical rows);
    value is the empirical LP optimum.
    """

    sender_samples: np.ndarray
    receiver_samples: np.ndarray
    phi: np.ndarray
    epsilon: float
    value: float

    @property
    def sample_size(self) -> int:
        return self.phi.shape[0]


def _as_sample_arrays(samples) -> Tuple[np.ndarray, np.ndarray]:
    if isinstance(samples, tuple) and len(samples) == 2:
        s, r = samples
    else:
        s = np.array([p[0] for p in samples], dtype=float)
        r = np.array([p[1] for p in samples], dtype=float)
    s = np.atleast_2d(np.asarray(s, dtype=float))
    r = np.atleast_2d(np.asarray(r, dtype=float))
    if s.shape != r.shape or s.ndim != 2 or s.shape[0] < 1:
        raise ValidationError("samples must be matching (k, n) payoff arrays")
    if max(np.abs(s).max(), np.abs(r).max()) > PAYOFF_BOUND:
        raise ValidationError("sample payoffs must lie in [-1, 1]")
    return s, r


def solve_empirical_lp(samples, epsilon: float) -> EmpiricalScheme:
    """Relaxed empirical signaling LP over a sample multiset.

    Identical samples are bucketed into one weighted state before solving,
    which leaves the program unchanged (an optimal solution always exists
    with equal rows on identical states) and keeps the LP small when the
    sample comes from a finite-support distribution.
    """
    if epsilon < 0:
        raise ValidationError("epsilon must be nonnegative")
    s, r = _as_sample_arrays(samples)
    K, n = s.shape
    combined = np.hstack([s, r])
    uniq, inverse, counts = np.unique(
        combined, axis=0, return_inverse=True, return_counts=True
    )
    inverse = inverse.ravel()
    B = uniq.shape[0]
    us = uniq[:, :n]
    ur = uniq[:, n:]
    w = counts / K

    nv = B * n
    c = (w[:, None] * us).reshape(nv)
    cons = []
    for b in range(B):
        row = np.zeros(nv)
        row[b * n:(b + 1) * n] = 1.0
        cons.append(Constraint(row, "=", 1.0))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            row = np.zeros(nv)
            row[np.arange(B) * n + i] = w * (ur[:, i] - ur[:, j] + epsilon)
            cons.append(Constraint(row, ">=", 0.0))
    out = solve(LinearProgram(c, cons))
    if out.status != "optimal":
        raise SolverError(f"empirical signaling LP ended with status {out.status}")
    phi_b = np.clip(out.point.reshape(B, n), 0.0, None)
    phi_b /= phi_b.sum(axis=1, keepdims=True)
    _check_empirical_ic(phi_b, ur, w, epsilon)
    return EmpiricalScheme(
        sender_samples=s,
        receiver_samples=r,
        phi=phi_b[inverse],
        epsilon=float(epsilon),
        value=float(out.value),
    )


def _check_empirical_ic(phi_b, ur, w, epsilon):
    weighted = phi_b * w[:, None]
    joint = weighted.T @ ur
    alpha = weighted.sum(axis=0)
    slack = joint.diagonal()[:, None] - joint + epsilon * alpha[:, None]
    if slack.min() < -EMPIRICAL_IC_TOL:
        raise SolverError(
            f"empirical scheme violates relaxed IC by {-slack.min():.3e}"
        )


def blackbox_signal(oracle: SampleOracle, state, epsilon: float, K: int,
                    rng: np.random.Generator) -> int:
    """One invocation of the sample-and-solve scheme for a realized state.

    state is the (sender, receiver) payoff pair of the realized state of
    nature. Draws K-1 fresh oracle samples, inserts the real state at a
    uniform position, solves the empirical LP, and samples that row.
    """
    if K < 1:
        raise ValidationError("K must be at least 1")
    if epsilon == 0:
        warnings.warn(
            "epsilon = 0 keeps the scheme exactly IC on the sample but the "
            "empirical optimum no longer converges to the true optimum",
            stacklevel=2,
        )
    s_real, r_real = state
    s_real = np.asarray(s_real, dtype=float)
    r_real = np.asarray(r_real, dtype=float)
    pos = int(rng.integers(K))
    s_fresh, r_fresh = oracle.draw_batch(K - 1, rng)
    s_all = np.insert(s_fresh, pos, s_real, axis=0)
    r_all = np.insert(r_fresh, pos, r_real, axis=0)
    scheme = solve_empirical_lp((s_all, r_all), epsilon)
    row = scheme.phi[pos]
    return int(rng.choice(row.size, p=row / row.sum()))


class BlackboxSampler:
    """Reusable sample-and-solve sampler with fixed oracle, epsilon, and K.

    Consumes (sender, receiver) payoff pairs; every call runs its own
    sampling and LP solve, so there is no vectorized batch path.
    """

    def __init__(self, oracle: SampleOracle, epsilon: float, K: int):
        if K < 1:
            raise ValidationError("K must be at least 1")
        if epsilon == 0:
            warnings.warn(
                "epsilon = 0 keeps the scheme exactly IC on the sample but "
                "the empirical optimum no longer converges to the true optimum",
                stacklevel=2,
            )
        self.oracle = oracle
        self.epsilon = float(epsilon)
        self.K = int(K)
        self.last_value: Optional[float] = None

    def sample(self, state, rng: np.random.Generator) -> int:
        s_real, r_real = state
        pos = int(rng.integers(self.K))
        s_fresh, r_fresh = self.oracle.draw_batch(self.K - 1, rng)
        s_all = np.insert(s_fresh, pos, np.asarray(s_real, dtype=float), axis=0)
        r_all = np.insert(r_fresh, pos, np.asarray(r_real, dtype=float), axis=0)
        scheme = solve_empirical_lp((s_all, r_all), self.epsilon)
        self.last_value = scheme.value
        row = scheme.phi[pos]
        return int(rng.choice(row.size, p=row / row.sum()))
