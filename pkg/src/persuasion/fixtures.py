"""Instance corpus: named fixtures and seeded random generators.

The named fixtures are the small worked examples used throughout the test
suite; the random generators produce desk-scale instances for the
oracle-equivalence suites. All generators take an explicit numpy
Generator so runs are reproducible from a seed.
"""

from __future__ import annotations

import numpy as np

from .exact import expand_product, profiles_of
from .model import DirectScheme, ExplicitInstance, IIDInstance

Q_FLOOR = 0.05  # keeps random type priors bounded away from zero


def prosecutor() -> ExplicitInstance:
    """Two states (innocent with probability 2/3, guilty), two verdicts.

    Action 0 acquits, action 1 convicts. The judge gets 1 for a correct
    verdict; the prosecutor gets 1 for a conviction regardless. The
    optimal scheme claims guilt whenever guilty and half the time when
    innocent, for sender value 2/3.
    """
    return ExplicitInstance(
        state_probs=[2.0 / 3.0, 1.0 / 3.0],
        sender_payoffs=[[0.0, 1.0], [0.0, 1.0]],
        receiver_payoffs=[[1.0, 0.0], [0.0, 1.0]],
    )


def investor(bonus: float = 0.1) -> IIDInstance:
    """Two i.i.d. stocks with short-term types low/moderate/high.

    The investor (receiver) chases short-term returns (0, 1 + bonus, 2);
    the adviser (sender) is paid by long-term returns (0, 1, 0), so only
    moderate stocks are worth recommending. Optimal sender value is 5/9;
    both full information and no information give 1/3.
    """
    return IIDInstance(
        action_count=2,
        type_probs=[1.0 / 3.0] * 3,
        sender_payoffs=[0.0, 1.0, 0.0],
        receiver_payoffs=[0.0, 1.0 + bonus, 2.0],
    )


def investor_optimal_scheme(instance: IIDInstance = None) -> DirectScheme:
    """Recommend the unique moderate stock when there is one, else uniform."""
    inst = instance if instance is not None else investor()
    profs = profiles_of(inst)
    n = inst.action_count
    phi = np.full((profs.shape[0], n), 1.0 / n)
    for t, prof in enumerate(profs):
        moderate = np.nonzero(prof == 1)[0]
        if moderate.size == 1:
            phi[t] = 0.0
            phi[t, moderate[0]] = 1.0
    return DirectScheme(phi)


def rain_shine_point(delta: float = 0.1) -> ExplicitInstance:
    """Point mass on a rainy day. Actions: walk (0), drive (1).

    The commuter slightly prefers driving in rain (1 vs 1 - delta) and
    strongly prefers walking in sun (1 vs 0); the municipality always
    wants walking. With rain certain, the only IC recommendation is
    driving, so the sender's optimal IC value is 0.
    """
    return ExplicitInstance(
        state_probs=[1.0],
        sender_payoffs=[[1.0, 0.0]],
        receiver_payoffs=[[1.0 - delta, 1.0]],
    )


def rain_shine_mixed(delta: float = 0.1) -> ExplicitInstance:
    """Rain with probability 1/(1+2*delta), sun otherwise.

    Statistically within O(delta) of the point-mass prior, yet always
    recommending walking is IC here and earns the sender 1.
    """
    p_rain = 1.0 / (1.0 + 2.0 * delta)
    return ExplicitInstance(
        state_probs=[p_rain, 1.0 - p_rain],
        sender_payoffs=[[1.0, 0.0], [1.0, 0.0]],
        receiver_payoffs=[[1.0 - delta, 1.0], [1.0, 0.0]],
    )


def three_action_base(delta: float = 0.1) -> ExplicitInstance:
    """Three matching states/actions; state 3 never occurs.

    The receiver wants to match the state; the sender only values action
    2 (the last). Under this prior action 2 is never a posterior best
    response, so every IC scheme gives the sender 0.
    """
    return ExplicitInstance(
        state_probs=[1.0 - 2.0 * delta, 2.0 * delta, 0.0],
        sender_payoffs=[[0.0, 0.0, 1.0]] * 3,
        receiver_payoffs=np.eye(3),
    )


def three_action_shifted(delta: float = 0.1) -> ExplicitInstance:
    """Same game with mass delta moved from state 1 to state 2.

    The optimal IC scheme recommends action 2 on states 1 and 2 and with
    probability delta/(1-2*delta) on state 0, for sender value 3*delta.
    """
    return ExplicitInstance(
        state_probs=[1.0 - 2.0 * delta, delta, delta],
        sender_payoffs=[[0.0, 0.0, 1.0]] * 3,
        receiver_payoffs=np.eye(3),
    )


def investor_blackbox_instance(bonus: float = 0.1) -> ExplicitInstance:
    """Half-scaled investor expansion, payoffs inside [-1, 1].

    The raw investor payoffs reach 2, outside the black-box oracle's
    domain; scaling both payoff matrices by 1/2 preserves optimal schemes
    and halves all values (optimum 5/18).
    """
    full = expand_product(investor(bonus))
    return ExplicitInstance(
        state_probs=full.state_probs,
        sender_payoffs=full.sender_payoffs * 0.5,
        receiver_payoffs=full.receiver_payoffs * 0.5,
    )


# ---------------------------------------------------------------------------
# seeded random generators


def random_simplex(rng: np.random.Generator, size: int,
                   floor: float = Q_FLOOR) -> np.ndarray:
    raw = floor + rng.random(size)
    return raw / raw.sum()


def random_iid(rng: np.random.Generator, max_actions: int = 4,
               max_types: int = 3, nonnegative: bool = False,
               actions: int = None, types: int = None) -> IIDInstance:
    n = int(actions) if actions is not None else int(rng.integers(1, max_actions + 1))
    m = int(types) if types is not None else int(rng.integers(1, max_types + 1))
    lo = 0.0 if nonnegative else -1.0
    return IIDInstance(
        action_count=n,
        type_probs=random_simplex(rng, m),
        sender_payoffs=rng.uniform(lo, 1.0, m),
        receiver_payoffs=rng.uniform(lo, 1.0, m),
    )


def random_explicit(rng: np.random.Generator, states: int,
                    actions: int, nonnegative: bool = False) -> ExplicitInstance:
    lo = 0.0 if nonnegative else -1.0
    return ExplicitInstance(
        state_probs=random_simplex(rng, states),
        sender_payoffs=rng.uniform(lo, 1.0, (states, actions)),
        receiver_payoffs=rng.uniform(lo, 1.0, (states, actions)),
    )


def random_reduced_form(rng: np.random.Generator, types: int) -> np.ndarray:
    return rng.random(types)
