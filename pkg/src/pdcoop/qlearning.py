"""Two epsilon-greedy Q-learners with one-period memory playing each other.

Q-tables are ``(4, 2)`` float arrays indexed ``[State, Action]``. Each agent
reads the state from its own seat, so the column player sees the mirrored
joint action.

Random draws per agent per period, in order:

1. exploration coin ``u``; explore iff ``u < epsilon``;
2. if exploring, a second draw picks coop iff it is ``< 0.5``;
   if greedy and the two values are exactly equal, a second draw breaks the
   tie the same way; otherwise no second draw.

The initial state comes from a third stream of the match.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numba as nb
import numpy as np

from .game import Action, GameParams, State
from .rng import CounterStream, derive_seed, stream_uniform

ROW, COL, SETUP = 0, 1, 2


class InitMode(enum.Enum):
    OPTIMISTIC = "optimistic"
    PESSIMISTIC = "pessimistic"


@dataclass(frozen=True)
class LearnerConfig:
    alpha: float
    epsilon: float
    delta: float
    init_mode: InitMode = InitMode.OPTIMISTIC

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not (0.0 <= self.epsilon < 1.0):
            raise ValueError(f"epsilon must lie in [0, 1), got {self.epsilon}")
        if not (0.0 < self.delta < 1.0):
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        object.__setattr__(self, "init_mode", InitMode(self.init_mode))


@dataclass(frozen=True)
class MatchConfig:
    periods: int
    seed: int = 0

    def __post_init__(self):
        if self.periods < 1:
            raise ValueError("periods must be >= 1")


@dataclass
class MatchResult:
    q_row: np.ndarray
    q_col: np.ndarray
    coop_frequency: float
    initial_state: State


def init_qtable(cfg: LearnerConfig, g: GameParams) -> np.ndarray:
    if cfg.init_mode is InitMode.OPTIMISTIC:
        value = g.r / (1.0 - g.delta)
    else:
        value = 0.0
    return np.full((4, 2), value)


def select_action(q: np.ndarray, state: State, epsilon: float, rng) -> Action:
    """Epsilon-greedy choice; ``rng`` needs a ``random()`` method."""
    if rng.random() < epsilon:
        return Action.COOP if rng.random() < 0.5 else Action.DEFECT
    qc, qd = q[state, 0], q[state, 1]
    if qc > qd:
        return Action.COOP
    if qd > qc:
        return Action.DEFECT
    return Action.COOP if rng.random() < 0.5 else Action.DEFECT


def q_update(q, state, action, payoff, next_state, alpha, delta) -> np.ndarray:
    """One Q-learning step on a copy of ``q``; the max reads the old table."""
    out = np.array(q, dtype=float, copy=True)
    target = payoff + delta * max(q[next_state, 0], q[next_state, 1])
    out[state, action] = q[state, action] + alpha * (target - q[state, action])
    return out


@nb.njit(cache=True, nogil=True)
def _choose(q, state, epsilon, key, ctr):
    ctr += np.uint64(1)
    if stream_uniform(key, ctr) < epsilon:
        ctr += np.uint64(1)
        return (0 if stream_uniform(key, ctr) < 0.5 else 1), ctr
    qc = q[state, 0]
    qd = q[state, 1]
    if qc > qd:
        return 0, ctr
    if qd > qc:
        return 1, ctr
    ctr += np.uint64(1)
    return (0 if stream_uniform(key, ctr) < 0.5 else 1), ctr


@nb.njit(cache=True, nogil=True)
def play(q_row, q_col, key_row, key_col, state, pay, alpha, epsilon, delta, periods):
    """Run ``periods`` simultaneous steps in place; return joint-coop count.

    ``state`` is the starting state from the row player's seat and ``pay``
    is the focal player's ``[own, opp]`` payoff table.
    """
    ctr_r = np.uint64(0)
    ctr_c = np.uint64(0)
    coop = 0
    for _ in range(periods):
        s_r = state
        s_c = 2 * (state % 2) + state // 2
        a_r, ctr_r = _choose(q_row, s_r, epsilon, key_row, ctr_r)
        a_c, ctr_c = _choose(q_col, s_c, epsilon, key_col, ctr_c)
        n_r = 2 * a_r + a_c
        n_c = 2 * a_c + a_r

        old = q_row[s_r, a_r]
        target = pay[a_r, a_c] + delta * max(q_row[n_r, 0], q_row[n_r, 1])
        q_row[s_r, a_r] = old + alpha * (target - old)

        old = q_col[s_c, a_c]
        target = pay[a_c, a_r] + delta * max(q_col[n_c, 0], q_col[n_c, 1])
        q_col[s_c, a_c] = old + alpha * (target - old)

        if a_r == 0 and a_c == 0:
            coop += 1
        state = n_r
    return coop


def match_keys(seed: int) -> tuple[np.uint64, np.uint64, int]:
    """Row key, column key and initial state for a match seed."""
    key_row = np.uint64(derive_seed(seed, ROW))
    key_col = np.uint64(derive_seed(seed, COL))
    setup = CounterStream(derive_seed(seed, SETUP))
    initial = int(setup.random() * 4)
    return key_row, key_col, initial


def run_match(g: GameParams, cfg: LearnerConfig, match: MatchConfig) -> MatchResult:
    if abs(cfg.delta - g.delta) > 0.0:
        raise ValueError("learner delta must equal the game's delta")
    q_row = init_qtable(cfg, g)
    q_col = q_row.copy()
    key_row, key_col, initial = match_keys(match.seed)
    coop = play(
        q_row, q_col, key_row, key_col, initial, g.payoff_table,
        cfg.alpha, cfg.epsilon, cfg.delta, match.periods,
    )
    return MatchResult(q_row, q_col, coop / match.periods, State(initial))
