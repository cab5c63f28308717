"""Normalized prisoner's dilemma: payoffs, actions, memory states.

Payoffs are normalized so that temptation is 1 and mutual defection is 0.
The remaining two numbers are the cooperation reward ``r`` and the sucker
loss ``s`` (the stage payoff is ``-s``).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np


class Action(IntEnum):
    COOP = 0
    DEFECT = 1


class State(IntEnum):
    """Joint action of the previous period, seen as (own, opponent)."""

    CC = 0
    CD = 1
    DC = 2
    DD = 3

    @classmethod
    def of(cls, own: Action, opp: Action) -> "State":
        return cls(2 * int(own) + int(opp))

    @property
    def own(self) -> Action:
        return Action(self.value // 2)

    @property
    def opp(self) -> Action:
        return Action(self.value % 2)

    def mirrored(self) -> "State":
        """The same joint action seen from the other player's seat."""
        return State.of(self.opp, self.own)


@dataclass(frozen=True)
class RawPayoffs:
    reward: float
    sucker: float
    temptation: float
    punishment: float


@dataclass(frozen=True)
class GameParams:
    r: float
    s: float
    delta: float

    def __post_init__(self):
        if not (0.0 <= self.r <= 1.0):
            raise ValueError(f"r must lie in [0, 1], got {self.r}")
        if not self.s >= 0.0:
            raise ValueError(f"s must be non-negative, got {self.s}")
        if not (0.0 < self.delta < 1.0):
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")

    @property
    def payoff_table(self) -> np.ndarray:
        """Focal player's stage payoffs indexed ``[own, opp]``."""
        return np.array([[self.r, -self.s], [1.0, 0.0]])


def normalize(raw: RawPayoffs) -> tuple[float, float]:
    """Return ``(r, s)`` after shifting by P and scaling by T - P."""
    span = raw.temptation - raw.punishment
    if not span > 0:
        raise ValueError("temptation must exceed punishment")
    r = (raw.reward - raw.punishment) / span
    s = -(raw.sucker - raw.punishment) / span
    return r, s


def stage_payoff(g: GameParams, own: Action, opp: Action) -> float:
    if own == Action.COOP:
        return g.r if opp == Action.COOP else -g.s
    return 1.0 if opp == Action.COOP else 0.0


def is_prisoners_dilemma(g) -> bool:
    """Check 1 >= r >= 0 >= -s; accepts any object with ``r`` and ``s``."""
    return 0.0 <= g.r <= 1.0 and g.s >= 0.0


def gt_payoff_matrix(g: GameParams) -> np.ndarray:
    """Average discounted payoffs of grim trigger vs. perpetual defection.

    Rows and columns are ordered (coop, defect); entries are for the row
    player.
    """
    w = 1.0 - g.delta
    return np.array([[g.r, -w * g.s], [w, 0.0]])
