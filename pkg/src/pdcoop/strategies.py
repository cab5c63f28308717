"""Classify the joint strategy two learners end up with.

Greedy policies over the four memory states make the joint dynamics a
deterministic map on four states, so limit cycles and sucker frequencies
are computed exactly by following the map.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .game import Action, State

C, D = Action.COOP, Action.DEFECT
ALL_STATES = tuple(State)


class StrategyLabel(enum.Enum):
    MUTUAL_ALLC = "allc"
    MUTUAL_WSLS = "wsls"
    MUTUAL_OSC = "osc"
    OTHER_COOPERATIVE = "other_coop"
    MUTUAL_ALLD = "alld"
    MUTUAL_GT = "gt"
    EXPL = "expl"
    OTHER_NONCOOPERATIVE = "other_noncoop"

    @property
    def cooperative(self) -> bool:
        return self in _COOPERATIVE


_COOPERATIVE = frozenset(
    {
        StrategyLabel.MUTUAL_ALLC,
        StrategyLabel.MUTUAL_WSLS,
        StrategyLabel.MUTUAL_OSC,
        StrategyLabel.OTHER_COOPERATIVE,
    }
)

# fixed label order used for share columns
LABELS = tuple(StrategyLabel)


@dataclass(frozen=True)
class Policy:
    actions: tuple[Action, Action, Action, Action]
    ties: tuple[bool, bool, bool, bool] = (False, False, False, False)

    def __call__(self, state: State) -> Action:
        return self.actions[state]

    @classmethod
    def from_actions(cls, *actions) -> "Policy":
        """Build from four actions in state order CC, CD, DC, DD.

        Accepts :class:`Action` values or the letters ``"C"``/``"D"``.
        """
        if len(actions) == 1 and isinstance(actions[0], str):
            actions = tuple(actions[0])
        acts = tuple(a if isinstance(a, Action) else (C if a == "C" else D) for a in actions)
        if len(acts) != 4:
            raise ValueError("a policy needs one action per state")
        return cls(acts)

    def __str__(self):
        return "".join("C" if a == C else "D" for a in self.actions)


# reference one-memory strategies, state order CC, CD, DC, DD
ALLC = Policy.from_actions("CCCC")
ALLD = Policy.from_actions("DDDD")
GT = Policy.from_actions("CDDD")
WSLS = Policy.from_actions("CDDC")


def greedy_policy(q: np.ndarray) -> Policy:
    """Argmax per state; exact ties go to defection and are flagged."""
    q = np.asarray(q, dtype=float)
    if q.shape != (4, 2) or not np.all(np.isfinite(q)):
        raise ValueError("expected a finite 4x2 Q-table")
    actions = tuple(C if q[i, 0] > q[i, 1] else D for i in range(4))
    ties = tuple(bool(q[i, 0] == q[i, 1]) for i in range(4))
    return Policy(actions, ties)


@dataclass(frozen=True)
class JointDynamics:
    """Deterministic play of two policies from the row player's seat.

    ``cycles[k]`` is the limit cycle reached from start state ``k`` (entered
    at its first repeated state); ``sucker[k]`` holds the row and column
    players' sucker frequencies on that cycle.
    """

    successor: tuple[State, State, State, State]
    paths: tuple[tuple[State, ...], ...]
    cycles: tuple[tuple[State, ...], ...]
    sucker: tuple[tuple[float, float], ...]


def joint_dynamics(row: Policy, col: Policy) -> JointDynamics:
    successor = tuple(State.of(row(st), col(st.mirrored())) for st in ALL_STATES)
    paths, cycles, sucker = [], [], []
    for start in ALL_STATES:
        path = [start]
        while successor[path[-1]] not in path:
            path.append(successor[path[-1]])
        entry = path.index(successor[path[-1]])
        cycle = tuple(path[entry:])
        paths.append(tuple(path))
        cycles.append(cycle)
        n = len(cycle)
        sucker.append(
            (
                sum(st == State.CD for st in cycle) / n,
                sum(st == State.DC for st in cycle) / n,
            )
        )
    return JointDynamics(successor, tuple(paths), tuple(cycles), tuple(sucker))


def _exploitative(d: JointDynamics) -> bool:
    return any(max(f) >= 0.5 for f in d.sucker)


def is_cooperative(d: JointDynamics) -> bool:
    """Mutual defection is not absorbing and nobody is a sucker half the time."""
    return d.successor[State.DD] != State.DD and not _exploitative(d)


def _is_osc(p: Policy) -> bool:
    return p(State.CC) == D and p(State.DD) == C


def label(row: Policy, col: Policy, d: JointDynamics | None = None) -> StrategyLabel:
    if d is None:
        d = joint_dynamics(row, col)
    ra, ca = row.actions, col.actions
    if ra == ca == ALLC.actions:
        return StrategyLabel.MUTUAL_ALLC
    if ra == ca == ALLD.actions:
        return StrategyLabel.MUTUAL_ALLD
    if ra == ca == GT.actions:
        return StrategyLabel.MUTUAL_GT
    if ra == ca == WSLS.actions:
        return StrategyLabel.MUTUAL_WSLS
    if _is_osc(row) and _is_osc(col) and is_cooperative(d):
        return StrategyLabel.MUTUAL_OSC
    if _exploitative(d):
        return StrategyLabel.EXPL
    if is_cooperative(d):
        return StrategyLabel.OTHER_COOPERATIVE
    return StrategyLabel.OTHER_NONCOOPERATIVE


@dataclass(frozen=True)
class Classification:
    label: StrategyLabel
    cooperative: bool
    dynamics: JointDynamics
    row: Policy
    col: Policy

    @property
    def any_tie(self) -> bool:
        return any(self.row.ties) or any(self.col.ties)


def classify_tables(q_row: np.ndarray, q_col: np.ndarray) -> Classification:
    row, col = greedy_policy(q_row), greedy_policy(q_col)
    d = joint_dynamics(row, col)
    lab = label(row, col, d)
    return Classification(lab, lab.cooperative, d, row, col)
