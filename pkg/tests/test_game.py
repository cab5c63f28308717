import itertools

import numpy as np
import pytest

from pdcoop.game import (
    Action,
    GameParams,
    RawPayoffs,
    State,
    gt_payoff_matrix,
    is_prisoners_dilemma,
    normalize,
    stage_payoff,
)


@pytest.mark.parametrize(
    "raw, expected",
    [
        (RawPayoffs(1, 0, 1, 0), (1.0, 0.0)),
        (RawPayoffs(3, 0, 5, 1), (0.5, 0.25)),
        (RawPayoffs(2, -1, 3, 0), (2 / 3, 1 / 3)),
    ],
)
def test_normalize_examples(raw, expected):
    assert normalize(raw) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("t, p", [(1.0, 1.0), (0.0, 1.0)])
def test_normalize_rejects_nonpositive_span(t, p):
    with pytest.raises(ValueError):
        normalize(RawPayoffs(0.5, -0.5, t, p))


def test_normalize_idempotent_and_affine_invariant():
    rng = np.random.default_rng(3)
    for _ in range(200):
        # dyadic payoffs keep every step of the arithmetic exact
        r, s = rng.integers(0, 65) / 64, rng.integers(0, 129) / 64
        assert normalize(RawPayoffs(r, -s, 1.0, 0.0)) == pytest.approx((r, s), abs=1e-15)
        c = 2.0 ** rng.integers(-3, 4)
        d = float(rng.integers(-8, 8))
        raw = RawPayoffs(r, -s, 1.0, 0.0)
        moved = RawPayoffs(c * r + d, c * -s + d, c + d, d)
        assert normalize(moved) == normalize(raw)


def test_stage_payoff():
    g = GameParams(0.46, 0.38, 0.75)
    assert stage_payoff(g, Action.COOP, Action.COOP) == 0.46
    assert stage_payoff(g, Action.DEFECT, Action.DEFECT) == 0.0
    assert stage_payoff(GameParams(0.5, 0.25, 0.5), Action.COOP, Action.DEFECT) == -0.25
    assert stage_payoff(g, Action.DEFECT, Action.COOP) == 1.0
    for own, opp in itertools.product(Action, Action):
        assert g.payoff_table[own, opp] == stage_payoff(g, own, opp)


class _Loose:
    def __init__(self, r, s):
        self.r, self.s = r, s


def test_is_prisoners_dilemma():
    assert is_prisoners_dilemma(GameParams(0.5, 0.25, 0.75))
    assert not is_prisoners_dilemma(_Loose(1.2, 0.25))
    assert not is_prisoners_dilemma(_Loose(0.5, -0.1))


@pytest.mark.parametrize("r, s, delta", [(1.2, 0.1, 0.5), (0.5, -0.1, 0.5), (0.5, 0.1, 1.0), (0.5, 0.1, 0.0)])
def test_game_params_reject(r, s, delta):
    with pytest.raises(ValueError):
        GameParams(r, s, delta)


def test_gt_matrix():
    np.testing.assert_allclose(gt_payoff_matrix(GameParams(0.5, 0.5, 0.9)), [[0.5, -0.05], [0.1, 0]], atol=1e-15)
    np.testing.assert_allclose(gt_payoff_matrix(GameParams(0.46, 0.38, 0.75)), [[0.46, -0.095], [0.25, 0]], atol=1e-15)
    assert gt_payoff_matrix(GameParams(0.5, 0.0, 0.6))[0, 1] == 0.0
    rng = np.random.default_rng(0)
    for _ in range(100):
        g = GameParams(rng.uniform(), rng.uniform(0, 3), rng.uniform(0.01, 0.99))
        A = gt_payoff_matrix(g)
        assert A[1, 0] == 1 - g.delta
        assert A[0, 1] == -g.s * (1 - g.delta)


def test_states():
    assert len(State) == 4 and len(Action) == 2
    assert State.of(Action.COOP, Action.DEFECT) is State.CD
    assert State.CD.mirrored() is State.DC
    for st in State:
        assert State.of(st.own, st.opp) is st
        assert st.mirrored().mirrored() is st
