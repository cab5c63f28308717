"""Replicator-potential indices and Q-learning simulations for the repeated prisoner's dilemma."""

from .game import Action, GameParams, RawPayoffs, State, gt_payoff_matrix, is_prisoners_dilemma, normalize, stage_payoff
from .replicator import (
    PotentialStats,
    d_ic,
    frontier_offset,
    kinetic_energies,
    klr,
    p_star,
    potential,
    potential_derivative,
    size_bad,
    size_good,
    solve_s_for_klr,
    stats,
)
from .qlearning import InitMode, LearnerConfig, MatchConfig, MatchResult, run_match
from .strategies import StrategyLabel, classify_tables, greedy_policy, joint_dynamics

__version__ = "0.1.0"
