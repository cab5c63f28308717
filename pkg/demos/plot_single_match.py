"""
Two Q-learners in one match
===========================

Runs a single seeded match, prints the final Q-tables, the greedy
policies and the label of the joint strategy.
"""
import numpy as np

from pdcoop import GameParams, LearnerConfig, MatchConfig, run_match
from pdcoop.strategies import classify_tables

g = GameParams(r=0.975, s=0.5, delta=0.975)
cfg = LearnerConfig(alpha=0.1, epsilon=0.1, delta=g.delta)

###############################################################################
# Play 10^6 periods

res = run_match(g, cfg, MatchConfig(periods=1_000_000, seed=2024))
np.set_printoptions(precision=3, suppress=True)
print("row Q (rows CC, CD, DC, DD; columns C, D)\n", res.q_row)
print("col Q\n", res.q_col)
print(f"mutual cooperation in {res.coop_frequency:.1%} of periods")

###############################################################################
# What did they learn?

c = classify_tables(res.q_row, res.q_col)
print("policies:", c.row, c.col, "->", c.label.value, "cooperative" if c.cooperative else "not cooperative")
for start, cyc in zip(("CC", "CD", "DC", "DD"), c.dynamics.cycles):
    print(f"  from {start}: cycle {' > '.join(s.name for s in cyc)}")

###############################################################################
# Same seed, same result

again = run_match(g, cfg, MatchConfig(periods=1_000_000, seed=2024))
print("bit-identical rerun:", again.q_row.tobytes() == res.q_row.tobytes())
