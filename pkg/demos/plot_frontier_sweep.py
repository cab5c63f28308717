"""
Cooperation across the frontier
================================

Places four cells at frontier offsets -3, -1, +1, +3 for a game with
slack incentive constraint, and runs 100 matches of 10^6 periods in each.
Takes about ten seconds per core.
"""
from pdcoop.experiments import GridSpec, build_grid, run_grid

spec = GridSpec(
    alphas=(0.1,), epsilons=(0.1,), pairs=((0.975, 0.975),),
    s_mode="offsets", offsets=(-3.0, -1.0, 1.0, 3.0),
    replications=100, master_seed=12345,
)
cells = build_grid(spec)
for c in cells:
    print(f"offset {c.offset:+.1f}: s = {c.s:.5f}, KLR = {c.stats.klr:.3f}")

###############################################################################
# Run and tabulate

results = run_grid(cells, periods=1_000_000, workers=4)
print(f"{'offset':>7} {'coop':>6} {'allc':>6} {'wsls':>6} {'alld':>6} {'expl':>6}")
for r in results:
    row = r.row()
    print(f"{row['offset']:+7.1f} {row['share_coop']:6.2f} {row['share_allc']:6.2f} "
          f"{row['share_wsls']:6.2f} {row['share_alld']:6.2f} {row['share_expl']:6.2f}")
