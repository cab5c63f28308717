"""
Potential indices of a repeated dilemma
=======================================

Where does the grim-trigger potential peak, how deep are the two basins,
and what log-ratio do they give? Walks through one game and then a sweep
over the sucker loss.
"""
import numpy as np

import pdcoop
from pdcoop import replicator as rep

g = pdcoop.GameParams(r=0.46, s=0.38, delta=0.75)
print(g)

###############################################################################
# The potential on a coarse grid
# ------------------------------
# U starts at 0, rises to its maximum at p* and ends at U(1).

for p in np.linspace(0, 1, 11):
    bar = "#" * int(max(rep.potential(g, p), 0) * 2e4)
    print(f"p={p:.1f}  U={rep.potential(g, p): .6f}  {bar}")

###############################################################################
# Derived indices

st = rep.stats(g)
print(f"p* = sizeBAD = {st.p_star:.4f}, sizeGOOD = {st.size_good:.4f}")
print(f"KE_c = {st.ke_c:.7f}, KE_d = {st.ke_d:.7f}")
print(f"KLR = {st.klr:.3f}, d_ic = {st.d_ic:.4f}")
print("KE_c - KE_d =", st.ke_c - st.ke_d, " (r - (1-delta)(1+s))/12 =", (g.r - 0.25 * 1.38) / 12)

###############################################################################
# KLR falls in s
# --------------
# and solve_s_for_klr inverts it.

for s in (0.05, 0.2, 0.5, 1.0, 2.0, 4.0):
    k = rep.klr(pdcoop.GameParams(0.46, s, 0.75))
    print(f"s={s:<5} KLR={k: .3f}  back-solved s={rep.solve_s_for_klr(0.75, 0.46, k):.6f}")

# KLR >= 0 never comes with sizeGOOD < 1/2
print("counterexamples:", len(rep.check_proposition1(100_000, seed=0)))
