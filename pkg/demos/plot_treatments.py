"""
Laboratory treatments
=====================

Recomputes the indices of every bundled treatment and shows which rows
disagree with their printed values.
"""
from pdcoop.meta import aggregate_duplicates, bundled_treatments, verify_treatment_stats

rows = bundled_treatments()
print(f"{len(rows)} rows, {len(aggregate_duplicates(rows))} distinct treatments")

print(f"{'study':<30} {'delta':>5} {'r':>5} {'s':>5} {'KLR':>7} {'pub':>6} {'sG':>5} {'pub':>5}")
for c in verify_treatment_stats(rows):
    t = c.treatment
    flag = "" if c.within() else "  <-- off"
    print(f"{t.study:<30} {t.delta:5.3g} {t.r:5.2f} {t.s:5.3g} {c.klr:7.3f} {t.published_klr:6.2f} "
          f"{c.size_good:5.2f} {t.published_size_good:5.2f}{flag}")

###############################################################################
# The one treatment with negative KLR but a majority cooperation basin

(bold,) = [t for t in rows if t.highlight]
print("highlighted:", bold.key, bold.published_klr, bold.published_size_good)
