"""Parameter grids, seeded Monte Carlo cells and figure-style aggregation.

Seeds: a grid run has one master seed. Cell ``i`` of the canonical grid
order gets ``base_seed = derive_seed(master, i)`` and replication ``j`` of
that cell plays with ``derive_seed(base_seed, j)``. Results therefore do not
depend on how cells are scheduled across workers.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from collections import Counter, defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import replicator as pot
from .game import GameParams, is_prisoners_dilemma
from .qlearning import InitMode, LearnerConfig, MatchConfig, run_match
from .rng import derive_seed
from .strategies import LABELS, StrategyLabel, classify_tables

log = logging.getLogger(__name__)

PAPER_AXIS = tuple(round(0.525 + 0.05 * i, 3) for i in range(10))
PAPER_RATES = tuple(round(0.01 * i, 2) for i in range(1, 11))
KLR_STRATA = tuple(range(-5, 10))

# correction factors K(alpha) = 1 / c, c tabulated per learning rate
TABLE_B1 = {
    0.01: 0.0320,
    0.02: 0.0152,
    0.03: 0.008,
    0.04: 0.0051,
    0.05: 0.0030,
    0.06: 0.0022,
    0.07: 0.0015,
    0.08: 0.0011,
    0.09: 0.0009,
    0.10: 0.0007,
}

RESULT_COLUMNS = (
    "alpha", "epsilon", "delta", "r", "s", "d_ic", "klr", "offset",
    "periods", "replications", "base_seed",
    "share_coop", "share_allc", "share_wsls", "share_osc", "share_other_coop",
    "share_alld", "share_gt", "share_expl", "share_other_noncoop", "tie_rate",
)
_INT_COLUMNS = frozenset({"periods", "replications", "base_seed"})
AGG_COLUMNS = ("d_ic_norm", "offset_norm", "statistic", "value", "neighbor_count")

_SHARE_COLUMN = {
    StrategyLabel.MUTUAL_ALLC: "share_allc",
    StrategyLabel.MUTUAL_WSLS: "share_wsls",
    StrategyLabel.MUTUAL_OSC: "share_osc",
    StrategyLabel.OTHER_COOPERATIVE: "share_other_coop",
    StrategyLabel.MUTUAL_ALLD: "share_alld",
    StrategyLabel.MUTUAL_GT: "share_gt",
    StrategyLabel.EXPL: "share_expl",
    StrategyLabel.OTHER_NONCOOPERATIVE: "share_other_noncoop",
}


def correction_factor(alpha: float) -> float:
    """K(alpha) from the tabulated calibration; only the ten grid rates exist."""
    key = round(alpha, 2)
    if not math.isclose(key, alpha, abs_tol=1e-12) or key not in TABLE_B1:
        raise KeyError(f"no tabulated correction factor for alpha={alpha}")
    return 1.0 / TABLE_B1[key]


def fmt(x) -> str:
    """12 significant digits, the fixed output precision of all CSVs."""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".12g")


@dataclass(frozen=True)
class ParameterCell:
    alpha: float
    epsilon: float
    delta: float
    r: float
    s: float
    replications: int = 100
    base_seed: int = 0
    init_mode: InitMode = InitMode.OPTIMISTIC
    K: float = math.nan

    def __post_init__(self):
        g = self.game  # validates ranges
        if not is_prisoners_dilemma(g):
            raise ValueError("cell is not a prisoner's dilemma")
        if not pot.d_ic(self.delta, self.r) > 0:
            raise ValueError("cells need a slack IC constraint (d_ic > 0)")
        LearnerConfig(self.alpha, self.epsilon, self.delta, self.init_mode)

    @property
    def game(self) -> GameParams:
        return GameParams(self.r, self.s, self.delta)

    @property
    def stats(self) -> pot.PotentialStats:
        return pot.stats(self.game)

    @property
    def offset(self) -> float:
        if not self.K > 0:
            return math.nan
        return pot.frontier_offset(pot.klr(self.game), self.K, self.epsilon)


@dataclass
class CellResult:
    cell: ParameterCell
    periods: int
    counts: dict = field(default_factory=dict)
    ties: int = 0

    @property
    def replications(self) -> int:
        return sum(self.counts.values())

    def share(self, lab: StrategyLabel) -> float:
        n = self.replications
        return self.counts.get(lab, 0) / n if n else math.nan

    @property
    def share_coop(self) -> float:
        return sum(self.share(lab) for lab in LABELS if lab.cooperative)

    @property
    def tie_rate(self) -> float:
        return self.ties / self.replications

    def row(self) -> dict:
        c = self.cell
        st = c.stats
        out = {
            "alpha": c.alpha, "epsilon": c.epsilon, "delta": c.delta, "r": c.r, "s": c.s,
            "d_ic": st.d_ic, "klr": st.klr, "offset": c.offset,
            "periods": self.periods, "replications": self.replications,
            "base_seed": c.base_seed, "share_coop": self.share_coop,
        }
        for lab in LABELS:
            out[_SHARE_COLUMN[lab]] = self.share(lab)
        out["tie_rate"] = self.tie_rate
        return out


@dataclass(frozen=True)
class GridSpec:
    """What to sweep.

    ``s_mode`` picks how the sucker loss is chosen for each (delta, r):
    ``"stratified"`` draws one log-ratio in each unit interval of
    ``klr_strata``; ``"offsets"`` solves for the given frontier offsets using
    K(alpha); ``"values"`` uses ``s_values`` verbatim (the delta-s plane).
    """

    alphas: Sequence[float] = PAPER_RATES
    epsilons: Sequence[float] = PAPER_RATES
    deltas: Sequence[float] = PAPER_AXIS
    rs: Sequence[float] = PAPER_AXIS
    pairs: Sequence[tuple[float, float]] | None = None
    s_mode: str = "stratified"
    klr_strata: Sequence[int] = KLR_STRATA
    offsets: Sequence[float] = ()
    s_values: Sequence[float] = ()
    replications: int = 100
    master_seed: int = 0
    init_mode: InitMode = InitMode.OPTIMISTIC
    K: dict | None = None

    def delta_r_pairs(self) -> list[tuple[float, float]]:
        if self.pairs is not None:
            return [tuple(p) for p in self.pairs]
        return [(d, r) for d in self.deltas for r in self.rs]

    def k_for(self, alpha: float) -> float:
        if self.K and alpha in self.K:
            return float(self.K[alpha])
        try:
            return correction_factor(alpha)
        except KeyError:
            if self.s_mode == "offsets":
                raise
            return math.nan


def stratified_s_sample(delta: float, r: float, rng, strata: Sequence[int] = KLR_STRATA) -> list[float]:
    """One s per unit log-ratio interval ``[k, k + 1)``, in stratum order."""
    targets = [k + rng.uniform(0.0, 1.0) for k in strata]
    return [pot.solve_s_for_klr(delta, r, t) for t in targets]


def build_grid(spec: GridSpec) -> list[ParameterCell]:
    """Expand a spec into cells in canonical order (alpha, epsilon, pair, s).

    Pairs with d_ic <= 0 are dropped. Stratified s values are drawn once per
    (delta, r) pair and shared by every (alpha, epsilon).
    """
    pairs = [(d, r) for d, r in spec.delta_r_pairs() if pot.d_ic(d, r) > 0]
    if spec.s_mode == "stratified":
        s_by_pair = {}
        for i, (d, r) in enumerate(pairs):
            rng = np.random.default_rng(np.random.SeedSequence(spec.master_seed, spawn_key=(1 << 20, i)))
            s_by_pair[(d, r)] = stratified_s_sample(d, r, rng, spec.klr_strata)
    elif spec.s_mode == "values":
        s_by_pair = {p: [s for s in spec.s_values if s > 0] for p in pairs}
    elif spec.s_mode != "offsets":
        raise ValueError(f"unknown s_mode {spec.s_mode!r}")

    cells = []
    for alpha in spec.alphas:
        K = spec.k_for(alpha)
        for eps in spec.epsilons:
            for d, r in pairs:
                if spec.s_mode == "offsets":
                    corr = pot.correction_term(K, eps)
                    svals = [pot.solve_s_for_klr(d, r, off + corr) for off in spec.offsets]
                else:
                    svals = s_by_pair[(d, r)]
                for s in svals:
                    idx = len(cells)
                    cells.append(
                        ParameterCell(
                            alpha=alpha, epsilon=eps, delta=d, r=r, s=s,
                            replications=spec.replications,
                            base_seed=derive_seed(spec.master_seed, idx),
                            init_mode=spec.init_mode, K=K,
                        )
                    )
    return cells


def ds_plane_spec(r: float, alpha: float = 0.01, epsilon: float = 0.01, n: int = 37,
                  delta_range=(0.5, 0.98), s_range=(0.02, 2.0), **kw) -> GridSpec:
    """Equally spaced n x n (delta, s) grid at fixed r."""
    deltas = tuple(float(x) for x in np.linspace(*delta_range, n))
    svals = tuple(float(x) for x in np.linspace(*s_range, n))
    return GridSpec(alphas=(alpha,), epsilons=(epsilon,), deltas=deltas, rs=(r,),
                    s_mode="values", s_values=svals, **kw)


def frontier_curves(r: float, deltas: Iterable[float], K: float, epsilon: float) -> list[dict]:
    """Analytic isolines in the (delta, s) plane at fixed r.

    ``s_klr`` solves KLR = ln(K * epsilon); ``s_sizebad`` solves sizeBAD = 0.5,
    i.e. ``s = r / (1 - delta) - 1``. Entries are nan where undefined.
    """
    target = pot.correction_term(K, epsilon)
    out = []
    for d in deltas:
        if r > 1.0 - d:
            s_klr = pot.solve_s_for_klr(d, r, target)
            s_half = r / (1.0 - d) - 1.0
        else:
            s_klr = s_half = math.nan
        out.append({"delta": float(d), "r": r, "s_klr": s_klr, "s_sizebad": s_half})
    return out


def run_cell(cell: ParameterCell, periods: int) -> CellResult:
    """Play ``cell.replications`` seeded matches and tally the labels."""
    if cell.replications < 1:
        raise ValueError("replications must be >= 1")
    g = cell.game
    cfg = LearnerConfig(cell.alpha, cell.epsilon, cell.delta, cell.init_mode)
    counts: Counter = Counter()
    ties = 0
    for j in range(cell.replications):
        res = run_match(g, cfg, MatchConfig(periods, derive_seed(cell.base_seed, j)))
        cls = classify_tables(res.q_row, res.q_col)
        counts[cls.label] += 1
        ties += cls.any_tie
    return CellResult(cell, periods, dict(counts), ties)


def run_grid(cells: Sequence[ParameterCell], periods: int, workers: int = 1) -> list[CellResult]:
    """Run cells, in parallel threads when ``workers > 1``; output keeps input order."""
    if workers <= 1:
        return [run_cell(c, periods) for c in cells]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda c: run_cell(c, periods), cells))


# --- CSV ---------------------------------------------------------------------

def canonical_sort(rows: list[dict]) -> list[dict]:
    keys = ("alpha", "epsilon", "delta", "r", "s", "base_seed")
    return sorted(rows, key=lambda row: tuple(float(row[k]) for k in keys))


def results_to_csv(results: Iterable[CellResult | dict], sort: bool = True) -> str:
    rows = [r.row() if isinstance(r, CellResult) else r for r in results]
    if sort:
        rows = canonical_sort(rows)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RESULT_COLUMNS)
    for row in rows:
        w.writerow([fmt(row[c]) for c in RESULT_COLUMNS])
    return buf.getvalue()


def write_results(path, results, sort: bool = True) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(results_to_csv(results, sort))


def read_results(path_or_buf) -> list[dict]:
    """Load a results CSV into dicts of floats."""
    if isinstance(path_or_buf, (str, bytes)) or hasattr(path_or_buf, "__fspath__"):
        with open(path_or_buf, newline="") as fh:
            return read_results(fh)
    reader = csv.DictReader(path_or_buf)
    missing = set(RESULT_COLUMNS) - set(reader.fieldnames or ())
    if missing:
        raise ValueError(f"results file lacks columns: {sorted(missing)}")
    return [
        {k: (int(v) if k in _INT_COLUMNS else float(v)) for k, v in row.items()}
        for row in reader
    ]


# --- aggregation ---------------------------------------------------------------

@dataclass(frozen=True)
class AggregationSpec:
    ball_radius: float = 0.05
    grid_points: int = 50
    statistic: str = "median"

    def __post_init__(self):
        if not self.ball_radius > 0:
            raise ValueError("ball radius must be positive")
        if self.statistic not in ("median", "mean"):
            raise ValueError("statistic must be 'median' or 'mean'")


def _minmax(x: np.ndarray) -> np.ndarray:
    lo, hi = np.min(x), np.max(x)
    if hi == lo:
        return np.zeros_like(x, dtype=float)
    return (x - lo) / (hi - lo)


def _columns(results, *names) -> list[np.ndarray]:
    rows = [r.row() if isinstance(r, CellResult) else r for r in results]
    return [np.array([float(row[n]) for row in rows]) for n in names]


def aggregate_neighborhood(results, spec: AggregationSpec = AggregationSpec(),
                           value: str = "share_coop", x: str = "offset") -> list[dict]:
    """Median (or mean) of ``value`` in open balls around a normalized grid.

    ``d_ic`` and ``x`` are min-max scaled over ``results``. Each distinct
    scaled ``d_ic`` level gets ``spec.grid_points`` equally spaced x values
    in [0, 1]. Balls with no members report ``nan`` and a zero count.
    """
    if not results:
        raise ValueError("nothing to aggregate")
    dic, xs, vals = _columns(results, "d_ic", x, value)
    dn, xn = _minmax(dic), _minmax(xs)
    stat = np.median if spec.statistic == "median" else np.mean
    out = []
    for level in np.unique(dn):
        for gx in np.linspace(0.0, 1.0, spec.grid_points):
            inside = np.hypot(dn - level, xn - gx) < spec.ball_radius
            n = int(inside.sum())
            out.append({
                "d_ic_norm": float(level),
                "offset_norm": float(gx),
                "statistic": spec.statistic,
                "value": float(stat(vals[inside])) if n else math.nan,
                "neighbor_count": n,
            })
    return out


def neighbor_counts(results, radius: float = 0.05, value: str = "share_coop",
                    x: str = "offset") -> np.ndarray:
    """Scatter marker sizes: neighbours within ``radius`` in scaled 3-space.

    The point itself is included in its own count.
    """
    dic, xs, vals = _columns(results, "d_ic", x, value)
    pts = np.column_stack([_minmax(dic), _minmax(xs), _minmax(vals)])
    dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
    return (dist < radius).sum(axis=1)


def aggregation_to_csv(records: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(AGG_COLUMNS)
    for rec in records:
        w.writerow([rec["statistic"] if c == "statistic" else fmt(rec[c]) for c in AGG_COLUMNS])
    return buf.getvalue()


def bin_by_unit_klr(results, value: str = "share_coop", x: str = "klr") -> list[dict]:
    """Mean of ``value`` in unit bins ``[k, k + 1)`` of ``x``, per (alpha, d_ic)."""
    if not results:
        raise ValueError("nothing to bin")
    alpha, dic, xs, vals = _columns(results, "alpha", "d_ic", x, value)
    groups = defaultdict(list)
    for a, d, xv, v in zip(alpha, dic, xs, vals):
        if math.isfinite(xv):
            groups[(round(a, 12), round(d, 12), math.floor(xv))].append(v)
    return [
        {"alpha": a, "d_ic": d, "bin_lo": k, "midpoint": k + 0.5,
         "mean": float(np.mean(v)), "count": len(v)}
        for (a, d, k), v in sorted(groups.items())
    ]
