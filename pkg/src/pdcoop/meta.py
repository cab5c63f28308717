"""Laboratory treatments: bundled table, consistency check, matching to simulations."""

from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from dataclasses import dataclass, replace
from functools import lru_cache
from importlib import resources
from typing import Iterable, Sequence

import numpy as np

from . import replicator as pot
from .game import GameParams

TREATMENTS_RESOURCE = "treatments.csv"
RATE_COLUMNS = ("delta", "r", "s", "game_index", "coop_rate", "n")


class UndefinedCorrelation(ValueError):
    pass


@dataclass(frozen=True)
class Treatment:
    study: str
    n: int
    delta: float
    r: float
    s: float
    published_klr: float
    published_size_good: float
    published_d_ic: float
    duplicate: bool = False
    highlight: bool = False

    @property
    def key(self) -> tuple[float, float, float]:
        return (self.delta, self.r, self.s)

    @property
    def game(self) -> GameParams:
        return GameParams(self.r, self.s, self.delta)


def treatments_csv() -> str:
    return resources.files("pdcoop.data").joinpath(TREATMENTS_RESOURCE).read_text(encoding="utf-8")


@lru_cache(maxsize=1)
def _load() -> tuple[Treatment, ...]:
    lines = [ln for ln in treatments_csv().splitlines() if ln and not ln.startswith("#")]
    out = []
    for row in csv.DictReader(lines):
        out.append(
            Treatment(
                study=row["study"],
                n=int(row["n"]),
                delta=float(row["delta"]),
                r=float(row["r"]),
                s=float(row["s"]),
                published_klr=float(row["klr"]),
                published_size_good=float(row["size_good"]),
                published_d_ic=float(row["d_ic"]),
                duplicate=row["duplicate"] == "1",
                highlight=row["highlight"] == "1",
            )
        )
    return tuple(out)


def bundled_treatments() -> list[Treatment]:
    """All rows of the published treatment table, in print order."""
    return list(_load())


def aggregate_duplicates(treatments: Iterable[Treatment]) -> list[Treatment]:
    """Collapse rows sharing (delta, r, s); observation counts are summed.

    The first occurrence supplies the study name and published values.
    """
    merged: dict[tuple, Treatment] = {}
    for t in treatments:
        if t.key in merged:
            first = merged[t.key]
            merged[t.key] = replace(first, n=first.n + t.n, duplicate=True)
        else:
            merged[t.key] = t
    return list(merged.values())


@dataclass(frozen=True)
class TreatmentCheck:
    treatment: Treatment
    klr: float
    size_good: float
    d_ic: float

    @property
    def klr_residual(self) -> float:
        return abs(self.klr - self.treatment.published_klr)

    @property
    def size_good_residual(self) -> float:
        return abs(self.size_good - self.treatment.published_size_good)

    @property
    def d_ic_residual(self) -> float:
        return abs(self.d_ic - self.treatment.published_d_ic)

    def within(self, klr_tol=0.05, size_good_tol=0.01, d_ic_tol=0.01) -> bool:
        return (
            self.klr_residual <= klr_tol
            and self.size_good_residual <= size_good_tol
            and self.d_ic_residual <= d_ic_tol
        )


def verify_treatment_stats(treatments: Sequence[Treatment] | None = None) -> list[TreatmentCheck]:
    """Recompute the three indices from (delta, r, s) for every row."""
    if treatments is None:
        treatments = bundled_treatments()
    out = []
    for t in treatments:
        st = pot.stats(t.game)
        out.append(TreatmentCheck(t, st.klr, st.size_good, st.d_ic))
    return out


def treatment_coordinates(t: Treatment) -> tuple[float, float]:
    """(d_ic, offset) of a human treatment; the correction term is zero."""
    g = t.game
    return pot.d_ic(g.delta, g.r), pot.klr(g)


def match_algorithm_rate(t: Treatment, results: Sequence[dict], k: int = 100) -> float:
    """Mean ``share_coop`` of the ``k`` cells nearest to ``t`` in (d_ic, offset).

    Distances are Euclidean in raw units. Equal distances keep input order.
    """
    if len(results) < k:
        raise ValueError(f"need at least {k} simulated cells, got {len(results)}")
    d0, x0 = treatment_coordinates(t)
    dic = np.array([row["d_ic"] for row in results], dtype=float)
    off = np.array([row["offset"] for row in results], dtype=float)
    share = np.array([row["share_coop"] for row in results], dtype=float)
    dist = np.hypot(dic - d0, off - x0)
    nearest = np.argsort(dist, kind="stable")[:k]
    return float(share[nearest].mean())


def pearson_correlation(x: Sequence[float], y: Sequence[float]) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or len(x) < 2:
        raise ValueError("need two equal-length sequences of at least two values")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedCorrelation("zero variance")
    rho = float(dx @ dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, rho))


# --- human rate files ----------------------------------------------------------

@dataclass(frozen=True)
class HumanRate:
    delta: float
    r: float
    s: float
    game_index: int
    coop_rate: float
    n: int

    @property
    def key(self) -> tuple[float, float, float]:
        return (self.delta, self.r, self.s)


def read_human_rates(path_or_buf) -> list[HumanRate]:
    """Parse ``delta,r,s,game_index,coop_rate,n`` rows; rates must lie in [0, 1]."""
    if isinstance(path_or_buf, str) and "\n" in path_or_buf:
        path_or_buf = io.StringIO(path_or_buf)
    if not hasattr(path_or_buf, "read"):
        with open(path_or_buf, newline="", encoding="utf-8") as fh:
            return read_human_rates(fh)
    reader = csv.DictReader(path_or_buf)
    missing = set(RATE_COLUMNS) - set(reader.fieldnames or ())
    if missing:
        raise ValueError(f"human rates file lacks columns: {sorted(missing)}")
    out = []
    for row in reader:
        rate = HumanRate(
            float(row["delta"]), float(row["r"]), float(row["s"]),
            int(row["game_index"]), float(row["coop_rate"]), int(row["n"]),
        )
        if not 0.0 <= rate.coop_rate <= 1.0:
            raise ValueError(f"cooperation rate out of [0, 1]: {rate.coop_rate}")
        out.append(rate)
    return out


def correlate(rates: Iterable[HumanRate], results: Sequence[dict], k: int = 100) -> list[dict]:
    """Pearson correlation of human and matched algorithm rates per game index.

    Rates sharing a (delta, r, s) key within one game are pooled, weighted by
    ``n``. Game indices with fewer than two treatments, or without variance,
    report ``nan``.
    """
    by_game: dict[int, dict] = defaultdict(lambda: defaultdict(lambda: [0.0, 0]))
    for hr in rates:
        acc = by_game[hr.game_index][hr.key]
        acc[0] += hr.coop_rate * hr.n
        acc[1] += hr.n
    matched_cache: dict[tuple, float] = {}
    out = []
    for game in sorted(by_game):
        human, algo = [], []
        for key, (tot, n) in sorted(by_game[game].items()):
            if n == 0:
                continue
            if key not in matched_cache:
                t = Treatment("", n, *key, math.nan, math.nan, math.nan)
                matched_cache[key] = match_algorithm_rate(t, results, k)
            human.append(tot / n)
            algo.append(matched_cache[key])
        try:
            rho = pearson_correlation(human, algo)
        except (ValueError, UndefinedCorrelation):
            rho = math.nan
        out.append({"game_index": game, "treatments": len(human), "pearson": rho})
    return out
