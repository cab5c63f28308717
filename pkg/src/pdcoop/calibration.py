"""Grid-search estimate of the correction factor K(alpha).

For every (delta, r, epsilon) series at one learning rate the log-ratio with
the steepest rise in cooperative share is located. A candidate ``c = 1/K``
predicts that location as ``ln(epsilon / c)``; the candidate with the
smallest mean squared prediction error wins.
"""

from __future__ import annotations

import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

log = logging.getLogger(__name__)

C_GRID = np.linspace(0.005, 0.05, 1000)


@dataclass(frozen=True)
class Series:
    delta: float
    r: float
    epsilon: float
    klr: tuple[float, ...]
    share: tuple[float, ...]


@dataclass(frozen=True)
class KLRStar:
    value: float
    jump: float
    degenerate: bool


@dataclass(frozen=True)
class CalibrationResult:
    alpha: float
    K: float
    c: float
    mse: float
    cells_used: int


def detect_klr_star(klr: Sequence[float], share: Sequence[float]) -> KLRStar:
    """Midpoint of the adjacent pair with the largest increase in share.

    Points are sorted by log-ratio first; ties go to the smaller log-ratio.
    A series that never increases is flagged degenerate.
    """
    if len(klr) != len(share):
        raise ValueError("klr and share lengths differ")
    if len(klr) < 2:
        raise ValueError("need at least two points")
    order = np.argsort(np.asarray(klr, dtype=float), kind="stable")
    x = np.asarray(klr, dtype=float)[order]
    y = np.asarray(share, dtype=float)[order]
    jumps = np.diff(y)
    i = int(np.argmax(jumps))  # first maximum
    return KLRStar(0.5 * (x[i] + x[i + 1]), float(jumps[i]), not jumps[i] > 0)


def mse_curve(series: Sequence[Series], stars: Sequence[float], c_grid: np.ndarray = C_GRID) -> np.ndarray:
    eps = np.array([s.epsilon for s in series])
    obs = np.asarray(stars, dtype=float)
    pred = np.log(eps[None, :] / c_grid[:, None])
    return np.mean((pred - obs[None, :]) ** 2, axis=1)


def estimate_K(series: Iterable[Series], alpha: float = math.nan,
               c_grid: np.ndarray = C_GRID) -> CalibrationResult:
    """Pick the grid value of c = 1/K minimizing the pooled MSE."""
    # canonical order so the result cannot depend on input order
    series = sorted(series, key=lambda s: (s.delta, s.r, s.epsilon))
    kept, stars = [], []
    for s in series:
        st = detect_klr_star(s.klr, s.share)
        if st.degenerate:
            log.warning("skipping flat series delta=%g r=%g eps=%g", s.delta, s.r, s.epsilon)
            continue
        kept.append(s)
        stars.append(st.value)
    if not kept:
        raise ValueError("no eligible series to calibrate on")
    mse = mse_curve(kept, stars, c_grid)
    i = int(np.argmin(mse))
    c = float(c_grid[i])
    return CalibrationResult(alpha, 1.0 / c, c, float(mse[i]), len(kept))


def series_from_results(rows: Iterable[dict], d_ic_min: float = 0.35) -> dict[float, list[Series]]:
    """Group result rows into per-alpha series of (klr, share_coop).

    Only rows with ``d_ic > d_ic_min`` are used.
    """
    groups = defaultdict(list)
    for row in rows:
        if not row["d_ic"] > d_ic_min:
            continue
        key = (round(row["alpha"], 12), round(row["delta"], 12), round(row["r"], 12), round(row["epsilon"], 12))
        groups[key].append((row["klr"], row["share_coop"]))
    out = defaultdict(list)
    for (alpha, delta, r, eps), pts in sorted(groups.items()):
        if len(pts) < 2:
            continue
        pts.sort()
        out[alpha].append(Series(delta, r, eps, tuple(p[0] for p in pts), tuple(p[1] for p in pts)))
    return dict(out)


def calibrate(rows: Iterable[dict], d_ic_min: float = 0.35) -> list[CalibrationResult]:
    """One calibration per learning rate present in ``rows``."""
    by_alpha = series_from_results(rows, d_ic_min)
    results = []
    for alpha in sorted(by_alpha):
        try:
            results.append(estimate_K(by_alpha[alpha], alpha))
        except ValueError as exc:
            log.warning("alpha=%g: %s", alpha, exc)
    return results
