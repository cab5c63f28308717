"""Potential function of the stochastic replicator dynamics under grim trigger.

Every quantity here is closed form in the two numbers

    a = r - (1 - delta)        (gain of GT over defection against GT)
    b = (1 - delta) * s        (loss of GT against perpetual defection)

The replicator drift for the share ``p`` of grim-trigger players is
``p (1 - p) ((a + b) p - b)``, so the potential ``U`` is a quartic with
``U(0) = 0`` and an interior maximum at ``p* = b / (a + b)`` whenever
``a > 0`` and ``b > 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .game import GameParams

SQRT2 = math.sqrt(2.0)

# bracket limits for the s search
S_MIN = 1e-12
S_MAX = 1e6


class NoInteriorMaximum(ValueError):
    """The potential has no maximum strictly inside (0, 1)."""


class UndefinedKLR(ValueError):
    """A kinetic energy is not strictly positive, so the log-ratio is undefined."""


class InfeasibleTarget(ValueError):
    """No s in the search bracket reaches the requested log-ratio."""


@dataclass(frozen=True)
class PotentialStats:
    a: float
    b: float
    p_star: float
    ke_c: float
    ke_d: float
    klr: float
    size_bad: float
    size_good: float
    d_ic: float


def _ab(g: GameParams) -> tuple[float, float]:
    w = 1.0 - g.delta
    return g.r - w, w * g.s


def d_ic(delta: float, r: float) -> float:
    """Signed distance of (delta, r) to the line r + delta = 1."""
    return (delta + r - 1.0) / SQRT2


def potential(g: GameParams, p: float | np.ndarray) -> float | np.ndarray:
    p_arr = np.asarray(p, dtype=float)
    if np.any((p_arr < 0.0) | (p_arr > 1.0)) or np.any(np.isnan(p_arr)):
        raise ValueError("p must lie in [0, 1]")
    a, b = _ab(g)
    c = a + b
    val = -(c * (p_arr**3 / 3 - p_arr**4 / 4) - b * (p_arr**2 / 2 - p_arr**3 / 3))
    return float(val) if np.ndim(val) == 0 else val


def potential_derivative(g: GameParams, p: float | np.ndarray) -> float | np.ndarray:
    p_arr = np.asarray(p, dtype=float)
    if np.any((p_arr < 0.0) | (p_arr > 1.0)) or np.any(np.isnan(p_arr)):
        raise ValueError("p must lie in [0, 1]")
    a, b = _ab(g)
    q = 1.0 - p_arr
    val = -p_arr * (a * q * p_arr - b * q * q)
    return float(val) if np.ndim(val) == 0 else val


def p_star_formula(g: GameParams) -> float:
    """Raw stationary-point expression; may fall outside [0, 1].

    Returns ``nan`` when the denominator vanishes.
    """
    w = 1.0 - g.delta
    den = g.r - w * (1.0 - g.s)
    if den == 0.0:
        return math.nan
    return w * g.s / den


def p_star(g: GameParams) -> float:
    """Argmax of the potential on [0, 1] (the size of the defection basin)."""
    a, b = _ab(g)
    if not (a > 0.0 and b > 0.0):
        raise NoInteriorMaximum(
            f"interior maximum needs r > 1 - delta and s > 0 (a={a:g}, b={b:g})"
        )
    return b / (a + b)


size_bad = p_star


def size_good(g: GameParams) -> float:
    return 1.0 - p_star(g)


def kinetic_energies(g: GameParams) -> tuple[float, float]:
    """Return ``(ke_c, ke_d)``: depths of the cooperation and defection basins.

    With ``c = a + b``, ``q = p*`` and ``u = 1 - q`` the two integrals reduce to
    ``ke_d = c q^3 (2 - q) / 12`` and ``ke_c = c u^3 (2 - u) / 12``; this form
    avoids the cancellation in ``U(p*) - U(1)`` when ``p*`` is close to one.
    """
    a, b = _ab(g)
    if not (a > 0.0 and b > 0.0):
        raise NoInteriorMaximum(
            f"degenerate basin: needs r > 1 - delta and s > 0 (a={a:g}, b={b:g})"
        )
    c = a + b
    q = b / c
    u = a / c
    return c * u**3 * (2.0 - u) / 12.0, c * q**3 * (2.0 - q) / 12.0


def klr(g: GameParams) -> float:
    """Kinetic log-ratio ``ln((1-delta) KE^c) - ln(delta KE^d)``."""
    try:
        ke_c, ke_d = kinetic_energies(g)
    except NoInteriorMaximum as exc:
        raise UndefinedKLR(str(exc)) from None
    if not (ke_c > 0.0 and ke_d > 0.0):
        raise UndefinedKLR("kinetic energy underflowed to zero")
    return math.log((1.0 - g.delta) * ke_c) - math.log(g.delta * ke_d)


def klr_from_ratio(delta: float, r: float, s: float) -> float:
    """Same value as :func:`klr`, written in terms of ``a / b``.

    ``KLR = ln((1-delta)/delta) + 3 ln(a/b) + ln((1 + p*) / (2 - p*))``.
    Finite for any s in (0, inf) without underflow; used by the s solver.
    """
    w = 1.0 - delta
    a = r - w
    b = w * s
    if not (a > 0.0 and b > 0.0):
        raise UndefinedKLR("needs r > 1 - delta and s > 0")
    q = b / (a + b)
    return (
        math.log(w / delta)
        + 3.0 * (math.log(a) - math.log(b))
        + math.log((1.0 + q) / (2.0 - q))
    )


def stats(g: GameParams) -> PotentialStats:
    a, b = _ab(g)
    ps = p_star(g)
    ke_c, ke_d = kinetic_energies(g)
    return PotentialStats(
        a=a,
        b=b,
        p_star=ps,
        ke_c=ke_c,
        ke_d=ke_d,
        klr=klr(g),
        size_bad=ps,
        size_good=1.0 - ps,
        d_ic=d_ic(g.delta, g.r),
    )


def frontier_offset(klr_value: float, K: float, epsilon: float) -> float:
    """Distance of a log-ratio from the frontier ``ln(K * epsilon)``."""
    if not (K > 0 and epsilon > 0):
        raise ValueError("K and epsilon must be positive")
    return klr_value - math.log(K * epsilon)


def correction_term(K: float, epsilon: float) -> float:
    return math.log(K * epsilon)


def solve_s_for_klr(delta: float, r: float, target_klr: float, tol: float = 1e-9) -> float:
    """Find s > 0 with ``klr(delta, r, s) == target_klr``.

    The log-ratio falls strictly in s, so the root is bracketed by doubling
    or halving s from 1 and then bisected in log(s).
    """
    if not (r > 1.0 - delta):
        raise InfeasibleTarget("needs r > 1 - delta")
    if not math.isfinite(target_klr):
        raise InfeasibleTarget("target must be finite")

    def f(s):
        return klr_from_ratio(delta, r, s) - target_klr

    lo = hi = 1.0
    f_lo = f_hi = f(1.0)
    if f_lo == 0.0:
        return 1.0
    if f_lo < 0.0:
        # need smaller s
        while f_lo < 0.0:
            hi, f_hi = lo, f_lo
            lo = lo / 2.0
            if lo < S_MIN:
                raise InfeasibleTarget(f"target {target_klr} above reachable range")
            f_lo = f(lo)
    else:
        while f_hi > 0.0:
            lo, f_lo = hi, f_hi
            hi = hi * 2.0
            if hi > S_MAX:
                raise InfeasibleTarget(f"target {target_klr} below reachable range")
            f_hi = f(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi

    log_lo, log_hi = math.log(lo), math.log(hi)
    for _ in range(200):
        mid = 0.5 * (log_lo + log_hi)
        s = math.exp(mid)
        fm = f(s)
        if abs(fm) <= tol:
            return s
        if fm > 0.0:
            log_lo = mid
        else:
            log_hi = mid
        if log_hi - log_lo < 1e-15:
            break
    s = math.exp(0.5 * (log_lo + log_hi))
    if abs(f(s)) > tol:
        raise InfeasibleTarget(f"bisection stalled at |residual| = {abs(f(s)):.3g}")
    return s


def check_proposition1(sample_count: int, seed: int, s_max: float = 10.0) -> list[tuple[float, float, float]]:
    """Search random games for KLR >= 0 while sizeGOOD < 0.5.

    Samples delta ~ U(0.5, 1), r ~ U(1 - delta, 1), s ~ U(0, s_max) and
    returns every offending ``(delta, r, s)``; the expected result is empty.
    """
    if sample_count <= 0:
        return []
    rng = np.random.default_rng(seed)
    delta = rng.uniform(0.5, 1.0, sample_count)
    r = rng.uniform(1.0 - delta, 1.0)
    s = rng.uniform(0.0, s_max, sample_count)
    keep = (delta > 0.5) & (r > 1.0 - delta) & (s > 0.0)
    delta, r, s = delta[keep], r[keep], s[keep]

    w = 1.0 - delta
    a = r - w
    b = w * s
    q = b / (a + b)
    klr_v = np.log(w / delta) + 3.0 * (np.log(a) - np.log(b)) + np.log((1.0 + q) / (2.0 - q))
    bad = (klr_v >= 0.0) & (1.0 - q < 0.5)
    return [(float(d), float(x), float(y)) for d, x, y in zip(delta[bad], r[bad], s[bad])]
