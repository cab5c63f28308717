import numpy as np
import pytest

from pdcoop.game import GameParams


def random_games(n, seed, interior=True):
    """Games with r > 1 - delta and s > 0 (or any valid game)."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        delta = rng.uniform(0.05, 0.98)
        r = rng.uniform(0.0, 1.0)
        s = rng.uniform(0.01, 3.0)
        if interior and not r > 1.0 - delta + 1e-3:
            continue
        out.append(GameParams(r, s, delta))
    return out


@pytest.fixture
def dal_bo():
    return GameParams(0.46, 0.38, 0.75)


# one line per acceptance criterion, echoed at the end of the run
_CRITERIA: list[str] = []


@pytest.fixture
def criterion():
    def record(number, ok, detail):
        _CRITERIA.append(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_CRITERIA, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
