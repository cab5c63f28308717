"""Run configuration: INI files, named presets, command-line overrides.

Example file::

    [grid]
    alpha = 0.1
    epsilon = 0.1
    pairs = 0.975:0.975, 0.925:0.975
    ; or: delta = 0.525, 0.575   and   r = 0.9, 0.95

    [sampling]
    mode = stratified        ; stratified | offsets | values
    offsets = -3, -1, 1, 3
    s_values = 0.1, 0.2

    [run]
    periods = 1000000
    replications = 100
    seed = 12345
    init = optimistic
    workers = 1

    [output]
    results = results.csv
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace

from .experiments import PAPER_AXIS, PAPER_RATES, GridSpec, ds_plane_spec
from .qlearning import InitMode


@dataclass(frozen=True)
class RunConfig:
    grid: GridSpec = field(default_factory=GridSpec)
    periods: int = 1_000_000
    workers: int = 1
    results_path: str | None = None

    @property
    def seed(self) -> int:
        return self.grid.master_seed

    def with_overrides(self, *, seed=None, workers=None, periods=None,
                       replications=None, init=None, out=None) -> "RunConfig":
        grid = self.grid
        if seed is not None:
            grid = replace(grid, master_seed=int(seed))
        if replications is not None:
            grid = replace(grid, replications=int(replications))
        if init is not None:
            grid = replace(grid, init_mode=InitMode(init))
        cfg = replace(self, grid=grid)
        if workers is not None:
            cfg = replace(cfg, workers=int(workers))
        if periods is not None:
            cfg = replace(cfg, periods=int(periods))
        if out is not None:
            cfg = replace(cfg, results_path=out)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.periods < 1:
            raise ValueError("periods must be >= 1")
        if self.grid.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


PRESETS = {
    # full study: 10 x 10 rates, 10 x 10 (delta, r), 15 s each
    "paper": RunConfig(GridSpec(master_seed=12345)),
    # one-machine version of the main sweep
    "desk": RunConfig(
        GridSpec(
            alphas=(0.1,), epsilons=(0.1,),
            pairs=((0.975, 0.975), (0.925, 0.975)),
            master_seed=12345,
        )
    ),
    # cells on both sides of the frontier at slack IC
    "frontier": RunConfig(
        GridSpec(
            alphas=(0.1,), epsilons=(0.1,), pairs=((0.975, 0.975),),
            s_mode="offsets", offsets=(-3.0, -1.0, 1.0, 3.0), master_seed=12345,
        )
    ),
    # delta-s plane at fixed r
    "plane": RunConfig(ds_plane_spec(0.775, master_seed=12345)),
    "plane-small": RunConfig(ds_plane_spec(0.975, n=9, replications=20, master_seed=12345),
                             periods=100_000),
}


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.replace(";", ",").split(",") if x.strip())


def _pairs(text: str) -> tuple[tuple[float, float], ...]:
    out = []
    for item in text.split(","):
        if item.strip():
            d, r = item.split(":")
            out.append((float(d), float(r)))
    return tuple(out)


def load_config(path: str, base: RunConfig | None = None) -> RunConfig:
    """Read an INI file; keys not present keep the values of ``base``."""
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    with open(path, encoding="utf-8") as fh:
        cp.read_file(fh)
    cfg = base or RunConfig(GridSpec())
    grid = cfg.grid
    kw = {}
    if cp.has_section("grid"):
        sec = cp["grid"]
        if "alpha" in sec:
            kw["alphas"] = _floats(sec["alpha"])
        if "epsilon" in sec:
            kw["epsilons"] = _floats(sec["epsilon"])
        if "delta" in sec:
            kw["deltas"] = _floats(sec["delta"])
            kw["pairs"] = None
        if "r" in sec:
            kw["rs"] = _floats(sec["r"])
            kw["pairs"] = None
        if "pairs" in sec:
            kw["pairs"] = _pairs(sec["pairs"])
    if cp.has_section("sampling"):
        sec = cp["sampling"]
        if "mode" in sec:
            kw["s_mode"] = sec["mode"].strip()
        if "offsets" in sec:
            kw["offsets"] = _floats(sec["offsets"])
        if "s_values" in sec:
            kw["s_values"] = _floats(sec["s_values"])
    run = cp["run"] if cp.has_section("run") else {}
    if "replications" in run:
        kw["replications"] = int(run["replications"])
    if "seed" in run:
        kw["master_seed"] = int(run["seed"])
    if "init" in run:
        kw["init_mode"] = InitMode(run["init"].strip())
    grid = replace(grid, **kw)
    cfg = replace(cfg, grid=grid)
    if "periods" in run:
        cfg = replace(cfg, periods=int(run["periods"]))
    if "workers" in run:
        cfg = replace(cfg, workers=int(run["workers"]))
    if cp.has_section("output") and "results" in cp["output"]:
        cfg = replace(cfg, results_path=cp["output"]["results"])
    cfg.validate()
    return cfg


__all__ = ["RunConfig", "PRESETS", "load_config", "PAPER_AXIS", "PAPER_RATES"]
