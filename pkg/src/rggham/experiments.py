"""Monte Carlo trials, threshold sweeps, and the scaling benchmark.

A trial samples an instance, times the construction pipeline (tessellation
through the verified cycle; sampling and the connectivity check are not part
of the timed span), and records either the verified cycle or the typed
failure. A sweep aggregates trials per (n, radius multiplier) pair into one
summary row; trial seeds are assigned from a single base seed by global
trial index so any trial can be reproduced in isolation.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .failures import ConstructionError
from .hamiltonian import full_construction
from .instance import (ExplicitRadius, InstanceConfig, ThresholdMultiple,
                       build_spatial_index, is_connected, resolve_radius,
                       sample_points)

OUTCOME_CYCLE = "CycleVerified"
OUTCOME_FAILURE = "Failure"


@dataclass(frozen=True)
class TrialResult:
    n: int
    p: float
    r: float
    seed: int
    outcome: str
    failure_reason: str | None
    connected: bool
    wall_ms: float
    cells_per_side: int | None

    def to_json(self) -> dict:
        return {"n": self.n, "p": self.p, "r": self.r, "seed": self.seed,
                "outcome": self.outcome, "failure_reason": self.failure_reason,
                "connected": self.connected, "wall_ms": self.wall_ms,
                "cells_per_side": self.cells_per_side}


def run_trial(n: int, p: float, r: float, seed: int,
              check_connectivity: bool = True) -> TrialResult:
    """One sampled instance through the pipeline; never raises on failure."""
    import time

    cfg = InstanceConfig(n=n, p=p, radius=ExplicitRadius(r), seed=seed)
    vs = sample_points(cfg)
    t0 = time.perf_counter()
    reason = None
    cycle_ok = False
    k = None
    try:
        out = full_construction(vs.points, p, r)
        cycle_ok = True
        k = out.cells_per_side
    except ConstructionError as exc:
        reason = exc.reason.value
    wall_ms = (time.perf_counter() - t0) * 1e3
    connected = False
    if check_connectivity:
        connected = is_connected(build_spatial_index(vs, r, p))
    return TrialResult(n=n, p=p, r=r, seed=seed,
                       outcome=OUTCOME_CYCLE if cycle_ok else OUTCOME_FAILURE,
                       failure_reason=reason, connected=connected,
                       wall_ms=wall_ms, cells_per_side=k)


# --------------------------------------------------------------------------
# sweeps
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepConfig:
    ns: tuple
    p: float
    multipliers: tuple
    trials: int
    base_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("sweep needs at least one trial per cell")
        if any(m <= 0 for m in self.multipliers):
            raise ValueError("radius multipliers must be positive")


@dataclass(frozen=True)
class SweepRow:
    n: int
    p: float
    multiplier: float
    r: float
    trials: int
    cycle_verified: int
    connected: int
    failures_by_reason: dict
    median_ms: float
    p90_ms: float

    def to_json(self) -> dict:
        return {"n": self.n, "p": self.p, "multiplier": self.multiplier,
                "r": self.r, "trials": self.trials,
                "cycle_verified": self.cycle_verified,
                "connected": self.connected,
                "failures_by_reason": dict(self.failures_by_reason),
                "median_ms": self.median_ms, "p90_ms": self.p90_ms}


SWEEP_CSV_HEADER = ("n,p,multiplier,r,trials,cycle_verified,connected,"
                    "failures_by_reason,median_ms,p90_ms")


def _encode_failures(failures: dict) -> str:
    return ";".join(f"{reason}:{count}"
                    for reason, count in sorted(failures.items()))


def sweep_row_csv(row: SweepRow) -> str:
    return ",".join([
        str(row.n), f"{row.p:g}", f"{row.multiplier:g}", f"{row.r:.17g}",
        str(row.trials), str(row.cycle_verified), str(row.connected),
        _encode_failures(row.failures_by_reason),
        f"{row.median_ms:.3f}", f"{row.p90_ms:.3f}",
    ])


def _trial_task(args: tuple) -> TrialResult:
    n, p, r, seed = args
    return run_trial(n, p, r, seed)


def sweep(cfg: SweepConfig) -> list[SweepRow]:
    """Full grid of (n, multiplier) cells, trials per cell, aggregated rows.

    Seeds run base_seed, base_seed + 1, ... in (n, multiplier, trial)
    lexicographic order, so the global index of a trial pins its seed.
    """
    tasks = []
    for n in cfg.ns:
        for mult in cfg.multipliers:
            r = resolve_radius(n, cfg.p, ThresholdMultiple(mult))
            for t in range(cfg.trials):
                seed = cfg.base_seed + len(tasks)
                tasks.append((n, cfg.p, r, seed))

    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_trial_task, tasks, chunksize=1))
    else:
        results = [_trial_task(t) for t in tasks]

    rows = []
    idx = 0
    for n in cfg.ns:
        for mult in cfg.multipliers:
            chunk = results[idx:idx + cfg.trials]
            idx += cfg.trials
            walls = np.array([t.wall_ms for t in chunk])
            failures: dict[str, int] = {}
            for t in chunk:
                if t.failure_reason is not None:
                    failures[t.failure_reason] = failures.get(t.failure_reason, 0) + 1
            rows.append(SweepRow(
                n=n, p=cfg.p, multiplier=mult, r=chunk[0].r, trials=cfg.trials,
                cycle_verified=sum(t.outcome == OUTCOME_CYCLE for t in chunk),
                connected=sum(t.connected for t in chunk),
                failures_by_reason=failures,
                median_ms=float(np.median(walls)),
                p90_ms=float(np.percentile(walls, 90)),
            ))
    return rows


def write_sweep_csv(rows: list[SweepRow], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(SWEEP_CSV_HEADER + "\n")
        for row in rows:
            fh.write(sweep_row_csv(row) + "\n")


def write_sweep_json(rows: list[SweepRow], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([row.to_json() for row in rows], fh, indent=2)
        fh.write("\n")


# --------------------------------------------------------------------------
# scaling benchmark
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BenchRow:
    n: int
    r: float
    median_ms: float
    ratio: float | None  # median / previous median, None on the first row

    def to_json(self) -> dict:
        return {"n": self.n, "r": self.r, "median_ms": self.median_ms,
                "ratio": self.ratio}


def scaling_bench(ns: list[int], p: float, multiplier: float = 2.0,
                  trials: int = 3, base_seed: int = 0) -> list[BenchRow]:
    """Median construction wall time per n, with consecutive-size ratios.

    Sizes must be ascending and at least 1000 so per-trial noise does not
    swamp the medians. Timing covers the construction pipeline only.
    """
    if list(ns) != sorted(set(ns)):
        raise ValueError("bench sizes must be strictly ascending")
    if any(n < 1000 for n in ns):
        raise ValueError("bench sizes below 1000 are all noise")
    rows: list[BenchRow] = []
    seed = base_seed
    prev = None
    for n in ns:
        r = resolve_radius(n, p, ThresholdMultiple(multiplier))
        walls = []
        for _ in range(trials):
            walls.append(run_trial(n, p, r, seed, check_connectivity=False).wall_ms)
            seed += 1
        med = float(np.median(walls))
        rows.append(BenchRow(n=n, r=r, median_ms=med,
                             ratio=None if prev is None else med / prev))
        prev = med
    return rows
