"""Grid-refinement and cost-scaling harnesses."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .scenarios import ScenarioConfig, run_scenario


def block_average(values: np.ndarray, n_coarse: int) -> np.ndarray:
    """Average consecutive blocks of a fine-grid cell array down to ``n_coarse`` cells."""
    values = np.asarray(values, dtype=float)
    if values.shape[0] % n_coarse:
        raise ValueError(f"{values.shape[0]} cells do not split into {n_coarse} blocks")
    return values.reshape(n_coarse, -1, *values.shape[1:]).mean(axis=1)


def l1_error(coarse: np.ndarray, fine: np.ndarray, length: float) -> float:
    n = coarse.shape[0]
    return float(np.sum(np.abs(coarse - block_average(fine, n))) * length / n)


def observed_orders(grids, errors) -> list:
    """Orders between successive grids; the first entry is ``nan``."""
    orders = [math.nan]
    for (n0, e0), (n1, e1) in zip(zip(grids, errors), zip(grids[1:], errors[1:])):
        orders.append(math.log(e0 / e1) / math.log(n1 / n0))
    return orders


def loglog_slope(x, y) -> float:
    """Least-squares slope of log(y) against log(x)."""
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


@dataclass
class ConvergenceRow:
    N: int
    err_rho: float
    err_theta: float
    order_rho: float
    order_theta: float


def convergence_study(base: ScenarioConfig, grids, ref_N: int) -> list:
    """L1 errors of rho and theta against a block-averaged fine-grid run."""
    grids = sorted(int(n) for n in grids)
    if any(n >= ref_N or ref_N % n for n in grids):
        raise ValueError("reference grid must be finer than, and a multiple of, every grid")
    ref = run_scenario(base.replace(N=ref_N, out=None)).field
    length = ref.grid.x_max - ref.grid.x_min
    err_rho, err_theta = [], []
    for n in grids:
        f = run_scenario(base.replace(N=n, out=None)).field
        err_rho.append(l1_error(f.rho, ref.rho, length))
        err_theta.append(l1_error(f.theta, ref.theta, length))
    o_rho = observed_orders(grids, err_rho)
    o_theta = observed_orders(grids, err_theta)
    return [ConvergenceRow(*row) for row in zip(grids, err_rho, err_theta, o_rho, o_theta)]


@dataclass
class ScalingRow:
    N: int
    wall_time: float
    steps: int
    avg_dt: float
    avg_s: float
    avg_dt_over_s: float


@dataclass
class ScalingResult:
    rows: list
    slope_time: float
    slope_dt: float
    slope_dt_over_s: float


def scaling_benchmark(base: ScenarioConfig, grids, repeats: int = 1) -> ScalingResult:
    """Wall time and step sizes versus N, with fitted log-log slopes.

    The smallest grid is run once beforehand so compilation stays out of the
    timings; with ``repeats > 1`` the fastest wall time is kept.
    """
    grids = sorted(int(n) for n in grids)
    if len(grids) < 4 or grids[-1] < 8 * grids[0]:
        raise ValueError("need at least 4 grids spanning a factor of 8")
    run_scenario(base.replace(N=grids[0], out=None), t_end=0.25 * base.end_time)
    rows = []
    for n in grids:
        best = math.inf
        for _ in range(repeats):
            start = time.perf_counter()
            meta = run_scenario(base.replace(N=n, out=None)).meta
            best = min(best, time.perf_counter() - start)
        rows.append(ScalingRow(n, best, meta["steps"], meta["avg_dt"], meta["avg_s"], meta["avg_dt_over_s"]))
    N = [r.N for r in rows]
    return ScalingResult(
        rows,
        loglog_slope(N, [r.wall_time for r in rows]),
        loglog_slope(N, [r.avg_dt for r in rows]),
        loglog_slope(N, [r.avg_dt_over_s for r in rows]),
    )
