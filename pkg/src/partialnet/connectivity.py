"""Monte Carlo estimators for the connectivity phase behavior of random
geometric graphs: connectivity probability C, reachability R, and mean
shortest path P over a grid of expected node degrees, plus the four-regime
classification of the connectivity continuum.

Trials are independent work items seeded by (master seed, grid index,
trial index), so estimates are deterministic and invariant to execution
order and to serial/parallel chunking.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ._seeds import keyed_seed
from .geometry import (NetworkSnapshot, Region, area_for_degree,
                       component_labels, hop_matrix, sample_topology)

DEFAULT_THRESHOLDS = (0.05, 0.95, 0.2)
DEFAULT_DEGREE_GRID = tuple(range(1, 25))

AREA1 = "area1"
AREA2 = "area2"
AREA3 = "area3"
AREA4 = "area4"


@dataclass(frozen=True)
class MonteCarloEstimate:
    value: float
    se: float
    trials: int


@dataclass(frozen=True)
class SweepPoint:
    """Estimates at one expected-degree grid point."""

    d: float
    c_hat: float
    c_se: float
    r_hat: float
    r_se: float
    p_hat: Optional[float]
    p_se: Optional[float]
    m: int


@dataclass(frozen=True)
class RegimeLabel:
    label: str
    thresholds: tuple[float, float, float]


def reachability(snapshot: NetworkSnapshot) -> float:
    """Fraction of unordered node pairs lying in the same component."""
    n = snapshot.n
    if n < 2:
        raise ValueError("reachability needs at least two nodes")
    sizes = np.bincount(component_labels(snapshot))
    same = int((sizes * (sizes - 1) // 2).sum())
    return same / (n * (n - 1) // 2)


def mean_shortest_path(snapshot: NetworkSnapshot) -> Optional[float]:
    """Mean hop count over connected pairs u < v; None if no pair connects."""
    if not snapshot.adjacency.any():
        return None
    hops = hop_matrix(snapshot)
    iu = np.triu_indices(snapshot.n, 1)
    vals = hops[iu]
    finite = vals[np.isfinite(vals)]
    if finite.size == 0:
        return None
    return float(finite.mean())


def _torus_for_degree(n: int, r0: float, d: float) -> Region:
    return Region.torus(math.sqrt(area_for_degree(n, r0, d)))


def _trial_snapshot(n: int, r0: float, d: float, master: int, point: int, trial: int) -> NetworkSnapshot:
    return sample_topology(n, _torus_for_degree(n, r0, d), r0, keyed_seed(master, point, trial))


def _connectivity_trial(args) -> bool:
    n, r0, d, master, point, trial = args
    snap = _trial_snapshot(n, r0, d, master, point, trial)
    return bool(np.bincount(component_labels(snap)).size == 1)


def _full_trial(args) -> tuple[bool, float, Optional[float]]:
    n, r0, d, master, point, trial = args
    snap = _trial_snapshot(n, r0, d, master, point, trial)
    labels = component_labels(snap)
    sizes = np.bincount(labels)
    connected = sizes.size == 1
    same = int((sizes * (sizes - 1) // 2).sum())
    reach = same / (n * (n - 1) // 2)
    return connected, reach, mean_shortest_path(snap)


def _map_trials(fn, arglist, threads: int):
    if threads and threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, arglist, chunksize=max(1, len(arglist) // (4 * threads))))
    return [fn(a) for a in arglist]


def connectivity_probability(n: int, r0: float, d: float, m: int, seed: int,
                             threads: int = 1) -> MonteCarloEstimate:
    """Fraction of m random topologies that form a single component."""
    if m < 1:
        raise ValueError("need at least one trial")
    args = [(n, r0, d, seed, 0, i) for i in range(m)]
    wins = sum(_map_trials(_connectivity_trial, args, threads))
    c = wins / m
    se = math.sqrt(c * (1.0 - c) / m)
    return MonteCarloEstimate(c, se, m)


def _sweep_point(n: int, r0: float, d: float, m: int, seed: int, point: int,
                 threads: int) -> SweepPoint:
    args = [(n, r0, d, seed, point, i) for i in range(m)]
    rows = _map_trials(_full_trial, args, threads)
    conn = np.asarray([r[0] for r in rows], dtype=float)
    reach = np.asarray([r[1] for r in rows], dtype=float)
    paths = np.asarray([r[2] for r in rows if r[2] is not None], dtype=float)
    c = float(conn.mean())
    c_se = math.sqrt(c * (1.0 - c) / m)
    r_hat = float(reach.mean())
    r_se = float(reach.std(ddof=1) / math.sqrt(m)) if m > 1 else 0.0
    if paths.size:
        p_hat = float(paths.mean())
        p_se = float(paths.std(ddof=1) / math.sqrt(paths.size)) if paths.size > 1 else 0.0
    else:
        p_hat = p_se = None
    return SweepPoint(d, c, c_se, r_hat, r_se, p_hat, p_se, m)


def phase_sweep(n: int, r0: float, degree_grid: Sequence[float], m: int, seed: int,
                threads: int = 1) -> list[SweepPoint]:
    """C, R, P estimates with standard errors over a degree grid.

    P averages per-snapshot means across snapshots that have at least one
    connected pair, weighting snapshots equally.
    """
    if not degree_grid:
        raise ValueError("degree grid must be nonempty")
    if m < 1:
        raise ValueError("need at least one trial")
    return [_sweep_point(n, r0, float(d), m, seed, k, threads)
            for k, d in enumerate(degree_grid)]


def classify_regime(c_hat: float, r_hat: float,
                    thresholds: tuple[float, float, float] = DEFAULT_THRESHOLDS) -> RegimeLabel:
    """Map (C, R) estimates onto the four connectivity regimes.

    With thresholds (eps_c_low, eps_c_high, eps_r): area1 when C is high,
    area2 in the connectivity transition band, area3 when disconnected but
    reachable, area4 when nodes are essentially isolated.
    """
    lo, hi, er = thresholds
    if not (0.0 <= c_hat <= 1.0 and 0.0 <= r_hat <= 1.0):
        raise ValueError("estimates must lie in [0, 1]")
    if c_hat >= hi:
        label = AREA1
    elif c_hat > lo:
        label = AREA2
    elif r_hat >= er:
        label = AREA3
    else:
        label = AREA4
    return RegimeLabel(label, thresholds)


def sweep_to_csv(points: Sequence[SweepPoint], seed: Optional[int] = None) -> str:
    """CSV rows "d,C,C_se,R,R_se,P,P_se,m"; master seed in a comment header."""
    lines = []
    if seed is not None:
        lines.append(f"# seed={seed}")
    lines.append("d,C,C_se,R,R_se,P,P_se,m")
    for pt in points:
        p = "nan" if pt.p_hat is None else f"{pt.p_hat:.10g}"
        pse = "nan" if pt.p_se is None else f"{pt.p_se:.10g}"
        lines.append(f"{pt.d:.10g},{pt.c_hat:.10g},{pt.c_se:.10g},"
                     f"{pt.r_hat:.10g},{pt.r_se:.10g},{p},{pse},{pt.m}")
    return "\n".join(lines) + "\n"
