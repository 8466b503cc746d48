"""Hop count vs Euclidean distance on a disk.

Estimates the conditional law of the shortest-path hop count given the
straight-line distance between two nodes (and its Bayes inverse, the
distance law given the hop count) by sampling random disk topologies and
random connected node pairs.  Both families are expected to be
stochastically monotone: farther pairs need more hops, and more hops push
the distance distribution outward.  The check uses a per-point tolerance
of a few pooled binomial standard errors so Monte Carlo noise does not
produce false violations.

The hop-count likelihood is estimated, not computed from a recursion, and
unreachable sampled pairs are discarded: the conditional laws concern
pairs with an existing shortest path.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from ._seeds import keyed_seed
from .distributions import DiscreteDistribution
from .geometry import (NetworkSnapshot, Region, hop_matrix, sample_topology,
                       shortest_path_hops)

#: Cells with fewer samples than this are flagged low-confidence and are
#: excluded from the strict monotonicity verdict.
MIN_CELL_SAMPLES = 30

DEFAULT_BINS = 40
DEFAULT_TRIALS = 200
DEFAULT_PAIRS_PER_TRIAL = 500
CI_SIGMA = 3.0


def default_bin_edges(disk_radius: float, nbins: int = DEFAULT_BINS) -> np.ndarray:
    """Equal-width distance bins covering (0, 2R]."""
    return np.linspace(0.0, 2.0 * disk_radius, nbins + 1)


def nodes_for_density(density: float, disk_radius: float) -> int:
    """Deterministic node count round(density * disk area)."""
    return int(round(density * math.pi * disk_radius * disk_radius))


@dataclass(frozen=True)
class HopDistanceStudy:
    """Joint (distance bin, hop count) tallies from disk topologies.

    counts[b, h] is the number of sampled connected pairs whose distance
    fell in bin b and whose shortest path had h hops.  The conditional
    families are derived from these tallies; distance_given_hop is filled
    in by a Bayes inversion against a distance density.
    """

    r0: float
    density: float
    disk_radius: float
    bin_edges: np.ndarray
    counts: np.ndarray
    trials: int
    pairs_per_trial: int
    seed: int
    distance_given_hop: Optional[dict[int, DiscreteDistribution]] = None

    @property
    def nbins(self) -> int:
        return self.bin_edges.shape[0] - 1

    @property
    def max_hops(self) -> int:
        return self.counts.shape[1] - 1

    def bin_totals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    def hop_totals(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    def low_confidence_bins(self) -> list[int]:
        totals = self.bin_totals()
        return [b for b in range(self.nbins) if 0 < totals[b] < MIN_CELL_SAMPLES]

    def low_confidence_hops(self) -> list[int]:
        totals = self.hop_totals()
        return [h for h in range(totals.size) if 0 < totals[h] < MIN_CELL_SAMPLES]

    def hop_given_distance(self) -> dict[int, DiscreteDistribution]:
        """Per-bin conditional hop distribution (bins with any samples)."""
        totals = self.bin_totals()
        out = {}
        for b in range(self.nbins):
            if totals[b] == 0:
                continue
            hs = np.nonzero(self.counts[b] > 0)[0]
            out[b] = DiscreteDistribution(hs, self.counts[b, hs] / totals[b])
        return out

    def with_distance_given_hop(self, family: dict[int, DiscreteDistribution]) -> "HopDistanceStudy":
        return replace(self, distance_given_hop=dict(family))


def _study_trial(args) -> np.ndarray:
    r0, density, radius, edges, pairs, master, trial = args
    n = nodes_for_density(density, radius)
    rng = np.random.default_rng(keyed_seed(master, trial).spawn(1)[0])
    snap = sample_topology(n, Region.disk(radius), r0, keyed_seed(master, trial))
    hops = hop_matrix(snap)
    nbins = edges.shape[0] - 1
    # generous hop cap; tallies are merged by the caller
    counts = np.zeros((nbins, n), dtype=np.int64)
    us = rng.integers(0, n, size=pairs)
    vs = rng.integers(0, n, size=pairs)
    pos = snap.positions
    for u, v in zip(us, vs):
        if u == v or not np.isfinite(hops[u, v]):
            continue
        dist = float(np.hypot(*(pos[u] - pos[v])))
        h = int(hops[u, v])
        # geometric link model: h hops cannot span more than h * r0
        assert h >= math.ceil(dist / r0 - 1e-9), (dist, h)
        b = int(np.searchsorted(edges, dist, side="left")) - 1
        b = min(max(b, 0), nbins - 1)
        counts[b, h] += 1
    return counts


def estimate_hop_given_distance(r0: float, density: float, disk_radius: float,
                                bin_edges: Optional[np.ndarray] = None,
                                trials: int = DEFAULT_TRIALS,
                                pairs_per_trial: int = DEFAULT_PAIRS_PER_TRIAL,
                                seed: int = 0, threads: int = 1) -> HopDistanceStudy:
    """Sample disk topologies and tally (distance bin, hop count) pairs.

    Node count per topology is round(density * area).  Pair endpoints are
    drawn uniformly; unreachable pairs are discarded.
    """
    if min(r0, density, disk_radius) <= 0:
        raise ValueError("r0, density, and disk radius must be positive")
    if trials < 1 or pairs_per_trial < 1:
        raise ValueError("need at least one trial and one pair per trial")
    edges = default_bin_edges(disk_radius) if bin_edges is None else np.asarray(bin_edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise ValueError("bin edges must be strictly increasing")
    args = [(r0, density, disk_radius, edges, pairs_per_trial, seed, t)
            for t in range(trials)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_study_trial, args))
    else:
        parts = [_study_trial(a) for a in args]
    counts = np.zeros_like(parts[0])
    for part in parts:
        counts += part
    max_h = int(np.nonzero(counts.sum(axis=0) > 0)[0].max(initial=0))
    return HopDistanceStudy(r0, density, disk_radius, edges,
                            counts[:, : max_h + 1].copy(), trials,
                            pairs_per_trial, seed)


def distance_density_disk(disk_radius: float, bin_edges: np.ndarray, samples: int,
                          seed: int = 0) -> DiscreteDistribution:
    """Monte Carlo distance distribution of two uniform points in a disk.

    Returned over bin indices so it composes with a study sharing the same
    edges.  A closed form exists in the literature but is deliberately not
    transcribed here; this estimate is the ground truth the package uses.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    edges = np.asarray(bin_edges, dtype=float)
    rng = np.random.default_rng(keyed_seed(seed, 0xD15C))
    region = Region.disk(disk_radius)
    hist = np.zeros(edges.size - 1, dtype=np.int64)
    chunk = 1_000_000
    left = samples
    while left > 0:
        k = min(chunk, left)
        a = region.sample_points(k, rng)
        b = region.sample_points(k, rng)
        d = np.hypot(a[:, 0] - b[:, 0], a[:, 1] - b[:, 1])
        h, _ = np.histogram(d, bins=edges)
        hist += h
        left -= k
    idx = np.nonzero(hist > 0)[0]
    return DiscreteDistribution(idx, hist[idx] / hist.sum())


def bayes_flip(study: HopDistanceStudy, f_d: DiscreteDistribution) -> dict[int, DiscreteDistribution]:
    """Invert the hop-given-distance family against a distance density.

    For each hop count h the distance law is proportional to the per-bin
    likelihood of h times the bin mass of f_d, normalized over bins.  Hop
    values whose normalizer vanishes are omitted with a warning.
    """
    totals = study.bin_totals()
    likelihood = np.where(totals[:, None] > 0,
                          study.counts / np.maximum(totals[:, None], 1), 0.0)
    fd = np.zeros(study.nbins)
    for b, prob in f_d.items():
        if not (0 <= b < study.nbins):
            raise ValueError("distance density and study must share bin edges")
        fd[b] = prob
    out: dict[int, DiscreteDistribution] = {}
    for h in range(study.max_hops + 1):
        if study.counts[:, h].sum() == 0:
            continue
        weights = likelihood[:, h] * fd
        total = weights.sum()
        if total <= 0.0:
            warnings.warn(f"hop count {h}: no overlap with the distance density; omitted")
            continue
        bins = np.nonzero(weights > 0)[0]
        out[h] = DiscreteDistribution(bins, weights[bins] / total)
    return out


@dataclass(frozen=True)
class FamilyCheck:
    """CI-slack monotonicity outcome for one conditional family."""

    passed: bool
    worst_margin: float
    witness: Optional[tuple[int, int, int]]
    excluded: tuple[int, ...]


@dataclass(frozen=True)
class ConjectureReport:
    hop_given_distance: FamilyCheck
    distance_given_hop: FamilyCheck
    min_cell: int

    @property
    def passed(self) -> bool:
        return self.hop_given_distance.passed and self.distance_given_hop.passed

    def to_dict(self) -> dict:
        def fc(c: FamilyCheck) -> dict:
            return {"passed": c.passed, "worst_margin": c.worst_margin,
                    "witness": list(c.witness) if c.witness else None,
                    "excluded_low_confidence": list(c.excluded)}
        return {"passed": self.passed, "min_cell": self.min_cell,
                "hop_given_distance": fc(self.hop_given_distance),
                "distance_given_hop": fc(self.distance_given_hop)}


def check_family_monotone_ci(cdfs: dict[int, np.ndarray], counts: dict[int, float],
                             z: float = CI_SIGMA, eps: float = 1e-9) -> tuple[bool, float, Optional[tuple[int, int, int]]]:
    """Dominance ladder with per-point pooled-binomial slack.

    cdfs maps each condition to its CDF sampled on a common support grid;
    counts gives the per-condition sample size used for the standard
    errors.  A pair violates when F_high exceeds F_low by more than
    z pooled standard errors (plus eps for float noise) at some point.
    Returns (passed, worst margin, first witness (c0, c1, grid index)).
    """
    keys = sorted(cdfs)
    worst = -math.inf
    first_witness = None
    for i, c0 in enumerate(keys):
        for c1 in keys[i + 1:]:
            n0, n1 = counts[c0], counts[c1]
            f0, f1 = cdfs[c0], cdfs[c1]
            pooled = (n0 * f0 + n1 * f1) / (n0 + n1)
            se = np.sqrt(np.clip(pooled * (1.0 - pooled), 0.0, None) * (1.0 / n0 + 1.0 / n1))
            margin = f1 - f0 - z * se
            m = float(margin.max())
            worst = max(worst, m)
            if m > eps and first_witness is None:
                first_witness = (c0, c1, int(np.argmax(margin)))
    return first_witness is None, worst, first_witness


def _check_hop_given_distance(study: HopDistanceStudy) -> FamilyCheck:
    totals = study.bin_totals()
    excluded = tuple(b for b in range(study.nbins) if totals[b] < MIN_CELL_SAMPLES)
    cdfs = {}
    counts = {}
    for b in range(study.nbins):
        if totals[b] >= MIN_CELL_SAMPLES:
            cdfs[b] = np.cumsum(study.counts[b] / totals[b])
            counts[b] = float(totals[b])
    passed, worst, witness = check_family_monotone_ci(cdfs, counts)
    return FamilyCheck(passed, worst, witness, excluded)


def _check_distance_given_hop(study: HopDistanceStudy) -> FamilyCheck:
    if study.distance_given_hop is None:
        raise ValueError("study has no distance-given-hop family; run bayes_flip first")
    hop_totals = study.hop_totals()
    excluded = tuple(h for h in study.distance_given_hop
                     if hop_totals[h] < MIN_CELL_SAMPLES)
    cdfs = {}
    counts = {}
    for h, dist in study.distance_given_hop.items():
        if hop_totals[h] < MIN_CELL_SAMPLES:
            continue
        masses = np.zeros(study.nbins)
        for b, prob in dist.items():
            masses[b] = prob
        cdfs[h] = np.cumsum(masses)
        counts[h] = float(hop_totals[h])
    passed, worst, witness = check_family_monotone_ci(cdfs, counts)
    return FamilyCheck(passed, worst, witness, excluded)


def verify_conjecture(study: HopDistanceStudy,
                      f_d: Optional[DiscreteDistribution] = None) -> ConjectureReport:
    """Check stochastic monotonicity of both estimated families.

    Tolerance is CI_SIGMA pooled binomial standard errors per CDF point;
    low-confidence conditions (< MIN_CELL_SAMPLES samples) are excluded
    from the verdict and listed in the report.
    """
    if study.distance_given_hop is None:
        if f_d is None:
            raise ValueError("provide f_d or attach a distance-given-hop family")
        study = study.with_distance_given_hop(bayes_flip(study, f_d))
    return ConjectureReport(_check_hop_given_distance(study),
                            _check_distance_given_hop(study), MIN_CELL_SAMPLES)


def study_to_csv(study: HopDistanceStudy, seed: Optional[int] = None) -> str:
    """CSV rows "d_bin_low,d_bin_high,h,count,prob" for populated cells."""
    totals = study.bin_totals()
    lines = []
    if seed is not None:
        lines.append(f"# seed={seed}")
    lines.append("d_bin_low,d_bin_high,h,count,prob")
    for b in range(study.nbins):
        if totals[b] == 0:
            continue
        for h in range(study.max_hops + 1):
            c = study.counts[b, h]
            if c == 0:
                continue
            lines.append(f"{study.bin_edges[b]:.10g},{study.bin_edges[b + 1]:.10g},"
                         f"{h},{c},{c / totals[b]:.10g}")
    return "\n".join(lines) + "\n"


def experimental_alternate_family(r0: float, density: float, disk_radius: float,
                                  bin_edges: Optional[np.ndarray] = None,
                                  trials: int = 50, pairs_per_trial: int = 100,
                                  seed: int = 0) -> HopDistanceStudy:
    """EXPERIMENTAL: crude alternate-route length vs distance study.

    Approximates the route obtained after a break by holding a connected
    pair fixed and re-sampling every other node position (the network far
    from the pair decorrelates), then recording the new hop count at the
    pair's unchanged distance.  This is a clearly-labeled approximation,
    not a calibrated model of post-break route discovery.
    """
    if min(r0, density, disk_radius) <= 0:
        raise ValueError("r0, density, and disk radius must be positive")
    edges = default_bin_edges(disk_radius) if bin_edges is None else np.asarray(bin_edges, dtype=float)
    n = nodes_for_density(density, disk_radius)
    region = Region.disk(disk_radius)
    nbins = edges.size - 1
    counts = np.zeros((nbins, n), dtype=np.int64)
    for t in range(trials):
        rng = np.random.default_rng(keyed_seed(seed, 1, t))
        snap = sample_topology(n, region, r0, keyed_seed(seed, 2, t))
        hops = hop_matrix(snap)
        pos = snap.positions
        for _ in range(pairs_per_trial):
            u, v = rng.integers(0, n, size=2)
            if u == v or not np.isfinite(hops[u, v]):
                continue
            dist = float(np.hypot(*(pos[u] - pos[v])))
            fresh = region.sample_points(n, rng)
            fresh[u], fresh[v] = pos[u], pos[v]
            resnap = NetworkSnapshot.from_positions(fresh, region, r0)
            alt_hops = shortest_path_hops(resnap, int(u), int(v))
            if alt_hops is None:
                continue
            b = int(np.searchsorted(edges, dist, side="left")) - 1
            b = min(max(b, 0), nbins - 1)
            counts[b, alt_hops] += 1
    max_h = int(np.nonzero(counts.sum(axis=0) > 0)[0].max(initial=0))
    return HopDistanceStudy(r0, density, disk_radius, edges,
                            counts[:, : max_h + 1].copy(), trials,
                            pairs_per_trial, seed)
