"""Finite discrete distributions and stochastic-order primitives.

Distributions over integers are the common currency of the package: route
lengths, waiting times, and delivery times are all finite integer-valued
random variables.  This module provides the immutable distribution types
plus the order relations built on them: first-order stochastic dominance,
stochastic monotonicity of a conditional family, and the transitivity
check for three-variable chains.

All types are immutable after construction and all operations are pure,
so values can be shared freely across threads or processes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

#: Construction tolerance for probability mass sums.
PROB_TOL = 1e-12


def _as_prob_arrays(pairs) -> tuple[np.ndarray, np.ndarray]:
    pairs = list(pairs)
    if not pairs:
        raise ValueError("distribution needs at least one atom")
    values = np.asarray([int(v) for v, _ in pairs], dtype=np.int64)
    probs = np.asarray([float(p) for _, p in pairs], dtype=np.float64)
    return values, probs


@dataclass(frozen=True)
class DiscreteDistribution:
    """Probability mass over a finite, strictly increasing set of integers.

    Invariants enforced at construction: values strictly increasing, every
    retained atom has positive mass, masses sum to one within ``PROB_TOL``.
    Zero-mass atoms are dropped.
    """

    values: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.int64)
        probs = np.asarray(self.probs, dtype=np.float64)
        if values.ndim != 1 or probs.ndim != 1 or values.size != probs.size:
            raise ValueError("values and probs must be 1-D arrays of equal length")
        if np.any(probs < 0):
            raise ValueError("negative probability mass")
        keep = probs > 0.0
        values, probs = values[keep], probs[keep]
        if values.size == 0:
            raise ValueError("distribution has no positive mass")
        if np.any(np.diff(values) <= 0):
            raise ValueError("values must be strictly increasing with no duplicates")
        total = probs.sum()
        if abs(total - 1.0) > PROB_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1 within {PROB_TOL}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "_cum", np.cumsum(probs))
        self.values.setflags(write=False)
        self.probs.setflags(write=False)

    # -- constructors -------------------------------------------------
    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, float]]) -> "DiscreteDistribution":
        """Build from (value, prob) pairs; merges duplicate values."""
        values, probs = _as_prob_arrays(pairs)
        order = np.argsort(values, kind="stable")
        values, probs = values[order], probs[order]
        uniq, inverse = np.unique(values, return_inverse=True)
        merged = np.zeros(uniq.size)
        np.add.at(merged, inverse, probs)
        return cls(uniq, merged)

    @classmethod
    def point_mass(cls, value: int) -> "DiscreteDistribution":
        return cls(np.asarray([value]), np.asarray([1.0]))

    @classmethod
    def uniform(cls, values: Sequence[int]) -> "DiscreteDistribution":
        vals = sorted(set(int(v) for v in values))
        return cls(np.asarray(vals), np.full(len(vals), 1.0 / len(vals)))

    # -- queries -------------------------------------------------------
    def cdf(self, t: float) -> float:
        """Pr{X <= t}; a right-continuous step function of ``t``."""
        idx = np.searchsorted(self.values, t, side="right")
        if idx == 0:
            return 0.0
        return float(self._cum[idx - 1])

    def cdf_at(self, ts: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.values, ts, side="right")
        cum = np.concatenate([[0.0], self._cum])
        return cum[idx]

    def mean(self) -> float:
        return float(np.dot(self.values, self.probs))

    def variance(self) -> float:
        mu = self.mean()
        return float(np.dot((self.values - mu) ** 2, self.probs))

    def min_value(self) -> int:
        return int(self.values[0])

    def max_value(self) -> int:
        return int(self.values[-1])

    def prob_of(self, value: int) -> float:
        idx = np.searchsorted(self.values, value)
        if idx < self.values.size and self.values[idx] == value:
            return float(self.probs[idx])
        return 0.0

    def quantile(self, u: float) -> int:
        """Left-continuous inverse CDF; monotone in ``u``."""
        idx = np.searchsorted(self._cum, u, side="right")
        return int(self.values[min(int(idx), self.values.size - 1)])

    def sample(self, rng: np.random.Generator, size: Optional[int] = None):
        """Draw from the distribution via inverse-CDF lookup."""
        u = rng.random(size)
        idx = np.searchsorted(self._cum, u, side="right")
        idx = np.minimum(idx, self.values.size - 1)
        out = self.values[idx]
        return int(out) if size is None else out

    def items(self):
        return zip(self.values.tolist(), self.probs.tolist())

    def __eq__(self, other):
        if not isinstance(other, DiscreteDistribution):
            return NotImplemented
        return (np.array_equal(self.values, other.values)
                and np.array_equal(self.probs, other.probs))


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Multiset of integer samples, e.g. Monte Carlo delivery times."""

    values: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.int64)
        counts = np.asarray(self.counts, dtype=np.int64)
        if values.size == 0:
            raise ValueError("empty sample set")
        if np.any(counts <= 0) or np.any(np.diff(values) <= 0):
            raise ValueError("counts must be positive, values strictly increasing")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "_cum", np.cumsum(counts))
        self.values.setflags(write=False)
        self.counts.setflags(write=False)

    @classmethod
    def from_samples(cls, samples: Iterable[int]) -> "EmpiricalDistribution":
        arr = np.asarray(list(samples), dtype=np.int64)
        values, counts = np.unique(arr, return_counts=True)
        return cls(values, counts)

    @property
    def count(self) -> int:
        return int(self._cum[-1])

    def cdf(self, t: float) -> float:
        idx = np.searchsorted(self.values, t, side="right")
        if idx == 0:
            return 0.0
        return float(self._cum[idx - 1]) / self.count

    def cdf_at(self, ts: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.values, ts, side="right")
        cum = np.concatenate([[0], self._cum])
        return cum[idx] / self.count

    def mean(self) -> float:
        return float(np.dot(self.values, self.counts)) / self.count

    def std(self) -> float:
        mu = self.mean()
        return float(np.sqrt(np.dot((self.values - mu) ** 2, self.counts) / self.count))

    def to_distribution(self) -> DiscreteDistribution:
        return DiscreteDistribution(self.values, self.counts / self.count)

    def __eq__(self, other):
        if not isinstance(other, EmpiricalDistribution):
            return NotImplemented
        return (np.array_equal(self.values, other.values)
                and np.array_equal(self.counts, other.counts))


@dataclass(frozen=True)
class JointDistribution:
    """Exact joint mass over integer pairs (x, y)."""

    xs: np.ndarray
    ys: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=np.int64)
        ys = np.asarray(self.ys, dtype=np.int64)
        probs = np.asarray(self.probs, dtype=np.float64)
        if not (xs.size == ys.size == probs.size) or xs.size == 0:
            raise ValueError("xs, ys, probs must be equal-length and nonempty")
        if np.any(probs < 0):
            raise ValueError("negative probability mass")
        if abs(probs.sum() - 1.0) > PROB_TOL:
            raise ValueError("joint probabilities must sum to 1")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        object.__setattr__(self, "probs", probs)
        for a in (self.xs, self.ys, self.probs):
            a.setflags(write=False)

    @classmethod
    def from_atoms(cls, atoms: Iterable[tuple[int, int, float]]) -> "JointDistribution":
        atoms = list(atoms)
        xs = [a[0] for a in atoms]
        ys = [a[1] for a in atoms]
        ps = [a[2] for a in atoms]
        return cls(np.asarray(xs), np.asarray(ys), np.asarray(ps))

    def marginal_x(self) -> DiscreteDistribution:
        return DiscreteDistribution.from_pairs(zip(self.xs.tolist(), self.probs.tolist()))

    def marginal_y(self) -> DiscreteDistribution:
        return DiscreteDistribution.from_pairs(zip(self.ys.tolist(), self.probs.tolist()))

    def correlation(self) -> float:
        """Pearson correlation computed exactly from the joint mass.

        Raises ``ValueError`` when either marginal has zero variance, in
        which case the coefficient is undefined.
        """
        p = self.probs
        mx = float(np.dot(self.xs, p))
        my = float(np.dot(self.ys, p))
        vx = float(np.dot((self.xs - mx) ** 2, p))
        vy = float(np.dot((self.ys - my) ** 2, p))
        if vx <= 0.0 or vy <= 0.0:
            raise ValueError("correlation undefined: a marginal has zero variance")
        cov = float(np.dot((self.xs - mx) * (self.ys - my), p))
        return cov / np.sqrt(vx * vy)

    def __eq__(self, other):
        if not isinstance(other, JointDistribution):
            return NotImplemented
        return (np.array_equal(self.xs, other.xs)
                and np.array_equal(self.ys, other.ys)
                and np.array_equal(self.probs, other.probs))


def correlation(joint: JointDistribution) -> float:
    """Pearson correlation of a finite joint distribution."""
    return joint.correlation()


@dataclass(frozen=True)
class ConditionalFamily:
    """Family {X | condition = h} for h = 1..h_max (contiguous).

    Used for alternate-route lengths conditioned on the requesting node's
    hop distance, and for waiting times conditioned the same way.
    """

    entries: Mapping[int, DiscreteDistribution]

    def __post_init__(self):
        entries = dict(self.entries)
        if not entries:
            raise ValueError("family must have at least one entry")
        hs = sorted(entries)
        if hs[0] != 1 or hs != list(range(1, len(hs) + 1)):
            raise ValueError("condition values must form a contiguous range 1..h_max")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_dict(cls, d: Mapping[int, DiscreteDistribution]) -> "ConditionalFamily":
        return cls(dict(d))

    @property
    def h_max(self) -> int:
        return len(self.entries)

    def entry(self, h: int) -> DiscreteDistribution:
        return self.entries[h]

    def sample(self, rng: np.random.Generator, h: int) -> int:
        return self.entries[h].sample(rng)

    def items(self):
        return ((h, self.entries[h]) for h in range(1, self.h_max + 1))


# ---------------------------------------------------------------------------
# stochastic order relations
# ---------------------------------------------------------------------------

def dominates(x: DiscreteDistribution, y: DiscreteDistribution, tol: float = PROB_TOL) -> bool:
    """Weak first-order stochastic dominance: F_X(t) <= F_Y(t) + tol for all t.

    Equality is allowed, so every distribution dominates itself.  Checking
    at the union of the two supports suffices because both CDFs are step
    functions that only change there.
    """
    grid = np.union1d(x.values, y.values)
    return bool(np.all(x.cdf_at(grid) <= y.cdf_at(grid) + tol))


@dataclass(frozen=True)
class MonotonicityReport:
    """Outcome of a stochastic-monotonicity check over a conditional family."""

    monotone: bool
    #: First violating (h0, h1, t): F at condition h1 exceeds F at h0 at point t.
    witness: Optional[tuple[int, int, int]] = None

    def __bool__(self) -> bool:
        return self.monotone


def _first_crossing(hi: DiscreteDistribution, lo: DiscreteDistribution, tol: float) -> Optional[int]:
    grid = np.union1d(hi.values, lo.values)
    bad = hi.cdf_at(grid) > lo.cdf_at(grid) + tol
    if not bad.any():
        return None
    return int(grid[int(np.argmax(bad))])


def is_stochastically_monotone(family, tol: float = PROB_TOL) -> MonotonicityReport:
    """Check that the conditional law is dominance-increasing in the condition.

    Accepts a :class:`ConditionalFamily` or any mapping from condition value
    to :class:`DiscreteDistribution`.  Returns the smallest witnessing pair
    (h0, h1) with a crossing point t on failure.
    """
    if isinstance(family, ConditionalFamily):
        entries = dict(family.items())
    else:
        entries = dict(family)
    hs = sorted(entries)
    for i, h0 in enumerate(hs):
        for h1 in hs[i + 1:]:
            t = _first_crossing(entries[h1], entries[h0], tol)
            if t is not None:
                return MonotonicityReport(False, (h0, h1, t))
    return MonotonicityReport(True, None)


@dataclass(frozen=True)
class TransitivityReport:
    """Per-instance verdicts for the three-variable monotonicity chain.

    The chain property under test: if Y is monotone in X, Z is monotone in
    Y, and Z is conditionally independent of X given Y, then Z is monotone
    in X.
    """

    y_mono_x: bool
    z_mono_y: bool
    z_indep_x_given_y: bool
    z_mono_x: bool

    @property
    def premises_hold(self) -> bool:
        return self.y_mono_x and self.z_mono_y and self.z_indep_x_given_y

    @property
    def implication_holds(self) -> bool:
        return (not self.premises_hold) or self.z_mono_x


def _grouped_conditionals(conds, vals, probs) -> dict[int, DiscreteDistribution]:
    """Normalized distribution of ``vals`` for each condition value."""
    groups: dict[int, dict[int, float]] = {}
    for c, v, p in zip(conds, vals, probs):
        if p <= 0.0:
            continue
        groups.setdefault(int(c), {})
        groups[int(c)][int(v)] = groups[int(c)].get(int(v), 0.0) + p
    out = {}
    for c, masses in groups.items():
        total = sum(masses.values())
        out[c] = DiscreteDistribution.from_pairs((v, p / total) for v, p in masses.items())
    return out


def check_transitivity_instance(atoms: Iterable[tuple[int, int, int, float]],
                                tol: float = 1e-9) -> TransitivityReport:
    """Evaluate the monotonicity-chain premises and conclusion on a finite joint.

    ``atoms`` is a list of (x, y, z, prob) with probabilities summing to one.
    All four verdicts are returned so callers can assert the implication
    (premises => conclusion) on generated instances.
    """
    atoms = [(int(x), int(y), int(z), float(p)) for x, y, z, p in atoms]
    total = sum(p for *_ignored, p in atoms)
    if abs(total - 1.0) > PROB_TOL:
        raise ValueError("atom probabilities must sum to 1")
    xs = [a[0] for a in atoms]
    ys = [a[1] for a in atoms]
    zs = [a[2] for a in atoms]
    ps = [a[3] for a in atoms]

    y_given_x = _grouped_conditionals(xs, ys, ps)
    z_given_y = _grouped_conditionals(ys, zs, ps)
    z_given_x = _grouped_conditionals(xs, zs, ps)

    a = is_stochastically_monotone(y_given_x, tol).monotone
    b = is_stochastically_monotone(z_given_y, tol).monotone
    d = is_stochastically_monotone(z_given_x, tol).monotone

    # conditional independence of Z from X given Y: within each y, the
    # conditional law of Z must not depend on x
    c = True
    by_y: dict[int, dict[int, dict[int, float]]] = {}
    for x, y, z, p in atoms:
        if p <= 0.0:
            continue
        by_y.setdefault(y, {}).setdefault(x, {})
        by_y[y][x][z] = by_y[y][x].get(z, 0.0) + p
    for y, per_x in by_y.items():
        dists = []
        for x, masses in per_x.items():
            tot = sum(masses.values())
            dists.append(DiscreteDistribution.from_pairs(
                (z, p / tot) for z, p in masses.items()))
        grid = np.union1d(dists[0].values, dists[0].values)
        for other in dists[1:]:
            grid = np.union1d(grid, other.values)
        base = dists[0].cdf_at(grid)
        for other in dists[1:]:
            if np.max(np.abs(other.cdf_at(grid) - base)) > tol:
                c = False
                break
        if not c:
            break

    return TransitivityReport(a, b, c, d)


# ---------------------------------------------------------------------------
# text table serialization
# ---------------------------------------------------------------------------

def _data_lines(text: str):
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            yield line


def format_distribution(dist: DiscreteDistribution) -> str:
    """Render as whitespace-separated "value prob" lines."""
    return "\n".join(f"{v} {p:.17g}" for v, p in dist.items()) + "\n"


def parse_distribution(text: str) -> DiscreteDistribution:
    pairs = []
    for line in _data_lines(text):
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"expected 'value prob', got {line!r}")
        pairs.append((int(parts[0]), float(parts[1])))
    return DiscreteDistribution.from_pairs(pairs)


def format_family(family: ConditionalFamily) -> str:
    """Render as whitespace-separated "h value prob" lines."""
    lines = []
    for h, dist in family.items():
        for v, p in dist.items():
            lines.append(f"{h} {v} {p:.17g}")
    return "\n".join(lines) + "\n"


def parse_family(text: str) -> ConditionalFamily:
    rows: dict[int, list[tuple[int, float]]] = {}
    for line in _data_lines(text):
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"expected 'h value prob', got {line!r}")
        rows.setdefault(int(parts[0]), []).append((int(parts[1]), float(parts[2])))
    return ConditionalFamily({h: DiscreteDistribution.from_pairs(pairs)
                              for h, pairs in rows.items()})
