"""Random geometric graphs on torus, disk, and rectangle regions.

Nodes are spread uniformly over the region and linked whenever their
region-metric distance is at most the transmission range r0 (ties at
exactly r0 count as linked).  The torus uses the wrap-around metric and is
the default for degree sweeps since it has no boundary effects; the disk
exists for the hop-count vs distance studies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _cc
from scipy.sparse.csgraph import dijkstra, shortest_path

from ._seeds import as_seed_sequence

TORUS = "torus"
DISK = "disk"
RECTANGLE = "rectangle"


@dataclass(frozen=True)
class Region:
    """A 2-D region: torus(side), disk(radius), or rectangle(a, b)."""

    kind: str
    dims: tuple[float, ...]

    def __post_init__(self):
        if self.kind not in (TORUS, DISK, RECTANGLE):
            raise ValueError(f"unknown region kind {self.kind!r}")
        if any(d <= 0 for d in self.dims):
            raise ValueError("region dimensions must be strictly positive")
        expected = {TORUS: 1, DISK: 1, RECTANGLE: 2}[self.kind]
        if len(self.dims) != expected:
            raise ValueError(f"{self.kind} takes {expected} dimension(s)")

    @classmethod
    def torus(cls, side: float) -> "Region":
        return cls(TORUS, (float(side),))

    @classmethod
    def disk(cls, radius: float) -> "Region":
        return cls(DISK, (float(radius),))

    @classmethod
    def rectangle(cls, a: float, b: float) -> "Region":
        return cls(RECTANGLE, (float(a), float(b)))

    def area(self) -> float:
        if self.kind == TORUS:
            return self.dims[0] ** 2
        if self.kind == DISK:
            return math.pi * self.dims[0] ** 2
        return self.dims[0] * self.dims[1]

    def sample_points(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """n i.i.d. uniform points on the region, shape (n, 2)."""
        if self.kind == TORUS:
            return rng.random((n, 2)) * self.dims[0]
        if self.kind == RECTANGLE:
            return rng.random((n, 2)) * np.asarray(self.dims)
        radius = self.dims[0]
        r = radius * np.sqrt(rng.random(n))
        theta = rng.random(n) * 2.0 * math.pi
        return np.column_stack([r * np.cos(theta), r * np.sin(theta)])

    def pairwise_sq_distances(self, points: np.ndarray) -> np.ndarray:
        """Squared region-metric distances between all point pairs."""
        diff = np.abs(points[:, None, :] - points[None, :, :])
        if self.kind == TORUS:
            side = self.dims[0]
            diff = np.minimum(diff, side - diff)
        return (diff ** 2).sum(axis=-1)

    def spec_string(self) -> str:
        return " ".join([self.kind] + [f"{d:.17g}" for d in self.dims])

    @classmethod
    def from_spec_string(cls, text: str) -> "Region":
        parts = text.split()
        return cls(parts[0], tuple(float(x) for x in parts[1:]))


@dataclass(frozen=True)
class DegreeParams:
    """Node count, range, and target expected degree; fixes the region area."""

    n: int
    r0: float
    target_degree: float

    def __post_init__(self):
        if self.n < 2 or self.r0 <= 0 or self.target_degree <= 0:
            raise ValueError("need n >= 2, r0 > 0, target_degree > 0")

    def area(self) -> float:
        return area_for_degree(self.n, self.r0, self.target_degree)

    def torus(self) -> Region:
        return Region.torus(math.sqrt(self.area()))


def area_for_degree(n: int, r0: float, d: float) -> float:
    """Region area giving expected node degree d: A = (n-1) * pi * r0^2 / d."""
    if n < 2 or r0 <= 0 or d <= 0:
        raise ValueError("need n >= 2, r0 > 0, d > 0")
    return (n - 1) * math.pi * r0 * r0 / d


@dataclass(frozen=True)
class NetworkSnapshot:
    """Node positions plus geometric-link adjacency on a region."""

    positions: np.ndarray
    adjacency: np.ndarray
    r0: float
    region: Region

    def __post_init__(self):
        object.__setattr__(self, "positions", np.asarray(self.positions, dtype=np.float64))
        adj = np.asarray(self.adjacency, dtype=bool)
        n = self.positions.shape[0]
        if adj.shape != (n, n):
            raise ValueError("adjacency shape must match node count")
        if adj.diagonal().any() or not np.array_equal(adj, adj.T):
            raise ValueError("adjacency must be symmetric and irreflexive")
        object.__setattr__(self, "adjacency", adj)
        self.positions.setflags(write=False)
        self.adjacency.setflags(write=False)

    @classmethod
    def from_positions(cls, positions: np.ndarray, region: Region, r0: float) -> "NetworkSnapshot":
        """Compute adjacency from positions under the geometric link model."""
        positions = np.asarray(positions, dtype=np.float64)
        sq = region.pairwise_sq_distances(positions)
        adj = sq <= r0 * r0
        np.fill_diagonal(adj, False)
        return cls(positions, adj, float(r0), region)

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    def edge_count(self) -> int:
        return int(self.adjacency.sum()) // 2

    def graph(self) -> csr_matrix:
        return csr_matrix(self.adjacency)


def sample_topology(n: int, region: Region, r0: float, seed) -> NetworkSnapshot:
    """Uniform random snapshot; deterministic (bit-for-bit) given the seed."""
    if n < 1:
        raise ValueError("need n >= 1")
    if r0 <= 0:
        raise ValueError("need r0 > 0")
    rng = np.random.default_rng(as_seed_sequence(seed))
    points = region.sample_points(n, rng)
    return NetworkSnapshot.from_positions(points, region, r0)


def connected_components(snapshot: NetworkSnapshot) -> list[list[int]]:
    """Partition of node indices into maximal connected sets."""
    ncomp, labels = _cc(snapshot.graph(), directed=False)
    parts: list[list[int]] = [[] for _ in range(ncomp)]
    for node, lab in enumerate(labels):
        parts[lab].append(node)
    return parts


def component_labels(snapshot: NetworkSnapshot) -> np.ndarray:
    return _cc(snapshot.graph(), directed=False)[1]


def shortest_path_hops(snapshot: NetworkSnapshot, u: int, v: int) -> Optional[int]:
    """Minimum hop count from u to v; None when unreachable; 0 when u == v."""
    n = snapshot.n
    if not (0 <= u < n and 0 <= v < n):
        raise ValueError(f"node index out of range for n={n}")
    if u == v:
        return 0
    dist = dijkstra(snapshot.graph(), directed=False, unweighted=True, indices=u)
    return None if np.isinf(dist[v]) else int(dist[v])


def hop_matrix(snapshot: NetworkSnapshot) -> np.ndarray:
    """All-pairs hop counts (inf where unreachable)."""
    return shortest_path(snapshot.graph(), method="D", unweighted=True, directed=False)


# ---------------------------------------------------------------------------
# text export (reproducibility dumps)
# ---------------------------------------------------------------------------

def format_snapshot(snapshot: NetworkSnapshot) -> str:
    """Header "n r0 region-spec" then one "x y" line per node."""
    head = f"{snapshot.n} {snapshot.r0:.17g} {snapshot.region.spec_string()}"
    body = "\n".join(f"{x:.17g} {y:.17g}" for x, y in snapshot.positions)
    return head + "\n" + body + "\n"


def parse_snapshot(text: str) -> NetworkSnapshot:
    lines = [ln for ln in (raw.split("#", 1)[0].strip() for raw in text.splitlines()) if ln]
    head = lines[0].split(maxsplit=2)
    n, r0 = int(head[0]), float(head[1])
    region = Region.from_spec_string(head[2])
    pts = np.asarray([[float(a) for a in ln.split()] for ln in lines[1:1 + n]])
    if pts.shape != (n, 2):
        raise ValueError("point count does not match header")
    return NetworkSnapshot.from_positions(pts, region, r0)
