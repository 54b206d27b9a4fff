"""
Finite metric spaces, scale graphs and chain components.

Everything else in the package is built on FiniteMetricSpace. Scales are
compared strictly: two points are adjacent at scale eps iff d < eps.
"""
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple
import hashlib
import json
import logging

import numpy as np
from scipy.cluster.hierarchy import DisjointSet
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import minimum_spanning_tree, shortest_path

from config import TRIANGLE_TOLERANCE
from .errors import (
    AsymmetricMatrixError, DisconnectedGraphError, IndexOutOfRangeError,
    NegativeDistanceError, NonpositiveScaleError, SchemaError,
    TriangleViolationError,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """
    Immutable point set with a validated distance matrix.

    Instances hash by identity so they can key per-space caches; use
    `digest` to compare two spaces by content.
    """
    dist: np.ndarray
    labels: Optional[Tuple[str, ...]] = None
    geodesic_flag: bool = False

    @property
    def n(self) -> int:
        return int(self.dist.shape[0])

    def d(self, i: int, j: int) -> float:
        return float(self.dist[i, j])

    def check_index(self, i: int):
        if not 0 <= i < self.n:
            raise IndexOutOfRangeError(i, self.n)

    @cached_property
    def diameter(self) -> float:
        return float(self.dist.max()) if self.n > 1 else 0.0

    @cached_property
    def distinct_distances(self) -> np.ndarray:
        """Sorted distinct positive pairwise distances."""
        upper = self.dist[np.triu_indices(self.n, k=1)]
        return np.unique(upper)

    @cached_property
    def digest(self) -> str:
        payload = json.dumps({
            'dist': self.dist.tolist(),
            'labels': list(self.labels) if self.labels else None,
            'geodesic': self.geodesic_flag,
        }, sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()

    def __repr__(self):
        return f"FiniteMetricSpace(n={self.n}, geodesic={self.geodesic_flag})"


@dataclass(frozen=True)
class ScaleGraph:
    scale: float
    n: int
    edges: Tuple[Tuple[int, int], ...]

    def neighbors(self) -> List[List[int]]:
        """Ascending neighbor lists."""
        adj: List[List[int]] = [[] for _ in range(self.n)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        for row in adj:
            row.sort()
        return adj


@dataclass(frozen=True)
class Partition:
    """Component id per point; ids are the minimum member index."""
    representative: Tuple[int, ...]

    @property
    def count(self) -> int:
        return len(set(self.representative))

    def same(self, i: int, j: int) -> bool:
        return self.representative[i] == self.representative[j]

    def members(self, rep: int) -> List[int]:
        return [i for i, r in enumerate(self.representative) if r == rep]

    def groups(self) -> Dict[int, List[int]]:
        out: Dict[int, List[int]] = {}
        for i, r in enumerate(self.representative):
            out.setdefault(r, []).append(i)
        return out


def _require_scale(eps: float):
    if not eps > 0:
        raise NonpositiveScaleError(eps)


def build_space(dist_matrix, labels: Optional[Sequence[str]] = None,
                geodesic_flag: bool = False) -> FiniteMetricSpace:
    """
    Validate a distance matrix and wrap it.

    Args:
        dist_matrix: square n x n array-like of non-negative reals
        labels: optional point names
        geodesic_flag: set by graph_metric_space

    Returns:
        FiniteMetricSpace

    Raises:
        SchemaError, AsymmetricMatrixError, NegativeDistanceError,
        TriangleViolationError
    """
    D = np.array(dist_matrix, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1] or D.shape[0] == 0:
        raise SchemaError(f"distance matrix must be square and nonempty, got shape {D.shape}")
    n = D.shape[0]
    if labels is not None and len(labels) != n:
        raise SchemaError(f"{len(labels)} labels for {n} points")

    scale = max(1.0, float(np.abs(D).max()))
    tol = TRIANGLE_TOLERANCE * scale

    bad = np.argwhere(np.abs(D - D.T) > tol)
    if len(bad):
        i, j = (int(v) for v in bad[0])
        raise AsymmetricMatrixError(i, j)
    D = (D + D.T) / 2.0

    diag = np.diag(D)
    if np.any(diag != 0):
        i = int(np.flatnonzero(diag != 0)[0])
        raise NegativeDistanceError(i, i, float(diag[i]))
    off = ~np.eye(n, dtype=bool)
    bad = np.argwhere(off & ~(D > 0))
    if len(bad):
        i, j = (int(v) for v in bad[0])
        raise NegativeDistanceError(i, j, float(D[i, j]))

    for j in range(n):
        through = D[:, j][:, None] + D[j, :][None, :]
        bad = np.argwhere(D > through + tol)
        if len(bad):
            i, k = (int(v) for v in bad[0])
            raise TriangleViolationError(i, j, k)

    D.setflags(write=False)
    space = FiniteMetricSpace(
        dist=D,
        labels=tuple(str(x) for x in labels) if labels is not None else None,
        geodesic_flag=geodesic_flag,
    )
    logger.debug("Built %r", space)
    return space


def graph_metric_space(n: int, edges: Iterable[Tuple[int, int, float]],
                       labels: Optional[Sequence[str]] = None) -> FiniteMetricSpace:
    """All-pairs shortest paths over a connected weighted graph."""
    weights: Dict[Tuple[int, int], float] = {}
    for i, j, w in edges:
        i, j, w = int(i), int(j), float(w)
        for v in (i, j):
            if not 0 <= v < n:
                raise IndexOutOfRangeError(v, n)
        if not w > 0:
            raise NegativeDistanceError(i, j, w)
        if i == j:
            continue
        key = (min(i, j), max(i, j))
        weights[key] = min(w, weights.get(key, np.inf))

    if weights:
        rows, cols = zip(*weights.keys())
        graph = csr_matrix((list(weights.values()), (rows, cols)), shape=(n, n))
    else:
        graph = csr_matrix((n, n))
    D = shortest_path(graph, method='D', directed=False)
    D = np.round(D, 12)
    if np.isinf(D).any():
        i, j = (int(v) for v in np.argwhere(np.isinf(D))[0])
        raise DisconnectedGraphError(f"no path between {i} and {j}")
    return build_space(D, labels=labels, geodesic_flag=True)


def adjacency(space: FiniteMetricSpace, eps: float) -> np.ndarray:
    """Boolean adjacency of the eps-graph (no self loops)."""
    _require_scale(eps)
    adj = space.dist < eps
    np.fill_diagonal(adj, False)
    return adj


def scale_graph(space: FiniteMetricSpace, eps: float) -> ScaleGraph:
    adj = adjacency(space, eps)
    pairs = np.argwhere(np.triu(adj, k=1))
    return ScaleGraph(scale=eps, n=space.n, edges=tuple((int(i), int(j)) for i, j in pairs))


def _partition_of(n: int, pairs) -> Partition:
    ds = DisjointSet(range(n))
    for i, j in pairs:
        ds.merge(int(i), int(j))
    rep = [0] * n
    for subset in ds.subsets():
        low = min(subset)
        for i in subset:
            rep[i] = low
    return Partition(tuple(rep))


def chain_components(space: FiniteMetricSpace, eps: float) -> Partition:
    """Components of the eps-graph via disjoint-set union."""
    adj = adjacency(space, eps)
    return _partition_of(space.n, np.argwhere(np.triu(adj, k=1)))


def connectivity_threshold(space: FiniteMetricSpace) -> float:
    """Largest edge on a minimum spanning tree of the complete distance graph."""
    if space.n == 1:
        return 0.0
    mst = minimum_spanning_tree(csr_matrix(space.dist))
    return float(mst.data.max())


def geodesic_mesh(space: FiniteMetricSpace) -> float:
    """
    Largest distance between two points with no third point on a geodesic
    between them.

    For kappa above it, every weighted shortest path of the kappa-graph is
    a geodesic of the space.
    """
    dist = space.dist
    slack = TRIANGLE_TOLERANCE * max(float(dist.max()), 1.0)
    split = np.eye(space.n, dtype=bool)
    for w in range(space.n):
        through = dist[:, w, None] + dist[None, w, :] <= dist + slack
        through[w, :] = False
        through[:, w] = False
        split |= through
    return float(dist[~split].max()) if not split.all() else 0.0


def ball(space: FiniteMetricSpace, center: int, eps: float) -> List[int]:
    space.check_index(center)
    _require_scale(eps)
    return [int(i) for i in np.flatnonzero(space.dist[center] < eps)]


def subspace(space: FiniteMetricSpace, indices: Sequence[int]) -> FiniteMetricSpace:
    idx = list(indices)
    for i in idx:
        space.check_index(i)
    D = space.dist[np.ix_(idx, idx)].copy()
    D.setflags(write=False)
    labels = tuple(space.labels[i] for i in idx) if space.labels else None
    return FiniteMetricSpace(dist=D, labels=labels, geodesic_flag=False)


def ball_chain_components(space: FiniteMetricSpace, center: int, eps: float,
                          kappa: float) -> Tuple[List[int], Partition]:
    """
    Chain components of the open eps-ball around center at fineness kappa.

    Returns the ball's point indices and a partition over positions in that
    list.
    """
    members = ball(space, center, eps)
    return members, chain_components(subspace(space, members), kappa)


def is_chained_entourage(space: FiniteMetricSpace, eps: float,
                         kappa: float) -> Tuple[bool, Optional[Tuple[int, int]]]:
    """
    Check that every eps-close pair is joined by a kappa-chain inside
    B(x, eps) & B(y, eps).

    Returns (True, None) or (False, first failing pair).
    """
    _require_scale(kappa)
    adj = adjacency(space, eps)
    for x, y in np.argwhere(np.triu(adj, k=1)):
        x, y = int(x), int(y)
        common = [int(i) for i in np.flatnonzero(adj[x] & adj[y])]
        members = sorted(set(common) | {x, y})
        part = chain_components(subspace(space, members), kappa)
        if not part.same(members.index(x), members.index(y)):
            return False, (x, y)
    return True, None
