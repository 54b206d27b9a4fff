"""
Finite realizations of the eps-cover X_eps.

A vertex is a pair (point, coset): the class of an eps-chain from the
basepoint to `point` whose group element, read through the spanning tree,
is `coset`. The edge labeled q from (x, c) leads to (q, c * L(x, q)), where
L(x, q) is the letter of the step x -> q. Infinite groups give Truncated
covers holding every coset within `radius` deck steps of the identity.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union
import logging

import networkx as nx
import numpy as np

from config import COSET_BUDGET, DEFAULT_TRUNCATION, REFINING_PATH_BUDGET
from .chains import Chain, validate_chain
from .coset_table import CosetTable, enumerate_cosets
from .errors import (
    NonpositiveScaleError, NotALoopError, OutsideTruncationError,
    ScaleMismatchError, ScaleOrderViolationError, StartMismatchError, UndecidedError,
)
from .homology import RelationLattice, letters_vector
from .metric_space import FiniteMetricSpace, Partition, _partition_of, connectivity_threshold
from .nullity import is_null
from .rips import Presentation, Word, presentation

logger = logging.getLogger(__name__)

COMPLETE = 'complete'
TRUNCATED = 'truncated'

Vertex = int


@dataclass(frozen=True, eq=False)
class CoveringGraph:
    space: FiniteMetricSpace
    scale: float
    status: str
    radius: Optional[int]
    pres: Presentation
    table: CosetTable
    vertices: Tuple[Tuple[int, int], ...]
    index: Dict[Tuple[int, int], int] = field(repr=False)

    @property
    def basepoint(self) -> int:
        return self.pres.basepoint

    @property
    def base_vertex(self) -> Vertex:
        return self.index[(self.pres.basepoint, 0)]

    def endpoint(self, v: Vertex) -> int:
        return self.vertices[v][0]

    def coset(self, v: Vertex) -> int:
        return self.vertices[v][1]

    def fiber(self, point: int) -> List[Vertex]:
        return [v for v, (x, _) in enumerate(self.vertices) if x == point]

    def fibers(self) -> Dict[int, int]:
        counts: Dict[int, int] = {}
        for x, _ in self.vertices:
            counts[x] = counts.get(x, 0) + 1
        return counts

    def step(self, v: Vertex, q: int) -> Optional[Vertex]:
        """Follow the edge labeled q; None when it is not an eps-step or leaves the cover."""
        x, c = self.vertices[v]
        if not self.space.dist[x, q] < self.scale or not self.pres.in_component(q):
            return None
        letter = self.pres.letter(x, q)
        target = self.table.act(c, (letter,)) if letter else c
        if target is None:
            return None
        return self.index.get((q, target))

    def edges(self) -> List[Tuple[Vertex, int, Vertex]]:
        out = []
        for v, (x, _) in enumerate(self.vertices):
            for q in np.flatnonzero(self.space.dist[x] < self.scale):
                w = self.step(v, int(q))
                if w is not None:
                    out.append((v, int(q), w))
        return out

    @property
    def group_order(self) -> Optional[int]:
        return self.table.order


@dataclass(frozen=True)
class LiftResult:
    vertices: Tuple[Vertex, ...]

    @property
    def final(self) -> Vertex:
        return self.vertices[-1]


def build_cover(space: FiniteMetricSpace, eps: float, basepoint: int = 0,
                budget: Optional[int] = None, radius: Optional[int] = None) -> CoveringGraph:
    """
    Realize X_eps over the basepoint's component.

    Args:
        space: the metric space
        eps: scale
        basepoint: root of the presentation
        budget: defined-coset budget for the enumeration
        radius: deck radius kept when the enumeration does not close

    Returns:
        CoveringGraph, Complete when the group is finite and the
        enumeration closes within budget
    """
    if not eps > 0:
        raise NonpositiveScaleError(eps)
    budget = COSET_BUDGET if budget is None else budget
    radius = DEFAULT_TRUNCATION if radius is None else radius
    pres = presentation(space, eps, basepoint)
    table = enumerate_cosets(pres.ngens, pres.relators, budget)

    if table.closed:
        status, kept, kept_radius = COMPLETE, range(len(table.table)), None
    else:
        dist = table.distances()
        status, kept_radius = TRUNCATED, radius
        kept = [c for c in range(len(table.table)) if dist[c] <= radius]
        logger.warning("Cover at %s truncated to deck radius %d (%d cosets)", eps, radius, len(kept))

    vertices = tuple((x, c) for c in kept for x in pres.component)
    vertices = tuple(sorted(vertices, key=lambda v: (v[1], v[0])))
    cover = CoveringGraph(
        space=space, scale=eps, status=status, radius=kept_radius, pres=pres, table=table,
        vertices=vertices, index={v: k for k, v in enumerate(vertices)},
    )
    logger.info("Cover at %s: %s, %d vertices", eps, status, len(vertices))
    return cover


def lift_chain(cover: CoveringGraph, chain: Chain, start_vertex: Vertex) -> LiftResult:
    """The unique lift of a chain following labeled edges."""
    if chain.scale > cover.scale:
        raise ScaleMismatchError(f"chain at {chain.scale} exceeds cover scale {cover.scale}")
    if cover.endpoint(start_vertex) != chain.start:
        raise StartMismatchError(f"vertex {start_vertex} lies over {cover.endpoint(start_vertex)}, "
                                 f"chain starts at {chain.start}")
    check = validate_chain(cover.space, chain)
    if not check.ok:
        raise NotALoopError(f"not a chain at {chain.scale}: position {check.position}")
    lifted = [start_vertex]
    for q in chain.points[1:]:
        w = cover.step(lifted[-1], q)
        if w is None:
            raise OutsideTruncationError(f"lift leaves the cover at point {q}")
        lifted.append(w)
    return LiftResult(tuple(lifted))


def fstar_related(cover: CoveringGraph, v: Vertex, w: Vertex, delta: float) -> bool:
    """d(endpoints) < delta and the edge labeled endpoint(w) from v leads to w."""
    if delta > cover.scale:
        raise ScaleOrderViolationError(f"delta={delta} exceeds cover scale {cover.scale}")
    x, y = cover.endpoint(v), cover.endpoint(w)
    if not cover.space.dist[x, y] < delta:
        return False
    return cover.step(v, y) == w


def deck_action(cover: CoveringGraph, element: Union[Word, Chain, Sequence[int]],
                vertex: Vertex) -> Vertex:
    """Left action of a loop class at the basepoint: h.(x, c) = (x, h c)."""
    if isinstance(element, Chain):
        if not element.is_loop or element.start != cover.basepoint:
            raise NotALoopError(f"chain {element.points} is not a loop at {cover.basepoint}")
        letters = cover.pres.walk_letters(element.points)
    elif isinstance(element, Word):
        letters = element.letters
    else:
        letters = tuple(element)
    x, c = cover.vertices[vertex]
    target = cover.table.act(0, tuple(letters) + cover.table.words[c])
    if target is None or (x, target) not in cover.index:
        raise OutsideTruncationError(f"deck translate of vertex {vertex} leaves the cover")
    return cover.index[(x, target)]


def cover_chain_components(cover: CoveringGraph, delta: float) -> Partition:
    """Components of the graph of fstar_related pairs at delta."""
    if delta > cover.scale:
        raise ScaleOrderViolationError(f"delta={delta} exceeds cover scale {cover.scale}")
    if cover.status == TRUNCATED:
        logger.info("Components near the truncation boundary are approximate")
    pairs = []
    dist = cover.space.dist
    for v, (x, _) in enumerate(cover.vertices):
        for q in np.flatnonzero(dist[x] < delta):
            w = cover.step(v, int(q))
            if w is not None and w != v:
                pairs.append((v, w))
    return _partition_of(len(cover.vertices), pairs)


def component_surjects(cover: CoveringGraph, delta: float) -> bool:
    """Whether endpoint maps every chain component at delta onto the base component."""
    part = cover_chain_components(cover, delta)
    wanted = set(cover.pres.component)
    for members in part.groups().values():
        if {cover.endpoint(v) for v in members} != wanted:
            return False
    return True


def fineness_grid(space: FiniteMetricSpace, delta: float) -> List[float]:
    """delta plus the midpoints of the distance grid between the connectivity threshold and delta."""
    floor = connectivity_threshold(space)
    values = [float(v) for v in space.distinct_distances]
    grid = {float(delta)}
    for lo, hi in zip(values, values[1:]):
        mid = (lo + hi) / 2
        if lo >= floor and mid < delta:
            grid.add(mid)
    return sorted(grid)


# ---------------------------------------------------------------------------
# Refined connectivity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RefinedConnectivity:
    """Outcome per pair: a witness chain for every pair, or the first failing pair."""
    holds: bool
    eps: float
    delta: float
    kappa: float
    witnesses: Dict[Tuple[int, int], Chain]
    failing_pair: Optional[Tuple[int, int]] = None


def fineness_graph(space: FiniteMetricSpace, kappa: float) -> nx.Graph:
    """The kappa-graph with edges weighted by distance."""
    graph = nx.Graph()
    graph.add_nodes_from(range(space.n))
    for i, j in np.argwhere(np.triu(space.dist < kappa, k=1)):
        graph.add_edge(int(i), int(j), weight=float(space.dist[i, j]))
    return graph


def cycle_vectors(pres: Presentation, graph: nx.Graph, root: int) -> List[Dict[int, int]]:
    """H1 vectors of a cycle basis of root's component of the graph."""
    comp = graph.subgraph(nx.node_connected_component(graph, root))
    return [letters_vector(pres.walk_letters(list(cycle) + [cycle[0]]))
            for cycle in nx.cycle_basis(comp)]


def reachable_classes(pres: Presentation, graph: nx.Graph, root: int) -> RelationLattice:
    """Relators plus the images of every cycle in root's component of the graph."""
    vectors = [letters_vector(rel) for rel in pres.relators]
    return RelationLattice(pres.ngens, vectors + cycle_vectors(pres, graph, root))


def _refine_pair(space: FiniteMetricSpace, eps: float, graph: nx.Graph, x: int, y: int,
                 budget: Optional[int], paths: int,
                 lattices: Dict[int, RelationLattice]) -> Optional[Chain]:
    """A kappa-path from x to y closing to an eps-null loop, None when none exists."""
    if not nx.has_path(graph, x, y):
        return None
    base = nx.shortest_path(graph, x, y, weight='weight')
    verdict = is_null(space, eps, Chain(eps, tuple(base) + (x,)), budget=budget)
    if verdict.is_null:
        return Chain(eps, tuple(base))

    pres = presentation(space, eps, x)
    offset = letters_vector(pres.walk_letters(list(base) + [x]))
    if x not in lattices:
        lattices[x] = reachable_classes(pres, graph, x)
    if not lattices[x].contains(offset):
        return None

    for k, path in enumerate(nx.shortest_simple_paths(graph, x, y, weight='weight')):
        if k >= paths:
            break
        verdict = is_null(space, eps, Chain(eps, tuple(path) + (x,)), budget=budget)
        if verdict.is_null:
            return Chain(eps, tuple(path))
    raise UndecidedError(f"no null kappa-path found among {paths} candidates", (x, y))


def check_refined_connectivity(space: FiniteMetricSpace, eps: float, delta: float, kappa: float,
                               budget: Optional[int] = None,
                               paths: Optional[int] = None) -> RefinedConnectivity:
    """
    Whether every delta-close pair is joined by a kappa-chain whose closing
    loop is eps-null.

    A pair fails outright when it is not kappa-connected, or when the H1 class
    of every kappa-path's closing loop lies outside the relator lattice.

    Raises:
        UndecidedError: H1 cannot separate a pair and no candidate path was null
    """
    if not 0 < kappa <= delta <= eps:
        raise ScaleOrderViolationError(f"need 0 < kappa <= delta <= eps, got {kappa}, {delta}, {eps}")
    paths = REFINING_PATH_BUDGET if paths is None else paths
    graph = fineness_graph(space, kappa)
    witnesses: Dict[Tuple[int, int], Chain] = {}
    lattices: Dict[int, RelationLattice] = {}
    for x, y in np.argwhere(np.triu(space.dist < delta, k=1)):
        x, y = int(x), int(y)
        alpha = _refine_pair(space, eps, graph, x, y, budget, paths, lattices)
        if alpha is None:
            logger.info("Refined connectivity fails at pair (%d, %d), kappa=%s", x, y, kappa)
            return RefinedConnectivity(False, eps, delta, kappa, witnesses, (x, y))
        witnesses[(x, y)] = alpha
    return RefinedConnectivity(True, eps, delta, kappa, witnesses)
