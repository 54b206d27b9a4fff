"""
Inverse systems of finite metric spaces.

Stages are addressed by position 0..k-1; `bonds[i]` maps stage i+1 onto
stage i as an index array. Longer bonds are composed on demand.
"""
from dataclasses import dataclass, field
from itertools import islice
from typing import Dict, List, Optional, Sequence, Tuple, Union
import logging

import networkx as nx
import numpy as np

from config import LIPSCHITZ_TOLERANCE, REFINING_PATH_BUDGET
from .chains import (
    Chain, Homotopy, HomotopyCheck, Insert, Remove, apply_move, homotopy_chains, verify_homotopy,
)
from .covering import fineness_graph
from .errors import (
    IllegalMoveError, InconsistentThreadError, IndexOutOfRangeError, NotAHomotopyError,
    ScaleOrderViolationError, SchemaError,
)
from .homology import RelationLattice, letters_vector
from .metric_space import FiniteMetricSpace, geodesic_mesh
from .nullity import NONNULL, is_null
from .rips import presentation
from .scan_runner import ScanRunner

logger = logging.getLogger(__name__)

TRUE = 'true'
FALSE = 'false'
UNDECIDED = 'undecided'

CERTIFIED = 'certified'
NOT_APPLICABLE = 'not_applicable'

HOLDS = 'holds'
FAILS = 'fails'


@dataclass(frozen=True, eq=False)
class Tower:
    indices: Tuple[float, ...]
    stages: Tuple[FiniteMetricSpace, ...]
    bonds: Tuple[np.ndarray, ...]

    def __post_init__(self):
        if not self.stages:
            raise SchemaError("a tower needs at least one stage")
        if len(self.indices) != len(self.stages):
            raise SchemaError(f"{len(self.indices)} indices for {len(self.stages)} stages")
        if len(self.bonds) != len(self.stages) - 1:
            raise SchemaError(f"{len(self.bonds)} bonds for {len(self.stages)} stages")
        bonds = []
        for i, bond in enumerate(self.bonds):
            bond = np.asarray(bond, dtype=np.int64)
            if bond.shape != (self.stages[i + 1].n,):
                raise SchemaError(f"bond {i} has {bond.size} entries, stage {i + 1} has {self.stages[i + 1].n} points")
            if bond.size and (bond.min() < 0 or bond.max() >= self.stages[i].n):
                raise SchemaError(f"bond {i} points outside stage {i}")
            bond.setflags(write=False)
            bonds.append(bond)
        object.__setattr__(self, 'indices', tuple(float(r) for r in self.indices))
        object.__setattr__(self, 'bonds', tuple(bonds))

    @property
    def depth(self) -> int:
        return len(self.stages) - 1

    def check_stage(self, r: int):
        if not 0 <= r < len(self.stages):
            raise IndexOutOfRangeError(r, len(self.stages))


@dataclass(frozen=True)
class TowerCheck:
    ok: bool
    stages: Optional[Tuple[int, int]] = None
    reason: Optional[str] = None
    points: Tuple[int, ...] = ()


@dataclass(frozen=True)
class ThreadPoint:
    """One point per stage 0..depth, consistent under the bonds."""
    points: Tuple[int, ...]

    def at(self, stage: int) -> int:
        return self.points[stage]


@dataclass(frozen=True)
class EntourageSpec:
    stage: int
    scale: float

    def relates(self, tower: Tower, x: ThreadPoint, y: ThreadPoint) -> bool:
        return bool(tower.stages[self.stage].dist[x.at(self.stage), y.at(self.stage)] < self.scale)


# ---------------------------------------------------------------------------
# Validation and bond arithmetic
# ---------------------------------------------------------------------------

def validate_tower(tower: Tower) -> TowerCheck:
    """Indices increase, every bond is onto and 1-Lipschitz."""
    for i, (lo, hi) in enumerate(zip(tower.indices, tower.indices[1:])):
        if not lo < hi:
            return TowerCheck(False, (i, i + 1), 'indices')
    for i, bond in enumerate(tower.bonds):
        coarse, fine = tower.stages[i], tower.stages[i + 1]
        missing = np.setdiff1d(np.arange(coarse.n), bond)
        if missing.size:
            return TowerCheck(False, (i, i + 1), 'surjective', (int(missing[0]),))
        image = coarse.dist[np.ix_(bond, bond)]
        bad = np.argwhere(image > fine.dist + LIPSCHITZ_TOLERANCE)
        if bad.size:
            x, y = (int(v) for v in bad[0])
            return TowerCheck(False, (i, i + 1), 'lipschitz', (x, y))
    return TowerCheck(True)


def compose_bond(tower: Tower, r: int, t: int) -> np.ndarray:
    """psi_rt as an index array over stage t."""
    tower.check_stage(r)
    tower.check_stage(t)
    if r > t:
        raise ScaleOrderViolationError(f"bond from stage {t} to stage {r} needs r <= t")
    mapping = np.arange(tower.stages[t].n)
    for i in range(t - 1, r - 1, -1):
        mapping = tower.bonds[i][mapping]
    return mapping


def _fibers(mapping: np.ndarray, n: int) -> List[np.ndarray]:
    return [np.flatnonzero(mapping == y) for y in range(n)]


def preimage_diameter(tower: Tower, r: int, t: int) -> float:
    """Largest fiber diameter of psi_rt in the stage-t metric."""
    mapping = compose_bond(tower, r, t)
    dist = tower.stages[t].dist
    widest = 0.0
    for fiber in _fibers(mapping, tower.stages[r].n):
        if fiber.size > 1:
            widest = max(widest, float(dist[np.ix_(fiber, fiber)].max()))
    return widest


def _joint_diameters(tower: Tower, r: int, t: int) -> np.ndarray:
    """M[a, b] = diameter of the union of the fibers over a and b."""
    mapping = compose_bond(tower, r, t)
    n_r = tower.stages[r].n
    dist = tower.stages[t].dist
    cross = np.full((n_r, n_r), -np.inf)
    for a, fiber in enumerate(_fibers(mapping, n_r)):
        if not fiber.size:
            continue
        np.maximum.at(cross[a], mapping, dist[fiber].max(axis=0))
    own = np.diag(cross)
    return np.maximum(cross, np.maximum(own[:, None], own[None, :]))


# ---------------------------------------------------------------------------
# Thread points
# ---------------------------------------------------------------------------

def _min_preimages(bond: np.ndarray, n: int) -> np.ndarray:
    pre = np.full(n, -1, dtype=np.int64)
    for j in range(bond.size - 1, -1, -1):
        pre[bond[j]] = j
    return pre


def canonical_thread(tower: Tower, stage: int, point: int, depth: int) -> ThreadPoint:
    """Thread through `point`: bonds below, smallest-index preimages above."""
    tower.check_stage(stage)
    tower.check_stage(depth)
    tower.stages[stage].check_index(point)
    if depth < stage:
        raise InconsistentThreadError(f"depth {depth} is below stage {stage}")
    points = [0] * (depth + 1)
    points[stage] = point
    for i in range(stage - 1, -1, -1):
        points[i] = int(tower.bonds[i][points[i + 1]])
    for i in range(stage, depth):
        points[i + 1] = int(_min_preimages(tower.bonds[i], tower.stages[i].n)[points[i]])
    return ThreadPoint(tuple(points))


def thread_points(tower: Tower, depth: int) -> List[ThreadPoint]:
    """Every thread to `depth`; each is determined by its deepest point."""
    tower.check_stage(depth)
    return [canonical_thread(tower, depth, x, depth) for x in range(tower.stages[depth].n)]


def check_thread(tower: Tower, thread: ThreadPoint):
    if len(thread.points) > len(tower.stages):
        raise InconsistentThreadError(f"thread {thread.points} is deeper than the tower")
    for i, x in enumerate(thread.points):
        tower.stages[i].check_index(x)
    for i in range(len(thread.points) - 1):
        if tower.bonds[i][thread.points[i + 1]] != thread.points[i]:
            raise InconsistentThreadError(f"thread {thread.points} breaks at stage {i}")


# ---------------------------------------------------------------------------
# Entourages
# ---------------------------------------------------------------------------

def entourage_contains(tower: Tower, first: EntourageSpec, second: EntourageSpec) -> bool:
    """
    Whether E_first is contained in E_second on threads.

    Deeper stage and smaller scale is enough; otherwise every pair of
    threads through the deeper of the two stages is checked.
    """
    tower.check_stage(first.stage)
    tower.check_stage(second.stage)
    if first.stage >= second.stage and first.scale <= second.scale:
        return True
    deep = max(first.stage, second.stage)
    m1 = compose_bond(tower, first.stage, deep)
    m2 = compose_bond(tower, second.stage, deep)
    rel1 = tower.stages[first.stage].dist[np.ix_(m1, m1)] < first.scale
    rel2 = tower.stages[second.stage].dist[np.ix_(m2, m2)] < second.scale
    return not bool((rel1 & ~rel2).any())


# ---------------------------------------------------------------------------
# Refining maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RefiningResult:
    status: str
    r: int
    t: int
    eps: float
    delta: float
    kappa: float
    witnesses: Dict[Tuple[int, int], Chain] = field(default_factory=dict)
    counterexample: Optional[Tuple[int, int, int, int]] = None
    undecided: Tuple[Tuple[int, int, int, int], ...] = ()
    nonnull: int = 0
    pairs: int = 0

    def witness(self, x: int, y: int) -> Optional[Chain]:
        """Witness kappa-chain from x to y in stage t, reversing a stored one if needed."""
        if x == y:
            return Chain(self.kappa, (x,))
        if (x, y) in self.witnesses:
            return self.witnesses[(x, y)]
        if (y, x) in self.witnesses:
            alpha = self.witnesses[(y, x)]
            return alpha.with_points(alpha.points[::-1])
        return None


def _image_loop(mapping: np.ndarray, path: Sequence[int], a: int, eps: float) -> Chain:
    return Chain(eps, tuple(int(mapping[p]) for p in path) + (a,))


def _image_cycles(pres, mapping: np.ndarray, graph: nx.Graph, root: int) -> RelationLattice:
    vectors = [letters_vector(rel) for rel in pres.relators]
    comp = graph.subgraph(nx.node_connected_component(graph, root))
    for cycle in nx.cycle_basis(comp):
        walk = [int(mapping[p]) for p in list(cycle) + [cycle[0]]]
        vectors.append(letters_vector(pres.walk_letters(walk)))
    return RelationLattice(pres.ngens, vectors)


def _level_graphs(fine: FiniteMetricSpace, graph: nx.Graph, kappa: float):
    """
    The kappa-graph, then the fineness graph at each smaller distance level.

    Each level equals fineness_graph(fine, k) for every k in its range, so a
    search at a smaller kappa sees one of these graphs exactly.
    """
    yield graph
    levels = sorted((float(d) for d in fine.distinct_distances if 0 < d < kappa), reverse=True)
    for d in levels[1:]:
        yield fineness_graph(fine, float(np.nextafter(d, np.inf)))


def _candidate_paths(graph: nx.Graph, x: int, y: int, paths: int):
    """The shortest path as check_refining's first try finds it, then the `paths` shortest simple paths."""
    yield nx.shortest_path(graph, x, y, weight='weight')
    yield from islice(nx.shortest_simple_paths(graph, x, y, weight='weight'), paths)


def check_refining(tower: Tower, r: int, t: int, eps: float, delta: float, kappa: float,
                   budget: Optional[int] = None, paths: Optional[int] = None) -> RefiningResult:
    """
    Test whether psi_rt is (eps, delta)-refining at fineness kappa.

    For every delta-close pair (a, b) of stage r and every preimage pair
    (a', b') a kappa-path from a' to b' is wanted whose image, closed by the
    step b -> a, is eps-null in stage r.

    A pair is a certified counterexample when a' and b' are not kappa-connected
    or when the image of every kappa-path lies outside the relator lattice in
    H1 (the shortest path's class plus images of a kappa-cycle basis). Pairs
    that H1 cannot separate and no candidate path settles are Undecided.
    Candidates are the `paths` shortest simple paths of the kappa-graph and
    of each sparser fineness graph below it, so a pair settled at one kappa
    is settled again at every larger one.
    """
    if not r < t:
        raise ScaleOrderViolationError(f"need r < t, got {r}, {t}")
    if not 0 < kappa <= delta < eps:
        raise ScaleOrderViolationError(f"need 0 < kappa <= delta < eps, got {kappa}, {delta}, {eps}")
    paths = REFINING_PATH_BUDGET if paths is None else paths
    coarse, fine = tower.stages[r], tower.stages[t]
    mapping = compose_bond(tower, r, t)
    fibers = _fibers(mapping, coarse.n)
    graph = fineness_graph(fine, kappa)
    component = {v: k for k, comp in enumerate(nx.connected_components(graph)) for v in comp}
    lattices: Dict[Tuple[int, int], RelationLattice] = {}
    levels: List[nx.Graph] = []
    pending = _level_graphs(fine, graph, kappa)

    def level_graphs():
        yield from levels
        for level in pending:
            levels.append(level)
            yield level

    witnesses: Dict[Tuple[int, int], Chain] = {}
    undecided: List[Tuple[int, int, int, int]] = []
    nonnull = 0
    checked = 0

    def result(status, counterexample=None):
        logger.info("Refining %d<-%d at eps=%s delta=%s kappa=%s: %s after %d pairs",
                    r, t, eps, delta, kappa, status, checked)
        return RefiningResult(status, r, t, eps, delta, kappa, witnesses, counterexample,
                              tuple(undecided), nonnull, checked)

    for a, b in np.argwhere(np.triu(coarse.dist < delta)):
        a, b = int(a), int(b)
        for x in fibers[a]:
            for y in fibers[b]:
                x, y = int(x), int(y)
                if a == b and x >= y:
                    continue
                checked += 1
                quad = (a, b, x, y)
                if component[x] != component[y]:
                    return result(FALSE, quad)
                base = nx.shortest_path(graph, x, y, weight='weight')
                verdict = is_null(coarse, eps, _image_loop(mapping, base, a, eps), budget=budget)
                if verdict.is_null:
                    witnesses[(x, y)] = Chain(kappa, tuple(base))
                    continue
                nonnull += verdict.status == NONNULL

                pres = presentation(coarse, eps, a)
                offset = letters_vector(pres.walk_letters(_image_loop(mapping, base, a, eps).points))
                key = (a, component[x])
                if key not in lattices:
                    lattices[key] = _image_cycles(pres, mapping, graph, x)
                if not lattices[key].contains(offset):
                    return result(FALSE, quad)

                found = None
                tried = {tuple(base)}
                for level in level_graphs():
                    if found is not None or not nx.has_path(level, x, y):
                        break
                    for path in _candidate_paths(level, x, y, paths):
                        if tuple(path) in tried:
                            continue
                        tried.add(tuple(path))
                        if is_null(coarse, eps, _image_loop(mapping, path, a, eps), budget=budget).is_null:
                            found = Chain(kappa, tuple(path))
                            break
                if found is None:
                    undecided.append(quad)
                else:
                    witnesses[(x, y)] = found

    return result(UNDECIDED if undecided else TRUE)


@dataclass(frozen=True)
class GrefCertificate:
    status: str
    eps: float
    preimage_diameter: float
    delta: Optional[float] = None
    reason: Optional[str] = None
    kappa_floor: Optional[float] = None

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED

    def applies(self, delta: float, kappa: float) -> bool:
        """Whether the certificate settles check_refining at (delta, kappa) as true."""
        return self.certified and delta <= self.delta and self.kappa_floor < kappa <= delta


def gref_certificate(tower: Tower, r: int, t: int, eps: float) -> GrefCertificate:
    """
    Refining certificate for 1-Lipschitz bonds out of a geodesic stage.

    Needs preimage diameter below eps; delta is the largest scale under
    eps at which every delta-close pair has a joint preimage of diameter
    below eps. The certificate covers fineness kappa above kappa_floor,
    the fine stage's geodesic mesh: there the shortest kappa-path between
    two preimages is a geodesic and its image stays inside their joint
    preimage's diameter.
    """
    mapping = compose_bond(tower, r, t)
    coarse, fine = tower.stages[r], tower.stages[t]
    pd = preimage_diameter(tower, r, t)
    if not fine.geodesic_flag:
        return GrefCertificate(NOT_APPLICABLE, eps, pd, reason='geodesic')
    if (coarse.dist[np.ix_(mapping, mapping)] > fine.dist + LIPSCHITZ_TOLERANCE).any():
        return GrefCertificate(NOT_APPLICABLE, eps, pd, reason='lipschitz')
    if not pd < eps:
        return GrefCertificate(NOT_APPLICABLE, eps, pd, reason='preimage_diameter')

    joint = _joint_diameters(tower, r, t)
    bad = joint >= eps
    np.fill_diagonal(bad, False)
    found = float(min(eps, coarse.dist[bad].min())) if bad.any() else float(eps)
    if not found > 0:
        return GrefCertificate(NOT_APPLICABLE, eps, pd, reason='delta')
    return GrefCertificate(CERTIFIED, eps, pd, delta=found, kappa_floor=geodesic_mesh(fine))


# ---------------------------------------------------------------------------
# Scans
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScanCell:
    r: int
    t: int
    eps: float
    status: str
    method: str
    counterexample: Optional[Tuple[int, int, int, int]] = None


@dataclass(frozen=True)
class InvlimReport:
    """
    Refining pattern over consecutive stage pairs on a sampled scale grid.

    `summary` holds on the sampled grid only; the limit statement needs
    refining bonds at every scale.
    """
    kappa: Optional[float]
    cells: Tuple[ScanCell, ...]
    summary: Dict[float, str]

    def to_rows(self) -> List[List[str]]:
        rows = [['r', 't', 'eps', 'status', 'method']]
        for c in self.cells:
            rows.append([str(c.r), str(c.t), repr(c.eps), c.status, c.method])
        return rows


def invlim_scan(tower: Tower, eps_grid: Sequence[float], kappa: Optional[float] = None,
                budget: Optional[int] = None, runner: Optional[ScanRunner] = None) -> InvlimReport:
    """gref first, then a refining search at delta = eps/2, for each consecutive pair and scale."""
    runner = runner or ScanRunner()
    cells = [(i, float(eps)) for eps in eps_grid for i in range(tower.depth)]

    def evaluate(cell):
        i, eps = cell
        delta = eps / 2
        fine = delta if kappa is None else min(kappa, delta)
        if gref_certificate(tower, i, i + 1, eps).applies(delta, fine):
            return ScanCell(i, i + 1, eps, TRUE, 'gref')
        res = check_refining(tower, i, i + 1, eps, delta, fine, budget=budget)
        return ScanCell(i, i + 1, eps, res.status, 'search', res.counterexample)

    done = runner.map(evaluate, cells)
    summary: Dict[float, str] = {}
    for eps in eps_grid:
        statuses = [c.status for c in done if c.eps == float(eps)]
        if FALSE in statuses:
            summary[float(eps)] = FAILS
        elif all(s == TRUE for s in statuses):
            summary[float(eps)] = HOLDS
        else:
            summary[float(eps)] = UNDECIDED
    logger.info("Inverse-limit scan over %d cells: %s", len(done), summary)
    return InvlimReport(kappa, tuple(done), summary)


def extend_along_chain(tower: Tower, refining: RefiningResult, beta: Chain, start: int) -> Chain:
    """
    Kappa-chain in stage t over a delta-chain beta in stage r.

    Starts at `start` over beta's first point and concatenates one refining
    witness per step of beta, landing on the smallest preimage each time.
    """
    r, t = refining.r, refining.t
    if refining.status != TRUE:
        raise NotAHomotopyError(f"refining check is {refining.status}, witnesses are incomplete")
    mapping = compose_bond(tower, r, t)
    if beta.scale > refining.delta:
        raise ScaleOrderViolationError(f"beta at {beta.scale} is coarser than delta={refining.delta}")
    if mapping[start] != beta.start:
        raise InconsistentThreadError(f"point {start} does not lie over {beta.start}")
    pre = [int(np.flatnonzero(mapping == y)[0]) for y in range(tower.stages[r].n)]
    points = [start]
    for y in beta.points[1:]:
        target = pre[y]
        alpha = refining.witness(points[-1], target)
        if alpha is None:
            raise NotAHomotopyError(f"no witness from {points[-1]} to {target}")
        points.extend(alpha.points[1:])
    return Chain(refining.kappa, tuple(points))


# ---------------------------------------------------------------------------
# Lifting homotopies to threads
# ---------------------------------------------------------------------------

ThreadMove = Union[Insert, Remove]


@dataclass(frozen=True)
class ThreadHomotopy:
    """E_{r,eps}-homotopy among threads; Insert.point holds a ThreadPoint."""
    stage: int
    scale: float
    start: Tuple[ThreadPoint, ...]
    moves: Tuple[ThreadMove, ...]


def verify_thread_homotopy(tower: Tower, homotopy: ThreadHomotopy) -> HomotopyCheck:
    """Replay a thread homotopy, judging each move by stage-r distances."""
    r, eps = homotopy.stage, homotopy.scale
    space = tower.stages[r]
    current = list(homotopy.start)
    try:
        for th in current:
            check_thread(tower, th)
    except InconsistentThreadError:
        return HomotopyCheck(False, None, 'thread')
    projected = Chain(eps, tuple(th.at(r) for th in current))
    for k in range(len(current) - 1):
        if not space.dist[projected.points[k], projected.points[k + 1]] < eps:
            return HomotopyCheck(False, None, 'start')

    for step, move in enumerate(homotopy.moves):
        n = len(current)
        if isinstance(move, Insert):
            try:
                check_thread(tower, move.point)
            except InconsistentThreadError:
                return HomotopyCheck(False, step, 'thread')
            if move.pos in (0, n) and move.point != current[min(move.pos, n - 1)]:
                return HomotopyCheck(False, step, 'endpoint')
            image = Insert(move.pos, move.point.at(r))
        else:
            if move.pos == 0 and n > 1 and current[1] != current[0]:
                return HomotopyCheck(False, step, 'endpoint')
            if move.pos == n - 1 and n > 1 and current[-2] != current[-1]:
                return HomotopyCheck(False, step, 'endpoint')
            image = move
        try:
            projected = apply_move(space, projected, image)
        except IllegalMoveError as e:
            return HomotopyCheck(False, step, e.reason)
        if isinstance(move, Insert):
            current.insert(move.pos, move.point)
        else:
            del current[move.pos]
    return HomotopyCheck(True, final=projected)


def lift_homotopy_with_endpoints(tower: Tower, r: int, homotopy: Homotopy, depth: int,
                                 start_thread: ThreadPoint, end_thread: ThreadPoint) -> ThreadHomotopy:
    """
    Lift a stage-r homotopy to threads through `depth` with fixed endpoint threads.

    Interior points lift to canonical threads. Before a degenerate endpoint
    removal the neighbor of the endpoint is spliced: the endpoint thread is
    inserted next to it at stage-r distance zero and the old neighbor is
    removed, so the endpoint threads survive every move.

    Raises:
        NotAHomotopyError: the input does not verify in stage r
        InconsistentThreadError: endpoint threads do not lie over the
            homotopy's endpoints, or a loop collapses between distinct threads
    """
    space = tower.stages[r]
    if depth < r:
        raise InconsistentThreadError(f"depth {depth} is below stage {r}")
    check = verify_homotopy(space, homotopy)
    if not check.ok:
        raise NotAHomotopyError(f"homotopy fails at step {check.step}: {check.reason}")
    for th in (start_thread, end_thread):
        if len(th.points) != depth + 1:
            raise InconsistentThreadError(f"thread {th.points} does not reach depth {depth}")
        check_thread(tower, th)
    chain = homotopy.start
    if start_thread.at(r) != chain.start or end_thread.at(r) != chain.end:
        raise InconsistentThreadError("endpoint threads do not lie over the homotopy's endpoints")

    def lift(x: int) -> ThreadPoint:
        return canonical_thread(tower, r, x, depth)

    def collapse_guard(length: int):
        if length == 1 and start_thread != end_thread:
            raise InconsistentThreadError("a loop collapses between distinct endpoint threads")

    pts = chain.points
    collapse_guard(len(pts))
    if len(pts) == 1:
        current = [start_thread]
    else:
        current = [start_thread] + [lift(x) for x in pts[1:-1]] + [end_thread]
    start = tuple(current)
    moves: List[ThreadMove] = []

    def emit(move: ThreadMove):
        moves.append(move)
        if isinstance(move, Insert):
            current.insert(move.pos, move.point)
        else:
            del current[move.pos]

    for move, after in zip(homotopy.moves, homotopy_chains(space, homotopy)[1:]):
        n = len(current)
        if isinstance(move, Insert):
            if move.pos == 0:
                emit(Insert(0, current[0]))
            elif move.pos == n:
                emit(Insert(n, current[-1]))
            else:
                emit(Insert(move.pos, lift(move.point)))
            continue
        collapse_guard(len(after))
        if move.pos == 0 and n > 2 and current[1] != start_thread:
            emit(Insert(1, start_thread))
            emit(Remove(2))
        elif move.pos == n - 1 and n > 2 and current[-2] != end_thread:
            emit(Insert(n - 1, end_thread))
            emit(Remove(n - 2))
        emit(Remove(len(current) - 1 if move.pos == n - 1 else move.pos))

    logger.debug("Lifted %d moves to %d thread moves at depth %d", len(homotopy.moves), len(moves), depth)
    return ThreadHomotopy(r, homotopy.start.scale, start, tuple(moves))
