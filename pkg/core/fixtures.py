"""
Deterministic generators for the spaces and towers used in experiments.

Every generator is a pure function of its parameters: the same
FixtureSpec always yields bit-identical distance matrices.
"""
from dataclasses import dataclass, field
from itertools import combinations, product
from math import ceil, cos, pi, sin
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union
import inspect
import json
import logging

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import minimum_spanning_tree
from scipy.spatial.distance import pdist, squareform

from .errors import SpecInvalidError
from .metric_space import FiniteMetricSpace, build_space, graph_metric_space
from .towers import Tower

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FixtureSpec:
    kind: str
    params: Dict[str, Any] = field(default_factory=dict)
    seed: int = 0


def _euclidean(points: np.ndarray, labels=None) -> FiniteMetricSpace:
    return build_space(np.round(squareform(pdist(points)), 12), labels=labels)


def _cycle_edges(n: int, weight: float, offset: int = 0) -> List[Tuple[int, int, float]]:
    return [(offset + k, offset + (k + 1) % n, weight) for k in range(n)]


def _require(ok: bool, message: str):
    if not ok:
        raise SpecInvalidError(message)


# ---------------------------------------------------------------------------
# Circles and polygons
# ---------------------------------------------------------------------------

def circle(n: int, circumference: float = 1.0, metric: str = 'arc',
           jitter: float = 0.0, seed: int = 0) -> FiniteMetricSpace:
    """
    n points around a circle; arc length or chord metric.

    With jitter > 0 each point leaves its equally spaced slot by up to
    jitter/2 of a slot, drawn from `seed`. The cyclic order is kept.
    """
    _require(n >= 3, f"a circle needs n >= 3, got {n}")
    _require(circumference > 0, "circumference must be positive")
    _require(0 <= jitter < 1, f"jitter must lie in [0, 1), got {jitter}")
    slots = np.arange(n, dtype=float)
    if jitter:
        slots = slots + jitter * (np.random.default_rng(seed).random(n) - 0.5)
    if metric == 'arc':
        if not jitter:
            return graph_metric_space(n, _cycle_edges(n, circumference / n))
        gaps = np.diff(np.append(slots, slots[0] + n)) * circumference / n
        return graph_metric_space(n, [(k, (k + 1) % n, float(g)) for k, g in enumerate(gaps)])
    if metric == 'chord':
        radius = circumference / (2 * pi)
        angles = 2 * pi * slots / n
        return _euclidean(radius * np.column_stack([np.cos(angles), np.sin(angles)]))
    raise SpecInvalidError(f"unknown circle metric {metric!r}")


def ngon(n: int, side: float = 1.0) -> FiniteMetricSpace:
    """Vertices of a regular n-gon with the given side, Euclidean metric."""
    _require(n >= 3, f"a polygon needs n >= 3, got {n}")
    _require(side > 0, "side must be positive")
    radius = side / (2 * sin(pi / n))
    angles = 2 * pi * np.arange(n) / n
    return _euclidean(radius * np.column_stack([np.cos(angles), np.sin(angles)]))


def cycle(n: int, weight: float = 1.0) -> FiniteMetricSpace:
    _require(n >= 3, f"a cycle needs n >= 3, got {n}")
    _require(weight > 0, "weight must be positive")
    return graph_metric_space(n, _cycle_edges(n, weight))


# ---------------------------------------------------------------------------
# Solenoid
# ---------------------------------------------------------------------------

def solenoid_tower(depth: int, m: int, length: float = 1.0) -> Tower:
    """
    Angle-doubling tower of circles.

    Stage i has m * 2**i points on a circle of circumference 2**i * length,
    so every stage has the same spacing and the bond j -> j mod (m * 2**i)
    is a local isometry.
    """
    _require(depth >= 1, f"depth must be at least 1, got {depth}")
    _require(m >= 4 and m % 2 == 0, f"m must be even and at least 4, got {m}")
    _require(length > 0, "length must be positive")
    step = length / m
    stages = []
    bonds = []
    for i in range(depth):
        n = m * 2 ** i
        stages.append(graph_metric_space(n, _cycle_edges(n, step)))
        if i:
            bonds.append(np.arange(n) % (n // 2))
    return Tower(tuple(float(i + 1) for i in range(depth)), tuple(stages), tuple(bonds))


# ---------------------------------------------------------------------------
# Tree times line
# ---------------------------------------------------------------------------

def _tree_distance(p: Tuple[int, ...], rho: float, q: Tuple[int, ...], sigma: float) -> float:
    common = 0
    for a, b in zip(p, q):
        if a != b:
            break
        common += 1
    if min(rho, sigma) <= common:
        return abs(rho - sigma)
    return rho + sigma - 2 * common


def _sphere_keys(ends: Sequence[Tuple[int, ...]], radius: float, angles: int):
    keys = set()
    for j in range(angles + 1):
        reach = ceil(radius * sin(j * pi / angles) - 1e-9)
        for end in ends:
            keys.add((j, end[:max(reach, 0)]))
    return sorted(keys)


def _sphere_ambient(keys, radius: float, angles: int) -> np.ndarray:
    """Product distances between sampled sphere points."""
    coords = [(radius * sin(j * pi / angles), radius * cos(j * pi / angles)) for j, _ in keys]
    n = len(keys)
    dist = np.zeros((n, n))
    for a in range(n):
        for b in range(a + 1, n):
            (rho, h), (sigma, g) = coords[a], coords[b]
            d_tree = _tree_distance(keys[a][1], rho, keys[b][1], sigma)
            dist[a, b] = dist[b, a] = np.hypot(d_tree, h - g)
    return np.round(dist, 12)


def _spanning_bound(dist: np.ndarray) -> float:
    """Longest edge of a minimum spanning tree; 0 for a single point."""
    tree = minimum_spanning_tree(csr_matrix(dist))
    return float(tree.data.max()) if tree.nnz else 0.0


def _sphere_space(keys, ambient: np.ndarray, mesh: float) -> FiniteMetricSpace:
    """Graph metric on pairs at most `mesh` apart, weighted by ambient distance."""
    edges = [(int(a), int(b), float(ambient[a, b]))
             for a, b in np.argwhere(np.triu(ambient <= mesh, k=1))]
    labels = [f"{j}:{''.join(map(str, p))}" for j, p in keys]
    return graph_metric_space(len(keys), edges, labels=labels)


def cat0_sphere_tower(radii: Sequence[float], branching: int = 2, angles: int = 8,
                      mesh: Optional[float] = None) -> Tower:
    """
    Metric spheres around a base point of (b-regular tree) x R, sampled.

    A point is an angle index j (polar angle j*pi/angles from the line
    direction) and the tree edge it sits on, named by the prefix of an end.
    Each stage is the path metric of its points joined when at most `mesh`
    apart in the ambient product metric. The default mesh is the smallest
    that keeps every stage connected and every fiber of a bond a clique:
    the largest connectivity threshold, or twice the largest radius gap.
    Bonds are radial projections, which keep j and truncate the prefix.
    """
    radii = [float(r) for r in radii]
    _require(len(radii) >= 1, "at least one radius is needed")
    _require(all(r > 0 for r in radii), "radii must be positive")
    _require(all(a < b for a, b in zip(radii, radii[1:])), "radii must increase")
    _require(branching >= 2, f"branching must be at least 2, got {branching}")
    _require(angles >= 2, f"angles must be at least 2, got {angles}")

    depth = ceil(max(radii))
    ends = list(product(range(branching), repeat=depth))
    stage_keys = [_sphere_keys(ends, r, angles) for r in radii]
    ambient = [_sphere_ambient(keys, r, angles) for keys, r in zip(stage_keys, radii)]
    needed = max(_spanning_bound(d) for d in ambient)
    if mesh is None:
        gap = max((b - a for a, b in zip(radii, radii[1:])), default=0.0)
        mesh = max(needed, 2 * gap) + 1e-6
    _require(mesh >= needed, f"mesh {mesh} leaves a stage disconnected; need at least {needed}")
    stages = [_sphere_space(keys, d, mesh) for keys, d in zip(stage_keys, ambient)]

    bonds = []
    for i in range(1, len(radii)):
        index = {key: k for k, key in enumerate(stage_keys[i - 1])}
        bond = []
        for j, prefix in stage_keys[i]:
            reach = max(ceil(radii[i - 1] * sin(j * pi / angles) - 1e-9), 0)
            bond.append(index[(j, prefix[:reach])])
        bonds.append(np.array(bond))
    logger.debug("Tree-product spheres: %s points", [s.n for s in stages])
    return Tower(tuple(radii), tuple(stages), tuple(bonds))


# ---------------------------------------------------------------------------
# Projective plane
# ---------------------------------------------------------------------------

# The six-vertex triangulation of the real projective plane.
RP2_TRIANGLES = (
    (0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 1),
    (1, 2, 4), (2, 3, 5), (3, 4, 1), (4, 5, 2), (5, 1, 3),
)


def projective_plane(edge: float = 1.0) -> FiniteMetricSpace:
    """
    Barycentric subdivision of the six-vertex projective plane as a graph.

    Points are the 31 simplices (vertices, then edges, then triangles);
    a face and a simplex containing it are joined with weight `edge`. For
    edge < eps <= 2 * edge the Rips complex is the subdivision itself, with
    edge-path group Z/2.
    """
    _require(edge > 0, "edge must be positive")
    faces = sorted({frozenset(s) for tri in RP2_TRIANGLES
                    for k in (1, 2, 3) for s in combinations(tri, k)},
                   key=lambda s: (len(s), sorted(s)))
    index = {s: k for k, s in enumerate(faces)}
    edges = [(index[s], index[t], edge) for s in faces for t in faces if s < t]
    labels = ['-'.join(map(str, sorted(s))) for s in faces]
    return graph_metric_space(len(faces), edges, labels=labels)


# ---------------------------------------------------------------------------
# Embedded surfaces and continua
# ---------------------------------------------------------------------------

def horn_points(rings: int, per_ring: int, x_min: float, x_max: float) -> np.ndarray:
    xs = np.linspace(x_min, x_max, rings)
    theta = 2 * pi * np.arange(per_ring) / per_ring
    return np.array([(x, np.exp(x) * cos(t), np.exp(x) * sin(t)) for x in xs for t in theta])


def horn_surface(rings: int = 7, per_ring: int = 8, x_min: float = -3.0,
                 x_max: float = 0.0) -> FiniteMetricSpace:
    """Grid on the surface of revolution of y = e^x, graph-geodesic metric."""
    _require(rings >= 2, "at least two rings are needed")
    _require(per_ring >= 3, "at least three points per ring are needed")
    _require(x_min < x_max, "x_min must be below x_max")
    pts = horn_points(rings, per_ring, x_min, x_max)
    edges = []
    for i in range(rings):
        for k in range(per_ring):
            v = i * per_ring + k
            for w in (i * per_ring + (k + 1) % per_ring, v + per_ring):
                if w < len(pts):
                    edges.append((v, w, float(np.linalg.norm(pts[v] - pts[w]))))
    return graph_metric_space(len(pts), edges)


def _polyline(vertices: Sequence[Tuple[float, float]], step: float) -> List[np.ndarray]:
    out = []
    for a, b in zip(vertices, vertices[1:]):
        a, b = np.asarray(a, float), np.asarray(b, float)
        pieces = max(1, ceil(np.linalg.norm(b - a) / step))
        out.extend(a + (b - a) * s for s in np.linspace(0, 1, pieces + 1))
    return out


def warsaw_points(oscillations: int, step: float) -> np.ndarray:
    """
    The closed topologist's sine curve plus a connecting arc.

    The graph of sin(1/x) on [1/(n pi), 1] is resampled at arc-length
    spacing `step`; the limit bar {0} x [-1, 1] and the arc
    (1, sin 1) -> (1, -2) -> (0, -2) -> (0, -1) are sampled at the same step.
    """
    lo = 1 / (oscillations * pi)
    xs = np.geomspace(lo, 1.0, 20000)
    ys = np.sin(1 / xs)
    arc = np.concatenate([[0.0], np.cumsum(np.hypot(np.diff(xs), np.diff(ys)))])
    marks = np.arange(0.0, arc[-1], step)
    curve = [np.array([np.interp(s, arc, xs), np.interp(s, arc, ys)]) for s in marks]
    curve.append(np.array([1.0, sin(1.0)]))
    bar = _polyline([(0.0, -1.0), (0.0, 1.0)], step)
    link = _polyline([(1.0, sin(1.0)), (1.0, -2.0), (0.0, -2.0), (0.0, -1.0)], step)
    pts = np.array(curve + bar + link)
    return np.unique(np.round(pts, 12), axis=0)


def warsaw_circle(oscillations: int = 3, step: float = 0.05) -> FiniteMetricSpace:
    _require(oscillations >= 1, "at least one oscillation is needed")
    _require(0 < step < 1 / (oscillations * pi), "step must be below the gap to the limit bar")
    return _euclidean(warsaw_points(oscillations, step))


def cantor_levels(depth: int) -> List[float]:
    """Left endpoints of the level-`depth` intervals of the middle-thirds Cantor set."""
    return sorted(sum(d * 3.0 ** -(k + 1) for k, d in enumerate(digits))
                  for digits in product((0, 2), repeat=depth))


def cantor_suspension_points(depth: int, step: float) -> np.ndarray:
    """
    Planar suspension: the meridian over c is t -> (0.5 + (1 - |t|)(c - 0.5), t),
    with both poles shared at t = +-1.
    """
    K = int(round(1 / step))
    ts = [k / K for k in range(-(K - 1), K)]
    pts = [(0.5 + (1 - abs(t)) * (c - 0.5), t) for c in cantor_levels(depth) for t in ts]
    pts += [(0.5, -1.0), (0.5, 1.0)]
    return np.array(pts)


def cantor_suspension(depth: int = 2, step: float = 0.05) -> FiniteMetricSpace:
    _require(depth >= 1, "depth must be at least 1")
    _require(0 < step <= 0.5, "step must lie in (0, 0.5]")
    return _euclidean(cantor_suspension_points(depth, step))


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------

GENERATORS: Dict[str, Callable[..., Union[FiniteMetricSpace, Tower]]] = {
    'circle': circle,
    'ngon': ngon,
    'cycle': cycle,
    'solenoid': solenoid_tower,
    'cat0': cat0_sphere_tower,
    'horn': horn_surface,
    'warsaw': warsaw_circle,
    'cantor': cantor_suspension,
    'rp2': projective_plane,
}


def generate(spec: FixtureSpec) -> Union[FiniteMetricSpace, Tower]:
    """
    Build the space or tower a spec names. Generators that sample take
    the FixtureSpec seed unless the parameters name one.

    Raises:
        SpecInvalidError: unknown kind, unknown parameter or a parameter
            out of range
    """
    gen = GENERATORS.get(spec.kind)
    if gen is None:
        raise SpecInvalidError(f"unknown fixture kind {spec.kind!r}; known: {sorted(GENERATORS)}")
    params = dict(spec.params)
    if 'seed' in inspect.signature(gen).parameters:
        params.setdefault('seed', spec.seed)
    try:
        out = gen(**params)
    except TypeError as e:
        raise SpecInvalidError(f"bad parameters for {spec.kind}: {e}")
    logger.info("Generated %s fixture with %s", spec.kind, spec.params)
    return out


def parse_params(items: Sequence[str]) -> Dict[str, Any]:
    """key=value pairs; values are JSON when they parse, comma lists become lists."""
    params: Dict[str, Any] = {}
    for item in items:
        key, sep, raw = item.partition('=')
        if not sep or not key:
            raise SpecInvalidError(f"expected key=value, got {item!r}")
        if ',' in raw:
            params[key] = [json.loads(v) for v in raw.split(',')]
            continue
        try:
            params[key] = json.loads(raw)
        except json.JSONDecodeError:
            params[key] = raw
    return params
