"""
Rips 2-complex at a scale and the spanning-tree presentation of its
edge-path group.

Generators are the non-tree edges (i, j), i < j, in lexicographic order.
A word is a tuple of nonzero ints: +k traverses generator k-1 from its
smaller to its larger endpoint, -k the other way. Tree edges and repeated
points contribute nothing.
"""
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple
import logging

import numpy as np

from .chains import Chain
from .errors import NotALoopError, ScaleMismatchError, WrongComponentError
from .metric_space import FiniteMetricSpace, adjacency

logger = logging.getLogger(__name__)

Letters = Tuple[int, ...]


def free_reduce(letters: Sequence[int]) -> Letters:
    out: List[int] = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        elif x:
            out.append(x)
    return tuple(out)


def invert(letters: Sequence[int]) -> Letters:
    return tuple(-x for x in reversed(letters))


@dataclass(frozen=True)
class Word:
    """Freely reduced word in the generators of a presentation."""
    letters: Letters = ()

    def __post_init__(self):
        object.__setattr__(self, 'letters', free_reduce(self.letters))

    def __mul__(self, other: 'Word') -> 'Word':
        return Word(self.letters + other.letters)

    def __len__(self):
        return len(self.letters)

    def inverse(self) -> 'Word':
        return Word(invert(self.letters))

    @property
    def is_identity(self) -> bool:
        return not self.letters

    def abelianize(self, ngens: int) -> np.ndarray:
        vec = np.zeros(ngens, dtype=np.int64)
        for x in self.letters:
            vec[abs(x) - 1] += 1 if x > 0 else -1
        return vec


@dataclass(frozen=True)
class RipsComplex2:
    scale: float
    n: int
    edges: Tuple[Tuple[int, int], ...]
    triangles: Tuple[Tuple[int, int, int], ...]


def _triangles(adj: np.ndarray, pairs: np.ndarray) -> List[Tuple[int, int, int]]:
    tris = []
    for i, j in pairs:
        common = np.flatnonzero(adj[i] & adj[j])
        for k in common[common > j]:
            tris.append((int(i), int(j), int(k)))
    return tris


def rips2(space: FiniteMetricSpace, eps: float) -> RipsComplex2:
    """Edges and triangles of the Rips complex, strict threshold."""
    adj = adjacency(space, eps)
    pairs = np.argwhere(np.triu(adj, k=1))
    tris = _triangles(adj, pairs)
    return RipsComplex2(
        scale=eps, n=space.n,
        edges=tuple((int(i), int(j)) for i, j in pairs),
        triangles=tuple(sorted(tris)),
    )


@dataclass(frozen=True, eq=False)
class Presentation:
    """
    Spanning-tree presentation of the edge-path group of the basepoint's
    component.

    `parent[v]` is the BFS tree parent (-1 at the root, -2 outside the
    component). `relators[k]` comes from `triangles[k]`.
    """
    scale: float
    basepoint: int
    component: Tuple[int, ...]
    parent: Tuple[int, ...]
    generators: Tuple[Tuple[int, int], ...]
    relators: Tuple[Letters, ...]
    triangles: Tuple[Tuple[int, int, int], ...]
    generator_of_edge: Dict[Tuple[int, int], int]
    dist: np.ndarray

    @property
    def ngens(self) -> int:
        return len(self.generators)

    def in_component(self, v: int) -> bool:
        return self.parent[v] != -2

    def letter(self, x: int, y: int) -> int:
        """Letter for the step x -> y; 0 for tree edges and repeated points."""
        if x == y or self.parent[x] == y or self.parent[y] == x:
            return 0
        key = (x, y) if x < y else (y, x)
        g = self.generator_of_edge[key]
        return g + 1 if x < y else -(g + 1)

    def tree_path(self, v: int) -> List[int]:
        """Tree path from the basepoint to v, both included."""
        path = [v]
        while self.parent[path[-1]] >= 0:
            path.append(self.parent[path[-1]])
        return path[::-1]

    def walk_letters(self, points: Sequence[int]) -> Letters:
        """Unreduced letters along a point sequence."""
        out = []
        for x, y in zip(points, points[1:]):
            if not self.dist[x, y] < self.scale:
                raise NotALoopError(f"step {x}->{y} is not an eps-step at {self.scale}")
            letter = self.letter(x, y)
            if letter:
                out.append(letter)
        return tuple(out)

    def generator_path(self, letter: int) -> List[int]:
        """Closed walk at the basepoint realizing one letter."""
        i, j = self.generators[abs(letter) - 1]
        if letter < 0:
            i, j = j, i
        return self.tree_path(i) + self.tree_path(j)[::-1]

    def word_walk(self, letters: Sequence[int]) -> List[int]:
        """Canonical closed walk at the basepoint spelling `letters`."""
        walk = [self.basepoint]
        for letter in letters:
            walk.extend(self.generator_path(letter)[1:])
        return walk


@lru_cache(maxsize=512)
def presentation(space: FiniteMetricSpace, eps: float, basepoint: int) -> Presentation:
    """
    Build the presentation at scale eps from a BFS tree rooted at basepoint.

    Neighbors are visited in ascending index order so generators, words and
    witnesses are reproducible.
    """
    space.check_index(basepoint)
    adj = adjacency(space, eps)
    n = space.n
    parent = [-2] * n
    parent[basepoint] = -1
    queue = deque([basepoint])
    while queue:
        v = queue.popleft()
        for w in np.flatnonzero(adj[v]):
            w = int(w)
            if parent[w] == -2:
                parent[w] = v
                queue.append(w)
    component = tuple(v for v in range(n) if parent[v] != -2)
    members = np.zeros(n, dtype=bool)
    members[list(component)] = True

    pairs = np.argwhere(np.triu(adj & members[:, None] & members[None, :], k=1))
    generators = []
    for i, j in pairs:
        i, j = int(i), int(j)
        if parent[i] != j and parent[j] != i:
            generators.append((i, j))
    generator_of_edge = {e: k for k, e in enumerate(generators)}

    pres = Presentation(
        scale=eps, basepoint=basepoint, component=component, parent=tuple(parent),
        generators=tuple(generators), relators=(), triangles=(),
        generator_of_edge=generator_of_edge, dist=space.dist,
    )
    triangles = tuple(_triangles(adj, pairs))
    relators = tuple(
        tuple(x for x in (pres.letter(i, j), pres.letter(j, k), pres.letter(k, i)) if x)
        for i, j, k in triangles
    )
    object.__setattr__(pres, 'triangles', triangles)
    object.__setattr__(pres, 'relators', relators)
    logger.debug("Presentation at %s from %d: %d points, %d generators, %d relators",
                 eps, basepoint, len(component), len(generators), len(relators))
    return pres


def chain_word(pres: Presentation, loop: Chain) -> Word:
    """Word of a loop at the presentation's basepoint, freely reduced."""
    if loop.scale != pres.scale:
        raise ScaleMismatchError(f"loop at {loop.scale}, presentation at {pres.scale}")
    if not loop.is_loop or loop.start != pres.basepoint:
        raise NotALoopError(f"chain {loop.points} is not a loop at {pres.basepoint}")
    for p in loop.points:
        if not 0 <= p < len(pres.parent) or not pres.in_component(p):
            raise WrongComponentError(f"point {p} is outside the basepoint's component")
    return Word(pres.walk_letters(loop.points))
