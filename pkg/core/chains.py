"""
eps-chains, the two basic moves, and homotopies stored as move lists.

A Remove at an interior position needs the bridged distance below the
scale. The only legal moves at an endpoint position are the degenerate ones
that add or drop a copy of the endpoint next to itself; they keep both
endpoints fixed and are what lets a loop {a, a} collapse to {a}.
"""
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple, Union
import logging

from .errors import (
    IllegalMoveError, JunctionMismatchError, NonpositiveScaleError,
    ScaleMismatchError, SchemaError,
)
from .metric_space import FiniteMetricSpace

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Chain:
    scale: float
    points: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, 'points', tuple(int(p) for p in self.points))
        if not self.points:
            raise SchemaError("a chain needs at least one point")
        if not self.scale > 0:
            raise NonpositiveScaleError(self.scale)

    @property
    def start(self) -> int:
        return self.points[0]

    @property
    def end(self) -> int:
        return self.points[-1]

    @property
    def is_loop(self) -> bool:
        return self.start == self.end

    def __len__(self):
        return len(self.points)

    def with_points(self, points: Sequence[int]) -> 'Chain':
        return Chain(self.scale, tuple(points))


@dataclass(frozen=True)
class Insert:
    pos: int
    point: int


@dataclass(frozen=True)
class Remove:
    pos: int


BasicMove = Union[Insert, Remove]


@dataclass(frozen=True)
class Homotopy:
    start: Chain
    moves: Tuple[BasicMove, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, 'moves', tuple(self.moves))


@dataclass(frozen=True)
class ChainCheck:
    ok: bool
    position: Optional[int] = None
    pair: Optional[Tuple[int, int]] = None


@dataclass(frozen=True)
class HomotopyCheck:
    ok: bool
    step: Optional[int] = None
    reason: Optional[str] = None
    final: Optional[Chain] = None


def validate_chain(space: FiniteMetricSpace, chain: Chain) -> ChainCheck:
    """Check consecutive distances; report the first failing pair."""
    for p in chain.points:
        space.check_index(p)
    pts = chain.points
    for k in range(len(pts) - 1):
        if not space.dist[pts[k], pts[k + 1]] < chain.scale:
            return ChainCheck(False, position=k, pair=(pts[k], pts[k + 1]))
    return ChainCheck(True)


def _close(space: FiniteMetricSpace, eps: float, a: int, b: int) -> bool:
    return bool(space.dist[a, b] < eps)


def apply_move(space: FiniteMetricSpace, chain: Chain, move: BasicMove) -> Chain:
    """
    Apply one basic move.

    Raises:
        IllegalMoveError: reason is 'position', 'endpoint' or 'distance'
    """
    pts = chain.points
    eps = chain.scale
    n = len(pts)

    if isinstance(move, Remove):
        p = move.pos
        if not 0 <= p < n or n == 1:
            raise IllegalMoveError('position', f"remove at {p} in chain of length {n}")
        if p == 0 or p == n - 1:
            neighbor = pts[1] if p == 0 else pts[n - 2]
            if neighbor != pts[p]:
                raise IllegalMoveError('endpoint', f"remove at {p}")
        elif not _close(space, eps, pts[p - 1], pts[p + 1]):
            raise IllegalMoveError('distance', f"d({pts[p - 1]},{pts[p + 1]}) >= {eps}")
        return chain.with_points(pts[:p] + pts[p + 1:])

    if isinstance(move, Insert):
        p, q = move.pos, move.point
        space.check_index(q)
        if not 0 <= p <= n:
            raise IllegalMoveError('position', f"insert at {p} in chain of length {n}")
        if p == 0 or p == n:
            if q != (pts[0] if p == 0 else pts[-1]):
                raise IllegalMoveError('endpoint', f"insert {q} at {p}")
        elif not (_close(space, eps, pts[p - 1], q) and _close(space, eps, q, pts[p])):
            raise IllegalMoveError('distance', f"insert {q} between {pts[p - 1]} and {pts[p]}")
        return chain.with_points(pts[:p] + (q,) + pts[p:])

    raise SchemaError(f"unknown move {move!r}")


def inverse_move(chain: Chain, move: BasicMove) -> BasicMove:
    """The move that undoes `move` applied to `chain`."""
    if isinstance(move, Remove):
        return Insert(move.pos, chain.points[move.pos])
    return Remove(move.pos)


def concatenate(alpha: Chain, beta: Chain) -> Chain:
    """alpha traversed first, then beta; the junction point appears once."""
    if alpha.scale != beta.scale:
        raise ScaleMismatchError(f"scales {alpha.scale} and {beta.scale} differ")
    if alpha.end != beta.start:
        raise JunctionMismatchError(f"{alpha.end} != {beta.start}")
    return alpha.with_points(alpha.points + beta.points[1:])


def reverse(alpha: Chain) -> Chain:
    return alpha.with_points(alpha.points[::-1])


def verify_homotopy(space: FiniteMetricSpace, homotopy: Homotopy) -> HomotopyCheck:
    """Replay the moves; report the first illegal step."""
    current = homotopy.start
    if not validate_chain(space, current).ok:
        return HomotopyCheck(False, step=None, reason='start')
    ends = (current.start, current.end)
    for k, move in enumerate(homotopy.moves):
        try:
            current = apply_move(space, current, move)
        except IllegalMoveError as e:
            logger.debug("Homotopy step %d illegal: %s", k, e)
            return HomotopyCheck(False, step=k, reason=e.reason)
        if (current.start, current.end) != ends:
            return HomotopyCheck(False, step=k, reason='endpoint')
    return HomotopyCheck(True, final=current)


def homotopy_chains(space: FiniteMetricSpace, homotopy: Homotopy) -> List[Chain]:
    """Every intermediate chain, start included."""
    chains = [homotopy.start]
    for move in homotopy.moves:
        chains.append(apply_move(space, chains[-1], move))
    return chains


def image_homotopy(target: FiniteMetricSpace, index_map: Callable[[int], int],
                   homotopy: Homotopy) -> Homotopy:
    """
    Push a homotopy forward along a 1-Lipschitz index map.

    Distances do not grow, so mapped moves stay legal; a move that still
    fails in the target is dropped and logged.
    """
    start = homotopy.start.with_points([index_map(p) for p in homotopy.start.points])
    current = start
    moves: List[BasicMove] = []
    for move in homotopy.moves:
        mapped = move if isinstance(move, Remove) else Insert(move.pos, index_map(move.point))
        try:
            current = apply_move(target, current, mapped)
        except IllegalMoveError as e:
            logger.warning("Dropping mapped move %r: %s", mapped, e)
            continue
        moves.append(mapped)
    return Homotopy(start, tuple(moves))
