"""
Deciding whether an eps-loop is eps-null, with replayable certificates.

The pipeline runs cheapest first:

1. the loop's point set has diameter < eps: remove interior points one by
   one, then the duplicate endpoint;
2. free reduction of the walk (backtracks and repeated points) reaches the
   single basepoint;
3. the abelianized word is outside the relator lattice: NonNull, with the
   H1 vector as certificate;
4. word rewriting by triangle moves. Letters that the triangles rewrite
   to nothing are erased first; the letters left are searched shortest
   word first, with relators inserted anywhere. Each rewrite is translated
   back into Insert/Remove moves on chains, so a Null verdict always
   carries a Homotopy that replays under verify_homotopy.
"""
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import count, permutations
from typing import Dict, List, Optional, Sequence, Tuple, Union
import heapq
import logging

import numpy as np

from config import ORACLE_MAX_STATES, WORD_LENGTH_CAP, WORD_SEARCH_BUDGET
from .chains import BasicMove, Chain, Homotopy, Insert, Remove, validate_chain
from .errors import NotALoopError, ScaleMismatchError, ScaleOrderViolationError
from .homology import letters_vector, relation_lattice
from .metric_space import FiniteMetricSpace
from .rips import Letters, Presentation, Word, free_reduce, presentation

logger = logging.getLogger(__name__)

NULL = 'null'
NONNULL = 'nonnull'
UNKNOWN = 'unknown'
EXHAUSTED = 'exhausted'


@dataclass(frozen=True)
class NullVerdict:
    status: str
    witness: Optional[Homotopy] = None
    certificate: Optional[Tuple[int, ...]] = None
    budget_spent: int = 0
    stage: str = ''

    @property
    def is_null(self) -> bool:
        return self.status == NULL


@dataclass(frozen=True)
class RewriteRule:
    """lhs -> rhs across triangle (p, q, r); `insert` says which way q goes."""
    lhs: Letters
    rhs: Letters
    p: int
    q: int
    r: int
    insert: bool


# ---------------------------------------------------------------------------
# Walk reduction
# ---------------------------------------------------------------------------

def reduce_walk(points: Sequence[int]) -> Tuple[List[BasicMove], List[int]]:
    """
    Freely reduce a walk by dropping repeated points and backtracks x, y, x.

    Returns the moves (all legal at any scale the walk is a chain at) and
    the reduced walk. Both endpoints are kept.
    """
    stack = [points[0]]
    moves: List[BasicMove] = []
    for p in points[1:]:
        if len(stack) >= 2 and stack[-2] == p:
            moves.append(Remove(len(stack) - 1))
            stack.pop()
        if stack[-1] == p:
            moves.append(Remove(len(stack)))
            continue
        stack.append(p)
    return moves, stack


def _replay(points: Sequence[int], moves: Sequence[BasicMove]) -> List[BasicMove]:
    """Inverse moves that rebuild `points` from the result of `moves`."""
    current = list(points)
    inverses: List[BasicMove] = []
    for move in moves:
        if isinstance(move, Remove):
            inverses.append(Insert(move.pos, current[move.pos]))
            del current[move.pos]
        else:
            inverses.append(Remove(move.pos))
            current.insert(move.pos, move.point)
    inverses.reverse()
    return inverses


def _join(*walks: Sequence[int]) -> List[int]:
    out = list(walks[0])
    for w in walks[1:]:
        out.extend(w[1:])
    return out


# ---------------------------------------------------------------------------
# Triangle rewriting
# ---------------------------------------------------------------------------

Step = Tuple[Letters, RewriteRule, int]


@lru_cache(maxsize=128)
def rewrite_rules(pres: Presentation) -> Tuple[RewriteRule, ...]:
    """Every triangle move as a word rewrite, relator insertions (empty lhs) included."""
    rules: List[RewriteRule] = []
    seen = set()
    for tri in pres.triangles:
        for p, q, r in permutations(tri):
            two = free_reduce((pres.letter(p, q), pres.letter(q, r)))
            one = free_reduce((pres.letter(p, r),))
            for lhs, rhs, insert in ((two, one, False), (one, two, True)):
                if lhs == rhs or (lhs, rhs) in seen:
                    continue
                seen.add((lhs, rhs))
                rules.append(RewriteRule(lhs, rhs, p, q, r, insert))
    return tuple(rules)


def _inverse(rule: RewriteRule) -> RewriteRule:
    return RewriteRule(rule.rhs, rule.lhs, rule.p, rule.q, rule.r, not rule.insert)


@dataclass(frozen=True, eq=False)
class Elimination:
    """
    Letters the triangles alone rewrite to the empty word.

    rules[x] rewrites the one-letter word (x,) into letters that were all
    eliminated before x, so erasing a letter always terminates. cost[x] is
    the number of rewrites one erasure takes.
    """
    rules: Dict[int, RewriteRule]
    cost: Dict[int, int]

    def __contains__(self, letter: int) -> bool:
        return letter in self.rules

    def strike(self, word: Sequence[int]) -> Letters:
        return tuple(x for x in word if x not in self.rules)


@lru_cache(maxsize=128)
def eliminations(pres: Presentation) -> Elimination:
    single = [rule for rule in rewrite_rules(pres) if len(rule.lhs) == 1]
    rules: Dict[int, RewriteRule] = {}
    cost: Dict[int, int] = {}
    changed = True
    while changed:
        changed = False
        for rule in single:
            x = rule.lhs[0]
            if x in rules or not all(y in rules for y in rule.rhs):
                continue
            rules[x] = rule
            cost[x] = 1 + sum(cost[y] for y in rule.rhs)
            changed = True
    logger.debug("%d of %d letters eliminated at scale %s",
                 len(rules), 2 * pres.ngens, pres.scale)
    return Elimination(rules, cost)


def _erase(word: Letters, pos: int, elim: Elimination, steps: List[Step]) -> Letters:
    """Rewrite word[pos] away, rightmost pending letter first; the rest of the word is untouched."""
    pending = [pos]
    while pending:
        at = pending.pop()
        rule = elim.rules[word[at]]
        steps.append((word, rule, at))
        word = word[:at] + rule.rhs + word[at + 1:]
        pending.extend(range(at, at + len(rule.rhs)))
    return word


def _unerase(word: Letters, pos: int, letter: int, elim: Elimination,
             steps: List[Step]) -> Letters:
    """Insert an eliminated letter at pos by running its erasure backwards."""
    grown = word[:pos] + (letter,) + word[pos:]
    forward: List[Step] = []
    _erase(grown, pos, elim, forward)
    for before, rule, at in reversed(forward):
        after = before[:at] + rule.rhs + before[at + len(rule.lhs):]
        steps.append((after, _inverse(rule), at))
    return grown


def _expand(word: Letters, rule: RewriteRule, pos: int, elim: Elimination,
            steps: List[Step]) -> Letters:
    """Full-alphabet steps for a rewrite found on the struck word."""
    for k, x in enumerate(rule.lhs):
        if x in elim:
            word = _unerase(word, pos + k, x, elim, steps)
    steps.append((word, rule, pos))
    word = word[:pos] + rule.rhs + word[pos + len(rule.lhs):]
    for k in range(len(rule.rhs) - 1, -1, -1):
        if rule.rhs[k] in elim:
            word = _erase(word, pos + k, elim, steps)
    return word


def _expansion_cost(rule: RewriteRule, elim: Elimination) -> int:
    return 1 + sum(elim.cost.get(x, 0) for x in rule.lhs + rule.rhs)


def _search_identity(word: Letters, rules: Sequence[RewriteRule], elim: Elimination,
                     budget: int, cap: int) -> Tuple[Optional[List[Step]], int]:
    """
    Shortest-word-first search from a struck word to the empty word.

    Rules act with the eliminated letters struck out of both sides; a rule
    whose struck lhs is empty inserts its rhs at any position. Returns the
    (word, rule, position) steps on struck words, or None, and the number
    of words visited.
    """
    struck: Dict[Tuple[Letters, Letters], RewriteRule] = {}
    for rule in rules:
        lhs, rhs = elim.strike(rule.lhs), elim.strike(rule.rhs)
        if lhs != rhs:
            struck.setdefault((lhs, rhs), rule)
    by_first: Dict[int, List[Tuple[Letters, Letters, RewriteRule]]] = {}
    inserts: List[Tuple[Letters, Letters, RewriteRule]] = []
    for (lhs, rhs), rule in struck.items():
        if lhs:
            by_first.setdefault(lhs[0], []).append((lhs, rhs, rule))
        else:
            inserts.append((lhs, rhs, rule))

    parent: Dict[Letters, Optional[Step]] = {word: None}
    order = count()
    heap = [(len(word), next(order), word)]
    while heap:
        _, _, w = heapq.heappop(heap)
        candidates = [(pos, move) for pos, x in enumerate(w) for move in by_first.get(x, ())]
        candidates.extend((pos, move) for pos in range(len(w) + 1) for move in inserts)
        for pos, (lhs, rhs, rule) in candidates:
            size = len(lhs)
            if w[pos:pos + size] != lhs:
                continue
            new = free_reduce(w[:pos] + rhs + w[pos + size:])
            if len(new) > cap or new in parent:
                continue
            parent[new] = (w, rule, pos)
            if not new:
                steps = []
                while parent[new] is not None:
                    steps.append(parent[new])
                    new = parent[new][0]
                return steps[::-1], len(parent)
            if len(parent) >= budget:
                return None, len(parent)
            heapq.heappush(heap, (len(new), next(order), new))
    return None, len(parent)


def _translate(pres: Presentation, loop: Chain,
               steps: List[Step]) -> List[BasicMove]:
    """
    Turn word rewrites into chain moves.

    For each step the current chain is reduced, the reduction of a chain X
    spelling the word with the triangle's corner spelled out is replayed
    backwards to reach X, and q is then removed from or inserted into X.
    """
    moves: List[BasicMove] = []
    current = list(loop.points)
    for word, rule, pos in steps:
        prefix = pres.word_walk(word[:pos])
        suffix = pres.word_walk(word[pos + len(rule.lhs):])
        head = pres.tree_path(rule.p)
        tail = pres.tree_path(rule.r)[::-1]
        middle = head + ([] if rule.insert else [rule.q]) + tail
        x_walk = _join(prefix, middle, suffix)

        down, reduced = reduce_walk(current)
        x_down, x_reduced = reduce_walk(x_walk)
        if reduced != x_reduced:
            raise AssertionError("rewrite step does not preserve the reduced walk")
        moves.extend(down)
        moves.extend(_replay(x_walk, x_down))

        at = len(prefix) - 1 + len(head)
        if rule.insert:
            moves.append(Insert(at, rule.q))
            x_walk.insert(at, rule.q)
        else:
            moves.append(Remove(at))
            del x_walk[at]
        current = x_walk
    down, reduced = reduce_walk(current)
    moves.extend(down)
    return moves


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def _check_loop(space: FiniteMetricSpace, eps: float, loop: Chain):
    if loop.scale != eps:
        raise ScaleMismatchError(f"loop at {loop.scale}, asked at {eps}")
    if not loop.is_loop:
        raise NotALoopError(f"chain {loop.points} is not closed")
    check = validate_chain(space, loop)
    if not check.ok:
        raise NotALoopError(f"not an eps-chain at position {check.position}")


def is_null(space: FiniteMetricSpace, eps: float, loop: Chain,
            budget: Optional[int] = None, length_cap: Optional[int] = None) -> NullVerdict:
    """
    Decide eps-nullity of a loop.

    Args:
        space: the metric space
        eps: scale; must equal loop.scale
        loop: a closed eps-chain
        budget: visited-word budget for the rewriting search
        length_cap: longest word kept by the search

    Returns:
        NullVerdict with a witness (null), an H1 certificate (nonnull) or
        the budget spent (unknown)
    """
    _check_loop(space, eps, loop)
    budget = WORD_SEARCH_BUDGET if budget is None else budget
    cap = WORD_LENGTH_CAP if length_cap is None else length_cap
    pts = loop.points

    if len(pts) == 1:
        return NullVerdict(NULL, witness=Homotopy(loop), stage='constant')

    support = sorted(set(pts))
    if space.dist[np.ix_(support, support)].max() < eps:
        moves = tuple(Remove(1) for _ in range(len(pts) - 1))
        return NullVerdict(NULL, witness=Homotopy(loop, moves), stage='diameter')

    moves, reduced = reduce_walk(pts)
    if len(reduced) == 1:
        return NullVerdict(NULL, witness=Homotopy(loop, tuple(moves)), stage='free')

    pres = presentation(space, eps, loop.start)
    letters = pres.walk_letters(pts)
    lattice = relation_lattice(pres)
    vector = letters_vector(letters)
    if not lattice.contains(vector):
        cert = tuple(vector.get(c, 0) for c in range(pres.ngens))
        return NullVerdict(NONNULL, certificate=cert, stage='h1')

    elim = eliminations(pres)
    word = free_reduce(letters)
    spent = sum(elim.cost.get(x, 0) for x in word)
    if spent >= budget:
        return _gave_up(spent, eps)
    steps: List[Step] = []
    for k in range(len(word) - 1, -1, -1):
        if word[k] in elim:
            word = _erase(word, k, elim, steps)
    word = free_reduce(word)
    if word:
        path, visited = _search_identity(word, rewrite_rules(pres), elim, budget - spent, cap)
        spent += visited
        if path is not None:
            spent += sum(_expansion_cost(rule, elim) for _, rule, _ in path)
        if path is None or spent > budget:
            return _gave_up(spent, eps)
        for w, rule, pos in path:
            _expand(w, rule, pos, elim, steps)
    witness = Homotopy(loop, tuple(_translate(pres, loop, steps)))
    return NullVerdict(NULL, witness=witness, budget_spent=spent, stage='search')


def _gave_up(spent: int, eps: float) -> NullVerdict:
    logger.warning("Rewriting search gave up after %d words at scale %s", spent, eps)
    return NullVerdict(UNKNOWN, budget_spent=spent, stage='search')


def word_loop(pres: Presentation, word: Union[Word, Sequence[int]]) -> Chain:
    """Canonical eps-loop at the basepoint spelling a word."""
    letters = word.letters if isinstance(word, Word) else tuple(word)
    return Chain(pres.scale, tuple(pres.word_walk(letters)))


def scale_map(space: FiniteMetricSpace, delta: float, eps: float,
              element: Union[Word, Chain], basepoint: int = 0) -> Word:
    """
    Image of a delta-class at scale eps, written in the eps-presentation.

    A Word is read in presentation(space, delta, basepoint); a Chain must
    be a delta-loop at basepoint.
    """
    if delta > eps:
        raise ScaleOrderViolationError(f"delta={delta} exceeds eps={eps}")
    if isinstance(element, Chain):
        if element.scale != delta:
            raise ScaleMismatchError(f"loop at {element.scale}, expected {delta}")
        if not element.is_loop or element.start != basepoint:
            raise NotALoopError(f"chain {element.points} is not a loop at {basepoint}")
        walk = element.points
    else:
        walk = presentation(space, delta, basepoint).word_walk(element.letters)
    return Word(presentation(space, eps, basepoint).walk_letters(walk))


# ---------------------------------------------------------------------------
# Brute-force oracle
# ---------------------------------------------------------------------------

@dataclass
class HomotopyOracle:
    """
    Breadth-first search over eps-chains of bounded length joined by basic
    moves. Remembers every fully explored class, so repeated queries on the
    same space and scale are cheap.
    """
    space: FiniteMetricSpace
    eps: float
    max_chain_len: int = 8
    max_states: int = ORACLE_MAX_STATES
    _known: Dict[Tuple[int, ...], str] = field(default_factory=dict)

    def __post_init__(self):
        self._close = self.space.dist < self.eps

    def _neighbors(self, c: Tuple[int, ...]):
        close = self._close
        n = len(c)
        if n > 1:
            if c[1] == c[0]:
                yield c[1:]
            if c[-2] == c[-1]:
                yield c[:-1]
            for pos in range(1, n - 1):
                if close[c[pos - 1], c[pos + 1]]:
                    yield c[:pos] + c[pos + 1:]
        if n < self.max_chain_len:
            yield (c[0],) + c
            yield c + (c[-1],)
            for pos in range(1, n):
                for q in np.flatnonzero(close[c[pos - 1]] & close[c[pos]]):
                    yield c[:pos] + (int(q),) + c[pos:]

    def query(self, loop: Chain) -> str:
        _check_loop(self.space, self.eps, loop)
        start = loop.points
        if start in self._known:
            return self._known[start]
        target = (loop.start,)
        seen = {start}
        queue = deque([start])
        found = start == target
        while queue and not found:
            c = queue.popleft()
            for nxt in self._neighbors(c):
                if nxt in seen:
                    continue
                if nxt == target:
                    found = True
                    break
                seen.add(nxt)
                if len(seen) >= self.max_states:
                    logger.warning("Oracle hit %d states", len(seen))
                    return EXHAUSTED
                queue.append(nxt)
        verdict = NULL if found else NONNULL
        for c in seen:
            self._known[c] = verdict
        return verdict


def bfs_homotopy_oracle(space: FiniteMetricSpace, eps: float, loop: Chain,
                        max_chain_len: int = 8,
                        max_states: int = ORACLE_MAX_STATES) -> str:
    """Exact nullity within the chain-length bound: null, nonnull or exhausted."""
    if len(loop) > max_chain_len:
        raise NotALoopError(f"loop longer than max_chain_len={max_chain_len}")
    return HomotopyOracle(space, eps, max_chain_len, max_states).query(loop)
