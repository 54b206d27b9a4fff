"""
Todd-Coxeter enumeration of the cosets of the trivial subgroup.

Cosets live in a union-find: `labels[c] <= c` points at the surviving
representative, and `neighbors[c][col]` holds the coset reached by the
letter in column `col` (SENTINEL when undefined). Letter +k uses column
2(k-1), letter -k column 2(k-1)+1.
"""
from collections import deque
from typing import Dict, List, Optional, Sequence
import logging

logger = logging.getLogger(__name__)

SENTINEL = -1


def column(letter: int) -> int:
    return 2 * (abs(letter) - 1) + (0 if letter > 0 else 1)


def inverse_column(col: int) -> int:
    return col ^ 1


class CosetTable:
    """
    Schreier graph of a finitely presented group acting on itself.

    After `build` the table is frozen: cosets are renumbered 0..N-1 in
    breadth-first order from the identity coset, and `table[c][col]` is
    the compressed neighbor or SENTINEL.
    """

    def __init__(self, ngens: int, relators: Sequence[Sequence[int]]):
        self.ngens = ngens
        self.ncols = 2 * ngens
        self.rels: List[List[int]] = [[column(x) for x in rel] for rel in relators if rel]
        for k in range(ngens):
            self.rels.append([2 * k, 2 * k + 1])
            self.rels.append([2 * k + 1, 2 * k])
        self.labels: List[int] = []
        self.neighbors: List[List[int]] = []
        self.start = self.add_vertex()
        self.closed = False
        self.table: List[List[int]] = []
        self.words: List[tuple] = []

    def get_label(self, c: int) -> int:
        labels = self.labels
        root = c
        while labels[root] != root:
            root = labels[root]
        while labels[c] != root:
            labels[c], c = root, labels[c]
        return root

    def add_vertex(self) -> int:
        c = len(self.labels)
        self.labels.append(c)
        self.neighbors.append([SENTINEL] * self.ncols)
        return c

    def unify(self, c1: int, c2: int):
        labels = self.labels
        neighbors = self.neighbors
        to_unify = [(c1, c2)]
        while to_unify:
            c1, c2 = to_unify.pop()
            c1 = self.get_label(c1)
            c2 = self.get_label(c2)
            if c1 == c2:
                continue
            c1, c2 = min(c1, c2), max(c1, c2)
            labels[c2] = c1
            for d in range(self.ncols):
                n1 = neighbors[c1][d]
                n2 = neighbors[c2][d]
                if n1 == SENTINEL:
                    neighbors[c1][d] = n2
                elif n2 != SENTINEL:
                    to_unify.append((n1, n2))

    def follow_step(self, c: int, col: int) -> int:
        c = self.get_label(c)
        ns = self.neighbors[c]
        if ns[col] == SENTINEL:
            d = self.add_vertex()
            ns[col] = d
            self.neighbors[d][inverse_column(col)] = c
        return self.get_label(ns[col])

    def follow_path(self, c: int, cols: Sequence[int]) -> int:
        c = self.get_label(c)
        for col in cols:
            c = self.follow_step(c, col)
        return c

    def build(self, budget: int) -> 'CosetTable':
        """
        HLT enumeration: scan every relator at every live coset, then
        define every missing column. Stops after `budget` defined cosets.
        """
        to_visit = 0
        while to_visit < len(self.labels):
            c = self.get_label(to_visit)
            if c == to_visit:
                for rel in self.rels:
                    self.unify(self.follow_path(c, rel), c)
                for col in range(self.ncols):
                    self.follow_step(c, col)
            to_visit += 1
            if len(self.labels) > budget:
                logger.warning("Coset enumeration stopped at %d defined cosets", len(self.labels))
                break
        else:
            self.closed = True
        self._freeze()
        logger.debug("Coset table: %d cosets, closed=%s", len(self.table), self.closed)
        return self

    def _freeze(self):
        start = self.get_label(self.start)
        order = {start: 0}
        words = [()]
        queue = deque([start])
        while queue:
            c = queue.popleft()
            for col in range(self.ncols):
                n = self.neighbors[c][col]
                if n == SENTINEL:
                    continue
                n = self.get_label(n)
                if n not in order:
                    order[n] = len(order)
                    letter = col // 2 + 1
                    words.append(words[order[c]] + ((letter if col % 2 == 0 else -letter),))
                    queue.append(n)
        table = [[SENTINEL] * self.ncols for _ in order]
        for c, idx in order.items():
            for col in range(self.ncols):
                n = self.neighbors[c][col]
                if n != SENTINEL:
                    table[idx][col] = order[self.get_label(n)]
        self.table = table
        self.words = words

    @property
    def order(self) -> Optional[int]:
        return len(self.table) if self.closed else None

    def act(self, coset: int, letters: Sequence[int]) -> Optional[int]:
        """Right action of a word; None when the table runs out."""
        for x in letters:
            coset = self.table[coset][column(x)]
            if coset == SENTINEL:
                return None
        return coset

    def distances(self) -> Dict[int, int]:
        """Word-length distance of every coset from the identity coset."""
        return {c: len(w) for c, w in enumerate(self.words)}


def enumerate_cosets(ngens: int, relators: Sequence[Sequence[int]], budget: int) -> CosetTable:
    return CosetTable(ngens, relators).build(budget)
