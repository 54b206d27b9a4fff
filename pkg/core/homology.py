"""
First homology of the Rips complex and the relator lattice behind the
NonNull certificates.

The relator lattice is reduced by sparse unit-pivot elimination first;
only what survives (usually a handful of rows) goes through a Smith
normal form over ZZ.
"""
from functools import lru_cache
from heapq import heappop, heappush
from math import gcd
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union
import logging

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form

from .metric_space import FiniteMetricSpace
from .rips import Presentation, presentation

logger = logging.getLogger(__name__)

SparseVector = Dict[int, int]


def _sparse(vector: Union[Mapping[int, int], Sequence[int]]) -> SparseVector:
    if isinstance(vector, Mapping):
        return {int(c): int(v) for c, v in vector.items() if v}
    return {c: int(v) for c, v in enumerate(vector) if v}


def letters_vector(letters: Iterable[int]) -> SparseVector:
    """Abelianization of a word as a sparse vector."""
    vec: SparseVector = {}
    for x in letters:
        c = abs(x) - 1
        vec[c] = vec.get(c, 0) + (1 if x > 0 else -1)
        if not vec[c]:
            del vec[c]
    return vec


def _canonical_factors(diagonal: List[int]) -> List[int]:
    """Turn any diagonal of a unimodular reduction into invariant factors."""
    d = sorted(abs(x) for x in diagonal if x)
    for i in range(len(d)):
        for j in range(i + 1, len(d)):
            g = gcd(d[i], d[j])
            d[i], d[j] = g, d[i] * d[j] // g
    return sorted(d)


def _factors(rows: List[SparseVector]) -> List[int]:
    """Nonzero invariant factors of the lattice spanned by rows."""
    rows = [r for r in rows if r]
    if not rows:
        return []
    cols = sorted({c for r in rows for c in r})
    where = {c: k for k, c in enumerate(cols)}
    m = Matrix.zeros(len(rows), len(cols))
    for i, r in enumerate(rows):
        for c, v in r.items():
            m[i, where[c]] = v
    snf = smith_normal_form(m, domain=ZZ)
    diagonal = [int(snf[k, k]) for k in range(min(snf.shape))]
    return _canonical_factors(diagonal)


class RelationLattice:
    """
    Integer lattice spanned by a set of vectors in Z^ngens.

    Supports rank, torsion of the quotient Z^ngens / L, and membership.
    """

    def __init__(self, ngens: int, vectors: Iterable[Union[Mapping[int, int], Sequence[int]]]):
        self.ngens = ngens
        rows: Dict[int, SparseVector] = {}
        by_col: Dict[int, set] = {}
        for vector in vectors:
            row = _sparse(vector)
            if not row:
                continue
            rid = len(rows)
            rows[rid] = row
            for c in row:
                by_col.setdefault(c, set()).add(rid)

        heap: List[Tuple[int, int]] = [(len(r), rid) for rid, r in rows.items()]
        heap.sort()
        self.pivots: List[Tuple[int, SparseVector]] = []

        while heap:
            length, rid = heappop(heap)
            row = rows.get(rid)
            if row is None or len(row) != length:
                continue
            unit = next((c for c, v in sorted(row.items()) if v in (1, -1)), None)
            if unit is None:
                continue
            sign = row[unit]
            del rows[rid]
            for c in row:
                by_col[c].discard(rid)
            for other in list(by_col.get(unit, ())):
                target = rows[other]
                factor = target[unit] * sign
                for c, v in row.items():
                    new = target.get(c, 0) - factor * v
                    if new:
                        if c not in target:
                            by_col.setdefault(c, set()).add(other)
                        target[c] = new
                    elif c in target:
                        del target[c]
                        by_col[c].discard(other)
                if target:
                    heappush(heap, (len(target), other))
                else:
                    del rows[other]
            self.pivots.append((unit, row))

        self.residual = [r for r in rows.values() if r]
        self.residual_factors = _factors(self.residual)
        self.rank = len(self.pivots) + len(self.residual_factors)
        self.torsion = [f for f in self.residual_factors if f > 1]
        logger.debug("Lattice over %d generators: %d unit pivots, %d residual rows, rank %d",
                     ngens, len(self.pivots), len(self.residual), self.rank)

    @property
    def betti(self) -> int:
        return self.ngens - self.rank

    def reduce(self, vector: Union[Mapping[int, int], Sequence[int]]) -> SparseVector:
        """Clear every pivot column of a vector; the result is congruent mod L."""
        v = _sparse(vector)
        for unit, row in self.pivots:
            coef = v.get(unit, 0)
            if not coef:
                continue
            factor = coef * row[unit]
            for c, x in row.items():
                new = v.get(c, 0) - factor * x
                if new:
                    v[c] = new
                else:
                    v.pop(c, None)
        return v

    def contains(self, vector: Union[Mapping[int, int], Sequence[int]]) -> bool:
        residual = self.reduce(vector)
        if not residual:
            return True
        if not self.residual:
            return False
        extended = _factors(self.residual + [residual])
        if len(extended) != len(self.residual_factors):
            return False
        prod_old = 1
        for f in self.residual_factors:
            prod_old *= f
        prod_new = 1
        for f in extended:
            prod_new *= f
        return prod_old == prod_new


@lru_cache(maxsize=512)
def relation_lattice(pres: Presentation) -> RelationLattice:
    return RelationLattice(pres.ngens, (letters_vector(r) for r in pres.relators))


def h1(space: FiniteMetricSpace, eps: float, basepoint: int = 0) -> Tuple[int, List[int]]:
    """
    First homology of the basepoint's component at scale eps.

    Returns:
        (betti_1, torsion) where torsion lists invariant factors > 1
    """
    lattice = relation_lattice(presentation(space, eps, basepoint))
    return lattice.betti, list(lattice.torsion)
