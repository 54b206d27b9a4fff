"""
Homotopy critical spectrum: where the scale-dependent invariants change.
"""
from dataclasses import dataclass
from typing import List, Optional, Tuple
import csv
import io
import logging
import math

from .homology import h1
from .metric_space import FiniteMetricSpace, chain_components
from .scan_runner import ScanRunner

logger = logging.getLogger(__name__)

CSV_HEADER = ['interval_lo', 'interval_hi', 'components', 'betti1', 'torsion']


@dataclass(frozen=True)
class SpectrumRow:
    lo: float
    hi: float
    scale: float
    components: int
    betti1: int
    torsion: Tuple[int, ...]

    def invariants(self):
        return self.components, self.betti1, self.torsion


@dataclass(frozen=True)
class Spectrum:
    basepoint: int
    rows: Tuple[SpectrumRow, ...]

    @property
    def critical_values(self) -> List[float]:
        return [b.lo for a, b in zip(self.rows, self.rows[1:]) if a.invariants() != b.invariants()]

    @property
    def homotopy_critical_values(self) -> List[float]:
        """Candidates where betti_1 or torsion changes."""
        return [b.lo for a, b in zip(self.rows, self.rows[1:])
                if (a.betti1, a.torsion) != (b.betti1, b.torsion)]

    def row_at(self, eps: float) -> Optional[SpectrumRow]:
        for row in self.rows:
            if row.lo < eps < row.hi:
                return row
        return None

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator='\n')
        writer.writerow(CSV_HEADER)
        for row in self.rows:
            writer.writerow([repr(row.lo), repr(row.hi), row.components, row.betti1,
                             ';'.join(str(t) for t in row.torsion)])
        return buf.getvalue()


def evaluation_scales(space: FiniteMetricSpace) -> List[Tuple[float, float, float]]:
    """(lo, hi, scale) per interval between consecutive candidate scales."""
    cands = [float(c) for c in space.distinct_distances]
    if not cands:
        return [(0.0, math.inf, 1.0)]
    cells = [(0.0, cands[0], cands[0] / 2)]
    for lo, hi in zip(cands, cands[1:]):
        cells.append((lo, hi, (lo + hi) / 2))
    top = cands[-1]
    cells.append((top, math.inf, top * 1.5))
    return cells


def critical_spectrum(space: FiniteMetricSpace, basepoint: int = 0,
                      runner: Optional[ScanRunner] = None) -> Spectrum:
    """Components, betti_1 and torsion per interval of the distance grid."""
    space.check_index(basepoint)
    runner = runner or ScanRunner()

    def evaluate(cell):
        lo, hi, eps = cell
        betti, torsion = h1(space, eps, basepoint)
        count = chain_components(space, eps).count
        logger.debug("Scale %.6g: %d components, betti_1=%d", eps, count, betti)
        return SpectrumRow(lo, hi, eps, count, betti, tuple(torsion))

    rows = tuple(runner.map(evaluate, evaluation_scales(space)))
    spectrum = Spectrum(basepoint, rows)
    logger.info("Spectrum over %d intervals, critical values %s",
                len(rows), spectrum.critical_values)
    return spectrum
