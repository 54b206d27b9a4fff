"""
Homotopy critical spectrum.
"""
import math

import pytest

from core.fixtures import circle
from core.scan_runner import ScanRunner
from core.spectrum import CSV_HEADER, critical_spectrum, evaluation_scales


class TestEvaluationScales:

    def test_cells_cover_the_grid(self, square):
        cells = evaluation_scales(square)
        assert [round(c[0], 6) for c in cells] == [0.0, 1.0, 1.414214]
        assert cells[0][2] == 0.5
        assert cells[-1][1] == math.inf
        for lo, hi, eps in cells:
            assert lo < eps < hi


class TestCriticalSpectrum:
    """Scales where components, betti_1 or torsion change."""

    def test_hexagon(self, hexagon):
        spectrum = critical_spectrum(hexagon)
        assert [(r.components, r.betti1) for r in spectrum.rows] == [(6, 0), (1, 1), (1, 0), (1, 0)]
        assert spectrum.critical_values == [1.0, 2.0]
        assert spectrum.homotopy_critical_values == [1.0, 2.0]
        assert spectrum.row_at(1.5).betti1 == 1
        assert spectrum.row_at(2.0) is None

    def test_small_circle_dies_at_a_third(self, circle12):
        spectrum = critical_spectrum(circle12)
        assert spectrum.homotopy_critical_values[-1] == pytest.approx(1 / 3, abs=1e-9)
        assert spectrum.row_at(0.5 / 12).components == 12

    def test_csv(self, square):
        text = critical_spectrum(square).to_csv()
        lines = text.strip().split('\n')
        assert lines[0] == ','.join(CSV_HEADER)
        assert len(lines) == 4
        assert lines[2].endswith(',1,1,')

    def test_jobs_do_not_change_output(self, circle12):
        serial = critical_spectrum(circle12, runner=ScanRunner(1)).to_csv()
        threaded = critical_spectrum(circle12, runner=ScanRunner(4)).to_csv()
        assert serial == threaded

    @pytest.mark.slow
    def test_sixty_point_circle(self):
        """The only homotopy critical value of a circle of length 1 is 1/3."""
        spectrum = critical_spectrum(circle(60, 1.0))
        assert abs(spectrum.homotopy_critical_values[-1] - 1 / 3) <= 0.04
