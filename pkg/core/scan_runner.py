"""
Runs independent scan cells, optionally across a thread pool.
"""
from concurrent.futures import Future, ThreadPoolExecutor
import logging
from typing import Callable, Iterable, List, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')


class ScanRunner:
    """
    Evaluates cells of a scan (spectrum scales, stage-pair/scale cells).

    Results always come back in submission order, so output does not
    depend on the number of jobs.
    """

    def __init__(self, jobs: int = 1):
        self.jobs = max(1, int(jobs))

    def map(self, fn: Callable[[T], R], cells: Iterable[T]) -> List[R]:
        cells = list(cells)
        if self.jobs == 1 or len(cells) < 2:
            return [fn(cell) for cell in cells]

        logger.debug("Scanning %d cells on %d threads", len(cells), self.jobs)
        with ThreadPoolExecutor(max_workers=self.jobs) as pool:
            futures: List[Future] = [pool.submit(fn, cell) for cell in cells]
            try:
                return [f.result() for f in futures]
            except Exception as e:
                logger.error("Scan cell failed: %s", e)
                for f in futures:
                    f.cancel()
                raise
