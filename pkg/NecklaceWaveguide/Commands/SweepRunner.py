"""
Ordered map over independent sweep items, serial or on a process pool.
Results always come back in input order so output files do not depend on --jobs.
"""

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List

from LoggingConfigurator import logger
from . import progress_closure


class SweepRunner:
    def __init__(self, jobs: int = 1, progress_every: int = 10):
        self.jobs = max(1, int(jobs))
        self.progress_every = progress_every

    def map(self, function: Callable, items: Iterable) -> List:
        items = list(items)
        callback = progress_closure(len(items), self.progress_every)

        if self.jobs == 1 or len(items) < 2:
            return self._collect(map(function, items), callback)

        logger.debug(f"Running {len(items)} items on {self.jobs} processes")
        chunk = max(1, len(items) // (4 * self.jobs))

        with ProcessPoolExecutor(max_workers=self.jobs) as executor:
            return self._collect(executor.map(function, items, chunksize=chunk), callback)

    @staticmethod
    def _collect(results: Iterable, callback: Callable[[int], None]) -> List:
        collected = []
        for result in results:
            collected.append(result)
            callback(len(collected))
        return collected

    def __call__(self, function: Callable, items: Iterable) -> List:
        return self.map(function, items)
