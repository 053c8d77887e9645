"""
Runner for simulation replicates in parallel.
"""
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, TypeVar

import numpy as np

from simulation.rng import substream
from utils.config import default_workers
from utils.errors import ConfigError

logger = logging.getLogger(__name__)

T = TypeVar("T")

ReplicateFn = Callable[[int, np.random.Generator], T]


class ReplicateRunner:
    """Runs replicates in chunks on a thread pool and returns results in replicate order."""

    def __init__(self, max_workers: Optional[int] = None, chunk_size: int = 250):
        if chunk_size < 1:
            raise ConfigError(f"chunk_size must be positive, got {chunk_size}")
        self.max_workers = max_workers or default_workers()
        self.chunk_size = chunk_size

    def _run_chunk(self, fn: ReplicateFn, seed: int, start: int, stop: int) -> List[T]:
        return [fn(index, substream(seed, index)) for index in range(start, stop)]

    def run(self, fn: ReplicateFn, replicates: int, seed: int, label: str = "simulation") -> List[T]:
        if replicates < 1:
            raise ConfigError(f"replicates must be positive, got {replicates}")

        starts = range(0, replicates, self.chunk_size)
        logger.info(f"Running {label}: {replicates} replicates in {len(starts)} chunks on {self.max_workers} workers")
        began = time.perf_counter()

        results: List[T] = []
        with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
            futures = [
                executor.submit(self._run_chunk, fn, seed, start, min(start + self.chunk_size, replicates))
                for start in starts
            ]
            # collected in submission order, which is replicate order
            for done, future in enumerate(futures, start=1):
                results.extend(future.result())
                logger.debug(f"{label}: chunk {done}/{len(futures)} done")

        logger.info(f"{label} complete in {time.perf_counter() - began:.1f}s")
        return results
