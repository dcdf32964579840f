"""Race several independent samplers and keep the first success.

Each worker runs its own sampler with a seed derived from the base seed and
its index.  The first worker to succeed claims the single result slot and
raises the shared cancel flag; the others notice it between attempts and
stop.  A worker that spends its whole budget just stops, leaving the rest
running.  The compiled kernels release the GIL while sampling, so threads
run truly in parallel.
"""
from __future__ import annotations

import os
import threading
import time
from dataclasses import dataclass, replace
from typing import Callable, Optional

from . import _backend
from ._rng import derive_seed
from .sampler import SampleResult, SamplerConfig, SamplerExhausted, sample

__all__ = ["ParallelConfig", "ParallelResult", "first_solution", "default_workers"]


def default_workers() -> int:
    return os.cpu_count() or 1


@dataclass(frozen=True)
class ParallelConfig:
    base: SamplerConfig
    workers: int = 0
    seed_derivation: Callable[[int, int], int] = derive_seed

    def resolved_workers(self) -> int:
        if self.workers < 0:
            raise ValueError("workers must be nonnegative (0 picks the CPU count)")
        return self.workers or default_workers()


@dataclass(frozen=True)
class ParallelResult:
    result: SampleResult
    winner: int
    elapsed: float
    attempts_total: int


class _Race:
    def __init__(self, workers: int):
        self.cancel = _backend.kernels().CancelToken()
        self.lock = threading.Lock()
        self.winner: Optional[int] = None
        self.result: Optional[SampleResult] = None
        self.error: Optional[BaseException] = None
        self.attempts = [0] * workers

    def claim(self, index: int, result: SampleResult) -> bool:
        with self.lock:
            if self.winner is not None:
                return False
            self.winner = index
            self.result = result
        self.cancel.set()
        return True

    def fail(self, exc: BaseException) -> None:
        with self.lock:
            if self.error is None:
                self.error = exc
        self.cancel.set()


def first_solution(config: ParallelConfig) -> ParallelResult:
    """Run the race; raise ``SamplerExhausted`` only if every worker runs dry."""
    n = config.resolved_workers()
    race = _Race(n)
    seeds = [config.seed_derivation(config.base.seed, i) for i in range(n)]

    def work(i: int) -> None:
        cfg = replace(config.base, seed=seeds[i])

        def progress(done, i=i):
            race.attempts[i] = done

        try:
            res = sample(cfg, cancel=race.cancel, progress=progress)
        except SamplerExhausted:
            return
        except BaseException as exc:  # surfaced in the caller
            race.fail(exc)
            return
        race.claim(i, res)

    start = time.perf_counter()
    threads = [threading.Thread(target=work, args=(i,), name=f"lambdagen-worker-{i}", daemon=True)
               for i in range(n)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    elapsed = time.perf_counter() - start

    if race.error is not None:
        raise race.error
    total = sum(race.attempts)
    if race.result is None:
        raise SamplerExhausted(total)
    # the reported seed is the winner's, so the result can be replayed with sample()
    return ParallelResult(race.result, race.winner, elapsed, total)
