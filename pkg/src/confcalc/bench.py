"""Wall-time comparison of the naive and fast star products."""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass

import numpy as np

from .ground import GroundSpace
from .star import RankedFunction, star_fast, star_naive

NAIVE_LIMIT = 14
FAST_LIMIT = 24


@dataclass
class BenchRow:
    sites: int
    path: str
    status: str
    seconds: float | None
    max_abs_diff: float | None = None

    def as_dict(self) -> dict:
        return {
            "sites": self.sites,
            "path": self.path,
            "status": self.status,
            "seconds": "" if self.seconds is None else f"{self.seconds:.6f}",
            "max_abs_diff": "" if self.max_abs_diff is None else f"{self.max_abs_diff:.3e}",
        }


@dataclass
class BenchReport:
    rows: list[BenchRow]

    def fast_wins(self, min_sites: int = NAIVE_LIMIT) -> bool:
        """True when the fast path is strictly faster wherever both ran at ``min_sites`` or more."""
        by = {(r.sites, r.path): r for r in self.rows}
        compared = False
        for (n, path), r in by.items():
            if path != "fast" or n < min_sites:
                continue
            naive = by.get((n, "naive"))
            if naive is None or naive.seconds is None or r.seconds is None:
                continue
            compared = True
            if not r.seconds < naive.seconds:
                return False
        return compared

    def to_csv(self, timings: bool = True) -> str:
        fields = ["sites", "path", "status", "seconds", "max_abs_diff"]
        if not timings:
            fields.remove("seconds")
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=fields, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for r in self.rows:
            w.writerow(r.as_dict())
        return buf.getvalue()


def _best_time(fn, repetitions: int):
    best = None
    out = None
    for _ in range(repetitions):
        t0 = time.perf_counter()
        out = fn()
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best, out


def benchmark_star(sizes, repetitions: int = 3, rank: int = 2, seed: int = 0,
                   naive_limit: int = NAIVE_LIMIT) -> BenchReport:
    """Time both star paths on random rank-``rank`` inputs; two rows per size.

    The naive path is skipped above ``naive_limit`` sites and the fast path
    above ``FAST_LIMIT``. Reported times are the best of ``repetitions``.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    rows = []
    for n, ss in zip(sizes, np.random.SeedSequence(seed).spawn(len(sizes))):
        rng = np.random.default_rng(ss)
        space = GroundSpace.uniform(n)
        g1 = RankedFunction.random(space, min(rank, n), rng)
        g2 = RankedFunction.random(space, min(rank, n), rng)
        naive = fast = None
        if n <= naive_limit:
            t, naive = _best_time(lambda: star_naive(g1, g2), repetitions)
            rows_naive = BenchRow(n, "naive", "ok", t)
        else:
            rows_naive = BenchRow(n, "naive", "skipped", None)
        if n <= FAST_LIMIT:
            t, fast = _best_time(lambda: star_fast(g1, g2), repetitions)
            rows_fast = BenchRow(n, "fast", "ok", t)
        else:
            rows_fast = BenchRow(n, "fast", "skipped", None)
        if naive is not None and fast is not None:
            rows_fast.max_abs_diff = naive.max_abs_diff(fast)
        rows += [rows_naive, rows_fast]
    return BenchReport(rows)
