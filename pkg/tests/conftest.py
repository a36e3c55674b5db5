import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import settings

from confcalc.ground import GroundSpace, mask_sites

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def subset_sum(table):
    """Direct O(4^n) zeta transform, independent of the kernels module."""
    size = len(table)
    out = [0] * size
    for g in range(size):
        for e in range(size):
            if e & ~g == 0:
                out[g] = out[g] + table[e]
    return out


def brute_star(g1, g2, pts):
    """Sum over point-to-part maps of g1(parts 1+2) * g2(parts 2+3)."""
    total = 0
    for assign in itertools.product(range(3), repeat=len(pts)):
        left = tuple(p for p, a in zip(pts, assign) if a in (0, 1))
        right = tuple(p for p, a in zip(pts, assign) if a in (1, 2))
        total = total + g1.value_at_points(left) * g2.value_at_points(right)
    return total


def all_multisets(n, max_size):
    for k in range(max_size + 1):
        yield from itertools.combinations_with_replacement(range(n), k)


def brute_correlation(probs, n):
    return [sum(probs[g] for g in range(1 << n) if g & e == e) for e in range(1 << n)]


def small_fraction(draw_int):
    return Fraction(draw_int(-5, 6), draw_int(1, 4))


def space(n):
    return GroundSpace.uniform(n)


def sites(mask):
    return list(mask_sites(mask))


def pytest_sessionstart(session):
    import time

    session.config._confcalc_start = time.perf_counter()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    import sys
    import time

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if not lines:
        return
    elapsed = time.perf_counter() - config._confcalc_start
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)
    verdict = "PASS" if elapsed < 300 else "FAIL"
    terminalreporter.write_line(f"[{verdict}] full suite runtime {elapsed:.1f} s (limit 300 s)")


def pytest_sessionfinish(session, exitstatus):
    import time

    start = getattr(session.config, "_confcalc_start", None)
    if start is not None and time.perf_counter() - start > 300 and exitstatus == 0:
        session.exitstatus = 1
