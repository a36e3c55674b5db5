"""Yates-style sweeps over the subset lattice.

Each kernel copies its input and performs one pass per site, in ground-space
order, so results are bit-identical between calls. Object arrays (e.g. of
``fractions.Fraction``) are supported and stay exact.
"""

import numpy as np


def _prepare(table):
    a = np.array(table, copy=True)
    if a.ndim != 1:
        raise ValueError("subset table must be one-dimensional")
    size = a.shape[0]
    if size == 0 or size & (size - 1):
        raise ValueError(f"table length {size} is not a power of two")
    return a, size.bit_length() - 1


def zeta(table):
    """Subset sums: ``out[g] = sum(table[e] for e subset of g)``."""
    a, n = _prepare(table)
    for i in range(n):
        v = a.reshape(-1, 2, 1 << i)
        v[:, 1, :] += v[:, 0, :]
    return a


def moebius(table):
    """Inverse of :func:`zeta`: ``out[e] = sum((-1)**|e - x| * table[x] for x subset of e)``."""
    a, n = _prepare(table)
    for i in range(n):
        v = a.reshape(-1, 2, 1 << i)
        v[:, 1, :] -= v[:, 0, :]
    return a


def superset_zeta(table):
    """Superset sums: ``out[e] = sum(table[g] for g superset of e)``."""
    a, n = _prepare(table)
    for i in range(n):
        v = a.reshape(-1, 2, 1 << i)
        v[:, 0, :] += v[:, 1, :]
    return a


def superset_moebius(table):
    """Inverse of :func:`superset_zeta`."""
    a, n = _prepare(table)
    for i in range(n):
        v = a.reshape(-1, 2, 1 << i)
        v[:, 0, :] -= v[:, 1, :]
    return a


def popcounts(n: int) -> np.ndarray:
    """Cardinality of every mask in ``range(2**n)``."""
    pc = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        v = pc.reshape(-1, 2, 1 << i)
        v[:, 1, :] += 1
    return pc
