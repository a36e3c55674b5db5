"""The K-transform, its Moebius inverse R, and exponential vectors.

On a finite ground space every configuration is finite, so K is the zeta
transform of the subset lattice and R is its Moebius inverse.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .ground import DENSE_LIMIT, Configuration, GroundSpace
from .kernels import moebius, superset_moebius, superset_zeta, zeta
from .star import DensePathError, OneParticleFunction, RankedFunction, dense_dtype

__all__ = [
    "ObservableFunction",
    "k_transform",
    "r_transform",
    "exp_vector",
    "exp_pairing",
    "pairing_observable",
    "zeta_kernel",
    "moebius_kernel",
    "superset_zeta",
    "superset_moebius",
]

zeta_kernel = zeta
moebius_kernel = moebius


@dataclass(frozen=True, eq=False)
class ObservableFunction:
    """A function on the full configuration lattice, as a length-2**n table over masks."""

    space: GroundSpace
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.shape != (1 << self.space.n,):
            raise ValueError(f"observable table must have length {1 << self.space.n}")
        object.__setattr__(self, "values", vals)

    def __call__(self, gamma: Configuration | int):
        return self.values[gamma.mask if isinstance(gamma, Configuration) else gamma]

    def __mul__(self, other: "ObservableFunction") -> "ObservableFunction":
        return ObservableFunction(self.space, self.values * other.values)

    def max_abs_diff(self, other: "ObservableFunction") -> float:
        d = self.values - other.values
        return float(np.max(np.abs(d.astype(np.complex128)))) if d.size else 0.0


def _check_dense(space: GroundSpace):
    if space.n > DENSE_LIMIT:
        raise DensePathError(f"{space.n} sites exceed the dense limit of {DENSE_LIMIT}")


def _sweep(kernel, table: np.ndarray) -> np.ndarray:
    # float sweeps run in extended precision and are rounded once at the end
    if table.dtype == object:
        return kernel(table)
    return kernel(table.astype(np.clongdouble)).astype(np.complex128)


def k_transform(g: RankedFunction) -> ObservableFunction:
    """``(KG)(gamma) = sum of G(eta) over finite eta contained in gamma``."""
    if g.multi:
        raise DensePathError("K-transform takes simple-configuration tables only")
    _check_dense(g.space)
    return ObservableFunction(g.space, _sweep(zeta, g.to_dense()))


def r_transform(f: ObservableFunction) -> RankedFunction:
    """``(RF)(eta) = sum over xi in eta of (-1)**|eta - xi| F(xi)``; inverts K exactly."""
    _check_dense(f.space)
    return RankedFunction.from_dense(f.space, _sweep(moebius, f.values), max_rank=f.space.n)


def exp_vector(phi: OneParticleFunction) -> RankedFunction:
    """``e(phi, eta)``: the product of phi over the points of eta; e(phi, empty) = 1."""
    n = phi.space.n
    _check_dense(phi.space)
    t = np.zeros(1 << n, dtype=dense_dtype(phi.values))
    t[0] = 1
    for i, v in enumerate(phi.values):
        lo = 1 << i
        t[lo: 2 * lo] = t[:lo] * v
    return RankedFunction.from_dense(phi.space, t, max_rank=n)


def _observable_product(phi: OneParticleFunction, site_factor) -> ObservableFunction:
    n = phi.space.n
    _check_dense(phi.space)
    factors = [site_factor(v) for v in phi.values]
    t = np.zeros(1 << n, dtype=dense_dtype(factors))
    t[0] = 1
    for i, v in enumerate(factors):
        lo = 1 << i
        t[lo: 2 * lo] = t[:lo] * v
    return ObservableFunction(phi.space, t)


def exp_pairing(phi: OneParticleFunction) -> ObservableFunction:
    """The observable gamma -> exp(<phi, gamma>), as a product of exp(phi(x))."""
    return _observable_product(phi, cmath.exp)


def pairing_observable(phi: OneParticleFunction) -> ObservableFunction:
    """The observable gamma -> <phi, gamma>."""
    n = phi.space.n
    _check_dense(phi.space)
    t = np.zeros(1 << n, dtype=dense_dtype(phi.values))
    for i, v in enumerate(phi.values):
        lo = 1 << i
        t[lo: 2 * lo] = t[:lo] + v
    return ObservableFunction(phi.space, t)


def naive_k(g: RankedFunction, gamma: int):
    """Direct subset sum for one configuration; used as a cross-check."""
    total = 0
    for m, v in g.simple.items():
        if m & ~gamma == 0:
            total = total + v
    return total


def shifted_exp(phi: OneParticleFunction) -> OneParticleFunction:
    """x -> exp(phi(x)) - 1."""
    return phi.map(lambda v: cmath.exp(v) - 1)
