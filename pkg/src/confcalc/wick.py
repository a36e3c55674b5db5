"""Wick powers of a field vector, paired against products of one-particle functions.

A field vector omega assigns a (complex) weight to every site; configurations
are the 0/1 case. The pairing of ``f1 (x) ... (x) fn`` (symmetrized) with the
n-th Wick power is computed from the recurrence obtained by peeling one factor
``f`` off the product::

    (n+1) W(f, f1..fn) = <f, omega> W(f1..fn) - sum_i W(f*fi, f1..^fi..fn)

which for ``f = f1 = ... = phi`` is the familiar pure-power recurrence. For a
configuration gamma the pure-power pairing is the elementary symmetric
polynomial of phi over gamma.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Sequence

from .ground import Configuration, GroundSpace, mask_sites
from .star import OneParticleFunction


class WickSingularityError(ValueError):
    """log(1 + phi) is undefined at a site carrying field weight."""


@dataclass(frozen=True)
class FieldVector:
    space: GroundSpace
    weights: tuple

    def __post_init__(self):
        w = tuple(self.weights)
        if len(w) != self.space.n:
            raise ValueError(f"expected {self.space.n} site weights, got {len(w)}")
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_configuration(cls, space: GroundSpace, gamma: Configuration | int) -> "FieldVector":
        mask = gamma.mask if isinstance(gamma, Configuration) else gamma
        return cls(space, tuple(1 if mask >> i & 1 else 0 for i in range(space.n)))

    @property
    def is_configuration(self) -> bool:
        return all(w == 0 or w == 1 for w in self.weights)

    def as_configuration(self) -> Configuration:
        if not self.is_configuration:
            raise ValueError("field vector has weights outside {0, 1}")
        return Configuration(sum(1 << i for i, w in enumerate(self.weights) if w == 1))

    def pair(self, values: Sequence) -> complex:
        return sum((v * w for v, w in zip(values, self.weights) if w != 0), 0)


class _WickPairer:
    """Memoized evaluation of W over multisets of factors.

    A factor is a sorted tuple of base-function indices standing for their
    pointwise product; a state is a sorted tuple of factors.
    """

    def __init__(self, bases: Sequence[OneParticleFunction], omega: FieldVector):
        self.bases = [b.values for b in bases]
        self.omega = omega
        self._pair: dict[tuple, object] = {}
        self._memo: dict[tuple, object] = {(): 1}

    def pairing(self, factor: tuple):
        v = self._pair.get(factor)
        if v is None:
            vals = []
            for x in range(self.omega.space.n):
                p = 1
                for b in factor:
                    p = p * self.bases[b][x]
                vals.append(p)
            v = self._pair[factor] = self.omega.pair(vals)
        return v

    def __call__(self, state: tuple):
        v = self._memo.get(state)
        if v is not None:
            return v
        f, rest = state[0], state[1:]
        total = self.pairing(f) * self(rest)
        for i, g in enumerate(rest):
            merged = tuple(sorted(f + g))
            total = total - self(tuple(sorted(rest[:i] + rest[i + 1:] + (merged,))))
        v = self._memo[state] = total / len(state)
        return v


def wick_product_pairing(factors: Sequence[OneParticleFunction], omega: FieldVector):
    """Pairing of the symmetrized product of ``factors`` with the Wick power of ``omega``."""
    pairer = _WickPairer(factors, omega)
    return pairer(tuple(sorted((i,) for i in range(len(factors)))))


def wick_series(phi: OneParticleFunction, omega: FieldVector, n_max: int) -> list:
    """``[<phi^n, :omega^n:> for n in 0..n_max]`` sharing one memo table."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    pairer = _WickPairer([phi], omega)
    return [pairer(((0,),) * n) for n in range(n_max + 1)]


def wick_pairing(phi: OneParticleFunction, omega: FieldVector, n: int):
    """``<phi^(x)n, :omega^(x)n:>`` by the recurrence; 1 for n = 0 and <phi, omega> for n = 1."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return _WickPairer([phi], omega)(((0,),) * n)


def elementary_symmetric(values: Sequence, n_max: int | None = None) -> list:
    """Coefficients of prod(1 + t*v) in t, i.e. e_0 .. e_len(values)."""
    e = [1] + [0] * len(values)
    for k, v in enumerate(values, start=1):
        for j in range(k, 0, -1):
            e[j] = e[j] + v * e[j - 1]
    return e if n_max is None else e[: n_max + 1]


def wick_config(phi: OneParticleFunction, gamma: Configuration | int, n: int):
    """Elementary symmetric polynomial e_n of phi over the points of gamma."""
    if n < 0:
        raise ValueError("n must be >= 0")
    mask = gamma.mask if isinstance(gamma, Configuration) else gamma
    vals = [phi.values[i] for i in mask_sites(mask)]
    if n > len(vals):
        return 0
    return elementary_symmetric(vals)[n]


def generating_functional(phi: OneParticleFunction, omega: FieldVector):
    """``exp(<log(1 + phi), omega>)``; a plain product over gamma when omega is a configuration."""
    for v, w in zip(phi.values, omega.weights):
        if w != 0 and 1 + v == 0:
            raise WickSingularityError("phi(x) = -1 on the support of omega")
    if omega.is_configuration:
        out = 1
        for v, w in zip(phi.values, omega.weights):
            if w == 1:
                out = out * (1 + v)
        return out
    return cmath.exp(sum(w * cmath.log(1 + v) for v, w in zip(phi.values, omega.weights) if w != 0))
