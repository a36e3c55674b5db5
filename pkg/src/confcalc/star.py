"""Ranked functions on finite configurations and the star-convolution.

A :class:`RankedFunction` is a sparse table over finite configurations with a
declared maximal rank. Simple configurations are keyed by bitmask; genuine
multisets (some site repeated) live in a separate table keyed by the sorted
tuple of points. Absent entries are zero.

Values may be Python complex/float numbers (float mode) or
``fractions.Fraction`` (exact mode); arithmetic never mixes the two unless the
caller does.
"""

from __future__ import annotations

import functools
import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from . import kernels
from .ground import (
    DENSE_LIMIT,
    Configuration,
    GroundSpace,
    MultiConfiguration,
    mask_sites,
    popcount,
    sites_mask,
)


class SpaceMismatchError(ValueError):
    pass


class DensePathError(ValueError):
    """The dense transform path cannot handle this input."""


def _is_exact(values: Iterable) -> bool:
    return any(isinstance(v, Fraction) for v in values)


def dense_dtype(values: Iterable):
    return object if _is_exact(values) else np.complex128


@dataclass(frozen=True)
class OneParticleFunction:
    """A function of one site, phi(x); sites not listed are zero."""

    space: GroundSpace
    values: tuple

    def __post_init__(self):
        vals = tuple(self.values)
        if len(vals) != self.space.n:
            raise ValueError(f"expected {self.space.n} site values, got {len(vals)}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_mapping(cls, space: GroundSpace, values: Mapping[str | int, complex]) -> "OneParticleFunction":
        vals = [0] * space.n
        for k, v in values.items():
            vals[k if isinstance(k, int) else space.index(k)] = v
        return cls(space, tuple(vals))

    @classmethod
    def indicator(cls, space: GroundSpace, site: int) -> "OneParticleFunction":
        return cls(space, tuple(1 if i == site else 0 for i in range(space.n)))

    def __call__(self, site: int):
        return self.values[site]

    def __add__(self, other: "OneParticleFunction") -> "OneParticleFunction":
        return OneParticleFunction(self.space, tuple(a + b for a, b in zip(self.values, other.values)))

    def __mul__(self, other):
        if isinstance(other, OneParticleFunction):
            return OneParticleFunction(self.space, tuple(a * b for a, b in zip(self.values, other.values)))
        return OneParticleFunction(self.space, tuple(other * a for a in self.values))

    __rmul__ = __mul__

    def map(self, fn) -> "OneParticleFunction":
        return OneParticleFunction(self.space, tuple(fn(v) for v in self.values))

    def array(self) -> np.ndarray:
        return np.array(self.values, dtype=dense_dtype(self.values))

    def pairing(self, config: Configuration | int):
        """<phi, gamma> = sum of phi over the sites of a configuration."""
        mask = config.mask if isinstance(config, Configuration) else config
        return sum((self.values[i] for i in mask_sites(mask)), 0)


class RankedFunction:
    """An element of F_fin: finitely many rank tables of configuration values."""

    __slots__ = ("space", "max_rank", "simple", "multi")

    def __init__(self, space: GroundSpace, simple: Mapping[int, object] | None = None,
                 multi: Mapping[tuple, object] | None = None, max_rank: int | None = None):
        self.space = space
        self.simple = dict(simple or {})
        self.multi = {}
        full = space.full_mask
        for mask in self.simple:
            if mask < 0 or mask & ~full:
                raise ValueError(f"mask {mask:#x} refers to sites outside the space")
        for pts, v in (multi or {}).items():
            key = tuple(sorted(pts))
            if any(p < 0 or p >= space.n for p in key):
                raise ValueError(f"multiset {key} refers to sites outside the space")
            if len(set(key)) == len(key):
                self.simple[sites_mask(key)] = self.simple.get(sites_mask(key), 0) + v
            else:
                self.multi[key] = v
        top = max([popcount(m) for m in self.simple] + [len(k) for k in self.multi] + [0])
        if max_rank is None:
            max_rank = top
        elif top > max_rank:
            raise ValueError(f"entries of rank {top} exceed max_rank {max_rank}")
        self.max_rank = max_rank

    # construction

    @classmethod
    def zero(cls, space: GroundSpace) -> "RankedFunction":
        return cls(space, {}, max_rank=0)

    @classmethod
    def vacuum(cls, space: GroundSpace, value=1) -> "RankedFunction":
        """Omega = (1, 0, 0, ...), the identity of the star-algebra."""
        return cls(space, {0: value}, max_rank=0)

    @classmethod
    def indicator(cls, space: GroundSpace, config: Configuration | MultiConfiguration, value=1) -> "RankedFunction":
        if isinstance(config, Configuration):
            return cls(space, {config.mask: value})
        return cls(space, multi={config.points: value})

    @classmethod
    def from_dense(cls, space: GroundSpace, table, max_rank: int | None = None) -> "RankedFunction":
        """Build from a length-2**n table over masks; ranks above ``max_rank`` are dropped."""
        table = np.asarray(table)
        if table.shape != (1 << space.n,):
            raise ValueError(f"dense table must have length {1 << space.n}")
        if max_rank is None:
            max_rank = space.n
        keep = kernels.popcounts(space.n) <= max_rank
        if table.dtype != object:
            keep &= table != 0
            idx = np.flatnonzero(keep)
            simple = dict(zip(idx.tolist(), table[idx].tolist()))
        else:
            simple = {m: v for m, v in enumerate(table.tolist()) if keep[m] and v != 0}
        return cls(space, simple, max_rank=max_rank)

    @classmethod
    def random(cls, space: GroundSpace, max_rank: int, rng: np.random.Generator, *,
               exact: bool = False, density: float = 1.0, multiset: bool = False,
               complex_values: bool = False) -> "RankedFunction":
        """Random table up to ``max_rank``; ``density`` is the chance each entry is nonzero.

        With ``multiset=True`` multisets of size <= max_rank are also populated.
        Exact values are small fractions, float values are uniform in [-1, 1].
        """

        def draw():
            if exact:
                return Fraction(int(rng.integers(-6, 7)), int(rng.integers(1, 5)))
            v = float(rng.uniform(-1, 1))
            if complex_values:
                return complex(v, float(rng.uniform(-1, 1)))
            return v

        simple = {}
        multi = {}
        for k in range(max_rank + 1):
            for pts in itertools.combinations_with_replacement(range(space.n), k):
                if not multiset and len(set(pts)) < k:
                    continue
                if rng.random() >= density:
                    continue
                if len(set(pts)) == k:
                    simple[sites_mask(pts)] = draw()
                else:
                    multi[pts] = draw()
        return cls(space, simple, multi, max_rank=max_rank)

    # access

    @property
    def has_multisets(self) -> bool:
        return bool(self.multi)

    @property
    def is_exact(self) -> bool:
        return _is_exact(self.simple.values()) or _is_exact(self.multi.values())

    def __call__(self, eta: Configuration | MultiConfiguration | int):
        if isinstance(eta, Configuration):
            return self.simple.get(eta.mask, 0)
        if isinstance(eta, int):
            return self.simple.get(eta, 0)
        pts = eta.points
        if eta.is_simple:
            return self.simple.get(sites_mask(pts), 0)
        return self.multi.get(pts, 0)

    def value_at_points(self, pts: tuple[int, ...]):
        if len(set(pts)) == len(pts):
            return self.simple.get(sites_mask(pts), 0)
        return self.multi.get(tuple(sorted(pts)), 0)

    def rank_table(self, n: int) -> dict:
        """Entries of rank ``n``, keyed by Configuration or MultiConfiguration."""
        out: dict = {Configuration(m): v for m, v in sorted(self.simple.items()) if popcount(m) == n}
        for pts, v in sorted(self.multi.items()):
            if len(pts) == n:
                out[MultiConfiguration(pts)] = v
        return out

    def items(self):
        """All entries as (points tuple, value), cardinality-major, deterministic."""
        rows = [(mask_sites(m), v) for m, v in self.simple.items()]
        rows += list(self.multi.items())
        rows.sort(key=lambda r: (len(r[0]), r[0]))
        return rows

    def to_dense(self, dtype=None) -> np.ndarray:
        if self.multi:
            raise DensePathError("dense tables hold simple configurations only")
        if self.space.n > DENSE_LIMIT:
            raise DensePathError(f"{self.space.n} sites exceed the dense limit of {DENSE_LIMIT}")
        if dtype is None:
            dtype = dense_dtype(self.simple.values())
        out = np.zeros(1 << self.space.n, dtype=dtype)
        for m, v in self.simple.items():
            out[m] = v
        return out

    # linear structure

    def _check(self, other: "RankedFunction"):
        if other.space is not self.space and other.space != self.space:
            raise SpaceMismatchError("functions live on different ground spaces")

    def __add__(self, other: "RankedFunction") -> "RankedFunction":
        return add(self, other)

    def __sub__(self, other: "RankedFunction") -> "RankedFunction":
        return add(self, scale(-1, other))

    def __neg__(self) -> "RankedFunction":
        return scale(-1, self)

    def __rmul__(self, c) -> "RankedFunction":
        return scale(c, self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RankedFunction):
            return NotImplemented
        if other.space != self.space:
            return False
        d = self - other
        return all(v == 0 for v in d.simple.values()) and all(v == 0 for v in d.multi.values())

    __hash__ = None

    def max_abs_diff(self, other: "RankedFunction") -> float:
        d = self - other
        vals = list(d.simple.values()) + list(d.multi.values())
        return max((abs(complex(v)) for v in vals), default=0.0)

    def __repr__(self) -> str:
        return (f"RankedFunction(n_sites={self.space.n}, max_rank={self.max_rank}, "
                f"entries={len(self.simple) + len(self.multi)})")


def add(g1: RankedFunction, g2: RankedFunction) -> RankedFunction:
    g1._check(g2)
    simple = dict(g1.simple)
    for m, v in g2.simple.items():
        simple[m] = simple.get(m, 0) + v
    multi = dict(g1.multi)
    for k, v in g2.multi.items():
        multi[k] = multi.get(k, 0) + v
    return RankedFunction(g1.space, simple, multi, max_rank=max(g1.max_rank, g2.max_rank))


def scale(c, g: RankedFunction) -> RankedFunction:
    return RankedFunction(g.space, {m: c * v for m, v in g.simple.items()},
                          {k: c * v for k, v in g.multi.items()}, max_rank=g.max_rank)


def conjugate(g: RankedFunction) -> RankedFunction:
    return RankedFunction(g.space, {m: v.conjugate() for m, v in g.simple.items()},
                          {k: v.conjugate() for k, v in g.multi.items()}, max_rank=g.max_rank)


def lift_one_particle(phi: OneParticleFunction) -> RankedFunction:
    """phi as a function of configurations: phi({x}) = phi(x), zero elsewhere."""
    return RankedFunction(phi.space, {1 << i: v for i, v in enumerate(phi.values) if v != 0}, max_rank=1)


def _merge(a: tuple, b: tuple) -> tuple:
    return tuple(sorted(a + b))


def _multiset_candidates(a: tuple, b: tuple) -> set[tuple]:
    """All multisets a + b - c with c a common sub-multiset of a and b."""
    ca, cb = Counter(a), Counter(b)
    common = ca & cb
    sites = sorted(common)
    out = set()
    for take in itertools.product(*(range(common[s] + 1) for s in sites)):
        c = Counter({s: k for s, k in zip(sites, take) if k})
        out.add(tuple(sorted((ca + cb - c).elements())))
    return out


def _eval_labeled(g1: RankedFunction, g2: RankedFunction, pts: tuple):
    total = 0
    for assign in itertools.product(range(3), repeat=len(pts)):
        left = tuple(p for p, a in zip(pts, assign) if a < 2)
        right = tuple(p for p, a in zip(pts, assign) if a > 0)
        x = g1.value_at_points(left)
        if x == 0:
            continue
        y = g2.value_at_points(right)
        if y == 0:
            continue
        total = total + x * y
    return total


@functools.lru_cache(maxsize=None)
def _local_pairs(k: int) -> tuple[tuple[int, int], ...]:
    """(xi1 + xi2, xi2 + xi3) as local submasks, for every assignment of k labeled points."""
    out = []
    for assign in itertools.product(range(3), repeat=k):
        left = right = 0
        for j, a in enumerate(assign):
            if a < 2:
                left |= 1 << j
            if a > 0:
                right |= 1 << j
        out.append((left, right))
    return tuple(out)


def _eval_simple(g1: RankedFunction, g2: RankedFunction, mask: int):
    bits = [1 << i for i in mask_sites(mask)]
    sub = [0]
    for b in bits:
        sub += [s | b for s in sub]
    s1, s2 = g1.simple, g2.simple
    total = 0
    for left, right in _local_pairs(len(bits)):
        x = s1.get(sub[left], 0)
        if x == 0:
            continue
        y = s2.get(sub[right], 0)
        if y == 0:
            continue
        total = total + x * y
    return total


def star_naive(g1: RankedFunction, g2: RankedFunction, domain: str | None = None) -> RankedFunction:
    """Star-convolution by direct enumeration of 3-part partitions.

    ``(g1 * g2)(eta) = sum over (xi1, xi2, xi3) of g1(xi1 + xi2) * g2(xi2 + xi3)``

    ``domain`` selects where the result is evaluated: ``"simple"`` (simple
    configurations only) or ``"multiset"`` (all multiple configurations). The
    default is ``"multiset"`` when either input carries multiset entries.
    Simple values of the result never depend on multiset values of the inputs.
    """
    g1._check(g2)
    if domain is None:
        domain = "multiset" if g1.multi or g2.multi else "simple"
    if domain not in ("simple", "multiset"):
        raise ValueError(f"unknown domain {domain!r}")
    out_rank = g1.max_rank + g2.max_rank
    simple: dict[int, object] = {}
    multi: dict[tuple, object] = {}
    if domain == "simple":
        cands = sorted({a | b for a in g1.simple for b in g2.simple}, key=lambda m: (popcount(m), m))
        for m in cands:
            v = _eval_simple(g1, g2, m)
            if v != 0:
                simple[m] = v
    else:
        keys1 = [mask_sites(m) for m in g1.simple] + list(g1.multi)
        keys2 = [mask_sites(m) for m in g2.simple] + list(g2.multi)
        cands: set[tuple] = set()
        for a in keys1:
            for b in keys2:
                cands |= _multiset_candidates(a, b)
        for pts in sorted(cands, key=lambda p: (len(p), p)):
            v = _eval_labeled(g1, g2, pts)
            if v == 0:
                continue
            if len(set(pts)) == len(pts):
                simple[sites_mask(pts)] = v
            else:
                multi[pts] = v
    return RankedFunction(g1.space, simple, multi, max_rank=out_rank)


def star_fast(g1: RankedFunction, g2: RankedFunction) -> RankedFunction:
    """Star-convolution on simple configurations through the subset lattice.

    Computes the Moebius transform of the pointwise product of the two zeta
    transforms; the result agrees with :func:`star_naive` on simple
    configurations.
    """
    g1._check(g2)
    if g1.multi or g2.multi:
        raise DensePathError("fast star-convolution is defined on simple configurations only")
    exact = g1.is_exact or g2.is_exact
    # Extended precision absorbs the cancellation in the alternating Moebius sums.
    dtype = object if exact else np.clongdouble
    t = kernels.moebius(kernels.zeta(g1.to_dense(dtype)) * kernels.zeta(g2.to_dense(dtype)))
    if not exact:
        t = t.astype(np.complex128)
    return RankedFunction.from_dense(g1.space, t, max_rank=min(g1.max_rank + g2.max_rank, g1.space.n))


def star(g1: RankedFunction, g2: RankedFunction) -> RankedFunction:
    """Fast path when possible, naive labeled-partition path otherwise."""
    if g1.multi or g2.multi or g1.space.n > DENSE_LIMIT:
        return star_naive(g1, g2)
    return star_fast(g1, g2)


def star_single(r: RankedFunction, f: OneParticleFunction, domain: str | None = None) -> RankedFunction:
    """``r * f`` for a one-particle ``f``, via the removal formula.

    On an (n+1)-point configuration this is ``sum_i f(x_i) r(eta - x_i)``; on an
    n-point configuration it is ``(sum_i f(x_i)) r(eta)``. Ranks mix linearly,
    so a general ``r`` is handled in one pass.
    """
    if f.space != r.space:
        raise SpaceMismatchError("functions live on different ground spaces")
    if domain is None:
        domain = "multiset" if r.multi else "simple"
    n = r.space.n
    fv = f.values
    cands: set[tuple] = set()
    for pts, _ in r.items():
        cands.add(pts)
        for x in range(n):
            if fv[x] == 0:
                continue
            if domain == "simple" and x in pts:
                continue
            cands.add(tuple(sorted(pts + (x,))))
    simple: dict[int, object] = {}
    multi: dict[tuple, object] = {}
    for pts in sorted(cands, key=lambda p: (len(p), p)):
        here = r.value_at_points(pts)
        total = 0
        for i, x in enumerate(pts):
            fx = fv[x]
            if fx == 0:
                continue
            total = total + fx * r.value_at_points(pts[:i] + pts[i + 1:])
            if here != 0:
                total = total + fx * here
        if total == 0:
            continue
        if len(set(pts)) == len(pts):
            simple[sites_mask(pts)] = total
        else:
            multi[pts] = total
    return RankedFunction(r.space, simple, multi, max_rank=r.max_rank + 1)
