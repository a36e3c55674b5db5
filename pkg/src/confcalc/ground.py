"""Finite weighted ground spaces and their configurations.

A ground space stands in for the manifold X: a finite ordered list of sites,
each with a positive weight playing the role of the volume element m(x).
Simple configurations are site subsets stored as bitmasks; multiple
configurations are sorted tuples of site indices with repeats.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Mapping, Sequence

# Dense tables are indexed by a bitmask over sites.
DENSE_LIMIT = 32


class UnknownRegionError(KeyError):
    pass


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def mask_sites(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def sites_mask(sites: Iterable[int]) -> int:
    mask = 0
    for s in sites:
        mask |= 1 << s
    return mask


@dataclass(frozen=True, order=True)
class Configuration:
    """A simple finite configuration, i.e. a set of occupied sites."""

    mask: int

    def __post_init__(self):
        if self.mask < 0:
            raise ValueError("configuration mask must be nonnegative")

    @classmethod
    def of(cls, *sites: int) -> "Configuration":
        return cls(sites_mask(sites))

    @property
    def sites(self) -> tuple[int, ...]:
        return mask_sites(self.mask)

    @property
    def size(self) -> int:
        return popcount(self.mask)

    def __len__(self) -> int:
        return self.size

    def __contains__(self, site: int) -> bool:
        return bool(self.mask >> site & 1)

    def issubset(self, other: "Configuration") -> bool:
        return self.mask & ~other.mask == 0

    def as_multi(self) -> "MultiConfiguration":
        return MultiConfiguration(self.sites)


@dataclass(frozen=True, order=True)
class MultiConfiguration:
    """A finite multiset of sites, stored as a sorted tuple of site indices."""

    points: tuple[int, ...] = ()

    def __post_init__(self):
        pts = tuple(sorted(self.points))
        if any(p < 0 for p in pts):
            raise ValueError("site indices must be nonnegative")
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_multiplicities(cls, mult: Mapping[int, int]) -> "MultiConfiguration":
        pts = []
        for site, k in mult.items():
            if k < 1:
                raise ValueError(f"multiplicity of site {site} must be >= 1, got {k}")
            pts.extend([site] * k)
        return cls(tuple(pts))

    @property
    def multiplicities(self) -> dict[int, int]:
        return dict(Counter(self.points))

    @property
    def size(self) -> int:
        return len(self.points)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def is_simple(self) -> bool:
        return len(set(self.points)) == len(self.points)

    def as_simple(self) -> Configuration:
        if not self.is_simple:
            raise ValueError(f"{self.points} has repeated sites")
        return Configuration(sites_mask(self.points))


@dataclass(frozen=True)
class GroundSpace:
    """Finite weighted site set with named regions (the compacts Lambda).

    ``regions`` maps a name to a bitmask over sites.
    """

    labels: tuple[str, ...]
    weights: tuple[float, ...]
    coords: tuple[tuple[float, ...], ...] | None = None
    regions: tuple[tuple[str, int], ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if isinstance(self.regions, Mapping):
            object.__setattr__(self, "regions", tuple(self.regions.items()))
        n = len(self.labels)
        if len(self.weights) != n:
            raise ValueError("one weight per site required")
        if len(set(self.labels)) != n:
            raise ValueError("site labels must be unique")
        if any(not w > 0 for w in self.weights):
            raise ValueError("site weights must be strictly positive")
        if self.coords is not None and len(self.coords) != n:
            raise ValueError("one coordinate vector per site required")
        full = (1 << n) - 1
        for name, mask in self.regions:
            if mask & ~full:
                raise ValueError(f"region {name!r} refers to sites outside the space")

    @classmethod
    def uniform(cls, n: int, weight: float = 1.0, regions: Mapping[str, Sequence[int]] | None = None) -> "GroundSpace":
        labels = tuple(f"s{i}" for i in range(n))
        regs = {k: sites_mask(v) for k, v in (regions or {}).items()}
        return cls(labels, (weight,) * n, regions=tuple(regs.items()))

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown site {label!r}") from None

    def region_mask(self, region: str | int | Configuration | None) -> int:
        """Resolve a region given by name, mask or configuration; None means all sites."""
        if region is None:
            return self.full_mask
        if isinstance(region, Configuration):
            region = region.mask
        if isinstance(region, int):
            if region & ~self.full_mask:
                raise ValueError("region mask refers to sites outside the space")
            return region
        for name, mask in self.regions:
            if name == region:
                return mask
        raise UnknownRegionError(region)

    def weight_of(self, mask: int) -> float:
        return sum(self.weights[i] for i in mask_sites(mask))

    def config(self, labels: Iterable[str]) -> Configuration:
        return Configuration(sites_mask(self.index(s) for s in labels))

    def multi(self, labels: Iterable[str]) -> MultiConfiguration:
        return MultiConfiguration(tuple(self.index(s) for s in labels))

    def names(self, points: Iterable[int]) -> list[str]:
        return [self.labels[i] for i in points]

    def restrict(self, region: str | int | None) -> "GroundSpace":
        """Sub-space on the sites of ``region``, in ground order. Regions are dropped."""
        sites = mask_sites(self.region_mask(region))
        coords = None if self.coords is None else tuple(self.coords[i] for i in sites)
        return GroundSpace(
            tuple(self.labels[i] for i in sites),
            tuple(self.weights[i] for i in sites),
            coords,
        )


def compress_mask(mask: int, region: int) -> int:
    """Map a mask inside ``region`` to the bit layout of the restricted space."""
    out = 0
    j = 0
    for i in mask_sites(region):
        if mask >> i & 1:
            out |= 1 << j
        j += 1
    return out


def expand_mask(mask: int, region: int) -> int:
    """Inverse of :func:`compress_mask`."""
    out = 0
    for j, i in enumerate(mask_sites(region)):
        if mask >> j & 1:
            out |= 1 << i
    return out


def masks_up_to(region: int, max_points: int) -> list[int]:
    """Submasks of ``region`` with at most ``max_points`` bits, cardinality-major, mask-minor."""
    sites = mask_sites(region)
    out: list[int] = []
    for k in range(min(max_points, len(sites)) + 1):
        out.extend(sorted(sites_mask(c) for c in itertools.combinations(sites, k)))
    return out


def enumerate_configurations(space: GroundSpace, max_points: int, region: str | int | None = None) -> list[Configuration]:
    """All simple configurations with at most ``max_points`` points inside ``region``.

    Ordered by ascending cardinality, then ascending mask value.
    """
    if max_points < 0:
        raise ValueError("max_points must be >= 0")
    return [Configuration(m) for m in masks_up_to(space.region_mask(region), max_points)]


def partitions3(eta: MultiConfiguration | Configuration) -> list[tuple[MultiConfiguration, MultiConfiguration, MultiConfiguration]]:
    """Ordered 3-part partitions of the labeled points of ``eta``.

    Points sitting on the same site are numbered and treated as distinct, so
    there are always ``3**len(eta)`` entries and some coincide as multisets.
    """
    if isinstance(eta, Configuration):
        eta = eta.as_multi()
    pts = eta.points
    out = []
    for assign in itertools.product(range(3), repeat=len(pts)):
        parts: tuple[list[int], list[int], list[int]] = ([], [], [])
        for p, a in zip(pts, assign):
            parts[a].append(p)
        out.append(tuple(MultiConfiguration(tuple(q)) for q in parts))
    return out


def sub_configurations(eta: Configuration, k: int) -> list[Configuration]:
    """All ``k``-point subconfigurations of ``eta`` in mask order."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return [Configuration(sites_mask(c)) for c in itertools.combinations(eta.sites, k)]


def count_up_to(n: int, max_points: int) -> int:
    return sum(comb(n, k) for k in range(min(n, max_points) + 1))
