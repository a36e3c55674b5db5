"""Measures on finite configurations, process laws, and realizability.

Atoms of a measure on n-point configurations are attached to unordered
configurations. A product measure ``m^(x)n / n!`` on ordered n-tuples puts
``n!`` orderings on each unordered configuration, so the Lebesgue-Poisson atom
at ``{x1..xn}`` is simply ``prod z*m(xi)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .ground import (
    DENSE_LIMIT,
    Configuration,
    GroundSpace,
    compress_mask,
    expand_mask,
    mask_sites,
    masks_up_to,
    popcount,
)
from .star import DensePathError, OneParticleFunction, RankedFunction
from .transforms import k_transform

# Relative cut below which negative reconstructed mass is treated as float noise.
REALIZABILITY_TOL = 1e-9
NORMALIZATION_TOL = 1e-12
MAX_GRAM_BASIS = 4096


class NotAProcessLawError(ValueError):
    pass


class GramTooLargeError(ValueError):
    pass


class FiniteConfigMeasure:
    """A measure on finite simple configurations given by its atoms (mask -> weight)."""

    __slots__ = ("space", "weights", "max_rank")

    def __init__(self, space: GroundSpace, weights: Mapping[int, object], max_rank: int | None = None):
        self.space = space
        self.weights = {}
        for m, w in weights.items():
            if m & ~space.full_mask:
                raise ValueError(f"mask {m:#x} refers to sites outside the space")
            if w < 0:
                raise ValueError(f"measure atoms must be nonnegative, got {w} at {m:#x}")
            if w != 0:
                self.weights[m] = w
        top = max((popcount(m) for m in self.weights), default=0)
        if max_rank is None:
            max_rank = top
        elif top > max_rank:
            raise ValueError(f"atoms of rank {top} exceed max_rank {max_rank}")
        self.max_rank = max_rank

    @classmethod
    def from_dense(cls, space: GroundSpace, table) -> "FiniteConfigMeasure":
        table = np.asarray(table)
        if table.dtype == object:
            return cls(space, {m: v for m, v in enumerate(table.tolist()) if v != 0})
        table = np.real_if_close(table)
        idx = np.flatnonzero(table)
        return cls(space, dict(zip(idx.tolist(), table[idx].real.tolist())))

    def __call__(self, eta: Configuration | int):
        return self.weights.get(eta.mask if isinstance(eta, Configuration) else eta, 0)

    @property
    def is_exact(self) -> bool:
        return any(isinstance(v, Fraction) for v in self.weights.values())

    def to_dense(self, dtype=None) -> np.ndarray:
        if self.space.n > DENSE_LIMIT:
            raise DensePathError(f"{self.space.n} sites exceed the dense limit of {DENSE_LIMIT}")
        if dtype is None:
            dtype = object if self.is_exact else np.float64
        out = np.zeros(1 << self.space.n, dtype=dtype)
        for m, v in self.weights.items():
            out[m] = v
        return out

    def rank_masses(self, region: str | int | None = None) -> list:
        """``rho(Gamma_region^(n))`` for n = 0 .. max_rank."""
        reg = self.space.region_mask(region)
        out = [0] * (self.max_rank + 1)
        for m, v in self.weights.items():
            if m & ~reg == 0:
                out[popcount(m)] += v
        return out

    def items(self):
        return sorted(self.weights.items(), key=lambda kv: (popcount(kv[0]), kv[0]))

    def __repr__(self) -> str:
        return f"FiniteConfigMeasure(n_sites={self.space.n}, max_rank={self.max_rank}, atoms={len(self.weights)})"


@dataclass(frozen=True, eq=False)
class ProcessLaw:
    """A probability vector over all configurations of a finite ground space."""

    space: GroundSpace
    probs: np.ndarray
    tol: float = NORMALIZATION_TOL

    def __post_init__(self):
        p = np.asarray(self.probs)
        if p.dtype != object:
            p = np.asarray(p, dtype=np.float64)
        if p.shape != (1 << self.space.n,):
            raise NotAProcessLawError(f"law must have {1 << self.space.n} entries")
        total = p.sum()
        if abs(total - 1) > self.tol:
            raise NotAProcessLawError(f"probabilities sum to {float(total)!r}, not 1")
        if p.size and p.min() < -self.tol:
            raise NotAProcessLawError(f"negative probability {float(p.min())!r}")
        object.__setattr__(self, "probs", p)

    @classmethod
    def from_atoms(cls, space: GroundSpace, atoms: Mapping[int, object], **kw) -> "ProcessLaw":
        exact = any(isinstance(v, Fraction) for v in atoms.values())
        p = np.zeros(1 << space.n, dtype=object if exact else np.float64)
        for m, v in atoms.items():
            p[m] = v
        return cls(space, p, **kw)

    @classmethod
    def delta(cls, space: GroundSpace, gamma: Configuration | int) -> "ProcessLaw":
        m = gamma.mask if isinstance(gamma, Configuration) else gamma
        return cls.from_atoms(space, {m: 1.0})

    @classmethod
    def bernoulli(cls, space: GroundSpace, p) -> "ProcessLaw":
        """Independent site occupation with probability ``p`` (scalar or per site)."""
        ps = list(p) if isinstance(p, Sequence) or isinstance(p, np.ndarray) else [p] * space.n
        exact = any(isinstance(v, Fraction) for v in ps)
        t = np.zeros(1 << space.n, dtype=object if exact else np.float64)
        t[0] = 1
        for i, q in enumerate(ps):
            lo = 1 << i
            t[lo: 2 * lo] = t[:lo] * q
            t[:lo] = t[:lo] * (1 - q)
        return cls(space, t)

    def __call__(self, gamma: Configuration | int):
        return self.probs[gamma.mask if isinstance(gamma, Configuration) else gamma]

    def support(self) -> list[int]:
        return [m for m, v in enumerate(self.probs.tolist()) if v != 0]

    def total_variation(self, other: "ProcessLaw") -> float:
        return 0.5 * float(np.sum(np.abs((self.probs - other.probs).astype(np.float64))))


@dataclass
class Reconstruction:
    """Signed inclusion-exclusion table and realizability verdict for a region."""

    region: int
    space: GroundSpace
    table: np.ndarray
    realizable: bool
    law: ProcessLaw | None = None
    witness: Configuration | None = None
    min_entry: float = 0.0
    total: float = 1.0
    notes: list[str] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "REALIZABLE" if self.realizable else "NOT_REALIZABLE"


def lebesgue_poisson(space: GroundSpace, z=1.0, max_rank: int | None = None) -> FiniteConfigMeasure:
    """Atoms ``prod z*m(x)`` of the Lebesgue-Poisson measure with intensity ``z*m``."""
    if not z > 0:
        raise ValueError("intensity z must be positive")
    if max_rank is None:
        max_rank = space.n
    atoms = {}
    for m in masks_up_to(space.full_mask, max_rank):
        w = 1
        for i in mask_sites(m):
            w = w * (z * space.weights[i])
        atoms[m] = w
    return FiniteConfigMeasure(space, atoms, max_rank=max_rank)


def correlation_measure(mu: ProcessLaw) -> FiniteConfigMeasure:
    """``rho(eta) = mu(gamma contains eta)``, the superset sums of the law."""
    t = kernels.superset_zeta(mu.probs)
    if t.dtype != object:
        # laws may carry negatives down to -tol; their superset sums must not go below zero
        t = np.maximum(t, 0.0)
    return FiniteConfigMeasure(mu.space, _dense_items(t), max_rank=mu.space.n)


def _dense_items(table: np.ndarray) -> dict:
    if table.dtype == object:
        return {m: v for m, v in enumerate(table.tolist()) if v != 0}
    idx = np.flatnonzero(table)
    return dict(zip(idx.tolist(), table[idx].tolist()))


def reconstruct_process(rho: FiniteConfigMeasure, region: str | int | None = None,
                        tol: float = REALIZABILITY_TOL) -> Reconstruction:
    """Signed law on the configurations inside ``region`` by inclusion-exclusion.

    ``table[gamma] = sum over eta with gamma <= eta <= region of (-1)**|eta - gamma| rho(eta)``.
    The verdict is REALIZABLE when no entry is below ``-tol * max(table)`` and the
    total mass is 1 within ``tol``; then ``law`` is a :class:`ProcessLaw` on the
    restricted ground space. Exact (Fraction) input is judged with zero tolerance.
    """
    space = rho.space
    reg = space.region_mask(region)
    k = popcount(reg)
    if k > DENSE_LIMIT:
        raise DensePathError(f"region of {k} sites exceeds the dense limit of {DENSE_LIMIT}")
    sub = space if reg == space.full_mask else space.restrict(reg)
    exact = rho.is_exact
    t = np.zeros(1 << k, dtype=object if exact else np.float64)
    for m, w in rho.weights.items():
        if m & ~reg == 0:
            t[m if sub is space else compress_mask(m, reg)] = w
    if exact:
        table = kernels.superset_moebius(t)
    else:
        table = kernels.superset_moebius(t.astype(np.longdouble)).astype(np.float64)
    lo = int(np.argmin(table))
    min_entry = table[lo]
    top = max(table.max(), 0)
    total = table.sum()
    cut = 0 if exact else tol * top
    ok_sign = min_entry >= -cut
    ok_total = total == 1 if exact else abs(total - 1) <= tol
    rec = Reconstruction(reg, sub, table, bool(ok_sign and ok_total),
                         min_entry=float(min_entry), total=float(total))
    if not ok_sign:
        wit = lo if sub is space else expand_mask(lo, reg)
        rec.witness = Configuration(wit)
        rec.notes.append(f"negative mass {float(min_entry):.6g} at configuration {mask_sites(wit)}")
    if not ok_total:
        rec.notes.append(f"total mass {float(total):.17g} differs from 1")
    if rec.realizable:
        probs = table
        if not exact:
            probs = np.where(table < 0, 0.0, table)
        rec.law = ProcessLaw(sub, probs, tol=max(tol, NORMALIZATION_TOL))
    return rec


# conditions


def check_a1(rho: FiniteConfigMeasure, tol: float = NORMALIZATION_TOL) -> bool:
    return abs(rho(0) - 1) <= tol


def check_a2prime(rho: FiniteConfigMeasure, region: str | int | None = None) -> float:
    """Smallest C with ``rho(Gamma_region^(n)) <= C**n`` for every n >= 1."""
    masses = rho.rank_masses(region)
    return max((float(s) ** (1.0 / n) for n, s in enumerate(masses) if n >= 1 and s > 0), default=0.0)


def gram_matrix(rho: FiniteConfigMeasure, basis: Sequence[int]) -> np.ndarray:
    """``a_rho(b_i, conj b_j)`` for configuration indicators ``b``.

    On simple configurations the star product of two indicators is the
    indicator of their union, so the entry is ``rho(eta_i | eta_j)``.
    """
    if len(basis) > MAX_GRAM_BASIS:
        raise GramTooLargeError(f"basis of {len(basis)} exceeds {MAX_GRAM_BASIS} elements")
    b = np.asarray(basis, dtype=np.int64)
    union = b[:, None] | b[None, :]
    dense = rho.to_dense(np.float64) if rho.space.n <= 20 else None
    if dense is not None:
        return dense[union]
    return np.vectorize(lambda m: float(rho(int(m))))(union)


@dataclass
class A3Report:
    min_eigenvalue: float
    gram: np.ndarray
    basis: list[int]

    @property
    def ok(self) -> bool:
        return self.min_eigenvalue >= -REALIZABILITY_TOL * max(1.0, float(np.max(np.abs(self.gram))))


def check_a3(rho: FiniteConfigMeasure, basis_rank: int | None = None, region: str | int | None = None) -> A3Report:
    """Gram matrix of the star-form over configuration indicators up to ``basis_rank``."""
    if basis_rank is None:
        basis_rank = rho.space.n
    basis = masks_up_to(rho.space.region_mask(region), basis_rank)
    g = gram_matrix(rho, basis)
    ev = np.linalg.eigvalsh(g)
    return A3Report(float(ev[0]), g, basis)


def region_epsilon(rho: FiniteConfigMeasure, region: int) -> float:
    """Largest eps with ``rho(Gamma_region^(n)) <= (2+eps)**-n`` for all n >= 1 (may be <= 0)."""
    masses = rho.rank_masses(region)
    vals = [float(s) ** (-1.0 / n) - 2 for n, s in enumerate(masses) if n >= 1 and s > 0]
    return min(vals, default=math.inf)


@dataclass
class A4Report:
    ok: bool
    cover: list
    epsilon: float
    uncovered: list[int]


def check_a4(rho: FiniteConfigMeasure, region: str | int | None, candidates: Iterable[str | int] | None = None,
             epsilon: float = 1e-6) -> A4Report:
    """Greedy search for a cover of ``region`` by candidate subregions obeying the (2+eps) bound.

    Candidates default to the single sites of the region. Valid candidates are
    tried largest first (ties keep the given order); one is taken whenever it
    covers a still-uncovered site. ``epsilon`` in the report is the best
    constant achieved by the chosen cover.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    space = rho.space
    target = space.region_mask(region)
    if candidates is None:
        candidates = [1 << i for i in mask_sites(target)]
    resolved = [(c, space.region_mask(c)) for c in candidates]
    valid = [(c, m, region_epsilon(rho, m)) for c, m in resolved]
    valid = [v for v in valid if v[2] >= epsilon]
    valid.sort(key=lambda v: -popcount(v[1]))
    left = target
    cover = []
    best = math.inf
    for c, m, eps in valid:
        if left == 0:
            break
        if m & left:
            cover.append(c)
            best = min(best, eps)
            left &= ~m
    return A4Report(left == 0, cover, best if cover else 0.0, list(mask_sites(left)))


# integrals


def pairing_integral(g: RankedFunction, rho: FiniteConfigMeasure):
    """``sum over eta of G(eta) rho(eta)``; multiset entries carry no rho-mass."""
    total = 0
    for m in sorted(g.simple):
        w = rho.weights.get(m)
        if w:
            total = total + g.simple[m] * w
    return total


def expectation(f: np.ndarray, mu: ProcessLaw):
    """``sum over gamma of F(gamma) mu(gamma)``."""
    return np.sum(f * mu.probs)


def laplace_identity_check(phi: OneParticleFunction, mu: ProcessLaw, rho: FiniteConfigMeasure) -> float:
    """``|E_mu exp<phi, .> - sum_eta e(exp(phi) - 1, eta) rho(eta)|``."""
    from .transforms import exp_pairing, exp_vector

    lhs = complex(expectation(exp_pairing(phi).values, mu))
    shifted = phi.map(lambda v: cmath.exp(v) - 1)
    rhs = complex(pairing_integral(exp_vector(shifted), rho))
    return abs(lhs - rhs)


def duality_residual(g: RankedFunction, mu: ProcessLaw, rho: FiniteConfigMeasure | None = None) -> float:
    """``|int G d(rho) - int KG d(mu)|`` with rho defaulting to the correlation measure of mu."""
    if rho is None:
        rho = correlation_measure(mu)
    lhs = complex(pairing_integral(g, rho))
    rhs = complex(expectation(k_transform(g).values, mu))
    return abs(lhs - rhs)
