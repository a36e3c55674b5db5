"""Small bundled processes and measures used by ``verify`` and the tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ground import GroundSpace, sites_mask
from .measures import FiniteConfigMeasure, ProcessLaw, correlation_measure
from .sampling import gibbs_law


@dataclass(frozen=True)
class Scenario:
    name: str
    law: ProcessLaw
    description: str


def random_law(n: int, seed: int, sparsity: float = 0.0) -> ProcessLaw:
    """Weights uniform in [0.2, 1]; each atom is dropped with probability ``sparsity`` (the empty one never)."""
    rng = np.random.default_rng(seed)
    p = rng.uniform(0.2, 1.0, 1 << n)
    if sparsity:
        keep = rng.random(1 << n) >= sparsity
        keep[0] = True
        p = p * keep
    return ProcessLaw(GroundSpace.uniform(n), p / p.sum())


def nearest_neighbour_potential(n: int, strength: float) -> np.ndarray:
    v = np.zeros((n, n))
    for i in range(n - 1):
        v[i, i + 1] = v[i + 1, i] = strength
    return v


def law_scenarios() -> list[Scenario]:
    chain = GroundSpace.uniform(6)
    return [
        Scenario("bernoulli-4", ProcessLaw.bernoulli(GroundSpace.uniform(4), 0.3),
                 "independent occupation p=0.3 on 4 sites"),
        Scenario("bernoulli-mixed-5", ProcessLaw.bernoulli(GroundSpace.uniform(5), [0.1, 0.25, 0.5, 0.75, 0.9]),
                 "independent occupation with site-dependent p"),
        Scenario("delta-3", ProcessLaw.delta(GroundSpace.uniform(3), 0b101),
                 "deterministic configuration {s0, s2}"),
        Scenario("gibbs-chain-6", gibbs_law(chain, 0.8, nearest_neighbour_potential(6, 1.5), 1.0),
                 "repulsive nearest-neighbour pair process, z=0.8, beta=1"),
        Scenario("random-full-5", random_law(5, seed=11), "random law with full support"),
        Scenario("random-sparse-6", random_law(6, seed=12, sparsity=0.5), "random law with gaps in its support"),
    ]


def non_realizable() -> FiniteConfigMeasure:
    """Correlation measure of Bernoulli(1/2) on two sites with the pair atom scaled by 10.

    Inclusion-exclusion gives mu(empty) = 1 - 1/2 - 1/2 + 5/2 and mu({a}) = 1/2 - 5/2 < 0.
    """
    space = GroundSpace.uniform(2)
    rho = correlation_measure(ProcessLaw.bernoulli(space, 0.5))
    w = dict(rho.weights)
    w[0b11] = w[0b11] * 10
    return FiniteConfigMeasure(space, w)


def gram_counterexample() -> FiniteConfigMeasure:
    """rho(a) = rho(b) = 0.9, rho(ab) = 0.2: the indicator Gram matrix is indefinite."""
    space = GroundSpace.uniform(2)
    return FiniteConfigMeasure(space, {0: 1.0, 0b01: 0.9, 0b10: 0.9, 0b11: 0.2})


DENSITY_P = 0.05


def density_bounded() -> tuple[FiniteConfigMeasure, list[str]]:
    """Low-density Bernoulli field on 6 sites with three two-site regions covering it.

    Each region carries mass ``2p`` at rank 1 and ``p**2`` at rank 2, well below
    ``(2+eps)**-n``.
    """
    regions = (("left", sites_mask([0, 1])), ("middle", sites_mask([2, 3])), ("right", sites_mask([4, 5])))
    space = GroundSpace(tuple(f"s{i}" for i in range(6)), (1.0,) * 6, None, regions)
    return correlation_measure(ProcessLaw.bernoulli(space, DENSITY_P)), ["left", "middle", "right"]


def bernoulli_a2prime(p, n: int) -> float:
    """Closed form of ``max_k (C(n,k) p**k)**(1/k)`` for a homogeneous Bernoulli field."""
    from math import comb

    return max((comb(n, k) * p ** k) ** (1.0 / k) for k in range(1, n + 1)) if p > 0 else 0.0
