"""Seeded samplers for lattice point processes and empirical correlation estimates.

Randomness comes from Philox counter-based generators spawned off one
``SeedSequence``; each substream owns a fixed block of the output, so results
depend on the seed only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .ground import GroundSpace, masks_up_to, popcount
from .measures import FiniteConfigMeasure, ProcessLaw

BLOCK = 1 << 14


@dataclass
class SamplerConfig:
    """``kind`` is ``"bernoulli_field"`` or ``"gibbs_pair"``.

    Bernoulli fields use ``p`` (scalar or one per site). Gibbs pair processes use
    activity ``z``, the symmetric ``potential`` table, inverse temperature
    ``beta`` and ``sweeps`` full systematic sweeps between recorded samples,
    spread over ``chains`` independent chains.
    """

    kind: str = "bernoulli_field"
    seed: int = 0
    samples: int = 1000
    p: float | tuple = 0.5
    z: float = 1.0
    potential: np.ndarray | None = None
    beta: float = 0.0
    sweeps: int = 1
    chains: int = 256

    def __post_init__(self):
        if self.kind not in ("bernoulli_field", "gibbs_pair"):
            raise ValueError(f"unknown process kind {self.kind!r}")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.beta < 0:
            raise ValueError("beta must be >= 0")
        if self.sweeps < 1 or self.chains < 1:
            raise ValueError("sweeps and chains must be >= 1")
        if not self.z > 0:
            raise ValueError("activity z must be positive")
        ps = np.atleast_1d(np.asarray(self.p, dtype=float))
        if np.any(ps < 0) or np.any(ps > 1):
            raise ValueError("probabilities must lie in [0, 1]")


def _site_probs(cfg: SamplerConfig, n: int) -> np.ndarray:
    ps = np.atleast_1d(np.asarray(cfg.p, dtype=float))
    if ps.size == 1:
        return np.full(n, ps[0])
    if ps.size != n:
        raise ValueError(f"expected {n} site probabilities, got {ps.size}")
    return ps


def _pack(occ: np.ndarray) -> np.ndarray:
    n = occ.shape[1]
    return occ.astype(np.int64) @ (np.int64(1) << np.arange(n, dtype=np.int64))


def _potential(cfg: SamplerConfig, n: int) -> np.ndarray:
    v = np.zeros((n, n)) if cfg.potential is None else np.array(cfg.potential, dtype=float)
    if v.shape != (n, n):
        raise ValueError(f"pair potential must be {n}x{n}")
    if not np.allclose(v, v.T):
        raise ValueError("pair potential must be symmetric")
    np.fill_diagonal(v, 0.0)
    return v


def sample_process(cfg: SamplerConfig, space: GroundSpace) -> np.ndarray:
    """Configurations (as masks) drawn from the process; length ``cfg.samples``."""
    n = space.n
    if n > 62:
        raise ValueError("sampler packs configurations into 64-bit masks")
    if cfg.kind == "bernoulli_field":
        ps = _site_probs(cfg, n)
        blocks = math.ceil(cfg.samples / BLOCK)
        out = []
        for i, ss in enumerate(np.random.SeedSequence(cfg.seed).spawn(blocks)):
            size = min(BLOCK, cfg.samples - i * BLOCK)
            u = np.random.Generator(np.random.Philox(ss)).random((size, n))
            out.append(_pack(u < ps))
        return np.concatenate(out)
    return _gibbs(cfg, space)


def _gibbs(cfg: SamplerConfig, space: GroundSpace) -> np.ndarray:
    n = space.n
    v = _potential(cfg, n)
    chains = min(cfg.chains, cfg.samples)
    per_chain = math.ceil(cfg.samples / chains)
    burn = 10 * cfg.sweeps
    steps = (burn + per_chain * cfg.sweeps) * n
    gens = [np.random.Generator(np.random.Philox(ss)) for ss in np.random.SeedSequence(cfg.seed).spawn(chains)]
    logu = np.log(np.stack([g.random(steps) for g in gens]))
    state = np.zeros((chains, n), dtype=bool)
    logz = math.log(cfg.z)
    recorded = np.empty((per_chain, chains), dtype=np.int64)
    t = 0
    for sweep in range(burn + per_chain * cfg.sweeps):
        for x in range(n):
            field_ = state.astype(float) @ v[:, x] if cfg.beta else 0.0
            sign = np.where(state[:, x], -1.0, 1.0)
            log_acc = sign * (logz - cfg.beta * field_)
            flip = logu[:, t] < log_acc
            state[flip, x] ^= True
            t += 1
        done = sweep + 1 - burn
        if done > 0 and done % cfg.sweeps == 0:
            recorded[done // cfg.sweeps - 1] = _pack(state)
    return recorded.reshape(-1)[: cfg.samples]


def gibbs_law(space: GroundSpace, z: float, potential: np.ndarray | None, beta: float) -> ProcessLaw:
    """Exact law ``prop. to z**|gamma| exp(-beta H(gamma))`` with pair energy H, by enumeration."""
    n = space.n
    v = np.zeros((n, n)) if potential is None else np.array(potential, dtype=float)
    np.fill_diagonal(v, 0.0)
    masks = np.arange(1 << n, dtype=np.int64)
    occ = ((masks[:, None] >> np.arange(n)) & 1).astype(float)
    energy = 0.5 * np.einsum("gi,ij,gj->g", occ, v, occ)
    logw = occ.sum(axis=1) * math.log(z) - beta * energy
    w = np.exp(logw - logw.max())
    return ProcessLaw(space, w / w.sum())


@dataclass
class EmpiricalCorrelation:
    """Estimates of ``rho(eta) = P(eta in gamma)``: mask -> (mean, standard error, count)."""

    space: GroundSpace
    samples: int
    estimates: dict[int, tuple[float, float, int]] = field(default_factory=dict)

    def rank(self, k: int) -> dict[int, tuple[float, float, int]]:
        return {m: e for m, e in self.estimates.items() if popcount(m) == k}

    def z_scores(self, rho: FiniteConfigMeasure, min_rank: int = 0) -> dict[int, float]:
        """``(estimate - exact) / SE``; entries with zero standard error score 0 when exact agrees."""
        out = {}
        for m, (mean, se, _) in self.estimates.items():
            if popcount(m) < min_rank:
                continue
            diff = mean - float(rho(m))
            out[m] = diff / se if se > 0 else (0.0 if abs(diff) < 1e-12 else math.inf)
        return out

    def as_measure(self) -> FiniteConfigMeasure:
        return FiniteConfigMeasure(self.space, {m: e[0] for m, e in self.estimates.items()})


def empirical_correlation(samples: np.ndarray, space: GroundSpace, max_rank: int) -> EmpiricalCorrelation:
    """``rho_hat(eta) = mean of 1{eta in gamma_s}`` with binomial standard errors."""
    if max_rank > space.n:
        raise ValueError("max_rank exceeds the number of sites")
    s = len(samples)
    counts = np.bincount(np.asarray(samples, dtype=np.int64), minlength=1 << space.n)
    covered = kernels.superset_zeta(counts)
    est = {}
    for m in masks_up_to(space.full_mask, max_rank):
        c = int(covered[m])
        mean = c / s
        est[m] = (mean, math.sqrt(mean * (1 - mean) / s), c)
    return EmpiricalCorrelation(space, s, est)
