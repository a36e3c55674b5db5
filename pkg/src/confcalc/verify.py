"""End-to-end checks over the bundled scenarios."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ground import GroundSpace
from .measures import check_a3, check_a4, correlation_measure, reconstruct_process
from .scenarios import density_bounded, gram_counterexample, law_scenarios, non_realizable
from .spectral import build_gram, commutator_norm, cyclic_rank, joint_spectrum, operator_matrix, verify_k_unitary
from .star import OneParticleFunction, RankedFunction, star_fast, star_naive
from .transforms import k_transform, r_transform

ROUND_TRIP_TV = 1e-8


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'} {self.name}: {self.detail}"


def _law_checks(scn, seed: int) -> list[CheckResult]:
    mu = scn.law
    rho = correlation_measure(mu)
    rec = reconstruct_process(rho)
    tv_rec = mu.total_variation(rec.law) if rec.law is not None else float("inf")
    q = build_gram(rho)
    spec = joint_spectrum(q, seed=seed)
    tv_spec = mu.total_variation(spec.law())
    report = verify_k_unitary(q, spec, seed=seed)
    rng = np.random.default_rng(seed)
    n = mu.space.n
    phi = OneParticleFunction(mu.space, tuple(rng.uniform(-1, 1, n)))
    psi = OneParticleFunction(mu.space, tuple(rng.uniform(-1, 1, n)))
    herm = operator_matrix(phi, q).hermitian_residual
    comm = commutator_norm(phi, psi, q)
    rank = cyclic_rank(q)
    return [
        CheckResult(f"{scn.name}/reconstruct", rec.realizable and tv_rec <= ROUND_TRIP_TV, f"TV={tv_rec:.2e}"),
        CheckResult(f"{scn.name}/spectrum", tv_spec <= ROUND_TRIP_TV, f"TV={tv_spec:.2e} atoms={len(spec.atoms)}"),
        CheckResult(f"{scn.name}/operators", herm <= 1e-10 and comm <= 1e-10 and rank == q.dim,
                    f"hermitian={herm:.2e} commutator={comm:.2e} cyclic={rank}/{q.dim}"),
        CheckResult(f"{scn.name}/unitarity", report.max_residual <= 1e-10 and report.spectral_residual <= 1e-8,
                    f"parseval/duality={report.max_residual:.2e} eigenbasis={report.spectral_residual:.2e}"),
    ]


def run_verify(seed: int = 0) -> list[CheckResult]:
    results = []
    for i, scn in enumerate(law_scenarios()):
        results += _law_checks(scn, seed + i)
    rec = reconstruct_process(non_realizable())
    results.append(CheckResult("non-realizable/verdict", not rec.realizable and rec.witness is not None,
                               f"{rec.verdict} witness={list(rec.witness.sites) if rec.witness else None} "
                               f"min={rec.min_entry:.3g}"))
    a3 = check_a3(gram_counterexample())
    results.append(CheckResult("gram-counterexample/a3", a3.min_eigenvalue < -1e-3,
                               f"min eigenvalue={a3.min_eigenvalue:.4f}"))
    rho, cands = density_bounded()
    a4 = check_a4(rho, None, cands)
    results.append(CheckResult("density-bounded/a4", a4.ok, f"cover={a4.cover} eps={a4.epsilon:.3g}"))
    rng = np.random.default_rng(seed)
    space = GroundSpace.uniform(8)
    g1 = RankedFunction.random(space, 3, rng)
    g2 = RankedFunction.random(space, 3, rng)
    d = star_naive(g1, g2).max_abs_diff(star_fast(g1, g2))
    results.append(CheckResult("star/fast-vs-naive", d <= 1e-12, f"max diff={d:.2e}"))
    ge = RankedFunction.random(GroundSpace.uniform(5), 5, rng, exact=True)
    results.append(CheckResult("transforms/exact-inverse", r_transform(k_transform(ge)) == ge, "R(K(G)) == G"))
    return results
