"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -s`` to see the lines inline; they are
also collected into the terminal summary.
"""

import itertools
import subprocess
import sys
import time
from fractions import Fraction
from functools import partial

import numpy as np
import pytest

from confcalc import io
from confcalc.bench import benchmark_star
from confcalc.ground import GroundSpace, mask_sites
from confcalc.measures import ProcessLaw, check_a2prime, check_a3, check_a4, correlation_measure, reconstruct_process
from confcalc.sampling import SamplerConfig, empirical_correlation, sample_process
from confcalc.scenarios import (
    bernoulli_a2prime,
    density_bounded,
    gram_counterexample,
    non_realizable,
    random_law,
)
from confcalc.spectral import (
    build_gram,
    commutator_norm,
    cyclic_rank,
    joint_spectrum,
    operator_matrix,
    site_operators,
    verify_k_unitary,
)
from confcalc.star import OneParticleFunction, RankedFunction, star_fast, star_naive
from confcalc.transforms import ObservableFunction, k_transform, r_transform
from confcalc.wick import FieldVector, generating_functional, wick_config, wick_series

RESULTS = []


def report(number, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
    RESULTS.append(line)
    print(line)
    return ok


def test_criterion_1_algebra_laws():
    rng = np.random.default_rng(101)
    mul = partial(star_naive, domain="multiset")
    t0 = time.perf_counter()
    comm = assoc = multisets = 0
    for _ in range(200):
        n = int(rng.integers(1, 7))
        sp = GroundSpace.uniform(n)
        g1, g2, g3 = (RankedFunction.random(sp, int(rng.integers(1, 3)), rng, exact=True, multiset=True,
                                            density=0.35) for _ in range(3))
        multisets += any(g.multi for g in (g1, g2, g3))
        g12 = mul(g1, g2)
        comm += g12 == mul(g2, g1)
        assoc += mul(g12, g3) == mul(g1, mul(g2, g3))
    dt = time.perf_counter() - t0
    ok = comm == 200 and assoc == 200 and dt < 60 and multisets > 0
    report(1, ok, f"commutative {comm}/200, associative {assoc}/200 (exact, {multisets} triples with multisets), "
                  f"{dt:.1f} s")
    assert ok


def test_criterion_2_fast_matches_naive():
    rng = np.random.default_rng(202)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 13))
        sp = GroundSpace.uniform(n)
        g1 = RankedFunction.random(sp, int(rng.integers(0, min(n, 3) + 1)), rng, complex_values=True)
        g2 = RankedFunction.random(sp, int(rng.integers(0, min(n, 3) + 1)), rng, complex_values=True)
        worst = max(worst, star_fast(g1, g2).max_abs_diff(star_naive(g1, g2)))
    bench = benchmark_star([14], repetitions=3, seed=2)
    naive_t, fast_t = (r.seconds for r in bench.rows)
    ok = worst <= 1e-12 and bench.fast_wins()
    report(2, ok, f"max |fast - naive| = {worst:.2e} over 100 pairs; 14 sites naive {naive_t * 1e3:.1f} ms, "
                  f"fast {fast_t * 1e3:.1f} ms")
    assert ok


def test_criterion_3_transform_inversion():
    rng = np.random.default_rng(303)
    exact_ok = 0
    for _ in range(100):
        n = int(rng.integers(1, 13))
        sp = GroundSpace.uniform(n)
        g = RankedFunction.random(sp, n, rng, exact=True)
        f = ObservableFunction(sp, np.array([Fraction(int(v), 7) for v in rng.integers(-20, 21, 1 << n)], dtype=object))
        exact_ok += r_transform(k_transform(g)) == g and k_transform(r_transform(f)).values.tolist() == f.values.tolist()
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 13))
        sp = GroundSpace.uniform(n)
        g1 = RankedFunction.random(sp, n, rng, complex_values=True)
        g2 = RankedFunction.random(sp, n, rng, complex_values=True)
        worst = max(worst, k_transform(star_fast(g1, g2)).max_abs_diff(k_transform(g1) * k_transform(g2)))
    ok = exact_ok == 100 and worst <= 1e-12
    report(3, ok, f"exact R(K(G)) = G and K(R(F)) = F on {exact_ok}/100; max |K(G1*G2) - KG1 KG2| = {worst:.2e}")
    assert ok


def test_criterion_4_wick_consistency():
    rng = np.random.default_rng(404)
    n = 10
    sp = GroundSpace.uniform(n)
    worst = 0.0
    for _ in range(3):
        phi = OneParticleFunction(sp, tuple(complex(a, b) for a, b in rng.uniform(-1, 1, (n, 2))))
        for g in range(1 << n):
            series = wick_series(phi, FieldVector.from_configuration(sp, g), 10)
            worst = max(worst, max(abs(series[k] - wick_config(phi, g, k)) for k in range(11)))

    # generating functional: sup|phi| <= 0.5, configurations and diffuse omega, interior and boundary of the disc
    tails = []
    for trial in range(600):
        k = int(rng.integers(1, n + 1))
        radius = 0.5 if trial % 2 else 0.5 * np.sqrt(rng.random(k))
        phi_vals = radius * np.exp(1j * rng.uniform(0, 2 * np.pi, k))
        phi_vals = np.concatenate([phi_vals, np.zeros(n - k)])
        if trial % 3 == 0:
            omega = FieldVector.from_configuration(sp, int(rng.integers(0, 1 << n)))
        else:
            omega = FieldVector(sp, tuple(rng.uniform(0, 1, n)))
        phi = OneParticleFunction(sp, tuple(phi_vals))
        partial_sum = complex(sum(wick_series(phi, omega, 20)))
        tails.append(abs(complex(generating_functional(phi, omega)) - partial_sum))
    # real boundary values with all same-sign mass on one side of the disc
    phi = OneParticleFunction(sp, (0.5,) * 8 + (-0.5,) * 2)
    omega = FieldVector(sp, (1.0,) * 8 + (0.25, 0.25))
    tails.append(abs(complex(generating_functional(phi, omega)) - complex(sum(wick_series(phi, omega, 20)))))
    tails = np.array(tails)
    over = int(np.sum(tails > 1e-8))
    ok = worst <= 1e-10 and over == 0
    report(4, ok, f"recurrence vs elementary symmetric max {worst:.2e} (all 1024 configurations, n <= 10); "
                  f"tail at N=20 max {tails.max():.2e}, {over}/{len(tails)} cases above 1e-8")
    assert ok


def test_criterion_5_realizability_round_trip():
    rng = np.random.default_rng(505)
    worst = 0.0
    for i in range(100):
        n = int(rng.integers(1, 13))
        mu = random_law(n, int(rng.integers(2**32)), sparsity=0.5 if i % 2 else 0.0)
        rec = reconstruct_process(correlation_measure(mu))
        worst = max(worst, mu.total_variation(rec.law) if rec.realizable else np.inf)
    bad = reconstruct_process(non_realizable())
    witness_ok = (bad.verdict == "NOT_REALIZABLE" and bad.witness is not None
                  and bad.table[bad.witness.mask] < 0)
    ok = worst <= 1e-11 and witness_ok
    report(5, ok, f"max TV(mu, reconstruct(corr(mu))) = {worst:.2e} over 100 laws; bundled rho -> {bad.verdict}, "
                  f"witness {list(bad.witness.sites) if bad.witness else None} with mass {bad.min_entry:g}")
    assert ok


def test_criterion_6_condition_checkers():
    a2_worst = 0.0
    for n in (1, 3, 6, 9):
        for p in (0.05, 0.3, 0.5, 0.9, 1.0):
            rho = correlation_measure(ProcessLaw.bernoulli(GroundSpace.uniform(n), p))
            a2_worst = max(a2_worst, abs(check_a2prime(rho) - bernoulli_a2prime(p, n)))
    rng = np.random.default_rng(606)
    a3_min = np.inf
    for i in range(30):
        mu = random_law(int(rng.integers(1, 8)), int(rng.integers(2**32)), sparsity=0.5 if i % 2 else 0.0)
        a3_min = min(a3_min, check_a3(correlation_measure(mu)).min_eigenvalue)
    for n, p in ((4, 0.3), (5, 0.9)):
        a3_min = min(a3_min, check_a3(correlation_measure(ProcessLaw.bernoulli(GroundSpace.uniform(n), p))).min_eigenvalue)
    counter = check_a3(gram_counterexample()).min_eigenvalue
    rho, cands = density_bounded()
    a4 = check_a4(rho, None, cands)
    ok = a2_worst <= 1e-12 and a3_min >= -1e-9 and counter < -1e-3 and a4.ok
    report(6, ok, f"A2' error {a2_worst:.1e}; A3 min eigenvalue over genuine laws {a3_min:.2e}, "
                  f"counterexample {counter:.4f}; A4 cover {a4.cover}")
    assert ok


def test_criterion_7_spectral_theorem():
    rng = np.random.default_rng(707)
    t0 = time.perf_counter()
    worst = dict(herm=0.0, comm=0.0, bits=0.0, weights=0.0, parseval=0.0)
    rank_ok = atoms_ok = 0
    for i in range(50):
        n = int(rng.integers(1, 9))
        mu = random_law(n, int(rng.integers(2**32)), sparsity=0.5 if i % 3 == 0 else 0.0)
        rho = correlation_measure(mu)
        q = build_gram(rho)
        phi = OneParticleFunction(mu.space, tuple(rng.uniform(-1, 1, n)))
        psi = OneParticleFunction(mu.space, tuple(rng.uniform(-1, 1, n)))
        worst["herm"] = max(worst["herm"], operator_matrix(phi, q).hermitian_residual)
        worst["comm"] = max(worst["comm"], commutator_norm(phi, psi, q))
        rank_ok += cyclic_rank(q) == q.dim
        spec = joint_spectrum(q, seed=i)
        ops = site_operators(q)
        for atom in spec.atoms:
            vecs = atom.vector if atom.vector.ndim == 2 else atom.vector[:, None]
            for v in vecs.T:
                vals = np.array([np.vdot(v, o @ v).real for o in ops])
                worst["bits"] = max(worst["bits"], float(np.max(np.abs(vals - np.rint(vals)), initial=0.0)))
        atoms_ok += all(set(np.rint([np.vdot(v, o @ v).real for o in ops])) <= {0.0, 1.0}
                        for a in spec.atoms for v in (a.vector if a.vector.ndim == 2 else a.vector[:, None]).T)
        rec = reconstruct_process(rho)
        worst["weights"] = max(worst["weights"], float(np.max(np.abs(spec.law().probs - rec.law.probs))))
        rep = verify_k_unitary(q, spec, seed=i)
        worst["parseval"] = max(worst["parseval"], rep.parseval, rep.duality, rep.vacuum)
    dt = time.perf_counter() - t0
    ok = (worst["herm"] <= 1e-10 and worst["comm"] <= 1e-10 and rank_ok == 50 and atoms_ok == 50
          and worst["bits"] <= 1e-6 and worst["weights"] <= 1e-9 and worst["parseval"] <= 1e-10 and dt < 300)
    report(7, ok, f"hermitian {worst['herm']:.1e}, commutator {worst['comm']:.1e}, cyclic = dim {rank_ok}/50, "
                  f"site eigenvalues off {{0,1}} by {worst['bits']:.1e}, weights vs reconstruction "
                  f"{worst['weights']:.1e}, Parseval/duality {worst['parseval']:.1e}, {dt:.1f} s")
    assert ok


def _fraction_within(est, rho):
    zs = est.z_scores(rho)
    return sum(abs(z) <= 3 for z in zs.values()) / len(zs), len(zs)


def test_criterion_8_monte_carlo():
    # seeds 0 and 1 were fixed before the first run; see the README on statistical checks
    t0 = time.perf_counter()
    sp = GroundSpace.uniform(10)
    exact = correlation_measure(ProcessLaw.bernoulli(sp, 0.3))
    est = empirical_correlation(sample_process(SamplerConfig(p=0.3, samples=100_000, seed=0), sp), sp, 3)
    frac_b, count = _fraction_within(est, exact)
    z = 3 / 7  # z / (1 + z) = 0.3
    cfg = SamplerConfig(kind="gibbs_pair", z=z, beta=0.0, samples=100_000, seed=1)
    est_g = empirical_correlation(sample_process(cfg, sp), sp, 3)
    frac_g, _ = _fraction_within(est_g, exact)
    dt = time.perf_counter() - t0
    ok = frac_b >= 0.99 and frac_g >= 0.99 and dt < 120
    report(8, ok, f"within 3 SE: bernoulli {frac_b:.1%}, gibbs(beta=0) {frac_g:.1%} of {count} estimates "
                  f"of rank <= 3; {dt:.1f} s")
    assert ok


def _cli(args, cwd):
    proc = subprocess.run([sys.executable, "-m", "confcalc.cli", *args], cwd=cwd, capture_output=True)
    return proc.returncode, proc.stdout


def test_criterion_9_determinism(tmp_path):
    rng = np.random.default_rng(909)
    sp = GroundSpace.uniform(5, regions={"left": [0, 1], "right": [2, 3, 4]})
    law = ProcessLaw.bernoulli(sp, [0.1, 0.2, 0.3, 0.15, 0.05])
    io.save(sp, tmp_path / "space.json")
    io.save(law, tmp_path / "law.json")
    io.save(correlation_measure(law), tmp_path / "rho.json")
    io.save(RankedFunction.random(sp, 2, rng, complex_values=True), tmp_path / "g1.json")
    io.save(RankedFunction.random(sp, 3, rng, complex_values=True), tmp_path / "g2.json")
    io.save(k_transform(RankedFunction.random(sp, 5, rng)), tmp_path / "obs.json")
    io.save(non_realizable(), tmp_path / "bad.json")
    runs = {
        "star": ["star", "g1.json", "g2.json", "-o", "OUT"],
        "star --check": ["star", "g1.json", "g2.json", "--check"],
        "ktrans": ["ktrans", "g2.json", "-o", "OUT"],
        "rtrans": ["rtrans", "obs.json", "-o", "OUT"],
        "wick": ["wick", "space.json", "--phi", "0.3,-0.2,0.1+0.2j,0.4,-0.5", "--omega", "0.2,0.9,0.5,0.1,0.7"],
        "corr": ["corr", "law.json", "-o", "OUT"],
        "invert": ["invert", "rho.json", "--region", "right"],
        "invert (negative)": ["invert", "bad.json"],
        "check": ["check", "rho.json", "--cover", "left,right"],
        "spectrum": ["spectrum", "rho.json", "--seed", "4", "--csv", "CSV"],
        "sample": ["sample", "space.json", "--process", "gibbs_pair", "--z", "0.4", "--neighbour", "1.0",
                   "--beta", "1", "--samples", "3000", "--seed", "9", "--compare", "law.json", "--csv", "CSV"],
        "sample samples": ["sample", "space.json", "--p", "0.3", "--samples", "200", "--seed", "9", "--emit", "samples"],
        "bench": ["bench", "--sizes", "6,8,16", "--reps", "1"],
        "verify": ["verify", "--seed", "2"],
    }
    differing = []
    for name, args in runs.items():
        outputs = []
        for rep in range(2):
            a = [f"{name.split()[0]}{rep}.out" if x == "OUT" else f"{name.split()[0]}{rep}.csv" if x == "CSV" else x
                 for x in args]
            code, stdout = _cli(a, tmp_path)
            files = [(tmp_path / x).read_bytes() for x in a if x.endswith((".out", ".csv"))]
            outputs.append((code, stdout, files))
        if outputs[0] != outputs[1] or outputs[0][0] == 2:
            differing.append(name)
    ok = not differing
    report(9, ok, f"{len(runs) - len(differing)}/{len(runs)} CLI invocations byte-identical across runs"
                  + (f"; differing: {differing}" if differing else ""))
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
