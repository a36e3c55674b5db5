import cmath
from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from confcalc.ground import Configuration, GroundSpace
from confcalc.measures import (
    FiniteConfigMeasure,
    NotAProcessLawError,
    ProcessLaw,
    check_a1,
    check_a2prime,
    check_a3,
    check_a4,
    correlation_measure,
    duality_residual,
    lebesgue_poisson,
    laplace_identity_check,
    pairing_integral,
    reconstruct_process,
)
from confcalc.sampling import gibbs_law
from confcalc.scenarios import (
    bernoulli_a2prime,
    density_bounded,
    gram_counterexample,
    nearest_neighbour_potential,
    non_realizable,
    random_law,
)
from confcalc.star import OneParticleFunction, RankedFunction, lift_one_particle
from conftest import brute_correlation


def _exact_law(n, seed):
    rng = np.random.default_rng(seed)
    w = [Fraction(int(v)) for v in rng.integers(0, 6, 1 << n)]
    w[0] += 1
    total = sum(w)
    return ProcessLaw(GroundSpace.uniform(n), np.array([v / total for v in w], dtype=object))


def test_lebesgue_poisson_atoms():
    sp = GroundSpace(("a", "b", "c"), (0.5, 2.0, 1.0))
    lam = lebesgue_poisson(sp, 3.0)
    assert lam(0) == 1
    assert lam(Configuration.of(0)) == 1.5
    assert lam(Configuration.of(0, 1)) == 1.5 * 6.0


def test_bernoulli_correlation_is_power():
    sp = GroundSpace.uniform(5)
    rho = correlation_measure(ProcessLaw.bernoulli(sp, Fraction(1, 3)))
    for m in range(32):
        assert rho(m) == Fraction(1, 3) ** bin(m).count("1")


def test_delta_correlation_is_indicator():
    sp = GroundSpace.uniform(4)
    rho = correlation_measure(ProcessLaw.delta(sp, 0b0110))
    for m in range(16):
        assert rho(m) == (1 if m & ~0b0110 == 0 else 0)


@given(st.integers(0, 2**32 - 1), st.integers(0, 6))
def test_correlation_matches_definition(seed, n):
    mu = _exact_law(n, seed)
    rho = correlation_measure(mu)
    brute = brute_correlation(mu.probs.tolist(), n)
    assert [rho(m) for m in range(1 << n)] == brute
    assert rho(0) == 1


@given(st.integers(0, 2**32 - 1), st.integers(0, 8))
def test_reconstruction_round_trip_exact(seed, n):
    mu = _exact_law(n, seed)
    rec = reconstruct_process(correlation_measure(mu))
    assert rec.realizable
    assert rec.law.probs.tolist() == mu.probs.tolist()


def test_reconstruct_bernoulli_from_powers():
    sp = GroundSpace.uniform(4)
    p = Fraction(2, 5)
    rho = FiniteConfigMeasure(sp, {m: p ** bin(m).count("1") for m in range(16)})
    law = reconstruct_process(rho).law
    for g in range(16):
        k = bin(g).count("1")
        assert law(g) == p ** k * (1 - p) ** (4 - k)


def test_non_realizable_witness():
    rec = reconstruct_process(non_realizable())
    assert rec.verdict == "NOT_REALIZABLE"
    # signed entries: empty 1 - 1/2 - 1/2 + 5/2, {a} 1/2 - 5/2, {b} likewise, {a,b} 5/2
    assert rec.table.tolist() == [2.5, -2.0, -2.0, 2.5]
    assert rec.witness == Configuration.of(0)
    assert rec.law is None


def test_reconstruct_on_region():
    sp = GroundSpace.uniform(4, regions={"left": [0, 1]})
    mu = ProcessLaw.bernoulli(sp, [0.2, 0.6, 0.5, 0.5])
    rec = reconstruct_process(correlation_measure(mu), "left")
    assert rec.law.space.labels == ("s0", "s1")
    assert np.allclose(rec.law.probs, [0.8 * 0.4, 0.2 * 0.4, 0.8 * 0.6, 0.2 * 0.6], atol=1e-15)


def test_unnormalized_rho_is_not_realizable():
    sp = GroundSpace.uniform(1)
    rec = reconstruct_process(FiniteConfigMeasure(sp, {0: 2.0, 1: 0.5}))
    assert not rec.realizable
    assert rec.witness is None and rec.notes


def test_process_law_validation():
    sp = GroundSpace.uniform(1)
    with pytest.raises(NotAProcessLawError):
        ProcessLaw(sp, np.array([0.5, 0.6]))
    with pytest.raises(NotAProcessLawError):
        ProcessLaw(sp, np.array([1.5, -0.5]))
    with pytest.raises(ValueError):
        FiniteConfigMeasure(sp, {1: -0.1})


@given(st.floats(0.0, 1.0), st.integers(1, 8))
def test_a2prime_closed_form(p, n):
    rho = correlation_measure(ProcessLaw.bernoulli(GroundSpace.uniform(n), p))
    assert abs(check_a2prime(rho) - bernoulli_a2prime(p, n)) <= 1e-12


def test_a1():
    assert check_a1(correlation_measure(random_law(3, 1)))
    assert not check_a1(FiniteConfigMeasure(GroundSpace.uniform(1), {0: 0.5}))


@given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.sampled_from([0.0, 0.5]))
def test_a3_nonnegative_for_genuine_laws(seed, n, sparsity):
    rep = check_a3(correlation_measure(random_law(n, seed, sparsity)))
    assert rep.min_eigenvalue >= -1e-9
    assert rep.ok


def test_a3_counterexample():
    rep = check_a3(gram_counterexample())
    assert rep.min_eigenvalue < -1e-3
    assert not rep.ok
    # exact spectrum of [[1,.9,.9,.2],[.9,.9,.2,.2],[.9,.2,.9,.2],[.2,.2,.2,.2]]
    assert abs(rep.min_eigenvalue - np.linalg.eigvalsh(rep.gram)[0]) < 1e-15


def test_a4_density_bounded_scenario():
    rho, cands = density_bounded()
    rep = check_a4(rho, None, cands)
    assert rep.ok and rep.cover == cands and rep.uncovered == []
    assert rep.epsilon == pytest.approx(0.1 ** -1 - 2)


def test_a4_dense_region_fails():
    rho = correlation_measure(ProcessLaw.bernoulli(GroundSpace.uniform(3), 0.9))
    rep = check_a4(rho, None)
    assert not rep.ok
    assert rep.uncovered == [0, 1, 2]


def test_pairing_integral():
    sp = GroundSpace.uniform(4)
    rho = correlation_measure(ProcessLaw.bernoulli(sp, 0.25))
    assert pairing_integral(RankedFunction.vacuum(sp), rho) == 1
    phi = OneParticleFunction(sp, (1.0, 2.0, -3.0, 0.5))
    assert abs(pairing_integral(lift_one_particle(phi), rho) - 0.25 * 0.5) < 1e-15


@given(st.integers(0, 2**32 - 1), st.integers(1, 7))
def test_duality(seed, n):
    rng = np.random.default_rng(seed)
    mu = random_law(n, seed)
    g = RankedFunction.random(mu.space, n, rng, complex_values=True)
    assert duality_residual(g, mu) <= 1e-12


def test_laplace_identity_bernoulli_closed_form():
    n, p, c = 5, 0.3, 0.7
    sp = GroundSpace.uniform(n)
    mu = ProcessLaw.bernoulli(sp, p)
    rho = correlation_measure(mu)
    phi = OneParticleFunction(sp, (c,) * n)
    assert laplace_identity_check(phi, mu, rho) < 1e-13
    from confcalc.transforms import exp_pairing

    lhs = np.sum(exp_pairing(phi).values * mu.probs)
    assert abs(lhs - (1 - p + p * cmath.exp(c)) ** n) < 1e-13
    assert laplace_identity_check(OneParticleFunction(sp, (0.0,) * n), mu, rho) < 1e-15


def test_laplace_identity_gibbs(rng):
    sp = GroundSpace.uniform(8)
    mu = gibbs_law(sp, 0.7, nearest_neighbour_potential(8, 0.8), 1.0)
    phi = OneParticleFunction(sp, tuple(rng.uniform(-1, 1, 8)))
    assert laplace_identity_check(phi, mu, correlation_measure(mu)) <= 1e-10


def test_rank_masses():
    sp = GroundSpace.uniform(3)
    rho = correlation_measure(ProcessLaw.bernoulli(sp, Fraction(1, 2)))
    assert rho.rank_masses() == [1, Fraction(3, 2), Fraction(3, 4), Fraction(1, 8)]
    assert [comb(3, k) * Fraction(1, 2) ** k for k in range(4)] == rho.rank_masses()
