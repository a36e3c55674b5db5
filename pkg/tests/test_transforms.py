import cmath
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from confcalc.ground import Configuration, GroundSpace
from confcalc.star import DensePathError, OneParticleFunction, RankedFunction, lift_one_particle, star_fast
from confcalc.transforms import (
    ObservableFunction,
    exp_pairing,
    exp_vector,
    k_transform,
    naive_k,
    pairing_observable,
    r_transform,
    shifted_exp,
)
from conftest import subset_sum


def test_k_of_lift_is_pairing():
    sp = GroundSpace.uniform(4)
    phi = OneParticleFunction(sp, (Fraction(1), Fraction(-2), Fraction(3, 2), Fraction(5)))
    kf = k_transform(lift_one_particle(phi))
    for g in range(16):
        assert kf(g) == phi.pairing(g)
    assert kf.max_abs_diff(pairing_observable(phi)) == 0


def test_k_of_vacuum_is_one():
    sp = GroundSpace.uniform(5)
    assert np.all(k_transform(RankedFunction.vacuum(sp)).values == 1)


def test_k_of_pair_indicator():
    sp = GroundSpace.uniform(4)
    kf = k_transform(RankedFunction.indicator(sp, Configuration.of(1, 3)))
    for g in range(16):
        assert kf(g) == (1 if g & 0b1010 == 0b1010 else 0)


def test_r_of_constant_one():
    sp = GroundSpace.uniform(4)
    out = r_transform(ObservableFunction(sp, np.ones(16)))
    assert out == RankedFunction.vacuum(sp, 1.0)


@given(st.integers(0, 2**32 - 1), st.integers(0, 6))
def test_k_matches_direct_subset_sums(seed, n):
    g = RankedFunction.random(GroundSpace.uniform(n), n, np.random.default_rng(seed), exact=True)
    kf = k_transform(g)
    assert kf.values.tolist() == subset_sum(g.to_dense(object).tolist())
    assert all(kf(m) == naive_k(g, m) for m in range(1 << n))


@given(st.integers(0, 2**32 - 1), st.integers(0, 7))
def test_r_inverts_k_exactly(seed, n):
    rng = np.random.default_rng(seed)
    g = RankedFunction.random(GroundSpace.uniform(n), n, rng, exact=True)
    assert r_transform(k_transform(g)) == g
    f = ObservableFunction(g.space, np.array([Fraction(int(v), 5) for v in rng.integers(-9, 10, 1 << n)], dtype=object))
    assert k_transform(r_transform(f)).values.tolist() == f.values.tolist()


@given(st.integers(0, 2**32 - 1), st.integers(1, 9))
def test_k_is_multiplicative(seed, n):
    rng = np.random.default_rng(seed)
    sp = GroundSpace.uniform(n)
    g1 = RankedFunction.random(sp, n, rng, complex_values=True)
    g2 = RankedFunction.random(sp, n, rng, complex_values=True)
    lhs = k_transform(star_fast(g1, g2))
    rhs = k_transform(g1) * k_transform(g2)
    assert lhs.max_abs_diff(rhs) <= 1e-12


def test_exp_vector_values():
    sp = GroundSpace.uniform(3)
    phi = OneParticleFunction(sp, (2.0, 3.0, 5.0))
    e = exp_vector(phi)
    assert e(Configuration(0)) == 1
    assert e(Configuration.of(0, 2)) == 10.0


@given(st.integers(0, 2**32 - 1), st.integers(0, 8))
def test_k_of_exp_vector_is_product(seed, n):
    rng = np.random.default_rng(seed)
    phi = OneParticleFunction(GroundSpace.uniform(n), tuple(rng.uniform(-1, 1, n)))
    kf = k_transform(exp_vector(phi))
    for g in range(1 << n):
        expect = np.prod([1 + phi(i) for i in range(n) if g >> i & 1])
        assert abs(kf(g) - expect) < 1e-13


@given(st.integers(0, 2**32 - 1), st.integers(0, 8))
def test_r_of_exponential_observable(seed, n):
    rng = np.random.default_rng(seed)
    phi = OneParticleFunction(GroundSpace.uniform(n), tuple(complex(a, b) for a, b in rng.uniform(-1, 1, (n, 2))))
    got = r_transform(exp_pairing(phi))
    assert got.max_abs_diff(exp_vector(shifted_exp(phi))) < 1e-12
    assert abs(exp_pairing(phi)(2**n - 1) - cmath.exp(sum(phi.values))) < 1e-12


def test_k_rejects_multisets():
    with pytest.raises(DensePathError):
        k_transform(RankedFunction(GroundSpace.uniform(2), multi={(1, 1): 1}))
