"""Tail of the Wick series of the generating functional after N terms.

For configurations the series is a polynomial and the tail vanishes once N
exceeds the number of points. For diffuse fields the coefficients decay like
sup|phi|**N times a power of N, so the tail at fixed N depends on how close
phi gets to the edge of its disc and on how the field mass is split between
the two signs. Prints the worst and median tails per family.
"""

import argparse

import numpy as np

from confcalc.ground import GroundSpace
from confcalc.star import OneParticleFunction
from confcalc.wick import FieldVector, generating_functional, wick_series


def families(rng, n):
    yield "real uniform [-r, r]", lambda r: rng.uniform(-r, r, n)
    yield "complex disc |phi| <= r", lambda r: r * np.sqrt(rng.random(n)) * np.exp(1j * rng.uniform(0, 2 * np.pi, n))
    yield "complex circle |phi| = r", lambda r: r * np.exp(1j * rng.uniform(0, 2 * np.pi, n))
    yield "signs +-r", lambda r: r * rng.choice([-1.0, 1.0], n)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sites", type=int, default=10)
    ap.add_argument("--radius", type=float, default=0.5)
    ap.add_argument("--terms", type=int, default=20)
    ap.add_argument("--trials", type=int, default=400)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    sp = GroundSpace.uniform(args.sites)
    print("family,worst_tail,median_tail,share_above_1e-8")
    for name, draw in families(rng, args.sites):
        tails = []
        for _ in range(args.trials):
            phi = OneParticleFunction(sp, tuple(draw(args.radius)))
            omega = FieldVector(sp, tuple(rng.uniform(0, 1, args.sites)))
            s = complex(sum(wick_series(phi, omega, args.terms)))
            tails.append(abs(complex(generating_functional(phi, omega)) - s))
        tails = np.array(tails)
        print(f"{name},{tails.max():.3e},{np.median(tails):.3e},{np.mean(tails > 1e-8):.3f}")


if __name__ == "__main__":
    main()
