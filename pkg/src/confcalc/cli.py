"""Command line front end.

Exit codes: 0 success, 1 negative mathematical verdict, 2 usage or format error.
Documents go to stdout unless ``-o`` names a file.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import sys
from pathlib import Path

import numpy as np

from . import io
from .bench import benchmark_star
from .ground import GroundSpace, mask_sites
from .measures import (
    FiniteConfigMeasure,
    GramTooLargeError,
    ProcessLaw,
    check_a1,
    check_a2prime,
    check_a3,
    check_a4,
    correlation_measure,
    reconstruct_process,
)
from .sampling import SamplerConfig, empirical_correlation, sample_process
from .spectral import NotPositiveDefiniteError, SpectrumError, build_gram, joint_spectrum, verify_k_unitary
from .star import OneParticleFunction, RankedFunction, star_fast, star_naive
from .transforms import ObservableFunction, k_transform, r_transform
from .verify import run_verify
from .wick import FieldVector, WickSingularityError, generating_functional, wick_config, wick_series

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE = 0, 1, 2
STAR_CHECK_TOL = 1e-12


class UsageError(Exception):
    pass


def _emit(doc_or_text, out: str | None) -> None:
    text = doc_or_text if isinstance(doc_or_text, str) else io.dumps(doc_or_text)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _report(verb: str, space: GroundSpace | None, **body) -> dict:
    doc = {"kind": "report", "version": io.VERSION, "verb": verb}
    if space is not None:
        doc["space"] = io.space_to_doc(space)
    doc.update(body)
    return doc


def _load(path: str, *types):
    obj = io.load(path)
    if types and not isinstance(obj, types):
        raise io.FormatError(f"{path}: expected {' or '.join(t.__name__ for t in types)}, got {type(obj).__name__}")
    return obj


def _load_space(path: str) -> GroundSpace:
    obj = io.load(path)
    if isinstance(obj, GroundSpace):
        return obj
    if hasattr(obj, "space"):
        return obj.space
    raise io.FormatError(f"{path}: no ground space")


def _site_values(space: GroundSpace, spec: str, what: str) -> tuple:
    """``"a=0.1,b=-0.2+0.3j"`` (unlisted sites 0) or a plain list in site order."""
    parts = [p.strip() for p in spec.split(",") if p.strip()]
    try:
        if parts and all("=" in p for p in parts):
            vals = [0] * space.n
            for p in parts:
                label, v = p.split("=", 1)
                vals[space.index(label.strip())] = complex(v.strip())
        else:
            vals = [complex(p) for p in parts]
    except (KeyError, ValueError) as e:
        raise UsageError(f"bad {what} values {spec!r}: {e}") from e
    if len(vals) != space.n:
        raise UsageError(f"{what} needs {space.n} values, got {len(vals)}")
    return tuple(v.real if isinstance(v, complex) and v.imag == 0 else v for v in vals)


def _cplx(v) -> list:
    c = complex(v)
    return [c.real, c.imag]


# verbs


def cmd_star(a) -> int:
    g1 = _load(a.left, RankedFunction)
    g2 = _load(a.right, RankedFunction)
    if a.mode == "check":
        naive = star_naive(g1, g2)
        fast = star_fast(g1, g2)
        diff = naive.max_abs_diff(fast)
        ok = diff <= STAR_CHECK_TOL
        if a.output:
            io.save(naive, a.output)
        _emit(_report("star", g1.space, check="naive-vs-fast", max_abs_diff=diff, tolerance=STAR_CHECK_TOL, ok=ok), None)
        return EXIT_OK if ok else EXIT_NEGATIVE
    if a.mode == "naive":
        out = star_naive(g1, g2)
    elif a.mode == "fast":
        out = star_fast(g1, g2)
    else:
        out = star_naive(g1, g2) if g1.has_multisets or g2.has_multisets else star_fast(g1, g2)
    _emit(io.to_doc(out), a.output)
    return EXIT_OK


def cmd_ktrans(a) -> int:
    g = _load(a.input, RankedFunction)
    _emit(io.to_doc(k_transform(g)), a.output)
    return EXIT_OK


def cmd_rtrans(a) -> int:
    f = _load(a.input, ObservableFunction)
    _emit(io.to_doc(r_transform(f)), a.output)
    return EXIT_OK


def cmd_wick(a) -> int:
    space = _load_space(a.space)
    phi = OneParticleFunction(space, _site_values(space, a.phi, "phi"))
    if a.config is not None:
        labels = [s for s in a.config.split(",") if s.strip()]
        omega = FieldVector.from_configuration(space, space.config(labels))
    elif a.omega is not None:
        omega = FieldVector(space, _site_values(space, a.omega, "omega"))
    else:
        raise UsageError("wick needs --config or --omega")
    series = wick_series(phi, omega, a.n)
    body = {"n_max": a.n, "pairings": [_cplx(v) for v in series]}
    partial = 0
    sums = []
    for v in series:
        partial = partial + v
        sums.append(_cplx(partial))
    body["partial_sums"] = sums
    if omega.is_configuration:
        gamma = omega.as_configuration()
        body["configuration"] = space.names(gamma.sites)
        body["elementary_symmetric"] = [_cplx(wick_config(phi, gamma, k)) for k in range(a.n + 1)]
    try:
        gen = generating_functional(phi, omega)
        body["generating_functional"] = _cplx(gen)
        body["tail"] = abs(complex(gen) - complex(partial))
    except WickSingularityError as e:
        body["generating_functional"] = None
        body["note"] = str(e)
    _emit(_report("wick", space, **body), a.output)
    return EXIT_OK


def cmd_corr(a) -> int:
    mu = _load(a.input, ProcessLaw)
    _emit(io.to_doc(correlation_measure(mu)), a.output)
    return EXIT_OK


def cmd_invert(a) -> int:
    rho = _load(a.input, FiniteConfigMeasure)
    rec = reconstruct_process(rho, a.region)
    body = {
        "verdict": rec.verdict,
        "region": rho.space.names(mask_sites(rec.region)),
        "min_entry": float(rec.min_entry),
        "total": float(rec.total),
        "witness": None if rec.witness is None else rho.space.names(rec.witness.sites),
        "notes": rec.notes,
    }
    if rec.law is not None:
        body["law"] = io.to_doc(rec.law)
    _emit(_report("invert", rho.space, **body), a.output)
    return EXIT_OK if rec.realizable else EXIT_NEGATIVE


def cmd_check(a) -> int:
    rho = _load(a.input, FiniteConfigMeasure)
    a1 = check_a1(rho)
    a2 = check_a2prime(rho, a.region)
    a3 = check_a3(rho, a.basis_rank, a.region)
    cands = [c for c in a.cover.split(",") if c] if a.cover else None
    a4 = check_a4(rho, a.region, cands, a.epsilon)
    body = {
        "A1": {"ok": a1, "rho_empty": float(np.real(complex(rho(0))))},
        "A2prime": {"constant": a2},
        "A3": {"ok": a3.ok, "min_eigenvalue": a3.min_eigenvalue, "basis_size": len(a3.basis)},
        "A4": {"ok": a4.ok, "cover": a4.cover, "epsilon": a4.epsilon,
               "uncovered": rho.space.names(a4.uncovered)},
    }
    _emit(_report("check", rho.space, **body), a.output)
    return EXIT_OK if a1 and a3.ok and a4.ok else EXIT_NEGATIVE


def cmd_spectrum(a) -> int:
    rho = _load(a.input, FiniteConfigMeasure)
    try:
        q = build_gram(rho, a.max_rank)
    except NotPositiveDefiniteError as e:
        _emit(_report("spectrum", rho.space, ok=False, error=str(e), min_eigenvalue=e.eigenvalue,
                      certificate=io.to_doc(e.certificate)), a.output)
        return EXIT_NEGATIVE
    try:
        spec = joint_spectrum(q, seed=a.seed)
    except SpectrumError as e:
        _emit(_report("spectrum", rho.space, ok=False, error=str(e), dim=q.dim), a.output)
        return EXIT_NEGATIVE
    rep = verify_k_unitary(q, spec, seed=a.seed)
    atoms = [[rho.space.names(at.config.sites), at.weight] for at in spec.atoms]
    ok = rep.max_residual <= 1e-10 and rep.spectral_residual <= 1e-8
    body = {
        "ok": ok,
        "seed": a.seed,
        "dim": q.dim,
        "separator_attempts": spec.attempts,
        "total_weight": spec.total_weight,
        "atoms": atoms,
        "residuals": {"parseval": rep.parseval, "duality": rep.duality, "vacuum": rep.vacuum,
                      "covariance": rep.covariance, "fourier_vs_k": rep.fourier_vs_k},
    }
    if a.csv:
        buf = _io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["configuration", "weight"])
        for names, wt in atoms:
            w.writerow([" ".join(names), repr(wt)])
        Path(a.csv).write_text(buf.getvalue())
    _emit(_report("spectrum", rho.space, **body), a.output)
    return EXIT_OK if ok else EXIT_NEGATIVE


def _potential(space: GroundSpace, a) -> np.ndarray | None:
    if a.potential:
        try:
            import json

            v = np.array(json.loads(Path(a.potential).read_text()), dtype=float)
        except (OSError, ValueError) as e:
            raise io.FormatError(f"{a.potential}: bad potential table ({e})") from e
        return v
    if a.neighbour is not None:
        v = np.zeros((space.n, space.n))
        for i in range(space.n - 1):
            v[i, i + 1] = v[i + 1, i] = a.neighbour
        return v
    return None


def cmd_sample(a) -> int:
    space = _load_space(a.space)
    p = _site_values(space, a.p, "p") if a.p and "," in a.p else float(a.p or 0.5)
    cfg = SamplerConfig(kind=a.process, seed=a.seed, samples=a.samples,
                        p=tuple(float(np.real(v)) for v in p) if isinstance(p, tuple) else p,
                        z=a.z, potential=_potential(space, a), beta=a.beta, sweeps=a.sweeps, chains=a.chains)
    samples = sample_process(cfg, space)
    if a.emit == "samples":
        buf = _io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "configuration"])
        for i, m in enumerate(samples.tolist()):
            w.writerow([i, " ".join(space.names(mask_sites(m)))])
        _emit(buf.getvalue(), a.output)
        return EXIT_OK
    max_rank = min(a.max_rank, space.n)
    est = empirical_correlation(samples, space, max_rank)
    rows = [[space.names(mask_sites(m)), mean, se, c] for m, (mean, se, c) in est.estimates.items()]
    body = {"process": a.process, "seed": a.seed, "samples": est.samples, "max_rank": max_rank, "estimates": rows}
    if a.compare:
        rho = correlation_measure(_load(a.compare, ProcessLaw))
        zs = est.z_scores(rho)
        within = sum(abs(z) <= 3 for z in zs.values())
        body["within_3se"] = within / len(zs)
        if a.csv:
            buf = _io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["configuration", "estimate", "exact", "se", "z"])
            for m, z in zs.items():
                mean, se, _ = est.estimates[m]
                w.writerow([" ".join(space.names(mask_sites(m))), repr(mean), repr(float(rho(m))), repr(se), repr(z)])
            Path(a.csv).write_text(buf.getvalue())
    _emit(_report("sample", space, **body), a.output)
    return EXIT_OK


def cmd_bench(a) -> int:
    sizes = [int(s) for s in a.sizes.split(",") if s]
    rep = benchmark_star(sizes, a.reps, seed=a.seed)
    if a.csv:
        Path(a.csv).write_text(rep.to_csv(timings=True))
    wins = rep.fast_wins()
    _emit(rep.to_csv(timings=a.timings), a.output)
    return EXIT_OK if wins or not any(n >= 14 for n in sizes) else EXIT_NEGATIVE


def cmd_verify(a) -> int:
    results = run_verify(a.seed)
    lines = [r.line() for r in results]
    failed = sum(not r.ok for r in results)
    lines.append(f"{len(results) - failed}/{len(results)} checks passed")
    _emit("\n".join(lines) + "\n", a.output)
    return EXIT_OK if failed == 0 else EXIT_NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="confcalc", description="Configuration-space calculus on finite site models.")
    sub = ap.add_subparsers(dest="verb", required=True)

    def verb(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=fn)
        p.add_argument("-o", "--output", help="write the result here instead of stdout")
        return p

    p = verb("star", cmd_star, "star-convolve two ranked function files")
    p.add_argument("left")
    p.add_argument("right")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--naive", dest="mode", action="store_const", const="naive")
    mode.add_argument("--fast", dest="mode", action="store_const", const="fast")
    mode.add_argument("--check", dest="mode", action="store_const", const="check",
                      help="run both paths and report their difference")
    p.set_defaults(mode="auto")

    p = verb("ktrans", cmd_ktrans, "K-transform a ranked function")
    p.add_argument("input")
    p = verb("rtrans", cmd_rtrans, "inverse K-transform an observable")
    p.add_argument("input")

    p = verb("wick", cmd_wick, "Wick pairings and the generating functional")
    p.add_argument("space", help="ground space (or any document embedding one)")
    p.add_argument("--phi", required=True, help="site values, 'a=0.1,b=0.2' or '0.1,0.2,...'")
    p.add_argument("--config", help="comma-separated site labels of a configuration")
    p.add_argument("--omega", help="field weights, same syntax as --phi")
    p.add_argument("-n", type=int, default=10, help="highest Wick power")

    p = verb("corr", cmd_corr, "correlation measure of a process law")
    p.add_argument("input")

    p = verb("invert", cmd_invert, "reconstruct a process law from a correlation measure")
    p.add_argument("input")
    p.add_argument("--region")

    p = verb("check", cmd_check, "report conditions A1, A2', A3, A4 for a measure")
    p.add_argument("input")
    p.add_argument("--region")
    p.add_argument("--basis-rank", type=int)
    p.add_argument("--cover", help="comma-separated candidate region names for A4")
    p.add_argument("--epsilon", type=float, default=1e-6)

    p = verb("spectrum", cmd_spectrum, "Gram form, operators, joint spectrum and unitarity report")
    p.add_argument("input")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-rank", type=int)
    p.add_argument("--csv", help="also write atoms and weights as CSV")

    p = verb("sample", cmd_sample, "sample a lattice process")
    p.add_argument("space")
    p.add_argument("--process", choices=["bernoulli_field", "gibbs_pair"], default="bernoulli_field")
    p.add_argument("--p", help="occupation probability, scalar or per-site list")
    p.add_argument("--z", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--potential", help="JSON file holding the pair potential matrix")
    p.add_argument("--neighbour", type=float, help="nearest-neighbour potential along the site order")
    p.add_argument("--sweeps", type=int, default=1)
    p.add_argument("--chains", type=int, default=256)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--emit", choices=["samples", "correlation"], default="correlation")
    p.add_argument("--max-rank", type=int, default=3)
    p.add_argument("--compare", help="exact law to score estimates against")
    p.add_argument("--csv", help="z-score table (with --compare)")

    p = verb("bench", cmd_bench, "time naive against fast star products")
    p.add_argument("--sizes", default="8,12,14,16,20")
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--timings", action="store_true", help="include wall times on stdout")
    p.add_argument("--csv", help="full CSV report with timings")

    p = verb("verify", cmd_verify, "end-to-end checks on bundled scenarios")
    p.add_argument("--seed", type=int, default=0)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_OK
    try:
        return a.func(a)
    except (UsageError, io.FormatError, FileNotFoundError, GramTooLargeError) as e:
        print(f"confcalc {a.verb}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        print(f"confcalc {a.verb}: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
