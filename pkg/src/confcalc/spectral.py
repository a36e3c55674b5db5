"""The star-convolution Hilbert space at finite dimension and its joint spectrum.

The form ``a_rho(G1, G2) = int (G1 * G2) d(rho)`` is assembled on configuration
indicators, its null directions are divided out, and the operators
``G -> phi * G`` are represented on the quotient. Their joint eigenvectors
are read off with a single generic separator; each joint eigenvalue is a
configuration and the squared vacuum overlaps form the spectral law.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ground import Configuration, GroundSpace, mask_sites, masks_up_to, popcount
from .measures import (
    REALIZABILITY_TOL,
    FiniteConfigMeasure,
    ProcessLaw,
    correlation_measure,
    gram_matrix,
)
from .star import OneParticleFunction, RankedFunction
from .transforms import k_transform, pairing_observable

NULL_THRESHOLD = 1e-10
EIGEN_TOL = 1e-6


class NotPositiveDefiniteError(ValueError):
    """The Gram form has a negative direction; ``certificate`` is a RankedFunction G with a(G, conj G) < 0."""

    def __init__(self, message: str, eigenvalue: float, certificate: RankedFunction):
        super().__init__(message)
        self.eigenvalue = eigenvalue
        self.certificate = certificate


class SpectrumError(RuntimeError):
    pass


@dataclass
class QuotientSpace:
    """Gram form over configuration indicators and an orthonormal basis of its quotient.

    ``ortho`` maps quotient coordinates to indicator coordinates, so that
    ``ortho.T @ gram @ ortho`` is the identity.
    """

    space: GroundSpace
    rho: FiniteConfigMeasure
    max_rank: int
    basis: list[int]
    gram: np.ndarray
    ortho: np.ndarray
    eigenvalues: np.ndarray
    null_threshold: float
    _rho_dense: np.ndarray = field(repr=False, default=None)
    _ops: dict = field(repr=False, default_factory=dict)

    @property
    def dim(self) -> int:
        return self.ortho.shape[1]

    @property
    def index(self) -> dict[int, int]:
        return {m: i for i, m in enumerate(self.basis)}

    def coefficients(self, g: RankedFunction) -> np.ndarray:
        """Coordinates of G in the indicator basis."""
        if g.multi:
            raise ValueError("quotient vectors are functions of simple configurations")
        idx = self.index
        out = np.zeros(len(self.basis), dtype=np.complex128)
        for m, v in g.simple.items():
            if m not in idx:
                raise ValueError(f"configuration {mask_sites(m)} is outside the basis of rank {self.max_rank}")
            out[idx[m]] = complex(v)
        return out

    def project(self, coeffs: np.ndarray) -> np.ndarray:
        """Quotient coordinates of a vector given in the indicator basis."""
        return self.ortho.T @ (self.gram @ coeffs)

    def quotient_coords(self, g: RankedFunction) -> np.ndarray:
        return self.project(self.coefficients(g))

    @property
    def vacuum(self) -> np.ndarray:
        e0 = np.zeros(len(self.basis))
        e0[0] = 1.0
        return self.project(e0)

    def inner(self, g1: RankedFunction, g2: RankedFunction) -> complex:
        """``(G1, G2) = a_rho(G1, conj G2)``."""
        c1, c2 = self.coefficients(g1), self.coefficients(g2)
        return complex(c1 @ self.gram @ c2.conj())

    def form_with(self, phi_values: np.ndarray) -> np.ndarray:
        """``a_rho(b_i, phi * b_j) = sum_x phi(x) rho(eta_i | eta_j | {x})``."""
        b = np.asarray(self.basis, dtype=np.int64)
        union = b[:, None] | b[None, :]
        out = np.zeros(union.shape, dtype=np.result_type(phi_values, np.float64))
        for x, v in enumerate(phi_values):
            if v != 0:
                out += v * self._rho_dense[union | (1 << x)]
        return out


def build_gram(rho: FiniteConfigMeasure, max_rank: int | None = None,
               null_threshold: float = NULL_THRESHOLD) -> QuotientSpace:
    """Assemble the Gram form on indicators of configurations up to ``max_rank`` and divide out its null space.

    Raises NotPositiveDefiniteError when an eigenvalue falls below
    ``-1e-9 * largest``: such rho violates positive definiteness, and the
    offending eigenvector is attached as a certificate.
    """
    space = rho.space
    if max_rank is None:
        max_rank = space.n
    basis = masks_up_to(space.full_mask, max_rank)
    gram = gram_matrix(rho, basis)
    # Jacobi scaling keeps the eigenproblem well conditioned; it is a change of basis only.
    diag = np.diag(gram).copy()
    live = diag > 0
    scale = np.zeros_like(diag)
    scale[live] = 1.0 / np.sqrt(diag[live])
    scaled = gram * scale[:, None] * scale[None, :]
    evals, evecs = np.linalg.eigh(scaled)
    top = float(evals[-1]) if evals.size else 0.0
    if evals.size and evals[0] < -REALIZABILITY_TOL * max(top, 1.0):
        v = evecs[:, 0] * scale
        cert = RankedFunction(space, {m: float(c) for m, c in zip(basis, v) if c != 0}, max_rank=max_rank)
        raise NotPositiveDefiniteError(
            f"Gram form has negative eigenvalue {evals[0]:.6g} (largest {top:.6g})", float(evals[0]), cert)
    keep = evals > null_threshold * top
    ortho = (evecs[:, keep] / np.sqrt(evals[keep])) * scale[:, None]
    q = QuotientSpace(space, rho, max_rank, basis, gram, ortho, evals[keep], null_threshold)
    q._rho_dense = rho.to_dense(np.float64)
    return q


@dataclass
class OperatorMatrix:
    matrix: np.ndarray
    generator: OneParticleFunction

    @property
    def hermitian_residual(self) -> float:
        m = self.matrix
        return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def operator_matrix(phi: OneParticleFunction, q: QuotientSpace) -> OperatorMatrix:
    """``G -> phi * G`` compressed to the quotient, in its orthonormal coordinates."""
    if phi.space != q.space:
        raise ValueError("phi lives on a different ground space")
    vals = np.array([complex(v) for v in phi.values])
    if not np.any(vals.imag):
        vals = vals.real
    h = q.form_with(vals)
    return OperatorMatrix(q.ortho.T @ h @ q.ortho, phi)


def site_operators(q: QuotientSpace) -> list[np.ndarray]:
    """Quotient matrices of the operators for the site indicators, cached on ``q``."""
    ops = q._ops.get("sites")
    if ops is None:
        ops = [operator_matrix(OneParticleFunction.indicator(q.space, x), q).matrix for x in range(q.space.n)]
        q._ops["sites"] = ops
    return ops


def creation_part(g: RankedFunction, phi: OneParticleFunction) -> RankedFunction:
    """Rank-raising part: ``eta -> sum over x in eta of phi(x) G(eta - x)``."""
    out: dict[int, object] = {}
    for m, v in g.simple.items():
        for x, f in enumerate(phi.values):
            if f == 0 or m >> x & 1:
                continue
            k = m | 1 << x
            out[k] = out.get(k, 0) + f * v
    return RankedFunction(g.space, out, max_rank=g.max_rank + 1)


def neutral_part(g: RankedFunction, phi: OneParticleFunction) -> RankedFunction:
    """Rank-preserving part: ``eta -> (sum over x in eta of phi(x)) G(eta)``."""
    out = {m: phi.pairing(m) * v for m, v in g.simple.items()}
    return RankedFunction(g.space, out, max_rank=g.max_rank)


def creation_neutral_split(phi: OneParticleFunction, max_rank: int | None = None):
    """Matrices of the creation and neutral parts on indicators of configurations up to ``max_rank``.

    Columns are images of basis vectors; images leaving the basis are dropped.
    Returns ``(creation, neutral, basis)``.
    """
    space = phi.space
    if max_rank is None:
        max_rank = space.n
    basis = masks_up_to(space.full_mask, max_rank)
    idx = {m: i for i, m in enumerate(basis)}
    dtype = np.result_type(*[np.asarray(v) for v in phi.values], np.float64) if phi.values else np.float64
    cre = np.zeros((len(basis), len(basis)), dtype=dtype)
    neu = np.zeros_like(cre)
    for j, m in enumerate(basis):
        b = RankedFunction(space, {m: 1})
        for k, v in creation_part(b, phi).simple.items():
            if k in idx:
                cre[idx[k], j] += v
        for k, v in neutral_part(b, phi).simple.items():
            neu[idx[k], j] += v
    return cre, neu, basis


@dataclass
class SpectralAtom:
    config: Configuration
    weight: float
    vector: np.ndarray


@dataclass
class SpectralResult:
    space: GroundSpace
    atoms: list[SpectralAtom]
    separator: np.ndarray
    seed: int
    attempts: int = 1

    @property
    def total_weight(self) -> float:
        return float(sum(a.weight for a in self.atoms))

    def law(self, tol: float = 1e-9) -> ProcessLaw:
        return ProcessLaw.from_atoms(self.space, {a.config.mask: a.weight for a in self.atoms}, tol=tol)


def separator_coefficients(n: int, rng: np.random.Generator) -> np.ndarray:
    """``2**x`` plus a seeded jitter below ``1/(2n)``: all subset sums stay at least 1/2 apart."""
    return 2.0 ** np.arange(n) + rng.uniform(0, 1, n) / (2 * max(n, 1))


def joint_spectrum(q: QuotientSpace, seed: int = 0, retries: int = 3, tol: float = EIGEN_TOL) -> SpectralResult:
    """Joint eigen-decomposition of the site operators through a generic separator.

    Each eigenvector of the separator gets the configuration of sites whose
    operator has eigenvalue 1 on it; the spectral weight is the squared overlap
    with the vacuum. A separator whose eigenvectors fail to be joint
    eigenvectors (site eigenvalues off {0, 1} by more than ``tol``) is redrawn
    up to ``retries`` times.
    """
    ops = site_operators(q)
    vac = q.vacuum
    n = q.space.n
    seeds = np.random.SeedSequence(seed).spawn(retries + 1)
    last_err = None
    for attempt, ss in enumerate(seeds, start=1):
        coeffs = separator_coefficients(n, np.random.default_rng(ss))
        a = sum((c * o for c, o in zip(coeffs, ops)), np.zeros((q.dim, q.dim)))
        a = 0.5 * (a + a.conj().T)
        evals, vecs = np.linalg.eigh(a)
        site_vals = np.stack([np.einsum("ik,ij,jk->k", vecs.conj(), o, vecs).real for o in ops]) if n else np.zeros((0, q.dim))
        bits = np.rint(site_vals)
        bad = (np.abs(site_vals - bits) > tol) | (bits < 0) | (bits > 1)
        if bad.any():
            k = int(np.argmax(np.abs(site_vals - bits).max(axis=0))) if n else 0
            last_err = f"eigenvector {k} is not a joint eigenvector (separator attempt {attempt})"
            continue
        weights = np.abs(vecs.conj().T @ vac) ** 2
        masks = (bits.astype(np.int64) << np.arange(n)[:, None]).sum(axis=0) if n else np.zeros(q.dim, dtype=np.int64)
        merged: dict[int, SpectralAtom] = {}
        level: dict[int, float] = {}
        for k in range(q.dim):
            m = int(masks[k])
            if m in merged:
                if abs(evals[k] - level[m]) > tol * max(1.0, float(np.abs(evals).max())):
                    raise SpectrumError(f"configuration {mask_sites(m)} appears in distinct eigenspaces")
                atom = merged[m]
                atom.weight += float(weights[k])
                atom.vector = np.column_stack([atom.vector, vecs[:, k]])
            else:
                merged[m] = SpectralAtom(Configuration(m), float(weights[k]), vecs[:, k])
                level[m] = float(evals[k])
        atoms = sorted(merged.values(), key=lambda a: (popcount(a.config.mask), a.config.mask))
        return SpectralResult(q.space, atoms, coeffs, seed, attempt)
    raise SpectrumError(last_err or "joint spectrum failed")


@dataclass
class UnitarityReport:
    """Absolute Parseval/duality/vacuum residuals and relative eigenbasis residuals.

    ``covariance`` and ``fourier_vs_k`` are scaled by the size of the values
    compared, since K of a random function grows with the number of sites.
    """

    parseval: float
    duality: float
    vacuum: float
    covariance: float = 0.0
    fourier_vs_k: float = 0.0
    pairs: int = 0

    @property
    def max_residual(self) -> float:
        return max(self.parseval, self.duality, self.vacuum)

    @property
    def spectral_residual(self) -> float:
        return max(self.covariance, self.fourier_vs_k)


def _random_function(space: GroundSpace, max_rank: int, rng: np.random.Generator) -> RankedFunction:
    return RankedFunction.random(space, max_rank, rng, complex_values=True)


def verify_k_unitary(q: QuotientSpace, spectrum: SpectralResult | ProcessLaw, pairs: int = 16,
                     seed: int = 0) -> UnitarityReport:
    """Residuals of the identities that make K the unitary onto L2(mu).

    Checks, over random pairs of functions up to the basis rank:
    ``(G1, G2) = sum KG1 conj(KG2) mu``, ``int G d(rho) = sum KG mu`` and
    ``K(Omega) = 1``. With a SpectralResult it also checks that the Fourier
    transform in the joint eigenvectors equals K on the spectrum and turns
    ``phi * G`` into multiplication by ``<phi, gamma>``.
    """
    law = spectrum.law() if isinstance(spectrum, SpectralResult) else spectrum
    rng = np.random.default_rng(seed)
    mu = law.probs.astype(np.float64)
    rho = q.rho
    parseval = duality = 0.0
    for _ in range(pairs):
        g1 = _random_function(q.space, q.max_rank, rng)
        g2 = _random_function(q.space, q.max_rank, rng)
        k1, k2 = k_transform(g1).values, k_transform(g2).values
        lhs = q.inner(g1, g2)
        rhs = complex(np.sum(k1 * k2.conj() * mu))
        parseval = max(parseval, abs(lhs - rhs))
        d_lhs = sum((complex(v) * rho(m) for m, v in g1.simple.items()), 0j)
        duality = max(duality, abs(d_lhs - complex(np.sum(k1 * mu))))
    vac = k_transform(RankedFunction.vacuum(q.space, 1.0)).values
    report = UnitarityReport(parseval, duality, float(np.max(np.abs(vac - 1))), pairs=pairs)
    if isinstance(spectrum, SpectralResult):
        report.covariance, report.fourier_vs_k = _spectral_checks(q, spectrum, rng)
    return report


def fourier_transform(q: QuotientSpace, spectrum: SpectralResult, coords: np.ndarray) -> dict[int, complex]:
    """Fourier coefficients in the joint eigenvectors, normalized so the vacuum maps to 1."""
    vac = q.vacuum
    out = {}
    for atom in spectrum.atoms:
        v = atom.vector if atom.vector.ndim == 2 else atom.vector[:, None]
        ov = v.conj().T @ vac
        norm = float(np.vdot(ov, ov).real)
        if norm <= 0:
            continue
        out[atom.config.mask] = complex(np.vdot(ov, v.conj().T @ coords) / norm)
    return out


def _spectral_checks(q: QuotientSpace, spectrum: SpectralResult, rng: np.random.Generator) -> tuple[float, float]:
    cov = fk = 0.0
    for _ in range(4):
        g = _random_function(q.space, q.max_rank, rng)
        phi = OneParticleFunction(q.space, tuple(rng.uniform(-1, 1, q.space.n)))
        coords = q.quotient_coords(g)
        fg = fourier_transform(q, spectrum, coords)
        fag = fourier_transform(q, spectrum, operator_matrix(phi, q).matrix @ coords)
        kg = k_transform(g).values
        pair = pairing_observable(phi).values
        scale = max(1.0, float(np.max(np.abs(kg))))
        for m, val in fg.items():
            fk = max(fk, abs(val - kg[m]) / scale)
            cov = max(cov, abs(fag[m] - pair[m] * val) / (scale * max(1.0, abs(pair[m]))))
    return cov, fk


def covariance_residual(q: QuotientSpace, spectrum: SpectralResult, phi: OneParticleFunction) -> float:
    """``max ||A_phi v - <phi, gamma> v|| / ||v||`` over atom eigenvectors."""
    a = operator_matrix(phi, q).matrix
    worst = 0.0
    for atom in spectrum.atoms:
        v = atom.vector if atom.vector.ndim == 2 else atom.vector[:, None]
        r = a @ v - phi.pairing(atom.config) * v
        worst = max(worst, float(np.linalg.norm(r) / np.linalg.norm(v)))
    return worst


def commutator_norm(phi: OneParticleFunction, psi: OneParticleFunction, q: QuotientSpace) -> float:
    a = operator_matrix(phi, q).matrix
    b = operator_matrix(psi, q).matrix
    return float(np.max(np.abs(a @ b - b @ a))) if a.size else 0.0


def cyclic_rank(q: QuotientSpace, degree: int | None = None, tol: float = 1e-8, history: bool = False):
    """Dimension of the span of the vacuum and products of site operators applied to it.

    Products of degree up to ``degree`` (default: the basis rank) are
    included. With ``history=True`` the rank after each degree is returned as
    a list as well.
    """
    if degree is None:
        degree = q.max_rank
    ops = site_operators(q)
    vac = q.vacuum
    norm = np.linalg.norm(vac)
    if q.dim == 0 or norm == 0:
        return (0, [0] * (degree + 1)) if history else 0
    basis = [vac / norm]
    frontier = [basis[0]]
    ranks = [1]
    for _ in range(degree):
        new = []
        for v in frontier:
            for o in ops:
                w = o @ v
                for b in basis:
                    w = w - np.vdot(b, w) * b
                for b in basis:
                    w = w - np.vdot(b, w) * b
                nw = np.linalg.norm(w)
                if nw > tol:
                    w = w / nw
                    basis.append(w)
                    new.append(w)
        frontier = new
        ranks.append(len(basis))
        if not frontier:
            ranks.extend([len(basis)] * (degree + 1 - len(ranks)))
            break
    return (len(basis), ranks) if history else len(basis)


def spectral_pipeline(rho: FiniteConfigMeasure, seed: int = 0, max_rank: int | None = None):
    """Gram -> quotient -> joint spectrum -> unitarity report."""
    q = build_gram(rho, max_rank)
    spec = joint_spectrum(q, seed=seed)
    report = verify_k_unitary(q, spec, seed=seed)
    return q, spec, report


def law_from_spectrum(mu: ProcessLaw, seed: int = 0) -> ProcessLaw:
    """Round trip mu -> rho -> spectral law."""
    _, spec, _ = spectral_pipeline(correlation_measure(mu), seed=seed)
    return spec.law()
