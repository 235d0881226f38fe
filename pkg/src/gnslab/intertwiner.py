"""Intertwiner spaces between representations and unitary-equivalence decisions.

The space of operators X with X pi(A) = pi'(A) X for all A is the common null
space of the vectorized constraint blocks I (x) pi(E_i)^T - pi'(E_i) (x) I.
Two representations are unitarily equivalent iff that space contains a
unitary, and a symmetry is unitarily implementable in a representation iff
the representation and its symmetry-composed copy are equivalent — the
criterion for spontaneous breaking.

Solver strategy: the stacked system is solved by one dense SVD whenever it is
small enough, and otherwise through the Hermitian accumulation
H = sum K_i* K_i (assembled from Kronecker factors, never forming the K_i),
whose near-kernel candidates are then certified by exact per-candidate
residuals, restoring the relative-cutoff semantics of the direct solve.
Mathematically the constraints for a generating set already pin the space
(intertwining is preserved under products and sums), so large systems use
generator constraints and re-verify the result against every basis element.

Unitary witnesses are found constructively: when an invertible intertwiner
exists, invertible elements are generic in the space, so a few seeded random
combinations followed by a polar decomposition certify one; every positive
answer travels with its residuals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import Automorphism
from .errors import CapExceeded, DimensionMismatch
from .gns import GnsRepresentation, compose_rep
from .numerics import DEFAULT_TOL, Tolerance, max_abs
from .validation import ValidationReport

# hard cap on mA * mB (the number of unknowns of the vectorized system)
MAX_UNKNOWNS = 2**16
# largest stacked system solved by one dense SVD (rows * cols^2 flop estimate)
_DIRECT_SVD_WORK = 2.0e9
_DIRECT_SVD_ENTRIES = 2**24
# basis size above which constraints are reduced to a generating set
_FULL_CONSTRAINT_MAX_N = 512
_WITNESS_DRAWS = 32


def _pin_phase(u: np.ndarray) -> np.ndarray:
    """Fix the global phase: largest-magnitude entry becomes real positive."""
    idx = int(np.argmax(np.abs(u)))
    entry = u.flat[idx]
    if abs(entry) == 0.0:
        return u
    return u * (abs(entry) / entry)


def _constraint_elements(rep_a: GnsRepresentation, rep_b: GnsRepresentation):
    """Pairs (pi_A(g), pi_B(g)) used as solver constraints, plus a strategy tag.

    All basis elements when the algebra is small; otherwise the recorded
    generators with their adjoints (a generating set pins the intertwiner
    space exactly) plus a deterministic sample of basis elements.
    """
    alg = rep_a.algebra
    n = alg.n_basis
    if n <= _FULL_CONSTRAINT_MAX_N:
        return rep_a.rep, rep_b.rep, "all_basis"
    mats = [np.eye(alg.ambient_dim, dtype=np.complex128)]
    for g in alg.generators:
        mats.append(np.asarray(g, dtype=np.complex128))
        mats.append(np.asarray(g, dtype=np.complex128).conj().T)
    idx = np.unique(np.linspace(0, n - 1, 32).astype(int))
    pa = [rep_a.pi_matrix(m) for m in mats] + [rep_a.rep[i] for i in idx]
    pb = [rep_b.pi_matrix(m) for m in mats] + [rep_b.rep[i] for i in idx]
    return np.stack(pa), np.stack(pb), "generators_plus_sample"


def _residual_against_basis(x: np.ndarray, rep_a: GnsRepresentation, rep_b: GnsRepresentation) -> float:
    """max-norm of X pi(E_i) - pi'(E_i) X over every basis element."""
    lhs = np.einsum("ab,ibc->iac", x, rep_a.rep)
    rhs = np.einsum("iab,bc->iac", rep_b.rep, x)
    return max_abs(lhs - rhs)


def _stacked_residual_norm(x: np.ndarray, pa: np.ndarray, pb: np.ndarray) -> float:
    """Euclidean norm of the stacked constraint image (exact sigma of the candidate)."""
    r = np.einsum("ab,ibc->iac", x, pa) - np.einsum("iab,bc->iac", pb, x)
    return float(np.linalg.norm(r.ravel()))


@dataclass(eq=False)
class IntertwinerReport:
    """Solved intertwiner space between two representations."""

    space_dim: int
    basis: np.ndarray  # (k, mB, mA), orthonormal in the Frobenius inner product
    has_unitary: bool
    witness: np.ndarray | None
    max_basis_residual: float
    witness_residual: float | None
    sigma_max: float
    seed: int
    strategy: str

    def to_dict(self) -> dict:
        out = {
            "space_dim": self.space_dim,
            "has_unitary": self.has_unitary,
            "max_basis_residual": self.max_basis_residual,
            "witness_residual": self.witness_residual,
            "sigma_max": self.sigma_max,
            "seed": self.seed,
            "strategy": self.strategy,
        }
        return out


def intertwiner_space(
    rep_a: GnsRepresentation,
    rep_b: GnsRepresentation,
    tol: Tolerance | None = None,
    seed: int = 0,
) -> IntertwinerReport:
    """Solve {X : X pi_A(E_i) = pi_B(E_i) X for all i} and hunt for a unitary.

    Returns an orthonormal basis of solutions (each re-verified against every
    basis element), and when the space contains a unitary, a phase-pinned
    certified witness found through seeded random combinations and the polar
    decomposition.
    """
    rep_a.algebra.require_same(rep_b.algebra)
    tol = tol or rep_a.tol
    ma, mb = rep_a.hilbert_dim, rep_b.hilbert_dim
    unknowns = ma * mb
    if unknowns > MAX_UNKNOWNS:
        raise CapExceeded(f"intertwiner solve capped at {MAX_UNKNOWNS} unknowns, got {unknowns}")

    pa, pb, strategy = _constraint_elements(rep_a, rep_b)
    n_c = pa.shape[0]

    direct_ok = (
        n_c * unknowns * unknowns**2 <= _DIRECT_SVD_WORK
        and n_c * unknowns * unknowns <= _DIRECT_SVD_ENTRIES
    )
    if direct_ok:
        # stacked blocks K_i = I (x) pi_A(E_i)^T - pi_B(E_i) (x) I, row-major vec
        blocks = np.empty((n_c, unknowns, unknowns), dtype=np.complex128)
        eye_a = np.eye(ma, dtype=np.complex128)
        eye_b = np.eye(mb, dtype=np.complex128)
        for i in range(n_c):
            blocks[i] = np.kron(eye_b, pa[i].T) - np.kron(pb[i], eye_a)
        stack = blocks.reshape(n_c * unknowns, unknowns)
        _, s, vh = np.linalg.svd(stack, full_matrices=True)
        sigma_max = float(s[0]) if s.size else 0.0
        rank = int(np.sum(s > tol.rel * sigma_max)) if sigma_max > 0.0 else 0
        kernel = vh[rank:].conj().T  # (unknowns, k)
        strategy += "+direct_svd"
    else:
        # Hermitian accumulation: H = sum_i K_i* K_i from Kronecker factors
        h = np.zeros((unknowns, unknowns), dtype=np.complex128)
        eye_a = np.eye(ma, dtype=np.complex128)
        eye_b = np.eye(mb, dtype=np.complex128)
        for i in range(n_c):
            a, b = pa[i], pb[i]
            h += np.kron(eye_b, a.conj() @ a.T)
            h -= np.kron(b, a.conj())
            h -= np.kron(b.conj().T, a.T)
            h += np.kron(b.conj().T @ b, eye_a)
        w, v = np.linalg.eigh((h + h.conj().T) / 2.0)
        sigma_max = float(np.sqrt(max(w[-1], 0.0)))
        # harvest loosely, then certify each candidate by its exact residual
        loose = max(tol.rel**2, 1e-12) * max(w[-1], 0.0)
        cand = [v[:, j] for j in range(w.size) if w[j] <= loose]
        kept = []
        for vec in cand:
            x = vec.reshape(mb, ma)
            if _stacked_residual_norm(x, pa, pb) <= tol.rel * max(sigma_max, 1e-300):
                kept.append(vec)
        kernel = np.stack(kept, axis=1) if kept else np.empty((unknowns, 0), dtype=np.complex128)
        strategy += "+hermitian_accumulation"

    k = kernel.shape[1]
    basis = kernel.T.reshape(k, mb, ma).copy()
    max_basis_residual = 0.0
    for x in basis:
        max_basis_residual = max(max_basis_residual, _residual_against_basis(x, rep_a, rep_b))

    witness = None
    witness_residual = None
    has_unitary = False
    wit_tol = tol.abs * 10
    if ma == mb and k > 0:
        rng = np.random.default_rng(seed)
        for _ in range(_WITNESS_DRAWS):
            c = rng.standard_normal(k) + 1j * rng.standard_normal(k)
            x = np.tensordot(c, basis, axes=1)
            u_svd, s, vh_svd = np.linalg.svd(x)
            if s[0] <= 0.0 or s[-1] <= tol.rel * s[0]:
                continue
            u = _pin_phase(u_svd @ vh_svd)
            resid = _residual_against_basis(u, rep_a, rep_b)
            if resid <= wit_tol and max_abs(u.conj().T @ u - np.eye(ma)) <= wit_tol:
                witness = u
                witness_residual = resid
                has_unitary = True
                break

    return IntertwinerReport(
        space_dim=k,
        basis=basis,
        has_unitary=has_unitary,
        witness=witness,
        max_basis_residual=max_basis_residual,
        witness_residual=witness_residual,
        sigma_max=sigma_max,
        seed=seed,
        strategy=strategy,
    )


def is_unitarily_equivalent(
    rep_a: GnsRepresentation,
    rep_b: GnsRepresentation,
    tol: Tolerance | None = None,
    seed: int = 0,
    hint: np.ndarray | None = None,
) -> tuple[bool, np.ndarray | None]:
    """Decide whether a unitary intertwiner exists; return one when it does.

    ``hint`` short-circuits the solve: a candidate witness that certifies
    (unitary and intertwining within tolerance) is accepted directly.
    """
    rep_a.algebra.require_same(rep_b.algebra)
    tol = tol or rep_a.tol
    if rep_a.hilbert_dim != rep_b.hilbert_dim:
        return False, None
    wit_tol = tol.abs * 10
    if hint is not None:
        m = rep_a.hilbert_dim
        if (
            max_abs(hint.conj().T @ hint - np.eye(m)) <= wit_tol
            and _residual_against_basis(hint, rep_a, rep_b) <= wit_tol
        ):
            return True, _pin_phase(hint)
    report = intertwiner_space(rep_a, rep_b, tol, seed)
    return report.has_unitary, report.witness


@dataclass(eq=False)
class ImplementabilityResult:
    """Verdict on unitary implementability of a symmetry in a representation."""

    implementable: bool
    witness: np.ndarray | None
    residual: float | None  # intertwining residual of the witness
    strategy: str
    seed: int
    space_dim: int | None = None  # filled when the full solve ran

    def to_dict(self) -> dict:
        return {
            "implementable": self.implementable,
            "residual": self.residual,
            "strategy": self.strategy,
            "seed": self.seed,
            "space_dim": self.space_dim,
        }


# full-basis witness verification is used below this flop estimate; beyond it
# the generating set plus a deterministic sample certifies the witness
_IMPL_FULL_WORK = 8.0e9


def _witness_residual(
    rep: GnsRepresentation, alpha: Automorphism, v: np.ndarray
) -> tuple[float, str]:
    """Residual of V pi(E) = pi(alpha(E)) V over a documented constraint set."""
    alg = rep.algebra
    n, m, d = alg.n_basis, rep.hilbert_dim, alg.ambient_dim
    if n * n * (m * m + d * d) <= _IMPL_FULL_WORK:
        mixed = np.tensordot(alpha.matrix, rep.rep, axes=([0], [0]))
        resid = max_abs(np.einsum("ab,ibc->iac", v, rep.rep) - np.einsum("iab,bc->iac", mixed, v))
        return resid, "full_basis"
    mats = [np.eye(d, dtype=np.complex128)]
    for g in alg.generators:
        g = np.asarray(g, dtype=np.complex128)
        mats.extend([g, g.conj().T])
    idx = np.unique(np.linspace(0, n - 1, 64).astype(int))
    mats.extend(alg.basis[i] for i in idx)
    worst = 0.0
    for mat in mats:
        lhs = v @ rep.pi_matrix(mat)
        rhs = rep.pi_matrix(alpha.apply_ambient(mat)) @ v
        worst = max(worst, max_abs(lhs - rhs))
    return worst, "generators_plus_sample"


def is_implementable(
    rep: GnsRepresentation,
    alpha: Automorphism,
    tol: Tolerance | None = None,
    seed: int = 0,
) -> ImplementabilityResult:
    """Decide whether alpha is unitarily implementable in the representation.

    True means the symmetry is unbroken there (a unitary V with
    pi(alpha(A)) = V pi(A) V* exists); False means it is spontaneously broken
    in this representation.  Conjugation-built symmetries are certified
    directly through V = pi(u); the general case solves the intertwiner space
    between pi and pi o alpha.
    """
    alpha.algebra.require_same(rep.algebra)
    tol = tol or rep.tol
    wit_tol = tol.abs * 10

    if alpha.inner_unitary is not None:
        x = rep.algebra.coords(alpha.inner_unitary)
        v = _pin_phase(rep.pi_coords(x))
        unitary_defect = max_abs(v.conj().T @ v - np.eye(rep.hilbert_dim))
        resid, strat = _witness_residual(rep, alpha, v)
        if resid <= wit_tol and unitary_defect <= wit_tol:
            return ImplementabilityResult(
                implementable=True,
                witness=v,
                residual=resid,
                strategy=f"inner_certificate+{strat}",
                seed=seed,
            )

    target = compose_rep(rep, alpha.inverted())  # A -> pi(alpha(A))
    report = intertwiner_space(rep, target, tol, seed)
    if not report.has_unitary:
        return ImplementabilityResult(
            implementable=False,
            witness=None,
            residual=None,
            strategy=report.strategy,
            seed=seed,
            space_dim=report.space_dim,
        )
    return ImplementabilityResult(
        implementable=True,
        witness=report.witness,
        residual=report.witness_residual,
        strategy=report.strategy,
        seed=seed,
        space_dim=report.space_dim,
    )


def commutant_dim(rep: GnsRepresentation, tol: Tolerance | None = None) -> int:
    """Dimension of {X : X pi(E_i) = pi(E_i) X for all i}; 1 iff irreducible."""
    return intertwiner_space(rep, rep, tol).space_dim


def verify_intertwiner_report(
    report: IntertwinerReport,
    rep_a: GnsRepresentation,
    rep_b: GnsRepresentation,
    tol: Tolerance | None = None,
) -> ValidationReport:
    """Re-check a report's own invariants (basis intertwines, witness certifies)."""
    tol = tol or rep_a.tol
    out = ValidationReport()
    wit_tol = tol.abs * 10
    worst = 0.0
    for x in report.basis:
        worst = max(worst, _residual_against_basis(x, rep_a, rep_b))
    out.add("basis_intertwines", worst, wit_tol)
    if report.has_unitary:
        u = report.witness
        out.add("witness_unitary", max_abs(u.conj().T @ u - np.eye(u.shape[0])), wit_tol)
        out.add("witness_intertwines", _residual_against_basis(u, rep_a, rep_b), wit_tol)
    return out
