"""GNS construction: the canonical representation carried by a state.

The Hilbert space is the quotient of the algebra by the null ideal of the
state, realized through the eigendecomposition of the Gram matrix
G[i, j] = omega(E_i* E_j) at the relative rank cutoff.  The cyclic vector is
the class of the identity, which pins the whole construction and makes
outputs reproducible bit-for-bit.

For large algebras (N > 1024) with low-rank states the same eigendecomposition
is computed through the PSD factorization G = Y* Y supplied by the state's
Hilbert-Schmidt representer, which avoids an O(N^3) dense eigensolve; the two
routes agree up to the usual eigenbasis freedom in degenerate subspaces.

Representation matrices are materialized densely for every basis element
(memory for simplicity of verification), which motivates the hard cap
N <= 4096.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (
    Automorphism,
    MatrixAlgebra,
    State,
    check_state,
    gram_matrix,
    pushforward_state,
    state_from_values,
)
from .errors import CapExceeded, DimensionMismatch, InvalidState
from .numerics import CHUNK_ENTRIES as _CHUNK_ENTRIES
from .numerics import DEFAULT_TOL, Tolerance, chunks as _chunks, max_abs, unit_vector
from .validation import ValidationReport

# hard cap on algebra dimension for dense construction (chain length 6)
MAX_ALGEBRA_DIM = 4096
# above this basis size the Gram eigensolve goes through the PSD factor
_DENSE_GRAM_MAX_N = 1024
# complex multiply-adds per verification pass before switching to sampling
_VERIFY_WORK_CAP = 1.0e9


@dataclass(eq=False)
class GnsRepresentation:
    """GNS data: Hilbert-space dim m, rep matrices, cyclic vector, quotient map.

    ``rep[i]`` is the m x m matrix of the i-th basis element; ``quotient[i]``
    is the Hilbert-space vector representing the class of E_i (so the cyclic
    vector is ``quotient[0]``, the class of the identity).
    """

    algebra: MatrixAlgebra
    state: State
    rep: np.ndarray
    cyclic_vector: np.ndarray
    quotient: np.ndarray
    gram_spectrum: np.ndarray | None = None
    tol: Tolerance = DEFAULT_TOL

    @property
    def hilbert_dim(self) -> int:
        return self.rep.shape[1]

    def pi_coords(self, x) -> np.ndarray:
        """pi(A) for an element in basis coordinates."""
        x = np.asarray(x, dtype=np.complex128)
        return np.tensordot(x, self.rep, axes=([x.ndim - 1], [0]))

    def pi_matrix(self, m) -> np.ndarray:
        """pi(A) for an element given as an ambient matrix."""
        return self.pi_coords(self.algebra.coords(m))

    def vector_state_values(self) -> np.ndarray:
        """<Omega, pi(E_i) Omega> for all i (equals the state's values)."""
        return self.quotient @ self.cyclic_vector.conj()


def _gram_eig_factored(algebra: MatrixAlgebra, state: State, tol: Tolerance):
    """Positive eigenpairs of the Gram matrix via its factor G = Y* Y.

    Y stacks sqrt(p_s) * (E_i psi_s) over the eigenpairs (p_s, psi_s) of the
    state's representer; returns None when the factor is not smaller than the
    Gram matrix itself.
    """
    r = state.representer
    herm = (r + r.conj().T) / 2.0
    p, v = np.linalg.eigh(herm)
    keep = p > tol.rel * max(p[-1], 0.0)
    if p[-1] <= 0.0 or not np.any(keep):
        raise InvalidState("state representer has no positive spectrum")
    p, v = p[keep], v[:, keep]
    n, d = algebra.n_basis, algebra.ambient_dim
    if d * p.size >= n:
        return None
    psi = v * np.sqrt(p)
    y = np.einsum("iab,bs->sai", algebra.basis, psi).reshape(d * p.size, n)
    _, s, vh = np.linalg.svd(y, full_matrices=False)
    lam = s**2
    m = int(np.sum(lam > tol.rel * lam[0]))
    return lam[:m], vh[:m].conj().T


def gns_construct(algebra: MatrixAlgebra, state: State, tol: Tolerance | None = None) -> GnsRepresentation:
    """Build the GNS representation of a state.

    Raises ``InvalidState`` when the functional fails the state axioms and
    ``CapExceeded`` for algebras with more than 4096 basis elements.
    """
    tol = tol or algebra.tol
    n, d = algebra.n_basis, algebra.ambient_dim
    if n > MAX_ALGEBRA_DIM:
        raise CapExceeded(f"GNS construction is capped at N <= {MAX_ALGEBRA_DIM}, algebra has N = {n}")
    if not isinstance(state, State):
        state = state_from_values(algebra, state, tol)
    report = check_state(algebra, state, tol)
    if not report.passed:
        raise InvalidState("cannot run GNS on an invalid state:\n" + str(report))

    factored = None
    if n > _DENSE_GRAM_MAX_N:
        factored = _gram_eig_factored(algebra, state, tol)
    if factored is not None:
        lam, u_plus = factored
    else:
        g = gram_matrix(algebra, state)
        w, v = np.linalg.eigh((g + g.conj().T) / 2.0)
        w, v = w[::-1], v[:, ::-1]
        m = int(np.sum(w > tol.rel * max(w[0], 0.0)))
        if m == 0:
            raise InvalidState("Gram matrix has no positive spectrum")
        lam, u_plus = w[:m].copy(), v[:, :m].copy()

    m = lam.size
    xi = np.sqrt(lam)[:, None] * u_plus.conj().T  # (m, N): quotient map on coordinates
    quotient = np.ascontiguousarray(xi.T)
    omega_vec = quotient[0].copy()

    # representation matrices: pi(E_i)[a, b] = <xi_a, class(E_i M_b)> where the
    # M_b realize a right inverse of the quotient map
    xi_pinv = u_plus / np.sqrt(lam)[None, :]  # (N, m)
    mb = algebra.matrices(xi_pinv.T)  # (m, d, d)
    zmap = np.empty((m, d * d), dtype=np.complex128)
    xi_scaled = xi.copy()
    xi_scaled[:, 0] /= d
    for lo, hi in _chunks(n, max(1, _CHUNK_ENTRIES // (d * d))):
        piece = xi_scaled[:, lo:hi] @ algebra.flat[lo:hi].conj()
        if lo == 0:
            zmap[:] = piece
        else:
            zmap += piece

    rep = np.empty((n, m, m), dtype=np.complex128)
    per_chunk = max(1, _CHUNK_ENTRIES // max(m * d * d, 1))
    for lo, hi in _chunks(n, per_chunk):
        prods = np.einsum("iab,mbc->imac", algebra.basis[lo:hi], mb)
        rep[lo:hi] = np.einsum("zc,imc->izm", zmap, prods.reshape(hi - lo, m, d * d))

    return GnsRepresentation(
        algebra=algebra,
        state=state,
        rep=rep,
        cyclic_vector=omega_vec,
        quotient=quotient,
        gram_spectrum=lam.copy(),
        tol=tol,
    )


def _pair_sample(n: int, count: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    pairs = rng.integers(0, n, size=(count, 2))
    return np.unique(pairs, axis=0)


def verify_gns(
    algebra: MatrixAlgebra,
    state: State,
    rep: GnsRepresentation,
    tol: Tolerance | None = None,
    level: str = "fast",
    seed: int = 0,
) -> ValidationReport:
    """Measure the defining GNS invariants of a representation.

    Checks: unit cyclic vector, the vector state of Omega reproducing the
    state on every basis element, density of the quotient (rank m), identity
    representation, and the *-homomorphism property.  The homomorphism check
    covers every basis element against the cyclic vector and the adjoint
    relation, plus operator-level products: all pairs at ``level="exhaustive"``,
    or a seeded deterministic sample at the default ``level="fast"`` whenever
    exhaustive work would be prohibitive.
    """
    tol = tol or algebra.tol
    report = ValidationReport()
    n, d = algebra.n_basis, algebra.ambient_dim
    m = rep.hilbert_dim
    if rep.rep.shape != (n, m, m) or rep.quotient.shape != (n, m):
        raise DimensionMismatch("representation arrays are inconsistent with the algebra")
    check_tol = max(tol.abs * 10, 1e-12)

    omega_vec = rep.cyclic_vector
    report.add("cyclic_norm", abs(float(np.linalg.norm(omega_vec)) - 1.0), tol.abs)

    values = rep.vector_state_values()
    report.add("vector_state_match", max_abs(values - state.values), check_tol)

    sing = np.linalg.svd(rep.quotient, compute_uv=False)
    rank = int(np.sum(sing > tol.rel * sing[0])) if sing.size else 0
    report.add("cyclic_density_rank_deficit", float(m - rank), 0.5)
    report.context["quotient_rank"] = rank

    report.add("identity_rep", max_abs(rep.rep[0] - np.eye(m)), tol.abs)

    # pi(E_i) Omega must reproduce the quotient rows (homomorphism against the
    # cyclic vector, exhaustive over i)
    images = np.einsum("iab,b->ia", rep.rep, omega_vec)
    report.add("cyclic_action_match", max_abs(images - rep.quotient), check_tol)

    # adjoint relation pi(coords(E_i*)) == pi(E_i)^dagger
    if n * n * m * m <= _VERIFY_WORK_CAP or level == "exhaustive":
        mixed = np.tensordot(algebra.adjoint_matrix, rep.rep, axes=([0], [0]))
        report.add(
            "star_hom_adjoint",
            max_abs(mixed - rep.rep.conj().transpose(0, 2, 1)),
            check_tol,
        )
        report.context["adjoint_strategy"] = "exhaustive"
    else:
        idx = np.unique(np.linspace(0, n - 1, 64).astype(int))
        adj_coords = np.stack([algebra.adjoint_coords(np.eye(n)[i]) for i in idx])
        mixed = rep.pi_coords(adj_coords)
        report.add(
            "star_hom_adjoint",
            max_abs(mixed - rep.rep[idx].conj().transpose(0, 2, 1)),
            check_tol,
        )
        report.context["adjoint_strategy"] = "sampled"

    # operator-level products pi(E_i) pi(E_j) == pi(E_i E_j)
    if level == "exhaustive" or n * n * (m**3 + n * m * m) <= _VERIFY_WORK_CAP:
        worst = 0.0
        for i in range(n):
            lhs = rep.rep[i] @ rep.rep
            prods = np.einsum("ab,jbc->jac", algebra.basis[i], algebra.basis)
            rhs = rep.pi_coords(algebra.coords_many(prods))
            worst = max(worst, max_abs(lhs - rhs))
        report.add("star_hom_product", worst, check_tol)
        report.context["product_strategy"] = "exhaustive"
    else:
        budget = max(8, min(64, int(_VERIFY_WORK_CAP / max(m**3 + n * m * m, 1))))
        pairs = _pair_sample(n, budget, seed)
        worst = 0.0
        for i, j in pairs:
            lhs = rep.rep[i] @ rep.rep[j]
            rhs = rep.pi_coords(algebra.coords(algebra.basis[i] @ algebra.basis[j]))
            worst = max(worst, max_abs(lhs - rhs))
        # vector-level coverage is much cheaper: check products against Omega
        # on a wide deterministic grid
        grid = np.unique(np.linspace(0, n - 1, 48).astype(int))
        for i in grid:
            lhs_vec = rep.rep[i] @ rep.quotient[grid].T
            prods = np.einsum("ab,jbc->jac", algebra.basis[i], algebra.basis[grid])
            rhs_vec = (rep.pi_coords(algebra.coords_many(prods)) @ omega_vec).T
            worst = max(worst, max_abs(lhs_vec - rhs_vec))
        report.add("star_hom_product", worst, check_tol)
        report.context["product_strategy"] = f"sampled_{len(pairs)}_pairs"
    return report


def vector_to_state(algebra: MatrixAlgebra, rep: GnsRepresentation, x) -> State:
    """The algebraic state A -> <x, pi(A) x> of a unit vector x."""
    x = unit_vector(x, rep.tol)
    if x.shape != (rep.hilbert_dim,):
        raise DimensionMismatch(f"vector must have length {rep.hilbert_dim}")
    values = np.einsum("a,iab,b->i", x.conj(), rep.rep, x)
    return state_from_values(algebra, values, rep.tol)


def compose_rep(rep: GnsRepresentation, alpha: Automorphism) -> GnsRepresentation:
    """The representation A -> pi(alpha^-1(A)) on the same space, same Omega.

    This is a GNS representation for the pushforward state omega o alpha^-1.
    """
    alg = rep.algebra
    alpha.algebra.require_same(alg)
    inv = alpha.inverse_matrix
    new_rep = np.tensordot(inv, rep.rep, axes=([0], [0]))
    new_quotient = inv.T @ rep.quotient
    new_state = pushforward_state(rep.state, alpha)
    return GnsRepresentation(
        algebra=alg,
        state=new_state,
        rep=np.ascontiguousarray(new_rep),
        cyclic_vector=rep.cyclic_vector.copy(),
        quotient=np.ascontiguousarray(new_quotient),
        gram_spectrum=None,
        tol=rep.tol,
    )
