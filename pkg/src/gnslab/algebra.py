"""Finite-dimensional unital *-algebras of matrices, their states and *-automorphisms.

An algebra is presented concretely: a basis of d x d complex matrices in
*canonical form*, meaning ``basis[0]`` is exactly the identity and the
remaining elements are traceless, Hilbert-Schmidt orthonormal and mutually
orthogonal.  Every constructor in this module produces that form, which makes
coordinates a single projection, makes state normalization a one-coordinate
check, and keeps all downstream reports reproducible bit-for-bit.

States are stored by their values on the basis (dual coordinates), not as
density matrices, so non-full algebras (diagonal algebras, block sums) need
no special casing.  Automorphisms are stored as coordinate matrices rather
than conjugating unitaries, because the interesting symmetries of non-simple
algebras (e.g. a block swap) have no conjugating unitary inside the algebra.

Structural validation is exact but work-tiered: pairwise closure and
multiplicativity checks run exhaustively whenever the flop estimate is
affordable, and otherwise fall back to a generating-set reduction (which
covers all pairs by induction on products) plus a deterministic sample.
Each report records which strategy was used.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    ClosureOverflow,
    DimensionMismatch,
    InvalidAutomorphism,
    InvalidState,
    NotInAlgebra,
    NotUnitary,
)
from .numerics import CHUNK_ENTRIES as _CHUNK_ENTRIES
from .numerics import DEFAULT_TOL, Tolerance, as_matrix, chunks as _chunks, max_abs
from .validation import ValidationReport

# complex multiply-adds allowed per exhaustive validation pass; beyond this the
# tiered checks switch to a generating-set reduction plus deterministic sample
_WORK_CAP = 6.0e9
# largest basis size for which the dense N^3 structure-constant tensor is built
_STRUCTURE_MAX_N = 256


class MatrixAlgebra:
    """Unital *-closed subalgebra of d x d matrices in canonical basis form."""

    def __init__(
        self,
        basis: np.ndarray,
        generators: tuple[np.ndarray, ...] = (),
        tol: Tolerance = DEFAULT_TOL,
        *,
        _trusted: bool = False,
    ):
        basis = np.ascontiguousarray(basis, dtype=np.complex128)
        if basis.ndim != 3 or basis.shape[1] != basis.shape[2]:
            raise ValueError(f"basis must have shape (N, d, d), got {basis.shape}")
        if not np.all(np.isfinite(basis)):
            raise ValueError("basis contains NaN or Inf entries")
        n, d, _ = basis.shape
        if n > d * d:
            raise ClosureOverflow(f"{n} basis elements cannot be independent in dim {d * d}")
        if max_abs(basis[0] - np.eye(d)) > tol.abs:
            raise ValueError("basis[0] must be the identity matrix")
        basis[0] = np.eye(d)
        self.basis = basis
        self.generators = tuple(np.asarray(g, dtype=np.complex128) for g in generators)
        self.tol = tol
        if not _trusted:
            self._check_canonical_form()

    # -- basic geometry -------------------------------------------------

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[1]

    @property
    def n_basis(self) -> int:
        return self.basis.shape[0]

    @property
    def flat(self) -> np.ndarray:
        """(N, d*d) view of the basis; row 0 is vec(I)."""
        return self.basis.reshape(self.n_basis, -1)

    def is_full(self) -> bool:
        return self.n_basis == self.ambient_dim**2

    def _check_canonical_form(self) -> None:
        n, d = self.n_basis, self.ambient_dim
        # exhaustive HS-Gram pattern check when affordable, sampled otherwise
        if n * n * d * d <= _WORK_CAP:
            g = self.flat @ self.flat.conj().T
            expected = np.eye(n, dtype=np.complex128)
            expected[0, 0] = d
            defect = max_abs(g - expected)
        else:
            idx = np.unique(np.linspace(0, n - 1, 128).astype(int))
            g = self.flat[idx] @ self.flat.conj().T
            expected = np.zeros((idx.size, n), dtype=np.complex128)
            for row, i in enumerate(idx):
                expected[row, i] = d if i == 0 else 1.0
            defect = max_abs(g - expected)
        if defect > 1e-8:
            raise ValueError(
                f"basis is not in canonical form (identity-first orthonormal); defect {defect:.3e}"
            )

    # -- coordinates ----------------------------------------------------

    def coords(self, m) -> np.ndarray:
        """Coordinates of a d x d matrix in the basis (orthogonal projection)."""
        m = np.asarray(m, dtype=np.complex128)
        x = self.flat.conj() @ m.ravel()
        x[0] /= self.ambient_dim
        return x

    def coords_many(self, mats: np.ndarray) -> np.ndarray:
        """(K, N) coordinates of a (K, d, d) stack, chunked to bound memory."""
        mats = np.asarray(mats, dtype=np.complex128)
        k = mats.shape[0]
        d2 = self.ambient_dim**2
        out = np.empty((k, self.n_basis), dtype=np.complex128)
        for lo, hi in _chunks(k, max(1, _CHUNK_ENTRIES // max(d2, 1))):
            out[lo:hi] = mats[lo:hi].reshape(hi - lo, d2) @ self.flat.conj().T
        out[:, 0] /= self.ambient_dim
        return out

    def matrix(self, x) -> np.ndarray:
        """Ambient matrix of a coefficient vector."""
        x = np.asarray(x, dtype=np.complex128)
        if x.shape != (self.n_basis,):
            raise DimensionMismatch(f"expected {self.n_basis} coefficients, got shape {x.shape}")
        return np.tensordot(x, self.basis, axes=1)

    def matrices(self, xs: np.ndarray) -> np.ndarray:
        """(K, d, d) stack for (K, N) coefficient rows."""
        xs = np.asarray(xs, dtype=np.complex128)
        return np.tensordot(xs, self.basis, axes=([xs.ndim - 1], [0]))

    def membership(self, m) -> tuple[np.ndarray, float]:
        """Project onto the span; return (coords, max-entry residual)."""
        m = as_matrix(m)
        if m.shape != (self.ambient_dim, self.ambient_dim):
            raise DimensionMismatch(
                f"expected a {self.ambient_dim} x {self.ambient_dim} matrix, got {m.shape}"
            )
        x = self.coords(m)
        return x, max_abs(m - self.matrix(x))

    def element(self, m_or_coeffs) -> "AlgebraElement":
        """Wrap a coefficient vector, or a matrix that must lie in the algebra."""
        arr = np.asarray(m_or_coeffs, dtype=np.complex128)
        if arr.ndim == 1:
            if arr.shape != (self.n_basis,):
                raise DimensionMismatch(f"expected {self.n_basis} coefficients")
            return AlgebraElement(self, arr.copy())
        x, resid = self.membership(arr)
        if resid > self.tol.abs * 100:
            raise NotInAlgebra(f"matrix is not in the algebra span (residual {resid:.3e})")
        return AlgebraElement(self, x)

    def multiply_coords(self, x, y) -> np.ndarray:
        return self.coords(self.matrix(x) @ self.matrix(y))

    def adjoint_coords(self, x) -> np.ndarray:
        return self.coords(self.matrix(x).conj().T)

    @cached_property
    def adjoint_matrix(self) -> np.ndarray:
        """(N, N) matrix D with coords(M^dagger) = D @ conj(coords(M))."""
        adjoints = self.basis.conj().transpose(0, 2, 1)
        return self.coords_many(adjoints).T.copy()

    @cached_property
    def structure_constants(self) -> np.ndarray:
        """Dense (N, N, N) tensor c with E_i E_j = sum_k c[i,j,k] E_k.

        Only materialized for N <= 256 (the tensor is cubic in N); use
        ``multiply_coords`` for individual products beyond that.
        """
        n = self.n_basis
        if n > _STRUCTURE_MAX_N:
            from .errors import CapExceeded

            raise CapExceeded(
                f"structure-constant tensor needs N <= {_STRUCTURE_MAX_N}, algebra has N = {n}"
            )
        c = np.empty((n, n, n), dtype=np.complex128)
        for i in range(n):
            prods = np.einsum("ab,jbc->jac", self.basis[i], self.basis)
            c[i] = self.coords_many(prods)
        return c

    # -- structural validation -------------------------------------------

    def validate(self) -> ValidationReport:
        """Measure the algebra axioms: identity, independence, *- and product closure."""
        report = ValidationReport()
        n, d = self.n_basis, self.ambient_dim

        report.add("identity_first", max_abs(self.basis[0] - np.eye(d)), self.tol.abs)

        # linear independence == canonical Gram pattern (checked exactly in
        # the constructor when affordable); rerun the cheap variant here
        try:
            self._check_canonical_form()
            report.add("basis_independent", 0.0, 0.5)
        except ValueError:
            report.add("basis_independent", 1.0, 0.5)

        # adjoint closure
        if n * n * d * d <= _WORK_CAP:
            adj = self.basis.conj().transpose(0, 2, 1)
            xs = self.coords_many(adj)
            resid = max_abs(adj - self.matrices(xs))
            report.context["adjoint_closure_strategy"] = "exhaustive"
        else:
            idx = np.unique(np.linspace(0, n - 1, 256).astype(int))
            adj = self.basis[idx].conj().transpose(0, 2, 1)
            xs = self.coords_many(adj)
            resid = max_abs(adj - self.matrices(xs))
            report.context["adjoint_closure_strategy"] = "sampled"
        report.add("adjoint_closure", resid, self.tol.abs)

        # product closure
        if self.is_full():
            # span is all of M_d: products cannot leave it
            report.context["product_closure_strategy"] = "structural_full_algebra"
            report.add("product_closure", 0.0, self.tol.abs)
        else:
            resid, strategy = self._product_closure_residual()
            report.context["product_closure_strategy"] = strategy
            report.add("product_closure", resid, self.tol.abs)
        return report

    def _closure_residual_for_pairs(self, left: np.ndarray, right: np.ndarray) -> float:
        """Max distance of pairwise products (left_i @ right_j) from the span."""
        d2 = self.ambient_dim**2
        worst = 0.0
        per_chunk = max(1, _CHUNK_ENTRIES // max(right.shape[0] * d2, 1))
        for lo, hi in _chunks(left.shape[0], per_chunk):
            prods = np.einsum("iab,jbc->ijac", left[lo:hi], right)
            prods = prods.reshape(-1, self.ambient_dim, self.ambient_dim)
            xs = self.coords_many(prods)
            worst = max(worst, max_abs(prods - self.matrices(xs)))
        return worst

    def _product_closure_residual(self) -> tuple[float, str]:
        n, d = self.n_basis, self.ambient_dim
        exhaustive_work = n * n * (d**3 + n * d * d)
        if exhaustive_work <= _WORK_CAP:
            return self._closure_residual_for_pairs(self.basis, self.basis), "exhaustive"
        if self.generators:
            gens = np.stack([g for g in self.generators])
            gens = np.concatenate([gens, gens.conj().transpose(0, 2, 1)])
            r1 = self._closure_residual_for_pairs(gens, self.basis)
            r2 = self._closure_residual_for_pairs(self.basis, gens)
            return max(r1, r2), "generator_reduced"
        idx = np.unique(np.linspace(0, n - 1, 64).astype(int))
        return self._closure_residual_for_pairs(self.basis[idx], self.basis[idx]), "sampled"

    def require_same(self, other: "MatrixAlgebra") -> None:
        if self is other:
            return
        if (
            self.ambient_dim != other.ambient_dim
            or self.n_basis != other.n_basis
            or max_abs(self.basis - other.basis) > self.tol.abs
        ):
            raise DimensionMismatch("operands belong to different algebras")


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """Element of a MatrixAlgebra in basis coordinates."""

    algebra: MatrixAlgebra
    coeffs: np.ndarray

    def matrix(self) -> np.ndarray:
        return self.algebra.matrix(self.coeffs)

    def adjoint(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra, self.algebra.adjoint_coords(self.coeffs))

    def hs_norm(self) -> float:
        m = self.matrix()
        return float(np.linalg.norm(m))


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------


def _orthonormal_tail(d: int) -> np.ndarray:
    """(d*d - 1, d, d) traceless HS-orthonormal completion of I in M_d.

    Off-diagonal matrix units are already unit-norm, traceless and mutually
    orthogonal; the diagonal directions are Gram-Schmidt'd against the
    normalized identity inside the d-dimensional diagonal subspace.
    """
    rows = []
    # diagonal tail: orthonormalize indicator vectors against ones/sqrt(d)
    q = [np.ones(d) / np.sqrt(d)]
    for a in range(d):
        v = np.zeros(d)
        v[a] = 1.0
        for u in q:
            v = v - (u @ v) * u
        nrm = np.linalg.norm(v)
        if nrm > 1e-12:
            v /= nrm
            q.append(v)
            rows.append(np.diag(v).astype(np.complex128))
    # off-diagonal units
    for a in range(d):
        for b in range(d):
            if a != b:
                e = np.zeros((d, d), dtype=np.complex128)
                e[a, b] = 1.0
                rows.append(e)
    return np.stack(rows)


def full_matrix_algebra(d: int, generators=None, tol: Tolerance = DEFAULT_TOL) -> MatrixAlgebra:
    """The full matrix algebra M_d in canonical basis form.

    ``generators`` records a generating set for reporting and reduced
    validation; the default is the cyclic shift plus a rank-one projection,
    which generate all matrix units.
    """
    basis = np.empty((d * d, d, d), dtype=np.complex128)
    basis[0] = np.eye(d)
    basis[1:] = _orthonormal_tail(d)
    if generators is None:
        shift = np.zeros((d, d), dtype=np.complex128)
        for j in range(d):
            shift[(j + 1) % d, j] = 1.0
        corner = np.zeros((d, d), dtype=np.complex128)
        corner[0, 0] = 1.0
        generators = (shift, corner)
    return MatrixAlgebra(basis, tuple(generators), tol, _trusted=True)


def make_algebra(ambient_dim: int, generator_matrices, tol: Tolerance = DEFAULT_TOL) -> MatrixAlgebra:
    """Smallest unital *-closed algebra containing the generators.

    Starts from the identity, the generators and their adjoints, and
    repeatedly adjoins pairwise products, re-orthonormalizing the span with
    the relative nullity cutoff until the dimension stabilizes.  Raises
    ``ClosureOverflow`` if the dimension would exceed d**2, which is
    impossible mathematically and signals numerical degeneracy of the input.
    """
    d = int(ambient_dim)
    gens = [as_matrix(g) for g in generator_matrices]
    for g in gens:
        if g.shape != (d, d):
            raise DimensionMismatch(f"generator has shape {g.shape}, expected ({d}, {d})")

    rows = [np.eye(d, dtype=np.complex128).ravel() / np.sqrt(d)]

    def absorb(candidates) -> list[np.ndarray]:
        """Orthonormalize candidates against the current span; return added rows."""
        added = []
        for c in candidates:
            v = c.ravel().astype(np.complex128)
            scale = np.linalg.norm(v)
            if scale <= tol.rel:
                continue
            for _ in range(2):  # twice-is-enough reorthogonalization
                for u in rows:
                    v = v - (u.conj() @ v) * u
            nrm = np.linalg.norm(v)
            if nrm > tol.rel * scale:
                v = v / nrm
                rows.append(v)
                added.append(v)
                if len(rows) > d * d:
                    raise ClosureOverflow(
                        f"closure exceeded ambient dimension bound {d * d}; "
                        "input is numerically degenerate"
                    )
        return added

    seed = gens + [g.conj().T for g in gens]
    new = absorb(seed)
    while new:
        all_mats = [r.reshape(d, d) for r in rows]
        new_mats = [r.reshape(d, d) for r in new]
        candidates = []
        for a in new_mats:
            for b in all_mats:
                candidates.append(a @ b)
        for a in all_mats:
            for b in new_mats:
                candidates.append(a @ b)
        candidates.extend(m.conj().T for m in new_mats)
        new = absorb(candidates)

    basis = np.empty((len(rows), d, d), dtype=np.complex128)
    basis[0] = np.eye(d)
    for k in range(1, len(rows)):
        basis[k] = rows[k].reshape(d, d)
    return MatrixAlgebra(basis, tuple(gens), tol, _trusted=True)


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class State:
    """Linear functional on an algebra, stored by its values on the basis."""

    algebra: MatrixAlgebra
    values: np.ndarray

    def expectation(self, x) -> complex:
        """Value on an element given by coordinates or an AlgebraElement."""
        if isinstance(x, AlgebraElement):
            x = x.coeffs
        x = np.asarray(x, dtype=np.complex128)
        if x.shape != (self.algebra.n_basis,):
            raise DimensionMismatch("coefficient length does not match the algebra")
        return complex(self.values @ x)

    def expectation_matrix(self, m) -> complex:
        """Value on an ambient matrix (projected onto the algebra)."""
        return complex(self.values @ self.algebra.coords(m))

    @cached_property
    def representer(self) -> np.ndarray:
        """The unique R in the algebra with omega(M) = tr(R^dagger M).

        In canonical basis coordinates r_1 = conj(v_1)/d and r_k = conj(v_k);
        R is Hermitian iff the state is Hermitian, and positive semidefinite
        iff the state is positive (the Gram matrix factors through R).
        """
        r = self.values.conj().copy()
        r[0] /= self.algebra.ambient_dim
        return self.algebra.matrix(r)


def state_from_values(
    algebra: MatrixAlgebra, values, tol: Tolerance | None = None, require_valid: bool = True
) -> State:
    values = np.asarray(values, dtype=np.complex128).ravel()
    if values.shape != (algebra.n_basis,):
        raise DimensionMismatch(
            f"state needs {algebra.n_basis} values, got {values.shape[0]}"
        )
    state = State(algebra, values)
    if require_valid:
        report = check_state(algebra, state, tol or algebra.tol)
        if not report.passed:
            raise InvalidState("functional fails the state axioms:\n" + str(report))
    return state


def state_from_density(algebra: MatrixAlgebra, rho, require_valid: bool = True) -> State:
    """State M -> tr(rho M) restricted to the algebra."""
    rho = as_matrix(rho)
    values = np.einsum("ab,iba->i", rho, algebra.basis)
    return state_from_values(algebra, values, require_valid=require_valid)


def state_from_vector(algebra: MatrixAlgebra, psi, require_valid: bool = True) -> State:
    """Vector state M -> <psi, M psi> restricted to the algebra."""
    psi = np.asarray(psi, dtype=np.complex128).ravel()
    psi = psi / np.linalg.norm(psi)
    images = np.einsum("iab,b->ia", algebra.basis, psi)
    values = images @ psi.conj()
    return state_from_values(algebra, values, require_valid=require_valid)


def tracial_state(algebra: MatrixAlgebra) -> State:
    d = algebra.ambient_dim
    return state_from_density(algebra, np.eye(d) / d)


def random_state(
    algebra: MatrixAlgebra, rng: np.random.Generator, rank: int | None = None
) -> State:
    """Random state from a random rank-r ambient density matrix."""
    d = algebra.ambient_dim
    if rank is None:
        rank = int(rng.integers(1, d + 1))
    psi = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = psi @ psi.conj().T
    rho /= np.trace(rho).real
    return state_from_density(algebra, rho)


def check_state(algebra: MatrixAlgebra, state, tol: Tolerance | None = None) -> ValidationReport:
    """Measure normalization, hermiticity and positivity of a functional.

    Positivity is equivalent to positivity of the Hilbert-Schmidt representer
    R (the Gram matrix omega(E_i* E_j) factors as Y*Y through R), so the check
    is a d x d eigenvalue problem at any algebra size.  For small algebras the
    Gram matrix eigenvalue is reported as well.
    """
    tol = tol or algebra.tol
    if isinstance(state, State):
        values = state.values
    else:
        values = np.asarray(state, dtype=np.complex128).ravel()
        state = State(algebra, values)
    report = ValidationReport()
    if values.shape != (algebra.n_basis,):
        report.add("value_count", abs(values.shape[0] - algebra.n_basis), 0.5)
        return report

    report.add("normalization", abs(values[0] - 1.0), tol.abs)

    r = state.representer
    report.add("hermiticity", max_abs(r - r.conj().T), tol.abs)

    herm = (r + r.conj().T) / 2.0
    eigs = np.linalg.eigvalsh(herm)
    report.add("positivity_min_eig", max(0.0, -float(eigs[0])), tol.abs)
    report.context["representer_min_eig"] = float(eigs[0])

    n, d = algebra.n_basis, algebra.ambient_dim
    if n * n * d * d <= _WORK_CAP and n <= 1024:
        g = gram_matrix(algebra, state)
        gmin = float(np.linalg.eigvalsh((g + g.conj().T) / 2.0)[0])
        report.add("positivity_gram_min_eig", max(0.0, -gmin), tol.abs)
        report.context["gram_min_eig"] = gmin
    return report


def gram_matrix(algebra: MatrixAlgebra, state: State) -> np.ndarray:
    """(N, N) Gram matrix G[i, j] = omega(E_i^dagger E_j)."""
    right = np.einsum("iab,bc->iac", algebra.basis, state.representer)
    return right.reshape(algebra.n_basis, -1).conj() @ algebra.flat.T


# ---------------------------------------------------------------------------
# automorphisms
# ---------------------------------------------------------------------------


class Automorphism:
    """*-automorphism of a MatrixAlgebra, stored as a coordinate matrix.

    The (N, N) coordinate matrix and its inverse are built lazily: for inner
    automorphisms on large algebras the conjugation data (the implementing
    unitary) is all the hot paths need, and materializing the coordinate
    action would dominate the runtime.
    """

    def __init__(
        self,
        algebra: MatrixAlgebra,
        *,
        matrix: np.ndarray | None = None,
        inverse_matrix: np.ndarray | None = None,
        inner_unitary: np.ndarray | None = None,
        name: str | None = None,
        tol: Tolerance | None = None,
        validate: bool = True,
    ):
        if matrix is None and inner_unitary is None:
            raise ValueError("need a coordinate matrix or an implementing unitary")
        self.algebra = algebra
        self.tol = tol or algebra.tol
        self.name = name
        self._matrix = None if matrix is None else np.asarray(matrix, dtype=np.complex128)
        self._inverse = (
            None if inverse_matrix is None else np.asarray(inverse_matrix, dtype=np.complex128)
        )
        self.inner_unitary = (
            None if inner_unitary is None else np.asarray(inner_unitary, dtype=np.complex128)
        )
        n = algebra.n_basis
        if self._matrix is not None and self._matrix.shape != (n, n):
            raise DimensionMismatch(f"coordinate matrix must be {n} x {n}")
        if validate:
            report = self.validate()
            if not report.passed:
                raise InvalidAutomorphism(
                    "coordinate map fails the *-automorphism axioms:\n" + str(report)
                )

    # -- lazy coordinate action ------------------------------------------

    def _conjugation_matrix(self, u: np.ndarray) -> np.ndarray:
        alg = self.algebra
        n, d = alg.n_basis, alg.ambient_dim
        out = np.empty((n, n), dtype=np.complex128)
        uh = u.conj().T
        for lo, hi in _chunks(n, max(1, _CHUNK_ENTRIES // (d * d))):
            conj = np.einsum("ab,ibc,cd->iad", u, alg.basis[lo:hi], uh, optimize=True)
            out[:, lo:hi] = alg.coords_many(conj).T
        return out

    @property
    def matrix(self) -> np.ndarray:
        if self._matrix is None:
            self._matrix = self._conjugation_matrix(self.inner_unitary)
        return self._matrix

    @property
    def inverse_matrix(self) -> np.ndarray:
        if self._inverse is None:
            if self.inner_unitary is not None:
                self._inverse = self._conjugation_matrix(self.inner_unitary.conj().T)
            else:
                self._inverse = np.linalg.inv(self.matrix)
        return self._inverse

    # -- action ------------------------------------------------------------

    def apply(self, x):
        """Image of an element (AlgebraElement or coefficient vector)."""
        if isinstance(x, AlgebraElement):
            if x.algebra is not self.algebra:
                self.algebra.require_same(x.algebra)
            return AlgebraElement(self.algebra, self.matrix @ x.coeffs)
        x = np.asarray(x, dtype=np.complex128)
        if x.shape != (self.algebra.n_basis,):
            raise DimensionMismatch("coefficient length does not match the algebra")
        return self.matrix @ x

    def apply_ambient(self, m: np.ndarray) -> np.ndarray:
        """Image of an ambient matrix in the algebra (conjugation fast path)."""
        if self.inner_unitary is not None:
            return self.inner_unitary @ m @ self.inner_unitary.conj().T
        return self.algebra.matrix(self.matrix @ self.algebra.coords(m))

    def compose(self, other: "Automorphism") -> "Automorphism":
        """self after other (acts as self(other(A)))."""
        self.algebra.require_same(other.algebra)
        inner = None
        if self.inner_unitary is not None and other.inner_unitary is not None:
            inner = self.inner_unitary @ other.inner_unitary
        return Automorphism(
            self.algebra,
            matrix=self.matrix @ other.matrix,
            inverse_matrix=other.inverse_matrix @ self.inverse_matrix,
            inner_unitary=inner,
            tol=self.tol,
            validate=False,
        )

    def inverted(self) -> "Automorphism":
        inner = None if self.inner_unitary is None else self.inner_unitary.conj().T
        name = None if self.name is None else f"{self.name}^-1"
        if self._matrix is None and self._inverse is None and inner is not None:
            # keep conjugation-built maps lazy
            return Automorphism(self.algebra, inner_unitary=inner, name=name, tol=self.tol, validate=False)
        return Automorphism(
            self.algebra,
            matrix=self.inverse_matrix,
            inverse_matrix=self.matrix,
            inner_unitary=inner,
            name=name,
            tol=self.tol,
            validate=False,
        )

    # -- validation ----------------------------------------------------------

    def validate(self) -> ValidationReport:
        """Measure bijectivity, multiplicativity and *-preservation.

        Runs exhaustively over basis pairs when the flop estimate allows;
        otherwise uses the generating-set reduction (products of generators
        with every basis element cover all pairs by induction) and, for
        conjugation-built maps, the unitarity certificate of the implementing
        unitary.  The report records the strategy.
        """
        report = ValidationReport()
        alg = self.algebra
        n, d = alg.n_basis, alg.ambient_dim
        tol = self.tol

        if self.inner_unitary is not None:
            u = self.inner_unitary
            report.add("inner_unitary_defect", max_abs(u.conj().T @ u - np.eye(d)), tol.abs)
            _, resid = alg.membership(u)
            report.add("inner_unitary_membership", resid, tol.abs)

        big = n * n * d * d > _WORK_CAP

        if big and self.inner_unitary is not None and self._matrix is None:
            # conjugation by a certified unitary element: bijectivity,
            # multiplicativity and *-preservation are structural; confirm on
            # a deterministic sample without materializing the (N, N) action
            idx = np.unique(np.linspace(0, n - 1, 48).astype(int))
            sample = alg.basis[idx]
            u = self.inner_unitary
            images = np.einsum("ab,ibc,cd->iad", u, sample, u.conj().T, optimize=True)
            xs = alg.coords_many(images)
            report.add("image_in_algebra", max_abs(images - alg.matrices(xs)), tol.abs)
            prod = images[0] @ images[-1]
            direct = u @ (sample[0] @ sample[-1]) @ u.conj().T
            report.add("multiplicativity", max_abs(prod - direct), tol.abs)
            adj = np.einsum("ab,ibc,cd->iad", u, sample.conj().transpose(0, 2, 1), u.conj().T, optimize=True)
            report.add("star_preservation", max_abs(adj - images.conj().transpose(0, 2, 1)), tol.abs)
            report.context["strategy"] = "inner_certificate"
            return report

        a = self.matrix
        report.add("bijectivity", max_abs(a @ self.inverse_matrix - np.eye(n)), tol.abs)
        report.add("unital", max_abs(a[:, 0] - np.eye(n)[:, 0]), tol.abs)

        images = alg.matrices(a.T)  # images[i] = alpha(E_i) as a matrix

        # *-preservation: coords(alpha(E_i)^dagger) == alpha(coords(E_i^dagger))
        if n * n * d * d <= _WORK_CAP:
            lhs = alg.coords_many(images.conj().transpose(0, 2, 1))
            rhs = (a @ alg.adjoint_matrix).T
            report.add("star_preservation", max_abs(lhs - rhs), tol.abs)
            report.context["star_strategy"] = "exhaustive"
        else:
            idx = np.unique(np.linspace(0, n - 1, 128).astype(int))
            lhs = alg.coords_many(images[idx].conj().transpose(0, 2, 1))
            rhs = np.stack([self.apply(alg.adjoint_coords(np.eye(n)[i])) for i in idx])
            report.add("star_preservation", max_abs(lhs - rhs), tol.abs)
            report.context["star_strategy"] = "sampled"

        resid, strategy = self._multiplicativity_residual(images)
        report.add("multiplicativity", resid, tol.abs)
        report.context["multiplicativity_strategy"] = strategy
        return report

    def _multiplicativity_for_left(self, left_mats: np.ndarray, basis_images: np.ndarray) -> float:
        """Residual of alpha(L E_j) == alpha(L) alpha(E_j) over all j, L in left_mats."""
        alg = self.algebra
        d = alg.ambient_dim
        left_images = alg.matrices((self.matrix @ alg.coords_many(left_mats).T).T)
        worst = 0.0
        n = alg.n_basis
        per_chunk = max(1, _CHUNK_ENTRIES // max(n * d * d, 1))
        for lo, hi in _chunks(left_mats.shape[0], per_chunk):
            lhs = np.einsum("iab,jbc->ijac", left_images[lo:hi], basis_images)
            prods = np.einsum("iab,jbc->ijac", left_mats[lo:hi], alg.basis)
            prods = prods.reshape(-1, d, d)
            if self.inner_unitary is not None:
                u = self.inner_unitary
                rhs = np.einsum("ab,ibc,cd->iad", u, prods, u.conj().T, optimize=True)
            else:
                xs = alg.coords_many(prods)
                rhs = alg.matrices(xs @ self.matrix.T)
            worst = max(worst, max_abs(lhs.reshape(-1, d, d) - rhs))
        return worst

    def _multiplicativity_residual(self, basis_images: np.ndarray) -> tuple[float, str]:
        """Exhaustive over basis pairs when affordable; otherwise exact reduction
        to (generator, basis) pairs: multiplicativity on those covers all pairs
        by induction on generator words, given linearity."""
        alg = self.algebra
        n, d = alg.n_basis, alg.ambient_dim
        per_left = n * (d**3 + n * d * d)
        if n * per_left <= _WORK_CAP:
            return self._multiplicativity_for_left(alg.basis, basis_images), "exhaustive"
        if alg.generators and 2 * len(alg.generators) * per_left <= 8 * _WORK_CAP:
            gens = np.stack(list(alg.generators))
            gens = np.concatenate([gens, gens.conj().transpose(0, 2, 1)])
            return self._multiplicativity_for_left(gens, basis_images), "generator_reduced"
        budget = max(4, int(_WORK_CAP / per_left))
        idx = np.unique(np.linspace(0, n - 1, budget).astype(int))
        return self._multiplicativity_for_left(alg.basis[idx], basis_images), "sampled"


def identity_automorphism(algebra: MatrixAlgebra) -> Automorphism:
    n = algebra.n_basis
    return Automorphism(
        algebra,
        matrix=np.eye(n, dtype=np.complex128),
        inverse_matrix=np.eye(n, dtype=np.complex128),
        inner_unitary=np.eye(algebra.ambient_dim, dtype=np.complex128),
        name="identity",
        validate=False,
    )


def inner_automorphism(algebra: MatrixAlgebra, u, tol: Tolerance | None = None) -> Automorphism:
    """Automorphism A -> u A u* for a unitary u inside the algebra."""
    tol = tol or algebra.tol
    if isinstance(u, AlgebraElement):
        u = u.matrix()
    u = as_matrix(u)
    d = algebra.ambient_dim
    if u.shape != (d, d):
        raise DimensionMismatch(f"unitary must be {d} x {d}, got {u.shape}")
    defect = max_abs(u.conj().T @ u - np.eye(d))
    if defect > tol.abs:
        raise NotUnitary(f"conjugator is not unitary (defect {defect:.3e})")
    _, resid = algebra.membership(u)
    if resid > tol.abs * 10:
        raise NotInAlgebra(f"conjugator is not in the algebra (residual {resid:.3e})")
    return Automorphism(algebra, inner_unitary=u, tol=tol, name="inner")


def block_swap_automorphism(algebra: MatrixAlgebra, tol: Tolerance | None = None) -> Automorphism:
    """Conjugation by the ambient block swap [[0, I], [I, 0]].

    This is an automorphism of any algebra preserved by the swap; for block
    algebras it is outer (the swap itself is not an algebra element), which
    is exactly what makes it breakable.
    """
    tol = tol or algebra.tol
    d = algebra.ambient_dim
    if d % 2 != 0:
        raise DimensionMismatch("block swap needs even ambient dimension")
    half = d // 2
    swap = np.zeros((d, d), dtype=np.complex128)
    swap[:half, half:] = np.eye(half)
    swap[half:, :half] = np.eye(half)

    conj = np.einsum("ab,ibc,cd->iad", swap, algebra.basis, swap.conj().T, optimize=True)
    xs = algebra.coords_many(conj)
    resid = max_abs(conj - algebra.matrices(xs))
    if resid > tol.abs * 10:
        raise NotInAlgebra(f"block swap does not preserve the algebra (residual {resid:.3e})")
    matrix = xs.T.copy()

    _, member_resid = algebra.membership(swap)
    inner = swap if member_resid <= tol.abs * 10 else None
    return Automorphism(
        algebra,
        matrix=matrix,
        inverse_matrix=matrix.copy(),  # the swap is an involution
        inner_unitary=inner,
        name="swap_blocks",
        tol=tol,
    )


def random_inner_automorphism(
    algebra: MatrixAlgebra, rng: np.random.Generator
) -> Automorphism:
    """Inner automorphism from exp(iH) for a random Hermitian algebra element."""
    n = algebra.n_basis
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    m = algebra.matrix(x)
    h = (m + m.conj().T) / 2.0
    w, v = np.linalg.eigh(h)
    u = (v * np.exp(1j * w)) @ v.conj().T
    return inner_automorphism(algebra, u)


def pushforward_state(state: State, alpha: Automorphism) -> State:
    """The symmetry-transformed state omega o alpha^-1.

    For conjugation-built automorphisms the representer transforms directly
    (R -> u R u*), which avoids materializing the coordinate action on large
    algebras.  The result is machine-checked against the state axioms.
    """
    alg = state.algebra
    alpha.algebra.require_same(alg)
    if alpha.inner_unitary is not None:
        u = alpha.inner_unitary
        rho = (u @ state.representer @ u.conj().T).conj().T
        values = np.einsum("ab,iba->i", rho, alg.basis)
    else:
        values = state.values @ alpha.inverse_matrix
    report = check_state(alg, values, alpha.tol)
    if not report.passed:
        raise InvalidState("pushforward broke the state axioms:\n" + str(report))
    return State(alg, values)
