import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gnslab.errors import NotHermitian, Singular
from gnslab.numerics import (
    DEFAULT_TOL,
    Tolerance,
    hermitian_eig,
    kron,
    max_abs,
    null_space,
    polar_unitary,
)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def random_hermitian(rng, n):
    m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (m + m.conj().T) / 2


def test_tolerance_defaults_and_validation():
    tol = Tolerance()
    assert tol.abs == 1e-10 and tol.rel == 1e-10
    with pytest.raises(ValueError):
        Tolerance(abs=0.0)
    with pytest.raises(ValueError):
        Tolerance(rel=-1e-3)


def test_hermitian_eig_identity():
    w, _ = hermitian_eig(np.eye(2))
    assert np.allclose(w, [1.0, 1.0])


def test_hermitian_eig_descending_diagonal():
    w, v = hermitian_eig(np.diag([3.0, 1.0]))
    assert np.allclose(w, [3.0, 1.0])
    # eigenvectors are the standard basis up to phase
    assert abs(abs(v[0, 0]) - 1.0) < 1e-12
    assert abs(abs(v[1, 1]) - 1.0) < 1e-12


def test_hermitian_eig_pauli_x():
    # hand diagonalization: det(sx - t I) = t^2 - 1, eigenvectors (1, +-1)/sqrt(2)
    w, v = hermitian_eig(SX)
    assert np.allclose(w, [1.0, -1.0])
    plus = np.array([1, 1]) / np.sqrt(2)
    minus = np.array([1, -1]) / np.sqrt(2)
    assert abs(abs(plus.conj() @ v[:, 0]) - 1.0) < 1e-12
    assert abs(abs(minus.conj() @ v[:, 1]) - 1.0) < 1e-12


def test_hermitian_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_hermitian_eig_reconstruction():
    rng = np.random.default_rng(7)
    for n in (2, 5, 17):
        m = random_hermitian(rng, n)
        w, v = hermitian_eig(m)
        assert max_abs((v * w) @ v.conj().T - m) < 1e-9
        assert max_abs(v.conj().T @ v - np.eye(n)) < 1e-9


def test_null_space_zero_matrix_is_everything():
    ns = null_space(np.zeros((2, 2)))
    assert ns.shape == (2, 2)
    assert max_abs(ns.conj().T @ ns - np.eye(2)) < 1e-12


def test_null_space_identity_is_empty():
    assert null_space(np.eye(3)).shape == (3, 0)


def test_null_space_rank_one():
    # [[1,1],[1,1]] has rank 1 by inspection; kernel spanned by (1,-1)/sqrt(2)
    ns = null_space(np.ones((2, 2)))
    assert ns.shape == (2, 1)
    expected = np.array([1, -1]) / np.sqrt(2)
    assert abs(abs(expected.conj() @ ns[:, 0]) - 1.0) < 1e-12


def test_null_space_residual_bound():
    rng = np.random.default_rng(3)
    m = rng.standard_normal((5, 7)) + 1j * rng.standard_normal((5, 7))
    ns = null_space(m)
    assert ns.shape == (7, 2)
    smax = np.linalg.svd(m, compute_uv=False)[0]
    assert max_abs(m @ ns) <= 1e-10 * smax + 1e-14


def test_null_space_joins_row_space_orthonormally():
    rng = np.random.default_rng(11)
    m = rng.standard_normal((3, 6)) + 1j * rng.standard_normal((3, 6))
    ns = null_space(m)
    # row space basis from the SVD
    _, _, vh = np.linalg.svd(m)
    rows = vh[:3].conj().T
    joined = np.hstack([rows, ns])
    assert max_abs(joined.conj().T @ joined - np.eye(6)) < 1e-9


def test_polar_unitary_of_unitary_is_itself():
    rng = np.random.default_rng(5)
    q, _ = np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
    assert max_abs(polar_unitary(q) - q) < 1e-12


def test_polar_unitary_positive_input_gives_identity():
    assert max_abs(polar_unitary(np.diag([2.0, 3.0])) - np.eye(2)) < 1e-12


def test_polar_unitary_scaled_rotation():
    # polar factor of 2 * R(90deg) is R(90deg): the scale is absorbed into P
    rot = np.array([[0.0, -1.0], [1.0, 0.0]])
    assert max_abs(polar_unitary(2.0 * rot) - rot) < 1e-12


def test_polar_unitary_reconstruction():
    rng = np.random.default_rng(13)
    m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    u = polar_unitary(m)
    assert max_abs(u.conj().T @ u - np.eye(4)) < 1e-9
    p = u.conj().T @ m  # positive part
    assert max_abs(p - p.conj().T) < 1e-9
    assert np.linalg.eigvalsh((p + p.conj().T) / 2).min() > -1e-9
    assert max_abs(u @ p - m) < 1e-9


def test_polar_unitary_rejects_singular():
    with pytest.raises(Singular):
        polar_unitary(np.diag([1.0, 0.0]))


def test_kron_identities():
    assert np.allclose(kron(np.eye(2), np.eye(2)), np.eye(4))
    # four sign products enumerated by hand
    assert np.allclose(kron(SZ, SZ), np.diag([1, -1, -1, 1]))


def test_kron_block_selection():
    m = np.array([[1.0, 2.0], [3.0, 4.0]])
    e11 = np.array([[1.0, 0.0], [0.0, 0.0]])
    out = kron(e11, m)
    assert np.allclose(out[:2, :2], m)
    assert max_abs(out[2:, :]) == 0.0 and max_abs(out[:, 2:]) == 0.0


def test_kron_mixed_product_property():
    rng = np.random.default_rng(17)
    a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    b = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    x = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    y = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    assert max_abs(kron(a, b) @ np.kron(x, y) - np.kron(a @ x, b @ y)) < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=1, max_value=3), st.integers(min_value=1, max_value=3), st.integers(0, 2**31 - 1))
def test_kron_associativity(da, db, seed):
    rng = np.random.default_rng(seed)
    mats = [
        rng.uniform(-1, 1, size=(d, d)) + 1j * rng.uniform(-1, 1, size=(d, d))
        for d in (da, db, 2)
    ]
    a, b, c = mats
    assert max_abs(kron(kron(a, b), c) - kron(a, kron(b, c))) <= 1e-12
