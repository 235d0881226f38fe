import numpy as np
import pytest

from gnslab.algebra import full_matrix_algebra, make_algebra

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def block_diag(a, b):
    d = a.shape[0] + b.shape[0]
    out = np.zeros((d, d), dtype=complex)
    out[: a.shape[0], : a.shape[0]] = a
    out[a.shape[0] :, a.shape[0] :] = b
    return out


@pytest.fixture(scope="session")
def diag2():
    """The diagonal algebra C^2 inside M_2 (N = 2)."""
    return make_algebra(2, [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])


@pytest.fixture(scope="session")
def m2():
    """All of M_2, generated by two Paulis (N = 4)."""
    return make_algebra(2, [SX, SZ])


@pytest.fixture(scope="session")
def block2():
    """M_2 + M_2 block-diagonal inside M_4 (N = 8)."""
    z = np.zeros((2, 2))
    gens = [block_diag(SX, z), block_diag(SZ, z), block_diag(z, SX), block_diag(z, SZ)]
    return make_algebra(4, gens)


@pytest.fixture(scope="session")
def m4():
    """All of M_4 = M_2 (x) M_2 (N = 16)."""
    return full_matrix_algebra(4)
