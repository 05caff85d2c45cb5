import numpy as np
import pytest

from qcpd.errors import ShapeError, StructureError
from qcpd.qmatrix import (AdjointKind, QMatrix, adjoint, columnwise_permutation, from_adjoint,
                          hadamard, khatri_rao_direct, khatri_rao_reverse, kron_direct,
                          kron_reverse, matmul_direct, matmul_reverse)
from qcpd.quaternion import I, J, K

import oracles

D, R = AdjointKind.DIRECT, AdjointKind.REVERSE


def q1(q):
    return QMatrix.diag([q])


def test_scalar_products_of_i_and_j():
    assert matmul_direct(q1(I), q1(J)) == q1(K)
    assert matmul_reverse(q1(I), q1(J)) == q1(-K)
    assert kron_direct(q1(I), q1(J)) == q1(K)
    assert kron_reverse(q1(I), q1(J)) == q1(-K)


def test_products_match_loop_oracles(rng):
    for _ in range(10):
        A = QMatrix.random(3, 4, rng)
        B = QMatrix.random(4, 2, rng)
        np.testing.assert_allclose(matmul_direct(A, B).data, oracles.matmul_direct(A.data, B.data),
                                   atol=1e-13)
        np.testing.assert_allclose(matmul_reverse(A, B).data,
                                   oracles.matmul_reverse(A.data, B.data), atol=1e-13)
        C = QMatrix.random(2, 3, rng)
        np.testing.assert_allclose(kron_direct(A, C).data, oracles.kron(A.data, C.data),
                                   atol=1e-13)
        np.testing.assert_allclose(kron_reverse(A, C).data,
                                   oracles.kron(A.data, C.data, reverse=True), atol=1e-13)
        E = QMatrix.random(5, 4, rng)
        np.testing.assert_allclose(khatri_rao_direct(A, E).data,
                                   oracles.khatri_rao(A.data, E.data), atol=1e-13)
        np.testing.assert_allclose(khatri_rao_reverse(A, E).data,
                                   oracles.khatri_rao(A.data, E.data, reverse=True), atol=1e-13)
        H = QMatrix.random(3, 4, rng)
        ref = np.array([[oracles.qmul(A.data[i, j], H.data[i, j]) for j in range(4)]
                        for i in range(3)])
        np.testing.assert_allclose(hadamard(A, H).data, ref, atol=1e-13)


def test_real_operand_makes_direct_and_reverse_agree(rng):
    A = QMatrix.random(3, 4, rng)
    B = rng.standard_normal((4, 2))
    assert matmul_direct(A, B).allclose(matmul_reverse(A, B), atol=1e-13)
    Br = rng.standard_normal((2, 3))
    assert kron_direct(A, Br).allclose(kron_reverse(A, Br), atol=1e-13)


def test_transposition_and_conjugation_identities(rng):
    A = QMatrix.random(3, 4, rng)
    B = QMatrix.random(4, 2, rng)
    assert matmul_direct(A, B).T.allclose(matmul_reverse(B.T, A.T), atol=1e-13)
    assert matmul_direct(A, B).conj().allclose(matmul_reverse(A.conj(), B.conj()), atol=1e-13)
    assert matmul_direct(A, B).H.allclose(matmul_direct(B.H, A.H), atol=1e-13)


def test_khatri_rao_of_identities_selects_diagonal():
    I2 = QMatrix.identity(2)
    expected = np.zeros((4, 2))
    expected[0, 0] = expected[3, 1] = 1.0
    assert khatri_rao_direct(I2, I2) == QMatrix.from_real(expected)


def test_shape_errors(rng):
    A = QMatrix.random(3, 4, rng)
    with pytest.raises(ShapeError):
        matmul_direct(A, A)
    with pytest.raises(ShapeError):
        khatri_rao_direct(A, QMatrix.random(3, 2, rng))
    with pytest.raises(ShapeError):
        hadamard(A, A.T)


def test_adjoint_examples():
    np.testing.assert_array_equal(adjoint(q1(J), D), np.array([[0, 1], [-1, 0]]))
    for kind in (D, R):
        np.testing.assert_array_equal(adjoint(QMatrix.identity(3), kind), np.eye(6))


def test_adjoint_homomorphism(rng):
    for _ in range(100):
        m, n, p = rng.integers(1, 6, 3)
        A, B = QMatrix.random(m, n, rng), QMatrix.random(n, p, rng)
        err_d = np.max(np.abs(adjoint(matmul_direct(A, B), D) - adjoint(A, D) @ adjoint(B, D)))
        err_r = np.max(np.abs(adjoint(matmul_reverse(A, B), R) - adjoint(A, R) @ adjoint(B, R)))
        assert err_d < 1e-12 and err_r < 1e-12


def test_adjoint_hermitian_and_transpose_relations(rng):
    A = QMatrix.random(4, 3, rng)
    np.testing.assert_allclose(adjoint(A.H, D), adjoint(A, D).conj().T, atol=1e-15)
    np.testing.assert_allclose(adjoint(A.H, R), adjoint(A, R).conj().T, atol=1e-15)
    np.testing.assert_allclose(adjoint(A, D), adjoint(A.T, R).T, atol=1e-15)
    np.testing.assert_allclose(adjoint(A + A, D), 2 * adjoint(A, D), atol=1e-15)


def test_columnwise_adjoint_blocks_and_permutation(rng):
    A = QMatrix.random(4, 3, rng)
    P = columnwise_permutation(3)
    for full, cw in ((D, AdjointKind.DIRECT_COLUMNWISE), (R, AdjointKind.REVERSE_COLUMNWISE)):
        Xc = adjoint(A, cw)
        assert Xc.shape == (8, 6)
        for n in range(3):
            np.testing.assert_array_equal(Xc[:, 2 * n:2 * n + 2], adjoint(A.column(n), full))
        np.testing.assert_array_equal(adjoint(A, full), Xc @ P)


@pytest.mark.parametrize("kind", list(AdjointKind))
def test_from_adjoint_round_trip(rng, kind):
    A = QMatrix.random(3, 5, rng)
    assert from_adjoint(adjoint(A, kind), kind) == A


def test_from_adjoint_rejects_unstructured(rng):
    X = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    with pytest.raises(StructureError) as info:
        from_adjoint(X, D)
    assert info.value.residual > 1e-3


def test_qmatrix_basics(rng):
    A = QMatrix.random(2, 3, rng)
    assert A.shape == (2, 3) and A[1, 2].to_array().shape == (4,)
    assert np.isclose(A.norm(), np.sqrt(np.sum(A.data ** 2)))
    z1, z2 = A.cd()
    assert QMatrix.from_complex(z1, z2) == A
    assert QMatrix.from_real(np.ones((2, 2))).is_real()
    assert not A.is_real()
    assert (A - A) == QMatrix.zeros(2, 3)
