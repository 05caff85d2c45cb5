"""Dense quaternion matrices, direct/reverse products and complex adjoints.

Matrices are stored as float64 arrays of shape ``(rows, cols, 4)``.
Products are evaluated through the Cayley-Dickson split ``A = A1 + A2 j``
with ``A1, A2`` complex, which turns every quaternion matrix product into
four complex ones.
"""
from __future__ import annotations

import enum

import numpy as np

from .errors import ShapeError, StructureError
from .quaternion import Quaternion, from_complex_pair, hamilton, to_complex_pair

__all__ = [
    "QMatrix",
    "AdjointKind",
    "as_qmatrix",
    "matmul_direct",
    "matmul_reverse",
    "kron_direct",
    "kron_reverse",
    "khatri_rao_direct",
    "khatri_rao_reverse",
    "hadamard",
    "adjoint",
    "from_adjoint",
    "columnwise_permutation",
]


class QMatrix:
    """Dense ``rows x cols`` quaternion matrix."""

    __slots__ = ("data",)

    def __init__(self, data):
        data = np.asarray(data, dtype=float)
        if data.ndim != 3 or data.shape[-1] != 4:
            raise ShapeError(f"expected array of shape (rows, cols, 4), got {data.shape}")
        self.data = data

    # -- construction ------------------------------------------------------
    @classmethod
    def from_components(cls, a, b=None, c=None, d=None) -> "QMatrix":
        a = np.asarray(a, dtype=float)
        if a.ndim != 2:
            raise ShapeError("components must be 2-D")
        parts = [a] + [np.zeros_like(a) if p is None else np.asarray(p, dtype=float)
                       for p in (b, c, d)]
        if any(p.shape != a.shape for p in parts):
            raise ShapeError("component shapes differ")
        return cls(np.stack(parts, axis=-1))

    @classmethod
    def from_complex(cls, z1, z2=None) -> "QMatrix":
        z1 = np.asarray(z1, dtype=complex)
        z2 = np.zeros_like(z1) if z2 is None else np.asarray(z2, dtype=complex)
        if z1.ndim != 2 or z1.shape != z2.shape:
            raise ShapeError("Cayley-Dickson parts must be 2-D with equal shapes")
        return cls(from_complex_pair(z1, z2))

    @classmethod
    def from_real(cls, x) -> "QMatrix":
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        return cls.from_components(x)

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls.from_real(np.eye(n))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "QMatrix":
        return cls(np.zeros((rows, cols, 4)))

    @classmethod
    def random(cls, rows: int, cols: int, rng=None) -> "QMatrix":
        rng = np.random.default_rng(rng)
        return cls(rng.standard_normal((rows, cols, 4)))

    @classmethod
    def diag(cls, entries) -> "QMatrix":
        """Diagonal matrix from a sequence of quaternions or a ``(F, 4)`` array."""
        if isinstance(entries, QMatrix):
            entries = entries.data.reshape(-1, 4)
        arr = np.asarray([q.to_array() if isinstance(q, Quaternion) else q for q in entries],
                         dtype=float)
        if arr.ndim == 1:
            arr = np.stack([arr, np.zeros_like(arr), np.zeros_like(arr), np.zeros_like(arr)], -1)
        n = arr.shape[0]
        out = np.zeros((n, n, 4))
        out[np.arange(n), np.arange(n)] = arr
        return cls(out)

    # -- views ---------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape[0], self.data.shape[1]

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def components(self) -> tuple[np.ndarray, ...]:
        return tuple(self.data[..., k] for k in range(4))

    @property
    def re(self) -> np.ndarray:
        return self.data[..., 0]

    @property
    def z1(self) -> np.ndarray:
        return to_complex_pair(self.data)[0]

    @property
    def z2(self) -> np.ndarray:
        return to_complex_pair(self.data)[1]

    def cd(self) -> tuple[np.ndarray, np.ndarray]:
        return to_complex_pair(self.data)

    @property
    def T(self) -> "QMatrix":
        return QMatrix(self.data.transpose(1, 0, 2))

    def conj(self) -> "QMatrix":
        out = self.data.copy()
        out[..., 1:] *= -1
        return QMatrix(out)

    @property
    def H(self) -> "QMatrix":
        return self.conj().T

    def is_real(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.data[..., 1:]) <= tol))

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.data ** 2)))

    def column(self, n: int) -> "QMatrix":
        return QMatrix(self.data[:, n:n + 1])

    def columns(self, idx) -> "QMatrix":
        return QMatrix(self.data[:, list(idx)])

    def __getitem__(self, key):
        if isinstance(key, tuple) and len(key) == 2 and all(
                isinstance(k, (int, np.integer)) for k in key):
            return Quaternion.from_array(self.data[key])
        sub = self.data[key]
        if sub.ndim != 3:
            raise ShapeError("matrix indexing must keep two axes")
        return QMatrix(sub)

    def copy(self) -> "QMatrix":
        return QMatrix(self.data.copy())

    # -- arithmetic ----------------------------------------------------------
    def __add__(self, other):
        other = as_qmatrix(other)
        _same_shape(self, other)
        return QMatrix(self.data + other.data)

    def __sub__(self, other):
        other = as_qmatrix(other)
        _same_shape(self, other)
        return QMatrix(self.data - other.data)

    def __neg__(self):
        return QMatrix(-self.data)

    def __mul__(self, s):
        if isinstance(s, (int, float, np.floating, np.integer)):
            return QMatrix(self.data * float(s))
        return NotImplemented

    __rmul__ = __mul__

    def allclose(self, other, atol: float = 1e-12) -> bool:
        other = as_qmatrix(other)
        return self.shape == other.shape and bool(np.max(np.abs(self.data - other.data),
                                                         initial=0.0) <= atol)

    def __eq__(self, other):
        if not isinstance(other, QMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.data, other.data))

    __hash__ = None

    def __repr__(self):
        return f"QMatrix(shape={self.shape})"


def as_qmatrix(x) -> QMatrix:
    """Coerce a QMatrix, real 2-D array or ``(M, N, 4)`` array to QMatrix."""
    if isinstance(x, QMatrix):
        return x
    arr = np.asarray(x)
    if np.iscomplexobj(arr):
        raise ShapeError("complex input is ambiguous; use QMatrix.from_complex")
    if arr.ndim == 2:
        return QMatrix.from_real(arr)
    if arr.ndim == 3 and arr.shape[-1] == 4:
        return QMatrix(arr)
    raise ShapeError(f"cannot interpret array of shape {arr.shape} as a quaternion matrix")


def _same_shape(a: QMatrix, b: QMatrix):
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch {a.shape} vs {b.shape}")


def _check_inner(a: QMatrix, b: QMatrix):
    if a.cols != b.rows:
        raise ShapeError(f"inner dimensions differ: {a.shape} x {b.shape}")


def matmul_direct(A, B) -> QMatrix:
    """Direct product, entries ``sum_n a_mn b_np``."""
    A, B = as_qmatrix(A), as_qmatrix(B)
    _check_inner(A, B)
    a1, a2 = A.cd()
    b1, b2 = B.cd()
    # (a1 + a2 j)(b1 + b2 j) = a1 b1 - a2 conj(b2) + (a1 b2 + a2 conj(b1)) j
    return QMatrix.from_complex(a1 @ b1 - a2 @ b2.conj(), a1 @ b2 + a2 @ b1.conj())


def matmul_reverse(A, B) -> QMatrix:
    """Reverse product, entries ``sum_n b_np a_mn``."""
    A, B = as_qmatrix(A), as_qmatrix(B)
    _check_inner(A, B)
    a1, a2 = A.cd()
    b1, b2 = B.cd()
    # (b1 + b2 j)(a1 + a2 j) = b1 a1 - b2 conj(a2) + (b1 a2 + b2 conj(a1)) j
    return QMatrix.from_complex(a1 @ b1 - a2.conj() @ b2, a2 @ b1 + a1.conj() @ b2)


def kron_direct(A, B) -> QMatrix:
    """Blocks ``a_mn * B``."""
    A, B = as_qmatrix(A), as_qmatrix(B)
    (m, n), (p, q) = A.shape, B.shape
    prod = hamilton(A.data[:, None, :, None, :], B.data[None, :, None, :, :])
    return QMatrix(prod.reshape(m * p, n * q, 4))


def kron_reverse(A, B) -> QMatrix:
    """Blocks ``B * a_mn``."""
    A, B = as_qmatrix(A), as_qmatrix(B)
    (m, n), (p, q) = A.shape, B.shape
    prod = hamilton(B.data[None, :, None, :, :], A.data[:, None, :, None, :])
    return QMatrix(prod.reshape(m * p, n * q, 4))


def _check_kr(A: QMatrix, B: QMatrix):
    if A.cols != B.cols:
        raise ShapeError(f"Khatri-Rao needs equal column counts, got {A.cols} and {B.cols}")


def khatri_rao_direct(A, B) -> QMatrix:
    """Column-wise direct Kronecker product."""
    A, B = as_qmatrix(A), as_qmatrix(B)
    _check_kr(A, B)
    prod = hamilton(A.data[:, None, :, :], B.data[None, :, :, :])
    return QMatrix(prod.reshape(A.rows * B.rows, A.cols, 4))


def khatri_rao_reverse(A, B) -> QMatrix:
    """Column-wise reverse Kronecker product."""
    A, B = as_qmatrix(A), as_qmatrix(B)
    _check_kr(A, B)
    prod = hamilton(B.data[None, :, :, :], A.data[:, None, :, :])
    return QMatrix(prod.reshape(A.rows * B.rows, A.cols, 4))


def hadamard(A, B) -> QMatrix:
    A, B = as_qmatrix(A), as_qmatrix(B)
    _same_shape(A, B)
    return QMatrix(hamilton(A.data, B.data))


# ---------------------------------------------------------------------------
# complex adjoints

class AdjointKind(enum.Enum):
    DIRECT = "direct"
    REVERSE = "reverse"
    DIRECT_COLUMNWISE = "direct_columnwise"
    REVERSE_COLUMNWISE = "reverse_columnwise"


def _kind(kind) -> AdjointKind:
    return kind if isinstance(kind, AdjointKind) else AdjointKind(kind)


def adjoint(A, kind=AdjointKind.DIRECT) -> np.ndarray:
    """``2M x 2N`` complex adjoint of a quaternion matrix.

    Direct: ``[[A1, A2], [-conj(A2), conj(A1)]]``.
    Reverse: ``[[A1, -conj(A2)], [A2, conj(A1)]]``.
    Columnwise kinds stack the ``2M x 2`` adjoints of each column side by side.
    """
    A = as_qmatrix(A)
    kind = _kind(kind)
    a1, a2 = A.cd()
    if kind is AdjointKind.DIRECT:
        return np.block([[a1, a2], [-a2.conj(), a1.conj()]])
    if kind is AdjointKind.REVERSE:
        return np.block([[a1, -a2.conj()], [a2, a1.conj()]])
    full = adjoint(A, AdjointKind.DIRECT if kind is AdjointKind.DIRECT_COLUMNWISE
                   else AdjointKind.REVERSE)
    return full @ columnwise_permutation(A.cols).T


def columnwise_permutation(n: int) -> np.ndarray:
    """Permutation ``P`` with ``adjoint(A, DIRECT) = adjoint(A, DIRECT_COLUMNWISE) @ P``.

    Column ``n`` of the full adjoint is column ``2n`` of the columnwise one and
    column ``N + n`` is column ``2n + 1``. The same matrix relates the reverse kinds.
    """
    P = np.zeros((2 * n, 2 * n))
    idx = np.arange(n)
    P[2 * idx, idx] = 1.0
    P[2 * idx + 1, n + idx] = 1.0
    return P


def from_adjoint(X, kind=AdjointKind.DIRECT, tol: float = 1e-10) -> QMatrix:
    """Recover the quaternion matrix from a structured complex adjoint.

    The redundant blocks are averaged; a :class:`StructureError` is raised when
    they disagree by more than ``tol`` relative to ``max(1, max|X|)``.
    """
    X = np.asarray(X, dtype=complex)
    kind = _kind(kind)
    if X.ndim != 2 or X.shape[0] % 2 or X.shape[1] % 2:
        raise ShapeError(f"adjoint must have even dimensions, got {X.shape}")
    m, n = X.shape[0] // 2, X.shape[1] // 2
    if kind in (AdjointKind.DIRECT_COLUMNWISE, AdjointKind.REVERSE_COLUMNWISE):
        X = X @ columnwise_permutation(n)
        kind = (AdjointKind.DIRECT if kind is AdjointKind.DIRECT_COLUMNWISE
                else AdjointKind.REVERSE)
    x11, x12 = X[:m, :n], X[:m, n:]
    x21, x22 = X[m:, :n], X[m:, n:]
    if kind is AdjointKind.DIRECT:
        a1 = 0.5 * (x11 + x22.conj())
        a2 = 0.5 * (x12 - x21.conj())
        res = max(np.max(np.abs(x11 - x22.conj()), initial=0.0),
                  np.max(np.abs(x12 + x21.conj()), initial=0.0))
    else:
        a1 = 0.5 * (x11 + x22.conj())
        a2 = 0.5 * (x21 - x12.conj())
        res = max(np.max(np.abs(x11 - x22.conj()), initial=0.0),
                  np.max(np.abs(x21 + x12.conj()), initial=0.0))
    scale = max(1.0, float(np.max(np.abs(X), initial=0.0)))
    if res > tol * scale:
        raise StructureError(
            f"input lacks {kind.value} adjoint structure (max residual {res:.3e})",
            residual=float(res))
    return QMatrix.from_complex(a1, a2)
