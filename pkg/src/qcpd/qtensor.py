"""Dense order-D quaternion tensors.

Modes are numbered from 1 to D as in the multilinear algebra literature;
array indices (slices, entries) are ordinary 0-based Python indices.
Mode 1 transforms act by direct (left) multiplication, central modes accept
real matrices only and mode D acts by reverse (right) multiplication.
"""
from __future__ import annotations

import enum

import numpy as np

from .errors import DomainError, ShapeError
from .qmatrix import QMatrix, as_qmatrix
from .quaternion import Quaternion, from_complex_pair, to_complex_pair

__all__ = [
    "QTensor",
    "ModeRole",
    "mode_role",
    "unfold",
    "fold",
    "mode_product",
    "slice_",
    "change_of_basis",
]


class QTensor:
    """Quaternion array of order ``D >= 3``; data shape ``dims + (4,)``."""

    __slots__ = ("data",)

    def __init__(self, data):
        data = np.asarray(data, dtype=float)
        if data.ndim < 4 or data.shape[-1] != 4:
            raise ShapeError(f"expected array of shape dims + (4,) with D >= 3, got {data.shape}")
        self.data = data

    @classmethod
    def from_complex(cls, z1, z2=None) -> "QTensor":
        z1 = np.asarray(z1, dtype=complex)
        z2 = np.zeros_like(z1) if z2 is None else np.asarray(z2, dtype=complex)
        if z1.shape != z2.shape:
            raise ShapeError("Cayley-Dickson parts must have equal shapes")
        return cls(from_complex_pair(z1, z2))

    @classmethod
    def from_real(cls, x) -> "QTensor":
        x = np.asarray(x, dtype=float)
        return cls(np.stack([x, np.zeros_like(x), np.zeros_like(x), np.zeros_like(x)], -1))

    @classmethod
    def random(cls, dims, rng=None) -> "QTensor":
        rng = np.random.default_rng(rng)
        return cls(rng.standard_normal(tuple(dims) + (4,)))

    @classmethod
    def zeros(cls, dims) -> "QTensor":
        return cls(np.zeros(tuple(dims) + (4,)))

    @property
    def dims(self) -> tuple[int, ...]:
        return self.data.shape[:-1]

    @property
    def order(self) -> int:
        return self.data.ndim - 1

    def cd(self) -> tuple[np.ndarray, np.ndarray]:
        return to_complex_pair(self.data)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.data ** 2)))

    def conj(self) -> "QTensor":
        out = self.data.copy()
        out[..., 1:] *= -1
        return QTensor(out)

    def __getitem__(self, idx) -> Quaternion:
        return Quaternion.from_array(self.data[idx])

    def __add__(self, other):
        if not isinstance(other, QTensor) or other.dims != self.dims:
            raise ShapeError("tensor addition needs equal dims")
        return QTensor(self.data + other.data)

    def __sub__(self, other):
        if not isinstance(other, QTensor) or other.dims != self.dims:
            raise ShapeError("tensor subtraction needs equal dims")
        return QTensor(self.data - other.data)

    def __mul__(self, s):
        if isinstance(s, (int, float, np.floating, np.integer)):
            return QTensor(self.data * float(s))
        return NotImplemented

    __rmul__ = __mul__

    def allclose(self, other: "QTensor", atol: float = 1e-12) -> bool:
        return self.dims == other.dims and bool(
            np.max(np.abs(self.data - other.data), initial=0.0) <= atol)

    def __eq__(self, other):
        if not isinstance(other, QTensor):
            return NotImplemented
        return self.dims == other.dims and bool(np.array_equal(self.data, other.data))

    __hash__ = None

    def __repr__(self):
        return f"QTensor(dims={self.dims})"


class ModeRole(enum.Enum):
    FIRST_DIRECT = "first_direct"
    CENTRAL_REAL = "central_real"
    LAST_REVERSE = "last_reverse"


def _check_mode(order: int, mode: int):
    if not 1 <= mode <= order:
        raise ShapeError(f"mode must be in 1..{order}, got {mode}")


def mode_role(order: int, mode: int) -> ModeRole:
    _check_mode(order, mode)
    if mode == 1:
        return ModeRole.FIRST_DIRECT
    if mode == order:
        return ModeRole.LAST_REVERSE
    return ModeRole.CENTRAL_REAL


def unfold(T: QTensor, mode: int) -> QMatrix:
    """Mode-``mode`` unfolding, ``N_d x prod(other dims)``, Kolda-Bader column order."""
    _check_mode(T.order, mode)
    moved = np.moveaxis(T.data, mode - 1, 0)
    nd = moved.shape[0]
    # first remaining index varies fastest
    cols = np.stack([moved[..., k].reshape(nd, -1, order="F") for k in range(4)], axis=-1)
    return QMatrix(cols)


def fold(M: QMatrix, mode: int, dims) -> QTensor:
    """Inverse of :func:`unfold`."""
    dims = tuple(int(d) for d in dims)
    if len(dims) < 3:
        raise ShapeError("tensors have order >= 3")
    _check_mode(len(dims), mode)
    M = as_qmatrix(M)
    rest = dims[:mode - 1] + dims[mode:]
    if M.shape != (dims[mode - 1], int(np.prod(rest))):
        raise ShapeError(f"matrix shape {M.shape} inconsistent with dims {dims} at mode {mode}")
    parts = [M.data[..., k].reshape((dims[mode - 1],) + rest, order="F") for k in range(4)]
    return QTensor(np.moveaxis(np.stack(parts, axis=-1), 0, mode - 1))


def _left_contract(U: QMatrix, T: QTensor, axis: int) -> QTensor:
    # out[.., j, ..] = sum_i u_ji T[.., i, ..]
    u1, u2 = U.cd()
    t1, t2 = T.cd()

    def contract(u, t):
        return np.moveaxis(np.tensordot(u, t, axes=([1], [axis])), 0, axis)

    return QTensor.from_complex(contract(u1, t1) - contract(u2, t2.conj()),
                                contract(u1, t2) + contract(u2, t1.conj()))


def _right_contract(T: QTensor, U: QMatrix, axis: int) -> QTensor:
    # out[.., j, ..] = sum_i T[.., i, ..] u_ji
    u1, u2 = U.cd()
    t1, t2 = T.cd()

    def contract(t, u):
        return np.moveaxis(np.tensordot(t, u, axes=([axis], [1])), -1, axis)

    return QTensor.from_complex(contract(t1, u1) - contract(t2, u2.conj()),
                                contract(t1, u2) + contract(t2, u1.conj()))


def mode_product(T: QTensor, mode: int, U) -> QTensor:
    """n-mode product of ``T`` with ``U`` (``J x N_mode``).

    Mode 1 multiplies fibers on the left, mode D on the right, and central
    modes require an exactly real ``U``.
    """
    role = mode_role(T.order, mode)
    axis = mode - 1
    if role is ModeRole.CENTRAL_REAL:
        if isinstance(U, QMatrix):
            if not U.is_real():
                raise DomainError(f"mode {mode} is central and only accepts real matrices")
            U = U.re
        U = np.asarray(U)
        if np.iscomplexobj(U) or U.ndim != 2:
            raise DomainError(f"mode {mode} is central and only accepts real matrices")
        if U.shape[1] != T.dims[axis]:
            raise ShapeError(f"matrix has {U.shape[1]} columns, mode {mode} has size {T.dims[axis]}")
        out = np.tensordot(U.astype(float), T.data, axes=([1], [axis]))
        return QTensor(np.moveaxis(out, 0, axis))
    U = as_qmatrix(U)
    if U.cols != T.dims[axis]:
        raise ShapeError(f"matrix has {U.cols} columns, mode {mode} has size {T.dims[axis]}")
    if role is ModeRole.FIRST_DIRECT:
        return _left_contract(U, T, axis)
    return _right_contract(T, U, axis)


_SLICE_AXES = {"horizontal": 0, "lateral": 1, "frontal": 2}


def slice_(T: QTensor, axis: str, index: int) -> QMatrix:
    """Horizontal ``T[i,:,:]``, lateral ``T[:,i,:]`` or frontal ``T[:,:,i]`` slice."""
    if T.order != 3:
        raise ShapeError("slices are defined for third-order tensors only")
    try:
        ax = _SLICE_AXES[axis]
    except KeyError:
        raise ValueError(f"unknown slice axis {axis!r}") from None
    if not 0 <= index < T.dims[ax]:
        raise ShapeError(f"slice index {index} out of range for axis {axis}")
    return QMatrix(np.take(T.data, index, axis=ax))


def change_of_basis(T: QTensor, A1, A_mid, AD) -> QTensor:
    """Apply ``A1`` on mode 1, the real ``A_mid`` matrices on central modes, ``AD`` on mode D."""
    A_mid = list(A_mid)
    if len(A_mid) != T.order - 2:
        raise ShapeError(f"expected {T.order - 2} central matrices, got {len(A_mid)}")
    out = mode_product(T, 1, A1)
    for d, A in enumerate(A_mid, start=2):
        out = mode_product(out, d, A)
    return mode_product(out, T.order, AD)
