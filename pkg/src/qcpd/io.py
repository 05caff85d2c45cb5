"""Binary file formats for tensors (QT1) and CPD factor bundles (QF1).

QT1: ``b"QTN1"``, u8 order D, D x u64 dims, then the qa, qb, qc, qd planes
as float64, each in column-major (first index fastest) order.

QF1: ``b"QFB1"``, u64 N1, N2, N3, F, then A (four planes), B (one plane),
C (four planes), float64 column-major. All integers and floats little-endian.
"""
from __future__ import annotations

import os
import struct

import numpy as np

from .models import CpdFactors
from .qmatrix import QMatrix
from .qtensor import QTensor

__all__ = ["FormatError", "save_tensor", "load_tensor", "save_factors", "load_factors",
           "tensor_to_bytes", "tensor_from_bytes", "factors_to_bytes", "factors_from_bytes"]

TENSOR_MAGIC = b"QTN1"
FACTORS_MAGIC = b"QFB1"
_F64 = np.dtype("<f8")


class FormatError(ValueError):
    """Malformed or truncated binary file."""


def _planes(data: np.ndarray) -> bytes:
    return b"".join(np.asarray(data[..., k], dtype=_F64).tobytes(order="F") for k in range(4))


def _read_planes(buf: memoryview, offset: int, shape) -> tuple[np.ndarray, int]:
    n = int(np.prod(shape))
    parts = []
    for _ in range(4):
        arr, offset = _read_plane(buf, offset, shape, n)
        parts.append(arr)
    return np.stack(parts, axis=-1), offset


def _read_plane(buf, offset, shape, n=None):
    n = int(np.prod(shape)) if n is None else n
    end = offset + 8 * n
    if end > len(buf):
        raise FormatError("file truncated")
    arr = np.frombuffer(buf[offset:end], dtype=_F64).reshape(shape, order="F")
    return arr.astype(float), end


def tensor_to_bytes(T: QTensor) -> bytes:
    dims = T.dims
    head = TENSOR_MAGIC + struct.pack("<B", len(dims)) + struct.pack(f"<{len(dims)}Q", *dims)
    return head + _planes(T.data)


def tensor_from_bytes(raw: bytes) -> QTensor:
    buf = memoryview(raw)
    if bytes(buf[:4]) != TENSOR_MAGIC:
        raise FormatError("not a QT1 tensor file (bad magic)")
    if len(buf) < 5:
        raise FormatError("file truncated")
    order = buf[4]
    off = 5 + 8 * order
    if len(buf) < off:
        raise FormatError("file truncated")
    dims = struct.unpack(f"<{order}Q", buf[5:off])
    data, end = _read_planes(buf, off, dims)
    if end != len(buf):
        raise FormatError("trailing bytes after tensor data")
    return QTensor(data)


def factors_to_bytes(f: CpdFactors) -> bytes:
    N1, N2, N3 = f.dims
    head = FACTORS_MAGIC + struct.pack("<4Q", N1, N2, N3, f.rank)
    return (head + _planes(f.A.data) + np.asarray(f.B, dtype=_F64).tobytes(order="F")
            + _planes(f.C.data))


def factors_from_bytes(raw: bytes) -> CpdFactors:
    buf = memoryview(raw)
    if bytes(buf[:4]) != FACTORS_MAGIC:
        raise FormatError("not a QF1 factor bundle (bad magic)")
    if len(buf) < 36:
        raise FormatError("file truncated")
    N1, N2, N3, F = struct.unpack("<4Q", buf[4:36])
    A, off = _read_planes(buf, 36, (N1, F))
    B, off = _read_plane(buf, off, (N2, F))
    C, off = _read_planes(buf, off, (N3, F))
    if off != len(buf):
        raise FormatError("trailing bytes after factor data")
    return CpdFactors(QMatrix(A), B, QMatrix(C))


def save_tensor(path: str | os.PathLike, T: QTensor) -> None:
    with open(path, "wb") as fh:
        fh.write(tensor_to_bytes(T))


def load_tensor(path: str | os.PathLike) -> QTensor:
    with open(path, "rb") as fh:
        return tensor_from_bytes(fh.read())


def save_factors(path: str | os.PathLike, f: CpdFactors) -> None:
    with open(path, "wb") as fh:
        fh.write(factors_to_bytes(f))


def load_factors(path: str | os.PathLike) -> CpdFactors:
    with open(path, "rb") as fh:
        return factors_from_bytes(fh.read())
