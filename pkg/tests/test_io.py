import struct

import numpy as np
import pytest

from qcpd.io import (FormatError, factors_from_bytes, factors_to_bytes, load_factors,
                     load_tensor, save_factors, save_tensor, tensor_from_bytes, tensor_to_bytes)
from qcpd.qtensor import QTensor

from conftest import random_factors


@pytest.mark.parametrize("dims", [(2, 3, 4), (1, 1, 1), (2, 2, 3, 2)])
def test_tensor_round_trip_is_bit_exact(tmp_path, rng, dims):
    T = QTensor.random(dims, rng)
    save_tensor(tmp_path / "t.qt1", T)
    assert np.array_equal(load_tensor(tmp_path / "t.qt1").data, T.data)


def test_tensor_layout():
    # 1x1x2 tensor: planes are qa, qb, qc, qd with the first index fastest
    data = np.arange(8.0).reshape(1, 1, 2, 4)
    raw = tensor_to_bytes(QTensor(data))
    assert raw[:4] == b"QTN1" and raw[4] == 3
    assert struct.unpack("<3Q", raw[5:29]) == (1, 1, 2)
    assert np.frombuffer(raw[29:], "<f8").tolist() == [0, 4, 1, 5, 2, 6, 3, 7]
    assert len(raw) == 29 + 8 * 8


def test_factor_round_trip(tmp_path, rng):
    f = random_factors(rng)
    save_factors(tmp_path / "f.qf1", f)
    g = load_factors(tmp_path / "f.qf1")
    assert g.A == f.A and g.C == f.C and np.array_equal(g.B, f.B)
    raw = factors_to_bytes(f)
    N1, N2, N3 = f.dims
    assert raw[:4] == b"QFB1"
    assert len(raw) == 36 + 8 * (4 * N1 * 3 + N2 * 3 + 4 * N3 * 3)


def test_bad_magic(rng):
    raw = tensor_to_bytes(QTensor.random((2, 2, 2), rng))
    with pytest.raises(FormatError, match="magic"):
        tensor_from_bytes(b"XXXX" + raw[4:])
    with pytest.raises(FormatError, match="magic"):
        factors_from_bytes(raw)


def test_truncation_and_trailing_bytes(rng):
    raw = tensor_to_bytes(QTensor.random((2, 2, 2), rng))
    for cut in (3, 4, 10, len(raw) - 1):
        with pytest.raises(FormatError):
            tensor_from_bytes(raw[:cut])
    with pytest.raises(FormatError, match="trailing"):
        tensor_from_bytes(raw + b"\0")
    fraw = factors_to_bytes(random_factors(rng))
    for cut in (20, len(fraw) - 8):
        with pytest.raises(FormatError):
            factors_from_bytes(fraw[:cut])
    with pytest.raises(FormatError, match="trailing"):
        factors_from_bytes(fraw + b"\0" * 8)


def test_missing_file(tmp_path):
    with pytest.raises(OSError):
        load_tensor(tmp_path / "nope.qt1")
