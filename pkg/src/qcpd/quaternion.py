"""Scalar quaternion arithmetic.

A quaternion ``q = qa + i qb + j qc + k qd`` is stored as four float64
components. Array helpers at the bottom of this module operate on numpy
arrays whose last axis holds the four components and are shared by the
matrix and tensor layers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "Quaternion",
    "PolarForm",
    "CayleyDickson",
    "multiply",
    "conjugate",
    "modulus",
    "inverse",
    "to_polar",
    "from_polar",
    "exp_pure",
    "cayley_dickson",
    "from_cayley_dickson",
    "hamilton",
    "to_complex_pair",
    "from_complex_pair",
]


@dataclass(frozen=True)
class Quaternion:
    qa: float = 0.0
    qb: float = 0.0
    qc: float = 0.0
    qd: float = 0.0

    @classmethod
    def from_array(cls, arr) -> "Quaternion":
        a, b, c, d = (float(x) for x in np.asarray(arr, dtype=float).reshape(4))
        return cls(a, b, c, d)

    def to_array(self) -> np.ndarray:
        return np.array([self.qa, self.qb, self.qc, self.qd], dtype=float)

    @property
    def real(self) -> float:
        return self.qa

    @property
    def imag(self) -> "Quaternion":
        return Quaternion(0.0, self.qb, self.qc, self.qd)

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return Quaternion(self.qa + other.qa, self.qb + other.qb,
                          self.qc + other.qc, self.qd + other.qd)

    __radd__ = __add__

    def __neg__(self):
        return Quaternion(-self.qa, -self.qb, -self.qc, -self.qd)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return multiply(self, other)

    def __rmul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return multiply(other, self)

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            return Quaternion(self.qa / other, self.qb / other,
                              self.qc / other, self.qd / other)
        return NotImplemented

    def __abs__(self):
        return modulus(self)

    def conj(self) -> "Quaternion":
        return conjugate(self)

    def inv(self) -> "Quaternion":
        return inverse(self)

    def isclose(self, other, tol: float = 1e-12) -> bool:
        other = _coerce(other)
        return bool(np.max(np.abs(self.to_array() - other.to_array())) <= tol)

    def __repr__(self):
        return f"Quaternion({self.qa!r}, {self.qb!r}, {self.qc!r}, {self.qd!r})"


def _coerce(x):
    if isinstance(x, Quaternion):
        return x
    if isinstance(x, (int, float, np.floating, np.integer)):
        return Quaternion(float(x))
    return NotImplemented


ONE = Quaternion(1.0)
I = Quaternion(0.0, 1.0)
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


def multiply(p: Quaternion, q: Quaternion) -> Quaternion:
    """Hamilton product ``p q``."""
    return Quaternion(
        p.qa * q.qa - p.qb * q.qb - p.qc * q.qc - p.qd * q.qd,
        p.qa * q.qb + p.qb * q.qa + p.qc * q.qd - p.qd * q.qc,
        p.qa * q.qc - p.qb * q.qd + p.qc * q.qa + p.qd * q.qb,
        p.qa * q.qd + p.qb * q.qc - p.qc * q.qb + p.qd * q.qa,
    )


def conjugate(q: Quaternion) -> Quaternion:
    return Quaternion(q.qa, -q.qb, -q.qc, -q.qd)


def modulus(q: Quaternion) -> float:
    return math.sqrt(q.qa * q.qa + q.qb * q.qb + q.qc * q.qc + q.qd * q.qd)


def inverse(q: Quaternion) -> Quaternion:
    n2 = q.qa * q.qa + q.qb * q.qb + q.qc * q.qc + q.qd * q.qd
    if n2 == 0.0:
        raise DomainError("zero quaternion has no inverse")
    return Quaternion(q.qa / n2, -q.qb / n2, -q.qc / n2, -q.qd / n2)


@dataclass(frozen=True)
class PolarForm:
    """``q = modulus * exp(axis_angle)`` with ``axis_angle`` a pure quaternion."""

    modulus: float
    axis_angle: Quaternion


def exp_pure(v: Quaternion) -> Quaternion:
    """Exponential of a pure quaternion ``v = theta * u``: ``cos(theta) + u sin(theta)``."""
    if v.qa != 0.0:
        raise DomainError("exp_pure expects a pure quaternion")
    theta = math.sqrt(v.qb * v.qb + v.qc * v.qc + v.qd * v.qd)
    if theta == 0.0:
        return ONE
    s = math.sin(theta) / theta
    return Quaternion(math.cos(theta), v.qb * s, v.qc * s, v.qd * s)


def to_polar(q: Quaternion) -> PolarForm:
    r = modulus(q)
    if r == 0.0:
        raise DomainError("zero quaternion has no polar form")
    vnorm = math.sqrt(q.qb * q.qb + q.qc * q.qc + q.qd * q.qd)
    if vnorm == 0.0:
        # real axis: negative reals get the fixed axis i
        if q.qa > 0:
            return PolarForm(r, Quaternion())
        return PolarForm(r, Quaternion(0.0, math.pi))
    theta = math.atan2(vnorm, q.qa)
    s = theta / vnorm
    return PolarForm(r, Quaternion(0.0, q.qb * s, q.qc * s, q.qd * s))


def from_polar(p: PolarForm) -> Quaternion:
    if p.modulus < 0:
        raise DomainError("polar modulus must be nonnegative")
    e = exp_pure(p.axis_angle)
    return Quaternion(p.modulus * e.qa, p.modulus * e.qb,
                      p.modulus * e.qc, p.modulus * e.qd)


@dataclass(frozen=True)
class CayleyDickson:
    """``q = z1 + z2 j`` with ``z1, z2`` in the subfield spanned by 1 and i."""

    z1: complex
    z2: complex


def cayley_dickson(q: Quaternion) -> CayleyDickson:
    return CayleyDickson(complex(q.qa, q.qb), complex(q.qc, q.qd))


def from_cayley_dickson(cd: CayleyDickson) -> Quaternion:
    z1, z2 = complex(cd.z1), complex(cd.z2)
    return Quaternion(z1.real, z1.imag, z2.real, z2.imag)


# ---------------------------------------------------------------------------
# component-array helpers (last axis = 4 components)

def hamilton(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Elementwise Hamilton product of broadcastable component arrays."""
    xa, xb, xc, xd = np.moveaxis(np.asarray(x, dtype=float), -1, 0)
    ya, yb, yc, yd = np.moveaxis(np.asarray(y, dtype=float), -1, 0)
    return np.stack([
        xa * ya - xb * yb - xc * yc - xd * yd,
        xa * yb + xb * ya + xc * yd - xd * yc,
        xa * yc - xb * yd + xc * ya + xd * yb,
        xa * yd + xb * yc - xc * yb + xd * ya,
    ], axis=-1)


def to_complex_pair(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    return x[..., 0] + 1j * x[..., 1], x[..., 2] + 1j * x[..., 3]


def from_complex_pair(z1, z2) -> np.ndarray:
    z1 = np.asarray(z1)
    z2 = np.asarray(z2)
    z1, z2 = np.broadcast_arrays(z1, z2)
    return np.stack([z1.real, z1.imag, z2.real, z2.imag], axis=-1).astype(float)
