"""Tucker and CPD models of third-order quaternion tensors.

A rank-F quaternion CPD is ``T[i,j,k] = sum_f A[i,f] B[j,f] C[k,f]`` with
quaternion ``A``, ``C`` and real ``B``; the order of the two quaternion
factors matters. This module holds the model types, their reconstruction,
the trivial scaling/permutation ambiguities, the two complex equivalent
models (adjoint rank-(2,2,1) tensor and coupled CONFAC) and a sufficient
uniqueness certificate based on left/right Kruskal ranks.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import khatri_rao
from scipy.optimize import linear_sum_assignment

from .errors import InvalidScaling, PreconditionError, ShapeError
from .linalg import (DEFAULT_KRANK_GUARD, kruskal_rank, kruskal_rank_left,
                     kruskal_rank_right, numerical_rank, rank_left, rank_right)
from .qmatrix import (QMatrix, as_qmatrix, khatri_rao_direct, khatri_rao_reverse,
                      matmul_direct, matmul_reverse)
from .qtensor import QTensor, mode_product
from .quaternion import hamilton

__all__ = [
    "TuckerModel",
    "CpdFactors",
    "ScalingTriple",
    "ConfacModel",
    "UniquenessReport",
    "tucker_reconstruct",
    "cpd_reconstruct",
    "cpd_unfolding",
    "cpd_slice",
    "cpd_mode_products",
    "apply_scaling",
    "align_factors",
    "adjoint_tensor",
    "confac_from_cpd",
    "confac_unfoldings",
    "confac_data_unfoldings",
    "confac_to_cpd",
    "psi_matrix",
    "phi_matrix",
    "certify_uniqueness",
    "empirical_b_uniqueness_check",
]


def _real_matrix(B, name="B") -> np.ndarray:
    if isinstance(B, QMatrix):
        if not B.is_real():
            raise ShapeError(f"{name} must be real-valued")
        B = B.re
    B = np.asarray(B)
    if np.iscomplexobj(B):
        raise ShapeError(f"{name} must be real-valued")
    B = B.astype(float)
    if B.ndim != 2:
        raise ShapeError(f"{name} must be a 2-D matrix")
    return B


@dataclass(frozen=True)
class TuckerModel:
    core: QTensor
    A: QMatrix
    B: np.ndarray
    C: QMatrix

    def __post_init__(self):
        object.__setattr__(self, "A", as_qmatrix(self.A))
        object.__setattr__(self, "C", as_qmatrix(self.C))
        object.__setattr__(self, "B", _real_matrix(self.B))
        if self.core.order != 3:
            raise ShapeError("Tucker core must be third-order")
        f1, f2, f3 = self.core.dims
        if (self.A.cols, self.B.shape[1], self.C.cols) != (f1, f2, f3):
            raise ShapeError(f"factor column counts {(self.A.cols, self.B.shape[1], self.C.cols)}"
                             f" do not match core dims {self.core.dims}")


def tucker_reconstruct(m: TuckerModel) -> QTensor:
    """``T[i,j,k] = sum A[i,p] B[j,q] S[p,q,r] C[k,r]``."""
    return mode_product(mode_product(mode_product(m.core, 1, m.A), 2, m.B), 3, m.C)


@dataclass(frozen=True)
class CpdFactors:
    """Factors ``A`` (N1 x F quaternion), ``B`` (N2 x F real), ``C`` (N3 x F quaternion)."""

    A: QMatrix
    B: np.ndarray
    C: QMatrix

    def __post_init__(self):
        object.__setattr__(self, "A", as_qmatrix(self.A))
        object.__setattr__(self, "C", as_qmatrix(self.C))
        object.__setattr__(self, "B", _real_matrix(self.B))
        F = self.A.cols
        if self.B.shape[1] != F or self.C.cols != F:
            raise ShapeError(f"column counts differ: A {self.A.cols}, B {self.B.shape[1]}, "
                             f"C {self.C.cols}")
        if F < 1:
            raise ShapeError("rank must be at least 1")
        for name, norms in (("A", np.sum(self.A.data ** 2, axis=(0, 2))),
                            ("B", np.sum(self.B ** 2, axis=0)),
                            ("C", np.sum(self.C.data ** 2, axis=(0, 2)))):
            if np.any(norms == 0):
                raise ShapeError(f"factor {name} has an all-zero column (degenerate component)")

    @property
    def rank(self) -> int:
        return self.A.cols

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.A.rows, self.B.shape[0], self.C.rows


def cpd_reconstruct(f: CpdFactors) -> QTensor:
    """Sum of ``F`` rank-one terms ``a_f o b_f o c_f`` with ``a`` left of ``c``."""
    a1, a2 = f.A.cd()
    c1, c2 = f.C.cd()
    B = f.B

    def e(x, z):
        return np.einsum("if,jf,kf->ijk", x, B, z)

    # (a1 + a2 j)(c1 + c2 j) = a1 c1 - a2 conj(c2) + (a1 c2 + a2 conj(c1)) j
    return QTensor.from_complex(e(a1, c1) - e(a2, c2.conj()), e(a1, c2) + e(a2, c1.conj()))


def cpd_unfolding(f: CpdFactors, mode: int) -> QMatrix:
    """Mode-``mode`` unfolding of ``[[A, B, C]]`` built from the factors.

    ``T(1) = A .> (C kr> B)^T``, ``T(2) = B (C kr< A)^T``, ``T(3) = C .< (B kr> A)^T``.
    """
    if mode == 1:
        return matmul_direct(f.A, khatri_rao_direct(f.C, f.B).T)
    if mode == 2:
        return matmul_direct(f.B, khatri_rao_reverse(f.C, f.A).T)
    if mode == 3:
        return matmul_reverse(f.C, khatri_rao_direct(f.B, f.A).T)
    raise ShapeError(f"mode must be 1, 2 or 3, got {mode}")


def cpd_slice(f: CpdFactors, axis: str, index: int) -> QMatrix:
    """Horizontal, lateral or frontal slice of ``[[A, B, C]]`` from diagonal-scaled factors."""
    N = dict(zip(("horizontal", "lateral", "frontal"), f.dims))
    if axis not in N:
        raise ValueError(f"unknown slice axis {axis!r}")
    if not 0 <= index < N[axis]:
        raise ShapeError(f"slice index {index} out of range for axis {axis}")
    if axis == "horizontal":
        D = QMatrix.diag(f.A.data[index])
        return matmul_direct(f.B, matmul_direct(D, f.C.T))
    if axis == "lateral":
        AD = QMatrix(f.A.data * f.B[index][None, :, None])
        return matmul_direct(AD, f.C.T)
    D = QMatrix.diag(f.C.data[index])
    return matmul_direct(matmul_direct(f.A, D), f.B.T)


def cpd_mode_products(f: CpdFactors) -> QTensor:
    """``I x1 A x2 B x3 C`` with the order-3 identity (superdiagonal) core."""
    F = f.rank
    core = np.zeros((F, F, F, 4))
    core[np.arange(F), np.arange(F), np.arange(F), 0] = 1.0
    return tucker_reconstruct(TuckerModel(QTensor(core), f.A, f.B, f.C))


# ---------------------------------------------------------------------------
# trivial ambiguities

@dataclass(frozen=True)
class ScalingTriple:
    """Diagonal scalings: ``alpha`` (F x 4 quaternions), ``beta`` (F reals), ``gamma``."""

    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=float).reshape(-1, 4)
        gamma = np.asarray(self.gamma, dtype=float).reshape(-1, 4)
        beta = np.asarray(self.beta, dtype=float).reshape(-1)
        if not alpha.shape[0] == gamma.shape[0] == beta.shape[0]:
            raise ShapeError("scaling vectors have different lengths")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "gamma", gamma)

    def residual(self) -> float:
        """``max_f |alpha_f gamma_f beta_f - 1|``."""
        prod = hamilton(self.alpha, self.gamma) * self.beta[:, None]
        prod[:, 0] -= 1.0
        return float(np.max(np.abs(prod), initial=0.0))

    def is_admissible(self, tol: float = 1e-10) -> bool:
        if np.any(self.beta == 0):
            return False
        return self.residual() <= tol

    @classmethod
    def random(cls, F: int, rng=None) -> "ScalingTriple":
        """Random admissible triple: ``gamma = beta^-1 alpha^-1``."""
        rng = np.random.default_rng(rng)
        alpha = rng.standard_normal((F, 4))
        beta = rng.uniform(0.5, 2.0, F) * rng.choice([-1.0, 1.0], F)
        inv_alpha = alpha * np.array([1, -1, -1, -1]) / np.sum(alpha ** 2, 1, keepdims=True)
        return cls(alpha, beta, inv_alpha / beta[:, None])


def apply_scaling(f: CpdFactors, s: ScalingTriple, perm=None, tol: float = 1e-10) -> CpdFactors:
    """``A (Lambda_A P)``, ``B Lambda_B P``, ``C .< (Lambda_C P)``.

    ``perm[k]`` is the original column placed at position ``k``.
    """
    F = f.rank
    if s.alpha.shape[0] != F:
        raise ShapeError("scaling length differs from the rank")
    if np.any(s.beta == 0):
        raise InvalidScaling("real scaling entries must be nonzero")
    if not s.is_admissible(tol):
        raise InvalidScaling(f"(Lambda_A Lambda_C) Lambda_B != I (residual {s.residual():.3e})")
    perm = np.arange(F) if perm is None else np.asarray(perm)
    if sorted(perm.tolist()) != list(range(F)):
        raise ShapeError("perm is not a permutation")
    # right scaling of A columns, left scaling of C columns
    A = hamilton(f.A.data, s.alpha[None, :, :])[:, perm]
    C = hamilton(s.gamma[None, :, :], f.C.data)[:, perm]
    B = (f.B * s.beta[None, :])[:, perm]
    return CpdFactors(QMatrix(A), B, QMatrix(C))


def _nmse(X, Xhat) -> float:
    den = float(np.sum(np.asarray(X) ** 2))
    return float(np.sum((np.asarray(X) - np.asarray(Xhat)) ** 2)) / den


def align_factors(estimate: CpdFactors, truth: CpdFactors):
    """Remove permutation and scaling ambiguity of ``estimate`` against ``truth``.

    The permutation maximises the total absolute normalised correlation of
    the real factor columns. Each factor is then rescaled column by column
    with its own least-squares scalar (real for B, right quaternion for A,
    left quaternion for C). Returns the aligned factors and a dict of
    normalised mean squared errors ``||X - X_hat||^2 / ||X||^2``.
    """
    if estimate.dims != truth.dims or estimate.rank != truth.rank:
        raise ShapeError("estimate and truth have different shapes")
    Bt, Be = truth.B, estimate.B
    nt = Bt / np.linalg.norm(Bt, axis=0)
    ne = Be / np.linalg.norm(Be, axis=0)
    corr = np.abs(nt.T @ ne)
    _, perm = linear_sum_assignment(-corr)

    Ae = estimate.A.data[:, perm]
    Ce = estimate.C.data[:, perm]
    Be = Be[:, perm]

    # B: real scalar per column
    sb = np.sum(Be * Bt, axis=0) / np.sum(Be * Be, axis=0)
    B_al = Be * sb

    # A: a_hat q, q = (a_hat^H a) / ||a_hat||^2
    conj = np.array([1.0, -1.0, -1.0, -1.0])
    qa = np.sum(hamilton(Ae * conj, truth.A.data), axis=0) / np.sum(Ae ** 2, axis=(0, 2))[:, None]
    A_al = hamilton(Ae, qa[None])

    # C: q c_hat, q = (sum c conj(c_hat)) / ||c_hat||^2
    qc = np.sum(hamilton(truth.C.data, Ce * conj), axis=0) / np.sum(Ce ** 2, axis=(0, 2))[:, None]
    C_al = hamilton(qc[None], Ce)

    aligned = CpdFactors(QMatrix(A_al), B_al, QMatrix(C_al))
    nmse = {"A": _nmse(truth.A.data, A_al), "B": _nmse(Bt, B_al), "C": _nmse(truth.C.data, C_al),
            "perm": perm}
    return aligned, nmse


# ---------------------------------------------------------------------------
# complex equivalent models

def adjoint_tensor(T: QTensor) -> np.ndarray:
    """Complex ``2N1 x N2 x 2N3`` tensor whose lateral slices are direct adjoints."""
    if T.order != 3:
        raise ShapeError("adjoint_tensor needs a third-order tensor")
    t1, t2 = T.cd()
    top = np.concatenate([t1, t2], axis=2)
    bottom = np.concatenate([-t2.conj(), t1.conj()], axis=2)
    return np.concatenate([top, bottom], axis=0)


def psi_matrix(F: int) -> np.ndarray:
    Z, I = np.zeros((F, F)), np.eye(F)
    return np.block([[Z, I], [-I, Z]])


def phi_matrix(F: int) -> np.ndarray:
    return np.hstack([np.eye(F), np.eye(F)])


@dataclass(frozen=True)
class ConfacModel:
    """Coupled CONFAC factors: ``U = [A1 A2]``, ``W = [C2 conj(C1)]``, real ``B``."""

    U: np.ndarray
    W: np.ndarray
    B: np.ndarray
    Psi: np.ndarray = field(default=None, repr=False)
    Phi: np.ndarray = field(default=None, repr=False)
    Omega: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        F = self.B.shape[1]
        if self.U.shape[1] != 2 * F or self.W.shape[1] != 2 * F:
            raise ShapeError("U and W need 2F columns")
        if self.Psi is None:
            object.__setattr__(self, "Psi", psi_matrix(F))
        if self.Phi is None:
            object.__setattr__(self, "Phi", phi_matrix(F))
        if self.Omega is None:
            object.__setattr__(self, "Omega", -self.Psi)

    @property
    def rank(self) -> int:
        return self.B.shape[1]

    def adjoint_A(self) -> np.ndarray:
        """Direct adjoint of A rebuilt from U: ``[U; conj(U) Psi]``."""
        return np.vstack([self.U, self.U.conj() @ self.Psi])

    def adjoint_C(self) -> np.ndarray:
        """Reverse adjoint of C rebuilt from W: ``[conj(W) Omega; W]``."""
        return np.vstack([self.W.conj() @ self.Omega, self.W])


def confac_from_cpd(f: CpdFactors) -> ConfacModel:
    a1, a2 = f.A.cd()
    c1, c2 = f.C.cd()
    return ConfacModel(np.hstack([a1, a2]), np.hstack([c2, c1.conj()]), f.B.copy())


def confac_to_cpd(m: ConfacModel) -> CpdFactors:
    """``A = U[:, :F] + U[:, F:] j`` and ``C = conj(W[:, F:]) + W[:, :F] j``."""
    F = m.rank
    A = QMatrix.from_complex(m.U[:, :F], m.U[:, F:])
    C = QMatrix.from_complex(m.W[:, F:].conj(), m.W[:, :F])
    return CpdFactors(A, np.real(m.B), C)


def _unfold_a(X):  # N1 x (N3 N2), N2 fastest
    return X.transpose(0, 2, 1).reshape(X.shape[0], -1)


def _unfold_b(X):  # N2 x (N1 N3), N3 fastest
    return X.transpose(1, 0, 2).reshape(X.shape[1], -1)


def _unfold_c(X):  # N3 x (N1 N2), N2 fastest
    return X.transpose(2, 0, 1).reshape(X.shape[2], -1)


def confac_data_unfoldings(T1: np.ndarray, T2: np.ndarray) -> dict:
    """Stacked data matrices ``[T1^A T2^A]``, ``[T2^B conj(T1^B)]``, ``[T2^C conj(T1^C)]``."""
    T1, T2 = np.asarray(T1), np.asarray(T2)
    if T1.shape != T2.shape or T1.ndim != 3:
        raise ShapeError("Cayley-Dickson parts must be third-order arrays of equal shape")
    return {
        "A": np.hstack([_unfold_a(T1), _unfold_a(T2)]),
        "B": np.hstack([_unfold_b(T2), _unfold_b(T1).conj()]),
        "C": np.hstack([_unfold_c(T2), _unfold_c(T1).conj()]),
    }


def confac_model_matrices(m: ConfacModel) -> dict:
    """Model-side ``T^A``, ``T^B``, ``T^C`` built from the CONFAC factors."""
    BPhi = m.B @ m.Phi
    chiA = m.adjoint_A()
    chiC = m.adjoint_C()
    return {
        "A": m.U @ khatri_rao(chiC, BPhi).T,
        "B": BPhi @ khatri_rao(chiA, m.W).T,
        "C": m.W @ khatri_rao(chiA, BPhi).T,
    }


def confac_unfoldings(m: ConfacModel, T1, T2) -> dict:
    """Model matrices with max-abs residuals against the data unfoldings."""
    data = confac_data_unfoldings(T1, T2)
    model = confac_model_matrices(m)
    for key in "ABC":
        if data[key].shape != model[key].shape:
            raise ShapeError(f"T^{key}: model {model[key].shape} vs data {data[key].shape}")
    return {
        "model": model,
        "data": data,
        "residuals": {k: float(np.max(np.abs(model[k] - data[k]), initial=0.0)) for k in "ABC"},
    }


# ---------------------------------------------------------------------------
# uniqueness

@dataclass(frozen=True)
class UniquenessReport:
    conditions: tuple[bool, bool, bool, bool, bool]
    rrank_A: int
    lrank_C: int
    krank_B: int
    rkrank_A: int
    lkrank_C: int
    b_no_proportional_columns: bool
    dims: tuple[int, int, int]
    rank: int
    generic_shortcut: bool = False

    @property
    def certified(self) -> bool:
        return any(self.conditions)

    def lines(self) -> list[str]:
        """``key=value`` lines for machine consumption."""
        out = [f"rank={self.rank}", "dims=" + ",".join(map(str, self.dims)),
               f"rrank_A={self.rrank_A}", f"lrank_C={self.lrank_C}", f"krank_B={self.krank_B}",
               f"rkrank_A={self.rkrank_A}", f"lkrank_C={self.lkrank_C}",
               f"b_no_proportional_columns={int(self.b_no_proportional_columns)}"]
        out += [f"condition_{i}={int(c)}" for i, c in enumerate(self.conditions, 1)]
        out.append(f"certified={int(self.certified)}")
        return out

    def summary(self) -> str:
        F = self.rank
        desc = [
            f"rrank A = F, lrank C = F, B without proportional columns "
            f"({self.rrank_A}, {self.lrank_C}, {self.b_no_proportional_columns})",
            f"krank B = F and rkrank A + lkrank C >= F+2 "
            f"({self.krank_B}; {self.rkrank_A + self.lkrank_C} >= {F + 2})",
            f"rkrank A = F and krank B + lkrank C >= F+2 "
            f"({self.rkrank_A}; {self.krank_B + self.lkrank_C} >= {F + 2})",
            f"lkrank C = F and rkrank A + krank B >= F+2 "
            f"({self.lkrank_C}; {self.rkrank_A + self.krank_B} >= {F + 2})",
            f"N1 N3 >= F and rkrank A + krank B + lkrank C >= 2F+2 "
            f"({self.dims[0] * self.dims[2]} >= {F}; "
            f"{self.rkrank_A + self.krank_B + self.lkrank_C} >= {2 * F + 2})",
        ]
        rows = [f"  [{'x' if c else ' '}] {i}. {d}"
                for i, (c, d) in enumerate(zip(self.conditions, desc), 1)]
        verdict = "CERTIFIED unique" if self.certified else "not certified"
        return "\n".join([f"Q-CPD uniqueness (F={F}, dims={self.dims}): {verdict}"] + rows)


def _no_proportional_columns(B: np.ndarray, angle_tol: float = 1e-8) -> bool:
    Bn = B / np.linalg.norm(B, axis=0)
    F = B.shape[1]
    for i in range(F):
        for j in range(i + 1, F):
            # sine of the angle between the two lines; accurate near zero, unlike arccos
            c = float(Bn[:, i] @ Bn[:, j])
            s = float(np.linalg.norm(Bn[:, j] - c * Bn[:, i]))
            if np.arctan2(s, abs(c)) <= angle_tol:
                return False
    return True


def certify_uniqueness(f: CpdFactors, tol=None, guard: int = DEFAULT_KRANK_GUARD,
                       generic: bool = False) -> UniquenessReport:
    """Check the five sufficient Kruskal-type conditions for essential uniqueness."""
    F = f.rank
    N1, _, N3 = f.dims
    rrA = rank_right(f.A, tol)
    lrC = rank_left(f.C, tol)
    kB = kruskal_rank(f.B, tol, guard=guard, generic=generic)
    rkA = kruskal_rank_right(f.A, tol, guard=guard, generic=generic)
    lkC = kruskal_rank_left(f.C, tol, guard=guard, generic=generic)
    noprop = _no_proportional_columns(f.B)
    conds = (
        rrA == F and lrC == F and noprop,
        kB == F and rkA + lkC >= F + 2,
        rkA == F and kB + lkC >= F + 2,
        lkC == F and rkA + kB >= F + 2,
        N1 * N3 >= F and rkA + kB + lkC >= 2 * F + 2,
    )
    return UniquenessReport(tuple(bool(c) for c in conds), rrA, lrC, kB, rkA, lkC, noprop,
                            f.dims, F, generic)


@dataclass(frozen=True)
class BUniquenessReport:
    b_nmse: tuple[float, ...]
    a_nmse: tuple[float, ...]
    c_nmse: tuple[float, ...]
    final_costs: tuple[float, ...]
    threshold: float

    @property
    def all_recovered(self) -> bool:
        return all(e < self.threshold for e in self.b_nmse)

    @property
    def best_recovered(self) -> bool:
        return self.b_nmse[int(np.argmin(self.final_costs))] < self.threshold

    @property
    def exact_fits(self) -> int:
        return sum(c < 1e-10 for c in self.final_costs)

    @property
    def exact_fits_recover_b(self) -> bool:
        """Every start that fitted T1 exactly also recovered B."""
        return all(e < self.threshold for e, c in zip(self.b_nmse, self.final_costs) if c < 1e-10)

    @property
    def quaternion_factors_unique(self) -> bool:
        return all(max(a, c) < self.threshold for a, c in zip(self.a_nmse, self.c_nmse))


def fit_t1_confac(T1: np.ndarray, F: int, U0, B0, W0, max_iters: int = 2000,
                  rel_tol: float = 1e-12):
    """ALS on the single CONFAC model ``T1 = [[U Psi, B Phi, conj(W)]]``.

    Same pseudo-inverse updates as the coupled solver, restricted to the
    first Cayley-Dickson part. Returns ``(ConfacModel, relative cost)``.
    """
    Psi, Phi = psi_matrix(F), phi_matrix(F)
    Omega = -Psi
    TA = _unfold_a(T1)                # U (conj(W) Omega kr B Phi)^T
    TB = _unfold_b(T1)                # B Phi (U Psi kr conj(W))^T
    TCc = _unfold_c(T1).conj()        # W (conj(U) Psi kr B Phi)^T
    nrm = np.linalg.norm(TA)
    U, B, W = np.asarray(U0, complex), np.asarray(B0, float), np.asarray(W0, complex)
    prev = np.inf
    cost = np.inf
    for _ in range(max_iters):
        K = khatri_rao(U @ Psi, W.conj()) @ Phi.T
        # real-constrained: stack real and imaginary parts
        B = np.linalg.lstsq(np.vstack([K.real, K.imag]), np.hstack([TB.real, TB.imag]).T,
                            rcond=None)[0].T
        BPhi = B @ Phi
        W = np.linalg.lstsq(khatri_rao(U.conj() @ Psi, BPhi), TCc.T, rcond=None)[0].T
        KA = khatri_rao(W.conj() @ Omega, BPhi)
        U = np.linalg.lstsq(KA, TA.T, rcond=None)[0].T
        cost = np.linalg.norm(TA - U @ KA.T) / nrm
        if cost < 1e-14 or (np.isfinite(prev) and abs(prev - cost) <= rel_tol * prev):
            break
        prev = cost
    return ConfacModel(U, W, B), float(cost)


def empirical_b_uniqueness_check(f: CpdFactors, trials: int = 10, seed: int = 0,
                                 threshold: float = 1e-6, max_iters: int = 2000,
                                 tol=None) -> BUniquenessReport:
    """Fit the CONFAC model of the first Cayley-Dickson part alone from random starts.

    Reports, per start, the aligned NMSE of the recovered real factor and of
    the quaternion factors rebuilt from ``U`` and ``W``. Only ``B`` is
    expected to be identifiable from the first part.
    """
    m = confac_from_cpd(f)
    F = f.rank
    for name, X, need in (("B", m.B, F), ("U", m.U, 2 * F), ("W", m.W, 2 * F)):
        r = numerical_rank(X, tol).rank
        if r < need:
            raise PreconditionError(f"{name} is not full column rank ({r} < {need})")
    T1, _ = cpd_reconstruct(f).cd()
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x1B]))
    N1, N2, N3 = f.dims
    b_err, a_err, c_err, costs = [], [], [], []
    for _ in range(trials):
        U0 = rng.standard_normal((N1, 2 * F)) + 1j * rng.standard_normal((N1, 2 * F))
        W0 = rng.standard_normal((N3, 2 * F)) + 1j * rng.standard_normal((N3, 2 * F))
        B0 = rng.standard_normal((N2, F))
        fit, cost = fit_t1_confac(T1, F, U0, B0, W0, max_iters=max_iters)
        est = confac_to_cpd(fit)
        _, nm = align_factors(est, f)
        b_err.append(nm["B"])
        a_err.append(nm["A"])
        c_err.append(nm["C"])
        costs.append(cost)
    return BUniquenessReport(tuple(b_err), tuple(a_err), tuple(c_err), tuple(costs), threshold)
