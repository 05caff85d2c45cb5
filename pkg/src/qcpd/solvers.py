"""Alternating least squares solvers for the quaternion CPD.

``qals`` works directly on quaternion unfoldings with three exact block
least-squares updates. ``cals`` works on the coupled CONFAC model of the two
Cayley-Dickson parts with complex pseudo-inverse updates. Both report the
same cost, ``||T - T_hat||_F / ||T||_F``, computed in the quaternion domain.
"""
from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.linalg import khatri_rao

from .errors import RankDeficientWarning, ShapeError, SingularUpdateError
from .linalg import lstsq_direct, lstsq_real_constrained, lstsq_reverse
from .models import (ConfacModel, CpdFactors, confac_data_unfoldings, confac_from_cpd,
                     confac_to_cpd, cpd_reconstruct, phi_matrix, psi_matrix)
from .qmatrix import QMatrix, khatri_rao_direct, khatri_rao_reverse
from .qtensor import QTensor, unfold

__all__ = ["SolverConfig", "SolverTrace", "initialize", "qals", "cals",
           "qals_update_a", "qals_update_b", "qals_update_c", "relative_cost"]


@dataclass(frozen=True)
class SolverConfig:
    """ALS stopping rule and initialisation.

    Iterations stop when ``|cost_prev - cost| / cost_prev < rel_tol``, when
    the cost falls below ``abs_tol`` (exact fit), or after ``max_iters``.
    ``init`` is ``"random"`` or a :class:`CpdFactors` starting point.
    """

    max_iters: int = 500
    rel_tol: float = 1e-8
    seed: int = 0
    init: Union[str, CpdFactors] = "random"
    abs_tol: float = 1e-13

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be > 0")
        if isinstance(self.init, str) and self.init != "random":
            raise ValueError("init must be 'random' or CpdFactors")


@dataclass
class SolverTrace:
    costs: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    wall_time: float = 0.0
    b_imag_residual: list = field(default_factory=list)
    rank_deficient_updates: int = 0

    @property
    def final_cost(self) -> float:
        return self.costs[-1] if self.costs else float("nan")


def initialize(dims, F: int, cfg: SolverConfig) -> CpdFactors:
    """Starting factors: provided ones (shape-checked) or i.i.d. standard normal draws.

    Random draws come from a Philox counter-based generator keyed by ``cfg.seed``.
    """
    N1, N2, N3 = (int(d) for d in dims)
    if isinstance(cfg.init, CpdFactors):
        if cfg.init.dims != (N1, N2, N3) or cfg.init.rank != F:
            raise ShapeError(f"provided init has dims {cfg.init.dims} and rank {cfg.init.rank}, "
                             f"expected {(N1, N2, N3)} and {F}")
        return cfg.init
    rng = np.random.Generator(np.random.Philox(key=int(cfg.seed) & (2**64 - 1)))
    A = rng.standard_normal((N1, F, 4))
    B = rng.standard_normal((N2, F))
    C = rng.standard_normal((N3, F, 4))
    return CpdFactors(QMatrix(A), B, QMatrix(C))


def relative_cost(T: QTensor, f: CpdFactors, norm_T: float | None = None) -> float:
    nrm = T.norm() if norm_T is None else norm_T
    return float(np.sqrt(np.sum((T.data - cpd_reconstruct(f).data) ** 2)) / nrm)


def _check_problem(T: QTensor, F: int):
    if T.order != 3:
        raise ShapeError("CPD solvers need a third-order tensor")
    if F < 1:
        raise ShapeError("rank must be >= 1")
    if T.norm() == 0:
        raise ShapeError("cannot decompose the zero tensor")


def _stop(prev: float, cost: float, cfg: SolverConfig) -> bool:
    if cost <= cfg.abs_tol:
        return True
    return prev > 0 and abs(prev - cost) / prev < cfg.rel_tol


# -- Q-ALS ------------------------------------------------------------------

def qals_update_a(T1: QMatrix, B, C: QMatrix) -> QMatrix:
    """``argmin_A ||T(1) - A .> (C kr B)^T||``."""
    return lstsq_direct(T1, khatri_rao_direct(C, B).T)


def qals_update_b(T2: QMatrix, A: QMatrix, C: QMatrix) -> np.ndarray:
    """``argmin_{B real} ||T(2) - B (C kr< A)^T||``."""
    return lstsq_real_constrained(T2, khatri_rao_reverse(C, A).T)


def qals_update_c(T3: QMatrix, A: QMatrix, B) -> QMatrix:
    """``argmin_C ||T(3) - C .< (B kr A)^T||``."""
    return lstsq_reverse(T3, khatri_rao_direct(B, A).T)


_QALS_ORDER = ("A", "B", "C")


def qals(T: QTensor, F: int, cfg: SolverConfig = SolverConfig()):
    """Quaternion-domain ALS. Returns ``(CpdFactors, SolverTrace)``."""
    _check_problem(T, F)
    t0 = time.perf_counter()
    f = initialize(T.dims, F, cfg)
    A, B, C = f.A, f.B, f.C
    Ts = {1: unfold(T, 1), 2: unfold(T, 2), 3: unfold(T, 3)}
    nrm = T.norm()
    trace = SolverTrace()
    prev = relative_cost(T, f, nrm)
    trace.costs.append(prev)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", RankDeficientWarning)
        for it in range(1, cfg.max_iters + 1):
            for block in _QALS_ORDER:
                if block == "A":
                    A = qals_update_a(Ts[1], B, C)
                elif block == "B":
                    B = qals_update_b(Ts[2], A, C)
                else:
                    C = qals_update_c(Ts[3], A, B)
            if not (np.all(np.isfinite(A.data)) and np.all(np.isfinite(B))
                    and np.all(np.isfinite(C.data))):
                raise SingularUpdateError(f"non-finite factors at iteration {it}")
            cost = float(np.linalg.norm((T.data - _reconstruct(A, B, C).data).ravel())) / nrm
            trace.costs.append(cost)
            trace.iterations = it
            if _stop(prev, cost, cfg):
                trace.converged = True
                break
            prev = cost
    trace.rank_deficient_updates = sum(issubclass(w.category, RankDeficientWarning)
                                       for w in caught)
    trace.wall_time = time.perf_counter() - t0
    return _safe_factors(A, B, C), trace


def _reconstruct(A, B, C) -> QTensor:
    # bypasses the degenerate-column check of CpdFactors for intermediate iterates
    f = object.__new__(CpdFactors)
    object.__setattr__(f, "A", A)
    object.__setattr__(f, "B", np.asarray(B, float))
    object.__setattr__(f, "C", C)
    return cpd_reconstruct(f)


def _safe_factors(A, B, C) -> CpdFactors:
    try:
        return CpdFactors(A, B, C)
    except ShapeError as exc:
        raise SingularUpdateError(f"solver produced degenerate factors: {exc}") from exc


# -- C-ALS ------------------------------------------------------------------

def _lstsq_right(Y, K):
    """``X`` minimising ``||Y - X K^T||_F`` (``X = Y (K^T)^+``)."""
    sol, _, rank, _ = np.linalg.lstsq(K, Y.T, rcond=None)
    return sol.T, int(rank) < K.shape[1]


def cals(T: QTensor, F: int, cfg: SolverConfig = SolverConfig()):
    """Complex-domain ALS on the coupled CONFAC model. Returns ``(CpdFactors, SolverTrace)``.

    Update cycle: ``B`` (real part of the complex pseudo-inverse solution),
    then ``W``, then ``U``.
    """
    _check_problem(T, F)
    t0 = time.perf_counter()
    f = initialize(T.dims, F, cfg)
    m = confac_from_cpd(f)
    U, W, B = m.U, m.W, m.B
    Psi, Phi = psi_matrix(F), phi_matrix(F)
    Omega = -Psi
    T1, T2 = T.cd()
    data = confac_data_unfoldings(T1, T2)
    TA, TB, TC = data["A"], data["B"], data["C"]
    nrm = T.norm()
    trace = SolverTrace()
    prev = relative_cost(T, f, nrm)
    trace.costs.append(prev)
    for it in range(1, cfg.max_iters + 1):
        chiA = np.vstack([U, U.conj() @ Psi])
        Bc, d1 = _lstsq_right(TB, khatri_rao(chiA, W) @ Phi.T)
        B = Bc.real
        trace.b_imag_residual.append(float(np.linalg.norm(Bc.imag) / max(np.linalg.norm(Bc), 1e-300)))
        BPhi = B @ Phi
        W, d2 = _lstsq_right(TC, khatri_rao(chiA, BPhi))
        chiC = np.vstack([W.conj() @ Omega, W])
        U, d3 = _lstsq_right(TA, khatri_rao(chiC, BPhi))
        trace.rank_deficient_updates += int(d1) + int(d2) + int(d3)
        if not (np.all(np.isfinite(U)) and np.all(np.isfinite(W)) and np.all(np.isfinite(B))):
            raise SingularUpdateError(f"non-finite factors at iteration {it}")
        A = QMatrix.from_complex(U[:, :F], U[:, F:])
        C = QMatrix.from_complex(W[:, F:].conj(), W[:, :F])
        cost = float(np.linalg.norm((T.data - _reconstruct(A, B, C).data).ravel())) / nrm
        trace.costs.append(cost)
        trace.iterations = it
        if _stop(prev, cost, cfg):
            trace.converged = True
            break
        prev = cost
    trace.wall_time = time.perf_counter() - t0
    try:
        return confac_to_cpd(ConfacModel(U, W, B)), trace
    except ShapeError as exc:
        raise SingularUpdateError(f"solver produced degenerate factors: {exc}") from exc
