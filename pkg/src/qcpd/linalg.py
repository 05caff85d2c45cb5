"""Ranks, Kruskal ranks, least squares and pseudo-inverses for quaternion matrices.

Everything here works through the complex adjoints of :mod:`qcpd.qmatrix`.
Default numerical rank tolerance is ``max(rows, cols) * eps * sigma_max`` of
the matrix whose singular values are thresholded.
"""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (IllConditionedError, RankDeficientWarning, ResourceError,
                     ShapeError, StructureError)
from .qmatrix import AdjointKind, QMatrix, adjoint, as_qmatrix, from_adjoint

__all__ = [
    "RankInfo",
    "numerical_rank",
    "rank_right",
    "rank_left",
    "kruskal_rank",
    "kruskal_rank_right",
    "kruskal_rank_left",
    "kprank",
    "LstsqInfo",
    "lstsq_direct",
    "lstsq_reverse",
    "lstsq_real_constrained",
    "pinv",
    "DEFAULT_KRANK_GUARD",
]

DEFAULT_KRANK_GUARD = 12


@dataclass(frozen=True)
class RankInfo:
    rank: int
    tol: float
    singular_values: np.ndarray = field(repr=False)
    auto_tol: bool = True


def _default_tol(shape, s) -> float:
    smax = float(s[0]) if len(s) else 0.0
    return max(shape) * np.finfo(float).eps * smax


def numerical_rank(X, tol=None) -> RankInfo:
    """Number of singular values of ``X`` above ``tol`` (auto policy when None)."""
    X = np.asarray(X)
    if X.size == 0:
        return RankInfo(0, 0.0, np.zeros(0), tol is None)
    s = np.linalg.svd(X, compute_uv=False)
    t = _default_tol(X.shape, s) if tol is None else float(tol)
    if t < 0:
        raise ValueError("tolerance must be nonnegative")
    return RankInfo(int(np.sum(s > t)), t, s, tol is None)


def _half_rank(X, tol, side) -> int:
    info = numerical_rank(X, tol)
    if info.rank % 2:
        raise IllConditionedError(
            f"{side} rank undecidable: complex adjoint rank {info.rank} is odd at "
            f"tolerance {info.tol:.3e}", singular_values=info.singular_values)
    return info.rank // 2


def rank_right(A, tol=None) -> int:
    """Dimension of the span of right linear combinations of the columns."""
    return _half_rank(adjoint(as_qmatrix(A), AdjointKind.DIRECT), tol, "right")


def rank_left(A, tol=None) -> int:
    """Dimension of the span of left linear combinations of the columns."""
    return _half_rank(adjoint(as_qmatrix(A), AdjointKind.REVERSE), tol, "left")


def _kruskal(ncols: int, nrows: int, independent, guard, generic) -> int:
    if generic:
        return min(nrows, ncols)
    if ncols > guard:
        raise ResourceError(
            f"Kruskal rank of {ncols} columns exceeds the brute-force guard ({guard}); "
            "pass generic=True to use min(rows, cols) explicitly")
    best = 0
    for r in range(1, min(nrows, ncols) + 1):
        if all(independent(sub) for sub in itertools.combinations(range(ncols), r)):
            best = r
        else:
            break
    return best


def kruskal_rank(X, tol=None, guard: int = DEFAULT_KRANK_GUARD, generic: bool = False) -> int:
    """Kruskal rank of a real or complex matrix by subset enumeration."""
    X = np.asarray(X)
    return _kruskal(X.shape[1], X.shape[0],
                    lambda sub: numerical_rank(X[:, sub], tol).rank == len(sub),
                    guard, generic)


def kruskal_rank_right(A, tol=None, guard: int = DEFAULT_KRANK_GUARD,
                       generic: bool = False) -> int:
    """Largest r such that every r columns are right linearly independent."""
    A = as_qmatrix(A)
    return _kruskal(A.cols, A.rows, lambda sub: rank_right(A.columns(sub), tol) == len(sub),
                    guard, generic)


def kruskal_rank_left(A, tol=None, guard: int = DEFAULT_KRANK_GUARD,
                      generic: bool = False) -> int:
    """Largest r such that every r columns are left linearly independent."""
    A = as_qmatrix(A)
    return _kruskal(A.cols, A.rows, lambda sub: rank_left(A.columns(sub), tol) == len(sub),
                    guard, generic)


def kprank(X, block_width: int, tol=None, guard: int = DEFAULT_KRANK_GUARD) -> int:
    """k'-rank of a matrix uniformly partitioned into column blocks of ``block_width``.

    Largest r such that any r blocks together have linearly independent columns.
    """
    X = np.asarray(X)
    if X.shape[1] % block_width:
        raise ShapeError("column count is not a multiple of the block width")
    nblocks = X.shape[1] // block_width

    def independent(sub):
        cols = np.concatenate([np.arange(b * block_width, (b + 1) * block_width) for b in sub])
        return numerical_rank(X[:, cols], tol).rank == len(cols)

    return _kruskal(nblocks, X.shape[0] // block_width, independent, guard, False)


# ---------------------------------------------------------------------------
# least squares

@dataclass(frozen=True)
class LstsqInfo:
    rank: int
    full_rank: int
    rank_deficient: bool


def _solve_rows(Y, N, rcond, kind_name):
    """Least-squares ``X`` minimising ``||Y - X N||_F`` for complex/real arrays."""
    sol, _, rank, _ = np.linalg.lstsq(N.T, Y.T, rcond=rcond)
    full = N.shape[0]
    info = LstsqInfo(int(rank), full, int(rank) < full)
    if info.rank_deficient:
        warnings.warn(f"{kind_name}: normal matrix rank {rank} < {full}; "
                      "using the minimum-norm solution", RankDeficientWarning, stacklevel=3)
    return sol.T, info


def lstsq_direct(M, N, rcond=None, return_info: bool = False):
    """Minimise ``||M - X .> N||_F`` over quaternion ``X``.

    Closed form ``M N^H (N N^H)^{-1}``; solved here on the first block row of
    the direct adjoint, which holds exactly ``[X1 X2]`` and ``[M1 M2]``.
    """
    M, N = as_qmatrix(M), as_qmatrix(N)
    if M.cols != N.cols:
        raise ShapeError(f"lstsq_direct: M {M.shape} and N {N.shape} need equal column counts")
    m1, m2 = M.cd()
    k = N.rows
    sol, info = _solve_rows(np.hstack([m1, m2]), adjoint(N, AdjointKind.DIRECT), rcond,
                            "lstsq_direct")
    X = QMatrix.from_complex(sol[:, :k], sol[:, k:])
    return (X, info) if return_info else X


def lstsq_reverse(M, N, rcond=None, return_info: bool = False):
    """Minimise ``||M - X .< N||_F`` over quaternion ``X``.

    Uses the first block row of the reverse adjoint, ``[X1, -conj(X2)]``.
    """
    M, N = as_qmatrix(M), as_qmatrix(N)
    if M.cols != N.cols:
        raise ShapeError(f"lstsq_reverse: M {M.shape} and N {N.shape} need equal column counts")
    m1, m2 = M.cd()
    k = N.rows
    sol, info = _solve_rows(np.hstack([m1, -m2.conj()]), adjoint(N, AdjointKind.REVERSE),
                            rcond, "lstsq_reverse")
    X = QMatrix.from_complex(sol[:, :k], -sol[:, k:].conj())
    return (X, info) if return_info else X


def lstsq_real_constrained(M, N, rcond=None, return_info: bool = False):
    """Minimise ``||M - X N||_F`` over real ``X``; returns a real ndarray.

    Equivalent to ``Re(M N^H) Re(N N^H)^{-1}``: the four real components of
    ``M`` and ``N`` are stacked side by side and solved as one real problem.
    """
    M, N = as_qmatrix(M), as_qmatrix(N)
    if M.cols != N.cols:
        raise ShapeError(
            f"lstsq_real_constrained: M {M.shape} and N {N.shape} need equal column counts")
    Ms = np.hstack(M.components)
    Ns = np.hstack(N.components)
    sol, info = _solve_rows(Ms, Ns, rcond, "lstsq_real_constrained")
    return (sol, info) if return_info else sol


def pinv(A, side=AdjointKind.DIRECT, tol=None) -> QMatrix:
    """Moore-Penrose pseudo-inverse for the direct or reverse product.

    Computed as ``from_adjoint(pinv(adjoint(A)))``; the structural residual of
    the complex pseudo-inverse must stay below 1e-8.
    """
    A = as_qmatrix(A)
    side = AdjointKind(side) if not isinstance(side, AdjointKind) else side
    if side not in (AdjointKind.DIRECT, AdjointKind.REVERSE):
        raise ValueError("side must be DIRECT or REVERSE")
    X = adjoint(A, side)
    s = np.linalg.svd(X, compute_uv=False)
    t = _default_tol(X.shape, s) if tol is None else float(tol)
    smax = float(s[0]) if len(s) else 0.0
    rcond = t / smax if smax > 0 else 0.0
    P = np.linalg.pinv(X, rcond=rcond)
    try:
        return from_adjoint(P, side, tol=1e-8)
    except StructureError as exc:
        raise StructureError(f"pseudo-inverse lost adjoint structure: {exc}",
                             residual=exc.residual) from exc
