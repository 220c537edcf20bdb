"""Frame numerics shared by the cone, sharpness, and clustering modules.

Holds the orthonormal-frame type, QR/polar factorizations with deterministic
sign conventions, random frame generators, and structure helpers for the
entrywise-nonnegative slice St+(n, k).  A basic fact drives the St+ helpers:
orthogonal nonnegative columns have disjoint supports, so every row of a
feasible frame carries at most one positive entry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.random import Generator

FRAME_TOL = 1e-10   # allowed ||U^T U - I||_F for a frame
ENTRY_ZERO_TOL = 1e-12  # entry classification threshold on St+


class FrameError(ValueError):
    """Raised for rank-deficient retractions or infeasible frames."""


def sym(a: np.ndarray) -> np.ndarray:
    return (a + a.T) / 2.0


def frame_residual(u: np.ndarray) -> float:
    u = np.asarray(u, dtype=float)
    return float(np.linalg.norm(u.T @ u - np.eye(u.shape[1])))


@dataclass(frozen=True, eq=False)
class StiefelPoint:
    """An n-by-k matrix with orthonormal columns."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2:
            raise FrameError(f"expected a matrix, got shape {m.shape}")
        res = frame_residual(m)
        if res > FRAME_TOL:
            raise FrameError(f"columns not orthonormal: residual {res:.3e}")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def k(self) -> int:
        return self.matrix.shape[1]


def as_matrix(u) -> np.ndarray:
    if isinstance(u, StiefelPoint):
        return u.matrix
    return np.asarray(u, dtype=float)


def qr_retract(p: np.ndarray, x: np.ndarray) -> np.ndarray:
    """QR-based retraction of P + X with R forced to a positive diagonal,
    which makes the result deterministic.  Raises on numerical rank loss."""
    a = np.asarray(p, dtype=float) + np.asarray(x, dtype=float)
    q, r = np.linalg.qr(a)
    diag = np.diag(r)
    if np.any(np.abs(diag) < 1e-12 * max(1.0, float(np.linalg.norm(a)))):
        raise FrameError("rank-deficient step: QR retraction undefined")
    signs = np.where(diag < 0.0, -1.0, 1.0)
    return q * signs


def polar_factor(a: np.ndarray) -> np.ndarray:
    """Closest orthonormal frame to ``a`` in Frobenius norm (polar factor)."""
    a = np.asarray(a, dtype=float)
    w, s, vt = np.linalg.svd(a, full_matrices=False)
    if s[-1] < 1e-12 * max(1.0, s[0] if len(s) else 1.0):
        raise FrameError("rank-deficient matrix: polar factor undefined")
    return w @ vt


def stiefel_tangent_project(p: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Project an ambient matrix onto {X : X^T P + P^T X = 0} at frame P."""
    p = np.asarray(p, dtype=float)
    z = np.asarray(z, dtype=float)
    out = z - p @ sym(p.T @ z)
    return out - p @ sym(p.T @ out)


def random_stiefel(n: int, k: int, rng: Generator) -> np.ndarray:
    """Seeded frame distributed by the orthogonal-invariant measure."""
    g = rng.standard_normal((n, k))
    q, r = np.linalg.qr(g)
    return q * np.where(np.diag(r) < 0.0, -1.0, 1.0)


def zero_rows(p: np.ndarray, tol: float = ENTRY_ZERO_TOL) -> tuple:
    """Indices of rows whose entries are all within tol of zero."""
    p = as_matrix(p)
    return tuple(int(i) for i in np.flatnonzero(np.all(np.abs(p) <= tol, axis=1)))


def support_mask(p: np.ndarray, tol: float = ENTRY_ZERO_TOL) -> np.ndarray:
    """Boolean mask of entries strictly above tol (the positive support)."""
    return as_matrix(p) > tol


def is_nonnegative(p: np.ndarray, tol: float = ENTRY_ZERO_TOL) -> bool:
    return bool(np.all(as_matrix(p) >= -tol))


def column_supports(p: np.ndarray, tol: float = ENTRY_ZERO_TOL) -> list:
    """Row-index support of each column.  On a feasible St+ frame the supports
    are pairwise disjoint and nonempty."""
    mask = support_mask(p, tol)
    return [tuple(int(i) for i in np.flatnonzero(mask[:, j])) for j in range(mask.shape[1])]


def random_stiefel_plus(n: int, k: int, rng: Generator, rows_used: int | None = None) -> np.ndarray:
    """Seeded entrywise-nonnegative frame.

    Draws a random number of occupied rows (at least k, at most n), splits
    them into k disjoint nonempty groups, and fills each group with a positive
    unit vector.  Unused rows stay identically zero.
    """
    if not 0 < k <= n:
        raise FrameError(f"need 0 < k <= n, got n={n}, k={k}")
    m = int(rng.integers(k, n + 1)) if rows_used is None else int(rows_used)
    if not k <= m <= n:
        raise FrameError(f"rows_used must lie in [k, n], got {m}")
    rows = rng.permutation(n)[:m]
    # random composition of m rows into k nonempty groups
    cuts = np.sort(rng.choice(np.arange(1, m), size=k - 1, replace=False)) if k > 1 else np.array([], dtype=int)
    groups = np.split(rows, cuts)
    u = np.zeros((n, k))
    for j, g in enumerate(groups):
        vals = rng.uniform(0.2, 1.0, size=len(g))
        u[g, j] = vals / np.linalg.norm(vals)
    return u


def givens_rows(n: int, i: int, j: int, theta: float) -> np.ndarray:
    """Rotation acting on rows i and j of an n-row matrix (left action)."""
    g = np.eye(n)
    c, s = np.cos(theta), np.sin(theta)
    g[i, i] = c
    g[i, j] = -s
    g[j, i] = s
    g[j, j] = c
    return g
