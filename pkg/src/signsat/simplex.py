"""Dense phase-one simplex for small feasibility problems.

Solves ``find x >= 0 with A x = b`` for problems with a handful of rows and
up to a few thousand columns, which is exactly the shape of the convex-hull
intersection programs built in :mod:`signsat.geometry`. The basis is
refactorised from scratch at every iteration, trading speed for freedom from
drift; with five rows that costs nothing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class PhaseOneResult:
    feasible: bool
    x: np.ndarray
    infeasibility: float
    iterations: int
    status: str


def phase_one(A, b, tol=1e-11, feas_tol=1e-10, max_iter=None) -> PhaseOneResult:
    """Minimise the sum of artificial variables for ``A x = b, x >= 0``.

    Parameters
    ----------
    A : (m, n) array_like
    b : (m,) array_like
    tol : float
        Reduced-cost and pivot tolerance (after row equilibration).
    feas_tol : float
        The problem is declared feasible when the optimal sum of
        artificials is at most this value (in equilibrated units).
    max_iter : int, optional
        Iteration cap; defaults to ``50 * (m + n)``.

    Returns
    -------
    PhaseOneResult
        ``x`` is a basic solution of the original columns (zero-filled if
        infeasible).
    """
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    m, n = A.shape
    flip = b < 0
    A[flip] *= -1.0
    b[flip] *= -1.0
    scale = np.maximum(np.abs(A).max(axis=1), np.abs(b))
    scale[scale == 0] = 1.0
    A /= scale[:, None]
    b /= scale

    M = np.hstack([A, np.eye(m)])
    cost = np.r_[np.zeros(n), np.ones(m)]
    basis = list(range(n, n + m))
    if max_iter is None:
        max_iter = 50 * (m + n)

    degenerate_run = 0
    status = "iteration_limit"
    it = 0
    for it in range(1, max_iter + 1):
        B = M[:, basis]
        xb = np.linalg.solve(B, b)
        y = np.linalg.solve(B.T, cost[basis])
        reduced = cost - M.T @ y
        reduced[basis] = 0.0
        candidates = np.flatnonzero(reduced < -tol)
        if candidates.size == 0:
            status = "optimal"
            break
        if degenerate_run > 2 * m:
            # Bland's rule once progress stalls
            enter = int(candidates[0])
        else:
            enter = int(candidates[np.argmin(reduced[candidates])])
        direction = np.linalg.solve(B, M[:, enter])
        positive = direction > tol
        if not positive.any():
            status = "unbounded"
            break
        ratios = np.full(m, np.inf)
        ratios[positive] = np.maximum(xb[positive], 0.0) / direction[positive]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + tol * max(1.0, best))
        leave = int(min(ties, key=lambda i: basis[i]))
        degenerate_run = degenerate_run + 1 if best <= tol else 0
        basis[leave] = enter

    B = M[:, basis]
    xb = np.clip(np.linalg.solve(B, b), 0.0, None)
    full = np.zeros(n + m)
    full[basis] = xb
    infeasibility = float(full[n:].sum())
    feasible = status == "optimal" and infeasibility <= feas_tol
    x = full[:n] if feasible else np.zeros(n)
    return PhaseOneResult(feasible, x, infeasibility, it, status)
