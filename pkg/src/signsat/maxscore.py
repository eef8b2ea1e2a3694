"""Maximum-score objective and its exact global optimum over directions.

The objective is ``rho_hat(q) = n^-1 sum_i 1{w_i'q >= 0} d_i``. Internally
everything works with the more general weighted count

    sum_i  a_i * 1{w_i'q > 0}  +  b_i * 1{w_i'q = 0}

which covers the ``>=`` objective (``a = b = d``), the bootstrap difference
process under either tie convention, and the local sub-problems that appear
around a vertex of the arrangement.

Exact search
------------
``k = 1``
    two directions.
``k = 2``
    an angle sweep: every row contributes a rise and a fall event on the
    circle of directions; between events the pattern is constant.
``k >= 3``
    every face of the arrangement has a vertex (a one-dimensional
    intersection of ``k - 1`` row hyperplanes) in its closure, so all faces
    are reached by solving the ``k - 1`` dimensional problem in the tangent
    space at each vertex. Vertices are visited in order of an upper bound
    and pruned once the bound falls below the incumbent.

Results are always re-evaluated literally at the returned direction, and the
literal value is what gets reported.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
import numpy as np

from . import rng as _rng
from .errors import CapacityError, PreconditionError

EXACT = "exact_arrangement"
RANDOM = "random_search"
GRID = "grid_search"
METHODS = (EXACT, RANDOM, GRID)

# exact-method caps on n by dimension; None means unlimited
DEFAULT_CAPS = {1: None, 2: None, 3: 2000}
DEFAULT_CAP_HIGH_DIM = 40

# relative size below which w'v is treated as zero at a vertex
_VERTEX_TOL = 1e-12
_CHUNK = 256


@dataclass(frozen=True)
class ScoreObjective:
    """Data view ``(w_i, d_i)`` on which the objective is evaluated."""

    w: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        w = np.array(self.w, dtype=float)
        if w.ndim == 1:
            w = w[:, None]
        d = np.array(self.d)
        if w.ndim != 2 or d.shape != (w.shape[0],):
            raise PreconditionError("w must be (n, k) and d of length n")
        if not np.all(np.isfinite(w)):
            raise PreconditionError("w must be finite")
        if not np.isin(d, (-1, 0, 1)).all():
            raise PreconditionError("d must take values in {-1, 0, 1}")
        d = d.astype(np.int64)
        w.setflags(write=False)
        d.setflags(write=False)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "d", d)

    @classmethod
    def from_sample(cls, sample) -> "ScoreObjective":
        return cls(sample.w, sample.d)

    @property
    def n(self) -> int:
        return self.w.shape[0]

    @property
    def k(self) -> int:
        return self.w.shape[1]

    def negated(self) -> "ScoreObjective":
        return ScoreObjective(self.w, -self.d)


@dataclass(frozen=True)
class MaxScoreResult:
    value: float
    argq: np.ndarray
    method: str
    cells_visited: int


# -- literal evaluation ----------------------------------------------------------


def scores(w, q) -> np.ndarray:
    """``w @ q`` accumulated column by column.

    A fixed evaluation order (no BLAS, no fused multiply-add) keeps exact
    zeros exact, e.g. ``w_i'q = 0`` for ``q = (w_i2, -w_i1)``.
    """
    w = np.asarray(w, dtype=float)
    out = w[:, 0] * q[0]
    for j in range(1, w.shape[1]):
        out = out + w[:, j] * q[j]
    return out


def _check_q(q, k):
    q = np.asarray(q, dtype=float).reshape(-1)
    if q.shape != (k,):
        raise PreconditionError(f"q must have length {k}")
    if not np.all(np.isfinite(q)):
        raise PreconditionError("q must be finite")
    if not np.any(q != 0):
        raise PreconditionError("q = 0 is excluded from the parameter set")
    return q


def rho_hat(obj: ScoreObjective, q) -> float:
    """``n^-1 sum_i 1{w_i'q >= 0} d_i`` with ties counted as 1."""
    q = _check_q(q, obj.k)
    on = scores(obj.w, q) >= 0
    return int(obj.d[on].sum()) / obj.n


def _weighted(w, a, b, q):
    s = scores(w, q)
    return a[..., s > 0].sum(axis=-1) + b[..., s == 0].sum(axis=-1)


def _unit(q):
    q = np.asarray(q, dtype=float)
    return q / np.linalg.norm(q)


def _scaled(q):
    """``q`` times a power of two, largest entry in ``[0.5, 1)``; exact."""
    q = np.asarray(q, dtype=float)
    return np.ldexp(q, -math.frexp(float(np.max(np.abs(q))))[1])


def _lex_first(dirs):
    """Index of the lexicographically smallest row of ``dirs``."""
    keys = tuple(dirs[:, j] for j in range(dirs.shape[1] - 1, -1, -1))
    return int(np.lexsort(keys)[0])


# -- two dimensions: angle sweep --------------------------------------------------


class AngleSweep:
    """Event structure of the arrangement of 2D rows, reusable across weights.

    ``values(a, b)`` returns the weighted objective on every face (each
    boundary ray and each open arc between consecutive rays), for one weight
    vector or a stack of them, in ``O(n)`` per weight vector after the
    ``O(n log n)`` setup.
    """

    def __init__(self, w):
        w = np.asarray(w, dtype=float)
        self.w = w
        self.nonzero = np.flatnonzero((w[:, 0] != 0) | (w[:, 1] != 0))
        self.zero = np.flatnonzero((w[:, 0] == 0) & (w[:, 1] == 0))
        wz = w[self.nonzero]
        m = wz.shape[0]
        if m == 0:
            self.groups = 0
            return
        # rise: w'q turns positive; fall: turns back to zero
        rise = np.column_stack([wz[:, 1], -wz[:, 0]])
        fall = -rise
        vec = np.vstack([rise, fall])
        ang = np.arctan2(vec[:, 1], vec[:, 0])
        ang[ang == np.pi] = -np.pi
        kind = np.r_[np.zeros(m, dtype=np.int8), np.ones(m, dtype=np.int8)]
        row = np.r_[np.arange(m), np.arange(m)]
        order = np.lexsort((kind, ang))
        vec, ang, kind, row = vec[order], ang[order], kind[order], row[order]

        starts = [0]
        for i in range(1, 2 * m):
            head = vec[starts[-1]]
            r = wz[row[i]]
            same = ang[i] - ang[starts[-1]] < 1e-9 and r[0] * head[0] + r[1] * head[1] == 0
            if not same:
                starts.append(i)
        self.starts = np.asarray(starts)
        self.groups = len(starts)
        self.row = row
        self.kind = kind
        self.ang = ang[self.starts]
        reps = vec[self.starts]

        pos = np.empty(2 * m, dtype=np.int64)
        pos[order] = np.arange(2 * m)
        # rows with a fall before their rise are positive at the sweep start
        self.initially_on = np.flatnonzero(pos[m:] < pos[:m])

        nxt = np.roll(np.arange(self.groups), -1)
        gap = (self.ang[nxt] - self.ang) % (2 * np.pi)
        units = reps / np.linalg.norm(reps, axis=1)[:, None]
        mids = units + units[nxt]
        half_turn = np.abs(gap - np.pi) < 1e-9
        mids[half_turn] = np.column_stack([-units[half_turn, 1], units[half_turn, 0]])
        dirs = np.empty((2 * self.groups, 2))
        dirs[0::2] = reps
        dirs[1::2] = mids
        self.directions = dirs
        self.is_open = np.tile([False, True], self.groups)

    @property
    def size(self) -> int:
        return 2 * self.groups if self.groups else 1

    def candidate_directions(self) -> np.ndarray:
        if not self.groups:
            return np.array([[1.0, 0.0]])
        return self.directions

    def values(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        single = a.ndim == 1
        a2 = np.atleast_2d(a)
        b2 = np.atleast_2d(b)
        const = b2[:, self.zero].sum(axis=1)
        if not self.groups:
            out = const[:, None]
            return out[0] if single else out
        an = a2[:, self.nonzero][:, self.row]
        bn = b2[:, self.nonzero][:, self.row]
        is_rise = self.kind == 0
        rise_a = np.add.reduceat(np.where(is_rise, an, 0.0), self.starts, axis=1)
        fall_a = np.add.reduceat(np.where(is_rise, 0.0, an), self.starts, axis=1)
        edge_b = np.add.reduceat(bn, self.starts, axis=1)
        p0 = a2[:, self.nonzero][:, self.initially_on].sum(axis=1)
        after = p0[:, None] + np.cumsum(rise_a - fall_a, axis=1)
        before = after - rise_a + fall_a
        out = np.empty((a2.shape[0], 2 * self.groups))
        out[:, 0::2] = before + edge_b - fall_a
        out[:, 1::2] = after
        out += const[:, None]
        return out[0] if single else out


def _literal_best(w, a, b, dirs):
    """Best candidate by literal evaluation, in chunks."""
    vals = np.empty(dirs.shape[0])
    for lo in range(0, dirs.shape[0], _CHUNK):
        blk = dirs[lo:lo + _CHUNK]
        s = np.column_stack([scores(w, q) for q in blk])
        vals[lo:lo + _CHUNK] = a @ (s > 0) + b @ (s == 0)
    return vals


def _pick(vals, dirs, is_open=None, prefer_open=False):
    best = vals.max()
    idx = np.flatnonzero(vals == best)
    if prefer_open and is_open is not None and is_open[idx].any():
        idx = idx[is_open[idx]]
    units = dirs[idx] / np.linalg.norm(dirs[idx], axis=1)[:, None]
    j = idx[_lex_first(units)]
    return float(best), j


def _solve_2d(w, a, b, prefer_open):
    sweep = AngleSweep(w)
    dirs = sweep.candidate_directions()
    vals = sweep.values(a, b)
    is_open = sweep.is_open if sweep.groups else np.array([True])
    value, j = _pick(vals, dirs, is_open, prefer_open)
    q = dirs[j]
    if _weighted(w, a, b, q) != value:
        vals = _literal_best(w, a, b, dirs)
        value, j = _pick(vals, dirs, is_open, prefer_open)
        q = dirs[j]
    return value, q, bool(is_open[j]), sweep.size


# -- general dimension ---------------------------------------------------------


def _complement_basis(v):
    """Orthonormal basis (columns) of the plane orthogonal to ``v``."""
    _, _, vt = np.linalg.svd(v[None, :])
    return vt[1:].T


def _vertices(w):
    """Unit null vectors of all rank-deficient (k-1)-row subsets, both signs."""
    m, k = w.shape
    out = []
    if k == 3:
        i, j = np.triu_indices(m, 1)
        cr = np.cross(w[i], w[j])
        nrm = np.linalg.norm(cr, axis=1)
        scale = np.linalg.norm(w[i], axis=1) * np.linalg.norm(w[j], axis=1)
        keep = nrm > 1e-13 * scale
        cr = np.array([_scaled(c) for c in cr[keep]]).reshape(-1, 3)
        out = np.vstack([cr, -cr]) if cr.size else np.empty((0, 3))
        return out
    for idx in itertools.combinations(range(m), k - 1):
        sub = w[list(idx)]
        _, sv, vt = np.linalg.svd(sub)
        if sv[-1] <= 1e-13 * sv[0]:
            continue
        v = vt[-1]
        out.append(v)
        out.append(-v)
    return np.array(out) if out else np.empty((0, k))


def _solve_vertices(w, a, b, prefer_open):
    m, k = w.shape
    verts = _vertices(w)
    norms = np.linalg.norm(w, axis=1)
    best = None
    visited = 0
    if verts.shape[0] == 0:
        return None
    tol = _VERTEX_TOL * norms
    bounds = np.empty(verts.shape[0])
    for lo in range(0, verts.shape[0], 4096):
        S = w @ verts[lo:lo + 4096].T
        on = S > tol[:, None]
        edge = np.abs(S) <= tol[:, None]
        bounds[lo:lo + 4096] = a @ on + np.maximum(np.maximum(a, b), 0.0) @ edge
    order = np.argsort(-bounds, kind="stable")
    for vi in order:
        if best is not None and bounds[vi] < best[0]:
            break
        v = verts[vi]
        s = scores(w, v)
        edge = np.abs(s) <= tol
        others = ~edge
        basis = _complement_basis(v)
        local = w[edge] @ basis
        val, p, is_open, cells = _solve(local, a[edge], b[edge], allow_zero=True,
                                        prefer_open=True)
        visited += cells
        if np.any(p != 0):
            step = 0.5
            if others.any():
                step = 0.5 * min(0.5, float(np.min(np.abs(s[others]) / norms[others])))
            q = v + step * (basis @ p)
        else:
            q = v.copy()
            is_open = False
        q = _scaled(q)
        lit = float(_weighted(w, a, b, q))
        cand = (lit, is_open, q)
        if best is None or _better(cand, best, prefer_open):
            best = cand
    return best[0], best[2], best[1], visited


def _better(c, inc, prefer_open):
    if c[0] != inc[0]:
        return c[0] > inc[0]
    if prefer_open and c[1] != inc[1]:
        return c[1]
    return tuple(c[2]) < tuple(inc[2])


def _solve(w, a, b, allow_zero=False, prefer_open=False):
    """Maximise the weighted count over directions.

    Returns ``(value, q, q_in_open_cell, cells_visited)``. With ``allow_zero``
    the direction ``q = 0`` (all rows on the boundary) is also a candidate and
    is returned as the zero vector.
    """
    m, k = w.shape
    zero_rows = ~np.any(w != 0, axis=1)
    const = float(b[zero_rows].sum())
    keep = ~zero_rows
    w, a, b = w[keep], a[keep], b[keep]

    options = []
    if allow_zero:
        options.append((const + float(b.sum()), np.zeros(k), False, 1))

    if w.shape[0] == 0:
        e = np.zeros(k)
        e[0] = 1.0
        options.append((const, e, True, 1))
    elif k == 1:
        for sgn in (-1.0, 1.0):
            q = np.array([sgn])
            options.append((const + float(_weighted(w, a, b, q)), q, True, 1))
    elif k == 2:
        val, q, is_open, cells = _solve_2d(w, a, b, prefer_open)
        options.append((const + val, q, is_open, cells))
    else:
        rank = np.linalg.matrix_rank(w)
        if rank < k:
            # q's component orthogonal to the row space is irrelevant
            _, _, vt = np.linalg.svd(w)
            basis = vt[:rank].T
            val, x, is_open, cells = _solve(w @ basis, a, b, allow_zero=True,
                                            prefer_open=prefer_open)
            q = basis @ x if np.any(x != 0) else vt[-1]
            options.append((const + val, _unit(q), is_open and np.any(x != 0), cells))
        else:
            val, q, is_open, cells = _solve_vertices(w, a, b, prefer_open)
            options.append((const + val, q, is_open, cells))

    best = options[0]
    for cand in options[1:]:
        if _better((cand[0], cand[2], cand[1]), (best[0], best[2], best[1]), prefer_open):
            best = cand
    cells = sum(o[3] for o in options)
    return best[0], best[1], best[2], cells


# -- public optimisers ------------------------------------------------------------


def _cap_for(k, caps):
    caps = dict(DEFAULT_CAPS if caps is None else caps)
    return caps.get(k, caps.get("high", DEFAULT_CAP_HIGH_DIM))


def check_capacity(n: int, k: int, caps=None) -> None:
    cap = _cap_for(k, caps)
    if cap is not None and n > cap:
        raise CapacityError(
            f"exact arrangement search is capped at n <= {cap} for k = {k} (got n = {n}); "
            f"use method={RANDOM!r} or {GRID!r}, or raise the cap"
        )


def _search_directions(k, method, samples, seed):
    if method == RANDOM:
        g = _rng.substream(seed, _rng.SEARCH, 0)
        q = g.standard_normal((samples, k))
        q = q[np.any(q != 0, axis=1)]
        return q / np.linalg.norm(q, axis=1)[:, None]
    if k == 1:
        return np.array([[-1.0], [1.0]])
    if k == 2:
        th = np.linspace(-np.pi, np.pi, samples, endpoint=False)
        return np.column_stack([np.cos(th), np.sin(th)])
    per_axis = max(3, int(round(samples ** (1.0 / k))))
    axis = np.linspace(-1.0, 1.0, per_axis)
    pts = np.array(list(itertools.product(axis, repeat=k)))
    pts = pts[np.any(pts != 0, axis=1)]
    return pts / np.linalg.norm(pts, axis=1)[:, None]


def _optimise(obj, method, caps, samples, seed):
    if obj.n < 1:
        raise PreconditionError("need at least one row")
    if method not in METHODS:
        raise PreconditionError(f"unknown method {method!r}")
    a = obj.d.astype(float)
    if method == EXACT:
        if obj.k >= 3:
            check_capacity(obj.n, obj.k, caps)
        total, q, _, cells = _solve(obj.w, a, a, prefer_open=True)
    else:
        dirs = _search_directions(obj.k, method, samples, seed)
        vals = _literal_best(obj.w, a, a, dirs)
        total, j = _pick(vals, dirs)
        q, cells = dirs[j], dirs.shape[0]
    value = int(round(total)) / obj.n
    unit = _unit(q)
    # normalising can move q off a boundary it has to sit on; a power-of-two
    # rescaling cannot
    q = unit if rho_hat(obj, unit) == value else _scaled(q)
    check = rho_hat(obj, q)
    if check != value:
        # the literal value at q is what q attains
        value = check
    return MaxScoreResult(value=value, argq=q, method=method, cells_visited=int(cells))


def maximize(obj: ScoreObjective, method: str = EXACT, *, caps=None,
             samples: int = 2000, seed: int = 0) -> MaxScoreResult:
    """``sup_q rho_hat(q)`` over ``q != 0``.

    ``method=EXACT`` returns the global optimum; ``RANDOM`` and ``GRID``
    return the best of ``samples`` directions (a lower bound). Ties go to
    directions inside open cells first, then to the lexicographically
    smallest. ``argq`` has unit norm unless normalising would move it off a
    boundary it must lie on; it is then only rescaled by a power of two.
    """
    return _optimise(obj, method, caps, samples, seed)


def minimize(obj: ScoreObjective, method: str = EXACT, *, caps=None,
             samples: int = 2000, seed: int = 0) -> MaxScoreResult:
    """``inf_q rho_hat(q)``, computed as ``-sup`` of the objective with ``-d``."""
    res = _optimise(obj.negated(), method, caps, samples, seed)
    value = -res.value
    return MaxScoreResult(value=value if value != 0 else 0.0, argq=res.argq,
                          method=res.method, cells_visited=res.cells_visited)


def sup_weighted(w, a, b, method: str = EXACT, *, caps=None, samples: int = 2000,
                 seed: int = 0) -> np.ndarray:
    """``sup_q`` of the weighted count for each row of the weight stacks ``a, b``.

    For ``k = 2`` a single sweep is shared by all weight vectors; each
    optimum is re-checked literally and recomputed on mismatch.
    """
    w = np.asarray(w, dtype=float)
    if w.ndim == 1:
        w = w[:, None]
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    reps, k = a.shape[0], w.shape[1]
    out = np.empty(reps)
    if method != EXACT:
        dirs = _search_directions(k, method, samples, seed)
        for r in range(reps):
            out[r] = _literal_best(w, a[r], b[r], dirs).max()
        return out
    if k == 2:
        sweep = AngleSweep(w)
        dirs = sweep.candidate_directions()
        vals = sweep.values(a, b)
        best = vals.argmax(axis=1)
        out = vals[np.arange(reps), best]
        for r in range(reps):
            if _weighted(w, a[r], b[r], dirs[best[r]]) != out[r]:
                out[r] = _literal_best(w, a[r], b[r], dirs).max()
        return out
    if k >= 3:
        check_capacity(w.shape[0], k, caps)
    for r in range(reps):
        out[r] = _solve(w, a[r], b[r])[0]
    return out
