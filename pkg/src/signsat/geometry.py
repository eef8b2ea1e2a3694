"""Convex geometry of the moment curves.

For an index shift ``t`` the curve ``a -> p(t, a) = (F(a), F(t+a), F(a) F(t+a))``
collects the choice probabilities of one individual with fixed effect ``a``.
Two shifts ``s`` and ``t`` are observationally equivalent at a covariate value
exactly when the convex hulls ``A(s)`` and ``A(t)`` of their curves meet.

This module produces certificates for both outcomes:

* :func:`certify_disjoint` builds an explicit separating vector
  ``v = (v1, 1 - v1, -1)`` from the log-odds gaps
  ``inf_a [G(s+a) - G(a)]`` and ``sup_x [G(t+x) - G(x)]``;
* :func:`certify_intersect` finds convex weights on two discretised curves
  whose mixtures coincide, by solving a small phase-one LP.

A discretised hull is a subset of the true hull, so an intersection found on
a grid is a valid witness, while an infeasible LP proves nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import (
    InternalInconsistencyError,
    MissingWindowError,
    PreconditionError,
    UnclassifiableLinkError,
)
from .links import LinkFunction, PeriodClass, classify_period
from .simplex import phase_one

DISJOINT = "disjoint"
INTERSECTING = "intersecting"
UNKNOWN = "unknown"

DEFAULT_POINTS = 10_000
DEFAULT_MARGIN = 1e-3
# cdf values closer than this to 0 or 1 are not resolved well enough to
# enter an intersection witness
DEFAULT_FLOOR = 1e-8
WITNESS_TOL = 1e-7
WEIGHT_SUM_TOL = 1e-9
CONSTANT_WINDOW = (-20.0, 20.0)


@dataclass(frozen=True)
class WindowSpec:
    """Closed interval ``[low, high]`` sampled at ``points`` equispaced values."""

    low: float
    high: float
    points: int = DEFAULT_POINTS

    def __post_init__(self):
        if not (math.isfinite(self.low) and math.isfinite(self.high) and self.high > self.low):
            raise PreconditionError(f"invalid window [{self.low}, {self.high}]")
        if self.points < 2:
            raise PreconditionError("a window needs at least two points")

    def grid(self) -> np.ndarray:
        return np.linspace(self.low, self.high, self.points)


@dataclass(frozen=True)
class MomentVector:
    v1: float
    v2: float
    v3: float

    def as_array(self) -> np.ndarray:
        return np.array([self.v1, self.v2, self.v3])


@dataclass(frozen=True)
class GapSummary:
    """Extremes of the log-odds gaps for a pair ``s > t > 0``.

    ``exact`` is true when the extremes over the whole real line were
    obtained analytically (constant ``G'``) or through the periodic
    reduction to one period; windowed evaluations of non-periodic links
    are flagged ``exact=False``.
    """

    s_inf: float
    t_sup: float
    window: WindowSpec
    exact: bool
    period_class: PeriodClass

    @property
    def criterion_holds(self) -> bool:
        return self.s_inf > self.t_sup > 0


@dataclass
class HullCertificate:
    """Verdict on ``A(s) ∩ A(t)`` together with its witness."""

    verdict: str
    s: float
    t: float
    separator: Optional[np.ndarray] = None
    intersection_weights: Optional[tuple] = None
    s_grid: Optional[np.ndarray] = None
    t_grid: Optional[np.ndarray] = None
    residual: Optional[float] = None
    relative_residual: Optional[float] = None
    gap: Optional[GapSummary] = None
    diagnostic: str = ""
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.separator is not None and self.intersection_weights is not None:
            raise InternalInconsistencyError("a certificate cannot carry both witnesses")

    def to_record(self) -> dict:
        rec = {"verdict": self.verdict, "s": self.s, "t": self.t, "diagnostic": self.diagnostic}
        if self.separator is not None:
            rec["separator"] = [float(v) for v in self.separator]
        if self.intersection_weights is not None:
            lam, mu = self.intersection_weights
            ls, lt = np.flatnonzero(lam), np.flatnonzero(mu)
            rec["lambda"] = {"alpha": self.s_grid[ls].tolist(), "weight": lam[ls].tolist()}
            rec["mu"] = {"alpha": self.t_grid[lt].tolist(), "weight": mu[lt].tolist()}
        if self.residual is not None:
            rec["residual"] = self.residual
            rec["relative_residual"] = self.relative_residual
        if self.gap is not None:
            rec["gap"] = {
                "s_inf": self.gap.s_inf,
                "t_sup": self.gap.t_sup,
                "exact": self.gap.exact,
                "window": [self.gap.window.low, self.gap.window.high, self.gap.window.points],
            }
        rec.update(self.extra)
        return rec


# -- moment curves -------------------------------------------------------------


def moment_vector(link: LinkFunction, t: float, alpha: float) -> MomentVector:
    a = link.cdf(alpha)
    b = link.cdf(t + alpha)
    return MomentVector(a, b, a * b)


def moment_curve(link: LinkFunction, t: float, alphas) -> np.ndarray:
    """Stack ``p(t, a)`` for every ``a`` in ``alphas`` as a ``(3, m)`` array."""
    alphas = np.asarray(alphas, dtype=float)
    a = np.atleast_1d(link.cdf(alphas))
    b = np.atleast_1d(link.cdf(t + alphas))
    return np.vstack([a, b, a * b])


def support_gap(link: LinkFunction, s: float, t: float, v, grid) -> float:
    """``max_a v'p(s, a) - min_x v'p(t, x)`` over a common grid."""
    v = np.asarray(v, dtype=float)
    return float((v @ moment_curve(link, s, grid)).max() - (v @ moment_curve(link, t, grid)).min())


# -- gap extremes ------------------------------------------------------------------


def _period_class(link):
    try:
        return classify_period(link)
    except UnclassifiableLinkError:
        return PeriodClass("nonperiodic")


def _gap(link, shift):
    return lambda x: np.asarray(link.g(shift + x)) - np.asarray(link.g(x))


def _extreme(f, grid, maximise, clip=None):
    """Grid extreme of ``f`` polished by bounded Brent search around it."""
    vals = np.asarray(f(grid), dtype=float)
    if maximise:
        vals = -vals
    i = int(np.argmin(vals))
    best = float(vals[i])
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid.size - 1)]
    if clip is None and (i == 0 or i == grid.size - 1):
        step = grid[1] - grid[0]
        lo, hi = grid[i] - step, grid[i] + step
    if hi > lo:
        sign = -1.0 if maximise else 1.0
        res = minimize_scalar(
            lambda x: sign * float(f(x)), bounds=(lo, hi), method="bounded",
            options={"xatol": 1e-12},
        )
        if res.fun < best:
            best = float(res.fun)
    return -best if maximise else best


def gap_summary(link: LinkFunction, s: float, t: float, window: Optional[WindowSpec] = None) -> GapSummary:
    """Compute ``inf_a [G(s+a) - G(a)]`` and ``sup_x [G(t+x) - G(x)]``.

    Constant ``G'`` is handled in closed form. For periodic ``G'`` with
    minimal period ``eta`` both gap functions are ``eta``-periodic, so one
    period (or the supplied window) is searched on a grid and polished.
    Non-periodic links are only searched on ``window``, which is then
    mandatory, and the result is flagged ``exact=False``.
    """
    if not (s > t > 0):
        raise PreconditionError(f"gap_summary needs s > t > 0, got s={s}, t={t}")
    pc = _period_class(link)
    if pc.is_constant:
        slope = float(link.g_dot(0.0))
        win = window or WindowSpec(*CONSTANT_WINDOW)
        return GapSummary(s * slope, t * slope, win, True, pc)
    if pc.is_periodic:
        win = window or WindowSpec(0.0, pc.eta, DEFAULT_POINTS)
        grid = win.grid()
        s_inf = _extreme(_gap(link, s), grid, maximise=False)
        t_sup = _extreme(_gap(link, t), grid, maximise=True)
        return GapSummary(s_inf, t_sup, win, True, pc)
    if window is None:
        raise MissingWindowError(f"{link.label} has non-periodic G'; supply a window")
    grid = window.grid()
    s_inf = _extreme(_gap(link, s), grid, maximise=False, clip=True)
    t_sup = _extreme(_gap(link, t), grid, maximise=True, clip=True)
    return GapSummary(s_inf, t_sup, window, False, pc)


# -- disjointness ----------------------------------------------------------------


def separator_bounds(gap: GapSummary) -> tuple:
    """Open interval of admissible ``v1`` for the separator ``(v1, 1-v1, -1)``."""
    lower = 1.0 / -math.expm1(-gap.s_inf)
    upper = 1.0 / -math.expm1(-gap.t_sup)
    return lower, upper


def _separator_margins(link, shift, v1, grid):
    # v'p(shift, a) = (F(shift+a) - F(a)) * (r(a) - v1) with
    # r(a) = 1 / (1 - exp(G(a) - G(shift+a))); the first factor is positive.
    gaps = np.asarray(link.g(shift + grid)) - np.asarray(link.g(grid))
    ratio = 1.0 / -np.expm1(-gaps)
    return ratio - v1


def certify_disjoint(
    link: LinkFunction,
    s: float,
    t: float,
    window: Optional[WindowSpec] = None,
    margin: float = DEFAULT_MARGIN,
) -> HullCertificate:
    """Prove ``A(s) ∩ A(t) = ∅`` with a separating vector, or return unknown.

    Requires ``s > t > 0``. When the gap criterion
    ``inf_a [G(s+a)-G(a)] > sup_x [G(t+x)-G(x)] > 0`` holds (with an extra
    ``margin`` when the extremes are only windowed estimates), ``v1`` is
    taken at the midpoint of the admissible interval and the strict sign
    condition ``v'p(s,a) < 0 < v'p(t,x)`` is checked at every point of the
    window grid.
    """
    if not (s > t > 0):
        raise PreconditionError(f"certify_disjoint needs s > t > 0, got s={s}, t={t}")
    gap = gap_summary(link, s, t, window)
    slack = gap.s_inf - gap.t_sup
    if not gap.criterion_holds or (not gap.exact and slack <= margin):
        return HullCertificate(UNKNOWN, s, t, gap=gap,
                               diagnostic=f"gap criterion not met (slack {slack:.6g})")
    lower, upper = separator_bounds(gap)
    v1 = 0.5 * (lower + upper)
    if not lower < v1 < upper:
        return HullCertificate(UNKNOWN, s, t, gap=gap,
                               diagnostic="admissible separator interval is empty in floating point")
    grid = gap.window.grid()
    s_marg = _separator_margins(link, s, v1, grid)
    t_marg = _separator_margins(link, t, v1, grid)
    # v'p(s, .) < 0  <=>  r_s < v1 ;  v'p(t, .) > 0  <=>  r_t > v1
    if not (np.all(s_marg < 0) and np.all(t_marg > 0)):
        raise InternalInconsistencyError(
            f"separator for s={s}, t={t} failed its own verification"
        )
    sep = np.array([v1, 1.0 - v1, -1.0])
    return HullCertificate(
        DISJOINT, s, t, separator=sep, gap=gap,
        diagnostic="separating vector verified on window grid",
        extra={"separator_interval": [lower, upper],
               "min_margin": float(min(-s_marg.max(), t_marg.min()))},
    )


# -- intersection ----------------------------------------------------------------


def default_grid() -> np.ndarray:
    return np.linspace(-10.0, 10.0, 401)


def _resolved(link, shift, grid, floor):
    a = np.atleast_1d(link.cdf(grid))
    b = np.atleast_1d(link.cdf(shift + grid))
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    return (lo >= floor) & (hi <= 1.0 - floor)


def _witness_residuals(Ps, Pt, lam, mu):
    rs, rt = Ps @ lam, Pt @ mu
    diff = np.abs(rs - rt)
    absolute = max(float(diff.max()), abs(lam.sum() - 1.0), abs(mu.sum() - 1.0))
    # coordinates live in [0, 1]; resolution is relative to the nearer end
    denom = np.minimum(np.maximum(np.abs(rs), np.abs(rt)),
                       np.maximum(np.abs(1.0 - rs), np.abs(1.0 - rt)))
    rel = np.where(denom > 0, diff / np.where(denom > 0, denom, 1.0), 0.0)
    return absolute, float(rel.max())


def _polish(A, b, x):
    support = np.flatnonzero(x > 0)
    if support.size == 0:
        return x
    sol, *_ = np.linalg.lstsq(A[:, support], b, rcond=None)
    if np.any(sol < -1e-12):
        return x
    out = np.zeros_like(x)
    out[support] = np.clip(sol, 0.0, None)
    return out


def certify_intersect(
    link: LinkFunction,
    s: float,
    t: float,
    grid=None,
    floor: float = DEFAULT_FLOOR,
) -> HullCertificate:
    """Search for convex weights making two discretised hulls meet.

    Grid points at which a cdf value is within ``floor`` of 0 or 1 are
    dropped: there the curve is not resolved in double precision and any
    "intersection" would be an artefact of absolute tolerances. A witness
    is accepted only if its weights are non-negative, each block sums to 1
    within ``1e-9``, and the two mixtures agree to ``1e-7`` both absolutely
    and relative to each coordinate's magnitude.
    """
    if not (math.isfinite(s) and math.isfinite(t)):
        raise PreconditionError("s and t must be finite")
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or not np.all(np.isfinite(grid)):
        raise PreconditionError("certify_intersect needs a finite grid of at least two points")
    if np.unique(grid).size < 2:
        raise PreconditionError("degenerate grid: all points coincide")
    gs = grid[_resolved(link, s, grid, floor)]
    gt = grid[_resolved(link, t, grid, floor)]
    if gs.size == 0 or gt.size == 0:
        return HullCertificate(UNKNOWN, s, t, diagnostic="no resolved grid points")
    Ps, Pt = moment_curve(link, s, gs), moment_curve(link, t, gt)
    ms, mt = gs.size, gt.size
    A = np.vstack([
        np.hstack([Ps, -Pt]),
        np.r_[np.ones(ms), np.zeros(mt)],
        np.r_[np.zeros(ms), np.ones(mt)],
    ])
    b = np.array([0.0, 0.0, 0.0, 1.0, 1.0])
    try:
        res = phase_one(A, b)
    except np.linalg.LinAlgError as exc:
        return HullCertificate(UNKNOWN, s, t, s_grid=gs, t_grid=gt,
                               diagnostic=f"LP numerical failure: {exc}")
    if not res.feasible:
        return HullCertificate(UNKNOWN, s, t, s_grid=gs, t_grid=gt,
                               diagnostic=f"LP infeasible on grid ({res.status}, "
                                          f"infeasibility {res.infeasibility:.3g})")
    best = None
    for x in (res.x, _polish(A, b, res.x)):
        lam, mu = x[:ms], x[ms:]
        absolute, rel = _witness_residuals(Ps, Pt, lam, mu)
        if best is None or (absolute, rel) < best[:2]:
            best = (absolute, rel, lam, mu)
    absolute, rel, lam, mu = best
    ok = (
        np.all(lam >= 0) and np.all(mu >= 0)
        and abs(lam.sum() - 1) <= WEIGHT_SUM_TOL and abs(mu.sum() - 1) <= WEIGHT_SUM_TOL
        and absolute <= WITNESS_TOL and rel <= WITNESS_TOL
    )
    if not ok:
        return HullCertificate(UNKNOWN, s, t, s_grid=gs, t_grid=gt, residual=absolute,
                               relative_residual=rel,
                               diagnostic="LP witness failed verification")
    return HullCertificate(
        INTERSECTING, s, t, intersection_weights=(lam, mu), s_grid=gs, t_grid=gt,
        residual=absolute, relative_residual=rel,
        diagnostic=f"convex weights found by phase-one simplex ({res.iterations} iterations)",
    )


# -- the epsilon construction for periodic G' ---------------------------------------


def _is_multiple(x, eta, tol=1e-9):
    k = x / eta
    return round(k) >= 1 and abs(k - round(k)) <= tol


def _lipschitz(link, intervals, points):
    grid = np.concatenate([np.linspace(lo, hi, points) for lo, hi in intervals])
    # grid maximum of G' under-estimates the supremum slightly
    return float(np.max(link.g_dot(grid))) * (1.0 + 1e-3)


def find_epsilon(
    link: LinkFunction,
    s: float,
    t: float,
    points: int = DEFAULT_POINTS,
    verify_points: int = 100_000,
) -> Optional[float]:
    """Shrink ``(s, t)`` towards each other while keeping the gap criterion.

    For periodic ``G'`` with minimal period ``eta`` and ``s/eta`` or
    ``t/eta`` a positive integer, returns
    ``eps = min(1, (s-t)/4, Delta / (4 kappa))`` where ``Delta`` is the
    positive one-period margin and ``kappa`` a Lipschitz bound of ``G`` on
    the relevant compact set, after checking
    ``inf_a [G(s-eps+a)-G(a)] > sup_x [G(t+eps+x)-G(x)] > 0`` on a
    ``verify_points`` grid over one period. Returns ``None`` if that check
    fails. Constant ``G'`` always admits ``eps = min(1, (s-t)/4)``.
    """
    if not (s > t > 0):
        raise PreconditionError(f"find_epsilon needs s > t > 0, got s={s}, t={t}")
    pc = classify_period(link)
    delta = s - t
    if pc.is_constant:
        eps = min(1.0, delta / 4.0)
        slope = float(link.g_dot(0.0))
        return eps if slope * (s - eps) > slope * (t + eps) > 0 else None
    if not pc.is_periodic:
        raise PreconditionError(f"{link.label}: find_epsilon needs periodic G'")
    eta = pc.eta
    r = np.linspace(0.0, eta, points)
    if _is_multiple(s, eta):
        margin = _extreme(lambda x: link.g(x) - link.g(x - delta), r, maximise=False)
        kappa = _lipschitz(link, [(-1.0, eta), (-delta, eta + 1.0 - delta)], points)
    elif _is_multiple(t, eta):
        margin = _extreme(lambda x: link.g(delta + x) - link.g(x), r, maximise=False)
        kappa = _lipschitz(link, [(0.0, eta + 1.0), (delta, eta + 1.0 + delta)], points)
    else:
        raise PreconditionError(
            f"neither s/eta nor t/eta is an integer (eta={eta}, s={s}, t={t})"
        )
    if not margin > 0:
        return None
    eps = min(1.0, delta / 4.0, margin / (4.0 * kappa))
    check = gap_summary(link, s - eps, t + eps, WindowSpec(0.0, eta, verify_points))
    return eps if check.criterion_holds else None


# -- dispatcher ---------------------------------------------------------------------


@dataclass(frozen=True)
class HullOptions:
    window: Optional[WindowSpec] = None
    grid: Optional[np.ndarray] = None
    margin: float = DEFAULT_MARGIN
    floor: float = DEFAULT_FLOOR


def hull_status(link: LinkFunction, s: float, t: float, options: Optional[HullOptions] = None) -> HullCertificate:
    """Try the separator first, then the LP; first definitive verdict wins.

    The hull pair is symmetric in ``(s, t)``, and ``A(-x)`` is ``A(x)`` with
    its first two coordinates swapped, so pairs of negative shifts are
    reduced to their absolute values before the separator is attempted.
    """
    options = options or HullOptions()
    hi, lo = max(s, t), min(s, t)
    if lo < 0 and hi < 0:
        hi, lo = -lo, -hi
    if hi > lo > 0:
        try:
            cert = certify_disjoint(link, hi, lo, options.window, options.margin)
        except MissingWindowError:
            cert = None
        if cert is not None and cert.verdict == DISJOINT:
            cert.extra["requested"] = [s, t]
            return cert
    cert = certify_intersect(link, s, t, options.grid, options.floor)
    return cert


def delta_scan(link: LinkFunction, t: float, deltas, grid=None, floor: float = DEFAULT_FLOOR) -> list:
    """``certify_intersect(link, t + d, t)`` for every ``d`` in ``deltas``."""
    return [(float(d), certify_intersect(link, t + d, t, grid, floor)) for d in deltas]
