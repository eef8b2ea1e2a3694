"""Population identification diagnostics.

``R(b) = P(sgn(W'beta) != sgn(W'b))`` with ``sgn(0) = 0``, the masses
``P(W'b > 0)``, ``P(W'b < 0)``, ``P(W'b = 0)``, and the verdict combining
them: a candidate ``b`` is observationally equivalent to ``beta`` exactly when
both masses of ``b`` are positive and ``R(b) = 0``, provided ``beta`` itself
has both masses positive.

Closed forms are available for the uniform example (``W`` uniform on
``[-1, 1]^2``) and for the time-dummy design ``W = (Z, 1)`` with scalar
uniform ``Z``; everything else goes through Monte Carlo.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from . import dgp
from .errors import PreconditionError

ANALYTIC = "analytic"
MONTE_CARLO = "montecarlo"

EQUIVALENT = "equivalent_to_beta"
DISTINGUISHED = "distinguished"
SATURATION_FAILS = "saturation_fails_for_beta"
INCONCLUSIVE = "inconclusive"

R_TOL = 1e-12
MASS_TOL = 1e-12
DEFAULT_DRAWS = 1_000_000


@dataclass(frozen=True)
class IdReport:
    b: tuple
    r_value: float
    se: float
    mass_pos: float
    mass_neg: float
    mass_zero: float
    verdict: str
    method: str
    draws: Optional[int] = None


# -- closed forms --------------------------------------------------------------


def _q(x) -> Fraction:
    # the decimal a float prints as, so 0.7 means 7/10
    return Fraction(repr(float(x)))


def _clip_mean(c: Fraction) -> Fraction:
    """``int_0^1 clip(c w, -1, 1) dw``, exactly."""
    m = abs(c)
    val = m / 2 if m <= 1 else 1 - 1 / (2 * m)
    return val if c >= 0 else -val


def r_uniform_closed_form(beta2: float, b2: float) -> float:
    """``R((1, b2))`` when ``beta = (1, beta2)`` and ``W`` is uniform on ``[-1, 1]^2``.

    Given ``W2 = w`` the signs disagree when ``W1`` falls between ``-beta2 w``
    and ``-b2 w``, so ``R = E|clip(b2 W2) - clip(beta2 W2)| / 2``. Clipping
    is monotone in the slope, which moves the absolute value outside the
    integral. Evaluated in rational arithmetic.
    """
    beta2, b2 = float(beta2), float(b2)
    if not (math.isfinite(beta2) and math.isfinite(b2)):
        raise PreconditionError("inputs must be finite")
    return float(abs(_clip_mean(_q(b2)) - _clip_mean(_q(beta2))) / 2)


def _orient(c):
    """Split ``c`` into a sign and a slope functional for the uniform case.

    ``sgn(c'W) = s * sgn(W1 + r W2)``, with ``r = inf`` standing for ``sgn(W2)``.
    """
    c1, c2 = _q(c[0]), _q(c[1])
    s = 1 if (c1 > 0 or (c1 == 0 and c2 > 0)) else -1
    c1, c2 = s * c1, s * c2
    return s, (_clip_mean(c2 / c1) if c1 != 0 else Fraction(1))


def _r_uniform(beta, b):
    beta = np.asarray(beta, dtype=float)
    b = np.asarray(b, dtype=float)
    bz, zz = not np.any(b != 0), not np.any(beta != 0)
    if bz and zz:
        return 0.0
    if bz or zz:
        return 1.0
    s1, p1 = _orient(beta)
    s2, p2 = _orient(b)
    r = abs(p2 - p1) / 2
    return float(r if s1 == s2 else 1 - r)


def _interval_pieces(lo, hi, slopes):
    """Breakpoints of ``[lo, hi]`` at the roots of ``c1 z + c2`` (all rational)."""
    pts = {lo, hi}
    for c1, c2 in slopes:
        if c1 != 0:
            z = -c2 / c1
            if lo < z < hi:
                pts.add(z)
    pts = sorted(pts)
    return list(zip(pts[:-1], pts[1:]))


def _sgn(x):
    return (x > 0) - (x < 0)


def _chamberlain_r(lo, hi, beta, b):
    lo, hi = _q(lo), _q(hi)
    beta = [_q(x) for x in beta]
    b = [_q(x) for x in b]
    num = Fraction(0)
    for x0, x1 in _interval_pieces(lo, hi, [beta, b]):
        z = (x0 + x1) / 2
        if _sgn(beta[0] * z + beta[1]) != _sgn(b[0] * z + b[1]):
            num += x1 - x0
    return float(num / (hi - lo))


def _chamberlain_mass(lo, hi, b):
    lo, hi = _q(lo), _q(hi)
    b = [_q(x) for x in b]
    acc = {1: Fraction(0), -1: Fraction(0), 0: Fraction(0)}
    for x0, x1 in _interval_pieces(lo, hi, [b]):
        acc[_sgn(b[0] * (x0 + x1) / 2 + b[1])] += x1 - x0
    width = hi - lo
    return float(acc[1] / width), float(acc[-1] / width), float(acc[0] / width)


def _analytic_kind(design):
    law = design.regressor_law
    if isinstance(law, dgp.UniformDifference) and law.k == 2 and (law.low, law.high) == (-1.0, 1.0):
        return "uniform"
    if isinstance(law, dgp.ChamberlainRegressors) and law.z_law.dim == 1:
        return "chamberlain"
    return None


def supports_analytic(design) -> bool:
    return _analytic_kind(design) is not None


def _require_analytic(design):
    kind = _analytic_kind(design)
    if kind is None:
        raise PreconditionError(
            "no closed form for this design; use method='montecarlo'"
        )
    return kind


def _vec(b, k):
    b = np.asarray(b, dtype=float).reshape(-1)
    if b.shape != (k,) or not np.all(np.isfinite(b)):
        raise PreconditionError(f"b must be a finite vector of length {k}")
    return b


# -- population quantities -----------------------------------------------------


def _mc_w(design, draws, seed):
    return dgp.draw_w(design, int(draws), seed)


def r_population(design, b, method: str = ANALYTIC, draws: int = DEFAULT_DRAWS,
                 seed: int = 0, w=None):
    """``(R(b), se)``; ``se`` is 0 for the closed forms.

    Monte Carlo uses ``draws`` copies of ``W`` and reports the binomial
    standard error of the mismatch frequency.
    """
    beta = np.asarray(design.beta)
    b = _vec(b, design.k)
    if method == ANALYTIC:
        kind = _require_analytic(design)
        if kind == "uniform":
            return _r_uniform(beta, b), 0.0
        z = design.regressor_law.z_law
        return _chamberlain_r(z.low, z.high, beta, b), 0.0
    if method != MONTE_CARLO:
        raise PreconditionError(f"unknown method {method!r}")
    if w is None:
        w = _mc_w(design, draws, seed)
    r = float(np.mean(np.sign(w @ beta) != np.sign(w @ b)))
    return r, math.sqrt(r * (1.0 - r) / w.shape[0])


def sign_mass(design, b, method: str = ANALYTIC, draws: int = DEFAULT_DRAWS,
              seed: int = 0, w=None):
    """``(P(W'b > 0), P(W'b < 0), P(W'b = 0))`` and the largest standard error."""
    b = _vec(b, design.k)
    if not np.any(b != 0):
        raise PreconditionError("b = 0 is a degenerate direction (W'b = 0 surely)")
    if method == ANALYTIC:
        kind = _require_analytic(design)
        if kind == "uniform":
            return (0.5, 0.5, 0.0), 0.0
        z = design.regressor_law.z_law
        return _chamberlain_mass(z.low, z.high, b), 0.0
    if method != MONTE_CARLO:
        raise PreconditionError(f"unknown method {method!r}")
    if w is None:
        w = _mc_w(design, draws, seed)
    s = np.sign(w @ b)
    m = s.size
    masses = (float(np.mean(s > 0)), float(np.mean(s < 0)), float(np.mean(s == 0)))
    se = max(math.sqrt(p * (1 - p) / m) for p in masses)
    return masses, se


def identification_verdict(design, b, method: str = ANALYTIC, r_tol: float = R_TOL,
                           mass_tol: float = MASS_TOL, draws: int = DEFAULT_DRAWS,
                           seed: int = 0) -> IdReport:
    """Classify ``b`` relative to the design's ``beta``.

    Monte Carlo rules: a quantity counts as positive when its estimate
    exceeds three standard errors and as zero when no draw hit it; anything
    in between is inconclusive.
    """
    b = _vec(b, design.k)
    w = _mc_w(design, draws, seed) if method == MONTE_CARLO else None
    (bp, bn, _), bse = sign_mass(design, design.beta, method, w=w)
    (mp, mn, mz), mse = sign_mass(design, b, method, w=w)
    r, se = r_population(design, b, method, w=w)
    m = None if w is None else w.shape[0]

    if method == ANALYTIC:
        if min(bp, bn) <= mass_tol:
            verdict = SATURATION_FAILS
        elif min(mp, mn) > mass_tol and r <= r_tol:
            verdict = EQUIVALENT
        else:
            verdict = DISTINGUISHED
    else:
        beta_min = min(bp, bn)
        b_min = min(mp, mn)
        if beta_min == 0:
            verdict = SATURATION_FAILS
        elif beta_min <= 3 * bse:
            verdict = INCONCLUSIVE
        elif r > 3 * se or b_min == 0:
            verdict = DISTINGUISHED
        elif r == 0 and b_min > 3 * mse:
            verdict = EQUIVALENT
        else:
            verdict = INCONCLUSIVE
    return IdReport(
        b=tuple(float(x) for x in b), r_value=r, se=se, mass_pos=mp, mass_neg=mn,
        mass_zero=mz, verdict=verdict, method=method, draws=m,
    )


def id_scan(design, b_grid, method: str = ANALYTIC, **kwargs) -> list:
    """One :class:`IdReport` per row of ``b_grid``."""
    return [identification_verdict(design, b, method, **kwargs) for b in b_grid]


SCAN_COLUMNS = ("r_value", "se", "mass_pos", "mass_neg", "verdict", "method")


def scan_to_csv(reports, k: int) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow([f"b_{j + 1}" for j in range(k)] + list(SCAN_COLUMNS))
    g = lambda x: format(float(x), ".17g")
    for rep in reports:
        out.writerow([g(x) for x in rep.b] + [g(rep.r_value), g(rep.se), g(rep.mass_pos),
                                              g(rep.mass_neg), rep.verdict, rep.method])
    return buf.getvalue()
