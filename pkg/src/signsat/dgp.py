"""Simulation of the two-period binary-choice panel with fixed effects.

Outcomes follow ``Y_t = 1{X_t'beta + alpha >= u_t}`` for ``t = 0, 1``, with
``u_0, u_1`` i.i.d. given ``(X, alpha)`` and cdf given by the design's link.
Only ``W = X_1 - X_0`` and ``Y`` are kept in a :class:`PanelSample`.

Instead of drawing ``u_t`` and comparing, each outcome is drawn as
``1{U_t <= F(X_t'beta + alpha)}`` with ``U_t`` uniform, which has the same
law for any continuous strictly increasing ``F`` and avoids inverting ``F``.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import rng as _rng
from .errors import PreconditionError
from .links import LinkFunction, logistic


# -- regressor laws ----------------------------------------------------------------


@dataclass(frozen=True)
class UniformBox:
    """Independent uniform components on ``[low, high]``."""

    low: float = -1.0
    high: float = 1.0
    dim: int = 1

    def __post_init__(self):
        if not self.high > self.low:
            raise PreconditionError("UniformBox needs high > low")

    def sample(self, gen, size):
        return gen.uniform(self.low, self.high, size=(size, self.dim))


@dataclass(frozen=True)
class UniformDifference:
    """``W`` drawn directly with i.i.d. uniform components; ``X_0 = 0``."""

    k: int = 2
    low: float = -1.0
    high: float = 1.0

    kind = "uniform_difference"

    def sample(self, gen, size):
        x1 = gen.uniform(self.low, self.high, size=(size, self.k))
        return np.zeros_like(x1), x1


@dataclass(frozen=True)
class ChamberlainRegressors:
    """Last regressor is the time dummy ``1{t = 1}``, so ``W = (Z', 1)'``."""

    z_law: UniformBox = field(default_factory=UniformBox)

    kind = "chamberlain"

    @property
    def k(self):
        return self.z_law.dim + 1

    def sample(self, gen, size):
        z = self.z_law.sample(gen, size)
        x0 = np.zeros((size, self.k))
        x1 = np.hstack([z, np.ones((size, 1))])
        return x0, x1


# -- fixed-effect laws -----------------------------------------------------------------


@dataclass(frozen=True)
class NormalEffect:
    """``alpha ~ N(mean, sd^2)`` independent of ``X``."""

    mean: float = 0.0
    sd: float = 1.0

    def sample(self, gen, x0, x1):
        return self.mean + self.sd * gen.standard_normal(x0.shape[0])


@dataclass(frozen=True)
class LocationShiftEffect:
    """``alpha = c' (X_0 + X_1) / 2 + sd * N(0, 1)``."""

    coef: tuple
    sd: float = 1.0

    def sample(self, gen, x0, x1):
        xbar = 0.5 * (x0 + x1)
        return xbar @ np.asarray(self.coef, dtype=float) + self.sd * gen.standard_normal(x0.shape[0])


# -- designs and samples ---------------------------------------------------------------


@dataclass(frozen=True)
class PanelDesign:
    beta: tuple
    regressor_law: object
    fixed_effect_law: object = field(default_factory=NormalEffect)
    link: LinkFunction = field(default_factory=logistic)

    def __post_init__(self):
        beta = np.asarray(self.beta, dtype=float)
        if beta.ndim != 1 or beta.size == 0 or not np.all(np.isfinite(beta)):
            raise PreconditionError("beta must be a non-empty finite vector")
        object.__setattr__(self, "beta", tuple(float(b) for b in beta))
        if getattr(self.regressor_law, "k", len(beta)) != len(beta):
            raise PreconditionError(
                f"regressor law has dimension {self.regressor_law.k}, beta has {len(beta)}"
            )
        coef = getattr(self.fixed_effect_law, "coef", None)
        if coef is not None and len(coef) != len(beta):
            raise PreconditionError("fixed-effect shift coefficients do not match beta")

    @property
    def k(self) -> int:
        return len(self.beta)


@dataclass(frozen=True)
class PanelSample:
    """Observed data: ``w`` is ``(n, k)``, ``y0``/``y1`` binary, ``d = y1 - y0``."""

    w: np.ndarray
    y0: np.ndarray
    y1: np.ndarray

    def __post_init__(self):
        w = np.array(self.w, dtype=float)
        if w.ndim == 1:
            w = w[:, None]
        y0 = np.array(self.y0, dtype=np.int8)
        y1 = np.array(self.y1, dtype=np.int8)
        if w.ndim != 2 or y0.shape != (w.shape[0],) or y1.shape != y0.shape:
            raise PreconditionError("w must be (n, k) and y0, y1 length n")
        if not (np.isin(y0, (0, 1)).all() and np.isin(y1, (0, 1)).all()):
            raise PreconditionError("outcomes must be 0/1")
        d = (y1.astype(np.int64) - y0).astype(np.int8)
        for arr in (w, y0, y1, d):
            arr.setflags(write=False)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "y0", y0)
        object.__setattr__(self, "y1", y1)
        object.__setattr__(self, "d", d)

    @property
    def n(self) -> int:
        return self.w.shape[0]

    @property
    def k(self) -> int:
        return self.w.shape[1]

    def swapped(self) -> "PanelSample":
        """The same sample with the two periods exchanged."""
        return PanelSample(self.w, self.y1, self.y0)

    def take(self, idx) -> "PanelSample":
        idx = np.asarray(idx)
        return PanelSample(self.w[idx], self.y0[idx], self.y1[idx])


def _simulate_block(design, seed, b, rows):
    beta = np.asarray(design.beta)
    x0, x1 = design.regressor_law.sample(_rng.substream(seed, _rng.REGRESSORS, b), rows)
    alpha = design.fixed_effect_law.sample(_rng.substream(seed, _rng.FIXED_EFFECT, b), x0, x1)
    u0 = _rng.substream(seed, _rng.ERROR_T0, b).random(rows)
    u1 = _rng.substream(seed, _rng.ERROR_T1, b).random(rows)
    p0 = np.atleast_1d(design.link.cdf(x0 @ beta + alpha))
    p1 = np.atleast_1d(design.link.cdf(x1 @ beta + alpha))
    return x1 - x0, (u0 <= p0), (u1 <= p1)


def simulate(design: PanelDesign, n: int, seed: int, threads: int = 1) -> PanelSample:
    """Draw ``n`` i.i.d. observations; identical inputs give identical samples.

    Rows are generated in fixed blocks of :data:`signsat.rng.BLOCK_ROWS`,
    each from its own keyed stream, so ``threads`` only affects speed.
    """
    if n < 1:
        raise PreconditionError("n must be at least 1")
    _rng.check_seed(seed)
    parts = list(_rng.blocks(n))
    job = lambda blk: _simulate_block(design, seed, blk[0], blk[2] - blk[1])
    if threads > 1 and len(parts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            out = list(pool.map(job, parts))
    else:
        out = [job(blk) for blk in parts]
    w = np.concatenate([o[0] for o in out])
    y0 = np.concatenate([o[1] for o in out]).astype(np.int8)
    y1 = np.concatenate([o[2] for o in out]).astype(np.int8)
    return PanelSample(w, y0, y1)


def draw_w(design: PanelDesign, m: int, seed: int) -> np.ndarray:
    """``m`` draws of ``W`` alone, from a stream family separate from :func:`simulate`."""
    chunks = []
    for b, start, stop in _rng.blocks(m):
        x0, x1 = design.regressor_law.sample(_rng.substream(seed, _rng.POPULATION, b), stop - start)
        chunks.append(x1 - x0)
    return np.concatenate(chunks)


def uniform_example_design(beta2: float, link: Optional[LinkFunction] = None,
                           fe_law=None) -> PanelDesign:
    """Two regressors, ``W_1, W_2`` i.i.d. uniform(-1, 1), ``beta = (1, beta2)``."""
    return PanelDesign(
        beta=(1.0, float(beta2)),
        regressor_law=UniformDifference(k=2),
        fixed_effect_law=fe_law or NormalEffect(),
        link=link or logistic(),
    )


def chamberlain_design(beta, z_law: Optional[UniformBox] = None,
                       link: Optional[LinkFunction] = None, fe_law=None) -> PanelDesign:
    """``W = (Z', 1)'``: the last regressor is a period dummy."""
    beta = tuple(float(b) for b in beta)
    if len(beta) < 2:
        raise PreconditionError("a Chamberlain design needs at least two coefficients")
    z_law = z_law or UniformBox(-1.0, 1.0, dim=len(beta) - 1)
    if z_law.dim != len(beta) - 1:
        raise PreconditionError("z_law dimension must be len(beta) - 1")
    return PanelDesign(
        beta=beta,
        regressor_law=ChamberlainRegressors(z_law),
        fixed_effect_law=fe_law or NormalEffect(),
        link=link or logistic(),
    )


# -- CSV round trip --------------------------------------------------------------


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def sample_to_csv(sample: PanelSample) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f"w_{j + 1}" for j in range(sample.k)] + ["y0", "y1"])
    for row, a, b in zip(sample.w, sample.y0, sample.y1):
        writer.writerow([_fmt(v) for v in row] + [int(a), int(b)])
    return buf.getvalue()


def write_sample(sample: PanelSample, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(sample_to_csv(sample))


def sample_from_csv(text: str) -> PanelSample:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    k = len(header) - 2
    expected = [f"w_{j + 1}" for j in range(k)] + ["y0", "y1"]
    if k < 1 or header != expected:
        raise PreconditionError(f"unexpected CSV header {header}")
    rows = [r for r in reader if r]
    if not rows:
        raise PreconditionError("sample CSV has no rows")
    w = np.array([[float(v) for v in r[:k]] for r in rows])
    y0 = np.array([int(r[k]) for r in rows])
    y1 = np.array([int(r[k + 1]) for r in rows])
    return PanelSample(w, y0, y1)


def read_sample(path) -> PanelSample:
    with open(path, newline="") as fh:
        return sample_from_csv(fh.read())
