"""Bootstrap test of ``H0: E(Y1 - Y0 | X) <= 0`` a.s. and its mirror image.

Upper test: ``T_n = sqrt(n) sup_q rho_hat(q)``, rejected when ``T_n`` exceeds
the bootstrap ``(1 - alpha)`` quantile of ``sup_q S*(q)``, where

    S*(q) = sqrt(n) (rho*(q) - rho_hat(q))

is the centred bootstrap objective. Lower test: ``sqrt(n) inf_q rho_hat(q)``
is compared with ``-c`` using the same critical value (the limit process is
a centred Gaussian, hence symmetric).

``S*`` only changes across the hyperplanes of the original rows (a resampled
row is a copy of an original one), so for replicate counts ``c_i`` it is the
weighted count with weights ``(c_i - 1) d_i``. Under the verbatim convention,
where the resampled part uses a strict inequality, a boundary row carries
weight ``-d_i`` instead.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import maxscore
from . import rng as _rng
from .errors import DegenerateDataError, PreconditionError

UPPER = "upper"
LOWER = "lower"
BOTH = "both"

GEQ = "geq"
VERBATIM = "verbatim"

SATURATION_SUPPORTED = "saturation_supported"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class TestConfig:
    alpha: float = 0.05
    b_reps: int = 199
    direction: str = UPPER
    seed: int = 0
    optimizer: str = maxscore.EXACT
    boundary_convention: str = GEQ
    threads: int = 1

    __test__ = False  # keep pytest from collecting this class

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise PreconditionError("alpha must lie in (0, 1)")
        if int(self.b_reps) != self.b_reps or self.b_reps < 1:
            raise PreconditionError("b_reps must be a positive integer")
        if self.direction not in (UPPER, LOWER, BOTH):
            raise PreconditionError("direction must be one of upper, lower, both")
        if self.boundary_convention not in (GEQ, VERBATIM):
            raise PreconditionError("boundary_convention must be 'geq' or 'verbatim'")
        if self.optimizer not in maxscore.METHODS:
            raise PreconditionError(f"unknown optimizer {self.optimizer!r}")
        _rng.check_seed(self.seed)


@dataclass(frozen=True)
class TestReport:
    direction: str
    t_n: float
    c_crit: float
    boot_draws: np.ndarray = field(repr=False)
    reject: bool
    n: int
    alpha: float
    argq: np.ndarray

    __test__ = False

    def to_record(self, draws: bool = False) -> dict:
        rec = {
            "direction": self.direction,
            "n": self.n,
            "alpha": self.alpha,
            "t_n": self.t_n,
            "c_crit": self.c_crit,
            "reject": self.reject,
            "argq": [float(x) for x in self.argq],
            "b_reps": int(self.boot_draws.size),
        }
        if draws:
            rec["boot_draws"] = [float(x) for x in self.boot_draws]
        return rec


@dataclass(frozen=True)
class SaturationReport:
    verdict: str
    upper: TestReport
    lower: TestReport

    def to_record(self, draws: bool = False) -> dict:
        return {
            "verdict": self.verdict,
            "upper": self.upper.to_record(draws),
            "lower": self.lower.to_record(draws),
        }


def min_reps(alpha: float) -> int:
    """Smallest replicate count with ``(B + 1) * alpha >= 1``.

    With fewer draws the ``(1 - alpha)`` order statistic is the sample
    maximum for every ``alpha`` below ``1 / (B + 1)``, and the test cannot
    reach its nominal level.
    """
    return max(1, math.ceil(1.0 / alpha - 1.0 - 1e-9))


def critical_value(draws, alpha: float) -> float:
    """Order statistic of ``draws`` at rank ``ceil((1 - alpha) B)``."""
    draws = np.sort(np.asarray(draws, dtype=float))
    rank = math.ceil((1.0 - alpha) * draws.size - 1e-9)
    rank = min(max(rank, 1), draws.size)
    return float(draws[rank - 1])


def _check_sample(sample, config):
    if sample.n < 2:
        raise PreconditionError("the test needs n >= 2")
    if not np.any(sample.d != 0):
        raise DegenerateDataError("Y1 - Y0 is identically zero; no decision is possible")
    if config.b_reps < min_reps(config.alpha):
        raise PreconditionError(
            f"b_reps = {config.b_reps} is too small for alpha = {config.alpha}; "
            f"need at least {min_reps(config.alpha)}"
        )


def _replicate_weights(sample, config, reps):
    n = sample.n
    d = sample.d.astype(float)
    a = np.empty((len(reps), n))
    for j, r in enumerate(reps):
        g = _rng.substream(config.seed, _rng.BOOTSTRAP, r)
        counts = np.bincount(g.integers(0, n, size=n), minlength=n)
        a[j] = (counts - 1) * d
    if config.boundary_convention == GEQ:
        b = a
    else:
        b = np.broadcast_to(-d, a.shape)
    return a, b


def bootstrap_draws(sample, config: TestConfig) -> np.ndarray:
    """``sup_q S*(q)`` for replicates ``0 .. b_reps - 1``."""
    n = sample.n
    reps = np.arange(config.b_reps)

    def run(chunk):
        a, b = _replicate_weights(sample, config, chunk)
        return maxscore.sup_weighted(sample.w, a, b, config.optimizer,
                                     seed=_rng.derive_seed(config.seed, _rng.SEARCH))

    if config.threads > 1 and config.b_reps > 1:
        chunks = np.array_split(reps, min(config.threads * 4, config.b_reps))
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            parts = list(pool.map(run, chunks))
        sums = np.concatenate(parts)
    else:
        sums = run(reps)
    return math.sqrt(n) * sums / n


def _optimise(obj, config, lower):
    fn = maxscore.minimize if lower else maxscore.maximize
    return fn(obj, config.optimizer, seed=_rng.derive_seed(config.seed, _rng.SEARCH))


def _report(sample, config, direction, draws):
    obj = maxscore.ScoreObjective.from_sample(sample)
    res = _optimise(obj, config, direction == LOWER)
    c = critical_value(draws, config.alpha)
    t_n = math.sqrt(sample.n) * res.value
    reject = t_n > c if direction == UPPER else t_n < -c
    return TestReport(direction=direction, t_n=t_n, c_crit=c, boot_draws=draws,
                      reject=bool(reject), n=sample.n, alpha=config.alpha, argq=res.argq)


def test_upper(sample, config: TestConfig = TestConfig()) -> TestReport:
    """Test ``E(Y1 - Y0 | X) <= 0`` a.s.; rejection is evidence of a positive region."""
    _check_sample(sample, config)
    return _report(sample, config, UPPER, bootstrap_draws(sample, config))


def test_lower(sample, config: TestConfig = TestConfig()) -> TestReport:
    """Test ``E(Y1 - Y0 | X) >= 0`` a.s. with the upper test's critical value."""
    _check_sample(sample, config)
    return _report(sample, config, LOWER, bootstrap_draws(sample, config))


# pytest would otherwise collect the two functions above as tests
test_upper.__test__ = False
test_lower.__test__ = False


def sign_saturation_check(sample, config: TestConfig = TestConfig()) -> SaturationReport:
    """Run both one-sided tests at level ``alpha`` each on shared bootstrap draws.

    ``saturation_supported`` when both reject, ``inconclusive`` otherwise.
    No multiplicity adjustment is made.
    """
    _check_sample(sample, config)
    draws = bootstrap_draws(sample, config)
    up = _report(sample, config, UPPER, draws)
    lo = _report(sample, config, LOWER, draws)
    verdict = SATURATION_SUPPORTED if (up.reject and lo.reject) else INCONCLUSIVE
    return SaturationReport(verdict, up, lo)
