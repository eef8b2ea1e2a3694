"""Monte Carlo size and power studies for the bootstrap test.

Trial ``t`` draws its sample from ``derive_seed(seed, TRIAL, t)`` and its
bootstrap from ``derive_seed(seed, BOOTSTRAP, t)``, so trials can run in any
order or in parallel and the summary is the same.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from . import dgp, sstest
from . import rng as _rng
from .errors import DegenerateDataError, PreconditionError

STATISTICS = {
    "upper": ("upper",),
    "lower": ("lower",),
    "both": ("upper", "lower", "saturation"),
}


@dataclass(frozen=True)
class StudyRow:
    statistic: str
    trials: int
    rejections: int
    degenerate: int

    @property
    def frequency(self) -> float:
        return self.rejections / self.trials if self.trials else float("nan")

    @property
    def mc_se(self) -> float:
        p = self.frequency
        return math.sqrt(p * (1 - p) / self.trials) if self.trials else float("nan")


@dataclass(frozen=True)
class StudyResult:
    rows: tuple
    completed: int
    requested: int
    truncated: bool
    outcomes: tuple  # per trial: dict statistic -> bool, or None if degenerate

    def to_csv(self) -> str:
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(["statistic", "trials", "rejections", "frequency", "mc_se", "degenerate", "truncated"])
        g = lambda x: format(float(x), ".17g")
        for r in self.rows:
            out.writerow([r.statistic, r.trials, r.rejections, g(r.frequency), g(r.mc_se),
                          r.degenerate, "true" if self.truncated else "false"])
        if self.truncated:
            out.writerow([f"# truncated after {self.completed} of {self.requested} trials"])
        return buf.getvalue()


def run_trial(design, n: int, test: str, config: sstest.TestConfig, seed: int, index: int):
    """Outcome of trial ``index``: rejections per statistic, or ``None`` when
    the simulated ``d`` is identically zero."""
    sample = dgp.simulate(design, n, _rng.derive_seed(seed, _rng.TRIAL, index))
    cfg = replace(config, seed=_rng.derive_seed(seed, _rng.BOOTSTRAP, index), threads=1)
    try:
        if test == "upper":
            return {"upper": sstest.test_upper(sample, cfg).reject}
        if test == "lower":
            return {"lower": sstest.test_lower(sample, cfg).reject}
        rep = sstest.sign_saturation_check(sample, cfg)
    except DegenerateDataError:
        return None
    return {
        "upper": rep.upper.reject,
        "lower": rep.lower.reject,
        "saturation": rep.verdict == sstest.SATURATION_SUPPORTED,
    }


def summarise(outcomes, test: str, requested: int, truncated: bool) -> StudyResult:
    rows = []
    for stat in STATISTICS[test]:
        rej = sum(1 for o in outcomes if o is not None and o[stat])
        deg = sum(1 for o in outcomes if o is None)
        rows.append(StudyRow(stat, len(outcomes), rej, deg))
    return StudyResult(tuple(rows), len(outcomes), requested, truncated, tuple(outcomes))


def mc_study(design, n: int, trials: int, test: str = "upper",
             config: sstest.TestConfig = sstest.TestConfig(), seed: int = 0,
             threads: int = 1, progress=None) -> StudyResult:
    """Rejection frequencies over ``trials`` independent simulated samples.

    Degenerate trials count as non-rejections and are tallied separately. On
    ``KeyboardInterrupt`` the completed prefix is summarised and flagged as
    truncated.
    """
    if trials < 1:
        raise PreconditionError("trials must be at least 1")
    if test not in STATISTICS:
        raise PreconditionError(f"test must be one of {sorted(STATISTICS)}")
    outcomes = []
    job = lambda i: run_trial(design, n, test, config, seed, i)
    batch = max(1, threads)
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    truncated = False
    try:
        for lo in range(0, trials, batch):
            idx = range(lo, min(lo + batch, trials))
            got = list(pool.map(job, idx)) if pool else [job(i) for i in idx]
            outcomes.extend(got)
            if progress is not None:
                progress(len(outcomes), trials)
    except KeyboardInterrupt:
        truncated = True
    finally:
        if pool is not None:
            pool.shutdown(wait=True, cancel_futures=True)
    return summarise(outcomes, test, trials, truncated)
