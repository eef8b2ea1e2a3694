import math

import numpy as np
import pytest

from signsat import dgp, rng, sstest
from signsat.errors import DegenerateDataError, PreconditionError
from signsat.sstest import TestConfig

from oracles import sweep_oracle


def small_sample(seed=0, n=40):
    return dgp.simulate(dgp.uniform_example_design(0.5), n, seed=seed)


def resample_counts(seed, r, n):
    g = rng.substream(seed, rng.BOOTSTRAP, r)
    return np.bincount(g.integers(0, n, size=n), minlength=n)


def test_min_reps_and_quantile():
    assert sstest.min_reps(0.05) == 19
    assert sstest.min_reps(0.1) == 9
    draws = np.arange(1.0, 101.0)
    assert sstest.critical_value(draws, 0.05) == 95.0
    assert sstest.critical_value(draws, 0.10) == 90.0
    prev = -np.inf
    for a in np.linspace(0.5, 0.01, 30):
        c = sstest.critical_value(np.random.default_rng(1).normal(size=199), a)
        assert c >= prev
        prev = c


def test_config_validation():
    with pytest.raises(PreconditionError):
        TestConfig(alpha=0.0)
    with pytest.raises(PreconditionError):
        TestConfig(b_reps=0)
    with pytest.raises(PreconditionError):
        TestConfig(boundary_convention="gt")
    with pytest.raises(PreconditionError):
        TestConfig(seed=-1)


def test_bootstrap_draws_match_oracle():
    s = small_sample(1, 25)
    for conv in (sstest.GEQ, sstest.VERBATIM):
        cfg = TestConfig(b_reps=19, seed=5, boundary_convention=conv)
        draws = sstest.bootstrap_draws(s, cfg)
        d = s.d.astype(int)
        for r in range(19):
            a = (resample_counts(5, r, s.n) - 1) * d
            b = a if conv == sstest.GEQ else -d
            expected = float(sweep_oracle(s.w, a, b)) / math.sqrt(s.n)
            assert draws[r] == pytest.approx(expected, abs=1e-12)


def test_determinism_and_threads():
    s = small_sample(3, 200)
    a = sstest.test_upper(s, TestConfig(seed=9))
    b = sstest.test_upper(s, TestConfig(seed=9))
    c = sstest.test_upper(s, TestConfig(seed=9, threads=4))
    assert np.array_equal(a.boot_draws, b.boot_draws)
    assert np.array_equal(a.boot_draws, c.boot_draws)
    assert a.t_n == c.t_n and a.c_crit == c.c_crit


def test_all_negative_not_rejected():
    # rows in the half-plane w1 > 0, so q = (-1, 0) switches every row off
    w = np.random.default_rng(4).normal(size=(50, 2))
    w[:, 0] = np.abs(w[:, 0]) + 0.1
    s = dgp.PanelSample(w, np.ones(50), np.zeros(50))
    rep = sstest.test_upper(s, TestConfig(seed=1))
    assert rep.t_n == 0.0 and not rep.reject


def test_all_positive_lower_not_rejected():
    w = np.random.default_rng(5).normal(size=(50, 2))
    s = dgp.PanelSample(w, np.zeros(50), np.ones(50))
    # every indicator sum is non-negative
    rep = sstest.test_lower(s, TestConfig(seed=1))
    assert rep.t_n >= 0 and not rep.reject


def test_swap_identity():
    s = small_sample(6, 150)
    cfg = TestConfig(seed=2)
    lo = sstest.test_lower(s, cfg)
    up = sstest.test_upper(s.swapped(), cfg)
    assert lo.t_n == -up.t_n
    # resampled counts are the same, weights flip sign
    assert lo.reject == (up.t_n > sstest.critical_value(sstest.bootstrap_draws(s.swapped(), cfg), 0.05))


def test_reject_rule():
    s = small_sample(7, 300)
    rep = sstest.test_upper(s, TestConfig(seed=3))
    assert rep.reject == (rep.t_n > rep.c_crit)
    assert rep.c_crit == sstest.critical_value(rep.boot_draws, 0.05)
    low = sstest.test_lower(s, TestConfig(seed=3))
    assert low.reject == (low.t_n < -low.c_crit)
    assert low.c_crit == rep.c_crit


def test_errors():
    w = np.ones((10, 2))
    flat = dgp.PanelSample(w, np.ones(10), np.ones(10))
    with pytest.raises(DegenerateDataError):
        sstest.test_upper(flat)
    with pytest.raises(DegenerateDataError):
        sstest.sign_saturation_check(flat)
    with pytest.raises(PreconditionError):
        sstest.test_upper(small_sample(), TestConfig(b_reps=10))
    with pytest.raises(PreconditionError):
        sstest.test_upper(small_sample(n=1))


def test_saturation_verdicts():
    strong = dgp.simulate(dgp.uniform_example_design(0.5), 2000, seed=11)
    rep = sstest.sign_saturation_check(strong, TestConfig(seed=4))
    assert rep.verdict == sstest.SATURATION_SUPPORTED
    assert np.array_equal(rep.upper.boot_draws, rep.lower.boot_draws)
    positive = dgp.simulate(dgp.chamberlain_design((1.0, 2.0)), 2000, seed=12)
    rep = sstest.sign_saturation_check(positive, TestConfig(seed=4))
    assert rep.verdict == sstest.INCONCLUSIVE
    assert not rep.lower.reject
    rec = rep.to_record(draws=True)
    assert len(rec["upper"]["boot_draws"]) == 199


def test_heuristic_optimizer_runs():
    s = small_sample(13, 100)
    exact = sstest.test_upper(s, TestConfig(seed=1))
    rough = sstest.test_upper(s, TestConfig(seed=1, optimizer="random_search"))
    assert rough.t_n <= exact.t_n
    assert np.all(rough.boot_draws <= exact.boot_draws + 1e-12)


def test_three_regressors():
    design = dgp.chamberlain_design((1.0, -0.5, 0.2), dgp.UniformBox(-1, 1, 2))
    s = dgp.simulate(design, 60, seed=14)
    rep = sstest.test_upper(s, TestConfig(seed=1, b_reps=19))
    assert rep.boot_draws.size == 19 and np.all(np.isfinite(rep.boot_draws))
