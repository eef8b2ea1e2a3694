import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from signsat import geometry as geo
from signsat import links
from signsat.errors import MissingWindowError, PreconditionError

from oracles import separator_values_mp

TWO_PI = 2 * math.pi


def hull_lp_feasible(link, s, t, grid):
    """HiGHS on the same hull-intersection program, as a reference."""
    Ps, Pt = geo.moment_curve(link, s, grid), geo.moment_curve(link, t, grid)
    m = grid.size
    A = np.vstack([np.hstack([Ps, -Pt]), np.r_[np.ones(m), np.zeros(m)], np.r_[np.zeros(m), np.ones(m)]])
    b = np.r_[0.0, 0.0, 0.0, 1.0, 1.0]
    res = linprog(np.zeros(2 * m), A_eq=A, b_eq=b, bounds=(0, None), method="highs")
    return res.status == 0


def test_moment_vector():
    mv = geo.moment_vector(links.logistic(), 0.0, 0.0)
    assert mv.as_array().tolist() == [0.5, 0.5, 0.25]
    mv = geo.moment_vector(links.logistic(), 1.0, 0.0)
    e = math.e / (1 + math.e)
    assert mv.v2 == pytest.approx(e, rel=1e-15)
    assert mv.v3 == pytest.approx(0.5 * e, rel=1e-15)
    far = geo.moment_vector(links.gaussian_tail(), 1.0, 50.0)
    assert far.as_array().tolist() == [1.0, 1.0, 1.0]


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(["logistic", "periodic_gdot(a=2.0)", "gaussian_tail"]),
       st.floats(0.01, 3), st.floats(-3, 3))
def test_moment_vector_invariants(name, t, alpha):
    mv = geo.moment_vector(links.parse_link(name), t, alpha)
    assert 0 < mv.v1 < mv.v2 < 1
    assert mv.v3 == mv.v1 * mv.v2


def test_gap_logistic_exact():
    g = geo.gap_summary(links.logistic(), 2.0, 1.0)
    assert (g.s_inf, g.t_sup, g.exact) == (2.0, 1.0, True)
    assert g.criterion_holds


def test_gap_periodic():
    link = links.periodic_gdot(2.0)
    g = geo.gap_summary(link, TWO_PI, math.pi)
    assert g.exact
    assert g.s_inf == pytest.approx(4 * math.pi, abs=1e-9)
    # G(pi + x) - G(x) = 2 pi - 2 sin x, maximised at x = 3 pi / 2
    assert g.t_sup == pytest.approx(TWO_PI + 2.0, abs=1e-9)
    fine = geo.gap_summary(link, TWO_PI, math.pi, geo.WindowSpec(0.0, TWO_PI, 100_000))
    assert fine.t_sup == pytest.approx(g.t_sup, abs=1e-9)


@pytest.mark.parametrize("s,t", [(7.0, 2.0), (TWO_PI + 1, TWO_PI), (3.3, 0.4)])
def test_gap_periodic_window_reduction(s, t):
    link = links.periodic_gdot(2.0)
    one = geo.gap_summary(link, s, t, geo.WindowSpec(0.0, TWO_PI, 10_000))
    three = geo.gap_summary(link, s, t, geo.WindowSpec(0.0, 3 * TWO_PI, 30_000))
    assert one.s_inf == pytest.approx(three.s_inf, abs=1e-9)
    assert one.t_sup == pytest.approx(three.t_sup, abs=1e-9)


def test_gap_gaussian_windowed():
    link = links.gaussian_tail()
    with pytest.raises(MissingWindowError):
        geo.gap_summary(link, 2.0, 1.0)
    g = geo.gap_summary(link, 2.0, 1.0, geo.WindowSpec(-8.0, 8.0))
    assert not g.exact
    # G' is smallest at 0 and grows in both tails
    a = np.linspace(-8, 8, 200_001)
    ref_inf = np.min(link.g(2 + a) - link.g(a))
    ref_sup = np.max(link.g(1 + a) - link.g(a))
    assert g.s_inf == pytest.approx(ref_inf, abs=1e-8)
    assert g.t_sup == pytest.approx(ref_sup, abs=1e-8)


def test_gap_preconditions():
    for s, t in [(1.0, 1.0), (1.0, 2.0), (1.0, 0.0), (1.0, -1.0)]:
        with pytest.raises(PreconditionError):
            geo.gap_summary(links.logistic(), s, t)


def test_disjoint_logistic():
    cert = geo.certify_disjoint(links.logistic(), 2.0, 1.0)
    assert cert.verdict == geo.DISJOINT
    v = cert.separator
    assert v[1] == pytest.approx(1 - v[0]) and v[2] == -1.0
    lo, hi = geo.separator_bounds(cert.gap)
    assert lo < v[0] < hi
    grid = np.linspace(-30, 30, 601)
    assert all(x < 0 for x in separator_values_mp(lambda a: a, 2.0, v, grid))
    assert all(x > 0 for x in separator_values_mp(lambda a: a, 1.0, v, grid))
    with pytest.raises(PreconditionError):
        geo.certify_disjoint(links.logistic(), 1.0, 1.0)


def test_disjoint_periodic_after_epsilon():
    link = links.periodic_gdot(2.0)
    eps = geo.find_epsilon(link, TWO_PI + 1, TWO_PI)
    cert = geo.certify_disjoint(link, TWO_PI + 1 - eps, TWO_PI + eps)
    assert cert.verdict == geo.DISJOINT
    grid = np.linspace(-20, 20, 801)
    v = cert.separator
    g = lambda a: 2 * a + mpmath.sin(a)
    assert all(x < 0 for x in separator_values_mp(g, TWO_PI + 1 - eps, v, grid))
    assert all(x > 0 for x in separator_values_mp(g, TWO_PI + eps, v, grid))


def test_periodic_without_criterion_is_unknown():
    # inf gap 2.4 - 2 sin 0.6 is below sup gap 2 + 2 sin 0.5
    cert = geo.certify_disjoint(links.periodic_gdot(2.0), 1.2, 1.0)
    assert cert.verdict == geo.UNKNOWN
    assert cert.separator is None
    assert cert.gap.s_inf == pytest.approx(2.4 - 2 * math.sin(0.6), abs=1e-6)
    assert cert.gap.t_sup == pytest.approx(2 + 2 * math.sin(0.5), abs=1e-6)


def test_find_epsilon():
    link = links.periodic_gdot(2.0)
    eps = geo.find_epsilon(link, TWO_PI + 1, TWO_PI)
    # margin 2 - 2 sin(1/2) over Lipschitz bound 3 (inflated by 1e-3)
    expected = (2 - 2 * math.sin(0.5)) / (4 * 3 * 1.001)
    assert eps == pytest.approx(expected, rel=1e-6)
    assert 0 < eps <= 0.25
    assert geo.find_epsilon(links.logistic(), 2.0, 1.0) == 0.25
    with pytest.raises(PreconditionError):
        geo.find_epsilon(link, 5.0, 4.0)
    with pytest.raises(PreconditionError):
        geo.find_epsilon(links.gaussian_tail(), 2.0, 1.0)


def test_intersect_identical_curves():
    for link in (links.logistic(), links.gaussian_tail(), links.periodic_gdot()):
        cert = geo.certify_intersect(link, 1.0, 1.0)
        assert cert.verdict == geo.INTERSECTING
        assert cert.residual <= 1e-7


def test_intersect_gaussian_close_shifts():
    grid = np.arange(-10, 10.0001, 0.05)
    cert = geo.certify_intersect(links.gaussian_tail(), 1.05, 1.0, grid)
    assert cert.verdict == geo.INTERSECTING
    lam, mu = cert.intersection_weights
    assert np.all(lam >= 0) and np.all(mu >= 0)
    assert abs(lam.sum() - 1) <= 1e-9 and abs(mu.sum() - 1) <= 1e-9
    left = geo.moment_curve(links.gaussian_tail(), 1.05, cert.s_grid) @ lam
    right = geo.moment_curve(links.gaussian_tail(), 1.0, cert.t_grid) @ mu
    assert np.max(np.abs(left - right)) <= 1e-7
    assert hull_lp_feasible(links.gaussian_tail(), 1.05, 1.0, cert.s_grid)


def test_intersect_logistic_infeasible():
    cert = geo.certify_intersect(links.logistic(), 2.0, 1.0)
    assert cert.verdict == geo.UNKNOWN
    assert cert.intersection_weights is None
    assert not hull_lp_feasible(links.logistic(), 2.0, 1.0, geo.default_grid())


def test_intersect_bad_grid():
    with pytest.raises(PreconditionError):
        geo.certify_intersect(links.logistic(), 1.0, 1.0, [0.0])
    with pytest.raises(PreconditionError):
        geo.certify_intersect(links.logistic(), 1.0, 1.0, [1.0, 1.0])


def test_hull_status_dispatch():
    assert geo.hull_status(links.logistic(), 2.0, 1.0).verdict == geo.DISJOINT
    assert geo.hull_status(links.logistic(), 1.0, 2.0).verdict == geo.DISJOINT
    assert geo.hull_status(links.logistic(), -1.0, -2.0).verdict == geo.DISJOINT
    assert geo.hull_status(links.gaussian_tail(), 1.0, 1.0).verdict == geo.INTERSECTING
    assert geo.hull_status(links.gaussian_tail(), 1.05, 1.0).verdict == geo.INTERSECTING


def test_certificate_exclusive():
    with pytest.raises(Exception):
        geo.HullCertificate(geo.DISJOINT, 2.0, 1.0, separator=np.ones(3),
                            intersection_weights=(np.ones(1), np.ones(1)))


def test_certificate_record():
    rec = geo.certify_intersect(links.gaussian_tail(), 1.05, 1.0).to_record()
    assert rec["verdict"] == geo.INTERSECTING
    assert abs(sum(rec["lambda"]["weight"]) - 1) <= 1e-9
    rec = geo.certify_disjoint(links.logistic(), 2.0, 1.0).to_record()
    assert len(rec["separator"]) == 3


def test_delta_scan_gaussian():
    scan = geo.delta_scan(links.gaussian_tail(), 1.0, [0.01, 0.05, 0.1])
    assert [d for d, _ in scan] == [0.01, 0.05, 0.1]
    assert any(c.verdict == geo.INTERSECTING for _, c in scan)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=3, max_size=3), st.floats(0.2, 4), st.floats(0.05, 3),
       st.sampled_from(["logistic", "periodic_gdot(a=2.0)", "gaussian_tail"]))
def test_key_support_property(v, t, ds, name):
    # sup_a v'p(s, a) >= inf_a v'p(t, a) for any v
    link = links.parse_link(name)
    grid = np.linspace(-10, 10, 2001)
    assert geo.support_gap(link, t + ds, t, np.asarray(v), grid) >= -1e-9


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 5), st.floats(0.01, 5))
def test_logistic_mutual_exclusion(t, ds):
    link = links.logistic()
    s = t + ds
    g = geo.gap_summary(link, s, t)
    assert (g.s_inf, g.t_sup) == (s, t)
    assert geo.certify_disjoint(link, s, t).verdict == geo.DISJOINT
    assert geo.certify_intersect(link, s, t).verdict == geo.UNKNOWN
