import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import norm

from signsat import links
from signsat.errors import DomainError, InvalidLinkError, UnclassifiableLinkError


def test_cdf_values():
    assert links.cdf(links.logistic(), 0.0) == 0.5
    assert links.cdf(links.periodic_gdot(2.0), 0.0) == 0.5
    assert links.cdf(links.logistic(), 3.0) == pytest.approx(1 / (1 + math.exp(-3)), rel=1e-15)
    assert links.cdf(links.gaussian_tail(), 1.0) == pytest.approx(norm.cdf(1.0), rel=1e-15)


def test_g_values():
    assert links.g_transform(links.logistic(), 1.3) == 1.3
    assert links.g_transform(links.periodic_gdot(2.0), 2 * math.pi) == pytest.approx(4 * math.pi, abs=1e-12)
    for link in (links.logistic(), links.periodic_gdot(), links.gaussian_tail()):
        assert links.g_transform(link, 0.0) == pytest.approx(0.0, abs=1e-15)


def test_g_dot_values():
    assert links.g_dot(links.logistic(), 17.0) == 1.0
    assert links.g_dot(links.periodic_gdot(2.0), 0.0) == 3.0
    assert links.g_dot(links.periodic_gdot(2.0), math.pi) == pytest.approx(1.0)


def test_gaussian_g_dot_matches_difference_quotient():
    link = links.gaussian_tail()
    t = np.linspace(-30, 30, 121)
    h = 1e-5
    fd = (link.g(t + h) - link.g(t - h)) / (2 * h)
    assert np.allclose(link.g_dot(t), fd, rtol=1e-6)


def test_gaussian_tails_finite():
    link = links.gaussian_tail()
    g = link.g(np.array([-40.0, 40.0]))
    assert np.all(np.isfinite(g)) and g[0] < -700 and g[1] > 700


def test_classify():
    assert links.classify_period(links.logistic()).variant == "constant"
    pc = links.classify_period(links.periodic_gdot(2.0))
    assert pc.variant == "periodic"
    assert pc.eta == pytest.approx(2 * math.pi, abs=1e-12)
    assert pc.q0 == pytest.approx(4 * math.pi, abs=1e-9)
    assert links.classify_period(links.gaussian_tail()).variant == "nonperiodic"


def test_gaussian_gdot_not_shift_periodic():
    link = links.gaussian_tail()
    t = np.linspace(-5, 5, 201)
    for c in np.linspace(0.25, 10, 40):
        assert np.max(np.abs(link.g_dot(t + c) - link.g_dot(t))) > 1e-3


def test_errors():
    with pytest.raises(DomainError):
        links.cdf(links.logistic(), float("nan"))
    with pytest.raises(DomainError):
        links.g_transform(links.logistic(), float("inf"))
    with pytest.raises(InvalidLinkError):
        links.periodic_gdot(1.0)
    bad = links.custom(lambda t: -np.asarray(t), period_class="nonperiodic")
    with pytest.raises(InvalidLinkError):
        bad.g_dot(0.0)
    with pytest.raises(UnclassifiableLinkError):
        links.classify_period(links.custom(lambda t: t))


def test_custom_link():
    link = links.custom(lambda t: 2 * np.asarray(t), period_class="constant")
    assert link.g_dot(1.5) == pytest.approx(2.0, rel=1e-8)
    assert links.classify_period(link).variant == "constant"
    per = links.custom(lambda t: 3 * np.asarray(t) + np.sin(t), period_class="periodic", period=2 * math.pi)
    assert links.classify_period(per).q0 == pytest.approx(6 * math.pi)


def test_parse_link():
    assert links.parse_link("logistic") == links.logistic()
    assert links.parse_link("periodic_gdot(a=3)").a == 3.0
    assert links.parse_link(links.periodic_gdot(2.5).label).a == 2.5
    with pytest.raises(ValueError):
        links.parse_link("cauchy")


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(["logistic", "periodic_gdot(a=2.0)", "gaussian_tail"]),
       st.floats(-30, 30), st.floats(1e-3, 5))
def test_cdf_monotone_and_consistent(name, t, h):
    link = links.parse_link(name)
    f0, f1 = link.cdf(t), link.cdf(t + h)
    assert 0.0 <= f0 <= f1 <= 1.0
    if 1e-6 < f0 < 1 - 1e-6:
        assert math.log(f0 / (1 - f0)) == pytest.approx(link.g(t), abs=1e-6)


@settings(max_examples=50, deadline=None)
@given(st.floats(1.01, 5), st.floats(-20, 20))
def test_periodic_shift(a, t):
    link = links.periodic_gdot(a)
    eta = 2 * math.pi
    assert link.g_dot(t + eta) == pytest.approx(link.g_dot(t), abs=1e-12)
    assert link.g(t + eta) - link.g(t) == pytest.approx(a * eta, abs=1e-9)
