"""Error distributions described through their log-odds transform.

A link is the cdf ``F`` of the time-varying error ``u_t``. Everything else in
the package works with ``G = log(F / (1 - F))`` and its derivative ``G'``,
since ``F = 1 / (1 + exp(-G))`` and the geometry of the moment curves is
driven entirely by differences ``G(s + a) - G(a)``.

Three families are built in:

``logistic``
    ``G(t) = t``; ``G'`` is constant.
``periodic_gdot``
    ``G(t) = a*t + sin(t)`` so that ``G'(t) = a + cos(t)`` with ``a > 1``;
    ``G'`` is periodic with minimal period ``2*pi``. ``G(0) = 0``.
``gaussian_tail``
    ``F`` is the standard normal cdf; ``G'`` is not periodic.

Anything else goes through :func:`custom`, which must declare its period
class explicitly because minimal periods are not detected numerically.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import expit, log_ndtr, ndtr

from .errors import DomainError, InvalidLinkError, UnclassifiableLinkError

LOGISTIC = "logistic"
PERIODIC_GDOT = "periodic_gdot"
GAUSSIAN_TAIL = "gaussian_tail"
CUSTOM = "custom"

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# step for central differences on custom links without an analytic G'
FD_STEP = 1e-6


@dataclass(frozen=True)
class PeriodClass:
    """Periodicity of ``G'``.

    ``variant`` is ``"constant"``, ``"periodic"`` or ``"nonperiodic"``. For
    the periodic variant ``eta`` is the minimal positive period and
    ``q0 = G(eta) - G(0)``.
    """

    variant: str
    eta: Optional[float] = None
    q0: Optional[float] = None

    def __post_init__(self):
        if self.variant not in ("constant", "periodic", "nonperiodic"):
            raise ValueError(f"unknown period class {self.variant!r}")
        if self.variant == "periodic" and not (self.eta is not None and self.eta > 0):
            raise ValueError("a periodic class needs a positive period eta")

    @property
    def is_constant(self) -> bool:
        return self.variant == "constant"

    @property
    def is_periodic(self) -> bool:
        return self.variant == "periodic"


@dataclass(frozen=True)
class LinkFunction:
    """Immutable description of an error cdf.

    Use the factory functions (:func:`logistic`, :func:`periodic_gdot`,
    :func:`gaussian_tail`, :func:`custom`) rather than the constructor.
    """

    kind: str
    a: float = 2.0
    g_func: Optional[Callable] = field(default=None, compare=False, repr=False)
    g_dot_func: Optional[Callable] = field(default=None, compare=False, repr=False)
    declared_class: Optional[str] = None
    declared_period: Optional[float] = None
    name: Optional[str] = None

    def __post_init__(self):
        if self.kind not in (LOGISTIC, PERIODIC_GDOT, GAUSSIAN_TAIL, CUSTOM):
            raise ValueError(f"unknown link kind {self.kind!r}")
        if self.kind == PERIODIC_GDOT and not self.a > 1.0:
            raise InvalidLinkError(f"periodic_gdot needs a > 1, got {self.a}")
        if self.kind == CUSTOM and self.g_func is None:
            raise ValueError("a custom link needs an evaluator for G")

    # -- evaluation -------------------------------------------------------

    def g(self, t):
        t = _finite(t)
        if self.kind == LOGISTIC:
            out = t * 1.0
        elif self.kind == PERIODIC_GDOT:
            out = self.a * t + np.sin(t)
        elif self.kind == GAUSSIAN_TAIL:
            out = log_ndtr(t) - log_ndtr(-t)
        else:
            out = np.asarray(self.g_func(t), dtype=float)
        return _unwrap(out)

    def g_dot(self, t):
        t = _finite(t)
        if self.kind == LOGISTIC:
            out = np.ones_like(t)
        elif self.kind == PERIODIC_GDOT:
            out = self.a + np.cos(t)
        elif self.kind == GAUSSIAN_TAIL:
            # phi(t) / (Phi(t) * Phi(-t)), in logs to survive the tails
            out = np.exp(-0.5 * t * t - _LOG_SQRT_2PI - log_ndtr(t) - log_ndtr(-t))
        elif self.g_dot_func is not None:
            out = np.asarray(self.g_dot_func(t), dtype=float)
        else:
            h = FD_STEP * np.maximum(1.0, np.abs(t))
            out = (np.asarray(self.g_func(t + h)) - np.asarray(self.g_func(t - h))) / (2 * h)
        if np.any(~(out > 0)):
            raise InvalidLinkError(f"{self.label} has a non-positive derivative of G")
        return _unwrap(out)

    def cdf(self, t):
        t = _finite(t)
        if self.kind == GAUSSIAN_TAIL:
            out = ndtr(t)
        else:
            out = expit(np.asarray(self.g(t), dtype=float))
        return _unwrap(out)

    @property
    def label(self) -> str:
        if self.kind == PERIODIC_GDOT:
            return f"periodic_gdot(a={self.a!r})"
        if self.kind == CUSTOM:
            return self.name or "custom"
        return self.kind


def _finite(t):
    arr = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("link functions are defined for finite arguments only")
    return arr


def _unwrap(out):
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


# -- factories -------------------------------------------------------------


def logistic() -> LinkFunction:
    return LinkFunction(LOGISTIC)


def periodic_gdot(a: float = 2.0) -> LinkFunction:
    """Link with ``G'(t) = a + cos(t)``; requires ``a > 1``."""
    return LinkFunction(PERIODIC_GDOT, a=float(a))


def gaussian_tail() -> LinkFunction:
    """Standard normal errors (probit link)."""
    return LinkFunction(GAUSSIAN_TAIL)


def custom(g, g_dot=None, period_class=None, period=None, name=None) -> LinkFunction:
    """Wrap user-supplied evaluators for ``G`` and optionally ``G'``.

    Parameters
    ----------
    g : callable
        Vectorised evaluator of the log-odds transform.
    g_dot : callable, optional
        Its derivative. Central differences with step ``FD_STEP * max(1, |t|)``
        are used when omitted.
    period_class : {"constant", "periodic", "nonperiodic"}, optional
        Declared periodicity of ``G'``. Required by anything that calls
        :func:`classify_period`.
    period : float, optional
        Minimal positive period of ``G'`` when ``period_class="periodic"``.
    """
    if period_class == "periodic" and not (period is not None and period > 0):
        raise ValueError("a periodic custom link must declare its minimal period")
    return LinkFunction(
        CUSTOM,
        g_func=g,
        g_dot_func=g_dot,
        declared_class=period_class,
        declared_period=None if period is None else float(period),
        name=name,
    )


# -- module-level operations -------------------------------------------------


def cdf(link: LinkFunction, t):
    """``F(t) = 1 / (1 + exp(-G(t)))``."""
    return link.cdf(t)


def g_transform(link: LinkFunction, t):
    """Log-odds transform ``G(t)``."""
    return link.g(t)


def g_dot(link: LinkFunction, t):
    """Derivative ``G'(t)``; raises :class:`InvalidLinkError` if not positive."""
    return link.g_dot(t)


def classify_period(link: LinkFunction) -> PeriodClass:
    """Declared periodicity of ``G'`` for ``link``."""
    if link.kind == LOGISTIC:
        return PeriodClass("constant")
    if link.kind == PERIODIC_GDOT:
        eta = 2.0 * math.pi
        return PeriodClass("periodic", eta=eta, q0=link.g(eta) - link.g(0.0))
    if link.kind == GAUSSIAN_TAIL:
        return PeriodClass("nonperiodic")
    if link.declared_class is None:
        raise UnclassifiableLinkError(
            f"{link.label}: custom links must declare their period class"
        )
    if link.declared_class == "periodic":
        eta = link.declared_period
        return PeriodClass("periodic", eta=eta, q0=link.g(eta) - link.g(0.0))
    return PeriodClass(link.declared_class)


_LINK_RE = re.compile(r"^\s*([a-z_]+)\s*(?:\((.*)\))?\s*$")


def parse_link(text: str) -> LinkFunction:
    """Parse ``"logistic"``, ``"gaussian_tail"`` or ``"periodic_gdot(a=2.0)"``."""
    m = _LINK_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse link {text!r}")
    kind, args = m.group(1), m.group(2)
    kwargs = {}
    if args and args.strip():
        for part in args.split(","):
            key, sep, value = part.partition("=")
            if not sep:
                raise ValueError(f"link arguments must be key=value, got {part!r}")
            kwargs[key.strip()] = float(value)
    if kind == LOGISTIC and not kwargs:
        return logistic()
    if kind == GAUSSIAN_TAIL and not kwargs:
        return gaussian_tail()
    if kind == PERIODIC_GDOT and set(kwargs) <= {"a"}:
        return periodic_gdot(**kwargs)
    raise ValueError(f"unknown link specification {text!r}")
