"""Identification diagnostics and the sign-saturation test for two-period
panel binary choice with fixed effects."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CapacityError,
    ConfigError,
    DegenerateDataError,
    PreconditionError,
    SignSatError,
)
from .links import LinkFunction, gaussian_tail, logistic, periodic_gdot  # noqa: E402
from .dgp import PanelDesign, PanelSample, simulate  # noqa: E402
from .maxscore import ScoreObjective, maximize, minimize, rho_hat  # noqa: E402
from .sstest import TestConfig, sign_saturation_check  # noqa: E402

__all__ = [
    "CapacityError", "ConfigError", "DegenerateDataError", "PreconditionError", "SignSatError",
    "LinkFunction", "gaussian_tail", "logistic", "periodic_gdot",
    "PanelDesign", "PanelSample", "simulate",
    "ScoreObjective", "maximize", "minimize", "rho_hat",
    "TestConfig", "sign_saturation_check",
]
