"""Intermediate Amount Strategy for the two-envelopes game."""

from .beliefs import CV_CLOSED_FORM, NormalBelief, Posterior, UniformBelief, intermediate_amount, posterior, solve_cv
from .numerics import Quadrature, RandomStream, find_root, integrate
from .simulation import (
    FixedX,
    LogUniformX,
    SimulationReport,
    TruncNormalX,
    UniformX,
    correct_probability_analytic,
    run_experiment,
)
from .strategy import IAS, AlwaysExchange, Decision, NeverExchange, Perspective, RandomExchange, decide, resolve_exchange

__version__ = "0.1.0"

__all__ = [
    "CV_CLOSED_FORM", "NormalBelief", "Posterior", "UniformBelief", "intermediate_amount", "posterior", "solve_cv",
    "Quadrature", "RandomStream", "find_root", "integrate",
    "FixedX", "LogUniformX", "SimulationReport", "TruncNormalX", "UniformX",
    "correct_probability_analytic", "run_experiment",
    "IAS", "AlwaysExchange", "Decision", "NeverExchange", "Perspective", "RandomExchange",
    "decide", "resolve_exchange",
]
