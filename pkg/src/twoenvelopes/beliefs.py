"""A player's prior belief about the two amounts, and what follows from it.

Two belief models are supported:

* :class:`UniformBelief` -- the player names a ceiling ``N`` and treats the
  smaller amount as uniform on ``(0, N/2]``.
* :class:`NormalBelief` -- the player names a most-likely smaller amount
  ``x_hat``; each of the two amounts follows a zero-truncated normal peaked at
  ``x_hat`` (resp. ``2 * x_hat``) with standard deviation proportional to the
  peak.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

from .numerics import find_root, std_normal_cdf

# Coefficient of variation that makes the two hypotheses equally dense at the
# midpoint 3*x_hat/2.  Equal to sqrt(3 / (32 ln 2)).
CV_CLOSED_FORM = 3.0 / (4.0 * math.sqrt(6.0 * math.log(2.0)))

CV_BRACKET = (0.05, 2.0)


@dataclass(frozen=True)
class UniformBelief:
    n_max: float

    def __post_init__(self):
        if not (self.n_max > 0 and math.isfinite(self.n_max)):
            raise ValueError(f"n_max must be positive and finite, got {self.n_max}")

    @property
    def smaller_domain(self) -> tuple[float, float]:
        return (0.0, self.n_max / 2)

    @property
    def larger_domain(self) -> tuple[float, float]:
        return (0.0, self.n_max)

    def violated_by(self, amount: float) -> bool:
        """True if ``amount`` cannot occur at all under this belief."""
        return amount > self.n_max


@dataclass(frozen=True)
class NormalBelief:
    x_hat: float
    cv: float = CV_CLOSED_FORM

    def __post_init__(self):
        if not (self.x_hat > 0 and math.isfinite(self.x_hat)):
            raise ValueError(f"x_hat must be positive and finite, got {self.x_hat}")
        if not (self.cv > 0 and math.isfinite(self.cv)):
            raise ValueError(f"cv must be positive and finite, got {self.cv}")

    def sigma(self, mu: float) -> float:
        return mu * self.cv

    def violated_by(self, amount: float) -> bool:
        return False


Belief = Union[UniformBelief, NormalBelief]


@dataclass(frozen=True)
class Posterior:
    """Probabilities that the revealed amount is the smaller / the larger one."""

    p_smaller: float
    p_larger: float = field(init=False)

    def __post_init__(self):
        if not 0.0 <= self.p_smaller <= 1.0:
            raise ValueError(f"p_smaller must lie in [0, 1], got {self.p_smaller}")
        # 1 - p is exact for p >= 1/2 and rounds so the pair still sums to 1.
        object.__setattr__(self, "p_larger", 1.0 - self.p_smaller)

    def __iter__(self):
        yield self.p_smaller
        yield self.p_larger


def intermediate_amount(belief: Belief) -> float:
    """The threshold M: revealed amounts at or below it are taken as the smaller."""
    if isinstance(belief, UniformBelief):
        return belief.n_max / 2
    if isinstance(belief, NormalBelief):
        return 1.5 * belief.x_hat
    raise TypeError(f"not a belief: {belief!r}")


def straddle_probability(belief: UniformBelief, m: float) -> float:
    """P(m/2 < X <= m) when X is uniform on (0, n_max/2]."""
    if m < 0:
        raise ValueError(f"m must be non-negative, got {m}")
    top = belief.n_max / 2
    overlap = min(m, top) - max(m / 2, 0.0)
    return max(overlap, 0.0) / top


def _log_density(x: float, mu: float, cv: float) -> float:
    sigma = mu * cv
    z = (x - mu) / sigma
    # 1 - Phi(-mu/sigma) == Phi(1/cv); the latter has no cancellation.
    return -0.5 * z * z - math.log(sigma * math.sqrt(2.0 * math.pi)) - math.log(std_normal_cdf(1.0 / cv))


def density(belief: NormalBelief, x: float, mu: float) -> float:
    """Zero-truncated normal density at ``x`` with peak ``mu`` and sigma ``mu * cv``."""
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu}")
    if x <= 0:
        return 0.0
    return math.exp(_log_density(x, mu, belief.cv))


def cv_residual(cv: float, x_hat: float = 1.0) -> float:
    """f(M, x_hat) - f(M, 2 x_hat) at M = 3 x_hat / 2, as a function of cv."""
    b = NormalBelief(x_hat, cv)
    m = 1.5 * x_hat
    return density(b, m, x_hat) - density(b, m, 2 * x_hat)


def solve_cv(x_hat: float = 1.0, tol: float = 1e-12) -> float:
    """Numerically solve the equal-density condition for cv by bisection."""
    lo, hi = CV_BRACKET
    return find_root(lambda c: cv_residual(c, x_hat), lo, hi, tol)


def posterior(belief: Belief, a: float) -> Posterior:
    """Posterior over whether the revealed amount ``a`` is the smaller one.

    Under a uniform belief this is (2/3, 1/3) up to ``n_max/2`` and (0, 1)
    above it; amounts beyond ``n_max`` also map to (0, 1) -- callers flag
    those through :meth:`UniformBelief.violated_by`.
    """
    if not a > 0:
        raise ValueError(f"revealed amount must be positive, got {a}")
    if isinstance(belief, UniformBelief):
        if a <= belief.n_max / 2:
            return Posterior(2.0 / 3.0)
        return Posterior(0.0)
    if isinstance(belief, NormalBelief):
        # Density ratio in log space: far from both peaks the raw densities
        # underflow to zero long before their ratio becomes extreme.
        log_small = _log_density(a, belief.x_hat, belief.cv)
        log_large = _log_density(a, 2 * belief.x_hat, belief.cv)
        d = log_large - log_small
        if d > 0:
            e = math.exp(-d)
            return Posterior(e / (1.0 + e))
        return Posterior(1.0 / (1.0 + math.exp(d)))
    raise TypeError(f"not a belief: {belief!r}")
