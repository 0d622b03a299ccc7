"""Closed-form expected payoffs, in multiples of the true smaller amount X.

These are the analytic oracles the simulator is checked against.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .beliefs import Posterior, UniformBelief, posterior
from .strategy import IAS, Decision, Perspective, decide, resolve_exchange

# Before the reveal, a uniform-belief player with M = N/2 expects to land in
# the "revealed <= M" branch with probability 3/4 and above it with 1/4.
P_CASE_REQUEST = Fraction(3, 4)
P_CASE_KEEP = Fraction(1, 4)

_UNIFORM_LOW = Fraction(2, 3)  # P[revealed is the smaller | revealed <= N/2]


class Branch(enum.Enum):
    ACCEPTED = "accepted"
    DENIED = "denied"
    KEEP = "keep"


def _expect(p_smaller: Fraction | float, ends_with_other: bool):
    """Expected holding given P[revealed is the smaller] and who ends up with it."""
    p_larger = 1 - p_smaller
    if ends_with_other:
        return p_smaller * 2 + p_larger * 1
    return p_smaller * 1 + p_larger * 2


def e_initial() -> float:
    return float(Fraction(1, 2) * 1 + Fraction(1, 2) * 2)


def _case1(accepted: bool) -> Fraction:
    return _expect(_UNIFORM_LOW, ends_with_other=accepted)


def e_uniform_case1(accepted: bool) -> float:
    """Revealed amount at or below N/2: request granted (5/3) or refused (4/3)."""
    return float(_case1(accepted))


def e_uniform_keep() -> float:
    return float(_expect(Fraction(0), ends_with_other=False))


def _check_probability(p: float, name: str) -> Fraction:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {p}")
    return Fraction(p)


def e_pregame_opener(p_b: float) -> float:
    """Opener's pre-reveal expectation when the observer requests with probability ``p_b``."""
    p = _check_probability(p_b, "p_b")
    ladder = P_CASE_REQUEST * (p * _case1(True) + (1 - p) * _case1(False)) + P_CASE_KEEP * 2
    return float(ladder)


def e_pregame_observer(p_a: float) -> float:
    """Observer's pre-reveal expectation when the opener requests with probability ``p_a``.

    The 3/4 branch assumes the observer's request is always granted; the
    formula is kept in that form on purpose.
    """
    p = _check_probability(p_a, "p_a")
    ladder = P_CASE_REQUEST * _case1(True) + P_CASE_KEEP * (p * 2 + (1 - p) * 1)
    return float(ladder)


def e_via_straddle() -> float:
    """Half the time M straddles the pair (payoff 2X), otherwise the 3X/2 baseline."""
    return float(Fraction(1, 2) * Fraction(3, 2) + Fraction(1, 2) * 2)


def e_both_ias() -> tuple[float, float]:
    e_a = P_CASE_KEEP * 2 + P_CASE_REQUEST * _case1(False)
    e_b = P_CASE_KEEP * 1 + P_CASE_REQUEST * _case1(True)
    return float(e_a), float(e_b)


def e_normal(post: Posterior, branch: Branch) -> float:
    return float(_expect(post.p_smaller, ends_with_other=branch is Branch.ACCEPTED))


@dataclass(frozen=True)
class ExpectationReport:
    e_init: float
    e_accepted: float
    e_denied: float
    e_keep: float
    e_pregame: float


def expectation_report(p_b: float) -> ExpectationReport:
    return ExpectationReport(
        e_init=e_initial(),
        e_accepted=e_uniform_case1(True),
        e_denied=e_uniform_case1(False),
        e_keep=e_uniform_keep(),
        e_pregame=e_pregame_opener(p_b),
    )


# ---------------------------------------------------------------------------
# Both players on IAS with different thresholds
# ---------------------------------------------------------------------------

# Strict orderings of the revealed amount A and the two thresholds, listed
# smallest first.
ORDERINGS = {
    "a": ("M_A", "M_B", "A"),
    "b": ("M_B", "M_A", "A"),
    "c": ("A", "M_A", "M_B"),
    "d": ("A", "M_B", "M_A"),
    "e": ("M_A", "A", "M_B"),
    "f": ("M_B", "A", "M_A"),
}


@dataclass(frozen=True)
class OutcomeRow:
    case: str
    ordering: tuple[str, str, str]
    decision_a: Decision
    decision_b: Decision
    exchanged: bool
    e_a: Fraction
    e_b: Fraction

    @property
    def total(self) -> Fraction:
        return self.e_a + self.e_b


def classify(a: float, m_a: float, m_b: float) -> str:
    """Case letter for concrete amounts; ties have no row and are rejected."""
    if len({a, m_a, m_b}) != 3:
        raise ValueError(f"ordering is not strict: A={a}, M_A={m_a}, M_B={m_b}")
    named = sorted((("A", a), ("M_A", m_a), ("M_B", m_b)), key=lambda kv: kv[1])
    ordering = tuple(name for name, _ in named)
    return next(k for k, v in ORDERINGS.items() if v == ordering)


def table1(case: str | tuple[str, str, str]) -> OutcomeRow:
    """One row of the both-IAS outcome matrix.

    The row is derived rather than transcribed: concrete amounts realising
    the ordering are fed to two uniform-belief IAS players (M = N/2), and
    each side's expectation follows from its own posterior about A (2/3 vs
    1/3 at or below M, certainty of "larger" above it) and from which
    envelope it ends up holding.
    """
    if isinstance(case, tuple):
        matches = [k for k, v in ORDERINGS.items() if v == case]
        if not matches:
            raise ValueError(f"not a strict ordering of A, M_A, M_B: {case!r}")
        case = matches[0]
    if case not in ORDERINGS:
        raise ValueError(f"unknown case {case!r}; expected one of {', '.join(ORDERINGS)}")
    ordering = ORDERINGS[case]
    # 4 < 5 < 6 keeps A below both ceilings N = 2M, so neither belief is violated.
    values = dict(zip(ordering, (4.0, 5.0, 6.0)))
    a = values["A"]
    player_a = IAS(UniformBelief(2 * values["M_A"]))
    player_b = IAS(UniformBelief(2 * values["M_B"]))

    d_a = decide(player_a, a, Perspective.OPENER)
    d_b = decide(player_b, a, Perspective.OBSERVER)
    exchanged = resolve_exchange(d_a, d_b)

    def p_revealed_smaller(player: IAS) -> Fraction:
        return _UNIFORM_LOW if posterior(player.prior, a).p_smaller > 0 else Fraction(0)

    e_a = _expect(p_revealed_smaller(player_a), ends_with_other=exchanged)
    # The observer holds the other envelope unless the swap happens.
    e_b = _expect(p_revealed_smaller(player_b), ends_with_other=not exchanged)
    return OutcomeRow(case, ordering, d_a, d_b, exchanged, e_a, e_b)


def outcome_matrix() -> list[OutcomeRow]:
    return [table1(case) for case in ORDERINGS]
