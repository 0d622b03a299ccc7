"""Exchange decisions for the opener and the observer.

Both players see the same revealed amount: the opener's own envelope.  An
IAS player classifies that amount against their threshold M and then acts
to end up with the envelope they believe is larger, which means opposite
actions depending on whose envelope was opened.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

import numpy as np

from .beliefs import CV_CLOSED_FORM, Belief, NormalBelief, UniformBelief, intermediate_amount
from .numerics import RandomStream


class Perspective(enum.Enum):
    OPENER = "opener"
    OBSERVER = "observer"


class Decision(enum.Enum):
    REQUEST_EXCHANGE = "request"
    KEEP = "keep"


def format_number(v: float) -> str:
    """Shortest text that parses back to the same float."""
    text = repr(float(v))
    return text[:-2] if text.endswith(".0") else text


class Strategy:
    """Base class.  Subclasses implement :meth:`requests`, the vectorised rule."""

    def requests(self, revealed: np.ndarray, perspective: Perspective, rs: RandomStream | None) -> np.ndarray:
        raise NotImplementedError

    @property
    def belief(self) -> Belief | None:
        return None


@dataclass(frozen=True)
class IAS(Strategy):
    """Intermediate Amount Strategy backed by a prior belief."""

    prior: Belief

    @property
    def belief(self) -> Belief:
        return self.prior

    @property
    def threshold(self) -> float:
        return intermediate_amount(self.prior)

    def requests(self, revealed, perspective, rs=None):
        believes_smaller = np.asarray(revealed) <= self.threshold
        if perspective is Perspective.OPENER:
            return believes_smaller
        # Observer: revealed taken as larger means the observer's own is the smaller.
        return ~believes_smaller

    def __str__(self):
        if isinstance(self.prior, UniformBelief):
            return f"ias-uniform:N={format_number(self.prior.n_max)}"
        if self.prior.cv == CV_CLOSED_FORM:
            return f"ias-normal:X={format_number(self.prior.x_hat)}"
        return f"ias-normal:X={format_number(self.prior.x_hat)},cv={format_number(self.prior.cv)}"


@dataclass(frozen=True)
class AlwaysExchange(Strategy):
    def requests(self, revealed, perspective, rs=None):
        return np.ones(np.shape(revealed), dtype=bool)

    def __str__(self):
        return "always"


@dataclass(frozen=True)
class NeverExchange(Strategy):
    def requests(self, revealed, perspective, rs=None):
        return np.zeros(np.shape(revealed), dtype=bool)

    def __str__(self):
        return "never"


@dataclass(frozen=True)
class RandomExchange(Strategy):
    """Requests an exchange with probability ``p``, one stream draw per decision."""

    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")

    def requests(self, revealed, perspective, rs=None):
        if rs is None:
            raise ValueError("RandomExchange needs a RandomStream")
        return rs.random(np.shape(revealed)) < self.p

    def __str__(self):
        return f"random:p={format_number(self.p)}"


def decide(strategy: Strategy, revealed: float, perspective: Perspective, rs: RandomStream | None = None) -> Decision:
    if not revealed > 0:
        raise ValueError(f"revealed amount must be positive, got {revealed}")
    wants = bool(strategy.requests(np.asarray(revealed, dtype=float), perspective, rs))
    return Decision.REQUEST_EXCHANGE if wants else Decision.KEEP


def resolve_exchange(d_opener: Decision, d_observer: Decision) -> bool:
    """The envelopes change hands only if both players ask."""
    return d_opener is Decision.REQUEST_EXCHANGE and d_observer is Decision.REQUEST_EXCHANGE


# ---------------------------------------------------------------------------
# Strategy strings: ias-uniform:N=1000, ias-normal:X=300[,cv=0.4], always, never,
# random:p=0.5
# ---------------------------------------------------------------------------

_SPEC_RE = re.compile(r"^\s*([a-z][a-z-]*)\s*(?::(.*))?$")


def parse_params(text: str | None, spec: str) -> dict[str, float]:
    """Parse ``k=v,k=v`` into floats; shared with the organizer grammar."""
    params: dict[str, float] = {}
    if text is None or not text.strip():
        return params
    for item in text.split(","):
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ValueError(f"malformed parameter {item.strip()!r} in {spec!r}")
        if key in params:
            raise ValueError(f"duplicate parameter {key!r} in {spec!r}")
        try:
            params[key] = float(value)
        except ValueError:
            raise ValueError(f"parameter {key!r} in {spec!r} is not a number: {value.strip()!r}") from None
    return params


def _take(params: dict[str, float], required: tuple[str, ...], optional: tuple[str, ...], spec: str) -> None:
    missing = [k for k in required if k not in params]
    if missing:
        raise ValueError(f"{spec!r} is missing parameter(s): {', '.join(missing)}")
    unknown = sorted(set(params) - set(required) - set(optional))
    if unknown:
        raise ValueError(f"{spec!r} has unknown parameter(s): {', '.join(unknown)}")


def parse_strategy(spec: str) -> Strategy:
    match = _SPEC_RE.match(spec)
    if not match:
        raise ValueError(f"cannot parse strategy {spec!r}")
    kind, rest = match.groups()
    params = parse_params(rest, spec)
    if kind == "ias-uniform":
        _take(params, ("N",), (), spec)
        return IAS(UniformBelief(params["N"]))
    if kind == "ias-normal":
        _take(params, ("X",), ("cv",), spec)
        if "cv" in params:
            return IAS(NormalBelief(params["X"], params["cv"]))
        return IAS(NormalBelief(params["X"]))
    if kind == "always":
        _take(params, (), (), spec)
        return AlwaysExchange()
    if kind == "never":
        _take(params, (), (), spec)
        return NeverExchange()
    if kind == "random":
        _take(params, ("p",), (), spec)
        return RandomExchange(params["p"])
    raise ValueError(f"unknown strategy kind {kind!r} in {spec!r}")
