"""Monte Carlo engine for the two-envelopes game.

An organizer model draws the smaller amount X, a fair coin decides who is
dealt 2X, the opener's envelope is revealed, and both strategies decide.
Rounds are simulated in numpy batches; :func:`play_round` is the same code
path run on a batch of one.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from statistics import NormalDist
from typing import IO, Iterator, Union

import numpy as np

from .beliefs import UniformBelief, straddle_probability
from .numerics import (
    TAIL_SIGMAS,
    RandomStream,
    integrate,
    sample_truncated_normal,
    sample_uniform,
    std_normal_cdf,
    std_normal_pdf,
)
from .strategy import Perspective, Strategy, format_number, parse_params

# Rounds per batch inside a block.  Part of the reproducibility contract:
# changing it changes the order of draws.
CHUNK = 1 << 16

Z95 = NormalDist().inv_cdf(0.975)


# ---------------------------------------------------------------------------
# Organizer models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FixedX:
    x: float

    def __post_init__(self):
        _positive(x=self.x)

    def sample(self, rs: RandomStream, size=None):
        return self.x if size is None else np.full(size, self.x, dtype=float)

    def straddle(self, m: float) -> float:
        return 1.0 if m / 2 < self.x <= m else 0.0

    def __str__(self):
        return f"fixed:x={format_number(self.x)}"


@dataclass(frozen=True)
class UniformX:
    """X uniform on (0, n_true/2]."""

    n_true: float

    def __post_init__(self):
        _positive(n_true=self.n_true)

    def sample(self, rs: RandomStream, size=None):
        return sample_uniform(rs, 0.0, self.n_true / 2, size)

    def straddle(self, m: float) -> float:
        return straddle_probability(UniformBelief(self.n_true), m)

    def __str__(self):
        return f"uniform:N={format_number(self.n_true)}"


@dataclass(frozen=True)
class LogUniformX:
    lo: float
    hi: float

    def __post_init__(self):
        _positive(lo=self.lo, hi=self.hi)
        if not self.lo < self.hi:
            raise ValueError(f"need lo < hi, got lo={self.lo}, hi={self.hi}")

    def sample(self, rs: RandomStream, size=None):
        return np.exp(sample_uniform(rs, math.log(self.lo), math.log(self.hi), size))

    def pdf(self, x: float) -> float:
        if x < self.lo or x > self.hi:
            return 0.0
        return 1.0 / (x * math.log(self.hi / self.lo))

    def straddle(self, m: float) -> float:
        lo, hi = max(m / 2, self.lo), min(m, self.hi)
        return integrate(self.pdf, lo, hi) if lo < hi else 0.0

    def __str__(self):
        return f"loguniform:lo={format_number(self.lo)},hi={format_number(self.hi)}"


@dataclass(frozen=True)
class TruncNormalX:
    """Normal(mu, sigma) for X, truncated to X > 0."""

    mu: float
    sigma: float

    def __post_init__(self):
        _positive(mu=self.mu, sigma=self.sigma)

    def sample(self, rs: RandomStream, size=None):
        return sample_truncated_normal(rs, self.mu, self.sigma, size)

    def pdf(self, x: float) -> float:
        if x <= 0:
            return 0.0
        return std_normal_pdf((x - self.mu) / self.sigma) / (self.sigma * std_normal_cdf(self.mu / self.sigma))

    def straddle(self, m: float) -> float:
        # Clip to mu +- 12 sigma so a narrow peak can never fall between nodes.
        reach = TAIL_SIGMAS * self.sigma
        lo = max(m / 2, 0.0, self.mu - reach)
        hi = min(m, self.mu + reach)
        if not lo < hi:
            return 0.0
        if lo < self.mu < hi:
            return integrate(self.pdf, lo, self.mu) + integrate(self.pdf, self.mu, hi)
        return integrate(self.pdf, lo, hi)

    def __str__(self):
        return f"truncnormal:mu={format_number(self.mu)},sigma={format_number(self.sigma)}"


OrganizerModel = Union[FixedX, UniformX, LogUniformX, TruncNormalX]


def _positive(**values: float) -> None:
    for name, v in values.items():
        if not (v > 0 and math.isfinite(v)):
            raise ValueError(f"{name} must be positive and finite, got {v}")


def parse_organizer(spec: str) -> OrganizerModel:
    """``fixed:x=300``, ``uniform:N=1000``, ``loguniform:lo=1,hi=1000``,
    ``truncnormal:mu=300,sigma=110``."""
    kind, _, rest = spec.strip().partition(":")
    params = parse_params(rest, spec)
    expected = {
        "fixed": (FixedX, ("x",)),
        "uniform": (UniformX, ("N",)),
        "loguniform": (LogUniformX, ("lo", "hi")),
        "truncnormal": (TruncNormalX, ("mu", "sigma")),
    }
    if kind not in expected:
        raise ValueError(f"unknown organizer kind {kind!r} in {spec!r}")
    cls, names = expected[kind]
    if set(params) != set(names):
        raise ValueError(f"{spec!r} must set exactly: {', '.join(names)}")
    return cls(*(params[n] for n in names))


def correct_probability_analytic(model: OrganizerModel, m: float) -> float:
    """P(IAS opener with threshold m classifies the revealed amount correctly).

    Equals 1/2 + P(m/2 < X <= m) / 2 under the organizer's true law of X.
    """
    if m < 0:
        raise ValueError(f"m must be non-negative, got {m}")
    return 0.5 + 0.5 * model.straddle(m)


# ---------------------------------------------------------------------------
# Rounds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GameRound:
    x: float
    opener_has_larger: bool

    def __post_init__(self):
        _positive(x=self.x)

    @property
    def revealed(self) -> float:
        return 2 * self.x if self.opener_has_larger else self.x


@dataclass(frozen=True)
class RoundResult:
    payoff_opener: float
    payoff_observer: float
    exchanged: bool
    opener_predicted_correctly: bool
    observer_predicted_correctly: bool
    belief_violated: bool


@dataclass
class RoundBatch:
    """Column-wise results for a batch of rounds."""

    x: np.ndarray
    opener_has_larger: np.ndarray
    revealed: np.ndarray
    opener_requested: np.ndarray
    observer_requested: np.ndarray
    exchanged: np.ndarray
    opener_ends_larger: np.ndarray
    opener_correct: np.ndarray
    observer_correct: np.ndarray
    belief_violated: np.ndarray

    def __len__(self):
        return len(self.x)

    @property
    def payoff_opener(self) -> np.ndarray:
        return np.where(self.opener_ends_larger, 2 * self.x, self.x)

    @property
    def payoff_observer(self) -> np.ndarray:
        return np.where(self.opener_ends_larger, self.x, 2 * self.x)

    @property
    def ratio_opener(self) -> np.ndarray:
        return np.where(self.opener_ends_larger, 2.0, 1.0)


def draw_round(model: OrganizerModel, rs: RandomStream) -> GameRound:
    x = model.sample(rs)
    return GameRound(float(x), bool(rs.random() < 0.5))


def _violations(strategy: Strategy, revealed: np.ndarray) -> np.ndarray:
    belief = strategy.belief
    if isinstance(belief, UniformBelief):
        return revealed > belief.n_max
    return np.zeros(revealed.shape, dtype=bool)


def play_batch(
    x: np.ndarray,
    opener_has_larger: np.ndarray,
    s_opener: Strategy,
    s_observer: Strategy,
    rs: RandomStream,
) -> RoundBatch:
    x = np.asarray(x, dtype=float)
    opener_has_larger = np.asarray(opener_has_larger, dtype=bool)
    revealed = np.where(opener_has_larger, 2 * x, x)
    # Opener decides first, then observer: fixes the draw order for random strategies.
    req_opener = np.asarray(s_opener.requests(revealed, Perspective.OPENER, rs), dtype=bool)
    req_observer = np.asarray(s_observer.requests(revealed, Perspective.OBSERVER, rs), dtype=bool)
    exchanged = req_opener & req_observer
    return RoundBatch(
        x=x,
        opener_has_larger=opener_has_larger,
        revealed=revealed,
        opener_requested=req_opener,
        observer_requested=req_observer,
        exchanged=exchanged,
        opener_ends_larger=opener_has_larger ^ exchanged,
        # Requesting means "revealed is the smaller" for the opener and
        # "revealed is the larger" for the observer.
        opener_correct=req_opener != opener_has_larger,
        observer_correct=req_observer == opener_has_larger,
        belief_violated=_violations(s_opener, revealed) | _violations(s_observer, revealed),
    )


def play_round(round: GameRound, s_opener: Strategy, s_observer: Strategy, rs: RandomStream) -> RoundResult:
    b = play_batch(np.array([round.x]), np.array([round.opener_has_larger]), s_opener, s_observer, rs)
    return RoundResult(
        payoff_opener=float(b.payoff_opener[0]),
        payoff_observer=float(b.payoff_observer[0]),
        exchanged=bool(b.exchanged[0]),
        opener_predicted_correctly=bool(b.opener_correct[0]),
        observer_predicted_correctly=bool(b.observer_correct[0]),
        belief_violated=bool(b.belief_violated[0]),
    )


def simulate_block(
    model: OrganizerModel,
    s_opener: Strategy,
    s_observer: Strategy,
    rounds: int,
    rs: RandomStream,
) -> Iterator[RoundBatch]:
    """Yield :class:`RoundBatch` chunks covering ``rounds`` rounds drawn from ``rs``."""
    remaining = rounds
    while remaining > 0:
        n = min(CHUNK, remaining)
        x = model.sample(rs, n)
        coin = rs.random(n) < 0.5
        yield play_batch(x, coin, s_opener, s_observer, rs)
        remaining -= n


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------


@dataclass
class _Tally:
    rounds: int = 0
    opener_larger: int = 0
    opener_correct: int = 0
    observer_correct: int = 0
    exchanges: int = 0
    violations: int = 0

    def add(self, b: RoundBatch) -> None:
        self.rounds += len(b)
        self.opener_larger += int(b.opener_ends_larger.sum())
        self.opener_correct += int(b.opener_correct.sum())
        self.observer_correct += int(b.observer_correct.sum())
        self.exchanges += int(b.exchanged.sum())
        self.violations += int(b.belief_violated.sum())

    def merge(self, other: "_Tally") -> None:
        for f in fields(self):
            setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))


def _ci95(successes: int, n: int) -> float:
    """Normal-approximation half width for the mean of a 0/1 (or 1/2) variable."""
    if n < 2:
        return math.nan
    var = successes * (n - successes) / (n * (n - 1))
    return Z95 * math.sqrt(var / n)


@dataclass(frozen=True)
class SimulationReport:
    organizer: str
    opener_strategy: str
    observer_strategy: str
    rounds: int
    seed: int
    workers: int
    mean_ratio_opener: float
    mean_ratio_observer: float
    ci95_half_width_ratio_opener: float
    ci95_half_width_ratio_observer: float
    freq_correct_opener: float
    freq_correct_observer: float
    ci95_half_width_correct_opener: float
    ci95_half_width_correct_observer: float
    exchange_rate: float
    belief_violation_count: int

    @classmethod
    def _from_tally(cls, t: _Tally, model, s_opener, s_observer, seed, workers) -> "SimulationReport":
        n = t.rounds
        return cls(
            organizer=str(model),
            opener_strategy=str(s_opener),
            observer_strategy=str(s_observer),
            rounds=n,
            seed=seed,
            workers=workers,
            # Per-round ratios are exactly 1 or 2, so the means follow from counts.
            mean_ratio_opener=(n + t.opener_larger) / n,
            mean_ratio_observer=(2 * n - t.opener_larger) / n,
            ci95_half_width_ratio_opener=_ci95(t.opener_larger, n),
            ci95_half_width_ratio_observer=_ci95(n - t.opener_larger, n),
            freq_correct_opener=t.opener_correct / n,
            freq_correct_observer=t.observer_correct / n,
            ci95_half_width_correct_opener=_ci95(t.opener_correct, n),
            ci95_half_width_correct_observer=_ci95(t.observer_correct, n),
            exchange_rate=t.exchanges / n,
            belief_violation_count=t.violations,
        )

    def as_dict(self) -> dict:
        return asdict(self)


def block_sizes(rounds: int, workers: int) -> list[int]:
    base, extra = divmod(rounds, workers)
    return [base + (1 if i < extra else 0) for i in range(workers)]


def _run_block(model, s_opener, s_observer, rounds, seed, index, sink=None) -> _Tally:
    tally = _Tally()
    rs = RandomStream(seed, index)
    for batch in simulate_block(model, s_opener, s_observer, rounds, rs):
        tally.add(batch)
        if sink is not None:
            sink(index, batch)
    return tally


def run_experiment(
    model: OrganizerModel,
    s_opener: Strategy,
    s_observer: Strategy,
    rounds: int,
    seed: int,
    workers: int = 1,
    rounds_csv: IO[str] | None = None,
) -> SimulationReport:
    """Play ``rounds`` rounds split into ``workers`` contiguous blocks.

    Block ``i`` draws from ``RandomStream(seed, i)``, so the report depends
    only on ``(seed, workers)`` and the configuration, never on scheduling.
    When ``rounds_csv`` is given every round is also written there and the
    blocks run one after another, in block order.
    """
    if rounds < 1:
        raise ValueError(f"rounds must be at least 1, got {rounds}")
    if workers < 1:
        raise ValueError(f"workers must be at least 1, got {workers}")
    sizes = block_sizes(rounds, workers)

    if rounds_csv is not None:
        writer = RoundWriter(rounds_csv)
        tallies = [_run_block(model, s_opener, s_observer, n, seed, i, writer.write) for i, n in enumerate(sizes)]
    elif workers == 1:
        tallies = [_run_block(model, s_opener, s_observer, sizes[0], seed, 0)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_run_block, model, s_opener, s_observer, n, seed, i) for i, n in enumerate(sizes)
            ]
            tallies = [f.result() for f in futures]

    total = _Tally()
    for t in tallies:
        total.merge(t)
    return SimulationReport._from_tally(total, model, s_opener, s_observer, seed, workers)


# ---------------------------------------------------------------------------
# Per-round CSV
# ---------------------------------------------------------------------------

ROUND_COLUMNS = (
    "round",
    "block",
    "x",
    "opener_has_larger",
    "revealed",
    "opener_requested",
    "observer_requested",
    "exchanged",
    "payoff_opener",
    "payoff_observer",
    "opener_correct",
    "observer_correct",
    "belief_violated",
)


class RoundWriter:
    """Streams round batches as CSV rows; booleans are written as 0/1."""

    def __init__(self, fh: IO[str]):
        self._writer = csv.writer(fh, lineterminator="\n")
        self._writer.writerow(ROUND_COLUMNS)
        self._next = 0

    def write(self, block: int, b: RoundBatch) -> None:
        cols = (
            b.x,
            b.opener_has_larger,
            b.revealed,
            b.opener_requested,
            b.observer_requested,
            b.exchanged,
            b.payoff_opener,
            b.payoff_observer,
            b.opener_correct,
            b.observer_correct,
            b.belief_violated,
        )
        for i, row in enumerate(zip(*cols)):
            self._writer.writerow(
                [self._next + i, block]
                + [int(v) if isinstance(v, np.bool_) else repr(float(v)) for v in row]
            )
        self._next += len(b)
