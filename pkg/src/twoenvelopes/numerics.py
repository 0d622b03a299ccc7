"""Numerical kernel: standard-normal functions, adaptive quadrature,
bisection, seedable random streams and samplers.

Everything here is deliberately small and dependency-light; the heavier
machinery (scipy) appears only in the tests, as an independent oracle.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

SQRT_2PI = math.sqrt(2.0 * math.pi)
_INV_SQRT2 = 1.0 / math.sqrt(2.0)

# Truncation point for integrals to infinity, in units of sigma past the mean.
TAIL_SIGMAS = 12.0


class QuadratureError(ArithmeticError):
    """Adaptive quadrature ran out of subdivision depth before converging."""


class BracketError(ValueError):
    """The supplied interval does not bracket a sign change."""


def std_normal_pdf(t: float) -> float:
    return math.exp(-0.5 * t * t) / SQRT_2PI


def std_normal_cdf(x: float) -> float:
    # erfc keeps full relative precision in the lower tail, unlike 1 + erf.
    return 0.5 * math.erfc(-x * _INV_SQRT2)


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

# 15-point Kronrod nodes on [0, 1] (symmetric); odd indices are the 7-point
# Gauss nodes.
_XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
)
_WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
_WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)


@dataclass(frozen=True)
class Quadrature:
    """Settings for :func:`integrate`.

    ``max_depth`` bounds how many times any one subinterval may be halved.
    """

    abs_tolerance: float = 1e-9
    max_depth: int = 50

    def __post_init__(self):
        if not self.abs_tolerance > 0:
            raise ValueError(f"abs_tolerance must be positive, got {self.abs_tolerance}")
        if self.max_depth < 10:
            raise ValueError(f"max_depth must be at least 10, got {self.max_depth}")


DEFAULT_QUADRATURE = Quadrature()


def _gauss_kronrod(f: Callable[[float], float], a: float, b: float) -> tuple[float, float]:
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    fc = f(center)
    kronrod = _WGK[7] * fc
    gauss = _WG[3] * fc
    for j in range(7):
        dx = half * _XGK[j]
        pair = f(center - dx) + f(center + dx)
        kronrod += _WGK[j] * pair
        if j % 2 == 1:
            gauss += _WG[j // 2] * pair
    kronrod *= half
    gauss *= half
    if not (math.isfinite(kronrod) and math.isfinite(gauss)):
        raise QuadratureError(f"integrand is not finite on [{a}, {b}]")
    return kronrod, abs(kronrod - gauss)


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    q: Quadrature = DEFAULT_QUADRATURE,
) -> float:
    """Integrate ``f`` over ``[a, b]`` to absolute tolerance ``q.abs_tolerance``.

    Globally adaptive Gauss-Kronrod (7/15): the subinterval with the largest
    error estimate is halved until the summed estimate meets the tolerance.
    Raises :class:`QuadratureError` when an interval that still needs
    splitting has already been halved ``q.max_depth`` times.
    """
    if not a <= b:
        raise ValueError(f"integration limits out of order: a={a} > b={b}")
    if a == b:
        return 0.0

    value, err = _gauss_kronrod(f, a, b)
    # Max-heap on error: entries are (-err, a, b, value, depth).
    heap = [(-err, a, b, value, 0)]
    total_value, total_err = value, err
    while total_err > q.abs_tolerance:
        # Stop refining once the remaining error is pure floating-point noise.
        if total_err <= 50.0 * np.finfo(float).eps * abs(total_value):
            break
        neg_err, lo, hi, val, depth = heapq.heappop(heap)
        if depth >= q.max_depth:
            raise QuadratureError(
                f"no convergence on [{a}, {b}]: error estimate {total_err:.3e} "
                f"after {q.max_depth} halvings of [{lo}, {hi}]"
            )
        mid = 0.5 * (lo + hi)
        left, el = _gauss_kronrod(f, lo, mid)
        right, er = _gauss_kronrod(f, mid, hi)
        heapq.heappush(heap, (-el, lo, mid, left, depth + 1))
        heapq.heappush(heap, (-er, mid, hi, right, depth + 1))
        total_value += left + right - val
        total_err += el + er + neg_err
    # Re-sum from scratch; the running total accumulates cancellation error.
    return math.fsum(entry[3] for entry in heap)


# ---------------------------------------------------------------------------
# Root finding
# ---------------------------------------------------------------------------


def find_root(
    g: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-12,
    max_iter: int = 200,
) -> float:
    """Bisection on a bracketing interval; returns the final midpoint."""
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if lo > hi:
        lo, hi = hi, lo
    g_lo, g_hi = g(lo), g(hi)
    if g_lo == 0.0:
        return lo
    if g_hi == 0.0:
        return hi
    if not (g_lo < 0.0) != (g_hi < 0.0) or math.isnan(g_lo) or math.isnan(g_hi):
        raise BracketError(f"g({lo})={g_lo} and g({hi})={g_hi} do not bracket a root")

    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break  # bracket is down to adjacent floats
        g_mid = g(mid)
        if g_mid == 0.0:
            return mid
        if (g_mid < 0.0) == (g_lo < 0.0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Random streams and samplers
# ---------------------------------------------------------------------------


class RandomStream:
    """A reproducible random stream identified by ``(seed, stream_index)``.

    Streams with the same seed but different indices are derived through
    numpy's ``SeedSequence`` spawn keys, so they are statistically
    independent. A stream holds mutable state; do not share one between
    threads.
    """

    def __init__(self, seed: int, stream_index: int = 0):
        if not 0 <= seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        if stream_index < 0:
            raise ValueError(f"stream_index must be non-negative, got {stream_index}")
        self.seed = int(seed)
        self.stream_index = int(stream_index)
        seq = np.random.SeedSequence(self.seed, spawn_key=(self.stream_index,))
        self._gen = np.random.Generator(np.random.PCG64(seq))

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, stream_index={self.stream_index})"

    def random(self, size=None):
        """Uniform draws on [0, 1)."""
        return self._gen.random(size)

    def standard_normal(self, size=None):
        return self._gen.standard_normal(size)


def sample_uniform(rs: RandomStream, lo: float, hi: float, size=None):
    """Uniform draws on the half-open interval ``(lo, hi]``."""
    if not lo < hi:
        raise ValueError(f"need lo < hi, got lo={lo}, hi={hi}")
    u = 1.0 - rs.random(size)  # (0, 1]
    x = lo + (hi - lo) * u
    # lo + tiny can round back onto lo when lo != 0.
    return np.maximum(x, np.nextafter(lo, hi)) if size is not None else max(x, math.nextafter(lo, hi))


def sample_truncated_normal(rs: RandomStream, mu: float, sigma: float, size=None):
    """Normal(mu, sigma) draws conditioned on being strictly positive.

    Rejection from the untruncated normal: non-positive draws are redrawn.
    """
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu}")
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if size is None:
        while True:
            x = mu + sigma * rs.standard_normal()
            if x > 0.0:
                return float(x)
    out = mu + sigma * rs.standard_normal(size)
    bad = out <= 0.0
    while bad.any():
        out[bad] = mu + sigma * rs.standard_normal(int(bad.sum()))
        bad = out <= 0.0
    return out
