import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twoenvelopes.beliefs import CV_CLOSED_FORM, NormalBelief, cv_residual, density
from twoenvelopes.numerics import (
    BracketError,
    Quadrature,
    QuadratureError,
    RandomStream,
    find_root,
    integrate,
    sample_truncated_normal,
    sample_uniform,
    std_normal_cdf,
    std_normal_pdf,
)

# Frozen from mpmath at 40 digits.
PDF_AT_1 = 0.2419707245191433
CDF_AT_1 = 0.8413447460685429


class TestStdNormal:
    def test_pdf_at_zero(self):
        assert std_normal_pdf(0.0) == pytest.approx(1 / math.sqrt(2 * math.pi), abs=1e-15)
        assert std_normal_pdf(0.0) == pytest.approx(0.3989422804, abs=1e-10)

    def test_pdf_at_one(self):
        assert std_normal_pdf(1.0) == pytest.approx(PDF_AT_1, rel=1e-14)

    @given(st.floats(-30, 30))
    def test_pdf_even_and_positive(self, t):
        assert std_normal_pdf(t) == std_normal_pdf(-t)
        assert std_normal_pdf(t) > 0

    def test_cdf_values(self):
        assert std_normal_cdf(0.0) == 0.5
        assert std_normal_cdf(8.0) == pytest.approx(1.0, abs=1e-12)
        assert std_normal_cdf(1.0) == pytest.approx(CDF_AT_1, abs=1e-14)

    def test_cdf_matches_quadrature_of_pdf(self):
        # The runtime path is erfc; quadrature of the density is the oracle.
        for x in np.linspace(-4, 4, 33):
            assert std_normal_cdf(x) == pytest.approx(integrate(std_normal_pdf, -12.0, x), abs=1e-8)
        assert integrate(std_normal_pdf, 0.0, 1.0) + 0.5 == pytest.approx(CDF_AT_1, abs=1e-9)

    @given(st.floats(-38, 38))
    def test_cdf_symmetry(self, x):
        assert std_normal_cdf(x) + std_normal_cdf(-x) == pytest.approx(1.0, abs=1e-12)

    @given(st.floats(-38, 38), st.floats(0, 5))
    def test_cdf_monotone(self, x, dx):
        assert std_normal_cdf(x) <= std_normal_cdf(x + dx)


class TestIntegrate:
    def test_constant(self):
        assert integrate(lambda x: 1.0, 0.0, 1.0) == pytest.approx(1.0, abs=1e-12)

    def test_polynomial(self):
        n = 4
        assert integrate(lambda x: x, 0.0, n / 2) == pytest.approx(2.0, abs=1e-12)

    def test_normal_mass(self):
        assert integrate(std_normal_pdf, -12.0, 12.0) == pytest.approx(1.0, abs=1e-9)

    def test_empty_interval(self):
        assert integrate(math.exp, 3.0, 3.0) == 0.0

    def test_reversed_limits_rejected(self):
        with pytest.raises(ValueError):
            integrate(math.exp, 1.0, 0.0)

    def test_against_scipy(self):
        scipy_integrate = pytest.importorskip("scipy.integrate")
        f = lambda x: math.exp(-x) * math.sin(3 * x) ** 2
        ref, _ = scipy_integrate.quad(f, 0, 10, epsabs=1e-13, epsrel=1e-13)
        assert integrate(f, 0, 10) == pytest.approx(ref, abs=1e-9)

    def test_depth_exhaustion_is_reported(self):
        # 1/sqrt(x) near 0 needs more halvings than a depth budget of 10 allows.
        with pytest.raises(QuadratureError):
            integrate(lambda x: 1 / math.sqrt(x) if x > 0 else 0.0, 0.0, 1.0, Quadrature(1e-12, 10))

    def test_non_finite_integrand_is_reported(self):
        with pytest.raises(QuadratureError):
            integrate(lambda x: math.inf, 0.0, 1.0)

    def test_quadrature_invariants(self):
        with pytest.raises(ValueError):
            Quadrature(abs_tolerance=0.0)
        with pytest.raises(ValueError):
            Quadrature(max_depth=9)

    @given(
        st.floats(-3, 3), st.floats(-3, 3),
        st.floats(0.1, 3), st.floats(-2, 2), st.floats(0.1, 4),
    )
    @settings(max_examples=40, deadline=None)
    def test_linearity(self, alpha, beta, freq, shift, width):
        f = lambda x: math.sin(freq * x + shift)
        g = lambda x: math.exp(-((x - shift) ** 2))
        a, b = -width, width
        combined = integrate(lambda x: alpha * f(x) + beta * g(x), a, b)
        separate = alpha * integrate(f, a, b) + beta * integrate(g, a, b)
        assert abs(combined - separate) <= 2 * Quadrature().abs_tolerance


class TestFindRoot:
    def test_linear(self):
        assert find_root(lambda x: x - 1, 0.0, 2.0) == pytest.approx(1.0, abs=1e-12)

    def test_sqrt2(self):
        tol = 1e-10
        assert abs(find_root(lambda x: x * x - 2, 1.0, 2.0, tol) - math.sqrt(2)) <= tol

    def test_cv_equation(self):
        root = find_root(cv_residual, 0.05, 2.0)
        assert root == pytest.approx(0.3678, abs=1e-4)

    def test_no_sign_change(self):
        with pytest.raises(BracketError):
            find_root(lambda x: x * x + 1, -1.0, 1.0)

    def test_bad_tol(self):
        with pytest.raises(ValueError):
            find_root(lambda x: x, -1.0, 1.0, tol=0.0)

    def test_deterministic(self):
        g = lambda x: math.cos(x) - x
        assert find_root(g, 0.0, 1.0) == find_root(g, 0.0, 1.0)

    @given(st.floats(-100, 100), st.floats(0.1, 10), st.floats(0.01, 50), st.floats(0.01, 50))
    def test_monotone_functions_converge_inside_bracket(self, r, slope, left, right):
        g = lambda x: slope * (x - r) ** 3 + (x - r)
        lo, hi = r - left, r + right
        root = find_root(g, lo, hi, tol=1e-9)
        assert lo <= root <= hi
        assert abs(root - r) <= 1e-9


class TestRandomStream:
    def test_same_seed_same_sequence(self):
        a = RandomStream(42, 3).random(1000)
        b = RandomStream(42, 3).random(1000)
        assert np.array_equal(a, b)

    def test_distinct_streams_differ_and_are_uncorrelated(self):
        a = RandomStream(42, 0).random(100_000)
        b = RandomStream(42, 1).random(100_000)
        assert not np.array_equal(a, b)
        # |corr| of independent uniforms has sd 1/sqrt(n) ~ 0.003.
        assert abs(np.corrcoef(a, b)[0, 1]) < 0.015

    def test_invalid_seed(self):
        with pytest.raises(ValueError):
            RandomStream(-1)
        with pytest.raises(ValueError):
            RandomStream(2**64)


class TestSamplers:
    def test_uniform_bounds_and_determinism(self):
        a = sample_uniform(RandomStream(7), 0.0, 1.0, 10_000)
        b = sample_uniform(RandomStream(7), 0.0, 1.0, 10_000)
        assert np.array_equal(a, b)
        assert np.all((a > 0) & (a <= 1))

    def test_uniform_half_ceiling(self):
        n = 100.0
        draws = sample_uniform(RandomStream(8), 0.0, n / 2, 100_000)
        assert draws.max() <= 50.0

    def test_uniform_scalar(self):
        v = sample_uniform(RandomStream(1), 2.0, 3.0)
        assert isinstance(v, float) and 2.0 < v <= 3.0

    def test_uniform_mean(self):
        draws = sample_uniform(RandomStream(9), 0.0, 2.0, 1_000_000)
        assert draws.mean() == pytest.approx(1.0, abs=0.01)

    def test_uniform_rejects_empty_interval(self):
        with pytest.raises(ValueError):
            sample_uniform(RandomStream(1), 1.0, 1.0)

    def test_truncated_normal_positive(self):
        draws = sample_truncated_normal(RandomStream(3), 1.0, 2.0, 200_000)
        assert np.all(draws > 0)
        assert sample_truncated_normal(RandomStream(3), 1.0, 2.0) > 0

    def test_truncated_normal_density_at_peak(self):
        mu = 300.0
        belief = NormalBelief(mu, CV_CLOSED_FORM)
        n, h = 1_000_000, 10.0
        draws = sample_truncated_normal(RandomStream(11), mu, mu * CV_CLOSED_FORM, n)
        hits = np.count_nonzero((draws > mu - h / 2) & (draws <= mu + h / 2))
        p_bin = integrate(lambda x: density(belief, x, mu), mu - h / 2, mu + h / 2)
        # Frozen from mpmath: bin mass and the analytic peak density.
        assert p_bin == pytest.approx(0.036265276117271, abs=1e-12)
        assert density(belief, mu, mu) == pytest.approx(0.0036277689961154, rel=1e-12)
        se = math.sqrt(p_bin * (1 - p_bin) / n) / h
        empirical = hits / (n * h)
        assert abs(empirical - density(belief, mu, mu)) <= 3 * se

    def test_truncated_normal_degenerate(self):
        mu = 50.0
        draws = sample_truncated_normal(RandomStream(4), mu, 1e-6 * mu, 1000)
        assert np.allclose(draws, mu, rtol=1e-4)

    def test_truncated_normal_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            sample_truncated_normal(RandomStream(1), 0.0, 1.0)
        with pytest.raises(ValueError):
            sample_truncated_normal(RandomStream(1), 1.0, -1.0)
