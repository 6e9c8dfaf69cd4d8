import math

import numpy as np
import pytest

from quantcalc.errors import (
    DomainError,
    InvalidBracket,
    NonFiniteEvaluation,
)
from quantcalc.numerics import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    chebyshev_boundaries,
    chebyshev_nodes,
    cumulative_integral,
    erfc,
    find_root,
    integrate,
    log_integral,
    upper_incomplete_gamma,
)


def midpoint_oracle(f, a, b, n=10**6):
    xs = a + (b - a) * (np.arange(n) + 0.5) / n
    return float(np.mean(f(xs)) * (b - a))


class TestIntegrate:
    def test_constant(self):
        res = integrate(lambda u: 1.0, 0.0, 1.0)
        assert res.converged
        assert abs(res.value - 1.0) <= DEFAULT_QUADRATURE.abs_tol

    def test_log_singularity(self):
        # antiderivative of -log(1-u) is (1-u)log(1-u) + u, so the value is 1
        res = integrate(lambda u: -math.log1p(-u), 0.0, 1.0)
        assert res.converged
        assert abs(res.value - 1.0) <= 1e-8

    def test_weighted_log_singularity(self):
        # oracle: substitution gives 1 - 1/4 = 3/4; midpoint rule agrees
        res = integrate(lambda u: -u * math.log1p(-u), 0.0, 1.0)
        assert res.converged
        assert abs(res.value - 0.75) <= 1e-8
        mid = midpoint_oracle(lambda u: -u * np.log1p(-u), 0.0, 1.0)
        assert abs(res.value - mid) <= 5e-7

    def test_power_singularity(self):
        res = integrate(lambda u: (1.0 - u) ** -0.5, 0.0, 1.0)
        assert res.converged
        assert abs(res.value - 2.0) <= 1e-9

    def test_converged_error_bound_invariant(self):
        spec = DEFAULT_QUADRATURE
        for f, a, b in [
            (lambda u: u**3, 0.0, 1.0),
            (lambda u: (1.0 - u) ** -0.25, 0.0, 1.0),
            (lambda u: math.exp(u), -1.0, 2.0),
        ]:
            res = integrate(f, a, b, spec)
            assert res.converged
            assert res.error_estimate <= max(
                spec.abs_tol, spec.rel_tol * abs(res.value)
            )

    def test_linearity(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            c1 = rng.normal(size=4)
            c2 = rng.normal(size=4)
            a, b = rng.uniform(0.5, 3.0, size=2)
            f = lambda u: float(np.polyval(c1, u))
            g = lambda u: float(np.polyval(c2, u))
            both = integrate(lambda u: a * f(u) + b * g(u), 0.0, 1.0)
            parts = a * integrate(f, 0.0, 1.0).value + b * integrate(g, 0.0, 1.0).value
            assert abs(both.value - parts) <= 2e-10 * (1 + abs(parts))

    def test_interval_additivity(self):
        f = lambda u: math.sin(3 * u) + (1 - u) ** -0.3
        whole = integrate(f, 0.0, 1.0).value
        split = integrate(f, 0.0, 0.37).value + integrate(f, 0.37, 1.0).value
        assert abs(whole - split) <= 2 * max(
            DEFAULT_QUADRATURE.abs_tol, DEFAULT_QUADRATURE.rel_tol * abs(whole)
        )

    def test_nonfinite_integrand_raises(self):
        def f(u):
            return math.nan if 0.4 < u < 0.6 else 1.0

        with pytest.raises(NonFiniteEvaluation):
            integrate(f, 0.0, 1.0)

    def test_nonconvergence_returns_best_value(self):
        spec = QuadratureSpec(max_subdivisions=1)
        res = integrate(lambda u: math.sin(50.0 / (u + 0.01)), 0.0, 1.0, spec)
        assert not res.converged
        assert math.isfinite(res.value)

    def test_bad_interval(self):
        with pytest.raises(DomainError):
            integrate(lambda u: 1.0, 1.0, 0.0)

    def test_spec_validation(self):
        with pytest.raises(DomainError):
            QuadratureSpec(abs_tol=-1.0)
        with pytest.raises(DomainError):
            QuadratureSpec(endpoint_shrink=1e-2)
        with pytest.raises(DomainError):
            QuadratureSpec(max_subdivisions=0)


class TestFindRoot:
    def test_golden_quadratic(self):
        root = find_root(lambda x: x * x - x - 1.0, 1.0, 2.0, tol=1e-12)
        assert abs(root - (1.0 + math.sqrt(5.0)) / 2.0) <= 1e-10

    def test_odd_function(self):
        assert abs(find_root(lambda x: x, -1.0, 1.0)) <= 1e-12

    def test_exponential(self):
        root = find_root(lambda x: math.exp(-x) - 0.5, 0.0, 2.0)
        assert abs(root - math.log(2.0)) <= 1e-10

    def test_invalid_bracket(self):
        with pytest.raises(InvalidBracket):
            find_root(lambda x: x * x + 1.0, -1.0, 1.0)


class TestErfc:
    def test_at_zero(self):
        assert erfc(0.0) == 1.0

    def test_deep_tail(self):
        val = float(erfc(10.0))
        assert 0.0 < val < 1e-44

    def test_against_defining_integral(self):
        # oracle: 2/sqrt(pi) * int_1^10 exp(-t^2) dt (tail beyond 10 < 1e-44)
        res = integrate(lambda t: math.exp(-t * t), 1.0, 10.0)
        oracle = 2.0 / math.sqrt(math.pi) * res.value
        assert abs(float(erfc(1.0)) - oracle) <= 1e-9
        assert abs(float(erfc(1.0)) - 0.15729920705) <= 1e-9

    def test_symmetry(self):
        xs = np.linspace(-5.0, 5.0, 41)
        assert np.max(np.abs(erfc(xs) + erfc(-xs) - 2.0)) <= 1e-12


class TestUpperIncompleteGamma:
    def test_order_one(self):
        assert abs(upper_incomplete_gamma(1.0, 0.7) - math.exp(-0.7)) <= 1e-12

    def test_half_order_vs_erfc(self):
        target = math.sqrt(math.pi) * float(erfc(1.0))
        assert abs(upper_incomplete_gamma(0.5, 1.0) - target) <= 1e-8

    def test_integration_by_parts_oracle(self):
        # Gamma(2, x) = (x+1) e^(-x)
        assert abs(upper_incomplete_gamma(2.0, 1.0) - 2.0 * math.exp(-1.0)) <= 1e-12

    def test_recurrence_property(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            a = rng.uniform(-3.0, 3.0)
            x = rng.uniform(0.05, 6.0)
            lhs = upper_incomplete_gamma(a + 1.0, x)
            rhs = a * upper_incomplete_gamma(a, x) + x**a * math.exp(-x)
            assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs))

    def test_quadrature_oracle_negative_order(self):
        a, x = -0.75, 1.3
        res = integrate(lambda t: t ** (a - 1.0) * math.exp(-t), x, 60.0)
        assert abs(upper_incomplete_gamma(a, x) - res.value) <= 1e-10

    def test_domain(self):
        with pytest.raises(DomainError):
            upper_incomplete_gamma(0.5, 0.0)


class TestLogIntegral:
    def test_limit_at_zero(self):
        assert abs(log_integral(1e-15)) <= 1e-12

    def test_against_quadrature_oracle(self):
        # oracle values computed from int_0^x dt/log(t)
        for x, tol in [(0.5, 1e-7), (0.9, 1e-6)]:
            res = integrate(lambda t: 1.0 / math.log(t) if t > 0 else 0.0, 0.0, x)
            assert abs(log_integral(x) - res.value) <= tol
        assert abs(log_integral(0.5) - (-0.3786710431)) <= 1e-7
        assert abs(log_integral(0.9) - (-1.7758006834)) <= 1e-6

    def test_negative_on_unit_interval(self):
        for x in (0.1, 0.5, 0.99):
            assert log_integral(x) < 0.0

    def test_derivative_property(self):
        h = 1e-6
        for x in (0.2, 0.5, 0.8):
            fd = (log_integral(x + h) - log_integral(x - h)) / (2 * h)
            exact = 1.0 / math.log(x)
            assert abs(fd - exact) <= 1e-5 * abs(exact)

    def test_domain(self):
        for bad in (0.0, 1.0, 1.5, -0.2):
            with pytest.raises(DomainError):
                log_integral(bad)


class TestGrids:
    def test_chebyshev_nodes_interior_and_clustered(self):
        us = chebyshev_nodes(64)
        assert us.shape == (64,)
        assert 0.0 < us[0] < us[-1] < 1.0
        assert us[1] - us[0] < us[33] - us[32]

    def test_cumulative_integral_matches_adaptive(self):
        bounds = chebyshev_boundaries(256)
        cum = cumulative_integral(lambda u: -np.log1p(-u), bounds)
        assert abs(cum[-1] - 1.0) <= 1e-9
        mid = integrate(lambda u: -math.log1p(-u), 0.0, float(bounds[100])).value
        assert abs(cum[100] - mid) <= 1e-9
