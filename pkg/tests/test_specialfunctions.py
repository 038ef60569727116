import math

import numpy as np
import pytest
from scipy import integrate

from BootAgg import SpecialFunctions, BetaParams, DomainError


def quadrature_cdf(x, a, b):
    """I_x(a, b) by adaptive quadrature of the Beta density."""
    log_norm = math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)

    def density(t):
        return math.exp((a - 1.0) * math.log(t) + (b - 1.0) * math.log1p(-t) - log_norm)

    mode = (a - 1.0) / (a + b - 2.0) if a > 1.0 and b > 1.0 else None
    options = dict(epsabs=1e-13, epsrel=1e-13, limit=500)
    if x <= a / (a + b):
        points = [mode] if mode != None and 0.0 < mode < x else None
        return integrate.quad(density, 0.0, x, points=points, **options)[0]
    else:
        points = [mode] if mode != None and x < mode < 1.0 else None
        return 1.0 - integrate.quad(density, x, 1.0, points=points, **options)[0]


def binomial_sum_cdf(x, a, b):
    """I_x(a, b) for integer shapes as a Binomial tail sum."""
    m = a + b - 1
    return sum(math.comb(m, j) * x**j * (1.0 - x)**(m - j) for j in range(a, m + 1))


class TestBetaParams:
    def test_rejects_invalid_shapes(self):
        for a, b in [(0.0, 1.0), (1.0, -2.0), (math.nan, 1.0), (math.inf, 1.0)]:
            with pytest.raises(DomainError):
                BetaParams(a, b)

    def test_reflected(self):
        assert BetaParams(2.0, 3.5).reflected() == BetaParams(3.5, 2.0)


class TestRegIncBeta:
    @pytest.mark.parametrize("k", [0.5, 1.0, 2.5, 10.0, 80.0])
    def test_symmetric_midpoint(self, k):
        assert SpecialFunctions.reg_inc_beta(0.5, BetaParams(k, k)) == pytest.approx(0.5, abs=1e-14)

    def test_uniform_is_identity(self):
        assert SpecialFunctions.reg_inc_beta(0.3, BetaParams(1, 1)) == pytest.approx(0.3, abs=1e-15)

    def test_closed_form_example(self):
        assert SpecialFunctions.reg_inc_beta(0.25, BetaParams(2, 2)) == pytest.approx(0.15625, abs=1e-15)

    def test_endpoints(self):
        params = BetaParams(3.7, 0.2)
        assert SpecialFunctions.reg_inc_beta(0.0, params) == 0.0
        assert SpecialFunctions.reg_inc_beta(1.0, params) == 1.0

    def test_rejects_x_outside_unit_interval(self):
        for x in [-1e-9, 1.0000001, math.nan]:
            with pytest.raises(DomainError):
                SpecialFunctions.reg_inc_beta(x, BetaParams(2, 2))

    def test_integer_shapes_match_binomial_sum(self):
        xs = np.linspace(0.0, 1.0, 41)
        for a in range(1, 6):
            for b in range(1, 6):
                for x in xs:
                    expected = binomial_sum_cdf(float(x), a, b)
                    assert abs(SpecialFunctions.reg_inc_beta(x, BetaParams(a, b)) - expected) <= 1e-12

    def test_matches_quadrature(self):
        generator = np.random.default_rng(2024)
        for case in range(1000):
            a, b = generator.uniform(0.1, 100.0, 2)
            x = generator.uniform(0.0, 1.0)
            value = SpecialFunctions.reg_inc_beta(x, BetaParams(a, b))
            assert abs(value - quadrature_cdf(x, a, b)) <= 1e-9, (x, a, b)

    def test_reflection(self):
        generator = np.random.default_rng(5)
        for case in range(2000):
            a, b = generator.uniform(0.1, 100.0, 2)
            x = generator.uniform(0.0, 1.0)
            forward = SpecialFunctions.reg_inc_beta(x, BetaParams(a, b))
            backward = SpecialFunctions.reg_inc_beta(1.0 - x, BetaParams(b, a))
            assert abs(forward - (1.0 - backward)) <= 1e-12

    def test_monotone_in_x(self):
        generator = np.random.default_rng(9)
        xs = np.linspace(0.0, 1.0, 201)
        for case in range(50):
            params = BetaParams(*generator.uniform(0.1, 100.0, 2))
            values = [SpecialFunctions.reg_inc_beta(x, params) for x in xs]
            assert all(later >= earlier - 1e-15 for earlier, later in zip(values, values[1:]))
            assert all(0.0 <= v <= 1.0 for v in values)


class TestBetaQuantile:
    @pytest.mark.parametrize("k", [0.5, 2.5, 40.0])
    def test_symmetric_median(self, k):
        assert SpecialFunctions.beta_quantile(0.5, BetaParams(k, k)) == pytest.approx(0.5, abs=1e-9)

    @pytest.mark.parametrize("a, expected", [(9.5, 0.8126), (19.5, 0.9051), (39.5, 0.9522), (199.5, 0.9904), (1999.5, 0.9990)])
    def test_full_occupancy_bounds(self, a, expected):
        assert SpecialFunctions.beta_quantile(0.05, BetaParams(a, 0.5)) == pytest.approx(expected, abs=5e-4)

    def test_endpoints(self):
        params = BetaParams(2.0, 7.0)
        assert SpecialFunctions.beta_quantile(0.0, params) == 0.0
        assert SpecialFunctions.beta_quantile(1.0, params) == 1.0

    def test_rejects_invalid_probability(self):
        for p in [-0.1, 1.5, math.nan]:
            with pytest.raises(DomainError):
                SpecialFunctions.beta_quantile(p, BetaParams(2, 2))

    def test_inverts_cdf(self):
        generator = np.random.default_rng(31)
        for case in range(500):
            params = BetaParams(*generator.uniform(0.1, 100.0, 2))
            p = generator.uniform(0.001, 0.999)
            x = SpecialFunctions.beta_quantile(p, params)
            assert abs(SpecialFunctions.reg_inc_beta(x, params) - p) <= 1e-10

    def test_round_trip_from_x(self):
        generator = np.random.default_rng(37)
        for case in range(500):
            params = BetaParams(*generator.uniform(0.5, 20.0, 2))
            x = generator.uniform(0.05, 0.95)
            p = SpecialFunctions.reg_inc_beta(x, params)
            if 1e-4 < p < 1.0 - 1e-4:
                assert SpecialFunctions.beta_quantile(p, params) == pytest.approx(x, abs=1e-9)


class TestLogBeta:
    def test_small_integers(self):
        assert SpecialFunctions.log_beta(BetaParams(2, 3)) == pytest.approx(math.log(1.0 / 12.0), abs=1e-14)

    def test_density_integrates_to_one(self):
        params = BetaParams(2.5, 4.0)
        area = integrate.quad(lambda t: SpecialFunctions.beta_pdf(t, params), 0.0, 1.0)[0]
        assert area == pytest.approx(1.0, abs=1e-10)
