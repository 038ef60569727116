from fractions import Fraction

import pytest

from BootAgg import Coverage, CoverageSpec, SpecialFunctions, BetaParams, DomainError

TABLE = [
    # n, implied coverage, Jeffreys mean, Jeffreys lower bound at alpha 0.05
    (9,    "0.8000", "0.9500", 0.8126),
    (19,   "0.9000", "0.9750", 0.9051),
    (39,   "0.9500", "0.9875", 0.9522),
    (199,  "0.9900", "0.9975", 0.9904),
    (1999, "0.9990", None,     0.9990),
]


class TestImpliedCoverage:
    def test_exact_fractions(self):
        assert Coverage.implied_coverage(39) == Fraction(19, 20)
        assert Coverage.implied_coverage(1) == 0
        assert Coverage.implied_coverage(1999) == Fraction(999, 1000)

    def test_rejects_non_positive(self):
        for n in [0, -3, 2.5, True]:
            with pytest.raises(DomainError):
                Coverage.implied_coverage(n)


class TestRequiredN:
    @pytest.mark.parametrize("c, n", [(0.95, 39), (0.9, 19), (0.999, 1999), (0.99, 199), (0.0, 1), (0.5, 3)])
    def test_known_values(self, c, n):
        assert Coverage.required_n(c) == n

    def test_smallest_sufficient_n(self):
        for hundredths in range(100):
            c = Fraction(hundredths, 100)
            n = Coverage.required_n(c)
            assert Coverage.implied_coverage(n) >= c
            if n > 1:
                assert Coverage.implied_coverage(n - 1) < c

    def test_decimal_strings(self):
        assert Coverage.required_n("0.95") == 39

    @pytest.mark.parametrize("c", [1.0, 1.5, -0.01, float("nan"), "abc"])
    def test_rejects_invalid(self, c):
        with pytest.raises(DomainError):
            Coverage.required_n(c)


class TestJeffreys:
    def test_mean_exceeds_implied_coverage(self):
        gaps = []
        for n in range(1, 500):
            mean = Coverage.jeffreys_mean(n)
            assert mean == pytest.approx((n + 0.5) / (n + 1))
            gap = mean - float(Coverage.implied_coverage(n))
            assert gap > 0
            gaps.append(gap)
        assert all(later < earlier for earlier, later in zip(gaps, gaps[1:]))

    @pytest.mark.parametrize("n, coverage, mean, lower", TABLE)
    def test_table_rows(self, n, coverage, mean, lower):
        row = Coverage.table_row(n, 0.05)
        assert "{:.4f}".format(float(row["implied_coverage"])) == coverage
        if mean != None:
            assert "{:.4f}".format(row["jeffreys_mean"]) == mean
        assert row["jeffreys_lower"] == pytest.approx(lower, abs=5e-4)

    def test_full_occupancy_interval(self):
        result = Coverage.jeffreys_interval(39, CoverageSpec(39, 0.05))
        assert result.jeffreys_lower == pytest.approx(0.9522, abs=5e-4)
        assert result.jeffreys_lower == SpecialFunctions.beta_quantile(0.05, BetaParams(39.5, 0.5))
        assert result.jeffreys_upper == 1.0
        assert result.jeffreys_mean == pytest.approx(39.5 / 40.0)

    def test_n_equals_199(self):
        assert Coverage.jeffreys_interval(199, CoverageSpec(199)).jeffreys_lower == pytest.approx(0.9904, abs=5e-4)

    def test_single_image(self):
        lower = Coverage.jeffreys_interval(1, CoverageSpec(1)).jeffreys_lower
        assert lower == SpecialFunctions.beta_quantile(0.05, BetaParams(1.5, 0.5))
        assert 0.0 < lower < 1.0

    def test_empty_count_pins_lower_bound(self):
        result = Coverage.jeffreys_interval(0, CoverageSpec(10, 0.05))
        assert result.jeffreys_lower == 0.0
        assert 0.0 < result.jeffreys_upper < 1.0

    def test_lower_bound_monotone_in_z(self):
        spec = CoverageSpec(30, 0.1)
        lowers = [Coverage.jeffreys_interval(z, spec).jeffreys_lower for z in range(31)]
        assert all(later > earlier for earlier, later in zip(lowers, lowers[1:]))
        for z, lower in enumerate(lowers):
            assert lower <= Coverage.jeffreys_interval(z, spec).jeffreys_mean

    def test_rejects_z_out_of_range(self):
        for z in [-1, 11]:
            with pytest.raises(DomainError):
                Coverage.jeffreys_interval(z, CoverageSpec(10))

    def test_spec_validation(self):
        for alpha in [0.0, 1.0, -0.5]:
            with pytest.raises(DomainError):
                CoverageSpec(10, alpha)
        with pytest.raises(DomainError):
            CoverageSpec(0)
