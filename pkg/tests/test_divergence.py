"""Divergence kernels, entropy, and the two-sided sandwich."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sherman_bounds import (
    CHAIN_SLACK,
    DimensionMismatch,
    DistributionPair,
    ModulusNotCertified,
    NotAProbabilityVector,
    RatioOutOfDomain,
    StochasticMatrix,
    ValidationError,
    ZeroAggregateWeight,
    aggregated_divergence_bounds,
    catalog,
    csiszar_divergence,
    divergence_bounds,
    get_kernel,
    kl_divergence,
    shannon_entropy,
)
from helpers import fsum_dot, random_row_stochastic

CLOSED_FORMS = {
    "kl": lambda p, q: math.fsum(qi * math.log(qi / pi) for pi, qi in zip(p, q)),
    "hellinger": lambda p, q: 0.5
    * math.fsum((math.sqrt(qi) - math.sqrt(pi)) ** 2 for pi, qi in zip(p, q)),
    "variational": lambda p, q: math.fsum(abs(qi - pi) for pi, qi in zip(p, q)),
    "harmonic": lambda p, q: math.fsum(2.0 * pi * qi / (pi + qi) for pi, qi in zip(p, q)),
    "bhattacharya": lambda p, q: -math.fsum(math.sqrt(pi * qi) for pi, qi in zip(p, q)),
    "triangular": lambda p, q: math.fsum((qi - pi) ** 2 / (pi + qi) for pi, qi in zip(p, q)),
    "chi_square": lambda p, q: math.fsum((qi - pi) ** 2 / pi for pi, qi in zip(p, q)),
    "renyi:2": lambda p, q: math.fsum(qi * qi / pi for pi, qi in zip(p, q)),
}


def bounded_pair(rng: np.random.Generator, size: int) -> DistributionPair:
    """Random probability pair with ratios well inside (0.1, 10)."""
    raw = rng.uniform(0.1, 1.0, size)
    p = raw / raw.sum()
    q = p * rng.uniform(0.5, 2.0, size)
    q = q / q.sum()
    return DistributionPair(p, q)


class TestDistributionPair:
    def test_ratios_and_size(self):
        pair = DistributionPair([0.5, 0.5], [0.2, 0.8])
        assert pair.size == 2
        np.testing.assert_allclose(pair.ratios, [0.4, 1.6], rtol=0, atol=1e-15)
        with pytest.raises(ValueError):
            pair.ratios[0] = 2.0  # read-only

    def test_validation(self):
        with pytest.raises(ValidationError):
            DistributionPair([0.5, 0.5], [1.0])
        with pytest.raises(ValidationError):
            DistributionPair([0.5, -0.5], [0.5, 0.5])
        with pytest.raises(ValidationError):
            DistributionPair([0.5, 0.0], [0.5, 0.5])
        with pytest.raises(ValidationError):
            DistributionPair([], [])
        with pytest.raises(ValidationError):
            DistributionPair([0.5, math.inf], [0.5, 0.5])


class TestCatalog:
    def test_eight_kernels(self):
        kernels = {k.name: k for k in catalog()}
        assert set(kernels) == set(CLOSED_FORMS)
        strongly = {"kl", "hellinger", "bhattacharya", "triangular", "chi_square", "renyi:2"}
        for name, kernel in kernels.items():
            assert kernel.interval == (0.1, 10.0)
            if name in strongly:
                assert kernel.convexity_class == "strongly_convex"
                assert kernel.modulus_certificate.verdict == "certified"
                assert kernel.modulus > 0.0
            else:
                assert kernel.modulus_certificate is None
        assert kernels["variational"].convexity_class == "convex_only"
        assert kernels["harmonic"].convexity_class == "nonconvex"
        normalized = {"kl", "hellinger", "variational", "triangular", "chi_square"}
        for name, kernel in kernels.items():
            assert kernel.normalized == (name in normalized)

    def test_generator_spot_values(self):
        expected = {
            "kl": (2.0, 2.0 * math.log(2.0)),
            "hellinger": (4.0, 0.5),
            "variational": (3.0, 2.0),
            "harmonic": (1.0, 1.0),
            "bhattacharya": (4.0, -2.0),
            "triangular": (2.0, 1.0 / 3.0),
            "chi_square": (2.0, 1.0),
            "renyi:2": (3.0, 9.0),
        }
        for kernel in catalog():
            t, value = expected[kernel.name]
            assert abs(kernel.generator.evaluator(t) - value) <= 1e-15

    def test_certified_moduli(self):
        # second-derivative minima over [0.1, 10], divided by two
        assert abs(get_kernel("chi_square").modulus - 1.0) <= 1e-15
        assert abs(get_kernel("renyi:2").modulus - 1.0) <= 1e-15
        assert abs(get_kernel("kl").modulus - 0.05) <= 1e-15
        assert abs(get_kernel("hellinger").modulus - 0.125 * 10.0**-1.5) <= 1e-15
        assert abs(get_kernel("bhattacharya").modulus - 0.125 * 10.0**-1.5) <= 1e-15
        assert abs(get_kernel("triangular").modulus - 4.0 / 11.0**3) <= 1e-15

    def test_name_normalization_and_renyi(self):
        assert get_kernel(" Chi-Square ").name == "chi_square"
        assert get_kernel("renyi", alpha=2.5).name == "renyi:2.5"
        assert get_kernel("renyi:3").generator.evaluator(2.0) == 8.0
        with pytest.raises(ValidationError):
            get_kernel("renyi")
        with pytest.raises(ValidationError):
            get_kernel("renyi:1.0")
        with pytest.raises(ValidationError):
            get_kernel("renyi:abc")
        with pytest.raises(ValidationError):
            get_kernel("jensen_shannon")
        with pytest.raises(ValidationError):
            get_kernel("kl", (0.0, 1.0))
        with pytest.raises(ValidationError):
            get_kernel("kl", (2.0, 1.0))


class TestCsiszarDivergence:
    def test_matches_closed_forms(self):
        rng = np.random.default_rng(50)
        kernels = catalog()
        for _ in range(50):
            pair = bounded_pair(rng, int(rng.integers(2, 9)))
            for kernel in kernels:
                value = csiszar_divergence(pair, kernel)
                oracle = CLOSED_FORMS[kernel.name](pair.p, pair.q)
                assert abs(value - oracle) <= 1e-12 * (1.0 + abs(oracle))

    def test_identical_pair(self):
        p = np.array([0.2, 0.3, 0.5])
        pair = DistributionPair(p, p)
        fixed = {"harmonic": 1.0, "bhattacharya": -1.0, "renyi:2": 1.0}
        for kernel in catalog():
            value = csiszar_divergence(pair, kernel)
            if kernel.normalized:
                assert value == 0.0
            else:
                assert abs(value - fixed[kernel.name]) <= 1e-15

    def test_frozen_chi_square(self):
        pair = DistributionPair([0.5, 0.5], [0.2, 0.8])
        assert abs(csiszar_divergence(pair, get_kernel("chi_square")) - 0.36) <= 1e-15

    def test_ratio_domain_enforced(self):
        pair = DistributionPair([0.5, 0.5], [0.04, 0.96])  # ratio 0.08 < 0.1
        with pytest.raises(RatioOutOfDomain):
            csiszar_divergence(pair, get_kernel("kl"))
        wide = get_kernel("kl", (0.01, 10.0))
        assert csiszar_divergence(pair, wide) > 0.0


class TestEntropyAndKL:
    def test_uniform_entropy(self):
        for n in (2, 3, 4, 16, 64):
            p = np.full(n, 1.0 / n)
            assert abs(shannon_entropy(p) - math.log(n)) <= 1e-12

    def test_point_mass_limit_is_small(self):
        p = np.array([1.0 - 3e-13, 1e-13, 1e-13, 1e-13])
        h = shannon_entropy(p)
        assert 0.0 <= h <= 1e-10

    def test_rejects_non_probability(self):
        with pytest.raises(NotAProbabilityVector):
            shannon_entropy([0.5, 0.6])
        with pytest.raises(NotAProbabilityVector):
            shannon_entropy([1.5, -0.5])
        with pytest.raises(NotAProbabilityVector):
            shannon_entropy([0.5, 0.0, 0.5])
        with pytest.raises(NotAProbabilityVector):
            shannon_entropy([])
        with pytest.raises(NotAProbabilityVector):
            shannon_entropy([[0.5, 0.5]])

    def test_entropy_range(self):
        rng = np.random.default_rng(51)
        for _ in range(100):
            n = int(rng.integers(2, 12))
            raw = rng.uniform(0.05, 1.0, n)
            p = raw / raw.sum()
            h = shannon_entropy(p)
            assert 0.0 <= h <= math.log(n) + 1e-12

    def test_kl_matches_kernel_route(self):
        rng = np.random.default_rng(52)
        for _ in range(50):
            pair = bounded_pair(rng, 6)
            direct = kl_divergence(pair)
            via_kernel = csiszar_divergence(pair, get_kernel("kl"))
            assert abs(direct - via_kernel) <= 1e-12 * (1.0 + abs(direct))
            assert direct >= -1e-12

    def test_kl_frozen_value(self):
        pair = DistributionPair([0.5, 0.5], [0.2, 0.8])
        oracle = 0.2 * math.log(0.4) + 0.8 * math.log(1.6)
        assert abs(kl_divergence(pair) - oracle) <= 1e-15
        same = DistributionPair([0.3, 0.7], [0.3, 0.7])
        assert kl_divergence(same) == 0.0


class TestDivergenceBounds:
    def test_chi_square_lower_is_tight(self):
        rng = np.random.default_rng(53)
        kernel = get_kernel("chi_square")
        for _ in range(50):
            pair = bounded_pair(rng, int(rng.integers(2, 9)))
            s = divergence_bounds(pair, kernel)
            assert s.holds
            assert s.modulus == 1.0
            assert abs(s.lower_strong - s.value) <= 1e-12
            # normalized kernel at a ratio within rounding of 1
            assert abs(s.lower_ck) <= 1e-25

    def test_renyi_lower_is_tight(self):
        rng = np.random.default_rng(54)
        kernel = get_kernel("renyi:2")
        for _ in range(50):
            pair = bounded_pair(rng, 5)
            s = divergence_bounds(pair, kernel)
            assert s.holds
            assert abs(s.lower_strong - s.value) <= 1e-12

    def test_kl_sandwich_with_oracles(self):
        rng = np.random.default_rng(55)
        kernel = get_kernel("kl")
        for _ in range(50):
            pair = bounded_pair(rng, int(rng.integers(2, 9)))
            s = divergence_bounds(pair, kernel)
            assert s.holds
            assert s.kernel_name == "kl"
            assert s.lower_ck <= s.lower_strong + CHAIN_SLACK
            assert s.lower_strong <= s.value + CHAIN_SLACK
            assert s.value <= s.upper_converse + CHAIN_SLACK
            assert abs(s.value - kl_divergence(pair)) <= 1e-12
            # quadratic term: modulus times the chi-square spread
            chi2 = fsum_dot(pair.p, [r * r for r in pair.ratios]) - 1.0
            assert abs(s.lower_strong - kernel.modulus * chi2) <= 1e-12

    def test_modulus_override(self):
        pair = DistributionPair([0.5, 0.5], [0.2, 0.8])
        kernel = get_kernel("kl")
        s = divergence_bounds(pair, kernel, 0.01)
        assert s.modulus == 0.01
        with pytest.raises(ModulusNotCertified):
            divergence_bounds(pair, kernel, 0.2)

    def test_kernels_without_certificates_are_refused(self):
        pair = DistributionPair([0.5, 0.5], [0.2, 0.8])
        for name in ("variational", "harmonic"):
            with pytest.raises(ModulusNotCertified):
                divergence_bounds(pair, get_kernel(name))

    def test_to_dict_keys(self):
        pair = DistributionPair([0.5, 0.5], [0.2, 0.8])
        data = divergence_bounds(pair, get_kernel("kl")).to_dict()
        assert set(data) == {
            "kernel", "lower_ck", "lower_strong", "value",
            "upper_converse", "modulus", "holds", "warnings",
        }

    @settings(max_examples=60, derandomize=True, deadline=None)
    @given(seed=st.integers(0, 2**20))
    def test_sandwich_order_invariant(self, seed):
        rng = np.random.default_rng(seed)
        pair = bounded_pair(rng, int(rng.integers(2, 9)))
        for name in ("kl", "hellinger", "triangular"):
            s = divergence_bounds(pair, get_kernel(name))
            assert s.holds


class TestAggregatedBounds:
    def test_identity_aggregation_collapses(self):
        rng = np.random.default_rng(56)
        pair = bounded_pair(rng, 5)
        kernel = get_kernel("kl")
        s = aggregated_divergence_bounds(pair, StochasticMatrix(np.eye(5), "column"), kernel)
        assert s.holds
        assert s.lower_ck == s.value
        assert s.lower_strong == s.value  # zero ratio spread, bitwise

    def test_single_row_matches_total_mass_bound(self):
        rng = np.random.default_rng(57)
        pair = bounded_pair(rng, 4)
        kernel = get_kernel("triangular")
        ones = StochasticMatrix(np.ones((1, 4)), "column")
        via_matrix = aggregated_divergence_bounds(pair, ones, kernel)
        direct = divergence_bounds(pair, kernel)
        assert via_matrix == direct

    def test_random_aggregations_hold(self):
        rng = np.random.default_rng(58)
        kernel = get_kernel("kl")
        for _ in range(30):
            size = int(rng.integers(3, 8))
            rows = int(rng.integers(1, size + 1))
            merge = StochasticMatrix(
                random_row_stochastic(rng, size, rows).T, "column"
            )
            pair = bounded_pair(rng, size)
            s = aggregated_divergence_bounds(pair, merge, kernel)
            assert s.holds
            # aggregated divergence, transcribed directly
            b = [fsum_dot(merge.entries[i], pair.p) for i in range(rows)]
            y = [fsum_dot(merge.entries[i], pair.q) / b[i] for i in range(rows)]
            oracle = fsum_dot(b, [kernel.generator.evaluator(t) for t in y])
            assert abs(s.lower_ck - oracle) <= 1e-12 * (1.0 + abs(oracle))
            assert s.lower_ck <= s.value + CHAIN_SLACK

    def test_data_processing_direction(self):
        # merging outcomes can only lose divergence
        rng = np.random.default_rng(59)
        kernel = get_kernel("chi_square")
        pair = bounded_pair(rng, 6)
        halves = np.zeros((3, 6))
        halves[0, :2] = 1.0
        halves[1, 2:4] = 1.0
        halves[2, 4:] = 1.0
        s = aggregated_divergence_bounds(pair, StochasticMatrix(halves, "column"), kernel)
        assert s.holds
        assert s.lower_ck <= s.value + CHAIN_SLACK

    def test_zero_mass_row(self):
        pair = DistributionPair([0.5, 0.5], [0.4, 0.6])
        dead_row = StochasticMatrix([[1.0, 1.0], [0.0, 0.0]], "column")
        with pytest.raises(ZeroAggregateWeight):
            aggregated_divergence_bounds(pair, dead_row, get_kernel("kl"))

    def test_matrix_validation(self):
        pair = DistributionPair([0.5, 0.5], [0.4, 0.6])
        with pytest.raises(ValidationError):
            aggregated_divergence_bounds(
                pair, StochasticMatrix([[0.5, 0.5]], "row"), get_kernel("kl")
            )
        with pytest.raises(DimensionMismatch):
            aggregated_divergence_bounds(
                pair, StochasticMatrix(np.eye(3), "column"), get_kernel("kl")
            )
