"""Majorization certificates, T-transform witnesses, and weighted pairs."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sherman_bounds import (
    DimensionMismatch,
    LengthMismatch,
    NotMajorized,
    PointOutOfInterval,
    StochasticMatrix,
    ValidationError,
    WeightedVector,
    construct_doubly_stochastic,
    generate_weighted_pair,
    majorizes,
    verify_weighted_majorization,
)
from helpers import fsum_dot, random_doubly_stochastic, random_row_stochastic


class TestWeightedVector:
    def test_round_trip(self):
        v = WeightedVector([1.0, 2.0], [0.5, 0.5], (0.0, 3.0))
        assert v.size == 2
        assert v.weight_sum == 1.0
        assert not v.points.flags.writeable

    def test_rejects_bad_input(self):
        with pytest.raises(ValidationError):
            WeightedVector([1.0, 2.0], [0.5])
        with pytest.raises(ValidationError):
            WeightedVector([1.0], [-0.5])
        with pytest.raises(ValidationError):
            WeightedVector([], [])
        with pytest.raises(ValidationError):
            WeightedVector([float("nan")], [1.0])
        with pytest.raises(PointOutOfInterval):
            WeightedVector([5.0], [1.0], (0.0, 1.0))


class TestStochasticMatrix:
    def test_kinds(self):
        row = StochasticMatrix([[0.25, 0.75]], "row")
        assert row.shape == (1, 2)
        StochasticMatrix([[0.25], [0.75]], "column")
        StochasticMatrix([[0.25, 0.75], [0.75, 0.25]], "doubly")

    def test_clamps_tiny_negatives(self):
        m = StochasticMatrix([[1.0 + 1e-15, -1e-15]], "row")
        assert m.entries.min() == 0.0

    def test_rejects_larger_negatives(self):
        with pytest.raises(ValidationError):
            StochasticMatrix([[1.0 + 1e-13, -1e-13]], "row")

    def test_rejects_bad_sums(self):
        with pytest.raises(ValidationError):
            StochasticMatrix([[0.6, 0.6]], "row")
        with pytest.raises(ValidationError):
            StochasticMatrix([[0.25, 0.75], [0.80, 0.25]], "doubly")

    def test_rejects_bad_kind(self):
        with pytest.raises(ValidationError):
            StochasticMatrix([[1.0]], "diagonal")


class TestMajorizes:
    def test_simple_relations(self):
        assert majorizes([3.0, 2.0, 1.0], [2.0, 2.0, 2.0]).holds
        assert majorizes([1.0, 0.0], [0.5, 0.5]).holds
        assert not majorizes([2.0, 2.0, 2.0], [3.0, 2.0, 1.0]).holds

    def test_reflexive_and_permutation(self):
        assert majorizes([1.0, 4.0, 2.0], [1.0, 4.0, 2.0]).holds
        assert majorizes([1.0, 4.0, 2.0], [4.0, 2.0, 1.0]).holds

    def test_witness_prefix(self):
        cert = majorizes([2.0, 2.0, 2.0], [3.0, 2.0, 1.0])
        assert cert.relation == "fails"
        assert cert.witness_k == 1  # first prefix already violated

    def test_total_mismatch_reports_full_length(self):
        cert = majorizes([3.0, 1.0], [2.0, 1.0])
        assert cert.relation == "fails"
        assert cert.witness_k == 2

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            majorizes([1.0, 2.0], [1.0])

    def test_averaging_is_majorized(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            size = int(rng.integers(2, 9))
            x = rng.uniform(-2.0, 2.0, size)
            y = random_doubly_stochastic(rng, size) @ x
            assert majorizes(x, y).holds

    def test_transitive_on_chained_averages(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            size = int(rng.integers(2, 7))
            x = rng.uniform(0.0, 5.0, size)
            y = random_doubly_stochastic(rng, size) @ x
            z = random_doubly_stochastic(rng, size) @ y
            assert majorizes(x, z).holds


class TestConstruction:
    def test_identity_for_equal_vectors(self):
        m = construct_doubly_stochastic([1.0, 4.0, 2.0], [1.0, 4.0, 2.0])
        assert np.array_equal(m.entries, np.eye(3))

    def test_uniform_average_of_two(self):
        m = construct_doubly_stochastic([1.0, 0.0], [0.5, 0.5])
        assert np.allclose(m.entries, 0.5 * np.ones((2, 2)), atol=1e-12)

    def test_classic_example(self):
        x = np.array([3.0, 2.0, 1.0])
        y = np.array([2.0, 2.0, 2.0])
        m = construct_doubly_stochastic(x, y)
        assert np.abs(m.entries @ x - y).max() <= 1e-10
        assert np.abs(m.entries.sum(axis=0) - 1.0).max() <= 1e-12
        assert np.abs(m.entries.sum(axis=1) - 1.0).max() <= 1e-12

    def test_random_instances_meet_residual_target(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            size = int(rng.integers(1, 9))
            x = rng.uniform(-3.0, 3.0, size)
            y = random_doubly_stochastic(rng, size) @ x
            m = construct_doubly_stochastic(x, y)
            assert np.abs(m.entries @ x - y).max() <= 1e-10
            assert np.abs(m.entries.sum(axis=0) - 1.0).max() <= 1e-12
            assert np.abs(m.entries.sum(axis=1) - 1.0).max() <= 1e-12

    def test_unsorted_inputs_keep_original_order(self):
        x = np.array([1.0, 3.0, 2.0])
        y = np.array([2.5, 1.5, 2.0])
        m = construct_doubly_stochastic(x, y)
        assert np.abs(m.entries @ x - y).max() <= 1e-10

    def test_rejects_non_majorized(self):
        with pytest.raises(NotMajorized):
            construct_doubly_stochastic([2.0, 2.0], [3.0, 1.0])

    def test_majorizes_attaches_matrix_on_request(self):
        cert = majorizes([3.0, 2.0, 1.0], [2.0, 2.0, 2.0], with_matrix=True)
        assert cert.matrix is not None
        assert cert.matrix.kind == "doubly"
        absent = majorizes([3.0, 2.0, 1.0], [2.0, 2.0, 2.0])
        assert absent.matrix is None


class TestWeightedMajorization:
    def test_single_cell(self):
        x = WeightedVector([1.5], [2.0])
        y = WeightedVector([1.5], [2.0])
        result = verify_weighted_majorization(x, y, StochasticMatrix([[1.0]], "row"))
        assert result.passed
        assert result.weight_residual == 0.0
        assert result.point_residual == 0.0

    def test_jensen_row(self):
        # one aggregated row: b=1, y = mean of x under a
        a = np.array([0.3, 0.7])
        x = np.array([0.0, 1.0])
        matrix = StochasticMatrix(a[None, :], "row")
        xv = WeightedVector(x, a)
        yv = WeightedVector([fsum_dot(a, x)], [1.0])
        assert verify_weighted_majorization(xv, yv, matrix).passed

    def test_generated_pairs_verify_tightly(self):
        rng = np.random.default_rng(8)
        for _ in range(200):
            rows = int(rng.integers(1, 7))
            cols = int(rng.integers(1, 9))
            matrix = StochasticMatrix(random_row_stochastic(rng, rows, cols), "row")
            x = rng.uniform(-1.0, 4.0, cols)
            b = rng.uniform(0.05, 3.0, rows)
            y, a = generate_weighted_pair(x, b, matrix)
            xv = WeightedVector(x, a)
            yv = WeightedVector(y, b)
            result = verify_weighted_majorization(xv, yv, matrix, tol=1e-12)
            assert result.passed
            # independent residual recomputation by plain summation
            for j in range(cols):
                assert abs(a[j] - fsum_dot(b, matrix.entries[:, j])) <= 1e-12
            for i in range(rows):
                assert abs(y[i] - fsum_dot(matrix.entries[i], x)) <= 1e-12

    def test_identity_matrix_round_trip(self):
        x = np.array([0.3, 0.9, 0.1])
        b = np.array([1.0, 2.0, 0.5])
        eye = StochasticMatrix(np.eye(3), "row")
        y, a = generate_weighted_pair(x, b, eye)
        assert np.array_equal(y, x)
        assert np.array_equal(a, b)

    def test_doubly_stochastic_preserves_uniform_weights(self):
        rng = np.random.default_rng(9)
        d = StochasticMatrix(random_doubly_stochastic(rng, 5), "doubly")
        x = rng.uniform(0.0, 1.0, 5)
        y, a = generate_weighted_pair(x, np.ones(5), d)
        assert np.abs(a - 1.0).max() <= 1e-12
        assert majorizes(x, y).holds

    def test_failing_witness_detected(self):
        xv = WeightedVector([0.0, 1.0], [0.5, 0.5])
        yv = WeightedVector([0.9], [1.0])
        matrix = StochasticMatrix([[0.5, 0.5]], "row")
        result = verify_weighted_majorization(xv, yv, matrix)
        assert not result.passed
        assert result.point_residual > 0.3

    def test_dimension_checks(self):
        xv = WeightedVector([0.0, 1.0], [0.5, 0.5])
        yv = WeightedVector([0.5], [1.0])
        with pytest.raises(DimensionMismatch):
            verify_weighted_majorization(xv, yv, StochasticMatrix([[1.0]], "row"))
        column_only = StochasticMatrix([[0.5, 0.5], [0.5, 0.5]], "column")
        with pytest.raises(ValidationError):
            verify_weighted_majorization(xv, xv, column_only)

    @settings(max_examples=60, derandomize=True, deadline=None)
    @given(
        xs=st.lists(st.floats(-5.0, 5.0, allow_nan=False), min_size=2, max_size=6),
        seed=st.integers(0, 2**16),
    )
    def test_average_with_witness_always_verifies(self, xs, seed):
        rng = np.random.default_rng(seed)
        size = len(xs)
        matrix = StochasticMatrix(random_row_stochastic(rng, size, size), "row")
        x = np.asarray(xs)
        b = rng.uniform(0.1, 1.0, size)
        y, a = generate_weighted_pair(x, b, matrix)
        result = verify_weighted_majorization(
            WeightedVector(x, a), WeightedVector(y, b), matrix, tol=1e-10
        )
        assert result.passed

    def test_generate_rejects_column_kind(self):
        col = StochasticMatrix(np.ones((2, 1)) * 0.5, "column")
        with pytest.raises(ValidationError):
            generate_weighted_pair([1.0], [1.0, 1.0], col)
        with pytest.raises(DimensionMismatch):
            generate_weighted_pair(
                [1.0, 2.0, 3.0], [1.0], StochasticMatrix([[0.5, 0.5]], "row")
            )
