import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcsft.errors import ConsumedEnsembleError, DimensionError, ValidationError
from pcsft.gaussian_fields import GaussianFieldSpec, pure_state_spec, sample_fields, wick_quadratic
from pcsft.prequantum_variables import (
    PrequantumVariable,
    classical_average_exact,
    classical_average_mc,
    evaluate,
    finite_difference_hessian,
    hessian_at_zero,
)

from helpers import random_hermitian, random_spec, random_state, random_variable

N = 100_000


def rel_err(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


class TestEvaluate:
    def test_norm_squared(self):
        v = PrequantumVariable(np.eye(2))
        assert evaluate(v, np.array([3, 4])) == 25.0

    def test_with_quartic(self):
        v = PrequantumVariable(np.eye(2), ((0.5, np.eye(2)),))
        assert evaluate(v, np.array([1, 0])) == 1.5

    def test_batch_matches_single(self, rng):
        v = random_variable(rng, 3)
        X = rng.standard_normal((5, 3)) + 1j * rng.standard_normal((5, 3))
        np.testing.assert_allclose(evaluate(v, X), [evaluate(v, x) for x in X], rtol=1e-14)

    def test_vacuum_preserved(self, rng):
        for _ in range(20):
            v = random_variable(rng, int(rng.integers(1, 6)))
            assert evaluate(v, np.zeros(v.dimension)) == 0.0

    def test_phase_invariance(self, rng):
        for _ in range(10):
            n = int(rng.integers(1, 6))
            v = random_variable(rng, n)
            for _ in range(100):
                phi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
                base = evaluate(v, phi)
                for theta in (math.pi / 2, rng.uniform(0, 2 * math.pi)):
                    assert abs(evaluate(v, np.exp(1j * theta) * phi) - base) <= 1e-12 * max(1.0, abs(base))

    def test_J_invariance_is_multiplication_by_i(self, rng):
        v = random_variable(rng, 4)
        for _ in range(100):
            phi = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            assert evaluate(v, 1j * phi) == pytest.approx(evaluate(v, phi), rel=1e-12, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            evaluate(PrequantumVariable(np.eye(2)), np.zeros(3))

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValidationError):
            PrequantumVariable(np.array([[0, 1], [0, 0]]))
        with pytest.raises(ValidationError):
            PrequantumVariable(np.eye(2), ((1.0, np.array([[0, 1j], [1j, 0]])),))


class TestHessian:
    def test_norm_squared(self):
        np.testing.assert_array_equal(hessian_at_zero(PrequantumVariable(np.eye(3))), np.eye(3))

    def test_quartic_drops_out(self, rng):
        v = PrequantumVariable(np.diag([1.0, 2.0]), ((3.0, random_hermitian(rng, 2)),))
        np.testing.assert_array_equal(hessian_at_zero(v), np.diag([1.0, 2.0]))

    def test_additivity_exact(self, rng):
        for _ in range(20):
            f1, f2 = random_variable(rng, 3), random_variable(rng, 3)
            np.testing.assert_array_equal(hessian_at_zero(f1 + f2), hessian_at_zero(f1) + hessian_at_zero(f2))

    def test_fd_quadratic_exact(self):
        H = finite_difference_hessian(PrequantumVariable(np.eye(2)), 1e-3)
        np.testing.assert_allclose(H, np.eye(2), atol=1e-8)

    def test_fd_complex_off_diagonal(self):
        A = np.array([[1.0, 2 - 1j], [2 + 1j, -0.5]])
        H = finite_difference_hessian(PrequantumVariable(A), 1e-3)
        np.testing.assert_allclose(H, A, atol=1e-8)

    def test_fd_with_quartic(self, rng):
        A = random_hermitian(rng, 3)
        v = PrequantumVariable(A, ((2.0, random_hermitian(rng, 3)),))
        assert rel_err(finite_difference_hessian(v, 1e-3), A) <= 1e-5

    def test_fd_zero_variable(self):
        np.testing.assert_array_equal(finite_difference_hessian(PrequantumVariable.zero(3)), np.zeros((3, 3)))

    def test_fd_matches_analytic_random(self, rng):
        for _ in range(20):
            v = random_variable(rng, int(rng.integers(1, 6)))
            assert rel_err(finite_difference_hessian(v), hessian_at_zero(v)) <= 1e-5

    def test_fd_rejects_bad_step(self):
        v = PrequantumVariable(np.eye(1), ((1.0, np.eye(1)),))
        with pytest.raises(ValidationError):
            finite_difference_hessian(v, 0.0)
        # quartic dominates at a huge step: h and h/2 disagree
        with pytest.raises(ValidationError, match="unreliable"):
            finite_difference_hessian(v, 10.0)


class TestAverages:
    def test_mc_zero_variable(self, rng):
        e = sample_fields(random_spec(rng, 3), 100, seed=1)
        assert classical_average_mc(PrequantumVariable.zero(3), e) == (0.0, 0.0)

    def test_mc_quadratic_vs_trace_formula(self, rng):
        spec = random_spec(rng, 4, kappa=0.5)
        A = random_hermitian(rng, 4)
        est, se = classical_average_mc(PrequantumVariable(A), sample_fields(spec, N, seed=2))
        assert abs(est - wick_quadratic(spec, A)) <= 5 * se

    def test_mc_quartic_rank_one(self, rng):
        psi = random_state(rng, 3)
        A = random_hermitian(rng, 3)
        kappa, lam = 0.2, 1.5
        spec = pure_state_spec(psi, kappa)
        v = PrequantumVariable(np.zeros((3, 3)), ((lam, A),))
        expected = lam * 2 * kappa**2 * np.vdot(psi, A @ psi).real ** 2
        est, se = classical_average_mc(v, sample_fields(spec, N, seed=3))
        assert abs(est - expected) <= 5 * se
        assert classical_average_exact(v, spec) == pytest.approx(expected, rel=1e-12)

    def test_mc_consumed(self, rng):
        e = sample_fields(random_spec(rng, 2), 10, seed=1)
        e.consume()
        with pytest.raises(ConsumedEnsembleError):
            classical_average_mc(PrequantumVariable(np.eye(2)), e)

    def test_exact_scalar(self):
        kappa, lam = 0.07, 0.5
        spec = GaussianFieldSpec(np.array([[kappa]], dtype=complex), kappa)
        v = PrequantumVariable(np.eye(1), ((lam, np.eye(1)),))
        assert classical_average_exact(v, spec) == pytest.approx(kappa + 2 * lam * kappa**2, rel=1e-14)

    def test_exact_reduces_to_trace(self, rng):
        spec = random_spec(rng, 4)
        A = random_hermitian(rng, 4)
        v = PrequantumVariable(A, ((0.0, random_hermitian(rng, 4)),))
        assert classical_average_exact(v, spec) == wick_quadratic(spec, A)

    def test_exact_vs_mc_random(self, rng):
        for i in range(8):
            n = int(rng.integers(1, 5))
            spec = random_spec(rng, n, kappa=float(rng.uniform(0.1, 1.0)))
            v = random_variable(rng, n)
            est, se = classical_average_mc(v, sample_fields(spec, N, seed=100 + i))
            assert abs(est - classical_average_exact(v, spec)) <= 5 * se

    def test_mc_order_independent(self, rng):
        spec = random_spec(rng, 3)
        v = random_variable(rng, 3)
        e = sample_fields(spec, 5000, seed=4)
        reversed_e = type(e)(e.samples[::-1], spec)
        assert classical_average_mc(v, e)[0] == classical_average_mc(v, reversed_e)[0]


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_additive_variables_evaluate_additively(n, seed):
    rng = np.random.default_rng(seed)
    f1, f2 = random_variable(rng, n), random_variable(rng, n)
    phi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    assert evaluate(f1 + f2, phi) == pytest.approx(evaluate(f1, phi) + evaluate(f2, phi), rel=1e-12, abs=1e-12)
