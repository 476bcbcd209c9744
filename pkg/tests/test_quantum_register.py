import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcsft.dequantizer import DensityOperator
from pcsft.errors import ConsumedEnsembleError, ValidationError
from pcsft.gaussian_fields import (
    empirical_covariance_c,
    empirical_dispersion,
    mixed_state_spec,
    pure_state_spec,
    sample_fields,
)
from pcsft.quantum_register import (
    BooleanFunction,
    OracleUnitary,
    PureState,
    all_single_output_functions,
    born_probabilities,
    deutsch_jozsa_demo,
    deutsch_jozsa_statevector,
    hadamard_transform,
    measure_and_consume,
    oracle_unitary,
    parallel_evaluation_state,
    pushforward_samples,
    pushforward_spec,
    uniform_superposition,
)

from helpers import haar_unitary, random_spec, random_state


def dj_oracle_p0(f):
    # amplitude of |0...0> on the input register is 2^-n sum_x (-1)^f(x)
    n = f.n_in
    return (sum((-1) ** t for t in f.table) / 2**n) ** 2


def test_uniform_superposition():
    np.testing.assert_allclose(uniform_superposition(1).amplitudes, [1 / math.sqrt(2)] * 2)
    np.testing.assert_allclose(uniform_superposition(3).amplitudes, [1 / (2 * math.sqrt(2))] * 8)
    for n in range(1, 11):
        assert abs(np.linalg.norm(uniform_superposition(n).amplitudes) - 1) <= 1e-12
    for bad in (0, 11):
        with pytest.raises(ValidationError):
            uniform_superposition(bad)


def test_hadamard():
    np.testing.assert_allclose(hadamard_transform(1), np.array([[1, 1], [1, -1]]) / math.sqrt(2))
    for n in range(1, 6):
        H = hadamard_transform(n)
        np.testing.assert_allclose(H @ H, np.eye(2**n), atol=1e-12)
        np.testing.assert_array_equal(H, H.T)
        np.testing.assert_allclose(H[:, 0], uniform_superposition(n).amplitudes, atol=1e-15)
    with pytest.raises(ValidationError):
        hadamard_transform(11)


def test_oracle_identity_is_cnot():
    U = oracle_unitary(BooleanFunction(1, 1, (0, 1)))
    np.testing.assert_array_equal(U.permutation, [0, 1, 3, 2])
    cnot = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    np.testing.assert_array_equal(U.matrix(), cnot)


def test_oracle_constant_zero_is_identity():
    assert oracle_unitary(BooleanFunction(3, 2, (0,) * 8)).is_identity()


def test_oracle_brute_force_definition(rng):
    for _ in range(20):
        n_in, n_out = int(rng.integers(1, 5)), int(rng.integers(1, 4))
        f = BooleanFunction(n_in, n_out, tuple(rng.integers(0, 2**n_out, 2**n_in)))
        U = oracle_unitary(f)
        for x, y in product(range(2**n_in), range(2**n_out)):
            assert U.permutation[x * 2**n_out + y] == x * 2**n_out + (y ^ f(x))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.data())
def test_oracle_is_self_inverse(n_in, n_out, data):
    table = data.draw(st.lists(st.integers(0, 2**n_out - 1), min_size=2**n_in, max_size=2**n_in))
    U = oracle_unitary(BooleanFunction(n_in, n_out, tuple(table)))
    assert U.compose(U).is_identity()
    M = U.matrix()
    np.testing.assert_array_equal(M @ M, np.eye(U.dimension))
    np.testing.assert_array_equal(M.T @ M, np.eye(U.dimension))


def test_oracle_size_guard():
    with pytest.raises(ValidationError):
        oracle_unitary(BooleanFunction(8, 3, (0,) * 256))


def test_permutation_apply_matches_matrix(rng):
    U = OracleUnitary(rng.permutation(8))
    X = rng.standard_normal((5, 8)) + 1j * rng.standard_normal((5, 8))
    np.testing.assert_array_equal(U.apply(X), X @ U.matrix().T)
    with pytest.raises(ValidationError):
        OracleUnitary([0, 0, 1])


def test_boolean_function_validation():
    with pytest.raises(ValidationError):
        BooleanFunction(2, 1, (0, 1, 1))
    with pytest.raises(ValidationError):
        BooleanFunction(1, 1, (0, 2))
    f = BooleanFunction.from_callable(lambda x: x & 1, 2)
    assert f.table == (0, 1, 0, 1) and f.is_balanced() and not f.is_constant()


def test_parallel_state_identity_function():
    psi = parallel_evaluation_state(BooleanFunction(1, 1, (0, 1))).amplitudes
    np.testing.assert_allclose(psi, [1 / math.sqrt(2), 0, 0, 1 / math.sqrt(2)])


def test_parallel_state_constant_zero():
    psi = parallel_evaluation_state(BooleanFunction(2, 1, (0,) * 4)).amplitudes
    np.testing.assert_allclose(psi, np.kron(uniform_superposition(2).amplitudes, [1, 0]))


def test_parallel_state_support_exhaustive():
    for n_in in (1, 2, 3):
        for f in all_single_output_functions(n_in):
            psi = parallel_evaluation_state(f)
            expected = {x * 2 + f(x) for x in range(2**n_in)}
            assert psi.support() == expected
            np.testing.assert_allclose(np.abs(psi.amplitudes[sorted(expected)]), 2 ** (-n_in / 2))


def test_parallel_state_support_random_multi_output(rng):
    for n_in in (1, 2, 3, 4):
        n_out = 2
        for _ in range(10):
            f = BooleanFunction(n_in, n_out, tuple(rng.integers(0, 4, 2**n_in)))
            psi = parallel_evaluation_state(f)
            assert psi.support() == {x * 4 + f(x) for x in range(2**n_in)}
            assert len(psi.support()) == 2**n_in


def test_all_single_output_functions_count():
    assert sum(1 for _ in all_single_output_functions(2)) == 16
    assert len({f.table for f in all_single_output_functions(3)}) == 256


class TestPushforward:
    def test_identity(self, rng):
        spec = random_spec(rng, 4)
        np.testing.assert_allclose(pushforward_spec(np.eye(4), spec).covariance_c, spec.covariance_c, atol=1e-15)

    def test_pure_state_identity(self, rng):
        for _ in range(50):
            n = int(rng.integers(1, 9))
            psi, U = random_state(rng, n), haar_unitary(rng, n)
            lhs = pushforward_spec(U, pure_state_spec(psi, 0.3)).covariance_c
            rhs = pure_state_spec(U @ psi, 0.3).covariance_c
            assert np.max(np.abs(lhs - rhs)) <= 1e-12

    def test_global_phase(self, rng):
        spec = random_spec(rng, 3)
        out = pushforward_spec(np.exp(0.7j) * np.eye(3), spec)
        np.testing.assert_allclose(out.covariance_c, spec.covariance_c, atol=1e-15)
        assert out.kappa == spec.kappa

    def test_rejects_non_unitary(self, rng):
        with pytest.raises(ValidationError):
            pushforward_spec(2 * np.eye(2), random_spec(rng, 2))

    def test_samples_identity(self, rng):
        e = sample_fields(random_spec(rng, 3), 100, seed=1)
        np.testing.assert_array_equal(pushforward_samples(np.eye(3), e).samples, e.samples)

    def test_samples_conjugation_identity(self, rng):
        e = sample_fields(random_spec(rng, 5), 1000, seed=2)
        U = haar_unitary(rng, 5)
        out = pushforward_samples(U, e)
        C = empirical_covariance_c(e)
        assert np.linalg.norm(empirical_covariance_c(out) - U @ C @ U.conj().T) <= 1e-10
        np.testing.assert_allclose(
            np.linalg.norm(out.samples, axis=1), np.linalg.norm(e.samples, axis=1), rtol=1e-12
        )

    def test_samples_commutation_square(self, rng):
        N = 100_000
        spec = random_spec(rng, 6, kappa=0.5)
        U = haar_unitary(rng, 6)
        out = pushforward_samples(U, sample_fields(spec, N, seed=3))
        err = np.linalg.norm(empirical_covariance_c(out) - pushforward_spec(U, spec).covariance_c)
        assert err <= 5 * 0.5 / math.sqrt(N)

    def test_oracle_pipeline(self):
        N = 100_000
        f = BooleanFunction(2, 1, (0, 1, 1, 1))
        start = np.kron(uniform_superposition(2).amplitudes, [1, 0])
        e = sample_fields(pure_state_spec(start, 1.0), N, seed=4)
        out = pushforward_samples(oracle_unitary(f), e)
        psi_f = parallel_evaluation_state(f).amplitudes
        err = np.linalg.norm(empirical_covariance_c(out) - np.outer(psi_f, psi_f.conj()))
        assert err <= 5 / math.sqrt(N)

    def test_consumed(self, rng):
        e = sample_fields(random_spec(rng, 2), 10, seed=1)
        e.consume()
        with pytest.raises(ConsumedEnsembleError):
            pushforward_samples(np.eye(2), e)


class TestMeasurement:
    def test_born_examples(self):
        plus = np.array([1, 1]) / math.sqrt(2)
        np.testing.assert_allclose(born_probabilities(DensityOperator.pure(plus)), [0.5, 0.5])
        np.testing.assert_allclose(born_probabilities(DensityOperator(np.eye(4) / 4)), [0.25] * 4)
        psi_f = parallel_evaluation_state(BooleanFunction(1, 1, (0, 1)))
        np.testing.assert_allclose(born_probabilities(psi_f.density_operator()), [0.5, 0, 0, 0.5], atol=1e-15)

    def test_born_sums_to_one(self, rng):
        for _ in range(10):
            D = DensityOperator.pure(random_state(rng, 8))
            p = born_probabilities(D)
            assert np.all(p >= 0) and abs(p.sum() - 1) <= 1e-10

    def test_basis_state_outcome(self):
        e = sample_fields(pure_state_spec([1, 0, 0, 0], 0.01), 1000, seed=5)
        assert measure_and_consume(e, seed=1) == 0

    def test_measurement_consumes(self):
        e = sample_fields(mixed_state_spec(2, 1.0), 100, seed=6)
        measure_and_consume(e, seed=1)
        assert e.consumed
        with pytest.raises(ConsumedEnsembleError):
            measure_and_consume(e, seed=2)
        with pytest.raises(ConsumedEnsembleError):
            empirical_dispersion(e)

    def test_histogram_binomial(self):
        spec = pure_state_spec(np.array([1, 1]) / math.sqrt(2), 1.0)
        trials = 10_000
        zeros = sum(measure_and_consume(sample_fields(spec, 8, seed=s), seed=10**6 + s) == 0 for s in range(trials))
        assert abs(zeros - trials / 2) <= 5 * math.sqrt(trials * 0.25)


class TestDeutschJozsa:
    @pytest.mark.parametrize(
        "table,verdict,p0",
        [((0, 0), "constant", 1.0), ((0, 1), "balanced", 0.0), ((1, 1), "constant", 1.0), ((1, 0), "balanced", 0.0)],
    )
    def test_one_bit(self, table, verdict, p0):
        res = deutsch_jozsa_demo(BooleanFunction(1, 1, table), kappa=1.0, samples=10_000, seed=1)
        assert res.verdict == verdict
        assert abs(res.p0_estimate - p0) <= 5 / math.sqrt(10_000)

    def test_parity_three_bits(self):
        parity = BooleanFunction.from_callable(lambda x: bin(x).count("1") % 2, 3)
        assert deutsch_jozsa_demo(parity, samples=5000, seed=2).verdict == "balanced"

    def test_rejects_neither(self):
        with pytest.raises(ValidationError):
            deutsch_jozsa_demo(BooleanFunction(2, 1, (0, 0, 0, 1)))

    def test_statevector_matches_closed_form(self):
        for n_in in (1, 2, 3):
            for f in all_single_output_functions(n_in):
                if f.is_constant() or f.is_balanced():
                    assert deutsch_jozsa_statevector(f).p0_estimate == pytest.approx(dj_oracle_p0(f), abs=1e-12)

    def test_field_pipeline_matches_statevector(self):
        for n_in in (1, 2):
            for f in all_single_output_functions(n_in):
                if f.is_constant() or f.is_balanced():
                    field = deutsch_jozsa_demo(f, samples=2000, seed=3)
                    assert field.verdict == deutsch_jozsa_statevector(f).verdict


def test_pure_state_validation():
    with pytest.raises(ValidationError):
        PureState([1, 0, 0])
    with pytest.raises(ValidationError):
        PureState([1, 1])
