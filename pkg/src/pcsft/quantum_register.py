"""
Qubit registers, Boolean oracles and quantum parallelism at the field level.

Basis index convention for a two-register state |x>|y> with ``n_in`` input
and ``n_out`` output qubits: index(x, y) = x * 2**n_out + y, i.e. the input
register holds the high-order bits.  The oracle is the reversible XOR map
|x>|y> -> |x>|y XOR f(x)>, a permutation of basis states.

A gate U acts on a random field sample by sample, phi -> U phi, which
transforms the covariance as B^c -> U B^c U^H.  For the field labelled by a
pure state psi this is the field labelled by U psi.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import ValidationError
from .gaussian_fields import (
    FieldEnsemble,
    GaussianFieldSpec,
    empirical_covariance_c,
    empirical_dispersion,
    pure_state_spec,
    sample_fields,
)
from .dequantizer import DensityOperator
from .hilbert_core import as_operator

N_MAX = 10
UNITARY_TOL = 1e-10


def _check_size(n_qubits: int) -> None:
    if not 1 <= n_qubits <= N_MAX:
        raise ValidationError(f"register size must be in [1, {N_MAX}] qubits, got {n_qubits}")


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if a.size < 1 or a.size & (a.size - 1):
            raise ValidationError(f"amplitude vector length must be a power of two, got {a.size}")
        norm = float(np.linalg.norm(a))
        if abs(norm - 1.0) > 1e-10:
            raise ValidationError(f"state must be normalized, got norm {norm!r}")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @property
    def n_qubits(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    def density_operator(self) -> DensityOperator:
        return DensityOperator.pure(self.amplitudes)

    def field_spec(self, kappa: float = 1.0) -> GaussianFieldSpec:
        return pure_state_spec(self.amplitudes, kappa)

    def support(self, tol: float = 1e-12) -> set:
        return set(np.flatnonzero(np.abs(self.amplitudes) > tol).tolist())


def basis_state(index: int, n_qubits: int) -> PureState:
    _check_size(n_qubits)
    a = np.zeros(2**n_qubits, dtype=complex)
    a[index] = 1.0
    return PureState(a)


@dataclass(frozen=True)
class BooleanFunction:
    """Truth table of f: {0,1}^n_in -> {0,1}^n_out, listed in ascending x."""

    n_in: int
    n_out: int
    table: tuple

    def __post_init__(self):
        if self.n_in < 1 or self.n_out < 1:
            raise ValidationError(f"n_in and n_out must be >= 1, got {self.n_in}, {self.n_out}")
        table = tuple(int(t) for t in self.table)
        if len(table) != 2**self.n_in:
            raise ValidationError(f"truth table needs {2**self.n_in} entries for n_in={self.n_in}, got {len(table)}")
        bad = [t for t in table if not 0 <= t < 2**self.n_out]
        if bad:
            raise ValidationError(f"truth table values must lie in [0, {2**self.n_out}), got {bad[0]}")
        object.__setattr__(self, "table", table)

    @classmethod
    def from_callable(cls, fn: Callable[[int], int], n_in: int, n_out: int = 1) -> "BooleanFunction":
        return cls(n_in, n_out, tuple(fn(x) for x in range(2**n_in)))

    def __call__(self, x: int) -> int:
        return self.table[x]

    def is_constant(self) -> bool:
        return len(set(self.table)) == 1

    def is_balanced(self) -> bool:
        if self.n_out != 1:
            return False
        return 2 * sum(self.table) == len(self.table)


def all_single_output_functions(n_in: int):
    """Every f: {0,1}^n_in -> {0,1}, in order of the table read as a binary number."""
    size = 2**n_in
    for code in range(2**size):
        yield BooleanFunction(n_in, 1, tuple((code >> x) & 1 for x in range(size)))


@dataclass(frozen=True, eq=False)
class OracleUnitary:
    """A basis-state permutation: U |i> = |permutation[i]>."""

    permutation: np.ndarray

    def __post_init__(self):
        perm = np.array(self.permutation, dtype=np.intp).reshape(-1)
        if not np.array_equal(np.sort(perm), np.arange(perm.size)):
            raise ValidationError("oracle permutation must be a bijection of basis indices")
        perm.setflags(write=False)
        object.__setattr__(self, "permutation", perm)

    @property
    def dimension(self) -> int:
        return self.permutation.size

    def matrix(self) -> np.ndarray:
        U = np.zeros((self.dimension, self.dimension), dtype=complex)
        U[self.permutation, np.arange(self.dimension)] = 1.0
        return U

    def apply(self, vectors: np.ndarray) -> np.ndarray:
        """Apply U along the last axis (single vector or batch of row vectors)."""
        return np.take(np.asarray(vectors), self._inverse, axis=-1)

    @property
    def _inverse(self) -> np.ndarray:
        inv = np.empty_like(self.permutation)
        inv[self.permutation] = np.arange(self.dimension)
        return inv

    def compose(self, other: "OracleUnitary") -> "OracleUnitary":
        """self after other."""
        return OracleUnitary(self.permutation[other.permutation])

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.permutation, np.arange(self.dimension)))


def uniform_superposition(n: int) -> PureState:
    """2^{-n/2} sum_x |x>."""
    _check_size(n)
    return PureState(np.full(2**n, 2.0 ** (-n / 2), dtype=complex))


_H1 = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)


def hadamard_transform(n: int) -> np.ndarray:
    """H^{(x)n} as a 2^n x 2^n matrix."""
    _check_size(n)
    H = np.ones((1, 1))
    for _ in range(n):
        H = np.kron(H, _H1)
    return H.astype(complex)


def oracle_unitary(f: BooleanFunction) -> OracleUnitary:
    """|x>|y> -> |x>|y XOR f(x)>."""
    _check_size(f.n_in + f.n_out)
    x = np.repeat(np.arange(2**f.n_in), 2**f.n_out)
    y = np.tile(np.arange(2**f.n_out), 2**f.n_in)
    fx = np.asarray(f.table)[x]
    return OracleUnitary(x * 2**f.n_out + (y ^ fx))


def parallel_evaluation_state(f: BooleanFunction) -> PureState:
    """U_f applied to psi_0 (x) |0...0>: amplitude 2^{-n_in/2} on every (x, f(x))."""
    _check_size(f.n_in + f.n_out)
    psi0 = uniform_superposition(f.n_in).amplitudes
    ancilla = np.zeros(2**f.n_out, dtype=complex)
    ancilla[0] = 1.0
    return PureState(oracle_unitary(f).apply(np.kron(psi0, ancilla)))


def _unitary_matrix(U) -> np.ndarray:
    if isinstance(U, OracleUnitary):
        return U.matrix()
    U = as_operator(U)
    err = float(np.linalg.norm(U.conj().T @ U - np.eye(U.shape[0])))
    if err > UNITARY_TOL:
        raise ValidationError(f"operator is not unitary (||U^H U - I||_F = {err:.3g})")
    return U


def pushforward_spec(U, spec: GaussianFieldSpec) -> GaussianFieldSpec:
    """Image of the field measure under phi -> U phi: B^c -> U B^c U^H."""
    M = _unitary_matrix(U)
    if M.shape[0] != spec.dimension:
        raise ValidationError(f"unitary is {M.shape[0]}x{M.shape[0]}, spec has dimension {spec.dimension}")
    C = M @ spec.covariance_c @ M.conj().T
    # keep exact Hermiticity against roundoff
    C = 0.5 * (C + C.conj().T)
    return GaussianFieldSpec(C, spec.kappa)


def pushforward_samples(U, e: FieldEnsemble) -> FieldEnsemble:
    """Apply the gate to every sample of the field."""
    X = e.samples
    spec = pushforward_spec(U, e.source_spec)
    if isinstance(U, OracleUnitary):
        Y = U.apply(X)
    else:
        Y = X @ _unitary_matrix(U).T
    return FieldEnsemble._wrap(Y, spec, e.seed)


def born_probabilities(D: DensityOperator) -> np.ndarray:
    """Diagonal of D in the computational basis."""
    p = np.clip(np.real(np.diag(D.matrix)), 0.0, None)
    return p / p.sum()


def empirical_density_operator(e: FieldEnsemble) -> np.ndarray:
    """Empirical covariance normalized by empirical dispersion (unit trace)."""
    return empirical_covariance_c(e) / empirical_dispersion(e)


def measure_and_consume(e: FieldEnsemble, seed: int) -> int:
    """Born-sample one basis outcome from the ensemble and destroy it."""
    D = empirical_density_operator(e)
    e.consume()
    p = np.clip(np.real(np.diag(D)), 0.0, None)
    rng = np.random.default_rng(seed)
    return int(rng.choice(p.size, p=p / p.sum()))


class DeutschJozsaResult(NamedTuple):
    verdict: str
    p0_estimate: float


def deutsch_jozsa_circuit(f: BooleanFunction) -> list:
    """The gate sequence (H^n (x) H), U_f, (H^n (x) I) acting on |0...0>|1>."""
    if f.n_out != 1:
        raise ValidationError("Deutsch-Jozsa needs a single-output function")
    n = f.n_in
    _check_size(n + 1)
    Hn = hadamard_transform(n)
    H1 = hadamard_transform(1)
    return [np.kron(Hn, H1), oracle_unitary(f), np.kron(Hn, np.eye(2))]


def deutsch_jozsa_demo(
    f: BooleanFunction, kappa: float = 1.0, samples: int = 10_000, seed: int = 0, workers: int = 1
) -> DeutschJozsaResult:
    """Decide constant vs balanced using only sampled fields.

    p0 is the probability that the input register reads 0...0, estimated from
    the empirical density operator of the final field ensemble.
    """
    if not (f.is_constant() or f.is_balanced()):
        raise ValidationError("Deutsch-Jozsa needs a constant or balanced function")
    gates = deutsch_jozsa_circuit(f)
    start = basis_state(1, f.n_in + 1)
    e = sample_fields(pure_state_spec(start.amplitudes, kappa), samples, seed, workers=workers)
    for U in gates:
        e = pushforward_samples(U, e)
    D = empirical_density_operator(e)
    p0 = float(np.real(D[0, 0] + D[1, 1]))
    return DeutschJozsaResult("constant" if p0 > 0.5 else "balanced", p0)


def deutsch_jozsa_statevector(f: BooleanFunction) -> DeutschJozsaResult:
    """Reference result from plain statevector simulation of the same circuit."""
    if not (f.is_constant() or f.is_balanced()):
        raise ValidationError("Deutsch-Jozsa needs a constant or balanced function")
    psi = basis_state(1, f.n_in + 1).amplitudes.copy()
    for U in deutsch_jozsa_circuit(f):
        psi = U.apply(psi) if isinstance(U, OracleUnitary) else U @ psi
    p0 = float(abs(psi[0]) ** 2 + abs(psi[1]) ** 2)
    return DeutschJozsaResult("constant" if p0 > 0.5 else "balanced", p0)
