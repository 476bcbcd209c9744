"""
Finite-dimensional phase space Omega = Q x P and its complex realization.

A real phase vector is a pair (q, p) of length-n real arrays.  The complex
picture identifies it with phi = q + i p, under which the symplectic
operator J(q, p) = (p, -q) acts as multiplication by -i.

Conventions used throughout the package:

* complex scalar product <x, y> = sum_k x_k conj(y_k), linear in the first
  argument, so the quadratic form of an operator C is <C phi, phi> = phi^H C phi;
* real 2n-dimensional coordinates are stacked as [q_1..q_n, p_1..p_n];
* an R-linear operator commuting with J has the block form [[a, -b], [b, a]]
  and corresponds to the complex matrix a + i b.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ValidationError

DEFAULT_DIMENSION = 8
TAU_HERM = 1e-10
TAU_SYMP = 1e-10


@dataclass(frozen=True)
class RealPhaseVector:
    """A point (q, p) of the real phase space."""

    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, dtype=float).reshape(-1)
        p = np.array(self.p, dtype=float).reshape(-1)
        if q.shape != p.shape or q.size < 1:
            raise DimensionError(f"q and p must have equal nonzero length, got {q.size} and {p.size}")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
            raise ValidationError("phase vector entries must be finite")
        q.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return self.q.size

    def as_array(self) -> np.ndarray:
        """Stacked real coordinates [q, p] of length 2n."""
        return np.concatenate([self.q, self.p])

    @classmethod
    def from_array(cls, x) -> "RealPhaseVector":
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.size % 2:
            raise DimensionError(f"stacked phase vector needs even length, got {x.size}")
        n = x.size // 2
        return cls(x[:n], x[n:])

    def __eq__(self, other):
        if not isinstance(other, RealPhaseVector):
            return NotImplemented
        return np.array_equal(self.q, other.q) and np.array_equal(self.p, other.p)

    __hash__ = None


def symplectic_matrix(n: int) -> np.ndarray:
    """The 2n x 2n matrix J = [[0, I], [-I, 0]]."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def apply_symplectic(v: RealPhaseVector) -> RealPhaseVector:
    return RealPhaseVector(v.p, -v.q)


def complexify(v: RealPhaseVector) -> np.ndarray:
    """Map (q, p) to the complex field vector q + i p."""
    return v.q + 1j * v.p


def realify(z) -> RealPhaseVector:
    z = as_field_vector(z)
    return RealPhaseVector(z.real, z.imag)


def as_field_vector(z, n: int | None = None) -> np.ndarray:
    """Validate and return a 1-d complex field vector."""
    z = np.asarray(z, dtype=complex)
    if z.ndim != 1 or z.size < 1:
        raise DimensionError(f"field vector must be 1-d and nonempty, got shape {z.shape}")
    if n is not None and z.size != n:
        raise DimensionError(f"field vector has length {z.size}, expected {n}")
    if not np.all(np.isfinite(z)):
        raise ValidationError("field vector entries must be finite")
    return z


def to_real_coordinates(z: np.ndarray) -> np.ndarray:
    """Vectorized realify: (..., n) complex -> (..., 2n) real [q, p]."""
    z = np.asarray(z, dtype=complex)
    return np.concatenate([z.real, z.imag], axis=-1)


def from_real_coordinates(x: np.ndarray) -> np.ndarray:
    """Vectorized complexify: (..., 2n) real [q, p] -> (..., n) complex."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] % 2:
        raise DimensionError(f"last axis must have even length, got {x.shape[-1]}")
    n = x.shape[-1] // 2
    return x[..., :n] + 1j * x[..., n:]


def _as_square(A, name: str, dtype) -> np.ndarray:
    A = np.asarray(A, dtype=dtype)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise DimensionError(f"{name} must be a nonempty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValidationError(f"{name} has non-finite entries")
    return A


def as_block_operator(A, n: int | None = None) -> np.ndarray:
    """Validate a real 2n x 2n operator on stacked (q, p) coordinates."""
    A = _as_square(A, "real block operator", float)
    if A.shape[0] % 2:
        raise DimensionError(f"real block operator needs even dimension, got {A.shape[0]}")
    if n is not None and A.shape[0] != 2 * n:
        raise DimensionError(f"real block operator is {A.shape[0]}x{A.shape[0]}, expected {2 * n}x{2 * n}")
    return A


def as_operator(C, n: int | None = None) -> np.ndarray:
    """Validate a complex n x n operator."""
    C = _as_square(C, "complex operator", complex)
    if n is not None and C.shape[0] != n:
        raise DimensionError(f"complex operator is {C.shape[0]}x{C.shape[0]}, expected {n}x{n}")
    return C


def is_hermitian(C, tol: float = TAU_HERM) -> bool:
    C = as_operator(C)
    return float(np.linalg.norm(C - C.conj().T)) <= tol


def check_hermitian(C, name: str = "operator", tol: float = TAU_HERM) -> np.ndarray:
    """Return ``C`` as a complex array, raising if it is not Hermitian."""
    C = as_operator(C)
    err = float(np.linalg.norm(C - C.conj().T))
    if err > tol:
        raise ValidationError(f"{name} is not Hermitian (||C - C^H||_F = {err:.3g} > {tol:g})")
    return C


def commutes_with_J(A, tol: float = TAU_SYMP, n: int | None = None) -> bool:
    """True iff ||AJ - JA||_F <= tol."""
    if not tol > 0:
        raise ValidationError(f"tol must be positive, got {tol}")
    A = as_block_operator(A, n)
    J = symplectic_matrix(A.shape[0] // 2)
    return float(np.linalg.norm(A @ J - J @ A)) <= tol


def complex_operator_of(A, tol: float = TAU_SYMP) -> np.ndarray:
    """The complex n x n matrix C with A(q, p) <-> C (q + i p).

    ``A`` must commute with J; otherwise it is not C-linear and no such C
    exists.
    """
    A = as_block_operator(A)
    if not commutes_with_J(A, tol):
        raise ValidationError("operator does not commute with the symplectic operator J")
    n = A.shape[0] // 2
    # [[a, -b], [b, a]] -> a + i b; averaging the duplicated blocks removes
    # roundoff-level asymmetry.
    a = 0.5 * (A[:n, :n] + A[n:, n:])
    b = 0.5 * (A[n:, :n] - A[:n, n:])
    return a + 1j * b


def real_operator_of(C) -> np.ndarray:
    """Inverse of :func:`complex_operator_of`: embed C as a 2n x 2n real block operator."""
    C = as_operator(C)
    a, b = C.real, C.imag
    return np.block([[a, -b], [b, a]])


def real_quadratic_form(A, v: RealPhaseVector) -> float:
    """(A phi, phi) in the real picture."""
    x = v.as_array()
    return float(x @ as_block_operator(A, v.n) @ x)


def complex_quadratic_form(C, phi) -> complex:
    """<C phi, phi> = phi^H C phi."""
    phi = as_field_vector(phi)
    return complex(np.vdot(phi, as_operator(C, phi.size) @ phi))
