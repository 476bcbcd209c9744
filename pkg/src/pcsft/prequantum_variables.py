"""
Prequantum variables: J-invariant functionals of the classical field.

The implemented family is

    f(phi) = <A phi, phi> + sum_i lambda_i <A_i phi, phi>^2

with Hermitian A, A_i.  Every member vanishes at the vacuum phi = 0 and is
invariant under phase rotations phi -> e^{i theta} phi (so in particular
under J = -i).  Its second derivative at zero is carried by A alone, and its
Gaussian average has a closed form from the fourth-moment Wick rule.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, ValidationError
from .gaussian_fields import FieldEnsemble, GaussianFieldSpec
from .hilbert_core import check_hermitian, complex_operator_of, from_real_coordinates

DEFAULT_FD_STEP = 1e-3
RICHARDSON_RTOL = 0.1


@dataclass(frozen=True, eq=False)
class PrequantumVariable:
    quadratic: np.ndarray
    quartic_terms: tuple = field(default=())

    def __post_init__(self):
        A = check_hermitian(self.quadratic, "quadratic").copy()
        A.setflags(write=False)
        n = A.shape[0]
        terms = []
        for lam, Ai in self.quartic_terms:
            Ai = check_hermitian(Ai, "quartic operator").copy()
            if Ai.shape != (n, n):
                raise DimensionError(f"quartic operator is {Ai.shape}, quadratic is {(n, n)}")
            lam = float(lam)
            if not np.isfinite(lam):
                raise ValidationError("quartic coefficient must be finite")
            Ai.setflags(write=False)
            terms.append((lam, Ai))
        object.__setattr__(self, "quadratic", A)
        object.__setattr__(self, "quartic_terms", tuple(terms))

    @classmethod
    def zero(cls, dimension: int) -> "PrequantumVariable":
        return cls(np.zeros((dimension, dimension), dtype=complex))

    @property
    def dimension(self) -> int:
        return self.quadratic.shape[0]

    @property
    def has_quartic(self) -> bool:
        return any(lam != 0 and np.any(Ai != 0) for lam, Ai in self.quartic_terms)

    def __add__(self, other: "PrequantumVariable") -> "PrequantumVariable":
        if not isinstance(other, PrequantumVariable):
            return NotImplemented
        if other.dimension != self.dimension:
            raise DimensionError(f"cannot add variables of dimension {self.dimension} and {other.dimension}")
        return PrequantumVariable(self.quadratic + other.quadratic, self.quartic_terms + other.quartic_terms)

    def __call__(self, phi):
        return evaluate(self, phi)


def _forms(A: np.ndarray, X: np.ndarray) -> np.ndarray:
    # row-wise <A phi, phi> for X of shape (N, n); real for Hermitian A
    return np.einsum("ij,ij->i", X.conj(), X @ A.T).real


def evaluate(v: PrequantumVariable, phi):
    """f(phi) for a single field vector (returns float) or an (N, n) batch (returns array)."""
    X = np.asarray(phi, dtype=complex)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.ndim != 2 or X.shape[1] != v.dimension:
        raise DimensionError(f"field has shape {np.shape(phi)}, variable has dimension {v.dimension}")
    out = _forms(v.quadratic, X)
    for lam, Ai in v.quartic_terms:
        out = out + lam * _forms(Ai, X) ** 2
    return float(out[0]) if single else out


def hessian_at_zero(v: PrequantumVariable) -> np.ndarray:
    """f''(0)/2 as a complex operator: the quadratic part A (quartic terms are O(phi^4))."""
    return v.quadratic.copy()


def _real_hessian(v: PrequantumVariable, h: float) -> np.ndarray:
    """Central-difference Hessian of x -> f(q + i p) at x = 0, divided by 2."""
    m = 2 * v.dimension
    E = np.eye(m) * h
    f0 = evaluate(v, np.zeros(v.dimension))
    H = np.empty((m, m))
    diag_pts = np.concatenate([E, -E])
    fd = evaluate(v, from_real_coordinates(diag_pts))
    H[np.arange(m), np.arange(m)] = (fd[:m] - 2 * f0 + fd[m:]) / h**2
    iu, ju = np.triu_indices(m, k=1)
    if iu.size:
        pts = np.concatenate([
            E[iu] + E[ju], E[iu] - E[ju], -E[iu] + E[ju], -E[iu] - E[ju],
        ])
        vals = evaluate(v, from_real_coordinates(pts)).reshape(4, -1)
        off = (vals[0] - vals[1] - vals[2] + vals[3]) / (4 * h**2)
        H[iu, ju] = off
        H[ju, iu] = off
    return 0.5 * H


def finite_difference_hessian(v: PrequantumVariable, h: float = DEFAULT_FD_STEP) -> np.ndarray:
    """Numerical f''(0)/2 mapped to the complex picture.

    The estimate at ``h`` is compared with the one at ``h/2``; if they differ by
    more than 10% (relative Frobenius) the step is rejected as dominated by
    cancellation.
    """
    if not h > 0:
        raise ValidationError(f"step h must be positive, got {h}")
    H1 = _real_hessian(v, h)
    H2 = _real_hessian(v, h / 2)
    scale = max(np.linalg.norm(H1), np.linalg.norm(H2))
    diff = np.linalg.norm(H1 - H2)
    if diff > RICHARDSON_RTOL * scale:
        raise ValidationError(
            f"finite-difference step h={h:g} is unreliable: estimates at h and h/2 differ by "
            f"{diff / scale:.1%}"
        )
    return complex_operator_of(H1)


def classical_average_mc(v: PrequantumVariable, e: FieldEnsemble) -> tuple[float, float]:
    """Sample mean of f over the ensemble and its standard error."""
    if e.dimension != v.dimension:
        raise DimensionError(f"ensemble has dimension {e.dimension}, variable has {v.dimension}")
    values = evaluate(v, e.samples)
    n = values.size
    mean = math.fsum(values) / n
    if n < 2:
        return mean, 0.0
    var = math.fsum((values - mean) ** 2) / (n - 1)
    return mean, math.sqrt(var / n)


def classical_average_exact(v: PrequantumVariable, spec: GaussianFieldSpec) -> float:
    """Closed-form Gaussian average: Tr(B^c A) + sum_i lambda_i [Tr(B^c A_i)^2 + Tr((B^c A_i)^2)]."""
    if spec.dimension != v.dimension:
        raise DimensionError(f"spec has dimension {spec.dimension}, variable has {v.dimension}")
    C = spec.covariance_c
    total = float(np.trace(C @ v.quadratic).real)
    for lam, Ai in v.quartic_terms:
        CA = C @ Ai
        total += lam * float((np.trace(CA) ** 2 + np.trace(CA @ CA)).real)
    return total
