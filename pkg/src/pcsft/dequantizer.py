"""
The classical -> quantum correspondence.

States: a Gaussian field measure maps to the density operator
D = B^c / kappa.  Variables: f maps to the observable f''(0)/2.  With these
maps the classical average of f equals kappa Tr(D A) plus a remainder that,
for the quadratic + quartic family, is exactly proportional to kappa^2.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ValidationError
from .gaussian_fields import TAU_PSD, GaussianFieldSpec
from .hilbert_core import check_hermitian
from .prequantum_variables import PrequantumVariable, classical_average_exact, hessian_at_zero

TRACE_TOL = 1e-10
DEFAULT_KAPPA_GRID = tuple(np.logspace(-3, -1, 8))


@dataclass(frozen=True, eq=False)
class DensityOperator:
    matrix: np.ndarray

    def __post_init__(self):
        D = check_hermitian(self.matrix, "density operator").copy()
        trace = float(np.trace(D).real)
        if abs(trace - 1.0) > TRACE_TOL:
            raise ValidationError(f"density operator must have unit trace, got {trace!r}")
        lam_min = float(np.linalg.eigvalsh(D)[0])
        if lam_min < -TAU_PSD:
            raise ValidationError(f"density operator is not positive semi-definite (min eigenvalue {lam_min:.3g})")
        D.setflags(write=False)
        object.__setattr__(self, "matrix", D)

    @classmethod
    def pure(cls, psi) -> "DensityOperator":
        psi = np.asarray(psi, dtype=complex)
        return cls(np.outer(psi, psi.conj()))

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class Observable:
    matrix: np.ndarray

    def __post_init__(self):
        A = check_hermitian(self.matrix, "observable").copy()
        A.setflags(write=False)
        object.__setattr__(self, "matrix", A)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def __add__(self, other: "Observable") -> "Observable":
        if not isinstance(other, Observable):
            return NotImplemented
        return Observable(self.matrix + other.matrix)


def to_density_operator(spec: GaussianFieldSpec) -> DensityOperator:
    """D = cov^c(rho) / kappa."""
    if spec.kappa == 0:
        raise ValidationError("kappa must be nonzero")
    return DensityOperator(spec.covariance_c / spec.kappa)


def to_observable(v: PrequantumVariable) -> Observable:
    """A = f''(0) / 2."""
    return Observable(hessian_at_zero(v))


def quantum_average(D: DensityOperator, A: Observable) -> float:
    """von Neumann average Tr(D A)."""
    if D.dimension != A.dimension:
        raise DimensionError(f"density operator has dimension {D.dimension}, observable has {A.dimension}")
    return float(np.trace(D.matrix @ A.matrix).real)


def spec_from_density(D: DensityOperator, kappa: float) -> GaussianFieldSpec:
    """The field measure with covariance kappa D (inverse of :func:`to_density_operator`)."""
    return GaussianFieldSpec(kappa * D.matrix, kappa)


def asymptotic_gap(v: PrequantumVariable, spec: GaussianFieldSpec) -> float:
    """|<f>_rho - kappa Tr(D A)|: the remainder beyond the first-order term."""
    main = spec.kappa * quantum_average(to_density_operator(spec), to_observable(v))
    return abs(classical_average_exact(v, spec) - main)


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    intercept: float
    r_squared: float
    kappas: tuple
    gaps: tuple

    def __iter__(self):
        # unpacks as (slope, r_squared)
        return iter((self.slope, self.r_squared))


def fit_power_law(x, y) -> tuple[float, float, float]:
    """Least-squares fit log y = slope log x + intercept; returns (slope, intercept, r^2)."""
    lx, ly = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


def remainder_scaling_exponent(
    v: PrequantumVariable, D: DensityOperator, kappa_grid=DEFAULT_KAPPA_GRID
) -> ScalingFit:
    """Fit the exponent of gap(kappa) for measures kappa D over ``kappa_grid``.

    The grid needs at least 4 positive points spanning at least two decades,
    and the variable must have a nonzero quartic part (otherwise the gap is
    identically zero).
    """
    kappas = np.asarray(kappa_grid, dtype=float).reshape(-1)
    if kappas.size < 4:
        raise ValidationError(f"kappa grid needs at least 4 points, got {kappas.size}")
    if np.any(kappas <= 0) or not np.all(np.isfinite(kappas)):
        raise ValidationError("kappa grid values must be positive and finite")
    if np.log10(kappas.max() / kappas.min()) < 2 - 1e-9:
        raise ValidationError("kappa grid must span at least two decades")
    if not v.has_quartic:
        raise ValidationError("remainder identically zero: variable has no quartic part")
    gaps = np.array([asymptotic_gap(v, spec_from_density(D, k)) for k in kappas])
    if np.any(gaps == 0):
        raise ValidationError("remainder identically zero at some kappa; log-log fit is degenerate")
    slope, intercept, r2 = fit_power_law(kappas, gaps)
    return ScalingFit(slope, intercept, r2, tuple(kappas.tolist()), tuple(gaps.tolist()))
