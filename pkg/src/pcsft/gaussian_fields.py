"""
Zero-mean J-invariant Gaussian measures on the complex field space.

A measure is specified by its complex covariance operator
B^c = E[phi phi^H] and its dispersion kappa = E ||phi||^2 = Tr B^c.
J-invariance is realized as circular symmetry: samples are

    phi = sum_k sqrt(lambda_k) zeta_k u_k,

with (lambda_k, u_k) the eigenpairs of B^c and zeta_k independent standard
circularly-symmetric complex normals (E|zeta|^2 = 1, E zeta^2 = 0).
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConsumedEnsembleError, DimensionError, ValidationError
from .hilbert_core import TAU_HERM, as_field_vector, check_hermitian, to_real_coordinates

TAU_PSD = 1e-10
TRACE_RTOL = 1e-10
NORM_TOL = 1e-10

# Samples are drawn in fixed-size blocks, each from its own child stream of
# the seed, so the ensemble does not depend on how blocks map to workers.
SAMPLE_BLOCK = 4096


@dataclass(frozen=True, eq=False)
class GaussianFieldSpec:
    """A zero-mean circular Gaussian measure with covariance ``covariance_c``.

    ``kappa`` must equal the trace of ``covariance_c``; use
    :meth:`from_covariance` to take it from the trace.
    """

    covariance_c: np.ndarray
    kappa: float

    def __post_init__(self):
        C = check_hermitian(self.covariance_c, "covariance_c", TAU_HERM).copy()
        kappa = float(self.kappa)
        if not np.isfinite(kappa) or kappa <= 0:
            raise ValidationError(f"kappa must be positive and finite, got {self.kappa}")
        trace = float(np.trace(C).real)
        if abs(trace - kappa) > TRACE_RTOL * kappa:
            raise ValidationError(f"trace of covariance_c ({trace!r}) does not match kappa ({kappa!r})")
        lam_min = float(np.linalg.eigvalsh(C)[0])
        if lam_min < -TAU_PSD:
            raise ValidationError(f"covariance_c is not positive semi-definite (min eigenvalue {lam_min:.3g})")
        C.setflags(write=False)
        object.__setattr__(self, "covariance_c", C)
        object.__setattr__(self, "kappa", kappa)

    @classmethod
    def from_covariance(cls, covariance_c) -> "GaussianFieldSpec":
        C = np.asarray(covariance_c, dtype=complex)
        return cls(C, float(np.trace(C).real))

    @property
    def dimension(self) -> int:
        return self.covariance_c.shape[0]

    @cached_property
    def _sampling_factor(self) -> np.ndarray:
        # Rows of the returned matrix M satisfy phi = zeta @ M for a row of
        # standard normals zeta; M^H M = B^c.
        lam, U = np.linalg.eigh(self.covariance_c)
        lam = np.where(lam > TAU_PSD, lam, 0.0)
        return (U * np.sqrt(lam)).T

    def scaled(self, factor: float) -> "GaussianFieldSpec":
        return GaussianFieldSpec(self.covariance_c * factor, self.kappa * factor)

    def __repr__(self):
        return f"GaussianFieldSpec(dimension={self.dimension}, kappa={self.kappa!r})"


def pure_state_spec(psi, kappa: float) -> GaussianFieldSpec:
    """The random field labelled by a normalized state: B^c = kappa psi psi^H."""
    psi = as_field_vector(psi)
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > NORM_TOL:
        raise ValidationError(f"psi must be normalized, got ||psi|| = {norm!r}")
    kappa = float(kappa)
    if not kappa > 0:
        raise ValidationError(f"kappa must be positive, got {kappa}")
    return GaussianFieldSpec(kappa * np.outer(psi, psi.conj()), kappa)


def mixed_state_spec(dimension: int, kappa: float) -> GaussianFieldSpec:
    """Covariance kappa I / n (maximally mixed density operator)."""
    if dimension < 1:
        raise ValidationError(f"dimension must be >= 1, got {dimension}")
    return GaussianFieldSpec(np.eye(dimension, dtype=complex) * (kappa / dimension), kappa)


class FieldEnsemble:
    """A finite sample of the random field together with its source measure.

    Measuring the ensemble sets ``consumed``; after that every statistical
    read of the samples raises :class:`ConsumedEnsembleError`.
    """

    def __init__(self, samples, source_spec: GaussianFieldSpec, seed: int | None = None, _copy: bool = True):
        samples = np.array(samples, dtype=complex) if _copy else np.asarray(samples, dtype=complex)
        if samples.ndim == 1:
            samples = samples[None, :]
        if samples.ndim != 2 or samples.shape[0] < 1:
            raise ValidationError(f"an ensemble needs at least one sample, got shape {samples.shape}")
        if samples.shape[1] != source_spec.dimension:
            raise DimensionError(
                f"samples have dimension {samples.shape[1]}, spec has {source_spec.dimension}"
            )
        samples.setflags(write=False)
        self._samples = samples
        self.source_spec = source_spec
        self.seed = seed
        self.consumed = False

    @classmethod
    def _wrap(cls, samples: np.ndarray, source_spec: GaussianFieldSpec, seed) -> "FieldEnsemble":
        # for freshly computed arrays nobody else holds
        return cls(samples, source_spec, seed, _copy=False)

    @property
    def samples(self) -> np.ndarray:
        """The (N, n) sample array; raises once the ensemble is consumed."""
        if self.consumed:
            raise ConsumedEnsembleError("field ensemble was consumed by a measurement; prepare a new one")
        return self._samples

    @property
    def count(self) -> int:
        return self._samples.shape[0]

    @property
    def dimension(self) -> int:
        return self._samples.shape[1]

    def consume(self) -> None:
        if self.consumed:
            raise ConsumedEnsembleError("field ensemble was already consumed")
        self.consumed = True

    def __len__(self):
        return self.count

    def __repr__(self):
        state = "consumed" if self.consumed else "live"
        return f"FieldEnsemble(count={self.count}, dimension={self.dimension}, seed={self.seed}, {state})"


def _draw_block(factor: np.ndarray, seed_seq: np.random.SeedSequence, size: int) -> np.ndarray:
    # ``factor`` already carries the 1/sqrt(2) of the circular normal
    rng = np.random.default_rng(seed_seq)
    n = factor.shape[0]
    z = rng.standard_normal((size, 2 * n)).view(np.complex128)
    return z @ factor


def sample_fields(spec: GaussianFieldSpec, count: int, seed: int, workers: int = 1) -> FieldEnsemble:
    """Draw ``count`` samples of the field; bit-identical for fixed ``seed`` and any ``workers``."""
    if count < 1:
        raise ValidationError(f"count must be >= 1, got {count}")
    if workers < 1:
        raise ValidationError(f"workers must be >= 1, got {workers}")
    factor = spec._sampling_factor / np.sqrt(2.0)
    n_blocks = -(-count // SAMPLE_BLOCK)
    children = np.random.SeedSequence(seed).spawn(n_blocks)
    sizes = [min(SAMPLE_BLOCK, count - i * SAMPLE_BLOCK) for i in range(n_blocks)]
    if workers == 1 or n_blocks == 1:
        blocks = [_draw_block(factor, s, k) for s, k in zip(children, sizes)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(lambda args: _draw_block(factor, *args), zip(children, sizes)))
    return FieldEnsemble._wrap(np.concatenate(blocks, axis=0), spec, seed)


def empirical_mean(e: FieldEnsemble) -> np.ndarray:
    return e.samples.mean(axis=0)


def empirical_covariance_c(e: FieldEnsemble) -> np.ndarray:
    """(1/N) sum phi phi^H, without mean subtraction."""
    X = e.samples
    return (X.T @ X.conj()) / X.shape[0]


def empirical_pseudo_covariance(e: FieldEnsemble) -> np.ndarray:
    """(1/N) sum phi phi^T; vanishes for a J-invariant measure."""
    X = e.samples
    return (X.T @ X) / X.shape[0]


def empirical_dispersion(e: FieldEnsemble) -> float:
    """(1/N) sum ||phi||^2."""
    X = e.samples
    return float(np.sum(X.real**2 + X.imag**2) / X.shape[0])


def empirical_real_covariance(e: FieldEnsemble) -> np.ndarray:
    """Real-picture covariance (1/N) sum x x^T of the stacked (q, p) coordinates."""
    x = to_real_coordinates(e.samples)
    return (x.T @ x) / x.shape[0]


def dispersion_stderr(e: FieldEnsemble) -> float:
    """Standard error of :func:`empirical_dispersion`."""
    X = e.samples
    if X.shape[0] < 2:
        return 0.0
    norms = np.sum(X.real**2 + X.imag**2, axis=1)
    return float(np.std(norms, ddof=1) / np.sqrt(X.shape[0]))


def wick_quadratic(spec: GaussianFieldSpec, A) -> float:
    """E <A phi, phi> = Tr(B^c A)."""
    A = check_hermitian(A, "A")
    _check_dim(spec, A)
    return float(np.trace(spec.covariance_c @ A).real)


def wick_quartic(spec: GaussianFieldSpec, A, B) -> float:
    """E[<A phi, phi><B phi, phi>] = Tr(B^c A) Tr(B^c B) + Tr(B^c A B^c B)."""
    A = check_hermitian(A, "A")
    B = check_hermitian(B, "B")
    _check_dim(spec, A)
    _check_dim(spec, B)
    CA = spec.covariance_c @ A
    CB = spec.covariance_c @ B
    return float((np.trace(CA) * np.trace(CB) + np.trace(CA @ CB)).real)


def field_scaling(e: FieldEnsemble, kappa: float) -> FieldEnsemble:
    """Rescale every sample by sqrt(kappa); the source covariance scales by kappa."""
    kappa = float(kappa)
    if not kappa > 0:
        raise ValidationError(f"kappa must be positive, got {kappa}")
    scaled = e.samples * np.sqrt(kappa)
    return FieldEnsemble._wrap(scaled, e.source_spec.scaled(kappa), e.seed)


def _check_dim(spec: GaussianFieldSpec, A: np.ndarray) -> None:
    if A.shape[0] != spec.dimension:
        raise DimensionError(f"operator is {A.shape[0]}x{A.shape[0]}, spec has dimension {spec.dimension}")
