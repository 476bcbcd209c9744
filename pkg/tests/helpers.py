"""Random test-instance generators shared by the test modules."""
import numpy as np

from pcsft.gaussian_fields import GaussianFieldSpec
from pcsft.prequantum_variables import PrequantumVariable

ACCEPTANCE_RESULTS = []


def random_hermitian(rng, n, scale=1.0):
    M = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * (M + M.conj().T) / 2


def random_spec(rng, n, kappa=1.0, rank=None):
    rank = n if rank is None else rank
    G = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    C = G @ G.conj().T
    C = C * (kappa / np.trace(C).real)
    return GaussianFieldSpec(C, kappa)


def haar_unitary(rng, n):
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_state(rng, n):
    psi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return psi / np.linalg.norm(psi)


def random_variable(rng, n, n_quartic=2, quartic_scale=1.0):
    terms = tuple(
        (quartic_scale * rng.uniform(-1, 1), random_hermitian(rng, n) / np.sqrt(n))
        for _ in range(n_quartic)
    )
    return PrequantumVariable(random_hermitian(rng, n), terms)
