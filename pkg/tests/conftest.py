import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)


def random_density_matrix(rng, rank: int = 4) -> np.ndarray:
    """Ginibre-sampled two-qubit density matrix."""
    g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_ket(rng, dim: int = 2) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_separable_mixture(rng, terms: int = 6):
    """Weights and product kets of an explicitly separable state."""
    w = rng.dirichlet(np.ones(terms))
    return [(float(w[k]), random_ket(rng), random_ket(rng)) for k in range(terms)]


def mixture_density_matrix(mixture) -> np.ndarray:
    rho = np.zeros((4, 4), dtype=complex)
    for q, a, b in mixture:
        ket = np.kron(a, b)
        rho += q * np.outer(ket, ket.conj())
    return rho
