import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import mixture_density_matrix, random_density_matrix, random_separable_mixture
from qkdwitness.errors import UsageError, ValidationError
from qkdwitness.qlinalg import PAULI, PAULI_LABELS, kron, partial_transpose
from qkdwitness.states import (
    bell_state,
    bell_vector,
    is_ppt,
    make_state,
    pauli_expectations,
    pure_state,
    rho_from_pauli,
    source_state,
    werner_state,
)


def pauli_table_oracle(rho):
    """Entry-by-entry trace against explicit sigma_i x sigma_j products."""
    out = np.zeros((4, 4))
    for a, i in enumerate(PAULI_LABELS):
        for b, j in enumerate(PAULI_LABELS):
            out[a, b] = np.trace(rho @ kron(PAULI[i], PAULI[j])).real
    return out


class TestMakeState:
    def test_maximally_mixed(self):
        st = make_state(np.eye(4) / 4)
        expected = np.zeros((4, 4))
        expected[0, 0] = 1.0
        assert_allclose(st.pauli, expected, atol=1e-12)

    def test_bell_pauli_table(self):
        st = bell_state("phi+")
        assert st.pauli_coefficient("x", "x") == pytest.approx(1.0)
        assert st.pauli_coefficient("y", "y") == pytest.approx(-1.0)
        assert st.pauli_coefficient("z", "z") == pytest.approx(1.0)
        assert_allclose(st.pauli, pauli_table_oracle(st.rho), atol=1e-12)

    def test_rejects_negative_eigenvalue(self):
        vec = bell_vector("phi+")
        bad = np.eye(4) / 4 - 0.3 * np.outer(vec, vec.conj())
        bad /= np.trace(bad).real
        with pytest.raises(ValidationError, match="negative eigenvalue"):
            make_state(bad)

    def test_rejects_non_hermitian(self):
        m = np.eye(4, dtype=complex) / 4
        m[0, 1] = 0.1
        with pytest.raises(ValidationError, match="Hermitian"):
            make_state(m)

    def test_rejects_wrong_trace(self):
        with pytest.raises(ValidationError, match="trace"):
            make_state(np.eye(4) / 2)

    def test_pauli_roundtrip_on_random_states(self, rng):
        for _ in range(30):
            st = make_state(random_density_matrix(rng))
            again = make_state(rho_from_pauli(st.pauli))
            assert np.max(np.abs(again.pauli - st.pauli)) < 1e-10
            assert np.max(np.abs(again.rho - st.rho)) < 1e-10
            assert st.pauli[0, 0] == pytest.approx(1.0, abs=1e-12)
            assert np.max(np.abs(st.pauli)) <= 1 + 1e-10

    def test_basis_completeness(self, rng):
        st = make_state(random_density_matrix(rng))
        assert np.max(np.abs(rho_from_pauli(st.pauli) - st.rho)) < 1e-10


class TestStandardStates:
    def test_werner_limits(self):
        assert_allclose(werner_state(0).rho, np.eye(4) / 4, atol=1e-14)
        assert_allclose(werner_state(1).rho, bell_state("phi+").rho, atol=1e-14)

    @pytest.mark.parametrize("p", [0.1, 0.35, 0.7, 1.0])
    def test_werner_pauli_diagonal(self, p):
        st = werner_state(p)
        assert st.pauli_coefficient("x", "x") == pytest.approx(p, abs=1e-12)
        assert st.pauli_coefficient("y", "y") == pytest.approx(-p, abs=1e-12)
        assert st.pauli_coefficient("z", "z") == pytest.approx(p, abs=1e-12)
        assert_allclose(st.pauli, pauli_table_oracle(st.rho), atol=1e-12)

    def test_werner_out_of_range(self):
        with pytest.raises(UsageError):
            werner_state(1.2)

    def test_pure_state_rejects_unnormalized(self):
        with pytest.raises(UsageError, match="normalized"):
            pure_state([1, 1, 0, 0])

    def test_bell_kinds(self):
        for kind in ("phi+", "phi-", "psi+", "psi-"):
            st = bell_state(kind)
            assert np.trace(st.rho @ st.rho).real == pytest.approx(1.0)
        with pytest.raises(UsageError):
            bell_vector("phi*")


class TestIsPpt:
    def test_maximally_mixed(self):
        res = is_ppt(make_state(np.eye(4) / 4))
        assert res.ppt and res.min_eigenvalue == pytest.approx(0.25)
        assert res.negative_eigenvector is None

    def test_bell_state_npt(self):
        res = is_ppt(bell_state("phi+"))
        assert not res.ppt
        assert res.min_eigenvalue == pytest.approx(-0.5, abs=1e-12)
        assert res.negative_eigenvector is not None

    @pytest.mark.parametrize("p", np.linspace(0, 1, 21))
    def test_werner_threshold_matches_eigensolve_oracle(self, p):
        st = werner_state(p)
        res = is_ppt(st)
        oracle_min = np.linalg.eigvalsh(partial_transpose(st.rho, "B"))[0]
        assert res.min_eigenvalue == pytest.approx(oracle_min, abs=1e-12)
        assert res.min_eigenvalue == pytest.approx((1 - 3 * p) / 4, abs=1e-12)
        assert res.ppt == (p <= 1 / 3 + 1e-9)

    def test_side_invariance(self, rng):
        for _ in range(20):
            st = make_state(random_density_matrix(rng))
            spec_a = np.linalg.eigvalsh(partial_transpose(st.rho, "A"))
            spec_b = np.linalg.eigvalsh(partial_transpose(st.rho, "B"))
            assert_allclose(spec_a, spec_b, atol=1e-10)
            assert is_ppt(st).ppt == (spec_a[0] >= -1e-9)

    def test_ppt_convex_mixture_stays_ppt(self, rng):
        for _ in range(10):
            m1 = mixture_density_matrix(random_separable_mixture(rng))
            m2 = mixture_density_matrix(random_separable_mixture(rng))
            lam = rng.random()
            mixed = make_state(lam * m1 + (1 - lam) * m2)
            assert is_ppt(mixed).ppt


class TestSourceState:
    def test_two_signal_purification(self):
        kets = [np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)]
        vec = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
        src = source_state([0.5, 0.5], kets, vec)
        assert src.probabilities == (0.5, 0.5)

    def test_rejects_bad_probabilities(self):
        kets = [np.array([1, 0]), np.array([0, 1])]
        vec = np.array([1, 0, 0, 1]) / np.sqrt(2)
        with pytest.raises(ValidationError, match="sum to 1"):
            source_state([0.5, 0.6], kets, vec)

    def test_rejects_inconsistent_purification(self):
        kets = [np.array([1, 0]), np.array([1, 0])]
        vec = np.array([1, 0, 0, 1]) / np.sqrt(2)
        with pytest.raises(ValidationError, match="ensemble"):
            source_state([0.5, 0.5], kets, vec)


def test_pauli_expectations_matches_oracle(rng):
    rho = random_density_matrix(rng)
    assert_allclose(pauli_expectations(rho), pauli_table_oracle(rho), atol=1e-12)
