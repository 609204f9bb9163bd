import numpy as np
import pytest

from qkdwitness.channels import intercept_resend
from qkdwitness.errors import UsageError, ValidationError
from qkdwitness.information import (
    conditional_mutual_information,
    intrinsic_info_upper_bound,
    make_tripartite_table,
    mutual_information,
    separable_extension,
)
from qkdwitness.measurements import FOUR_STATE, OUTCOMES, joint_distribution
from qkdwitness.states import bell_state, make_state, werner_state


def binary_entropy(p):
    terms = [q * np.log2(q) for q in (p, 1 - p) if q > 0]
    return -sum(terms)


def mi_formula_oracle(p):
    """Direct double-sum evaluation, independent of the implementation."""
    arr = np.asarray(p, dtype=float)
    pa, pb = arr.sum(axis=1), arr.sum(axis=0)
    total = 0.0
    for i in range(arr.shape[0]):
        for j in range(arr.shape[1]):
            if arr[i, j] > 0:
                total += arr[i, j] * (np.log(arr[i, j] / (pa[i] * pb[j])) / np.log(2))
    return total


def werner_separable_mixture(p):
    """Explicit product decomposition of a Werner state with p <= 1/3.

    Six correlated axis terms realize the p = 1/3 boundary state
    (the y axis pairs anticorrelated outcomes, matching t_yy = -1/3);
    four z-product terms fill in the maximally mixed remainder.
    """
    if p > 1 / 3:
        raise ValueError("no product decomposition beyond p = 1/3")
    kets = {
        "x": {+1: np.array([1, 1]) / np.sqrt(2), -1: np.array([1, -1]) / np.sqrt(2)},
        "y": {+1: np.array([1, 1j]) / np.sqrt(2), -1: np.array([1, -1j]) / np.sqrt(2)},
        "z": {+1: np.array([1, 0], dtype=complex), -1: np.array([0, 1], dtype=complex)},
    }
    mixture = []
    for axis in ("x", "y", "z"):
        for s in (+1, -1):
            partner = -s if axis == "y" else s
            mixture.append((3 * p / 6, kets[axis][s], kets[axis][partner]))
    for s in (+1, -1):
        for t in (+1, -1):
            mixture.append(((1 - 3 * p) / 4, kets["z"][s], kets["z"][t]))
    return mixture


class TestMutualInformation:
    def test_independent_uniform_bits(self):
        assert mutual_information(np.full((2, 2), 0.25)) == pytest.approx(0.0, abs=1e-12)

    def test_perfectly_correlated_bits(self):
        assert mutual_information(np.diag([0.5, 0.5])) == pytest.approx(1.0)

    def test_binary_symmetric_quarter_flip(self):
        p = np.array([[0.375, 0.125], [0.125, 0.375]])
        expected = 1 - binary_entropy(0.25)  # = 0.18872 frozen via the formula oracle
        assert mutual_information(p) == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(0.18872, abs=5e-6)

    def test_matches_formula_oracle_on_random_tables(self, rng):
        for _ in range(20):
            arr = rng.random((3, 4))
            arr /= arr.sum()
            assert mutual_information(arr) == pytest.approx(mi_formula_oracle(arr), abs=1e-12)

    def test_rejects_negative_and_denormalized(self):
        with pytest.raises(ValidationError):
            mutual_information(np.array([[0.7, -0.1], [0.2, 0.2]]))
        with pytest.raises(ValidationError):
            mutual_information(np.array([[0.3, 0.3], [0.3, 0.3]]))


class TestConditionalMutualInformation:
    def test_independent_e_reduces_to_mi(self, rng):
        ab = rng.random((2, 2))
        ab /= ab.sum()
        pe = np.array([0.3, 0.7])
        probs = ab[:, :, None] * pe[None, None, :]
        table = make_tripartite_table((0, 1), (0, 1), (0, 1), probs)
        assert conditional_mutual_information(table) == pytest.approx(
            mutual_information(ab), abs=1e-12
        )

    def test_fully_revealing_e(self):
        probs = np.zeros((2, 2, 2))
        probs[0, 0, 0] = 0.5
        probs[1, 1, 1] = 0.5
        table = make_tripartite_table((0, 1), (0, 1), (0, 1), probs)
        assert conditional_mutual_information(table) == pytest.approx(0.0, abs=1e-15)

    def test_intercept_resend_record_has_zero_cmi(self):
        record = intercept_resend(("x", "z"), bell_state("phi+"))
        for table in record.tables.values():
            assert conditional_mutual_information(table) < 1e-12

    def test_nonnegative_and_zero_slice_skipped(self):
        probs = np.zeros((2, 2, 2))
        probs[:, :, 0] = np.diag([0.5, 0.5])
        table = make_tripartite_table((0, 1), (0, 1), (0, 1), probs)
        assert conditional_mutual_information(table) == pytest.approx(1.0)


class TestSeparableExtension:
    def test_classically_correlated_two_term_mixture(self):
        # |00> and |11> mixed evenly: conditioning on the dealt term kills
        # the correlation, yet the sifted z data alone looks perfectly
        # correlated and has one full bit of mutual information.
        up = np.array([1, 0], dtype=complex)
        down = np.array([0, 1], dtype=complex)
        mixture = [(0.5, up, up), (0.5, down, down)]
        table = separable_extension(mixture, FOUR_STATE)
        assert conditional_mutual_information(table) < 1e-14

        records = table.alphabet_a
        z_idx = [k for k, (basis, _) in enumerate(records) if basis == "z"]
        sifted = table.bipartite_marginal()[np.ix_(z_idx, z_idx)]
        sifted /= sifted.sum()
        assert mutual_information(sifted) == pytest.approx(1.0)

    def test_single_product_term_factorizes(self):
        up = np.array([1, 0], dtype=complex)
        table = separable_extension([(1.0, up, up)], FOUR_STATE)
        assert conditional_mutual_information(table) < 1e-14
        marginal = table.bipartite_marginal()
        pa = marginal.sum(axis=1)
        pb = marginal.sum(axis=0)
        assert np.max(np.abs(marginal - np.outer(pa, pb))) < 1e-14

    def test_marginal_matches_joint_distribution_of_mixture(self):
        mixture = werner_separable_mixture(0.25)
        table = separable_extension(mixture, FOUR_STATE)
        dist = joint_distribution(werner_state(0.25), FOUR_STATE)
        records = table.alphabet_a
        marginal = table.bipartite_marginal()
        for ia, (i, a) in enumerate(records):
            for jb, (j, b) in enumerate(records):
                assert marginal[ia, jb] == pytest.approx(dist.probs[(i, a, j, b)], abs=1e-10)

    @pytest.mark.parametrize("p", [0.0, 0.2, 1 / 3])
    def test_werner_decomposition_has_zero_cmi(self, p):
        mixture = werner_separable_mixture(p)
        # fixture self-check: the mixture really is the Werner state
        rho = sum(
            w * np.outer(np.kron(a, b), np.kron(a, b).conj()) for w, a, b in mixture
        )
        assert np.max(np.abs(rho - werner_state(p).rho)) < 1e-12
        table = separable_extension(mixture, FOUR_STATE)
        assert conditional_mutual_information(table) < 1e-12

    def test_intercept_resend_mixture_shows_no_key_despite_correlations(self):
        record = intercept_resend(("x", "z"), bell_state("phi+"))
        table = separable_extension(record.mixture, FOUR_STATE)
        assert conditional_mutual_information(table) < 1e-12
        records = table.alphabet_a
        z_idx = [k for k, (basis, _) in enumerate(records) if basis == "z"]
        sifted = table.bipartite_marginal()[np.ix_(z_idx, z_idx)]
        sifted /= sifted.sum()
        assert mutual_information(sifted) > 0.18

    def test_rejects_bad_mixtures(self):
        up = np.array([1, 0], dtype=complex)
        with pytest.raises(UsageError):
            separable_extension([], FOUR_STATE)
        with pytest.raises(UsageError):
            separable_extension([(0.9, up, up)], FOUR_STATE)
        with pytest.raises(UsageError):
            separable_extension([(1.0, 2 * up, up)], FOUR_STATE)


class TestIntrinsicInfoUpperBound:
    def _independent_table(self, ab):
        probs = np.stack([0.4 * ab, 0.6 * ab], axis=2)
        return make_tripartite_table((0, 1), (0, 1), (0, 1), probs)

    def test_single_independent_candidate_returns_mi(self):
        ab = np.array([[0.4, 0.1], [0.1, 0.4]])
        table = self._independent_table(ab)
        assert intrinsic_info_upper_bound([table]) == pytest.approx(
            mutual_information(ab), abs=1e-12
        )

    def test_separable_extension_floors_the_bound(self):
        up = np.array([1, 0], dtype=complex)
        down = np.array([0, 1], dtype=complex)
        mixture = [(0.5, up, up), (0.5, down, down)]
        ext = separable_extension(mixture, FOUR_STATE)
        independent = make_tripartite_table(
            ext.alphabet_a,
            ext.alphabet_b,
            (0,),
            ext.bipartite_marginal()[:, :, None],
        )
        assert intrinsic_info_upper_bound([independent, ext]) == pytest.approx(0.0, abs=1e-12)

    def test_two_handcrafted_extensions(self):
        # the correlation is borrowed entirely from e: each conditional
        # slice is a product, so the better extension drives the bound to 0
        cond = {0: np.array([0.9, 0.1]), 1: np.array([0.1, 0.9])}
        tight_probs = np.stack(
            [0.5 * np.outer(cond[e], cond[e]) for e in (0, 1)], axis=2
        )
        tight = make_tripartite_table((0, 1), (0, 1), (0, 1), tight_probs)
        ab = tight.bipartite_marginal()
        loose = self._independent_table(ab)
        bound = intrinsic_info_upper_bound([loose, tight])
        assert bound == pytest.approx(
            min(conditional_mutual_information(loose), conditional_mutual_information(tight)),
            abs=1e-12,
        )
        assert conditional_mutual_information(loose) == pytest.approx(
            mutual_information(ab), abs=1e-12
        )
        assert bound == pytest.approx(0.0, abs=1e-12)
        assert mutual_information(ab) > 0.2

    def test_rejects_inconsistent_marginals(self):
        a = self._independent_table(np.array([[0.4, 0.1], [0.1, 0.4]]))
        b = self._independent_table(np.array([[0.25, 0.25], [0.25, 0.25]]))
        with pytest.raises(UsageError, match="marginal"):
            intrinsic_info_upper_bound([a, b])
        with pytest.raises(UsageError):
            intrinsic_info_upper_bound([])
