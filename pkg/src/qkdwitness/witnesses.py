"""Entanglement certification from protocol statistics alone.

The detection logic never touches a density matrix on the four-state
path.  Its pivot is the partial-transpose symmetrization

    S(rho) = (rho + rho^T_A + rho^T_B + rho^T) / 4,

whose expansion contains exactly the sigma_i x sigma_j terms with
i, j in {0, x, z} -- the terms the four-state protocol measures.  Any
witness evaluable from that data satisfies W = W^T = W^{T_P}, gives
Tr(W rho) = Tr(W S(rho)), and is therefore blind to everything the
symmetrization discards.  Consequences used here:

* if S has a negative eigenvalue, its (real) bottom eigenvector phi
  generates the witness (|phi><phi| + |phi><phi|^{T_P}) / 2 whose data
  value equals that eigenvalue -- entanglement is certified;
* if S >= 0 it is itself a partial-transpose-invariant state, hence
  separable at two qubits, and it reproduces the observed data: no
  witness of this class can fire, and the verdict is final.

Six-state data is tomographically complete, so that path reconstructs
the state and applies the exact partial-transpose test instead; the
reported witness is the partially transposed projector onto the
negative-eigenvalue eigenvector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericError, UsageError
from .measurements import JointDistribution, observed_pauli_table, tomographic_state
from .qlinalg import PAULI, PAULI_LABELS, basis_projector, hermitian_eig, kron, partial_transpose, schmidt_decompose
from .states import PAULI_KRON, TwoQubitState, is_ppt

XZ_LABELS = ("0", "x", "z")
XZ_PAIRS = tuple((i, j) for i in XZ_LABELS for j in XZ_LABELS)

#: sigma_i x sigma_j for i, j in {0, x, z}, stacked in XZ_PAIRS order (all real).
_XZ_STACK = np.array([kron(PAULI[i], PAULI[j]).real for i, j in XZ_PAIRS])

CLASS_XZ = "xz"  # evaluable from x/z correlation data: W = W^T = W^{T_P}
CLASS_OPTIMAL = "optimal"  # partially transposed entangled projector
CLASS_GENERAL = "general"


@dataclass(frozen=True)
class Witness:
    """Hermitian witness W = sum c_ij sigma_i x sigma_j with real c."""

    coefficients: np.ndarray  # 4x4 real, index order ("0", "x", "y", "z")
    class_tag: str
    generator: np.ndarray | None = None  # the |phi> the witness was built from

    def matrix(self) -> np.ndarray:
        return np.einsum("ab,abpq->pq", self.coefficients, PAULI_KRON)

    def trace(self) -> float:
        return 4.0 * float(self.coefficients[0, 0])

    def expectation(self, state: TwoQubitState) -> float:
        """Tr(W rho) via the Pauli tables (exact for Hermitian operators)."""
        return float(np.sum(self.coefficients * state.pauli))


@dataclass(frozen=True)
class DetectionResult:
    """Outcome of a detection run.

    ``value`` is the certified witness expectation when detected;
    otherwise it is the smallest value any witness of the searched
    class can reach on the data (>= -tol, which is why nothing fired).
    ``margin`` is |value| - tol: small margins flag near-threshold
    verdicts.
    """

    detected: bool
    witness: Witness | None
    value: float
    margin: float


def coefficients_from_matrix(w) -> np.ndarray:
    """c_ij = Tr(W sigma_i x sigma_j) / 4 for a Hermitian W."""
    c = np.einsum("abpq,qp->ab", PAULI_KRON, np.asarray(w, dtype=complex)) / 4
    if np.max(np.abs(c.imag)) > 1e-10:
        raise UsageError("witness matrix must be Hermitian (complex Pauli coefficients)")
    return c.real


def witness_from_coefficients(coefficients, class_tag: str = CLASS_GENERAL) -> Witness:
    c = np.array(coefficients, dtype=float)
    if c.shape != (4, 4):
        raise UsageError("coefficient table must be 4x4 over labels (0, x, y, z)")
    c.setflags(write=False)
    return Witness(coefficients=c, class_tag=class_tag)


def pt_symmetrize(source) -> np.ndarray:
    """Average a state with its partial and full transposes.

    Accepts either a TwoQubitState or an observed Pauli table that
    contains all entries over {0, x, z} x {0, x, z} -- exactly the
    four-state observables, which is what makes this operator
    measurable without tomography.  Returns a real symmetric 4x4 array.
    """
    if isinstance(source, TwoQubitState):
        idx = [PAULI_LABELS.index(l) for l in XZ_LABELS]
        coeffs = np.array([source.pauli[a, b] for a in idx for b in idx])
    else:
        try:
            coeffs = np.array([float(source[pair]) for pair in XZ_PAIRS])
        except KeyError as missing:
            raise UsageError(
                f"observed table is missing the {missing.args[0]} entry required "
                "for the partial-transpose symmetrization"
            ) from None
    return np.einsum("k,kpq->pq", coeffs, _XZ_STACK) / 4


def is_xz_witness(w: Witness, tol: float = 1e-10) -> bool:
    """True iff W survives both transpose symmetries: W = W^T = W^{T_P}.

    Equivalently, no coefficient with a y index: the y Pauli operator is
    the only skew-symmetric basis element, so these are exactly the
    witnesses the four-state correlations determine.
    """
    m = w.matrix()
    return (
        float(np.max(np.abs(m - m.T))) <= tol
        and float(np.max(np.abs(m - partial_transpose(m, "B")))) <= tol
    )


def witness_from_real_state(phi, tol: float = 1e-10) -> Witness:
    """Witness (Q + Q^{T_P}) / 2 from a real entangled unit vector, Q = |phi><phi|.

    Both addends are nonnegative on separable inputs (Q because it is a
    projector, the transposed part because separable states stay
    positive under partial transposition), so this is always a valid
    witness; entanglement of the generator is what lets it fire.
    """
    vec = np.asarray(phi, dtype=complex).reshape(-1)
    if vec.shape != (4,):
        raise UsageError("generator must be a length-4 vector")
    if np.max(np.abs(vec.imag)) > 1e-12:
        raise UsageError("generator must be a real vector")
    vec = vec.real.astype(float)
    if abs(np.linalg.norm(vec) - 1.0) > tol:
        raise UsageError("generator must be normalized")
    schmidt = schmidt_decompose(vec)
    if schmidt.coefficients[1] <= tol:
        raise UsageError("not an entangled generator (product vector)")
    # For i, j in {0, x, z} both addends contribute identically, and the
    # y-indexed coefficients cancel exactly: the witness lands in the
    # x/z-measurable class by construction.
    coeffs = np.zeros((4, 4))
    for i, j in XZ_PAIRS:
        a, b = PAULI_LABELS.index(i), PAULI_LABELS.index(j)
        coeffs[a, b] = float(vec @ (kron(PAULI[i], PAULI[j]).real @ vec)) / 4
    coeffs.setflags(write=False)
    gen = vec.astype(complex)
    gen.setflags(write=False)
    return Witness(coefficients=coeffs, class_tag=CLASS_XZ, generator=gen)


def optimal_witness(phi_e, tol: float = 1e-10) -> Witness:
    """Witness |phi><phi|^{T_P} from an entangled (possibly complex) unit vector."""
    vec = np.asarray(phi_e, dtype=complex).reshape(-1)
    if vec.shape != (4,):
        raise UsageError("generator must be a length-4 vector")
    if abs(np.linalg.norm(vec) - 1.0) > tol:
        raise UsageError("generator must be normalized")
    if schmidt_decompose(vec).coefficients[1] <= tol:
        raise UsageError("not an entangled generator (product vector)")
    w = partial_transpose(np.outer(vec, vec.conj()), "B")
    coeffs = coefficients_from_matrix(w)
    coeffs.setflags(write=False)
    gen = vec.copy()
    gen.setflags(write=False)
    return Witness(coefficients=coeffs, class_tag=CLASS_OPTIMAL, generator=gen)


def evaluate_from_data(w: Witness, dist: JointDistribution) -> float:
    """Tr(W rho) for every rho compatible with the four-state data.

    Works purely in expectation coordinates: Tr(W rho) =
    sum c_ij t_ij, and an x/z-class witness touches only observed
    entries.  Witnesses outside that class are rejected because their
    value is simply not determined by four-state statistics.
    """
    if not is_xz_witness(w):
        raise UsageError(
            "witness has y-indexed coefficients; its value is not determined "
            "by four-state data"
        )
    if set(dist.protocol.bases) != {"x", "z"}:
        raise UsageError("evaluate_from_data expects a four-state distribution")
    table = observed_pauli_table(dist)
    total = 0.0
    for i, j in XZ_PAIRS:
        total += w.coefficients[PAULI_LABELS.index(i), PAULI_LABELS.index(j)] * table[(i, j)]
    return float(total)


def detect_4state(dist: JointDistribution, tol: float = 1e-9) -> DetectionResult:
    """Decide detectability from four-state data by one eigendecomposition.

    Sound and complete for the x/z-measurable witness class: the
    returned NotDetected means no such witness fires on these
    correlations, because the nonnegative symmetrization itself is a
    separable state explaining the data.
    """
    if set(dist.protocol.bases) != {"x", "z"}:
        raise UsageError("detect_4state expects a four-state distribution")
    table = observed_pauli_table(dist)
    sym = pt_symmetrize(table)
    eig = hermitian_eig(sym.astype(complex))
    lam_min = float(eig.eigenvalues[0])
    margin = abs(lam_min) - tol
    if lam_min >= -tol:
        return DetectionResult(detected=False, witness=None, value=lam_min, margin=margin)
    phi = eig.eigenvectors[:, 0]
    if np.max(np.abs(phi.imag)) > 1e-12:
        raise NumericError("symmetrized operator produced a non-real eigenvector")
    witness = witness_from_real_state(phi.real)
    value = evaluate_from_data(witness, dist)
    if abs(value - lam_min) > 1e-9:
        raise NumericError(
            f"data evaluation {value!r} inconsistent with eigenvalue {lam_min!r}"
        )
    return DetectionResult(detected=True, witness=witness, value=value, margin=margin)


def detect_6state(dist: JointDistribution, tol: float = 1e-9) -> DetectionResult:
    """Tomography plus the exact partial-transpose test on six-state data."""
    if set(dist.protocol.bases) != {"x", "y", "z"}:
        raise UsageError("detect_6state expects a six-state distribution")
    state = tomographic_state(dist, tol=max(tol, 1e-10))
    ppt = is_ppt(state, tol=tol)
    margin = abs(ppt.min_eigenvalue) - tol
    if ppt.ppt:
        return DetectionResult(
            detected=False, witness=None, value=ppt.min_eigenvalue, margin=margin
        )
    witness = optimal_witness(ppt.negative_eigenvector)
    value = witness.expectation(state)
    if abs(value - ppt.min_eigenvalue) > 1e-9:
        raise NumericError(
            f"witness value {value!r} inconsistent with eigenvalue {ppt.min_eigenvalue!r}"
        )
    return DetectionResult(detected=True, witness=witness, value=value, margin=margin)


@dataclass(frozen=True)
class PseudoMixture:
    """W as a signed combination of measurable product projectors.

    Each term is (coefficient, (basisA, outcomeA), (basisB, outcomeB)).
    The coefficients sum to Tr(W), and weighting the observed
    conditional probabilities with them reproduces Tr(W rho).
    """

    terms: tuple[tuple[float, tuple[str, int], tuple[str, int]], ...]

    def reconstruct(self) -> np.ndarray:
        out = np.zeros((4, 4), dtype=complex)
        for coeff, (i, a), (j, b) in self.terms:
            out += coeff * kron(basis_projector(i, a), basis_projector(j, b))
        return out

    def coefficient_sum(self) -> float:
        return float(sum(t[0] for t in self.terms))


def pseudo_mixture(w: Witness) -> PseudoMixture:
    """Decompose an x/z-class witness over the 16 protocol projectors.

    The identity on each side is split evenly across both measured
    bases, (P_x+ + P_x- + P_z+ + P_z-) / 2, which makes the otherwise
    non-unique decomposition deterministic and keeps every projector
    protocol-measurable.
    """
    if not is_xz_witness(w):
        raise UsageError("pseudo-mixture over x/z projectors needs an x/z-class witness")

    def weight(label: str, basis: str, outcome: int) -> float:
        if label == "0":
            return 0.5
        return float(outcome) if label == basis else 0.0

    terms = []
    for basis_a in ("x", "z"):
        for out_a in (+1, -1):
            for basis_b in ("x", "z"):
                for out_b in (+1, -1):
                    coeff = 0.0
                    for i, j in XZ_PAIRS:
                        coeff += (
                            w.coefficients[PAULI_LABELS.index(i), PAULI_LABELS.index(j)]
                            * weight(i, basis_a, out_a)
                            * weight(j, basis_b, out_b)
                        )
                    terms.append((coeff, (basis_a, out_a), (basis_b, out_b)))
    return PseudoMixture(terms=tuple(terms))


def _vectors_from_angles(a, b, c) -> np.ndarray:
    """Hyperspherical real unit 4-vectors, broadcast over the last axis."""
    sa, sb = np.sin(a), np.sin(b)
    return np.stack(
        [np.cos(a), sa * np.cos(b), sa * sb * np.cos(c), sa * sb * np.sin(c)],
        axis=-1,
    )


def _family_quad(phis: np.ndarray) -> np.ndarray:
    """Witness coefficients of each real unit generator, one row per vector.

    The coefficient of sigma_i x sigma_j is <phi| sigma_i x sigma_j |phi> / 4
    for the measured labels, so the data value is this quadratic form
    contracted against the observed expectations.
    """
    return np.einsum("kp,mpq,kq->km", phis, _XZ_STACK, phis) / 4


# The global grid depends only on the resolution; reuse it across calls.
_GRID_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _global_grid(resolution: int) -> tuple[np.ndarray, np.ndarray]:
    if resolution not in _GRID_CACHE:
        a = np.linspace(0.0, np.pi, resolution)
        b = np.linspace(0.0, np.pi, resolution)
        c = np.linspace(0.0, 2 * np.pi, 2 * resolution, endpoint=False)
        aa, bb, cc = np.meshgrid(a, b, c, indexing="ij")
        angles = np.stack([aa.ravel(), bb.ravel(), cc.ravel()], axis=1)
        quad = _family_quad(_vectors_from_angles(*angles.T))
        _GRID_CACHE[resolution] = (angles, quad)
    return _GRID_CACHE[resolution]


def grid_search_family(
    dist: JointDistribution, resolution: int = 32, tol: float = 1e-9, refine: bool = True
) -> DetectionResult:
    """Brute-force the generated witness family straight on the data.

    Scans real unit generators over a 3-parameter grid (global sign is
    redundant and left in), then shrinks a local grid around the best
    point.  Entirely independent of the eigendecomposition path in
    detect_4state, which it cross-checks.
    """
    if resolution < 8:
        raise UsageError("grid resolution must be at least 8")
    if set(dist.protocol.bases) != {"x", "z"}:
        raise UsageError("grid_search_family expects a four-state distribution")
    table = observed_pauli_table(dist)
    tvec = np.array([table[pair] for pair in XZ_PAIRS])

    angles, quad = _global_grid(resolution)
    values = quad @ tvec
    best = int(np.argmin(values))  # ties resolve to the lowest grid index
    best_angles = angles[best]
    best_value = float(values[best])

    if refine:
        span = np.array([np.pi / (resolution - 1)] * 2 + [np.pi / resolution])
        center = best_angles.copy()
        for _ in range(48):
            offsets = np.linspace(-1.0, 1.0, 5)
            la, lb, lc = (center[k] + span[k] * offsets for k in range(3))
            aa, bb, cc = np.meshgrid(la, lb, lc, indexing="ij")
            local = np.stack([aa.ravel(), bb.ravel(), cc.ravel()], axis=1)
            vals = _family_quad(_vectors_from_angles(*local.T)) @ tvec
            k = int(np.argmin(vals))
            if vals[k] < best_value:
                best_value = float(vals[k])
                center = local[k]
            span *= 0.5
            if span.max() < 1e-10:
                break
        best_angles = center

    margin = abs(best_value) - tol
    if best_value >= -tol:
        return DetectionResult(detected=False, witness=None, value=best_value, margin=margin)
    phi = _vectors_from_angles(*best_angles)
    witness = witness_from_real_state(phi / np.linalg.norm(phi))
    value = evaluate_from_data(witness, dist)
    return DetectionResult(detected=True, witness=witness, value=value, margin=abs(value) - tol)
