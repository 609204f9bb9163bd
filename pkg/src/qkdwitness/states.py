"""Validated two-qubit density matrices and the PPT separability test.

A state carries both its matrix and its real Pauli-expectation table
t[i, j] = Tr(rho sigma_i x sigma_j), indexed by the labels
("0", "x", "y", "z").  For two qubits the partial-transpose test is
exact: a negative partial transpose is equivalent to entanglement.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UsageError, ValidationError
from .qlinalg import PAULI, PAULI_LABELS, as_operator, hermitian_eig, kron, partial_transpose

#: kron(sigma_i, sigma_j) stacked over all 16 label pairs, index order (i, j).
PAULI_KRON = np.array(
    [[kron(PAULI[i], PAULI[j]) for j in PAULI_LABELS] for i in PAULI_LABELS]
)

_BELL_VECTORS = {
    "phi+": np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2),
    "phi-": np.array([1, 0, 0, -1], dtype=complex) / np.sqrt(2),
    "psi+": np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2),
    "psi-": np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2),
}


def bell_vector(kind: str) -> np.ndarray:
    try:
        return _BELL_VECTORS[kind].copy()
    except KeyError:
        raise UsageError(f"unknown Bell state {kind!r}; expected one of {sorted(_BELL_VECTORS)}")


def pauli_expectations(rho: np.ndarray) -> np.ndarray:
    """4x4 real table t[i, j] = Tr(rho sigma_i x sigma_j)."""
    return np.einsum("abpq,qp->ab", PAULI_KRON, rho).real


def rho_from_pauli(table: np.ndarray) -> np.ndarray:
    """Inverse of pauli_expectations: rho = (1/4) sum t_ij sigma_i x sigma_j."""
    return np.einsum("ab,abpq->pq", np.asarray(table, dtype=float), PAULI_KRON) / 4


@dataclass(frozen=True)
class TwoQubitState:
    """A validated two-qubit density matrix with its Pauli table."""

    rho: np.ndarray  # 4x4 complex, Hermitian, unit trace, PSD
    pauli: np.ndarray  # 4x4 real, index order ("0", "x", "y", "z")

    def pauli_coefficient(self, i: str, j: str) -> float:
        return float(self.pauli[PAULI_LABELS.index(i), PAULI_LABELS.index(j)])

    def reduced_a(self) -> np.ndarray:
        return self.rho.reshape(2, 2, 2, 2).trace(axis1=1, axis2=3)

    def reduced_b(self) -> np.ndarray:
        return self.rho.reshape(2, 2, 2, 2).trace(axis1=0, axis2=2)


def make_state(rho, tol: float = 1e-10) -> TwoQubitState:
    """Validate a density matrix; error messages name the violated invariant."""
    m = as_operator(rho, "density matrix")
    if m.shape[0] != 4:
        raise ValidationError("density matrix must be 4x4 (two qubits)")
    herm_defect = float(np.max(np.abs(m - m.conj().T)))
    if herm_defect > tol:
        raise ValidationError(
            f"density matrix is not Hermitian within {tol:g} (defect {herm_defect:.3e})"
        )
    trace = complex(np.trace(m))
    if abs(trace - 1.0) > tol:
        raise ValidationError(f"density matrix trace is {trace:.12g}, not 1 within {tol:g}")
    m = (m + m.conj().T) / 2
    eig = hermitian_eig(m, tol=max(tol, 1e-10))
    lam_min = float(eig.eigenvalues[0])
    if lam_min < -tol:
        raise ValidationError(
            f"density matrix has negative eigenvalue {lam_min:.3e} beyond tol {tol:g}"
        )
    table = pauli_expectations(m)
    m.setflags(write=False)
    table.setflags(write=False)
    return TwoQubitState(rho=m, pauli=table)


def pure_state(psi, tol: float = 1e-10) -> TwoQubitState:
    vec = np.asarray(psi, dtype=complex).reshape(-1)
    if vec.shape != (4,):
        raise UsageError("pure two-qubit state needs a length-4 vector")
    if abs(np.linalg.norm(vec) - 1.0) > tol:
        raise UsageError("state vector must be normalized")
    return make_state(np.outer(vec, vec.conj()), tol=tol)


def bell_state(kind: str) -> TwoQubitState:
    return pure_state(bell_vector(kind))


def werner_state(p: float) -> TwoQubitState:
    """p |phi+><phi+| + (1-p) I/4 (entangled iff p > 1/3)."""
    if not 0.0 <= p <= 1.0:
        raise UsageError(f"Werner mixing parameter must be in [0, 1], got {p}")
    vec = _BELL_VECTORS["phi+"]
    rho = p * np.outer(vec, vec.conj()) + (1 - p) * np.eye(4) / 4
    return make_state(rho)


@dataclass(frozen=True)
class PptResult:
    """Partial-transpose spectrum summary: NPT is equivalent to entangled."""

    ppt: bool
    min_eigenvalue: float
    negative_eigenvector: np.ndarray | None  # present only when NPT


def is_ppt(state: TwoQubitState, tol: float = 1e-9) -> PptResult:
    """Peres-Horodecki test on the B-side partial transpose.

    Eigenvalues in [-tol, 0) count as PPT so numerical noise can never
    be reported as entanglement.
    """
    pt = partial_transpose(state.rho, "B")
    eig = hermitian_eig(pt)
    lam_min = float(eig.eigenvalues[0])
    if lam_min < -tol:
        vec = eig.eigenvectors[:, 0].copy()
        vec.setflags(write=False)
        return PptResult(ppt=False, min_eigenvalue=lam_min, negative_eigenvector=vec)
    return PptResult(ppt=True, min_eigenvalue=lam_min, negative_eigenvector=None)


@dataclass(frozen=True)
class SourceState:
    """Signal ensemble of a prepare-and-measure source and its purification.

    ``vector`` is the bipartite pure state whose A-side measurements
    steer B into the listed signals; its B-reduction must reproduce the
    signal ensemble average, which pins Alice's reduced state.
    """

    probabilities: tuple[float, ...]
    signals: tuple[np.ndarray, ...]
    vector: np.ndarray  # two-qubit purification


def source_state(probabilities, signals, vector, tol: float = 1e-10) -> SourceState:
    probs = tuple(float(p) for p in probabilities)
    if abs(sum(probs) - 1.0) > 1e-12:
        raise ValidationError("signal probabilities must sum to 1 within 1e-12")
    if any(p < 0 for p in probs):
        raise ValidationError("signal probabilities must be nonnegative")
    kets = tuple(np.asarray(s, dtype=complex).reshape(2) for s in signals)
    if len(kets) != len(probs):
        raise UsageError("need one signal ket per probability")
    for ket in kets:
        if abs(np.linalg.norm(ket) - 1.0) > tol:
            raise ValidationError("every signal ket must be normalized")
    vec = np.asarray(vector, dtype=complex).reshape(4)
    if abs(np.linalg.norm(vec) - 1.0) > tol:
        raise ValidationError("source purification must be normalized")
    ensemble = sum(p * np.outer(k, k.conj()) for p, k in zip(probs, kets))
    rho = np.outer(vec, vec.conj())
    reduced_b = rho.reshape(2, 2, 2, 2).trace(axis1=0, axis2=2)
    if np.max(np.abs(reduced_b - ensemble)) > max(tol, 1e-10):
        raise ValidationError(
            "purification does not reproduce the signal ensemble on the B side"
        )
    return SourceState(probabilities=probs, signals=kets, vector=vec)
