"""Dense complex linear algebra for one- and two-qubit operators.

Everything operates on plain numpy arrays: (2, 2) or (4, 4) complex
operators and length-4 vectors for two-qubit pure states.  The
Hermitian eigensolver is a cyclic Jacobi iteration, chosen because at
this size it converges unconditionally and its output is a
deterministic function of the input bits (same input, same output,
on every platform).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericError, UsageError, ValidationError

SIGMA_0 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

#: Pauli operators keyed by the coefficient labels used throughout.
PAULI = {"0": SIGMA_0, "x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}
PAULI_LABELS = ("0", "x", "y", "z")
BASIS_AXES = ("x", "y", "z")


def as_operator(m, name: str = "operator") -> np.ndarray:
    """Validate a 2x2 or 4x4 operator and return it as complex128."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise UsageError(f"{name} must be a square matrix, got shape {a.shape}")
    if a.shape[0] not in (2, 4):
        raise UsageError(f"{name} must be 2x2 or 4x4, got {a.shape[0]}x{a.shape[0]}")
    if not (np.all(np.isfinite(a.real)) and np.all(np.isfinite(a.imag))):
        raise ValidationError(f"{name} has non-finite entries")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return m.conj().T


def kron(a, b) -> np.ndarray:
    """Tensor product of two single-qubit operators (A indexes the high-order qubit)."""
    a = as_operator(a, "kron factor A")
    b = as_operator(b, "kron factor B")
    if a.shape[0] != 2 or b.shape[0] != 2:
        raise UsageError("kron expects two 2x2 factors")
    return np.kron(a, b)


def basis_projector(basis: str, outcome: int) -> np.ndarray:
    """Rank-1 projector onto the +1/-1 eigenstate of a Pauli axis."""
    if basis not in BASIS_AXES:
        raise UsageError(f"unknown measurement basis {basis!r}")
    if outcome not in (+1, -1):
        raise UsageError(f"outcome must be +1 or -1, got {outcome!r}")
    return (SIGMA_0 + outcome * PAULI[basis]) / 2


def partial_transpose(m, side: str = "B") -> np.ndarray:
    """Transpose one tensor factor of a two-qubit operator.

    The operation is an exact entry permutation, so applying it twice
    returns the input bit-for-bit.
    """
    a = as_operator(m, "partial transpose input")
    if a.shape[0] != 4:
        raise UsageError("partial transpose is defined for 4x4 operators only")
    t = a.reshape(2, 2, 2, 2)
    if side == "A":
        t = t.transpose(2, 1, 0, 3)
    elif side == "B":
        t = t.transpose(0, 3, 2, 1)
    else:
        raise UsageError(f"side must be 'A' or 'B', got {side!r}")
    return np.ascontiguousarray(t.reshape(4, 4))


def _phase_normalize(v: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the first largest-modulus entry is real positive."""
    k = int(np.argmax(np.abs(v)))
    mag = abs(v[k])
    if mag == 0.0:
        return v
    return v * (v[k].conjugate() / mag)


@dataclass(frozen=True)
class EigenSystem:
    """Full spectrum of a Hermitian operator, eigenvalues ascending."""

    eigenvalues: np.ndarray  # real, ascending
    eigenvectors: np.ndarray  # orthonormal columns, same order


def hermitian_eig(m, tol: float = 1e-10, max_sweeps: int = 60) -> EigenSystem:
    """Eigendecompose a Hermitian matrix by cyclic Jacobi rotations.

    Eigenvalues come back ascending; ties are broken by lexicographic
    order of the phase-normalized eigenvector entries, which makes the
    output deterministic even for degenerate spectra.

    Raises ValidationError if the input deviates from Hermiticity by
    more than ``tol``, and NumericError if the rotation sweep budget is
    exhausted before the off-diagonal mass is annihilated.
    """
    a = as_operator(m, "hermitian_eig input")
    herm_defect = float(np.max(np.abs(a - dagger(a))))
    if herm_defect > tol:
        raise ValidationError(
            f"matrix is not Hermitian within tol={tol:g} (defect {herm_defect:.3e})"
        )
    n = a.shape[0]
    b = (a + dagger(a)) / 2  # kill tol-level asymmetry before iterating
    v = np.eye(n, dtype=complex)

    scale = float(np.linalg.norm(b))
    stop = max(scale, 1.0) * 1e-15

    def offdiag(mat: np.ndarray) -> float:
        mask = ~np.eye(n, dtype=bool)
        return float(np.linalg.norm(mat[mask]))

    converged = False
    for _ in range(max_sweeps):
        if offdiag(b) <= stop:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = b[p, q]
                r = abs(g)
                if r <= stop / (n * n):
                    continue
                phase = g / r
                # Zero b[p,q]: pick the smaller-angle root of the
                # 2x2 diagonalization t^2 - 2*tau*t - 1 = 0.
                tau = (b[q, q].real - b[p, p].real) / (2 * r)
                if tau == 0.0:
                    t = 1.0
                else:
                    t = -np.sign(tau) / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # Column update (right-multiply by the rotation)...
                bp = b[:, p].copy()
                bq = b[:, q].copy()
                b[:, p] = c * bp + s * np.conj(phase) * bq
                b[:, q] = -s * phase * bp + c * bq
                # ...then row update (left-multiply by its adjoint).
                rp = b[p, :].copy()
                rq = b[q, :].copy()
                b[p, :] = c * rp + s * phase * rq
                b[q, :] = -s * np.conj(phase) * rp + c * rq
                b[p, q] = 0.0
                b[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp + s * np.conj(phase) * vq
                v[:, q] = -s * phase * vp + c * vq
    else:
        converged = offdiag(b) <= stop
    if not converged:
        raise NumericError(
            f"Jacobi eigensolver did not converge within {max_sweeps} sweeps"
        )

    values = np.real(np.diag(b)).copy()
    vectors = np.empty_like(v)
    for k in range(n):
        vectors[:, k] = _phase_normalize(v[:, k])

    def sort_key(k: int):
        vec = vectors[:, k]
        return (values[k],) + tuple(x for c in vec for x in (c.real, c.imag))

    order = sorted(range(n), key=sort_key)
    values = values[order]
    vectors = vectors[:, order]
    values.setflags(write=False)
    vectors.setflags(write=False)
    return EigenSystem(eigenvalues=values, eigenvectors=vectors)


@dataclass(frozen=True)
class SchmidtForm:
    """Schmidt data of a two-qubit vector: psi = sum_i c_i |u_i>|v_i>."""

    coefficients: np.ndarray  # two nonnegative reals, descending
    basis_a: np.ndarray  # orthonormal columns u_0, u_1
    basis_b: np.ndarray  # orthonormal columns v_0, v_1

    def reconstruct(self) -> np.ndarray:
        c, ua, ub = self.coefficients, self.basis_a, self.basis_b
        return sum(c[i] * np.kron(ua[:, i], ub[:, i]) for i in range(2))


def schmidt_decompose(psi) -> SchmidtForm:
    """Schmidt-decompose a (not necessarily normalized) two-qubit vector.

    The squared coefficients sum to the squared norm of the input, so
    callers can feed unnormalized vectors and read off the weights.
    """
    vec = np.asarray(psi, dtype=complex).reshape(-1)
    if vec.shape != (4,):
        raise UsageError(f"expected a length-4 vector, got shape {np.shape(psi)}")
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        raise UsageError("cannot Schmidt-decompose the zero vector")

    amp = vec.reshape(2, 2)  # amp[i, j] = <ij|psi>
    eig = hermitian_eig(amp @ dagger(amp))
    basis_a = np.array(eig.eigenvectors[:, ::-1])  # dominant direction first

    # The dominant pair is well conditioned (c_0 >= |psi|/sqrt(2)), so it
    # can be read off by division.  The subdominant coefficient must NOT
    # come from sqrt of the Gram eigenvalue: for product states that is
    # sqrt of float dust.  Take instead the residual overlap against the
    # orthogonal complements, which measures the true remainder.
    w0 = np.conj(basis_a[:, 0]) @ amp
    c0 = float(np.linalg.norm(w0))
    v0 = w0 / c0
    v1 = np.array([-np.conj(v0[1]), np.conj(v0[0])])
    g = np.conj(basis_a[:, 1]) @ amp @ np.conj(v1)
    c1 = float(abs(g))
    if c1 > 0.0:
        v1 = v1 * (g / c1)
    if c1 > c0:  # float ties near maximal entanglement
        basis_a = basis_a[:, ::-1].copy()
        c0, c1 = c1, c0
        v0, v1 = v1, v0

    coeffs = np.array([c0, c1])
    basis_b = np.column_stack([v0, v1])
    coeffs.setflags(write=False)
    basis_a.setflags(write=False)
    basis_b.setflags(write=False)
    return SchmidtForm(coefficients=coeffs, basis_a=basis_a, basis_b=basis_b)
