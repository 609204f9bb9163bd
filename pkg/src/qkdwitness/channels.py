"""Quantum channels and eavesdropping acting on Bob's half of the pair.

Channels act on the B factor only, so Alice's reduced state is never
touched: the prepare-and-measure picture stays intact.  The
intercept-resend attack carries, besides the broken (separable)
post-measurement state, Eve's full classical record: the exact
P(A, B, E) tables per basis pair and an explicit product-state mixture
of the post-state.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import UsageError, ValidationError
from .information import TripartiteTable, make_tripartite_table
from .qlinalg import BASIS_AXES, SIGMA_0, SIGMA_X, SIGMA_Y, SIGMA_Z, as_operator, basis_projector, hermitian_eig, kron
from .states import TwoQubitState, make_state


@dataclass(frozen=True)
class Channel:
    """Trace-preserving qubit channel given by Kraus operators."""

    kraus: tuple[np.ndarray, ...]


def make_channel(kraus, tol: float = 1e-10) -> Channel:
    ops = tuple(as_operator(k, "Kraus operator") for k in kraus)
    if not ops:
        raise ValidationError("channel needs at least one Kraus operator")
    if any(k.shape[0] != 2 for k in ops):
        raise ValidationError("Kraus operators must be 2x2")
    total = sum(k.conj().T @ k for k in ops)
    defect = float(np.max(np.abs(total - np.eye(2))))
    if defect > tol:
        raise ValidationError(
            f"Kraus operators are not trace preserving within {tol:g} (defect {defect:.3e})"
        )
    return Channel(kraus=ops)


def identity_channel() -> Channel:
    return make_channel([SIGMA_0])


def rotation_channel(theta: float) -> Channel:
    """Unitary fiber rotation cos(theta) I - i sin(theta) sigma_y."""
    u = np.cos(theta) * SIGMA_0 - 1j * np.sin(theta) * SIGMA_Y
    return make_channel([u])


def depolarizing_channel(p: float) -> Channel:
    if not 0.0 <= p <= 1.0:
        raise UsageError(f"depolarizing probability must be in [0, 1], got {p}")
    return make_channel(
        [
            np.sqrt(1 - 3 * p / 4) * SIGMA_0,
            np.sqrt(p / 4) * SIGMA_X,
            np.sqrt(p / 4) * SIGMA_Y,
            np.sqrt(p / 4) * SIGMA_Z,
        ]
    )


def apply_to_bob(channel: Channel, state: TwoQubitState, tol: float = 1e-10) -> TwoQubitState:
    """rho -> sum_m (I x K_m) rho (I x K_m)^dagger, revalidated."""
    total = sum(k.conj().T @ k for k in channel.kraus)
    if float(np.max(np.abs(total - np.eye(2)))) > tol:
        raise ValidationError("channel violates trace preservation")
    out = np.zeros((4, 4), dtype=complex)
    for k in channel.kraus:
        lifted = kron(SIGMA_0, k)
        out += lifted @ state.rho @ lifted.conj().T
    return make_state(out, tol=tol)


@dataclass(frozen=True)
class AttackRecord:
    """Everything the intercept-resend attack leaves behind.

    ``tables`` maps each basis pair (i, j) to the exact P(a, b, e)
    with e = (eve_basis, eve_outcome); ``mixture`` is an explicit
    product-state decomposition of ``post_state``, which certifies it
    separable and feeds the vanishing-conditional-information check.
    """

    post_state: TwoQubitState
    eve_outcomes: tuple[tuple[str, int], ...]
    tables: dict[tuple[str, str], TripartiteTable]
    mixture: tuple[tuple[float, np.ndarray, np.ndarray], ...]


def _projector_eigenvector(basis: str, outcome: int) -> np.ndarray:
    proj = basis_projector(basis, outcome)
    col = proj[:, int(np.argmax(np.diag(proj).real))]
    return col / np.linalg.norm(col)


def intercept_resend(bases, state: TwoQubitState) -> AttackRecord:
    """Eve measures Bob's qubit in a uniformly random basis and resends her outcome.

    The resend rule is the eigenstate of the observed outcome, which is
    the attack that produces the textbook 25%/33% error rates.
    """
    requested = set(bases)
    if not requested:
        raise UsageError("intercept-resend needs a nonempty set of bases")
    for b in requested:
        if b not in BASIS_AXES:
            raise UsageError(f"unknown basis {b!r}")
    chosen = tuple(sorted(requested, key=BASIS_AXES.index))
    q_eve = 1.0 / len(chosen)
    eve_outcomes = tuple((b, r) for b in chosen for r in (+1, -1))

    rho = state.rho
    post = np.zeros((4, 4), dtype=complex)
    mixture = []
    resent = {}
    alice_given_eve = {}
    for basis, result in eve_outcomes:
        v = _projector_eigenvector(basis, result)
        resent[(basis, result)] = v
        lifted = kron(SIGMA_0, np.outer(v, v.conj()))
        term = lifted @ rho @ lifted.conj().T
        post += q_eve * term
        # A-side operator conditioned on Eve's record: <v| rho |v> on B.
        embed = np.kron(np.eye(2), v.reshape(2, 1))
        cond_a = embed.conj().T @ rho @ embed
        alice_given_eve[(basis, result)] = cond_a
        eig = hermitian_eig((cond_a + cond_a.conj().T) / 2)
        for m in range(2):
            weight = q_eve * float(eig.eigenvalues[m])
            if weight > 1e-15:
                mixture.append((weight, eig.eigenvectors[:, m].copy(), v.copy()))

    post_state = make_state(post)

    tables: dict[tuple[str, str], TripartiteTable] = {}
    outcomes = (+1, -1)
    for i, j in itertools.product(BASIS_AXES, repeat=2):
        probs = np.zeros((2, 2, len(eve_outcomes)))
        for k, (basis, result) in enumerate(eve_outcomes):
            v = resent[(basis, result)]
            cond_a = alice_given_eve[(basis, result)]
            for ai, a in enumerate(outcomes):
                p_alice = float(np.trace(basis_projector(i, a) @ cond_a).real)
                for bj, b in enumerate(outcomes):
                    p_bob = float((v.conj() @ basis_projector(j, b) @ v).real)
                    probs[ai, bj, k] = q_eve * p_alice * p_bob
        tables[(i, j)] = make_tripartite_table(outcomes, outcomes, eve_outcomes, probs)

    return AttackRecord(
        post_state=post_state,
        eve_outcomes=eve_outcomes,
        tables=tables,
        mixture=tuple(mixture),
    )
