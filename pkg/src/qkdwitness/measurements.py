"""Protocol definitions and exact outcome statistics.

The two shipped protocols measure both qubits in uniformly chosen
Pauli bases: x/z (four-state) or x/y/z (six-state).  All probabilities
are exact asymptotic values computed by projector traces; there is no
sampling anywhere.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import UsageError, ValidationError
from .qlinalg import basis_projector, kron
from .states import SourceState, TwoQubitState, bell_vector, make_state, rho_from_pauli, source_state

OUTCOMES = (+1, -1)

#: Expected sign of a*b per basis for a phi+ source; y is anticorrelated.
DEFAULT_CORRELATION_SIGNS = {"x": +1, "y": -1, "z": +1}


@dataclass(frozen=True)
class Protocol:
    """A protocol: which bases are measured and which correlation counts as 'no error'."""

    name: str
    bases: tuple[str, ...]
    correlation_signs: dict[str, int] = field(default_factory=lambda: dict(DEFAULT_CORRELATION_SIGNS))

    def __post_init__(self):
        if not self.bases:
            raise UsageError("protocol needs at least one basis")
        for b in self.bases:
            if b not in ("x", "y", "z"):
                raise UsageError(f"unknown basis {b!r}")
            if self.correlation_signs.get(b) not in (+1, -1):
                raise UsageError(f"correlation sign for basis {b!r} must be +1 or -1")

    @property
    def basis_probability(self) -> float:
        return 1.0 / len(self.bases)

    def keys(self):
        """All (basisA, a, basisB, b) outcome keys in deterministic order."""
        return [
            (i, a, j, b)
            for i in self.bases
            for a in OUTCOMES
            for j in self.bases
            for b in OUTCOMES
        ]


FOUR_STATE = Protocol(name="four-state", bases=("x", "z"))
SIX_STATE = Protocol(name="six-state", bases=("x", "y", "z"))

_PROTOCOLS = {p.name: p for p in (FOUR_STATE, SIX_STATE)}


def protocol_by_name(name: str) -> Protocol:
    try:
        return _PROTOCOLS[name]
    except KeyError:
        raise UsageError(f"unknown protocol {name!r}; expected one of {sorted(_PROTOCOLS)}")


@dataclass(frozen=True)
class JointDistribution:
    """Exact table P(basisA, a, basisB, b) including the basis choices."""

    protocol: Protocol
    probs: dict[tuple[str, int, str, int], float]

    def pair_conditional(self, basis_a: str, basis_b: str) -> np.ndarray:
        """2x2 conditional table P(a, b | basis pair), rows a=+1,-1."""
        block = np.array(
            [[self.probs[(basis_a, a, basis_b, b)] for b in OUTCOMES] for a in OUTCOMES]
        )
        mass = block.sum()
        if mass <= 0:
            raise UsageError(f"basis pair ({basis_a},{basis_b}) has zero probability")
        return block / mass


def _validate_probs(protocol: Protocol, probs: dict, tol: float = 1e-9) -> None:
    keys = protocol.keys()
    missing = [k for k in keys if k not in probs]
    if missing:
        raise ValidationError(f"distribution is missing {len(missing)} outcome entries")
    extra = [k for k in probs if k not in set(keys)]
    if extra:
        raise ValidationError(f"distribution has {len(extra)} entries outside the protocol")
    values = np.array([probs[k] for k in keys])
    if np.any(values < 0):
        raise ValidationError("probabilities must be nonnegative")
    total = values.sum()
    if abs(total - 1.0) > tol:
        raise ValidationError(f"probabilities sum to {total!r}, not 1 within {tol:g}")
    q2 = protocol.basis_probability**2
    for i in protocol.bases:
        for j in protocol.bases:
            mass = sum(probs[(i, a, j, b)] for a in OUTCOMES for b in OUTCOMES)
            if abs(mass - q2) > tol:
                raise ValidationError(
                    f"basis pair ({i},{j}) has mass {mass!r}, expected uniform {q2!r}"
                )


def distribution_from_probs(protocol: Protocol, probs: dict, tol: float = 1e-9) -> JointDistribution:
    _validate_probs(protocol, probs, tol=tol)
    return JointDistribution(protocol=protocol, probs=dict(probs))


def _povm_stack(protocol: Protocol):
    keys = protocol.keys()
    stack = np.array([kron(basis_projector(i, a), basis_projector(j, b)) for i, a, j, b in keys])
    return keys, stack


_POVM_CACHE: dict[tuple[str, ...], tuple] = {}


def joint_distribution(state: TwoQubitState, protocol: Protocol) -> JointDistribution:
    """P(i, a, j, b) = q_i q_j Tr(rho P_{i,a} x P_{j,b}) with uniform q."""
    if protocol.bases not in _POVM_CACHE:
        _POVM_CACHE[protocol.bases] = _povm_stack(protocol)
    keys, stack = _POVM_CACHE[protocol.bases]
    q2 = protocol.basis_probability**2
    values = q2 * np.einsum("kpq,qp->k", stack, state.rho).real
    # Exact math gives >= 0; clamp only float dust.
    values[(values < 0) & (values > -1e-12)] = 0.0
    probs = {k: float(v) for k, v in zip(keys, values)}
    _validate_probs(protocol, probs)
    return JointDistribution(protocol=protocol, probs=probs)


def qber(dist: JointDistribution) -> float:
    """Sifted-key error rate: P(a*b differs from the expected sign | same basis)."""
    err = 0.0
    sift = 0.0
    for i in dist.protocol.bases:
        sign = dist.protocol.correlation_signs[i]
        for a in OUTCOMES:
            for b in OUTCOMES:
                p = dist.probs[(i, a, i, b)]
                sift += p
                if a * b != sign:
                    err += p
    if sift <= 0:
        raise UsageError("cannot condition on matching bases: zero sifting probability")
    return err / sift


def observed_pauli_table(dist: JointDistribution) -> dict[tuple[str, str], float]:
    """Pauli expectations reachable from the data; unmeasured entries stay absent.

    Keys are label pairs over {"0"} + protocol bases.  A four-state
    table therefore never contains a y index: absent means unknown,
    never zero.
    """
    q = dist.protocol.basis_probability
    bases = dist.protocol.bases
    table: dict[tuple[str, str], float] = {("0", "0"): 1.0}
    for i in bases:
        for j in bases:
            block = sum(
                a * b * dist.probs[(i, a, j, b)] for a in OUTCOMES for b in OUTCOMES
            )
            table[(i, j)] = block / (q * q)
    for i in bases:
        # Alice's marginal is basis-independent on Bob's side (no signaling),
        # so averaging over Bob's bases is exact.
        total = sum(
            a * dist.probs[(i, a, j, b)] for a in OUTCOMES for j in bases for b in OUTCOMES
        )
        table[(i, "0")] = total / q
    for j in bases:
        total = sum(
            b * dist.probs[(i, a, j, b)] for b in OUTCOMES for i in bases for a in OUTCOMES
        )
        table[("0", j)] = total / q
    return table


def tomographic_state(dist: JointDistribution, tol: float = 1e-9) -> TwoQubitState:
    """Reconstruct the density matrix from a tomographically complete table."""
    if set(dist.protocol.bases) != {"x", "y", "z"}:
        raise UsageError(
            "tomographic reconstruction needs all three bases (six-state data)"
        )
    observed = observed_pauli_table(dist)
    labels = ("0", "x", "y", "z")
    full = np.array([[observed[(i, j)] for j in labels] for i in labels])
    return make_state(rho_from_pauli(full), tol=tol)


def protocol_source(protocol: Protocol) -> SourceState:
    """Prepare-and-measure source equivalent to measuring half of phi+.

    Signals are the basis eigenstates, each sent with probability
    q_basis / 2; the purification is the maximally entangled state, so
    Alice's reduced state is I/2 regardless of the channel.
    """
    probs = []
    kets = []
    for basis in protocol.bases:
        for outcome in OUTCOMES:
            probs.append(protocol.basis_probability / 2)
            proj = basis_projector(basis, outcome)
            eigvec = proj[:, int(np.argmax(np.abs(np.diag(proj))))]
            kets.append(eigvec / np.linalg.norm(eigvec))
    return source_state(probs, kets, bell_vector("phi+"))
