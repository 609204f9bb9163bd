"""Classical information-theoretic checks on finite distributions.

All quantities are in bits.  The headline construction: any separable
explanation of the observed correlations extends to a three-party
distribution whose conditional mutual information vanishes, so no
secret key can be distilled from it.  The infimum over all extensions
is not computable here; only minima over explicitly supplied
candidates are reported, and they are upper bounds by definition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UsageError, ValidationError
from .measurements import OUTCOMES, Protocol
from .qlinalg import basis_projector


@dataclass(frozen=True)
class TripartiteTable:
    """Finite joint distribution P(a, b, e) with explicit alphabets."""

    alphabet_a: tuple
    alphabet_b: tuple
    alphabet_e: tuple
    probs: np.ndarray  # shape (|A|, |B|, |E|)

    def bipartite_marginal(self) -> np.ndarray:
        return self.probs.sum(axis=2)


def make_tripartite_table(alphabet_a, alphabet_b, alphabet_e, probs, tol: float = 1e-12) -> TripartiteTable:
    a = tuple(alphabet_a)
    b = tuple(alphabet_b)
    e = tuple(alphabet_e)
    p = np.asarray(probs, dtype=float)
    if p.shape != (len(a), len(b), len(e)):
        raise ValidationError(
            f"probability array shape {p.shape} does not match alphabets "
            f"({len(a)}, {len(b)}, {len(e)})"
        )
    if np.any(p < 0):
        raise ValidationError("probabilities must be nonnegative")
    total = float(p.sum())
    if abs(total - 1.0) > tol:
        raise ValidationError(f"probabilities sum to {total!r}, not 1 within {tol:g}")
    p = p.copy()
    p.setflags(write=False)
    return TripartiteTable(alphabet_a=a, alphabet_b=b, alphabet_e=e, probs=p)


def _validate_bipartite(p: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 2:
        raise ValidationError("bipartite table must be a 2-D array")
    if np.any(arr < 0):
        raise ValidationError("probabilities must be nonnegative")
    total = float(arr.sum())
    if abs(total - 1.0) > tol:
        raise ValidationError(f"probabilities sum to {total!r}, not 1 within {tol:g}")
    return arr


def mutual_information(p) -> float:
    """I(A;B) in bits, with the 0 log 0 = 0 convention."""
    arr = _validate_bipartite(p)
    pa = arr.sum(axis=1)
    pb = arr.sum(axis=0)
    total = 0.0
    for i in range(arr.shape[0]):
        for j in range(arr.shape[1]):
            pij = arr[i, j]
            if pij > 0:
                total += pij * np.log2(pij / (pa[i] * pb[j]))
    return float(total)


def conditional_mutual_information(table: TripartiteTable) -> float:
    """I(A;B|E) = sum_e P(e) I(A;B | E=e); zero-probability slices contribute 0."""
    probs = table.probs
    if np.any(probs < 0):
        raise ValidationError("probabilities must be nonnegative")
    total = float(probs.sum())
    if abs(total - 1.0) > 1e-9:
        raise ValidationError(f"probabilities sum to {total!r}, not 1")
    cmi = 0.0
    for k in range(probs.shape[2]):
        pe = float(probs[:, :, k].sum())
        if pe <= 0:
            continue
        cmi += pe * mutual_information(probs[:, :, k] / pe)
    return max(cmi, 0.0)


def separable_extension(mixture, protocol: Protocol) -> TripartiteTable:
    """Extend a product-state mixture to P(A, B, E) with E the mixture index.

    When the eavesdropper announces which product term was dealt, the
    conditional distribution of the two measurement records factorizes,
    so the output always has I(A;B|E) = 0.  The A/B alphabets carry the
    full records (basis, outcome); the B marginal includes the uniform
    basis choice weights, so marginalizing over E reproduces the
    protocol's joint distribution of the mixed state.
    """
    terms = list(mixture)
    if not terms:
        raise UsageError("mixture must have at least one term")
    weights = np.array([float(t[0]) for t in terms])
    if np.any(weights < 0):
        raise UsageError("mixture weights must be nonnegative")
    if abs(weights.sum() - 1.0) > 1e-12:
        raise UsageError(f"mixture weights sum to {weights.sum()!r}, not 1 within 1e-12")
    kets_a = [np.asarray(t[1], dtype=complex).reshape(2) for t in terms]
    kets_b = [np.asarray(t[2], dtype=complex).reshape(2) for t in terms]
    for ket in kets_a + kets_b:
        if abs(np.linalg.norm(ket) - 1.0) > 1e-10:
            raise UsageError("mixture kets must be normalized")

    q = protocol.basis_probability
    records = [(basis, outcome) for basis in protocol.bases for outcome in OUTCOMES]
    proj = {r: basis_projector(*r) for r in records}

    def side_probs(ket):
        return np.array([q * (ket.conj() @ proj[r] @ ket).real for r in records])

    probs = np.zeros((len(records), len(records), len(terms)))
    for k, w in enumerate(weights):
        probs[:, :, k] = w * np.outer(side_probs(kets_a[k]), side_probs(kets_b[k]))
    return make_tripartite_table(tuple(records), tuple(records), tuple(range(len(terms))), probs)


def intrinsic_info_upper_bound(candidates, marginal_tol: float = 1e-9) -> float:
    """Minimum I(A;B|E) over explicit extensions of one shared P(A, B).

    This is an upper bound on the infimum over all extensions, never a
    value claim for the infimum itself.
    """
    tables = list(candidates)
    if not tables:
        raise UsageError("need at least one candidate extension")
    reference = tables[0].bipartite_marginal()
    for t in tables[1:]:
        marg = t.bipartite_marginal()
        if marg.shape != reference.shape or np.max(np.abs(marg - reference)) > marginal_tol:
            raise UsageError("candidate extensions disagree on the (A, B) marginal")
    return min(conditional_mutual_information(t) for t in tables)
