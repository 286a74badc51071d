"""Pauli-Z decomposition of diagonal operators via the fast Walsh-Hadamard transform.

Any 2^n diagonal equals a weighted sum of Z-string terms; the coefficient
vector is the Hadamard transform of the diagonal scaled by 2^-n, and the
transform is its own inverse up to that factor. Terms are keyed by an
n-bit mask aligned with basis indices: mask bit for qubit j carries weight
2^(n-1-j), matching the big-endian convention everywhere else.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ising import (
    ConstraintHamiltonian,
    PenaltySpec,
    penalty_value,
    support_eigenvalue_table,
)


@dataclass(frozen=True)
class PauliZPolynomial:
    """Weighted Z-strings: mask 0 is the identity term."""

    terms: dict[int, float]
    n_qubits: int

    def coefficient(self, mask: int) -> float:
        return self.terms.get(mask, 0.0)


def _fwht_inplace(a: np.ndarray) -> None:
    """Unnormalized in-place butterfly transform, O(n 2^n)."""
    h = 1
    n = a.size
    while h < n:
        v = a.reshape(-1, 2, h)
        even = v[:, 0, :] + v[:, 1, :]
        odd = v[:, 0, :] - v[:, 1, :]
        v[:, 0, :] = even
        v[:, 1, :] = odd
        h *= 2


def decompose(diag) -> PauliZPolynomial:
    """Pauli-Z coefficients of a diagonal, via the scaled Hadamard transform."""
    vec = np.array(diag, dtype=float)
    size = vec.size
    if size < 1 or size & (size - 1):
        raise ValueError(f"diagonal length {size} is not a power of two")
    n = size.bit_length() - 1
    _fwht_inplace(vec)
    vec /= size
    terms = {mask: float(c) for mask, c in enumerate(vec) if c != 0.0}
    return PauliZPolynomial(terms=terms, n_qubits=n)


def reconstruct(p: PauliZPolynomial) -> np.ndarray:
    """Diagonal whose entries are sum_S c_S * prod_{j in S} (-1)^{x_j}."""
    vec = np.zeros(1 << p.n_qubits)
    for mask, c in p.terms.items():
        vec[mask] = c
    _fwht_inplace(vec)
    return vec


def decompose_stepped_constraint(
    h: ConstraintHamiltonian, xi: PenaltySpec, n_qubits: int | None = None
) -> PauliZPolynomial:
    """Decompose xi(H_i) on the constraint's support, relabeled to global qubits.

    Only the 2^t support eigenvalues are transformed, so terms never touch
    qubits outside the support.
    """
    support = h.support
    t = len(support)
    if n_qubits is None:
        n_qubits = support[-1] + 1
    elif support[-1] >= n_qubits:
        raise ValueError("support extends past n_qubits")
    values = [penalty_value(xi, mu) for mu in support_eigenvalue_table(h)]
    local = decompose(values)
    terms = {}
    for mask, c in local.terms.items():
        global_mask = 0
        for k in range(t):
            if (mask >> (t - 1 - k)) & 1:
                global_mask |= 1 << (n_qubits - 1 - support[k])
        terms[global_mask] = c
    return PauliZPolynomial(terms=terms, n_qubits=n_qubits)
