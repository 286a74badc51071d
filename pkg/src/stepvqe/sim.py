"""Dense statevector simulation of the single-layer RY/CZ ansatz.

Basis indices are big-endian: qubit 0 is the most significant bit. The
ansatz is a rotation layer, a CZ chain on adjacent qubits, and a second
rotation layer, for 2n parameters on n qubits. RY and CZ are real, so the
internal hot path works on float64 amplitudes; the public Statevector
stores complex amplitudes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .bitstrings import index_to_bits

#: dense-simulation qubit cap; 2^20 amplitudes stay desk-scale
MAX_QUBITS = 20


@dataclass(frozen=True)
class AnsatzSpec:
    """Fixed layout [RY on all qubits] -> [CZ chain] -> [RY on all qubits]."""

    n_qubits: int

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(
                f"n_qubits must be in [1, {MAX_QUBITS}], got {self.n_qubits}"
            )

    @property
    def n_params(self) -> int:
        return 2 * self.n_qubits

    @property
    def cz_pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple((q, q + 1) for q in range(self.n_qubits - 1))


@dataclass
class Statevector:
    """Complex amplitudes over 2^n basis states, big-endian indexed."""

    amps: np.ndarray
    n_qubits: int

    def __post_init__(self):
        self.amps = np.asarray(self.amps, dtype=np.complex128)
        if self.amps.shape != (1 << self.n_qubits,):
            raise ValueError(
                f"amplitude vector of length {self.amps.shape} does not match "
                f"{self.n_qubits} qubits"
            )

    @classmethod
    def zero(cls, n_qubits: int) -> "Statevector":
        amps = np.zeros(1 << n_qubits, dtype=np.complex128)
        amps[0] = 1.0
        return cls(amps=amps, n_qubits=n_qubits)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.amps.real**2 + self.amps.imag**2)))


def _ry_inplace(amps: np.ndarray, qubit: int, theta: float) -> None:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    v = amps.reshape(1 << qubit, 2, -1)
    a0 = v[:, 0, :].copy()
    v[:, 0, :] *= c
    v[:, 0, :] -= s * v[:, 1, :]
    v[:, 1, :] *= c
    v[:, 1, :] += s * a0


def _cz_inplace(amps: np.ndarray, q1: int, q2: int) -> None:
    if q1 == q2:
        raise ValueError("CZ needs two distinct qubits")
    if q1 > q2:
        q1, q2 = q2, q1
    v = amps.reshape(1 << q1, 2, 1 << (q2 - q1 - 1), 2, -1)
    v[:, 1, :, 1, :] *= -1


def _prepare_real(n_qubits: int, theta: Sequence[float]) -> np.ndarray:
    """Ansatz state as float64 amplitudes (RY/CZ keep the state real)."""
    state = np.zeros(1 << n_qubits)
    state[0] = 1.0
    for j in range(n_qubits):
        _ry_inplace(state, j, theta[j])
    for q in range(n_qubits - 1):
        _cz_inplace(state, q, q + 1)
    for j in range(n_qubits):
        _ry_inplace(state, j, theta[n_qubits + j])
    return state


def prepare_state(spec: AnsatzSpec, theta: Sequence[float]) -> Statevector:
    """Apply the ansatz to |0...0> for a parameter vector of length 2n."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (spec.n_params,):
        raise ValueError(
            f"expected {spec.n_params} parameters, got {theta.shape}"
        )
    amps = _prepare_real(spec.n_qubits, theta).astype(np.complex128)
    return Statevector(amps=amps, n_qubits=spec.n_qubits)


def apply_ry(s: Statevector, qubit: int, theta: float) -> None:
    """In-place RY(theta) on one qubit."""
    if not 0 <= qubit < s.n_qubits:
        raise ValueError(f"qubit {qubit} out of range")
    _ry_inplace(s.amps, qubit, theta)


def apply_cz(s: Statevector, q1: int, q2: int) -> None:
    """In-place CZ: flips the sign where both qubits are 1."""
    for q in (q1, q2):
        if not 0 <= q < s.n_qubits:
            raise ValueError(f"qubit {q} out of range")
    _cz_inplace(s.amps, q1, q2)


def probabilities(s: Statevector) -> np.ndarray:
    """Born probabilities |amp_x|^2 over all basis states."""
    return s.amps.real**2 + s.amps.imag**2


def _marginal(probs: np.ndarray, n_qubits: int, support: Sequence[int]) -> np.ndarray:
    """Marginal over ascending support indices, from a full probability vector."""
    others = tuple(q for q in range(n_qubits) if q not in support)
    if not others:
        return probs
    return probs.reshape([2] * n_qubits).sum(axis=others).ravel()


def marginal_probabilities(s: Statevector, support: Sequence[int]) -> np.ndarray:
    """Trace out all qubits not in support.

    Entry at big-endian pattern s_pat is the total probability of basis
    states whose support bits spell s_pat, with support order preserved.
    """
    support = list(support)
    if len(set(support)) != len(support):
        raise ValueError("support indices must be distinct")
    if any(not 0 <= q < s.n_qubits for q in support):
        raise ValueError("support index out of range")
    probs = probabilities(s)
    ascending = sorted(support)
    marg = _marginal(probs, s.n_qubits, ascending)
    if support != ascending:
        perm = [ascending.index(q) for q in support]
        marg = marg.reshape([2] * len(support)).transpose(perm).ravel()
    return marg


def expectation_diagonal(
    s: Statevector, eig: Union[Callable[[str], float], Sequence[float], np.ndarray]
) -> float:
    """Expectation sum_x eig(x) p_x of a diagonal operator.

    eig may be a callable on bitstrings or a precomputed table of length
    2^n. When eig depends only on a support, contracting the support
    marginal against the support eigenvalue table gives the same value.
    """
    p = probabilities(s)
    if callable(eig):
        table = np.array(
            [float(eig(index_to_bits(i, s.n_qubits))) for i in range(p.size)]
        )
    else:
        table = np.asarray(eig, dtype=float)
        if table.shape != p.shape:
            raise ValueError("eigenvalue table length mismatch")
    return float(p @ table)
