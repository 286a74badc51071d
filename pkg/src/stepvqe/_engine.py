"""JIT-compiled hot path for the optimizer loop.

Same ansatz and adjoint-differentiation math as the numpy kernels in sim,
but loop-fused over preallocated float64 buffers so a loss+gradient
evaluation costs a few state sweeps. The loss here contracts the full
penalized eigenvalue table; the public marginal-path loss agrees with it
to float rounding and the test suite checks both.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .ising import DiagonalProblem


@njit(cache=True)
def _ry(state, n, qubit, theta):
    c = math.cos(theta / 2)
    s = math.sin(theta / 2)
    step = 1 << (n - 1 - qubit)
    for base in range(0, 1 << n, step << 1):
        for off in range(base, base + step):
            a0 = state[off]
            a1 = state[off + step]
            state[off] = c * a0 - s * a1
            state[off + step] = s * a0 + c * a1


@njit(cache=True)
def _cz_chain(state, n, q):
    # CZ on adjacent pair (q, q+1): negate where both bits are 1
    mask = (1 << (n - 1 - q)) | (1 << (n - 2 - q))
    for i in range(1 << n):
        if i & mask == mask:
            state[i] = -state[i]


@njit(cache=True)
def _prepare(state, n, theta):
    state[:] = 0.0
    state[0] = 1.0
    for j in range(n):
        _ry(state, n, j, theta[j])
    for q in range(n - 1):
        _cz_chain(state, n, q)
    for j in range(n):
        _ry(state, n, j, theta[n + j])


@njit(cache=True)
def _ry_deriv_dot(state, abar, n, qubit, theta):
    # 2 * abar . (dRY/dtheta applied to state), without scratch storage
    c = 0.5 * math.cos(theta / 2)
    s = 0.5 * math.sin(theta / 2)
    step = 1 << (n - 1 - qubit)
    acc = 0.0
    for base in range(0, 1 << n, step << 1):
        for off in range(base, base + step):
            a0 = state[off]
            a1 = state[off + step]
            acc += abar[off] * (-s * a0 - c * a1)
            acc += abar[off + step] * (c * a0 - s * a1)
    return 2.0 * acc


@njit(cache=True)
def _loss(state, n, theta, table):
    _prepare(state, n, theta)
    f = 0.0
    for i in range(1 << n):
        f += table[i] * state[i] * state[i]
    return f


@njit(cache=True)
def _loss_and_grad(state, abar, grad, n, theta, table):
    _prepare(state, n, theta)
    f = 0.0
    for i in range(1 << n):
        abar[i] = table[i] * state[i]
        f += state[i] * abar[i]
    # adjoint sweep: rewind the state while pushing the co-state through
    # the transposed gates, in exact reverse gate order
    for j in range(n - 1, -1, -1):
        th = theta[n + j]
        _ry(state, n, j, -th)
        grad[n + j] = _ry_deriv_dot(state, abar, n, j, th)
        _ry(abar, n, j, -th)
    for q in range(n - 2, -1, -1):
        _cz_chain(state, n, q)
        _cz_chain(abar, n, q)
    for j in range(n - 1, -1, -1):
        th = theta[j]
        _ry(state, n, j, -th)
        grad[j] = _ry_deriv_dot(state, abar, n, j, th)
        _ry(abar, n, j, -th)
    return f


class Engine:
    """Per-problem buffers bound to the JIT kernels."""

    def __init__(self, dp: DiagonalProblem):
        self.n = dp.n_qubits
        self.table = np.ascontiguousarray(dp.full_table, dtype=np.float64)
        self.state = np.empty(1 << self.n)
        self.abar = np.empty(1 << self.n)
        self.grad = np.empty(2 * self.n)

    def loss(self, theta: np.ndarray) -> float:
        return float(_loss(self.state, self.n, theta, self.table))

    def loss_and_grad(self, theta: np.ndarray) -> tuple[float, np.ndarray]:
        f = _loss_and_grad(
            self.state, self.abar, self.grad, self.n, theta, self.table
        )
        return float(f), self.grad.copy()
