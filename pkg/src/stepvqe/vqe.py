"""Variational loop: penalized expectation loss, gradients, and seeded trials.

The loss at parameters theta is <H_f> plus the per-constraint penalty
expectations, each contracted against the marginal probabilities of the
constraint's support qubits. Analytic gradients differentiate the state
preparation exactly with a reverse (adjoint) sweep over the gate list.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from . import model
from ._engine import Engine
from .bitstrings import index_to_bits
from .ising import DiagonalProblem
from .model import Rational
from .sim import _marginal, _prepare_real


class NonFiniteLossError(RuntimeError):
    """Raised when a trial produces a NaN/inf loss; indicates a bug upstream."""


@dataclass(frozen=True)
class OptimizerConfig:
    """L-BFGS-B settings; defaults follow the usual VQE interface values."""

    max_fun_evals: int = 15000
    max_iterations: int = 15000
    f_tol: float = 2.22e-15
    gradient_mode: str = "analytic"
    fd_step: float = 1e-7

    def __post_init__(self):
        if self.max_fun_evals <= 0 or self.max_iterations <= 0:
            raise ValueError("evaluation and iteration caps must be positive")
        if self.f_tol <= 0 or self.fd_step <= 0:
            raise ValueError("f_tol and fd_step must be positive")
        if self.gradient_mode not in ("analytic", "central_difference"):
            raise ValueError(f"unknown gradient_mode {self.gradient_mode!r}")


@dataclass
class VqeOutcome:
    """Result of one optimization trial.

    best_bits is the argmax-probability basis state of the final circuit
    (including slack qubits, if any); feasible and best_objective are
    recomputed by the model oracle on the problem-variable prefix, never
    inferred from the loss.
    """

    theta_opt: np.ndarray
    final_loss: float
    best_bits: str
    best_objective: Rational
    feasible: bool
    trial_seed: int
    eval_count: int


def _check_theta(dp: DiagonalProblem, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (2 * dp.n_qubits,):
        raise ValueError(
            f"expected {2 * dp.n_qubits} parameters for {dp.n_qubits} qubits, "
            f"got shape {theta.shape}"
        )
    return theta


def _loss_from_probs(dp: DiagonalProblem, probs: np.ndarray) -> float:
    val = float(probs @ dp.objective_table)
    for pc in dp.constraints:
        marg = _marginal(probs, dp.n_qubits, pc.qubits)
        val += float(marg @ pc.penalty_table)
    return val


def loss(dp: DiagonalProblem, theta) -> float:
    """Penalized expectation at theta, via per-constraint support marginals."""
    theta = _check_theta(dp, theta)
    state = _prepare_real(dp.n_qubits, theta)
    return _loss_from_probs(dp, state * state)


def gradient(dp: DiagonalProblem, theta, cfg: Optional[OptimizerConfig] = None) -> np.ndarray:
    """Gradient of the loss; analytic by default, central differences otherwise."""
    cfg = cfg or OptimizerConfig()
    theta = _check_theta(dp, theta)
    if cfg.gradient_mode == "analytic":
        return Engine(dp).loss_and_grad(theta)[1]
    eps = cfg.fd_step
    grad = np.empty(theta.size)
    for k in range(theta.size):
        probe = theta.copy()
        probe[k] = theta[k] + eps
        f_plus = loss(dp, probe)
        probe[k] = theta[k] - eps
        f_minus = loss(dp, probe)
        grad[k] = (f_plus - f_minus) / (2 * eps)
    return grad


def extract_solution(dp: DiagonalProblem, theta) -> str:
    """Argmax-probability basis state at theta; ties go to the lowest index."""
    theta = _check_theta(dp, theta)
    state = _prepare_real(dp.n_qubits, theta)
    return index_to_bits(int(np.argmax(state * state)), dp.n_qubits)


def optimize(
    dp: DiagonalProblem,
    theta0,
    cfg: Optional[OptimizerConfig] = None,
    trial_seed: int = -1,
) -> VqeOutcome:
    """Run L-BFGS-B from theta0 and report the best parameters seen.

    eval_count counts every loss evaluation, including line-search probes
    and finite-difference probes in central_difference mode.
    """
    cfg = cfg or OptimizerConfig()
    theta0 = _check_theta(dp, theta0)
    engine = Engine(dp)
    n_evals = 0
    best_f = math.inf
    best_theta = theta0.copy()

    def record(f: float, theta: np.ndarray) -> None:
        nonlocal best_f, best_theta
        if not math.isfinite(f):
            raise NonFiniteLossError(
                f"non-finite loss {f} at theta={np.array2string(theta, precision=4)}"
            )
        if f < best_f:
            best_f = f
            best_theta = theta.copy()

    if cfg.gradient_mode == "analytic":

        def fun(theta):
            nonlocal n_evals
            n_evals += 1
            theta = np.asarray(theta, dtype=float)
            f, g = engine.loss_and_grad(theta)
            record(f, theta)
            return f, g

        jac = True
    else:

        def fun(theta):
            nonlocal n_evals
            n_evals += 1
            theta = np.asarray(theta, dtype=float)
            f = engine.loss(theta)
            record(f, theta)
            return f

        def jac(theta):
            nonlocal n_evals
            theta = np.asarray(theta, dtype=float)
            eps = cfg.fd_step
            grad = np.empty(theta.size)
            for k in range(theta.size):
                probe = theta.copy()
                probe[k] = theta[k] + eps
                f_plus = engine.loss(probe)
                probe[k] = theta[k] - eps
                f_minus = engine.loss(probe)
                grad[k] = (f_plus - f_minus) / (2 * eps)
            n_evals += 2 * theta.size
            return grad

    minimize(
        fun,
        theta0,
        jac=jac,
        method="L-BFGS-B",
        options={
            "maxfun": cfg.max_fun_evals,
            "maxiter": cfg.max_iterations,
            "ftol": cfg.f_tol,
        },
    )
    bits = extract_solution(dp, best_theta)
    problem_bits = bits[: dp.n_vars]
    return VqeOutcome(
        theta_opt=best_theta,
        final_loss=best_f,
        best_bits=bits,
        best_objective=model.eval_objective(dp.program, problem_bits),
        feasible=model.check_feasible(dp.program, problem_bits),
        trial_seed=trial_seed,
        eval_count=n_evals,
    )


def run_trials(
    dp: DiagonalProblem,
    n_trials: int = 3,
    base_seed: int = 0,
    cfg: Optional[OptimizerConfig] = None,
) -> list[VqeOutcome]:
    """Independent seeded trials, sorted by final loss ascending.

    Trial k draws its initial parameters uniformly from [-pi, pi) with
    seed base_seed + k, so reruns are reproducible.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be at least 1")
    outcomes = []
    for k in range(n_trials):
        seed = base_seed + k
        rng = np.random.default_rng(seed)
        theta0 = rng.uniform(-math.pi, math.pi, size=2 * dp.n_qubits)
        outcomes.append(optimize(dp, theta0, cfg, trial_seed=seed))
    return sorted(outcomes, key=lambda o: o.final_loss)
