"""Diagonal Hamiltonians for penalized binary programs.

A linear constraint h(x) = a.x - b maps under x -> (1 - Z)/2 to a constant
offset plus a weighted sum of single-qubit Z terms, so its eigenvalues are
computable from the support bits alone. Penalty functions (step,
exponential, unbalanced quadratic, slack quadratic) act entry-wise on
those eigenvalues.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property
from typing import Optional, Union

import numpy as np

from .bitstrings import Bits, as_bit_tuple
from .model import ConstrainedProgram, LinearConstraint, MkpInstance, Rational

#: support sizes above this are refused by eigenvalue-table construction
SUPPORT_TABLE_CAP = 20

#: exponent clamp keeping exponential penalties finite
EXP_CLAMP = 60.0

PENALTY_KINDS = ("step", "exponential", "unbalanced_quadratic", "slack_quadratic")


@dataclass(frozen=True)
class ConstraintHamiltonian:
    """Spin-mapped constraint: offset C minus half a weighted Z sum.

    offset is exactly (sum of coefficients)/2 - bound; coeffs maps each
    support qubit to its nonzero weight.
    """

    offset: Fraction
    coeffs: dict[int, Rational]
    support: tuple[int, ...]


def encode_constraint(c: LinearConstraint) -> ConstraintHamiltonian:
    """Spin-map one inequality row. Rejects all-zero rows."""
    support = c.support
    if not support:
        raise ValueError("constraint has empty support (all-zero row)")
    coeffs = {j: c.coeffs[j] for j in support}
    offset = Fraction(sum(coeffs.values()), 2) - c.bound
    return ConstraintHamiltonian(offset=offset, coeffs=coeffs, support=support)


def constraint_eigenvalue(h: ConstraintHamiltonian, bits: Bits) -> Fraction:
    """Eigenvalue mu_x = C - (1/2) sum_j (-1)^{x_j} a_j; equals h(x) exactly.

    Only support bits contribute; the bitstring may be any length that
    covers the support.
    """
    b = as_bit_tuple(bits)
    if h.support and h.support[-1] >= len(b):
        raise ValueError("bitstring shorter than constraint support")
    swing = sum(a if b[j] == 0 else -a for j, a in h.coeffs.items())
    return h.offset - Fraction(swing, 2)


def support_eigenvalue_table(
    h: ConstraintHamiltonian, cap: int = SUPPORT_TABLE_CAP
) -> list[Fraction]:
    """All 2^t eigenvalues indexed by the big-endian support pattern.

    Entry s equals constraint_eigenvalue for any full bitstring whose
    support bits spell s. Cost O(2^t), independent of the system size.
    """
    t = len(h.support)
    if t > cap:
        raise ValueError(f"support size {t} exceeds table cap {cap}")
    weights = [h.coeffs[j] for j in h.support]
    table = []
    for s in range(1 << t):
        swing = 0
        for k, a in enumerate(weights):
            swing += -a if (s >> (t - 1 - k)) & 1 else a
        table.append(h.offset - Fraction(swing, 2))
    return table


@dataclass(frozen=True)
class PenaltySpec:
    """Penalty function choice plus its coefficients.

    kind selects among PENALTY_KINDS; lam is used by step and slack
    penalties, (lam1, lam2) by exponential and unbalanced quadratic.
    slack_bits is filled in when a slack spec is bound to a program.
    """

    kind: str
    lam: Optional[float] = None
    lam1: Optional[float] = None
    lam2: Optional[float] = None
    slack_bits: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        if self.kind not in PENALTY_KINDS:
            raise ValueError(f"unknown penalty kind {self.kind!r}")
        if self.kind in ("step", "slack_quadratic"):
            if self.lam is None or self.lam <= 0:
                raise ValueError(f"{self.kind} penalty needs lam > 0")
        else:
            if self.lam1 is None or self.lam1 <= 0 or self.lam2 is None or self.lam2 <= 0:
                raise ValueError(f"{self.kind} penalty needs lam1, lam2 > 0")
        if self.slack_bits is not None:
            if self.kind != "slack_quadratic":
                raise ValueError("slack_bits only applies to slack_quadratic")
            if any(n < 1 for n in self.slack_bits):
                raise ValueError("each constraint needs at least one slack bit")

    @classmethod
    def step(cls, lam: float) -> "PenaltySpec":
        return cls(kind="step", lam=lam)

    @classmethod
    def exponential(cls, lam1: float, lam2: float) -> "PenaltySpec":
        return cls(kind="exponential", lam1=lam1, lam2=lam2)

    @classmethod
    def unbalanced(cls, lam1: float, lam2: float) -> "PenaltySpec":
        return cls(kind="unbalanced_quadratic", lam1=lam1, lam2=lam2)

    @classmethod
    def slack(cls, lam: float) -> "PenaltySpec":
        return cls(kind="slack_quadratic", lam=lam)

    @property
    def label(self) -> str:
        def fmt(x):
            return str(int(x)) if float(x) == int(x) else str(x)

        if self.kind == "step":
            return f"step(lam={fmt(self.lam)})"
        if self.kind == "exponential":
            return f"exp(lam1={fmt(self.lam1)},lam2={fmt(self.lam2)})"
        if self.kind == "unbalanced_quadratic":
            return f"unbalanced(lam1={fmt(self.lam1)},lam2={fmt(self.lam2)})"
        return f"slack(lam={fmt(self.lam)})"


def penalty_value(spec: PenaltySpec, h_val: Union[Rational, float]) -> float:
    """Penalty xi(h) for one constraint.

    step: lam * [h > 0]; exponential: lam1 * exp(min(lam2*h, EXP_CLAMP));
    unbalanced: lam1*h + lam2*h^2. For slack_quadratic, h_val must already
    include the slack contribution and the value is lam * h^2.
    """
    if spec.kind == "step":
        return float(spec.lam) if h_val > 0 else 0.0
    h = float(h_val)
    if spec.kind == "exponential":
        return spec.lam1 * math.exp(min(spec.lam2 * h, EXP_CLAMP))
    if spec.kind == "unbalanced_quadratic":
        return spec.lam1 * h + spec.lam2 * h * h
    return float(spec.lam) * h * h


@dataclass(frozen=True)
class PenalizedConstraint:
    """One constraint's penalty as a lookup table over its qubits.

    qubits lists the support (plus the constraint's slack block, if any)
    ascending; penalty_table holds the lam-weighted penalty for each
    big-endian pattern over those qubits.
    """

    hamiltonian: ConstraintHamiltonian
    qubits: tuple[int, ...]
    penalty_table: np.ndarray


@dataclass
class DiagonalProblem:
    """A penalized program as a diagonal operator over n_qubits.

    The total eigenvalue at basis state |x> is the minimization-sense
    objective of the first n_vars bits plus the per-constraint penalties.
    """

    n_qubits: int
    n_vars: int
    program: ConstrainedProgram
    penalty: PenaltySpec
    constraints: tuple[PenalizedConstraint, ...]

    def objective_value(self, bits: Bits) -> Rational:
        """Exact minimization-sense objective; slack bits are ignored."""
        b = as_bit_tuple(bits)
        if len(b) != self.n_qubits:
            raise ValueError(f"bit length {len(b)} != n_qubits {self.n_qubits}")
        return self.program.minimization_value(b[: self.n_vars])

    def penalty_sum(self, bits: Bits) -> float:
        """Sum of penalty terms at a basis state."""
        b = as_bit_tuple(bits)
        total = 0.0
        for pc in self.constraints:
            pattern = 0
            for q in pc.qubits:
                pattern = (pattern << 1) | b[q]
            total += float(pc.penalty_table[pattern])
        return total

    def total_value(self, bits: Bits) -> float:
        """Full eigenvalue: objective plus penalties."""
        return float(self.objective_value(bits)) + self.penalty_sum(bits)

    @cached_property
    def objective_table(self) -> np.ndarray:
        """Minimization-sense objective over all 2^n_qubits basis states."""
        n = self.n_qubits
        idx = np.arange(1 << n)
        table = np.full(1 << n, float(self.program.offset))
        for j, c in enumerate(self.program.objective):
            if c:
                table += float(c) * ((idx >> (n - 1 - j)) & 1)
        return table

    @cached_property
    def full_table(self) -> np.ndarray:
        """Objective plus all penalties, over all 2^n_qubits basis states."""
        n = self.n_qubits
        idx = np.arange(1 << n)
        table = self.objective_table.copy()
        for pc in self.constraints:
            t = len(pc.qubits)
            pattern = np.zeros(1 << n, dtype=np.int64)
            for k, q in enumerate(pc.qubits):
                pattern |= ((idx >> (n - 1 - q)) & 1) << (t - 1 - k)
            table += pc.penalty_table[pattern]
        return table


def _penalized(h: ConstraintHamiltonian, spec: PenaltySpec) -> PenalizedConstraint:
    exact = support_eigenvalue_table(h)
    table = np.array([penalty_value(spec, v) for v in exact], dtype=float)
    return PenalizedConstraint(hamiltonian=h, qubits=h.support, penalty_table=table)


def build_custom(p: ConstrainedProgram, spec: PenaltySpec) -> DiagonalProblem:
    """Slack-free formulation with a step or exponential penalty."""
    if spec.kind not in ("step", "exponential"):
        raise ValueError(f"build_custom expects a step or exponential spec, got {spec.kind}")
    constraints = tuple(_penalized(encode_constraint(c), spec) for c in p.constraints)
    return DiagonalProblem(
        n_qubits=p.n_vars, n_vars=p.n_vars, program=p, penalty=spec, constraints=constraints
    )


def build_unbalanced(p: ConstrainedProgram, lam1: float, lam2: float) -> DiagonalProblem:
    """Slack-free quadratic formulation lam1*h + lam2*h^2 per constraint."""
    spec = PenaltySpec.unbalanced(lam1, lam2)
    constraints = tuple(_penalized(encode_constraint(c), spec) for c in p.constraints)
    return DiagonalProblem(
        n_qubits=p.n_vars, n_vars=p.n_vars, program=p, penalty=spec, constraints=constraints
    )


def slack_bit_count(bound: Rational) -> int:
    """Slack bits needed for one constraint: ceil(log2(b + 1))."""
    b = int(bound)
    if b != bound or b < 1:
        raise ValueError(f"slack encoding requires an integer bound >= 1, got {bound}")
    return b.bit_length()


def build_slack(p: ConstrainedProgram, lam: float) -> DiagonalProblem:
    """Slack-variable formulation: lam * (h_i(x) + y_i)^2 per constraint.

    Constraint i gets ceil(log2(b_i + 1)) slack qubits appended after the
    problem qubits in constraint order, big-endian within each block.
    """
    spec = PenaltySpec.slack(lam)
    counts = [slack_bit_count(c.bound) for c in p.constraints]
    n_qubits = p.n_vars + sum(counts)
    constraints = []
    block_start = p.n_vars
    for c, n_slack in zip(p.constraints, counts):
        h = encode_constraint(c)
        t = len(h.support)
        exact = support_eigenvalue_table(h)
        qubits = h.support + tuple(range(block_start, block_start + n_slack))
        table = np.empty(1 << (t + n_slack), dtype=float)
        for s in range(1 << (t + n_slack)):
            y = s & ((1 << n_slack) - 1)
            residual = exact[s >> n_slack] + y
            table[s] = float(lam) * float(residual) ** 2
        constraints.append(
            PenalizedConstraint(hamiltonian=h, qubits=qubits, penalty_table=table)
        )
        block_start += n_slack
    return DiagonalProblem(
        n_qubits=n_qubits,
        n_vars=p.n_vars,
        program=p,
        penalty=replace(spec, slack_bits=tuple(counts)),
        constraints=tuple(constraints),
    )


def build_problem(p: ConstrainedProgram, spec: PenaltySpec) -> DiagonalProblem:
    """Dispatch to the builder matching the spec's penalty kind."""
    if spec.kind in ("step", "exponential"):
        return build_custom(p, spec)
    if spec.kind == "unbalanced_quadratic":
        return build_unbalanced(p, spec.lam1, spec.lam2)
    return build_slack(p, spec.lam)


def upper_bound_lambda(inst: MkpInstance) -> int:
    """Penalty weight separating infeasible states: K times the total value."""
    return inst.K * sum(inst.values)
