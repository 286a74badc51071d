"""Constrained binary programs, multiple-knapsack instances, and a brute-force oracle.

Objectives and constraints are kept in exact arithmetic (int / Fraction);
floats only appear once problems are handed to the simulator.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Union

import numpy as np

from .bitstrings import Bits, as_bit_tuple, index_to_bits

Rational = Union[int, Fraction]

#: largest K*L accepted when generating / loading instances
MAX_INSTANCE_QUBITS = 16

#: enumeration limit for the classical oracle
BRUTE_FORCE_CAP = 24


@dataclass(frozen=True)
class LinearConstraint:
    """One inequality row h(x) = coeffs . x - bound <= 0."""

    coeffs: tuple[Rational, ...]
    bound: Rational

    @property
    def support(self) -> tuple[int, ...]:
        """Indices of variables with nonzero coefficient, ascending."""
        return tuple(j for j, a in enumerate(self.coeffs) if a != 0)

    def value(self, bits: Bits) -> Rational:
        """h(bits), exact."""
        b = as_bit_tuple(bits)
        if len(b) != len(self.coeffs):
            raise ValueError(
                f"bit length {len(b)} != constraint width {len(self.coeffs)}"
            )
        return sum(a * x for a, x in zip(self.coeffs, b)) - self.bound

    def satisfied(self, bits: Bits) -> bool:
        return self.value(bits) <= 0


@dataclass(frozen=True)
class ConstrainedProgram:
    """Linear binary program, stored in minimization sense.

    Maximization problems are negated on construction and flagged with
    ``maximize`` so that objective values can be reported in the original
    sense.
    """

    n_vars: int
    objective: tuple[Rational, ...]
    constraints: tuple[LinearConstraint, ...]
    offset: Rational = 0
    maximize: bool = False

    def __post_init__(self):
        if len(self.objective) != self.n_vars:
            raise ValueError("objective length != n_vars")
        for c in self.constraints:
            if len(c.coeffs) != self.n_vars:
                raise ValueError("constraint width != n_vars")

    def minimization_value(self, bits: Bits) -> Rational:
        """Objective in the stored (minimization) sense."""
        b = as_bit_tuple(bits)
        if len(b) != self.n_vars:
            raise ValueError(f"bit length {len(b)} != n_vars {self.n_vars}")
        return sum(c * x for c, x in zip(self.objective, b)) + self.offset


@dataclass(frozen=True)
class MkpInstance:
    """Multiple knapsack problem data: K knapsacks, L items."""

    values: tuple[int, ...]
    weights: tuple[int, ...]
    capacities: tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != len(self.weights):
            raise ValueError("values and weights must have equal length")
        if not self.values or not self.capacities:
            raise ValueError("need at least one item and one knapsack")
        entries = self.values + self.weights + self.capacities
        if any(int(e) != e or e <= 0 for e in entries):
            raise ValueError("values, weights and capacities must be positive integers")
        if self.K * self.L > MAX_INSTANCE_QUBITS:
            raise ValueError(
                f"K*L = {self.K * self.L} exceeds the {MAX_INSTANCE_QUBITS}-qubit instance budget"
            )

    @property
    def K(self) -> int:
        return len(self.capacities)

    @property
    def L(self) -> int:
        return len(self.values)

    def to_dict(self) -> dict:
        return {
            "K": self.K,
            "L": self.L,
            "values": list(self.values),
            "weights": list(self.weights),
            "capacities": list(self.capacities),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MkpInstance":
        inst = cls(
            values=tuple(d["values"]),
            weights=tuple(d["weights"]),
            capacities=tuple(d["capacities"]),
        )
        if "K" in d and d["K"] != inst.K:
            raise ValueError(f"declared K={d['K']} but {inst.K} capacities given")
        if "L" in d and d["L"] != inst.L:
            raise ValueError(f"declared L={d['L']} but {inst.L} items given")
        return inst


@dataclass(frozen=True)
class Solution:
    """A candidate assignment with its recomputed objective and feasibility."""

    bits: str
    objective_value: Rational
    feasible: bool


def generate_instance(K: int, L: int, seed: int) -> MkpInstance:
    """Generate a random MKP instance, deterministic in (K, L, seed).

    Weights and values are uniform integers in [1, 10]. Each capacity is a
    uniform integer in [max(w), max(max(w), ceil(0.7 * sum(w) / K))]: the
    0.7 * sum(w) headroom is split across the K knapsacks so that a single
    item always fits somewhere but packing everything stays nontrivial for
    every K (with per-knapsack headroom, K >= 2 instances degenerate into
    pack-everything problems).
    """
    if K < 1 or L < 1:
        raise ValueError("K and L must be at least 1")
    if K * L > MAX_INSTANCE_QUBITS:
        raise ValueError(
            f"K*L = {K * L} exceeds the {MAX_INSTANCE_QUBITS}-qubit instance budget"
        )
    rng = np.random.default_rng(seed)
    weights = [int(w) for w in rng.integers(1, 11, size=L)]
    values = [int(v) for v in rng.integers(1, 11, size=L)]
    lo = max(weights)
    hi = max(lo, math.ceil(0.7 * sum(weights) / K))
    capacities = [int(c) for c in rng.integers(lo, hi + 1, size=K)]
    return MkpInstance(
        values=tuple(values), weights=tuple(weights), capacities=tuple(capacities)
    )


def to_program(inst: MkpInstance) -> ConstrainedProgram:
    """Convert an MKP instance to a minimization program.

    Variable x_ij (item j in knapsack i) lives at index i*L + j, row-major.
    The K capacity rows come first, then the L assignment rows.
    """
    K, L = inst.K, inst.L
    n = K * L
    objective = tuple(-inst.values[j] for i in range(K) for j in range(L))
    constraints = []
    for i in range(K):
        coeffs = [0] * n
        for j in range(L):
            coeffs[i * L + j] = inst.weights[j]
        constraints.append(LinearConstraint(tuple(coeffs), inst.capacities[i]))
    for j in range(L):
        coeffs = [0] * n
        for i in range(K):
            coeffs[i * L + j] = 1
        constraints.append(LinearConstraint(tuple(coeffs), 1))
    return ConstrainedProgram(
        n_vars=n,
        objective=objective,
        constraints=tuple(constraints),
        offset=0,
        maximize=True,
    )


def check_feasible(p: ConstrainedProgram, bits: Bits) -> bool:
    """True iff every constraint satisfies h_i(bits) <= 0."""
    b = as_bit_tuple(bits)
    if len(b) != p.n_vars:
        raise ValueError(f"bit length {len(b)} != n_vars {p.n_vars}")
    return all(c.satisfied(b) for c in p.constraints)


def eval_objective(p: ConstrainedProgram, bits: Bits) -> Rational:
    """Objective in the original sense (un-negated for maximization input)."""
    v = p.minimization_value(bits)
    return -v if p.maximize else v


def _all_integer(p: ConstrainedProgram) -> bool:
    nums = list(p.objective) + [p.offset]
    for c in p.constraints:
        nums.extend(c.coeffs)
        nums.append(c.bound)
    return all(isinstance(x, int) or (isinstance(x, Fraction) and x.denominator == 1) for x in nums)


def brute_force_solve(p: ConstrainedProgram) -> Solution:
    """Enumerate all bitstrings and return the best feasible solution.

    Best means the optimal original-sense objective; ties go to the
    smallest basis index (big-endian). If nothing is feasible, the
    all-zeros assignment is returned with its actual feasibility flag.
    """
    n = p.n_vars
    if n > BRUTE_FORCE_CAP:
        raise ValueError(f"n_vars = {n} exceeds enumeration cap {BRUTE_FORCE_CAP}")
    if _all_integer(p):
        best_idx = _brute_force_int(p)
    else:
        best_idx = _brute_force_exact(p)
    if best_idx is None:
        zeros = "0" * n
        return Solution(zeros, eval_objective(p, zeros), check_feasible(p, zeros))
    bits = index_to_bits(best_idx, n)
    return Solution(bits, eval_objective(p, bits), True)


def _brute_force_int(p: ConstrainedProgram):
    # vectorized path: exact in int64 for integer data at this scale
    n = p.n_vars
    idx = np.arange(1 << n, dtype=np.int64)
    bit_cols = [(idx >> (n - 1 - j)) & 1 for j in range(n)]
    feasible = np.ones(1 << n, dtype=bool)
    for c in p.constraints:
        h = -np.int64(c.bound) * np.ones(1 << n, dtype=np.int64)
        for j, a in enumerate(c.coeffs):
            if a:
                h += np.int64(a) * bit_cols[j]
        feasible &= h <= 0
    if not feasible.any():
        return None
    obj = np.full(1 << n, int(p.offset), dtype=np.int64)
    for j, cj in enumerate(p.objective):
        if cj:
            obj += np.int64(cj) * bit_cols[j]
    cand = np.nonzero(feasible)[0]
    vals = obj[cand]
    pick = np.argmin(vals)  # first minimum = smallest basis index
    return int(cand[pick])


def _brute_force_exact(p: ConstrainedProgram):
    best_idx = None
    best_val = None
    n = p.n_vars
    for i in range(1 << n):
        bits = index_to_bits(i, n)
        if not check_feasible(p, bits):
            continue
        v = p.minimization_value(bits)
        if best_val is None or v < best_val:
            best_idx, best_val = i, v
    return best_idx


def load_instance(path: Union[str, Path]) -> MkpInstance:
    """Read an instance from its JSON file format."""
    with open(path) as f:
        return MkpInstance.from_dict(json.load(f))


def save_instance(inst: MkpInstance, path: Union[str, Path]) -> None:
    """Write an instance as JSON (inverse of load_instance)."""
    with open(path, "w") as f:
        json.dump(inst.to_dict(), f, indent=2)
        f.write("\n")
