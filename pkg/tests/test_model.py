"""Tests for instance generation, program conversion, and the brute-force oracle."""

import itertools
import math

import pytest

from stepvqe.bitstrings import as_bit_tuple, bits_to_index, index_to_bits
from stepvqe.model import (
    BRUTE_FORCE_CAP,
    MAX_INSTANCE_QUBITS,
    ConstrainedProgram,
    LinearConstraint,
    MkpInstance,
    brute_force_solve,
    check_feasible,
    eval_objective,
    generate_instance,
    load_instance,
    save_instance,
    to_program,
)


def test_bit_round_trip():
    assert bits_to_index("010") == 2
    assert index_to_bits(2, 3) == "010"
    assert as_bit_tuple("101") == (1, 0, 1)
    for i in range(16):
        assert bits_to_index(index_to_bits(i, 4)) == i
    with pytest.raises(ValueError):
        as_bit_tuple("012")


class TestGenerateInstance:
    def test_single_item_fits(self):
        inst = generate_instance(1, 1, seed=0)
        assert inst.K == 1 and inst.L == 1
        assert inst.weights[0] <= inst.capacities[0]

    def test_paper_scale_is_twelve_variables(self):
        inst = generate_instance(3, 4, seed=5)
        assert inst.K * inst.L == 12

    def test_deterministic(self):
        assert generate_instance(2, 3, seed=7) == generate_instance(2, 3, seed=7)

    def test_distinct_seeds_differ(self):
        out = {generate_instance(2, 3, seed=s) for s in range(20)}
        assert len(out) > 1

    def test_entry_ranges(self):
        for K in (1, 2, 3):
            for seed in range(10):
                inst = generate_instance(K, 4, seed=seed)
                assert all(1 <= v <= 10 for v in inst.values)
                assert all(1 <= w <= 10 for w in inst.weights)
                lo = max(inst.weights)
                hi = max(lo, math.ceil(0.7 * sum(inst.weights) / K))
                assert all(lo <= c <= hi for c in inst.capacities)

    def test_not_all_packings_feasible(self):
        # the capacity window keeps instances nondegenerate: packing every
        # item into one knapsack must not always be possible
        from stepvqe.model import check_feasible, to_program

        degenerate = 0
        for seed in range(20):
            inst = generate_instance(2, 4, seed=seed)
            p = to_program(inst)
            all_in_first = "1" * inst.L + "0" * inst.L
            degenerate += check_feasible(p, all_in_first)
        assert degenerate < 20

    def test_rejects_budget_overflow(self):
        with pytest.raises(ValueError):
            generate_instance(5, 4, seed=0)  # 20 > 16-qubit instance budget
        with pytest.raises(ValueError):
            generate_instance(0, 2, seed=0)


class TestMkpInstance:
    def test_validation(self):
        with pytest.raises(ValueError):
            MkpInstance(values=(1, 2), weights=(1,), capacities=(3,))
        with pytest.raises(ValueError):
            MkpInstance(values=(0,), weights=(1,), capacities=(3,))
        with pytest.raises(ValueError):
            MkpInstance(values=(), weights=(), capacities=(3,))

    def test_budget(self):
        assert MAX_INSTANCE_QUBITS == 16
        # 4x4 = 16 is allowed, 5x4 is not representable via constructor
        MkpInstance(values=(1,) * 4, weights=(1,) * 4, capacities=(2,) * 4)
        with pytest.raises(ValueError):
            MkpInstance(values=(1,) * 4, weights=(1,) * 4, capacities=(2,) * 5)

    def test_json_round_trip(self, tmp_path):
        inst = generate_instance(2, 3, seed=1)
        path = tmp_path / "inst.json"
        save_instance(inst, path)
        assert load_instance(path) == inst

    def test_from_dict_validates_counts(self):
        d = {"K": 2, "L": 1, "values": [3], "weights": [2], "capacities": [4]}
        with pytest.raises(ValueError):
            MkpInstance.from_dict(d)


class TestToProgram:
    def test_counts(self):
        p = to_program(generate_instance(2, 2, seed=0))
        assert p.n_vars == 4
        assert len(p.constraints) == 4  # K + L

    def test_objective_sign_convention(self):
        inst = MkpInstance(values=(3, 5), weights=(2, 4), capacities=(5,))
        p = to_program(inst)
        assert p.objective == (-3, -5)
        assert p.maximize

    def test_capacity_row_layout(self):
        inst = MkpInstance(values=(1, 1), weights=(2, 3), capacities=(4, 6))
        p = to_program(inst)
        # knapsack 1's capacity row touches only variables 0 and 1
        assert p.constraints[0].support == (0, 1)
        assert p.constraints[0].coeffs == (2, 3, 0, 0)
        assert p.constraints[0].bound == 4
        # assignment row for item 1 touches x_11 and x_21
        assert p.constraints[2].support == (0, 2)
        assert p.constraints[2].bound == 1

    def test_objective_matches_negated_value(self):
        inst = generate_instance(2, 3, seed=4)
        p = to_program(inst)
        for i in range(1 << p.n_vars):
            bits = index_to_bits(i, p.n_vars)
            assert eval_objective(p, bits) == -p.minimization_value(bits)


def _mkp_feasible_direct(inst, bits):
    # independent statement of the knapsack inequalities
    b = as_bit_tuple(bits)
    K, L = inst.K, inst.L
    for i in range(K):
        if sum(inst.weights[j] * b[i * L + j] for j in range(L)) > inst.capacities[i]:
            return False
    for j in range(L):
        if sum(b[i * L + j] for i in range(K)) > 1:
            return False
    return True


class TestFeasibilityAndObjective:
    def test_zero_row_constraint_always_satisfied(self):
        p = ConstrainedProgram(
            n_vars=2,
            objective=(1, 1),
            constraints=(LinearConstraint((0, 0), 3),),
        )
        for i in range(4):
            assert check_feasible(p, index_to_bits(i, 2))

    def test_overweight_single_item(self):
        inst = MkpInstance(values=(1,), weights=(2,), capacities=(1,))
        p = to_program(inst)
        assert not check_feasible(p, "1")
        assert check_feasible(p, "0")

    def test_all_ones_objective(self):
        p = to_program(MkpInstance(values=(3, 5), weights=(1, 1), capacities=(9,)))
        assert eval_objective(p, "11") == 8

    def test_length_mismatch(self):
        p = to_program(generate_instance(1, 2, seed=0))
        with pytest.raises(ValueError):
            check_feasible(p, "1")
        with pytest.raises(ValueError):
            eval_objective(p, "101")

    def test_agrees_with_direct_mkp_inequalities(self):
        for seed in range(10):
            inst = generate_instance(2, 3, seed=seed)
            p = to_program(inst)
            for i in range(1 << p.n_vars):
                bits = index_to_bits(i, p.n_vars)
                assert check_feasible(p, bits) == _mkp_feasible_direct(inst, bits)


class TestBruteForce:
    def test_hand_enumerated_pick_one(self):
        # w=(2,4), W=5: 00 -> 0, 01 -> 5, 10 -> 3, 11 -> weight 6 infeasible
        inst = MkpInstance(values=(3, 5), weights=(2, 4), capacities=(5,))
        sol = brute_force_solve(to_program(inst))
        assert sol.bits == "01"
        assert sol.objective_value == 5
        assert sol.feasible

    def test_hand_enumerated_both_fit(self):
        inst = MkpInstance(values=(3, 5), weights=(1, 1), capacities=(5,))
        sol = brute_force_solve(to_program(inst))
        assert sol.bits == "11"
        assert sol.objective_value == 8

    def test_all_zeros_always_feasible_for_mkp(self):
        for seed in range(5):
            p = to_program(generate_instance(2, 2, seed=seed))
            assert check_feasible(p, "0" * p.n_vars)

    def test_enumeration_cap(self):
        p = ConstrainedProgram(
            n_vars=BRUTE_FORCE_CAP + 1,
            objective=(0,) * (BRUTE_FORCE_CAP + 1),
            constraints=(),
        )
        with pytest.raises(ValueError):
            brute_force_solve(p)

    def test_tie_breaks_to_smallest_index(self):
        # both items identical: 01 and 10 tie at value 5; 01 has smaller index
        inst = MkpInstance(values=(5, 5), weights=(9, 9), capacities=(9,))
        sol = brute_force_solve(to_program(inst))
        assert sol.bits == "01"

    def test_no_feasible_branch(self):
        # infeasible-by-construction program: x_0 >= 1 is violated by 0, and
        # x_0 <= 0 is violated by 1
        p = ConstrainedProgram(
            n_vars=1,
            objective=(1,),
            constraints=(LinearConstraint((-1,), -1), LinearConstraint((1,), 0)),
        )
        sol = brute_force_solve(p)
        assert sol.bits == "0"
        assert not sol.feasible

    def test_oracle_against_independent_enumeration(self):
        for seed in range(8):
            inst = generate_instance(2, 3, seed=100 + seed)
            p = to_program(inst)
            sol = brute_force_solve(p)
            assert sol.feasible
            assert check_feasible(p, sol.bits)
            # no feasible bitstring does strictly better (maximization)
            best = max(
                eval_objective(p, bits)
                for bits in ("".join(c) for c in itertools.product("01", repeat=p.n_vars))
                if check_feasible(p, bits)
            )
            assert sol.objective_value == best

    def test_exact_path_matches_int_path(self):
        from fractions import Fraction

        inst = generate_instance(2, 2, seed=3)
        p = to_program(inst)
        # same program with Fraction data forces the exact fallback
        pf = ConstrainedProgram(
            n_vars=p.n_vars,
            objective=tuple(Fraction(c) for c in p.objective),
            constraints=tuple(
                LinearConstraint(tuple(Fraction(a) for a in c.coeffs), Fraction(c.bound))
                for c in p.constraints
            ),
            offset=Fraction(0),
            maximize=True,
        )
        assert brute_force_solve(p).bits == brute_force_solve(pf).bits
