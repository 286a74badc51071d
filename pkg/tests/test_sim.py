"""Tests for the statevector simulator."""

import numpy as np
import pytest

from stepvqe.ising import encode_constraint, support_eigenvalue_table
from stepvqe.model import LinearConstraint
from stepvqe.sim import (
    AnsatzSpec,
    MAX_QUBITS,
    Statevector,
    apply_cz,
    apply_ry,
    expectation_diagonal,
    marginal_probabilities,
    prepare_state,
    probabilities,
)


def uniform_state(n):
    amps = np.full(1 << n, 1.0 / np.sqrt(1 << n), dtype=complex)
    return Statevector(amps=amps, n_qubits=n)


class TestAnsatzSpec:
    def test_param_count(self):
        assert AnsatzSpec(5).n_params == 10

    def test_cz_chain(self):
        assert AnsatzSpec(4).cz_pairs == ((0, 1), (1, 2), (2, 3))
        assert AnsatzSpec(1).cz_pairs == ()

    def test_cap(self):
        with pytest.raises(ValueError):
            AnsatzSpec(MAX_QUBITS + 1)
        with pytest.raises(ValueError):
            AnsatzSpec(0)


class TestPrepareState:
    def test_identity_circuit(self):
        s = prepare_state(AnsatzSpec(1), [0.0, 0.0])
        np.testing.assert_allclose(s.amps, [1, 0], atol=1e-15)

    def test_pi_rotation_gives_one(self):
        s = prepare_state(AnsatzSpec(1), [np.pi, 0.0])
        np.testing.assert_allclose(np.abs(s.amps), [0, 1], atol=1e-15)

    def test_two_qubit_hand_calculation(self):
        # first layer at pi/2 gives the uniform positive superposition,
        # CZ negates |11>, final layer is the identity
        s = prepare_state(AnsatzSpec(2), [np.pi / 2, np.pi / 2, 0.0, 0.0])
        np.testing.assert_allclose(s.amps, [0.5, 0.5, 0.5, -0.5], atol=1e-15)

    def test_param_count_mismatch(self):
        with pytest.raises(ValueError):
            prepare_state(AnsatzSpec(2), [0.0, 0.0])

    def test_determinism_bit_identical(self):
        rng = np.random.default_rng(0)
        theta = rng.uniform(-np.pi, np.pi, 8)
        a = prepare_state(AnsatzSpec(4), theta).amps
        b = prepare_state(AnsatzSpec(4), theta).amps
        assert np.array_equal(a, b)


class TestGates:
    def test_norm_preserved_under_random_gates(self):
        rng = np.random.default_rng(42)
        s = prepare_state(AnsatzSpec(5), rng.uniform(-np.pi, np.pi, 10))
        for _ in range(500):
            if rng.random() < 0.5:
                apply_ry(s, int(rng.integers(5)), float(rng.uniform(-np.pi, np.pi)))
            else:
                q1, q2 = rng.choice(5, size=2, replace=False)
                apply_cz(s, int(q1), int(q2))
            assert abs(s.norm() - 1.0) < 1e-12

    def test_ry_inverse_restores(self):
        rng = np.random.default_rng(7)
        s = prepare_state(AnsatzSpec(3), rng.uniform(-np.pi, np.pi, 6))
        before = s.amps.copy()
        apply_ry(s, 1, 0.8123)
        apply_ry(s, 1, -0.8123)
        np.testing.assert_allclose(s.amps, before, atol=1e-12)

    def test_cz_involution(self):
        rng = np.random.default_rng(8)
        s = prepare_state(AnsatzSpec(3), rng.uniform(-np.pi, np.pi, 6))
        before = s.amps.copy()
        apply_cz(s, 0, 2)
        apply_cz(s, 0, 2)
        np.testing.assert_allclose(s.amps, before, atol=1e-15)

    def test_cz_sign_pattern(self):
        s = uniform_state(2)
        apply_cz(s, 0, 1)
        np.testing.assert_allclose(s.amps, [0.5, 0.5, 0.5, -0.5], atol=1e-15)


class TestProbabilities:
    def test_ground_state(self):
        p = probabilities(Statevector.zero(3))
        assert p[0] == 1.0
        assert p[1:].sum() == 0.0

    def test_uniform(self):
        np.testing.assert_allclose(probabilities(uniform_state(2)), [0.25] * 4, atol=1e-15)

    def test_hand_calculated_state(self):
        s = prepare_state(AnsatzSpec(2), [np.pi / 2, np.pi / 2, 0.0, 0.0])
        np.testing.assert_allclose(probabilities(s), [0.25] * 4, atol=1e-15)

    def test_sums_to_one(self):
        rng = np.random.default_rng(3)
        for n in (1, 3, 6):
            s = prepare_state(AnsatzSpec(n), rng.uniform(-np.pi, np.pi, 2 * n))
            assert abs(probabilities(s).sum() - 1.0) < 1e-10


class TestMarginals:
    def test_full_support_is_identity(self):
        rng = np.random.default_rng(5)
        s = prepare_state(AnsatzSpec(3), rng.uniform(-np.pi, np.pi, 6))
        np.testing.assert_allclose(
            marginal_probabilities(s, [0, 1, 2]), probabilities(s), atol=1e-15
        )

    def test_uniform_half(self):
        np.testing.assert_allclose(
            marginal_probabilities(uniform_state(2), [0]), [0.5, 0.5], atol=1e-15
        )

    def test_conservation(self):
        rng = np.random.default_rng(6)
        s = prepare_state(AnsatzSpec(5), rng.uniform(-np.pi, np.pi, 10))
        for support in ([0], [1, 3], [4, 2, 0]):
            assert abs(marginal_probabilities(s, support).sum() - 1.0) < 1e-10

    def test_support_order_respected(self):
        # a state concentrated on |01...>: marginal over (0, 1) vs (1, 0)
        s = prepare_state(AnsatzSpec(2), [0.0, np.pi, 0.0, 0.0])  # |01>
        np.testing.assert_allclose(marginal_probabilities(s, [0, 1]), [0, 1, 0, 0], atol=1e-15)
        np.testing.assert_allclose(marginal_probabilities(s, [1, 0]), [0, 0, 1, 0], atol=1e-15)

    def test_validation(self):
        s = Statevector.zero(2)
        with pytest.raises(ValueError):
            marginal_probabilities(s, [0, 0])
        with pytest.raises(ValueError):
            marginal_probabilities(s, [2])


class TestExpectationDiagonal:
    def test_constant(self):
        rng = np.random.default_rng(9)
        s = prepare_state(AnsatzSpec(3), rng.uniform(-np.pi, np.pi, 6))
        assert expectation_diagonal(s, lambda bits: 2.5) == pytest.approx(2.5, abs=1e-12)

    def test_ground_state_reads_first_entry(self):
        s = Statevector.zero(2)
        table = np.array([3.25, -1.0, 4.0, 9.0])
        assert expectation_diagonal(s, table) == 3.25

    def test_uniform_state_averages_support_table(self):
        # <h> on the uniform 2-qubit state is the mean of the support table,
        # which equals the constraint offset since <Z> = 0
        h = encode_constraint(LinearConstraint((2, 3), 4))
        table = support_eigenvalue_table(h)
        got = expectation_diagonal(
            uniform_state(2), [float(v) for v in table]
        )
        assert got == pytest.approx(-1.5, abs=1e-12)
        assert got == pytest.approx(float(h.offset), abs=1e-12)

    def test_marginal_contraction_agrees_with_full(self):
        # Theorem-1 evaluation path: support marginal . support table
        rng = np.random.default_rng(11)
        c = LinearConstraint((0, 2, 0, 3, 0), 4)
        h = encode_constraint(c)
        table = np.array([float(v) for v in support_eigenvalue_table(h)])
        for _ in range(20):
            s = prepare_state(AnsatzSpec(5), rng.uniform(-np.pi, np.pi, 10))
            full = expectation_diagonal(s, lambda bits: float(c.value(bits)))
            marg = float(marginal_probabilities(s, h.support) @ table)
            assert marg == pytest.approx(full, abs=1e-9)
