import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

import oracle
from conftest import make_setup
from thermalops.accounting import mutual_information, von_neumann_entropy
from thermalops.errors import DimensionMismatch, NotEnergyPreserving, NotResonant, NotUnitary
from thermalops.linalg import commutator_norm, tensor_product
from thermalops.states import BipartiteSetup, DensityMatrix
from thermalops.thermal_ops import (
    ThermalOperation,
    apply_general_unitary,
    apply_to,
    check_time_translation_covariance,
    partial_swap_unitary,
    random_energy_preserving_unitary,
    random_unitary,
)

SWAP = np.eye(4)[[0, 2, 1, 3]]


class TestRandomEnergyPreserving:
    def test_nondegenerate_is_diagonal_phases(self):
        setup = BipartiteSetup.from_energies([0.0, 1.0], [0.0, 0.37], 1.0)
        u = random_energy_preserving_unitary(setup, 4).u
        assert_allclose(u - np.diag(np.diag(u)), 0, atol=1e-15)
        assert_allclose(np.abs(np.diag(u)), 1, atol=1e-14)

    def test_resonant_qubits_block(self, qubits):
        u = random_energy_preserving_unitary(qubits, 9).u
        mask = np.ones((4, 4), bool)
        mask[1:3, 1:3] = False
        mask[0, 0] = mask[3, 3] = False
        assert np.all(u[mask] == 0)
        block = u[1:3, 1:3]
        assert_allclose(block.conj().T @ block, np.eye(2), atol=1e-14)
        assert abs(block[0, 1]) > 1e-3

    def test_seed_determinism(self, qubits):
        a = random_energy_preserving_unitary(qubits, 123).u
        b = random_energy_preserving_unitary(qubits, 123).u
        c = random_energy_preserving_unitary(qubits, 124).u
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_large_and_negative_seeds(self, qubits):
        random_energy_preserving_unitary(qubits, 2**64 - 1)
        random_energy_preserving_unitary(qubits, -5)

    @pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 3), (2, 4)])
    def test_invariants(self, dims):
        setup = make_setup(dims, beta=0.8)
        for seed in range(10):
            op = random_energy_preserving_unitary(setup, seed)
            assert op.unitarity_error <= 1e-9
            assert commutator_norm(op.u, setup.h_total.matrix) <= 1e-9

    def test_rejects_non_commuting(self, qubits):
        with pytest.raises(NotEnergyPreserving):
            ThermalOperation(qubits, random_unitary(4, 0))

    def test_rejects_non_unitary(self, qubits):
        with pytest.raises(NotUnitary):
            ThermalOperation(qubits, 2 * np.eye(4))


class TestPartialSwap:
    def test_theta_zero(self, qubits):
        assert_allclose(partial_swap_unitary(qubits, 0.0).u, np.eye(4))

    def test_full_swap(self, qubits):
        rho = DensityMatrix(np.array([[0.7, 0.1 + 0.2j], [0.1 - 0.2j, 0.3]]))
        out = apply_to(partial_swap_unitary(qubits, math.pi / 2), rho)
        assert_allclose(out.rho_s_prime.matrix, qubits.gamma_b.matrix, atol=1e-15)
        assert_allclose(out.rho_b_prime.matrix, rho.matrix, atol=1e-15)
        assert_allclose(out.rho_sb_prime.matrix, tensor_product(qubits.gamma_b, rho), atol=1e-15)

    def test_quarter_swap_against_dense(self, qubits):
        theta = math.pi / 4
        c, s = math.cos(theta), math.sin(theta)
        u_hand = c * np.eye(4) - 1j * s * SWAP
        rho = np.diag([1.0, 0.0]).astype(complex)
        expected = u_hand @ oracle.kron(rho, oracle.gibbs([0, 1], 1.0)) @ u_hand.conj().T
        out = apply_to(partial_swap_unitary(qubits, theta), DensityMatrix(rho))
        assert_allclose(out.rho_sb_prime.matrix, expected, atol=1e-15)
        p1 = math.exp(-1) / (1 + math.exp(-1))
        assert abs(out.rho_sb_prime.matrix[1, 2]) == pytest.approx(c * s * p1, abs=1e-15)

    def test_qutrits(self):
        setup = make_setup((3, 3))
        op = partial_swap_unitary(setup, 0.3)
        assert commutator_norm(op.u, setup.h_total.matrix) <= 1e-9

    def test_not_resonant(self):
        with pytest.raises(NotResonant):
            partial_swap_unitary(BipartiteSetup.from_energies([0.0, 1.0], [0.0, 1.1], 1.0), 0.2)
        with pytest.raises(NotResonant):
            partial_swap_unitary(make_setup((2, 3)), 0.2)


class TestApplyTO:
    def test_identity(self, qubits, plus):
        out = apply_to(ThermalOperation.identity(qubits), plus)
        assert_allclose(out.rho_sb_prime.matrix, tensor_product(plus, qubits.gamma_b))
        assert_allclose(out.rho_s_prime.matrix, plus.matrix)
        assert_allclose(out.rho_b_prime.matrix, qubits.gamma_b.matrix)

    @pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 3), (2, 4)])
    def test_gibbs_fixed_point(self, dims):
        setup = make_setup(dims, beta=1.4)
        for seed in range(5):
            out = apply_to(random_energy_preserving_unitary(setup, seed), setup.gamma_s)
            assert np.max(np.abs(out.rho_s_prime.matrix - setup.gamma_s.matrix)) <= 1e-9
        out = apply_to(partial_swap_unitary(make_setup((2, 2)), 0.6), make_setup((2, 2)).gamma_s)
        assert np.max(np.abs(out.rho_s_prime.matrix - out.setup.gamma_s.matrix)) <= 1e-9

    def test_against_dense_oracle(self, qubits):
        op = random_energy_preserving_unitary(qubits, 31)
        rho = np.diag([0.9, 0.1]).astype(complex)
        out = apply_to(op, DensityMatrix(rho))
        expected = op.u @ oracle.kron(rho, oracle.gibbs([0, 1], 1.0)) @ op.u.conj().T
        assert np.max(np.abs(out.rho_sb_prime.matrix - expected)) <= 1e-10
        assert np.max(np.abs(out.rho_s_prime.matrix - oracle.ptrace(expected, 2, 2, "S"))) <= 1e-10
        assert np.max(np.abs(out.rho_b_prime.matrix - oracle.ptrace(expected, 2, 2, "B"))) <= 1e-10

    def test_dimension_mismatch(self, qubits):
        with pytest.raises(DimensionMismatch):
            apply_to(ThermalOperation.identity(qubits), DensityMatrix.maximally_mixed(3))

    def test_energy_conservation(self, scenarios200):
        for setup, op, rho, out in scenarios200:
            h = setup.h_total.matrix
            e_in = np.trace(h @ tensor_product(rho, setup.gamma_b)).real
            e_out = np.trace(h @ out.rho_sb_prime.matrix).real
            assert abs(e_in - e_out) <= 1e-9


class TestApplyGeneralUnitary:
    def test_identity(self, qubits, plus):
        rho_b = DensityMatrix.random_mixed(2, 1)
        out = apply_general_unitary(qubits, np.eye(4), plus, rho_b)
        assert_allclose(out.rho_sb_prime.matrix, tensor_product(plus, rho_b), atol=1e-15)

    def test_swap(self, qubits, plus):
        rho_b = DensityMatrix.random_mixed(2, 1)
        out = apply_general_unitary(qubits, SWAP, plus, rho_b)
        assert_allclose(out.rho_s_prime.matrix, rho_b.matrix, atol=1e-15)
        assert_allclose(out.rho_b_prime.matrix, plus.matrix, atol=1e-15)

    def test_haar_entropy_identity(self, qubits):
        for seed in range(10):
            rho_s = DensityMatrix.random_mixed(2, seed)
            rho_b = DensityMatrix.random_mixed(2, seed + 100)
            out = apply_general_unitary(qubits, random_unitary(4, seed), rho_s, rho_b)
            d_s = von_neumann_entropy(out.rho_s_prime) - von_neumann_entropy(rho_s)
            d_b = von_neumann_entropy(out.rho_b_prime) - von_neumann_entropy(rho_b)
            assert d_s + d_b == pytest.approx(mutual_information(out.rho_sb_prime, (2, 2)), abs=1e-9)
            total_in = von_neumann_entropy(rho_s) + von_neumann_entropy(rho_b)
            assert von_neumann_entropy(out.rho_sb_prime) == pytest.approx(total_in, abs=1e-9)

    def test_not_unitary(self, qubits, plus):
        with pytest.raises(NotUnitary):
            apply_general_unitary(qubits, np.ones((4, 4)), plus, qubits.gamma_b)

    def test_dimension_mismatch(self, qubits, plus):
        with pytest.raises(DimensionMismatch):
            apply_general_unitary(qubits, np.eye(4), plus, DensityMatrix.maximally_mixed(3))


class TestCovariance:
    def test_identity(self, qubits, plus):
        assert check_time_translation_covariance(ThermalOperation.identity(qubits), plus, 1.3).deviation <= 1e-15

    def test_diagonal_input(self):
        setup = make_setup((2, 3))
        op = random_energy_preserving_unitary(setup, 2)
        rho = DensityMatrix.diagonal([0.8, 0.2])
        res = check_time_translation_covariance(op, rho, 2.1)
        assert res.passed and res.deviation <= 1e-9
        assert_allclose(op(rho).matrix, apply_to(op, rho).rho_s_prime.matrix)

    def test_partial_swap_plus(self, qubits, plus):
        res = check_time_translation_covariance(partial_swap_unitary(qubits, 0.4), plus, 0.7)
        assert res.passed and res.deviation <= 1e-9

    def test_random_triples(self):
        rng = np.random.default_rng(2024)
        dims = [(2, 2), (2, 3), (3, 3), (2, 4)]
        for k in range(100):
            setup = make_setup(dims[k % 4], beta=float(rng.uniform(0.1, 3)))
            op = random_energy_preserving_unitary(setup, k)
            rho = DensityMatrix.random_mixed(setup.ds, 500 + k)
            assert check_time_translation_covariance(op, rho, float(rng.uniform(0, 20)), tol=1e-8).passed

    def test_fails_for_non_covariant_channel(self, qubits, plus):
        # bypass validation with a unitary that does not commute with H_total
        op = ThermalOperation.identity(qubits)
        op.u = random_unitary(4, 3)
        assert not check_time_translation_covariance(op, plus, 0.9).passed
