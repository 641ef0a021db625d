"""
Unit tests for spin operators, spherical tensors and superoperators.
"""

import math

import numpy as np
import pytest

from bell_decoherence.core.exceptions import InvalidLabelError, NotADensityMatrixError
from bell_decoherence.core.interfaces import Basis, BellState
from bell_decoherence.core.operator_algebra import (
    COUPLED_LABELS, IDENTITY, PRODUCT_LABELS, SPIN_HALF, CoupledLabel, ProductLabel,
    apply_superoperator, bell_state, check_density_matrix, commutator_superoperator,
    coupled_tensor, decompose, format_operator, from_kronecker, is_density_matrix,
    parse_operator, partial_trace, product_tensor, purity, spherical_tensor,
    spin_operators, tensor_operator, to_kronecker, total_spin_squared_superoperator,
)


def _commutator(a, b):
    return a @ b - b @ a


class TestSpinOperators:
    """Spin matrices and single-qubit tensors."""

    def test_spin_commutation(self):
        """[Jx, Jy] = i Jz on each qubit."""
        for qubit in (1, 2):
            jx, jy, jz = spin_operators(qubit)
            np.testing.assert_allclose(_commutator(jx, jy), 1j * jz, atol=1e-15)

    def test_qubits_commute(self):
        """Operators on different qubits commute."""
        for a in spin_operators(1):
            for b in spin_operators(2):
                np.testing.assert_allclose(_commutator(a, b), 0, atol=1e-15)

    def test_invalid_qubit(self):
        """Qubit indices other than 1 and 2 are rejected."""
        with pytest.raises(ValueError):
            spin_operators(3)

    def test_spherical_tensor_jz_eigen(self):
        """[Jz, T1m] = m T1m."""
        jz = SPIN_HALF[2]
        for m in (1, 0, -1):
            tensor = spherical_tensor(1, m)
            np.testing.assert_allclose(_commutator(jz, tensor), m * tensor, atol=1e-15)

    def test_ladder_relation(self):
        """[J+, T1-1] = sqrt(2) T10 and [J-, T11] = sqrt(2) T10."""
        j_plus = SPIN_HALF[0] + 1j * SPIN_HALF[1]
        j_minus = SPIN_HALF[0] - 1j * SPIN_HALF[1]
        np.testing.assert_allclose(_commutator(j_plus, spherical_tensor(1, -1)),
                                   math.sqrt(2) * spherical_tensor(1, 0), atol=1e-15)
        np.testing.assert_allclose(_commutator(j_minus, spherical_tensor(1, 1)),
                                   math.sqrt(2) * spherical_tensor(1, 0), atol=1e-15)
        np.testing.assert_allclose(_commutator(j_plus, spherical_tensor(1, 1)), 0, atol=1e-15)

    def test_invalid_tensor_label(self):
        """|m| > l is rejected."""
        with pytest.raises(InvalidLabelError):
            spherical_tensor(1, 2)
        with pytest.raises(InvalidLabelError):
            ProductLabel(0, 1, 1, 0)
        with pytest.raises(InvalidLabelError):
            CoupledLabel(1, 2)


class TestTensorBases:
    """Product and coupled tensor bases."""

    def test_basis_sizes(self):
        """Both bases span the 16-dimensional operator space."""
        assert len(PRODUCT_LABELS) == 16
        assert len(COUPLED_LABELS) == 16

    @pytest.mark.parametrize("basis", [Basis.PRODUCT, Basis.COUPLED])
    def test_orthogonality(self, basis):
        """Tensors of one basis are Hilbert-Schmidt orthogonal."""
        labels = PRODUCT_LABELS if basis == Basis.PRODUCT else COUPLED_LABELS
        vectors = np.array([tensor_operator(label).reshape(16) for label in labels])
        gram = vectors.conj() @ vectors.T
        np.testing.assert_allclose(gram - np.diag(np.diag(gram)), 0, atol=1e-14)
        assert np.all(np.abs(np.diag(gram)) > 0)

    @pytest.mark.parametrize("basis", [Basis.PRODUCT, Basis.COUPLED])
    def test_decompose_recompose(self, basis, rng):
        """Decomposition followed by recomposition reproduces the operator."""
        op = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        np.testing.assert_allclose(decompose(op, basis).recompose(), op, atol=1e-12)

    def test_singlet_is_scalar(self, bell_states):
        """Psi- has no rank-1 or rank-2 coupled components besides T00(11)."""
        coefficients = decompose(bell_states[BellState.PSI_MINUS], Basis.COUPLED).nonzero()
        assert set(coefficients) == {IDENTITY, CoupledLabel(0, 0)}
        assert coefficients[IDENTITY] == pytest.approx(0.25)

    @pytest.mark.parametrize("state, label, expected", [
        (BellState.PSI_MINUS, CoupledLabel(0, 0), math.sqrt(3)),
        (BellState.PSI_PLUS, CoupledLabel(2, 0), -2 * math.sqrt(2 / 3)),
        (BellState.PHI_PLUS, CoupledLabel(2, 2), 1.0),
        (BellState.PHI_PLUS, CoupledLabel(2, -2), 1.0),
        (BellState.PHI_MINUS, CoupledLabel(2, 2), -1.0),
        (BellState.PHI_MINUS, CoupledLabel(2, -2), -1.0),
    ])
    def test_bell_coupled_coefficients(self, bell_states, state, label, expected):
        """Characteristic coupled-basis coefficient of each Bell state."""
        coefficients = decompose(bell_states[state], Basis.COUPLED)
        assert coefficients[label] == pytest.approx(expected, abs=1e-12)
        assert coefficients[IDENTITY] == pytest.approx(0.25, abs=1e-12)

    def test_coupled_tensors_total_m(self):
        """Coupled tensors of total projection M satisfy [Jz, T] = M T."""
        jz = spin_operators(1)[2] + spin_operators(2)[2]
        for L in (0, 1, 2):
            for M in range(-L, L + 1):
                tensor = coupled_tensor(L, M)
                np.testing.assert_allclose(_commutator(jz, tensor), M * tensor, atol=1e-14)

    def test_total_spin_squared_on_coupled(self):
        """J^2 superoperator gives L(L+1) on coupled tensors."""
        j_squared = total_spin_squared_superoperator()
        for L in (0, 1, 2):
            tensor = coupled_tensor(L, 0)
            np.testing.assert_allclose(apply_superoperator(j_squared, tensor),
                                       L * (L + 1) * tensor, atol=1e-13)

    def test_product_tensor_shortcut(self):
        """product_tensor builds the same operator as the label."""
        np.testing.assert_array_equal(product_tensor(1, 1, 1, -1),
                                      tensor_operator(ProductLabel(1, 1, 1, -1)))


class TestStates:
    """Bell states and density-matrix checks."""

    def test_bell_states_are_pure(self, bell_states):
        """Bell states are unit-trace pure states."""
        for rho in bell_states.values():
            assert is_density_matrix(rho)
            assert purity(rho) == pytest.approx(1.0)

    def test_bell_states_maximally_mixed_marginals(self, bell_states):
        """Each qubit of a Bell state is maximally mixed."""
        for rho in bell_states.values():
            for keep in (1, 2):
                np.testing.assert_allclose(partial_trace(rho, keep), np.eye(2) / 2, atol=1e-15)

    def test_singlet_in_kronecker_order(self):
        """Psi- = (|ud> - |du>)/sqrt(2) in the (uu, ud, du, dd) ordering."""
        standard = to_kronecker(bell_state("psi-"))
        assert standard[1, 1] == pytest.approx(0.5)
        assert standard[1, 2] == pytest.approx(-0.5)
        np.testing.assert_allclose(from_kronecker(standard), bell_state("psi-"))

    def test_label_aliases(self):
        """Short and Greek labels are accepted."""
        np.testing.assert_array_equal(bell_state("Φ+"), bell_state(BellState.PHI_PLUS))
        with pytest.raises(InvalidLabelError):
            bell_state("chi+")

    def test_rejects_non_density_matrix(self):
        """Non-Hermitian, wrong-trace and negative operators are rejected."""
        with pytest.raises(NotADensityMatrixError):
            check_density_matrix(np.eye(4))
        with pytest.raises(NotADensityMatrixError):
            check_density_matrix(np.diag([1.5, -0.5, 0, 0]))
        op = np.eye(4) / 4
        op[0, 1] = 0.1
        with pytest.raises(NotADensityMatrixError):
            check_density_matrix(op)
        with pytest.raises(ValueError):
            check_density_matrix(np.eye(3) / 3)

    def test_dump_format(self, bell_states):
        """Matrices survive the text dump format exactly."""
        rho = bell_states[BellState.PHI_MINUS]
        text = format_operator(rho)
        assert text.startswith("# basis: ud du uu dd\n")
        np.testing.assert_array_equal(parse_operator(text), rho)


class TestSuperoperators:
    """Vectorized commutators."""

    def test_commutator_superoperator(self, rng):
        """The superoperator of [H, .] acts as the commutator."""
        h = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        np.testing.assert_allclose(apply_superoperator(commutator_superoperator(h), a),
                                   _commutator(h, a), atol=1e-12)
