"""Tests for operator-valued forms and the graded bracket."""

import pytest

from core.exceptions import NonPolynomialCoefficientError, RingMismatchError
from formal.algebra import GaussianRing, MatrixRing
from formal.forms import (
    OperatorForm,
    ParameterPolynomial,
    curvature,
    exterior_d,
    random_form,
    run_identity_trials,
    wedge_bracket,
    wedge_product,
)
from formal.scalars import ONE, ZERO, random_gaussian

SCALARS = GaussianRing()


class TestParameterPolynomial:
    """Test polynomial coefficients."""

    def test_derivative(self):
        """Test d/dx1 of x1^2 x2."""
        poly = ParameterPolynomial.from_expression("x1**2*x2", 2)
        assert poly.derivative(0) == ParameterPolynomial.from_expression("2*x1*x2", 2)
        assert poly.derivative(1) == ParameterPolynomial.from_expression("x1**2", 2)

    def test_rejects_non_polynomial(self):
        """Test that 1/x1 is not accepted as a coefficient."""
        with pytest.raises(NonPolynomialCoefficientError):
            ParameterPolynomial.from_expression("1/x1", 2)

    def test_rejects_negative_exponent(self):
        """Test that exponent vectors are validated."""
        with pytest.raises(NonPolynomialCoefficientError):
            ParameterPolynomial(SCALARS, 2, {(-1, 0): ONE})


class TestForms:
    """Test wedge products, d and the bracket."""

    def test_d_squared_vanishes(self, rng):
        """Test d d phi = 0 on a random 1-form."""
        phi = random_form(rng, SCALARS, 3, 1, random_gaussian)
        assert exterior_d(exterior_d(phi)).is_zero()

    def test_curvature_of_abelian_connection(self):
        """Test that x1 dx2 has curvature dx1 ^ dx2."""
        connection = OperatorForm(1, 2, SCALARS, {(1,): ParameterPolynomial.from_expression("x1", 2)})
        expected = OperatorForm.constant(SCALARS, 2, 2, {(0, 1): ONE})
        assert curvature(connection) == expected

    def test_wedge_sign(self):
        """Test dx2 ^ dx1 = -dx1 ^ dx2."""
        dx1 = OperatorForm.constant(SCALARS, 2, 1, {(0,): ONE})
        dx2 = OperatorForm.constant(SCALARS, 2, 1, {(1,): ONE})
        assert wedge_product(dx2, dx1) == -wedge_product(dx1, dx2)

    def test_matrix_bracket_of_one_forms(self):
        """Test [A ^ A] = 2 [A_1, A_2] dx1 ^ dx2 for a matrix 1-form."""
        ring = MatrixRing(2)
        x = ring.from_entries([[ZERO, ONE], [ZERO, ZERO]])
        y = ring.from_entries([[ZERO, ZERO], [ONE, ZERO]])
        A = OperatorForm.constant(ring, 2, 1, {(0,): x, (1,): y})
        bracket = ring.sub(ring.mul(x, y), ring.mul(y, x))
        expected = OperatorForm.constant(ring, 2, 2, {(0, 1): ring.add(bracket, bracket)})
        assert wedge_bracket(A, A) == expected

    def test_degree_above_dimension(self):
        """Test that a product past the top degree is the zero form."""
        dx1 = OperatorForm.constant(SCALARS, 1, 1, {(0,): ONE})
        assert wedge_product(dx1, dx1).is_zero()

    def test_bad_index(self):
        """Test that components need increasing indices."""
        with pytest.raises(ValueError):
            OperatorForm.constant(SCALARS, 2, 2, {(1, 0): ONE})

    def test_ring_mismatch(self):
        """Test that forms over different rings cannot be added."""
        scalar = OperatorForm.constant(SCALARS, 2, 1, {(0,): ONE})
        matrix = OperatorForm.constant(MatrixRing(2), 2, 1, {(0,): MatrixRing(2).one})
        with pytest.raises(RingMismatchError):
            scalar + matrix


class TestGradedIdentities:
    """Test the graded identities on random forms."""

    def test_scalar_forms(self, rng):
        """Test antisymmetry, Leibniz, Jacobi and d_A^2 over the scalars."""
        failures = run_identity_trials(rng, SCALARS, 3, random_gaussian, trials=4)
        assert failures == {"antisymmetry": 0, "leibniz": 0, "jacobi": 0, "twisted_square": 0}

    def test_matrix_forms(self, rng):
        """Test the same identities with noncommuting coefficients."""
        ring = MatrixRing(2)
        failures = run_identity_trials(rng, ring, 3, ring.random, trials=3)
        assert sum(failures.values()) == 0
