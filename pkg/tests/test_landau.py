"""Tests for the truncated Landau model and its numerical experiments."""

import numpy as np
import pytest

from core.exceptions import InvalidGeometryError, NonPolynomialCoefficientError
from landau import experiments
from landau.basis import HermiteBasis
from landau.functions import CurveFunction, curve_function
from landau.geometry import commutator_tensor, geometry, inverse_metric
from landau.operators import LandauModel, commutator

SIGMA = 0.3 + 1.2j


class TestGeometry:
    """Test the constant tensors at a Teichmueller point."""

    def test_standard_point(self):
        """Test J and g at sigma = i."""
        geom = geometry(1j)
        np.testing.assert_allclose(geom.g, np.eye(2))
        np.testing.assert_allclose(geom.J, [[0.0, -1.0], [1.0, 0.0]])

    @pytest.mark.parametrize("direction", [1.0, 1j, 1 + 1j])
    def test_invariants(self, direction):
        """Test the structural identities away from sigma = i."""
        residuals = geometry(SIGMA, direction).invariant_residuals()
        assert max(residuals.values()) < 1e-12

    def test_lower_half_plane(self):
        """Test that a point below the real axis is rejected."""
        with pytest.raises(InvalidGeometryError):
            geometry(0.5 - 1j)

    def test_finite_difference_split(self):
        """Test G + Gbar = -V[g~] against a central difference."""
        outcome = experiments.geometry_check(SIGMA, 1 + 1j)
        assert outcome.passed

    def test_commutator_tensor_of_type_20(self):
        """Test that two (2,0) tensors give commuting operators."""
        assert np.max(np.abs(commutator_tensor(geometry(SIGMA, 1.0).G, geometry(SIGMA, 1j).G))) < 1e-12


class TestCurveFunctions:
    """Test polynomial curve functions."""

    def test_parse_and_degree(self):
        """Test parsing text into monomials."""
        f = curve_function("x**2 + 3*x*y")
        assert f.terms == {(2, 0): 1 + 0j, (1, 1): 3 + 0j}
        assert f.degree == 2

    def test_triples(self):
        """Test [i, j, c] input."""
        assert curve_function([[1, 0, 2.0], [0, 1, -1.0]]) == CurveFunction({(1, 0): 2.0, (0, 1): -1.0})

    def test_degree_limit(self):
        """Test that degree 5 is rejected."""
        with pytest.raises(NonPolynomialCoefficientError):
            curve_function("x**5")

    def test_non_polynomial(self):
        """Test that transcendental input is rejected."""
        with pytest.raises(NonPolynomialCoefficientError):
            curve_function("sin(x)")

    def test_laplacian(self):
        """Test g~^{ab} d_a d_b (x^2 + y^2) = 4 at sigma = i."""
        f = curve_function("x**2 + y**2")
        assert f.laplacian(inverse_metric(1j)) == CurveFunction({(0, 0): 4.0})


class TestBasis:
    """Test the truncated Hermite basis."""

    def test_size(self):
        """Test that degrees up to N give (N+1)(N+2)/2 states."""
        assert len(HermiteBasis(1, 4)) == 15

    def test_position_matrix_element(self):
        """Test <0,0| x |1,0> = 1/sqrt(k)."""
        basis = HermiteBasis(4, 6)
        x = basis.position(0)
        assert abs(x[basis.index[(0, 0)], basis.index[(1, 0)]] - 0.5) < 1e-12

    def test_halo_must_leave_states(self, small_model):
        """Test that a halo larger than the cutoff is refused."""
        with pytest.raises(ValueError):
            small_model.halo_columns(small_model.cutoff + 1)


class TestCommutationRelations:
    """Test the operator identities on the halo subspace."""

    @pytest.mark.parametrize("k", [1, 2])
    def test_relations(self, k):
        """Test curvature, [b, Delta], [bbar, Delta] and commuting multiplications."""
        model = LandauModel(k, 20)
        outcome = experiments.commutation_check(model, SIGMA, 1 + 1j, curve_function("x**2"))
        assert outcome.passed, [m for m in outcome.measurements if not m.passed]

    def test_b_bbar_bracket(self, small_model):
        """Test that [b, bbar] is reported without a contract."""
        outcome = experiments.bbbar_bracket(small_model, SIGMA, 1.0)
        assert all(m.threshold is None for m in outcome.measurements)
        assert outcome.measurements[0].value > 0

    def test_spectrum(self, small_model):
        """Test the Landau levels -k(2n+1) at sigma = i."""
        assert experiments.spectrum_check(small_model).passed


class TestDerivatives:
    """Test sigma-derivatives of the operators."""

    def test_dT_delta(self, small_model):
        """Test V[Delta] = -(b + bbar) and second-order convergence."""
        outcome = experiments.dT_delta_check(small_model, SIGMA, 1.0)
        assert outcome.passed
        assert len(outcome.rows) == len(experiments.FIT_STEPS)

    @pytest.mark.parametrize("f", ["x", "x*y", "x**2 + y**2"])
    def test_first_step(self, small_model, f):
        """Test S^(1)(f) = [-(i/2)Delta, M_f] and its derivative."""
        outcome = experiments.first_step_check(small_model, SIGMA, 1 + 1j, curve_function(f))
        assert outcome.passed

    def test_covariant_derivative_of_laplacian(self, small_model):
        """Test that the covariant derivative of Delta at t = k is b + bbar."""
        assert experiments.hwc_laplacian_check(small_model, SIGMA, 1.0).passed

    def test_curvature_relation(self, small_model):
        """Test d b(V, W) = (1/4k)[b ^ bbar](V, W)."""
        assert experiments.curvature_relation_check(small_model, SIGMA, 1.0, 1j).passed


class TestConnection:
    """Test flatness, decay and the trivialisation."""

    @pytest.mark.parametrize("L", [0, 1, 2])
    def test_decay(self, small_model, L):
        """Test that the truncated formal solution decays at least like s^-(L+1)."""
        outcome = experiments.decay_experiment(
            small_model, curve_function("x"), L, [2.0 ** n for n in range(4, 11)], 1j, 1.0)
        assert outcome.passed
        assert {row["L"] for row in outcome.rows} == {L}

    def test_decay_quadratic_function_off_axis(self, small_model):
        """Test the decay slope for f = x^2 + y^2 at a second Teichmueller point."""
        outcome = experiments.decay_experiment(
            small_model, curve_function("x**2 + y**2"), 1, [2.0 ** n for n in range(4, 11)], SIGMA, 1 + 1j)
        assert outcome.passed

    def test_decay_needs_room(self):
        """Test that a cutoff too small for L is refused."""
        with pytest.raises(ValueError):
            experiments.decay_experiment(LandauModel(1, 8), curve_function("x**2"), 3, [16.0, 32.0], 1j, 1.0)

    def test_flatness(self, small_model):
        """Test that the connection is flat on M_f."""
        assert experiments.flatness_check(small_model, SIGMA, 1.0, 1j, 5.0, curve_function("x")).passed

    def test_flatness_needs_independent_directions(self, small_model):
        """Test that parallel directions are refused."""
        with pytest.raises(InvalidGeometryError):
            experiments.flatness_check(small_model, SIGMA, 1.0, 2.0, 5.0, curve_function("x"))

    def test_obstruction(self, small_model):
        """Test the (1/4|t|^2) bracket identity and the symbol of the witness."""
        outcome = experiments.t_obstruction_check(small_model, SIGMA, 1.0, 1j, 3.0, curve_function("x"))
        names = {m.name for m in outcome.measurements}
        assert {"obstruction_identity", "witness_norm", "witness_symbol_agreement"} <= names
        assert outcome.passed

    def test_trivialisation(self):
        """Test parallel transport against exp(-r Delta(sigma1)) exp(r Delta(sigma0))."""
        model = LandauModel(1, 30)
        outcome = experiments.trivialisation_check(model, 1j, 1 + 1j, 4.0)
        transport = next(m for m in outcome.measurements if m.name == "trivialisation_transport")
        derivative = next(m for m in outcome.measurements if m.name == "trivialisation_derivative")
        assert transport.passed
        assert derivative.passed
        assert derivative.value < derivative.threshold

    def test_trivialisation_improves_with_cutoff(self):
        """Test that the transport discrepancy shrinks as N grows."""
        discrepancies = [
            experiments.trivialisation_check(LandauModel(1, N), 1j, 1 + 1j, 4.0, step=5e-3).rows[0]["discrepancy"]
            for N in (6, 12, 24)
        ]
        assert discrepancies[0] > discrepancies[1] > discrepancies[2]


class TestOperatorMatrix:
    """Test order bookkeeping."""

    def test_orders(self, small_model):
        """Test that products add orders and sums take the maximum."""
        nx, ny = small_model.nabla
        assert (nx @ ny).order == 2
        assert (nx + small_model.multiplication(curve_function("x**3"))).order == 3
        assert commutator(nx, ny).order == 2


class TestHalo:
    """Test truncation halos."""

    def test_halo_norm_shrinks_with_halo(self, small_model):
        """Test that excluding more top degrees never increases the restricted norm."""
        b = small_model.b(SIGMA, 1.0)
        norms = [small_model.halo_norm(b, halo) for halo in (0, 2, 4, 6, 8)]
        assert all(wider >= narrower for wider, narrower in zip(norms, norms[1:]))

    @pytest.mark.parametrize("N", [10, 16, 24])
    def test_relations_stay_below_tolerance_as_cutoff_grows(self, N):
        """Test that the halo residuals of the commutation relations stay below tolerance for every N."""
        outcome = experiments.commutation_check(LandauModel(1, N), SIGMA, 1 + 1j, curve_function("x**2"))
        assert outcome.passed, [m for m in outcome.measurements if not m.passed]
