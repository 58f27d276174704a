"""Tests for exact scalars and truncated formal series."""

import cmath

import pytest

from core.exceptions import BranchPointError, RingMismatchError
from formal.algebra import GaussianRing, MatrixRing
from formal.scalars import (
    ONE,
    ZERO,
    format_gaussian,
    format_rational,
    gaussian,
    inverse_factorial,
    parse_gaussian,
    random_gaussian,
    rational,
)
from formal.series import (
    FormalSeries,
    inv_t_series,
    phi_taylor,
    r_exact,
    r_series,
    rho_power_coefficient,
    scalar_series,
    times_t,
    times_t_bar,
)


class TestScalars:
    """Test Gaussian rational helpers."""

    def test_format_is_canonical(self):
        """Test the p/q text form of a Gaussian rational."""
        z = gaussian(rational(1, 2), -3)
        assert format_gaussian(z) == "1/2-3/1*i"
        assert parse_gaussian("1/2-3/1*i") == z

    def test_inverse_factorial(self):
        """Test 1/n! for small n, including 0! = 1."""
        assert inverse_factorial(0) == ONE
        assert inverse_factorial(5) == gaussian(rational(1, 120))

    def test_format_rational(self):
        """Test that integers and negatives keep the p/q form."""
        assert format_rational(rational(4, 2)) == "2/1"
        assert format_rational(rational(-1, 3)) == "-1/3"

    def test_parse_plain_rational(self):
        """Test that a bare rational parses with zero imaginary part."""
        assert parse_gaussian("-2/3") == gaussian(rational(-2, 3))

    def test_parse_rejects_garbage(self):
        """Test that non-numeric text is rejected."""
        with pytest.raises(ValueError):
            parse_gaussian("one half")


class TestFormalSeries:
    """Test truncated series arithmetic."""

    def test_product_truncates_to_smaller_order(self):
        """Test that a product never extends past the shorter input."""
        a = FormalSeries.one(GaussianRing(), 3)
        b = FormalSeries.one(GaussianRing(), 5)
        assert (a * b).truncation_order == 3

    def test_geometric_inverse(self):
        """Test that 1 - 1/s inverts to the all-ones series."""
        series = scalar_series([ONE, -ONE, ZERO, ZERO, ZERO])
        assert series.inverse() == scalar_series([ONE] * 5)

    def test_exp_needs_vanishing_constant(self):
        """Test that exp refuses a series with a constant term."""
        with pytest.raises(ValueError):
            FormalSeries.one(GaussianRing(), 3).exp()

    def test_ring_mismatch(self):
        """Test that series over different rings cannot be combined."""
        scalars = FormalSeries.one(GaussianRing(), 2)
        matrices = FormalSeries.one(MatrixRing(2), 2)
        with pytest.raises(RingMismatchError):
            scalars + matrices

    def test_matrix_coefficients_keep_left_factor_first(self):
        """Test that products over a noncommutative ring respect the factor order."""
        ring = MatrixRing(2)
        x = ring.from_entries([[ZERO, ONE], [ZERO, ZERO]])
        y = ring.from_entries([[ZERO, ZERO], [ONE, ZERO]])
        left = FormalSeries.monomial(ring, 2, 1, x)
        right = FormalSeries.monomial(ring, 2, 1, y)
        assert (left * right)[2] == ring.mul(x, y)
        assert (right * left)[2] == ring.mul(y, x)
        assert ring.mul(x, y) != ring.mul(y, x)


def _random_series(ring, rng, order=5):
    draw = ring.random if isinstance(ring, MatrixRing) else random_gaussian
    return FormalSeries.from_coefficients(ring, [draw(rng) for _ in range(order + 1)])


@pytest.mark.parametrize("ring", [GaussianRing(), MatrixRing(2)], ids=["scalars", "matrices"])
class TestRingLaws:
    """Test the ring laws of truncated products on random exact series."""

    def test_associative(self, ring, rng):
        """Test (ab)c = a(bc)."""
        for _ in range(5):
            a, b, c = (_random_series(ring, rng) for _ in range(3))
            assert (a * b) * c == a * (b * c)

    def test_distributive(self, ring, rng):
        """Test a(b + c) = ab + ac and (a + b)c = ac + bc."""
        for _ in range(5):
            a, b, c = (_random_series(ring, rng) for _ in range(3))
            assert a * (b + c) == a * b + a * c
            assert (a + b) * c == a * c + b * c


class TestParameterSeries:
    """Test the series in 1/s built from t = k + is."""

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_inverse_t(self, k):
        """Test that t times 1/t is one, for both t and its conjugate."""
        one = FormalSeries.one(GaussianRing(), 5)
        assert times_t(inv_t_series(k, 6), k) == one
        assert times_t_bar(inv_t_series(k, 6, conjugate=True), k) == one

    def test_inverse_t_leading_terms(self):
        """Test the first coefficients of 1/t at k = 1."""
        assert inv_t_series(1, 3).coefficients == (ZERO, gaussian(0, -1), ONE, gaussian(0, 1))

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_exponential_identity(self, k):
        """Test that e^{4kr}(1 - ik/s) equals 1 + ik/s."""
        order = 8
        exponential = r_series(k, order).scale(gaussian(4 * k)).exp()
        tail = [ZERO] * (order - 1)
        minus = scalar_series([ONE, gaussian(0, -k)] + tail)
        plus = scalar_series([ONE, gaussian(0, k)] + tail)
        assert exponential * minus == plus

    def test_r_has_only_odd_terms(self):
        """Test that r vanishes at even indices."""
        r = r_series(2, 9)
        assert r.nonzero_degrees() == [1, 3, 5, 7, 9]

    def test_phi_is_kz_cot_kz(self):
        """Test the Taylor coefficients of kz cot(kz) at k = 1."""
        assert phi_taylor(1, 4).coefficients == (
            ONE, ZERO, gaussian(rational(-1, 3)), ZERO, gaussian(rational(-1, 45)))

    def test_rho_power_parity(self):
        """Test that [s^-l] rho^n vanishes when l - n is odd or l < n."""
        assert rho_power_coefficient(1, 5, 2) == ZERO
        assert rho_power_coefficient(1, 2, 3) == ZERO
        assert rho_power_coefficient(1, 3, 1) == gaussian(rational(-1, 3))


class TestExactR:
    """Test the principal-branch value of r."""

    @pytest.mark.parametrize("s", [0.5, 4.0, -3.0])
    def test_exponential_identity(self, s):
        """Test e^{4kr}(1 - ik/s) = 1 + ik/s numerically."""
        k = 2
        r = r_exact(k, s)
        assert abs(cmath.exp(4 * k * r) * (1 - 1j * k / s) - (1 + 1j * k / s)) < 1e-12

    def test_branch_point(self):
        """Test that s = 0 is rejected."""
        with pytest.raises(BranchPointError):
            r_exact(1, 0.0)

    def test_large_s_matches_series(self):
        """Test that the truncated series approximates r for large s."""
        s = 50.0
        assert abs(r_series(1, 9).evaluate(s) - r_exact(1, s)) < 1e-12
