"""Tests for the coefficient recursion and its closed form."""

import pytest

from core.exceptions import MissingRowsError, SingularSystemError, VerificationError
from formal.coefficients import (
    CoeffTable,
    TriangularSystem,
    build_system,
    check_E,
    closed_form_table,
    phi_apply,
    random_diagonal,
    rescale_table,
    solve_step,
    solve_table,
    violated_equations,
)
from formal.scalars import ONE, ZERO, gaussian, rational


class TestClosedForm:
    """Test the vanishing-diagonal table."""

    def test_row_three_at_level_one(self):
        """Test C^3 = (1, 0, -1/3, 0) at k = 1."""
        table = closed_form_table(1, 3)
        assert table.rows[3] == (ONE, ZERO, gaussian(rational(-1, 3)), ZERO)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_recursion_matches_closed_form(self, k):
        """Test that solving with a zero diagonal reproduces the closed form for rows <= 20."""
        assert solve_table(k, 20) == closed_form_table(k, 20)

    @pytest.mark.parametrize("sign", [1, -1])
    def test_equations_hold_on_both_branches(self, sign):
        """Test that every E_{m,l} vanishes for either sign, 1 <= m <= l <= 20."""
        assert violated_equations(closed_form_table(2, 20), sign) == []

    def test_frame_holds_exact_strings(self):
        """Test the long CSV layout of a table."""
        frame = closed_form_table(1, 3).to_frame()
        assert list(frame.columns) == ["l", "r", "re", "im"]
        assert len(frame) == 10
        entry = frame[(frame.l == 3) & (frame.r == 2)].iloc[0]
        assert entry["re"] == "-1/3"
        assert entry["im"] == "0/1"


class TestFreeDiagonal:
    """Test tables with a nonzero free diagonal."""

    def test_random_diagonal_is_a_rescaling(self, rng):
        """Test that a free diagonal multiplies the solution by sum alpha_l s^-l."""
        diagonal = random_diagonal(rng, 6)
        table = solve_table(2, 6, diagonal)
        assert violated_equations(table) == []
        assert rescale_table(closed_form_table(2, 6), [ONE] + diagonal) == table
        assert table.diagonal()[1:] == tuple(diagonal)

    def test_rescale_examples(self):
        """Test alpha = (1, 1, 0, 0) on row 1 and alpha = (1, 0, 1, 0) on row 2."""
        closed = closed_form_table(1, 3)
        assert rescale_table(closed, [ONE, ONE, ZERO, ZERO]).rows[1] == (ONE, ONE)
        assert rescale_table(closed, [ONE, ZERO, ONE, ZERO]).rows[2] == (ONE, ZERO, ONE)
        assert rescale_table(closed, [ONE, ZERO, ZERO, ZERO]) == closed

    def test_rescale_needs_vanishing_base_diagonal(self):
        """Test that a base table with a nonzero free entry is refused."""
        base = solve_table(1, 3, [ONE, ZERO, ZERO])
        with pytest.raises(VerificationError):
            rescale_table(base, [ONE, ZERO, ZERO, ZERO])

    def test_rescale_of_invalid_base(self):
        """Test that rescaling a base table that breaks the equations is refused."""
        closed = closed_form_table(2, 4)
        broken = closed.with_entry(3, 1, closed.entry(3, 1) + ONE)
        with pytest.raises(VerificationError):
            rescale_table(broken, [ONE, gaussian(2), ZERO, ZERO, ZERO])

    def test_rescale_needs_unit_start(self):
        """Test that alpha_0 must be 1."""
        with pytest.raises(ValueError):
            rescale_table(closed_form_table(1, 2), [gaussian(2), ZERO, ZERO])

    def test_short_diagonal(self):
        """Test that too few diagonal values are rejected."""
        with pytest.raises(ValueError):
            solve_table(1, 4, [ONE])

    def test_phi_apply_gives_next_row(self, rng):
        """Test that T = phi(N) X solves the triangular system."""
        table = solve_table(3, 5, random_diagonal(rng, 5))
        for l in range(1, 6):
            assert phi_apply(table.rows[l - 1], 3) == table.rows[l][:l]
            assert solve_step(table.rows[l - 1], table.rows[l][l], k=3) == table.rows[l]


class TestUniqueness:
    """Test that off-diagonal entries are forced."""

    def test_single_perturbation_is_detected(self):
        """Test that changing one off-diagonal entry violates an equation."""
        table = closed_form_table(1, 5)
        perturbed = table.with_entry(4, 1, table.entry(4, 1) + ONE)
        assert violated_equations(perturbed)

    def test_check_E_needs_rows(self):
        """Test that E_{m,l} refuses a table without row l."""
        with pytest.raises(MissingRowsError):
            check_E(closed_form_table(1, 2), 1, 3)


class TestValidation:
    """Test table and system validation."""

    def test_table_starts_with_one(self):
        """Test that C_0^0 must be 1."""
        with pytest.raises(ValueError):
            CoeffTable(level=1, rows=((gaussian(2),),))

    def test_row_length(self):
        """Test that row l must have l + 1 entries."""
        with pytest.raises(ValueError):
            CoeffTable(level=1, rows=((ONE,), (ONE,)))

    def test_singular_system(self):
        """Test that a vanishing diagonal is reported."""
        system = TriangularSystem(level=1, size=2, sign=1, left=(ZERO, ONE), right=(ONE, ONE))
        with pytest.raises(SingularSystemError):
            system.solve_left([ONE, ONE])

    def test_system_sign(self):
        """Test that the sign branch must be +1 or -1."""
        with pytest.raises(ValueError):
            build_system(1, 3, sign=0)
