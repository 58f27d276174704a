"""Tests for the word algebra and the genus-one operator identities."""

import pytest

from core.exceptions import LevelMismatchError, OutsideSubalgebraError
from formal.algebra import WordAlgebra, commutator, confluence_check, random_word
from formal.coefficients import closed_form_table, random_diagonal, solve_table
from formal.genus1 import (
    bch_solution,
    delta_power_commutator,
    formal_flatness_check,
    formal_parallel_check,
    genus1_algebra,
    trivialisation_series_check,
    two_direction_algebra,
    verify_adiff,
    verify_recursion,
)
from formal.scalars import ONE, gaussian, rational


class TestWordAlgebra:
    """Test normal forms and rewriting."""

    def test_weyl_relation(self):
        """Test that d x reduces to x d + 1."""
        weyl = WordAlgebra("weyl", 1, ("x", "d"), rules={("d", "x"): [(ONE, ("x", "d"), ()), (ONE, (), ())]})
        reduced = weyl.word(("d", "x"))
        assert reduced == weyl.word(("x", "d")) + weyl.one()

    def test_reduction_cache_is_bounded(self, rng):
        """Test that the reduction cache holds at most cache_size words and still reduces correctly."""
        weyl = WordAlgebra("weyl", 1, ("x", "d"), rules={("d", "x"): [(ONE, ("x", "d"), ()), (ONE, (), ())]},
                           cache_size=8)
        for _ in range(50):
            weyl.word(random_word(rng, weyl.letters, 6))
        assert weyl.cache_info().currsize <= 8
        assert weyl.word(("d", "x")) == weyl.word(("x", "d")) + weyl.one()

    def test_rules_need_known_letters(self):
        """Test that a rule on an undeclared letter is rejected."""
        with pytest.raises(ValueError):
            WordAlgebra("broken", 1, ("x",), rules={("y", "x"): [(ONE, ("x", "y"), ())]})

    def test_levels_do_not_mix(self):
        """Test that elements of algebras at different levels cannot be added."""
        with pytest.raises(LevelMismatchError):
            genus1_algebra(1).b + genus1_algebra(2).b

    def test_text_form_is_sorted(self, algebra):
        """Test the canonical text of an element."""
        element = algebra.b.scale(gaussian(rational(1, 2))) + algebra.delta
        assert element.to_text() == "(1/1+0/1*i)*Delta + (1/2+0/1*i)*b"

    def test_confluence(self, algebra, rng):
        """Test that leftmost and rightmost rewriting agree on random words."""
        assert confluence_check(algebra.algebra, rng, samples=300, max_length=6) == []
        assert confluence_check(two_direction_algebra(1), rng, samples=300, max_length=6) == []


class TestCommutationRelations:
    """Test the defining relations and their consequences."""

    def test_b_delta(self, algebra):
        """Test [b, Delta] = 4k b and [bbar, Delta] = -4k bbar."""
        assert commutator(algebra.b, algebra.delta) == algebra.b.scale(4)
        assert commutator(algebra.bbar, algebra.delta) == algebra.bbar.scale(-4)

    def test_b_bbar_is_central(self, algebra):
        """Test [b, bbar] = c and that c commutes with everything."""
        assert commutator(algebra.b, algebra.bbar) == algebra.c
        for generator in (algebra.delta, algebra.b, algebra.bbar, algebra.D):
            assert commutator(algebra.c, generator).is_zero()

    @pytest.mark.parametrize("k", [1, 2, 3])
    @pytest.mark.parametrize("sign", [1, -1])
    def test_delta_powers(self, k, sign):
        """Test [b +- bbar, Delta^n] against the binomial expansion for n <= 12."""
        alg = genus1_algebra(k)
        for n in range(1, 13):
            delta_power_commutator(alg, sign, n)

    def test_dT_of_delta(self, algebra):
        """Test d_T Delta = -(b + bbar)."""
        assert algebra.dT(algebra.delta) == -(algebra.b + algebra.bbar)

    def test_dT_is_a_derivation(self, algebra):
        """Test the Leibniz rule on Delta D Delta."""
        word = algebra.delta * algebra.D * algebra.delta
        expected = (algebra.dT(algebra.delta) * algebra.D * algebra.delta
                    + algebra.delta * algebra.D * algebra.dT(algebra.delta))
        assert algebra.dT(word) == expected

    def test_dT_outside_subalgebra(self, algebra):
        """Test that d_T refuses words containing b."""
        with pytest.raises(OutsideSubalgebraError):
            algebra.dT(algebra.delta * algebra.b)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_adiff(self, k):
        """Test the d_T formula for P^(l)(D) for l <= 8."""
        alg = genus1_algebra(k)
        for l in range(1, 9):
            assert verify_adiff(alg, l).is_zero()


class TestRecursion:
    """Test the recursion for S^(l)."""

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_closed_form_table(self, k):
        """Test that the closed-form table satisfies the recursion for l <= 6."""
        alg = genus1_algebra(k)
        table = closed_form_table(k, 6)
        for l in range(1, 7):
            assert verify_recursion(alg, l, table).is_zero()

    def test_random_diagonal_table(self, algebra, rng):
        """Test that a free diagonal keeps the recursion satisfied."""
        table = solve_table(1, 4, random_diagonal(rng, 4))
        for l in range(1, 5):
            assert verify_recursion(algebra, l, table).is_zero()

    def test_wrong_coefficient_breaks_recursion(self, algebra):
        """Test that changing C_0^1 leaves a residual at l = 1."""
        table = closed_form_table(1, 2)
        broken = table.with_entry(1, 0, table.entry(1, 0) + ONE)
        assert not verify_recursion(algebra, 1, broken).is_zero()

    def test_level_mismatch(self, algebra):
        """Test that a table for another level is rejected."""
        with pytest.raises(LevelMismatchError):
            verify_recursion(algebra, 1, closed_form_table(2, 2))


class TestTrivialisation:
    """Test exp(r Delta) and the formal parallel solution."""

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_series_identity(self, k):
        """Test d_T exp(r Delta) = exp(r Delta) beta to order 6."""
        assert trivialisation_series_check(genus1_algebra(k), 6).is_zero()

    def test_formal_parallel(self, algebra):
        """Test that exp(-r Delta) D exp(r Delta) is parallel."""
        assert formal_parallel_check(algebra, 4).is_zero()

    def test_bch_matches_table(self, algebra):
        """Test that degree l of the conjugated D is S^(l) for the closed-form table."""
        solution = bch_solution(algebra, 4)
        table = closed_form_table(1, 4)
        for l in range(5):
            assert solution[l] == algebra.S_op(l, table)


class TestFormalCurvature:
    """Test the curvature of the formal connection on two directions."""

    @pytest.mark.parametrize("l", [1, 2, 3, 4, 5, 6])
    def test_flat_on_D(self, l):
        """Test that every curvature coefficient commutes with D."""
        assert formal_flatness_check(l, 1).is_zero()

    def test_control_without_relation(self):
        """Test that dropping d b = (1/4k)[b ^ bbar] leaves curvature at l = 2."""
        assert not formal_flatness_check(2, 1, exact_relation=False).is_zero()
