"""Genus-one operator algebra: Laplacian, the b operators and the formal connection.

The algebra is generated by Delta, b, bbar and a free symbol D, with c = [b, bbar]
central and the relations

    b Delta    = Delta b    + 4k b
    bbar Delta = Delta bbar - 4k bbar
    bbar b     = b bbar     - c

Normal-ordered words put Delta first, then b, then bbar; nothing moves past D.
"""

from functools import lru_cache
from math import comb
from typing import Dict, List, Optional, Tuple

import structlog

from core.exceptions import OutsideSubalgebraError, VerificationError
from .algebra import AlgebraElement, AlgebraRing, TermKey, WordAlgebra, commutator
from .coefficients import CoeffTable, require_same_level
from .forms import OperatorForm, wedge_bracket
from .scalars import ONE, ZERO, GaussianRational, gaussian, i_power, inverse_factorial, rational
from .series import FormalSeries, inv_t_series, r_series

logger = structlog.get_logger(__name__)

LETTERS = ("Delta", "b", "bbar", "D")
CENTRALS = ("c",)


def _rules(k: int):
    four_k = gaussian(4 * k)
    flat = (0,)
    return {
        ("b", "Delta"): [(ONE, ("Delta", "b"), flat), (four_k, ("b",), flat)],
        ("bbar", "Delta"): [(ONE, ("Delta", "bbar"), flat), (-four_k, ("bbar",), flat)],
        ("bbar", "b"): [(ONE, ("b", "bbar"), flat), (-ONE, (), (1,))],
    }


class Genus1Algebra:
    """Generators, d_T and the operators P^(l)(D) at a fixed level k."""

    def __init__(self, k: int):
        self.k = k
        self.algebra = WordAlgebra("genus1", k, LETTERS, CENTRALS, _rules(k))
        self.ring = AlgebraRing(self.algebra)

        self.delta = self.algebra.generator("Delta")
        self.b = self.algebra.generator("b")
        self.bbar = self.algebra.generator("bbar")
        self.c = self.algebra.generator("c")
        self.D = self.algebra.generator("D")
        self.a = self.delta.scale(gaussian(0, rational(-1, 2)))
        self._p_ops: List[AlgebraElement] = [self.D]

    def __repr__(self) -> str:
        return f"Genus1Algebra(k={self.k})"

    def delta_power(self, n: int) -> AlgebraElement:
        return self.algebra.word(("Delta",) * n)

    def b_combination(self, sign: int) -> AlgebraElement:
        """b + sign * bbar."""
        return self.b + self.bbar if sign > 0 else self.b - self.bbar

    def dT(self, element: AlgebraElement) -> AlgebraElement:
        """Derivation with d_T Delta = -(b + bbar) and d_T D = d_T c = 0.

        Only defined on words in Delta, D and c.
        """
        raw: Dict[TermKey, GaussianRational] = {}
        for (word, exps), coeff in element.terms.items():
            if "b" in word or "bbar" in word:
                raise OutsideSubalgebraError(self.algebra.format_key((word, exps)))
            for position, letter in enumerate(word):
                if letter != "Delta":
                    continue
                for replacement in ("b", "bbar"):
                    key = (word[:position] + (replacement,) + word[position + 1:], exps)
                    raw[key] = raw.get(key, ZERO) - coeff
        return self.algebra.element(raw)

    def P_op(self, l: int) -> AlgebraElement:
        """ad_a^l(D) / l!."""
        if l < 0:
            raise ValueError(f"l must be non-negative, got {l}")
        while len(self._p_ops) <= l:
            n = len(self._p_ops)
            self._p_ops.append(commutator(self.a, self._p_ops[-1]).scale(gaussian(rational(1, n))))
        return self._p_ops[l]

    def beta(self, n: int) -> AlgebraElement:
        """Degree-n coefficient of (1/2t) b - (1/2tbar) bbar: -((ik)^n/2k)(b - (-1)^n bbar)."""
        if n == 0:
            return self.algebra.zero()
        return self.b_combination(-1 if n % 2 == 0 else 1).scale(
            i_power(self.k, n) * gaussian(rational(-1, 2 * self.k)))

    def S_op(self, l: int, table: CoeffTable) -> AlgebraElement:
        """sum_r C_r^l P^(l-r)(D)."""
        require_same_level(table, self.k)
        result = self.algebra.zero()
        for r in range(l + 1):
            coeff = table.entry(l, r)
            if coeff:
                result = result + self.P_op(l - r).scale(coeff)
        return result


@lru_cache(maxsize=16)
def genus1_algebra(k: int) -> Genus1Algebra:
    """Shared instance per level; reduction caches live on the instance."""
    return Genus1Algebra(k)


def delta_power_commutator(alg: Genus1Algebra, sign: int, n: int) -> AlgebraElement:
    """[b + sign*bbar, Delta^n], checked against sum_l binom(n,l)(4k)^l Delta^(n-l)(b + sign(-1)^l bbar)."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    lhs = commutator(alg.b_combination(sign), alg.delta_power(n))
    rhs = alg.algebra.zero()
    for l in range(1, n + 1):
        inner = alg.b_combination(sign * (-1) ** l)
        rhs = rhs + (alg.delta_power(n - l) * inner).scale(gaussian(comb(n, l) * (4 * alg.k) ** l))
    residual = lhs - rhs
    if not residual.is_zero():
        raise VerificationError("delta_power_commutator", residual.to_text(), f"sign={sign}, n={n}, k={alg.k}")
    return lhs


def verify_adiff(alg: Genus1Algebra, l: int) -> AlgebraElement:
    """d_T P^(l) - sum_{n=1}^{l} (2ik)^n/(4k n!) [b - (-1)^n bbar, P^(l-n)]; zero when the identity holds."""
    if l < 1:
        raise ValueError(f"l must be positive, got {l}")
    rhs = alg.algebra.zero()
    for n in range(1, l + 1):
        scale = i_power(2 * alg.k, n) * inverse_factorial(n) * gaussian(rational(1, 4 * alg.k))
        bracket = commutator(alg.b_combination(-1 if n % 2 == 0 else 1), alg.P_op(l - n))
        rhs = rhs + bracket.scale(scale)
    return alg.dT(alg.P_op(l)) - rhs


def verify_recursion(alg: Genus1Algebra, l: int, table: CoeffTable) -> AlgebraElement:
    """d_T S^(l) - (1/2k) sum_{n=1}^{l} (ik)^n [b - (-1)^n bbar, S^(l-n)]."""
    if l < 1:
        raise ValueError(f"l must be positive, got {l}")
    require_same_level(table, alg.k)
    rhs = alg.algebra.zero()
    for n in range(1, l + 1):
        bracket = commutator(alg.b_combination(-1 if n % 2 == 0 else 1), alg.S_op(l - n, table))
        rhs = rhs + bracket.scale(i_power(alg.k, n) * gaussian(rational(1, 2 * alg.k)))
    return alg.dT(alg.S_op(l, table)) - rhs


def _exp_r_delta(alg: Genus1Algebra, order: int, sign: int = 1) -> FormalSeries:
    r = r_series(alg.k, order)
    exponent = r.map(lambda c: alg.delta.scale(c if sign > 0 else -c), alg.ring)
    return exponent.exp()


def beta_series(alg: Genus1Algebra, order: int) -> FormalSeries:
    """(1/2t) b - (1/2tbar) bbar as a series with algebra coefficients."""
    half = gaussian(rational(1, 2))
    inv_t = inv_t_series(alg.k, order)
    inv_tbar = inv_t_series(alg.k, order, conjugate=True)
    coefficients = [
        alg.b.scale(half * x) - alg.bbar.scale(half * y)
        for x, y in zip(inv_t.coefficients, inv_tbar.coefficients)
    ]
    return FormalSeries(alg.ring, tuple(coefficients))


def trivialisation_series_check(alg: Genus1Algebra, order: int) -> FormalSeries:
    """d_T exp(r Delta) - exp(r Delta) ((1/2t) b - (1/2tbar) bbar), degree by degree."""
    if order < 1:
        raise ValueError(f"order must be positive, got {order}")
    exponential = _exp_r_delta(alg, order)
    lhs = exponential.map(alg.dT)
    rhs = exponential * beta_series(alg, order)
    logger.debug("Trivialisation series assembled", k=alg.k, order=order)
    return lhs - rhs


def bch_solution(alg: Genus1Algebra, order: int) -> FormalSeries:
    """exp(-r Delta) D exp(r Delta) = sum_n (-r ad_Delta)^n (D)/n!, re-expanded in 1/s.

    Degree l equals sum_r [s^-l] rho^(l-r) P^(l-r)(D).
    """
    if order < 0:
        raise ValueError(f"order must be non-negative, got {order}")
    if order == 0:
        return FormalSeries(alg.ring, (alg.D,))
    left = _exp_r_delta(alg, order, sign=-1)
    right = _exp_r_delta(alg, order)
    middle = FormalSeries.constant(alg.ring, order, alg.D)
    return left * middle * right


def formal_connection_coefficient(alg: Genus1Algebra, l: int, element: AlgebraElement) -> AlgebraElement:
    """-((ik)^l/2k)[b - (-1)^l bbar, e]."""
    if l < 1:
        raise ValueError(f"l must be positive, got {l}")
    return commutator(alg.beta(l), element)


def formal_parallel_check(alg: Genus1Algebra, order: int) -> FormalSeries:
    """d_T R_l + sum_{n=1}^{l} formal_connection_coefficient(n, R_{l-n}) for R = bch_solution."""
    solution = bch_solution(alg, order)
    residuals = []
    for l in range(order + 1):
        value = alg.dT(solution[l])
        for n in range(1, l + 1):
            value = value + formal_connection_coefficient(alg, n, solution[l - n])
        residuals.append(value)
    return FormalSeries(alg.ring, tuple(residuals))


# ----------------------------------------------------------------------
# Two formal directions: curvature of the formal connection as forms

TWO_DIRECTION_LETTERS = ("b1", "bb1", "b2", "bb2", "D")
TWO_DIRECTION_CENTRALS = ("zbb", "zbbbar")


@lru_cache(maxsize=16)
def two_direction_algebra(k: int) -> WordAlgebra:
    """Copies of b, bbar along two directions; like-type brackets are central."""
    rules = {
        ("b2", "b1"): [(ONE, ("b1", "b2"), (0, 0)), (-ONE, (), (1, 0))],
        ("bb2", "bb1"): [(ONE, ("bb1", "bb2"), (0, 0)), (-ONE, (), (0, 1))],
    }
    return WordAlgebra("genus1-two-direction", k, TWO_DIRECTION_LETTERS, TWO_DIRECTION_CENTRALS, rules)


def _direction_form(ring: AlgebraRing, first: str, second: str) -> OperatorForm:
    algebra = ring.algebra
    return OperatorForm.constant(ring, 2, 1, {(0,): algebra.generator(first), (1,): algebra.generator(second)})


def formal_curvature_coefficient(l: int, k: int, exact_relation: bool = True) -> OperatorForm:
    """Degree-l coefficient of d beta + 1/2 [beta ^ beta] as a 2-form.

    beta_n = -((ik)^n/2k)(B - (-1)^n Bbar) with B = b1 du1 + b2 du2. The
    differentials of B and Bbar are supplied: d B = (1/4k)[B ^ Bbar] = -d Bbar,
    or d B = d Bbar = 0 when ``exact_relation`` is False.
    """
    if l < 1:
        raise ValueError(f"l must be positive, got {l}")
    ring = AlgebraRing(two_direction_algebra(k))
    B = _direction_form(ring, "b1", "b2")
    Bbar = _direction_form(ring, "bb1", "bb2")
    if exact_relation:
        dB = wedge_bracket(B, Bbar).scale(gaussian(rational(1, 4 * k)))
    else:
        dB = OperatorForm.zero(ring, 2, 2)
    dBbar = -dB

    def weight(n: int) -> GaussianRational:
        return i_power(k, n) * gaussian(rational(-1, 2 * k))

    def beta(n: int) -> OperatorForm:
        return (B - Bbar if n % 2 == 0 else B + Bbar).scale(weight(n))

    curvature = (dB - dBbar if l % 2 == 0 else dB + dBbar).scale(weight(l))
    half = gaussian(rational(1, 2))
    for n in range(1, l):
        curvature = curvature + wedge_bracket(beta(n), beta(l - n)).scale(half)
    return curvature


def formal_flatness_check(l: int, k: int, exact_relation: bool = True) -> AlgebraElement:
    """[K_l(du1, du2), D]; zero when the degree-l curvature acts trivially on D."""
    curvature = formal_curvature_coefficient(l, k, exact_relation)
    ring = curvature.ring
    component = curvature.component((0, 1)).terms.get((0, 0), ring.zero)
    return commutator(component, ring.algebra.generator("D"))


def summarize_residual(residual: Optional[AlgebraElement]) -> Tuple[bool, str]:
    """(passed, text) for an exact residual."""
    if residual is None or residual.is_zero():
        return True, "0"
    return False, residual.to_text()
