"""Polynomial-coefficient differential operators and their total symbols.

A PolyOp is kept in normal order, functions to the left of covariant
derivatives and nabla_x to the left of nabla_y:

    D = sum c_{ijab} x^i y^j nabla_x^a nabla_y^b.

With nabla_x = d_x + (ik/2) y and nabla_y = d_y - (ik/2) x the reordering
rules are [nabla_x, x] = [nabla_y, y] = 1, [nabla_x, y] = [nabla_y, x] = 0 and
[nabla_y, nabla_x] = ik. The order-n symbol is the totally symmetric tensor T_n
with D = sum_n nabla^n_{T_n}, where nabla^n_T = T^{a_1..a_n} nabla_{a_1}..nabla_{a_n}.
A symmetric 2-tensor in the plane is stored by its n + 1 distinct components,
component j having j indices equal to y.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb, factorial
from typing import Dict, List, Tuple

import numpy as np

from formal.scalars import gaussian, i_power, rational, to_complex

from .functions import CurveFunction

Key = Tuple[int, int, int, int]
Monomial = Tuple[int, int]
Polynomial = Dict[Monomial, object]


def _falling(p: int, m: int) -> int:
    result = 1
    for step in range(m):
        result *= p - step
    return result


@dataclass(frozen=True, eq=False)
class PolyOp:
    """Normal-ordered operator over exact Gaussian rationals or complex floats."""

    level: int
    exact: bool = True
    terms: Dict[Key, object] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "terms", {key: c for key, c in self.terms.items() if c})

    # scalar helpers -------------------------------------------------------

    def lift(self, n: int):
        return gaussian(n) if self.exact else complex(n)

    def ik_power(self, n: int):
        return i_power(self.level, n) if self.exact else (1j * self.level) ** n

    def reciprocal(self, n: int):
        return gaussian(rational(1, n)) if self.exact else 1.0 / n

    def _like(self, terms: Dict[Key, object]) -> "PolyOp":
        return PolyOp(self.level, self.exact, terms)

    # construction ---------------------------------------------------------

    @classmethod
    def nabla(cls, level: int, axis: int, exact: bool = True) -> "PolyOp":
        key = (0, 0, 1, 0) if axis == 0 else (0, 0, 0, 1)
        op = cls(level, exact)
        return op._like({key: op.lift(1)})

    @classmethod
    def multiplication(cls, level: int, poly: Polynomial, exact: bool = True) -> "PolyOp":
        """M_f for f given as {(i, j): coefficient}."""
        return cls(level, exact, {(i, j, 0, 0): c for (i, j), c in poly.items()})

    @classmethod
    def from_curve_function(cls, level: int, f: CurveFunction) -> "PolyOp":
        return cls.multiplication(level, dict(f.terms), exact=False)

    @classmethod
    def second_order(cls, level: int, tensor, exact: bool = False) -> "PolyOp":
        """T^{ab} nabla_a nabla_b for a constant tensor."""
        nx = cls.nabla(level, 0, exact)
        ny = cls.nabla(level, 1, exact)
        return (
            (nx * nx).scale(tensor[0][0])
            + (nx * ny).scale(tensor[0][1])
            + (ny * nx).scale(tensor[1][0])
            + (ny * ny).scale(tensor[1][1])
        )

    # algebra --------------------------------------------------------------

    @property
    def order(self) -> int:
        return max((a + b for _, _, a, b in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "PolyOp") -> "PolyOp":
        terms = dict(self.terms)
        for key, c in other.terms.items():
            terms[key] = terms[key] + c if key in terms else c
        return self._like(terms)

    def __neg__(self) -> "PolyOp":
        return self._like({key: -c for key, c in self.terms.items()})

    def __sub__(self, other: "PolyOp") -> "PolyOp":
        return self + (-other)

    def scale(self, c) -> "PolyOp":
        return self._like({key: c * v for key, v in self.terms.items()})

    def __mul__(self, other: "PolyOp") -> "PolyOp":
        """Composition self o other, renormalized."""
        if self.level != other.level:
            raise ValueError(f"levels differ: {self.level} != {other.level}")
        terms: Dict[Key, object] = {}
        for (i, j, a, b), c1 in self.terms.items():
            for (p, q, c, d), c2 in other.terms.items():
                base = c1 * c2
                for m in range(min(a, p) + 1):
                    x_factor = comb(a, m) * _falling(p, m)
                    for n in range(min(b, q) + 1):
                        y_factor = comb(b, n) * _falling(q, n)
                        for u in range(min(b - n, c) + 1):
                            weight = x_factor * y_factor * factorial(u) * comb(b - n, u) * comb(c, u)
                            key = (i + p - m, j + q - n, a - m + c - u, b - n - u + d)
                            value = base * self.lift(weight) * self.ik_power(u)
                            terms[key] = terms[key] + value if key in terms else value
        return self._like(terms)

    def coefficient(self, a: int, b: int) -> Polynomial:
        """Polynomial coefficient of nabla_x^a nabla_y^b."""
        return {(i, j): c for (i, j, aa, bb), c in self.terms.items() if (aa, bb) == (a, b)}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyOp):
            return NotImplemented
        return self.level == other.level and not (self - other).terms

    __hash__ = None

    def __repr__(self) -> str:
        return f"PolyOp(k={self.level}, order={self.order}, terms={len(self.terms)})"


def poly_commutator(first: PolyOp, second: PolyOp) -> PolyOp:
    return first * second - second * first


@lru_cache(maxsize=None)
def _symmetric_word(level: int, exact: bool, n: int, j: int) -> PolyOp:
    """Sum of the comb(n, j) distinct words with j nabla_y and n - j nabla_x."""
    nabla = (PolyOp.nabla(level, 0, exact), PolyOp.nabla(level, 1, exact))
    total = PolyOp(level, exact)
    for y_positions in combinations(range(n), j):
        word = PolyOp(level, exact, {(0, 0, 0, 0): total.lift(1)})
        for position in range(n):
            word = word * nabla[1 if position in y_positions else 0]
        total = total + word
    return total


@dataclass(frozen=True)
class SymbolTensor:
    """Totally symmetric order-n tensor with polynomial components."""

    order: int
    components: Tuple[Polynomial, ...]

    def is_zero(self) -> bool:
        return all(not any(c for c in poly.values()) for poly in self.components)

    def full_array(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Evaluate to shape grid + (2,) * order."""
        shape = np.broadcast(x, y).shape
        values = []
        for poly in self.components:
            value = np.zeros(shape, dtype=complex)
            for (i, j), c in poly.items():
                value = value + _as_complex(c) * x ** i * y ** j
            values.append(value)
        array = np.zeros(shape + (2,) * self.order, dtype=complex)
        for index in np.ndindex(*((2,) * self.order)):
            array[(...,) + index] = values[sum(index)]
        return array


def _as_complex(c) -> complex:
    if isinstance(c, (int, float, complex, np.number)):
        return complex(c)
    return to_complex(c)


def symbol_decompose(op: PolyOp) -> List[SymbolTensor]:
    """Total symbols sigma_0 .. sigma_n, top order first peeled off."""
    remainder = op
    symbols: Dict[int, SymbolTensor] = {}
    for n in range(op.order, -1, -1):
        components = []
        for j in range(n + 1):
            poly = remainder.coefficient(n - j, j)
            inverse = op.reciprocal(comb(n, j))
            components.append({mono: c * inverse for mono, c in poly.items()})
        symbol = SymbolTensor(n, tuple(components))
        symbols[n] = symbol
        remainder = remainder - _symbol_operator(op.level, op.exact, symbol)
        # the top order cancels exactly in rational mode and up to rounding in float mode
        remainder = remainder._like({key: c for key, c in remainder.terms.items() if key[2] + key[3] < n})
    if remainder.terms:
        raise ArithmeticError(f"symbol decomposition left {len(remainder.terms)} terms")
    return [symbols[n] for n in range(op.order + 1)]


def _symbol_operator(level: int, exact: bool, symbol: SymbolTensor) -> PolyOp:
    total = PolyOp(level, exact)
    for j, poly in enumerate(symbol.components):
        if poly:
            total = total + PolyOp.multiplication(level, poly, exact) * _symmetric_word(level, exact, symbol.order, j)
    return total


def from_symbols(level: int, symbols: List[SymbolTensor], exact: bool = True) -> PolyOp:
    """sum_n nabla^n_{sigma_n}."""
    total = PolyOp(level, exact)
    for symbol in symbols:
        total = total + _symbol_operator(level, exact, symbol)
    return total


def _metric_norm(array: np.ndarray, g: np.ndarray, order: int) -> np.ndarray:
    """Pointwise sqrt(g_{a1b1}..g_{anbn} T^{a..} conj(T^{b..}))."""
    grid_ndim = array.ndim - order
    lowered = array
    for position in range(grid_ndim, array.ndim):
        lowered = np.moveaxis(np.tensordot(lowered, g, axes=([position], [0])), -1, position)
    product = (lowered * np.conj(array)).reshape(array.shape[:grid_ndim] + (-1,))
    return np.sqrt(np.abs(product.sum(axis=-1)))


def symbol_norm(op: PolyOp, g_tilde: np.ndarray, radius: float, points: int = 41) -> float:
    """Sum over orders of the sup on [-R, R]^2 of the g-norm of each symbol.

    The sup is taken over a ``points`` x ``points`` grid that includes the corners,
    so the value is a lower bound for the exact sup and tightens as ``points`` grows.
    """
    if radius <= 0:
        raise ValueError(f"box radius must be positive, got {radius}")
    if op.is_zero():
        return 0.0
    g = np.linalg.inv(np.asarray(g_tilde, dtype=float))
    axis = np.linspace(-radius, radius, points)
    x, y = np.meshgrid(axis, axis, indexing="ij")
    total = 0.0
    for symbol in symbol_decompose(op):
        if symbol.is_zero():
            continue
        array = symbol.full_array(x, y)
        total += float(np.max(_metric_norm(array, g, symbol.order)))
    return total


def random_polyop(rng: np.random.Generator, level: int, max_order: int = 4, max_degree: int = 3, terms: int = 6) -> PolyOp:
    """Random exact PolyOp with small Gaussian-integer coefficients."""
    op = PolyOp(level, True)
    result = {}
    for _ in range(terms):
        n = int(rng.integers(0, max_order + 1))
        a = int(rng.integers(0, n + 1))
        d = int(rng.integers(0, max_degree + 1))
        i = int(rng.integers(0, d + 1))
        c = gaussian(int(rng.integers(-3, 4)), int(rng.integers(-3, 4)))
        key = (i, d - i, a, n - a)
        result[key] = result[key] + c if key in result else c
    return op._like(result)
