"""Polynomial curve functions f(x, y) on the plane."""

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np
import sympy
from sympy.polys.polyerrors import PolynomialError

from core.exceptions import NonPolynomialCoefficientError

Monomial = Tuple[int, int]

MAX_DEGREE = 4

_X, _Y = sympy.symbols("x y")


@dataclass(frozen=True, eq=False)
class CurveFunction:
    """sum c_ij x^i y^j with complex coefficients."""

    terms: Dict[Monomial, complex] = field(default_factory=dict)

    def __post_init__(self):
        cleaned = {}
        for (i, j), c in self.terms.items():
            if i < 0 or j < 0:
                raise NonPolynomialCoefficientError(f"negative exponent in x^{i} y^{j}")
            if c != 0:
                cleaned[(int(i), int(j))] = complex(c)
        object.__setattr__(self, "terms", cleaned)

    @classmethod
    def parse(cls, text: str) -> "CurveFunction":
        """Parse text such as "x**2 + y**2" in the variables x and y."""
        try:
            expr = sympy.sympify(text, locals={"x": _X, "y": _Y})
            poly = sympy.Poly(expr, _X, _Y)
        except (sympy.SympifyError, PolynomialError, TypeError) as e:
            raise NonPolynomialCoefficientError(f"{text!r} is not a polynomial in x, y: {e}") from e
        try:
            terms = {monom: complex(coeff) for monom, coeff in poly.as_dict().items()}
        except TypeError as e:
            raise NonPolynomialCoefficientError(f"{text!r} has non-numeric coefficients") from e
        return cls(terms)

    @classmethod
    def from_terms(cls, triples: Iterable[Sequence[Union[int, float]]]) -> "CurveFunction":
        """From [i, j, c] triples."""
        terms: Dict[Monomial, complex] = {}
        for i, j, c in triples:
            key = (int(i), int(j))
            terms[key] = terms.get(key, 0) + complex(c)
        return cls(terms)

    @property
    def degree(self) -> int:
        return max((i + j for i, j in self.terms), default=0)

    def is_constant(self) -> bool:
        return all(i + j == 0 for i, j in self.terms)

    def derivative(self, axis: int) -> "CurveFunction":
        """d/dx for axis 0, d/dy for axis 1."""
        terms: Dict[Monomial, complex] = {}
        for (i, j), c in self.terms.items():
            power = (i, j)[axis]
            if power == 0:
                continue
            key = (i - 1, j) if axis == 0 else (i, j - 1)
            terms[key] = terms.get(key, 0) + power * c
        return CurveFunction(terms)

    def gradient(self) -> List["CurveFunction"]:
        return [self.derivative(0), self.derivative(1)]

    def __add__(self, other: "CurveFunction") -> "CurveFunction":
        terms = dict(self.terms)
        for key, c in other.terms.items():
            terms[key] = terms.get(key, 0) + c
        return CurveFunction(terms)

    def scale(self, c: complex) -> "CurveFunction":
        return CurveFunction({key: c * v for key, v in self.terms.items()})

    def __mul__(self, other: "CurveFunction") -> "CurveFunction":
        terms: Dict[Monomial, complex] = {}
        for (i1, j1), c1 in self.terms.items():
            for (i2, j2), c2 in other.terms.items():
                key = (i1 + i2, j1 + j2)
                terms[key] = terms.get(key, 0) + c1 * c2
        return CurveFunction(terms)

    def laplacian(self, g_tilde: np.ndarray) -> "CurveFunction":
        """g~^{ab} d_a d_b f."""
        result = CurveFunction()
        for a in range(2):
            for b in range(2):
                if g_tilde[a, b] != 0:
                    result = result + self.derivative(a).derivative(b).scale(g_tilde[a, b])
        return result

    def raised_gradient(self, g_tilde: np.ndarray) -> List["CurveFunction"]:
        """Components of g~ df."""
        grad = self.gradient()
        return [grad[0].scale(g_tilde[a, 0]) + grad[1].scale(g_tilde[a, 1]) for a in range(2)]

    def evaluate(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        value = np.zeros(np.broadcast(x, y).shape, dtype=complex)
        for (i, j), c in self.terms.items():
            value = value + c * x ** i * y ** j
        return value

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CurveFunction):
            return NotImplemented
        return self.terms == other.terms

    __hash__ = None

    def __repr__(self) -> str:
        return f"CurveFunction({self.terms})"


def curve_function(value: Union[str, Sequence[Sequence[float]], CurveFunction]) -> CurveFunction:
    """Accept text, [i, j, c] triples or a CurveFunction; reject degree above 4."""
    if isinstance(value, CurveFunction):
        f = value
    elif isinstance(value, str):
        f = CurveFunction.parse(value)
    else:
        f = CurveFunction.from_terms(value)
    if f.degree > MAX_DEGREE:
        raise NonPolynomialCoefficientError(f"curve functions are limited to degree {MAX_DEGREE}, got {f.degree}")
    return f
