"""Operator-valued differential forms on a parameter space R^m.

A p-form stores one coefficient per strictly increasing index tuple I of
length p; each coefficient is a polynomial in the parameters x_1 .. x_m with
values in a coefficient ring (exact matrices or word-algebra elements).
Everything is exact, so the graded identities hold with zero tolerance.
"""

from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Callable, Dict, Mapping, Optional, Sequence, Tuple

import numpy as np
import sympy
from sympy.polys.domains import QQ_I
from sympy.polys.polyerrors import CoercionFailed, GeneratorsError, PolynomialError

from core.exceptions import NonPolynomialCoefficientError
from .algebra import CoefficientRing, GaussianRing
from .scalars import GaussianRational, as_gaussian, gaussian, rational

Exponents = Tuple[int, ...]
Index = Tuple[int, ...]


@dataclass(frozen=True, eq=False)
class ParameterPolynomial:
    """sum_e c_e x^e with ring-valued coefficients c_e."""

    ring: CoefficientRing
    dim: int
    terms: Mapping[Exponents, Any] = field(default_factory=dict)

    def __post_init__(self):
        cleaned: Dict[Exponents, Any] = {}
        for exps, coeff in self.terms.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.dim or any(e < 0 for e in exps):
                raise NonPolynomialCoefficientError(f"bad exponent vector {exps} for {self.dim} parameters")
            if not self.ring.is_zero(coeff):
                cleaned[exps] = coeff
        object.__setattr__(self, "terms", cleaned)

    @classmethod
    def zero(cls, ring: CoefficientRing, dim: int) -> "ParameterPolynomial":
        return cls(ring, dim, {})

    @classmethod
    def constant(cls, ring: CoefficientRing, dim: int, value: Any) -> "ParameterPolynomial":
        return cls(ring, dim, {(0,) * dim: value})

    @classmethod
    def from_expression(cls, text: str, dim: int) -> "ParameterPolynomial":
        """Scalar polynomial from text in the variables x1 .. xm."""
        gens = sympy.symbols(f"x1:{dim + 1}")
        try:
            expr = sympy.sympify(text, locals={str(g): g for g in gens})
            poly = sympy.Poly(expr, *gens, domain=QQ_I)
        except (sympy.SympifyError, PolynomialError, CoercionFailed, GeneratorsError) as e:
            raise NonPolynomialCoefficientError(f"{text!r} is not a polynomial in {gens}: {e}") from e
        terms = {monom: QQ_I.from_sympy(coeff) for monom, coeff in poly.as_dict().items()}
        return cls(GaussianRing(), dim, terms)

    def times(self, ring: CoefficientRing, value: Any) -> "ParameterPolynomial":
        """Scalar polynomial times a constant element of another ring."""
        return ParameterPolynomial(ring, self.dim, {e: ring.scale(c, value) for e, c in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def _check(self, other: "ParameterPolynomial") -> None:
        self.ring.check_same(other.ring)
        if self.dim != other.dim:
            raise ValueError(f"parameter dimensions differ: {self.dim} vs {other.dim}")

    def __add__(self, other: "ParameterPolynomial") -> "ParameterPolynomial":
        self._check(other)
        terms = dict(self.terms)
        for exps, coeff in other.terms.items():
            terms[exps] = self.ring.add(terms[exps], coeff) if exps in terms else coeff
        return ParameterPolynomial(self.ring, self.dim, terms)

    def __neg__(self) -> "ParameterPolynomial":
        return ParameterPolynomial(self.ring, self.dim, {e: self.ring.neg(c) for e, c in self.terms.items()})

    def __sub__(self, other: "ParameterPolynomial") -> "ParameterPolynomial":
        return self + (-other)

    def __mul__(self, other: "ParameterPolynomial") -> "ParameterPolynomial":
        self._check(other)
        terms: Dict[Exponents, Any] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exps = tuple(a + b for a, b in zip(e1, e2))
                product = self.ring.mul(c1, c2)
                terms[exps] = self.ring.add(terms[exps], product) if exps in terms else product
        return ParameterPolynomial(self.ring, self.dim, terms)

    def commutator(self, other: "ParameterPolynomial") -> "ParameterPolynomial":
        return self * other - other * self

    def scale(self, c: GaussianRational) -> "ParameterPolynomial":
        return ParameterPolynomial(self.ring, self.dim, {e: self.ring.scale(c, v) for e, v in self.terms.items()})

    def derivative(self, j: int) -> "ParameterPolynomial":
        """Partial derivative in x_{j+1}."""
        terms = {}
        for exps, coeff in self.terms.items():
            if exps[j] == 0:
                continue
            lowered = exps[:j] + (exps[j] - 1,) + exps[j + 1:]
            terms[lowered] = self.ring.scale(as_gaussian(exps[j]), coeff)
        return ParameterPolynomial(self.ring, self.dim, terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ParameterPolynomial):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None


def _merge_sign(first: Index, second: Index) -> int:
    """Sign of dx^I ^ dx^J = sign * dx^{sorted(I+J)}; 0 if they share an index."""
    if set(first) & set(second):
        return 0
    inversions = sum(1 for i in first for j in second if i > j)
    return -1 if inversions % 2 else 1


def _increasing(index: Index, dim: int) -> bool:
    return all(0 <= i < dim for i in index) and all(a < b for a, b in zip(index, index[1:]))


@dataclass(frozen=True, eq=False)
class OperatorForm:
    """A p-form on R^m with polynomial ring-valued coefficients."""

    degree: int
    dim: int
    ring: CoefficientRing
    components: Mapping[Index, ParameterPolynomial] = field(default_factory=dict)

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError(f"form degree must be non-negative, got {self.degree}")
        cleaned: Dict[Index, ParameterPolynomial] = {}
        for index, poly in self.components.items():
            index = tuple(index)
            if len(index) != self.degree or not _increasing(index, self.dim):
                raise ValueError(f"index {index} is not an increasing {self.degree}-tuple below {self.dim}")
            if poly.dim != self.dim:
                raise ValueError(f"component {index} lives on {poly.dim} parameters, form on {self.dim}")
            self.ring.check_same(poly.ring)
            if not poly.is_zero():
                cleaned[index] = poly
        object.__setattr__(self, "components", cleaned)

    @classmethod
    def zero(cls, ring: CoefficientRing, dim: int, degree: int) -> "OperatorForm":
        return cls(degree, dim, ring, {})

    @classmethod
    def constant(cls, ring: CoefficientRing, dim: int, degree: int, values: Mapping[Index, Any]) -> "OperatorForm":
        """Form with parameter-independent coefficients."""
        return cls(degree, dim, ring, {
            tuple(index): ParameterPolynomial.constant(ring, dim, value) for index, value in values.items()
        })

    def component(self, index: Index) -> ParameterPolynomial:
        return self.components.get(tuple(index), ParameterPolynomial.zero(self.ring, self.dim))

    def is_zero(self) -> bool:
        return not self.components

    def _check(self, other: "OperatorForm") -> None:
        self.ring.check_same(other.ring)
        if self.dim != other.dim:
            raise ValueError(f"forms live on different parameter spaces: {self.dim} vs {other.dim}")

    def __add__(self, other: "OperatorForm") -> "OperatorForm":
        self._check(other)
        if self.degree != other.degree:
            raise ValueError(f"cannot add forms of degree {self.degree} and {other.degree}")
        components = dict(self.components)
        for index, poly in other.components.items():
            components[index] = components[index] + poly if index in components else poly
        return OperatorForm(self.degree, self.dim, self.ring, components)

    def __neg__(self) -> "OperatorForm":
        return OperatorForm(self.degree, self.dim, self.ring, {i: -p for i, p in self.components.items()})

    def __sub__(self, other: "OperatorForm") -> "OperatorForm":
        return self + (-other)

    def scale(self, c: GaussianRational) -> "OperatorForm":
        return OperatorForm(self.degree, self.dim, self.ring, {i: p.scale(c) for i, p in self.components.items()})

    def signed(self, sign: int) -> "OperatorForm":
        return self if sign > 0 else -self

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OperatorForm):
            return NotImplemented
        return self.degree == other.degree and (self - other).is_zero()

    __hash__ = None


def _combine(
    phi: OperatorForm,
    psi: OperatorForm,
    product: Callable[[ParameterPolynomial, ParameterPolynomial], ParameterPolynomial],
) -> OperatorForm:
    phi._check(psi)
    degree = phi.degree + psi.degree
    if degree > phi.dim:
        return OperatorForm.zero(phi.ring, phi.dim, degree)
    components: Dict[Index, ParameterPolynomial] = {}
    for index_a, a in phi.components.items():
        for index_b, b in psi.components.items():
            sign = _merge_sign(index_a, index_b)
            if not sign:
                continue
            term = product(a, b)
            if sign < 0:
                term = -term
            merged = tuple(sorted(index_a + index_b))
            components[merged] = components[merged] + term if merged in components else term
    return OperatorForm(degree, phi.dim, phi.ring, components)


def wedge_product(phi: OperatorForm, psi: OperatorForm) -> OperatorForm:
    """sum phi_I psi_J dx^I ^ dx^J."""
    return _combine(phi, psi, lambda a, b: a * b)


def wedge_bracket(phi: OperatorForm, psi: OperatorForm) -> OperatorForm:
    """[phi ^ psi] = sum [phi_I, psi_J] dx^I ^ dx^J."""
    return _combine(phi, psi, lambda a, b: a.commutator(b))


def exterior_d(phi: OperatorForm) -> OperatorForm:
    """sum_I sum_j d_j phi_I dx^j ^ dx^I."""
    degree = phi.degree + 1
    if degree > phi.dim:
        return OperatorForm.zero(phi.ring, phi.dim, degree)
    components: Dict[Index, ParameterPolynomial] = {}
    for index, poly in phi.components.items():
        for j in range(phi.dim):
            if j in index:
                continue
            term = poly.derivative(j)
            if term.is_zero():
                continue
            if _merge_sign((j,), index) < 0:
                term = -term
            merged = tuple(sorted((j,) + index))
            components[merged] = components[merged] + term if merged in components else term
    return OperatorForm(degree, phi.dim, phi.ring, components)


def twisted_d(phi: OperatorForm, connection: Optional[OperatorForm] = None) -> OperatorForm:
    """d phi + [A ^ phi]; A = None is the untwisted differential."""
    result = exterior_d(phi)
    if connection is None:
        return result
    if connection.degree != 1:
        raise ValueError("the twisting form must be a 1-form")
    return result + wedge_bracket(connection, phi)


def curvature(connection: OperatorForm) -> OperatorForm:
    """dA + 1/2 [A ^ A]."""
    return exterior_d(connection) + wedge_bracket(connection, connection).scale(gaussian(rational(1, 2)))


def graded_sign(n: int) -> int:
    return -1 if n % 2 else 1


def antisymmetry_check(phi: OperatorForm, psi: OperatorForm) -> OperatorForm:
    """[phi ^ psi] + (-1)^{ab} [psi ^ phi]; vanishes identically."""
    return wedge_bracket(phi, psi) + wedge_bracket(psi, phi).signed(graded_sign(phi.degree * psi.degree))


def leibniz_check(phi: OperatorForm, psi: OperatorForm) -> OperatorForm:
    """d[phi ^ psi] - [d phi ^ psi] - (-1)^a [phi ^ d psi]."""
    return (
        exterior_d(wedge_bracket(phi, psi))
        - wedge_bracket(exterior_d(phi), psi)
        - wedge_bracket(phi, exterior_d(psi)).signed(graded_sign(phi.degree))
    )


def jacobi_check(phi: OperatorForm, psi: OperatorForm, rho: OperatorForm) -> OperatorForm:
    """Graded Jacobi sum (-1)^{ac}[phi^[psi^rho]] + (-1)^{ba}[psi^[rho^phi]] + (-1)^{cb}[rho^[phi^psi]]."""
    a, b, c = phi.degree, psi.degree, rho.degree
    return (
        wedge_bracket(phi, wedge_bracket(psi, rho)).signed(graded_sign(a * c))
        + wedge_bracket(psi, wedge_bracket(rho, phi)).signed(graded_sign(b * a))
        + wedge_bracket(rho, wedge_bracket(phi, psi)).signed(graded_sign(c * b))
    )


def twisted_square_check(phi: OperatorForm, connection: OperatorForm) -> OperatorForm:
    """d_A d_A phi - [F_A ^ phi] with F_A the curvature of A."""
    return twisted_d(twisted_d(phi, connection), connection) - wedge_bracket(curvature(connection), phi)


def random_polynomial(
    rng: np.random.Generator,
    ring: CoefficientRing,
    dim: int,
    sample: Callable[[np.random.Generator], Any],
    max_degree: int = 2,
    terms: int = 3,
) -> ParameterPolynomial:
    poly = ParameterPolynomial.zero(ring, dim)
    for _ in range(terms):
        exps = tuple(int(e) for e in rng.integers(0, max_degree + 1, size=dim))
        poly = poly + ParameterPolynomial(ring, dim, {exps: sample(rng)})
    return poly


def random_form(
    rng: np.random.Generator,
    ring: CoefficientRing,
    dim: int,
    degree: int,
    sample: Callable[[np.random.Generator], Any],
    max_degree: int = 2,
) -> OperatorForm:
    """Form with a random polynomial on every increasing index tuple."""
    components = {
        index: random_polynomial(rng, ring, dim, sample, max_degree)
        for index in combinations(range(dim), degree)
    }
    return OperatorForm(degree, dim, ring, components)


DEGREE_PROFILES: Sequence[Tuple[int, ...]] = ((0, 0, 0), (1, 0, 0), (1, 1, 0), (1, 1, 1), (2, 1, 0))


def run_identity_trials(
    rng: np.random.Generator,
    ring: CoefficientRing,
    dim: int,
    sample: Callable[[np.random.Generator], Any],
    trials: int,
    profiles: Sequence[Tuple[int, ...]] = DEGREE_PROFILES,
) -> Dict[str, int]:
    """Count failures of each graded identity over random forms."""
    failures = {"antisymmetry": 0, "leibniz": 0, "jacobi": 0, "twisted_square": 0}
    for profile in profiles:
        if max(profile) > dim:
            continue
        for _ in range(trials):
            phi, psi, rho = (random_form(rng, ring, dim, p, sample) for p in profile)
            connection = random_form(rng, ring, dim, 1, sample)
            failures["antisymmetry"] += not antisymmetry_check(phi, psi).is_zero()
            failures["leibniz"] += not leibniz_check(phi, psi).is_zero()
            failures["jacobi"] += not jacobi_check(phi, psi, rho).is_zero()
            failures["twisted_square"] += not twisted_square_check(phi, connection).is_zero()
    return failures
