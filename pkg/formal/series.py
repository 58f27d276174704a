"""Truncated formal power series in 1/s over a pluggable coefficient ring.

The coefficient of index n multiplies s^(-n). Every series carries an explicit
truncation order L and operations never extrapolate beyond the smaller order
of their inputs.
"""

import cmath
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Iterable, List, Sequence, Tuple

from core.exceptions import BranchPointError
from .algebra import CoefficientRing, GaussianRing
from .scalars import (
    ONE,
    ZERO,
    GaussianRational,
    format_rational,
    gaussian,
    i_power,
    inverse_factorial,
    rational,
    to_complex,
)

SCALARS = GaussianRing()


@dataclass(frozen=True, eq=False)
class FormalSeries:
    """Coefficients c_0 .. c_L of sum_n c_n s^(-n)."""

    ring: CoefficientRing
    coefficients: Tuple[Any, ...]

    def __post_init__(self):
        if not self.coefficients:
            raise ValueError("a formal series needs at least the index-0 coefficient")
        object.__setattr__(self, "coefficients", tuple(self.coefficients))

    # ------------------------------------------------------------------
    # Constructors

    @classmethod
    def from_coefficients(cls, ring: CoefficientRing, coefficients: Iterable[Any]) -> "FormalSeries":
        return cls(ring, tuple(coefficients))

    @classmethod
    def zero(cls, ring: CoefficientRing, order: int) -> "FormalSeries":
        return cls(ring, (ring.zero,) * (order + 1))

    @classmethod
    def one(cls, ring: CoefficientRing, order: int) -> "FormalSeries":
        return cls.constant(ring, order, ring.one)

    @classmethod
    def constant(cls, ring: CoefficientRing, order: int, value: Any) -> "FormalSeries":
        return cls.monomial(ring, order, 0, value)

    @classmethod
    def monomial(cls, ring: CoefficientRing, order: int, index: int, value: Any) -> "FormalSeries":
        coefficients = [ring.zero] * (order + 1)
        if index <= order:
            coefficients[index] = value
        return cls(ring, tuple(coefficients))

    # ------------------------------------------------------------------

    @property
    def truncation_order(self) -> int:
        return len(self.coefficients) - 1

    def __getitem__(self, index: int) -> Any:
        return self.coefficients[index]

    def __len__(self) -> int:
        return len(self.coefficients)

    def truncate(self, order: int) -> "FormalSeries":
        if order > self.truncation_order:
            raise ValueError(f"cannot extend a series of order {self.truncation_order} to {order}")
        return FormalSeries(self.ring, self.coefficients[:order + 1])

    def map(self, fn: Callable[[Any], Any], ring: CoefficientRing = None) -> "FormalSeries":
        """Apply fn to every coefficient."""
        return FormalSeries(ring or self.ring, tuple(fn(c) for c in self.coefficients))

    def lift(self, ring: CoefficientRing) -> "FormalSeries":
        """Embed a scalar series into another ring through from_scalar."""
        return self.map(ring.from_scalar, ring)

    def is_zero(self) -> bool:
        return all(self.ring.is_zero(c) for c in self.coefficients)

    def nonzero_degrees(self) -> List[int]:
        return [n for n, c in enumerate(self.coefficients) if not self.ring.is_zero(c)]

    # ------------------------------------------------------------------
    # Arithmetic

    def __add__(self, other: "FormalSeries") -> "FormalSeries":
        return series_add(self, other)

    def __neg__(self) -> "FormalSeries":
        return self.map(self.ring.neg)

    def __sub__(self, other: "FormalSeries") -> "FormalSeries":
        return series_add(self, -other)

    def __mul__(self, other: "FormalSeries") -> "FormalSeries":
        return series_mul(self, other)

    def scale(self, c: GaussianRational) -> "FormalSeries":
        return self.map(lambda a: self.ring.scale(c, a))

    def power(self, n: int) -> "FormalSeries":
        result = FormalSeries.one(self.ring, self.truncation_order)
        for _ in range(n):
            result = result * self
        return result

    def exp(self) -> "FormalSeries":
        """exp of a series with vanishing constant term, by the exponential series."""
        if not self.ring.is_zero(self.coefficients[0]):
            raise ValueError("exp needs a vanishing constant term")
        order = self.truncation_order
        result = FormalSeries.one(self.ring, order)
        term = FormalSeries.one(self.ring, order)
        for n in range(1, order + 1):
            # x^n starts at degree n, so terms beyond the order vanish
            term = term * self
            result = result + term.scale(inverse_factorial(n))
        return result

    def inverse(self) -> "FormalSeries":
        """Multiplicative inverse; needs an invertible constant term."""
        ring = self.ring
        lead_inverse = ring.inv(self.coefficients[0])
        inverse: List[Any] = [lead_inverse]
        for n in range(1, len(self.coefficients)):
            acc = ring.zero
            for j in range(1, n + 1):
                acc = ring.add(acc, ring.mul(self.coefficients[j], inverse[n - j]))
            inverse.append(ring.neg(ring.mul(lead_inverse, acc)))
        return FormalSeries(ring, tuple(inverse))

    def evaluate(self, s: complex) -> complex:
        """Numeric value of a scalar series at s."""
        return sum(to_complex(c) * s ** (-n) for n, c in enumerate(self.coefficients))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FormalSeries):
            return NotImplemented
        if self.ring != other.ring:
            return False
        order = min(self.truncation_order, other.truncation_order)
        return all(self.ring.eq(a, b) for a, b in zip(self.coefficients[:order + 1], other.coefficients[:order + 1]))

    __hash__ = None

    def __repr__(self) -> str:
        return f"FormalSeries({self.ring.name}, L={self.truncation_order})"


def series_add(a: FormalSeries, b: FormalSeries) -> FormalSeries:
    """Coefficient-wise sum truncated to the smaller order."""
    a.ring.check_same(b.ring)
    ring = a.ring
    return FormalSeries(ring, tuple(ring.add(x, y) for x, y in zip(a.coefficients, b.coefficients)))


def series_mul(a: FormalSeries, b: FormalSeries) -> FormalSeries:
    """Cauchy product truncated to the smaller order; left factors come from a."""
    a.ring.check_same(b.ring)
    ring = a.ring
    order = min(a.truncation_order, b.truncation_order)
    product = []
    for n in range(order + 1):
        acc = ring.zero
        for j in range(n + 1):
            left, right = a.coefficients[j], b.coefficients[n - j]
            if ring.is_zero(left) or ring.is_zero(right):
                continue
            acc = ring.add(acc, ring.mul(left, right))
        product.append(acc)
    return FormalSeries(ring, tuple(product))


def _check_level(k: int) -> None:
    if k < 1:
        raise ValueError(f"level k must be a positive integer, got {k}")


def inv_t_series(k: int, order: int, conjugate: bool = False) -> FormalSeries:
    """1/t = -(1/k) sum_{n>=1} (ik/s)^n, or 1/tbar with i replaced by -i."""
    _check_level(k)
    sign = -1 if conjugate else 1
    scale = gaussian(rational(-1, k))
    coefficients = [ZERO] + [scale * i_power(k, n, sign) for n in range(1, order + 1)]
    return FormalSeries(SCALARS, tuple(coefficients))


def r_series(k: int, order: int) -> FormalSeries:
    """r = (1/2k) sum_n (ik)^(2n+1)/(2n+1) s^-(2n+1); only odd indices are nonzero."""
    _check_level(k)
    coefficients = [ZERO] * (order + 1)
    for index in range(1, order + 1, 2):
        coefficients[index] = i_power(k, index) * gaussian(rational(1, 2 * k * index))
    return FormalSeries(SCALARS, tuple(coefficients))


def times_t(series: FormalSeries, k: int, conjugate: bool = False) -> FormalSeries:
    """Multiply a scalar series by t = k + is (or tbar = k - is).

    The s factor shifts indices down by one, so the result has order L - 1.
    """
    i_part = gaussian(0, -1 if conjugate else 1)
    c = series.coefficients
    shifted = [gaussian(k) * c[n] + i_part * c[n + 1] for n in range(series.truncation_order)]
    return FormalSeries(series.ring, tuple(shifted))


def times_t_bar(series: FormalSeries, k: int) -> FormalSeries:
    return times_t(series, k, conjugate=True)


def exponential_series(w: GaussianRational, order: int) -> FormalSeries:
    """Taylor coefficients of exp(w z) in z, up to z^order."""
    return FormalSeries.monomial(SCALARS, order, 1, w).exp()


def phi_taylor(k: int, order: int, sign: int = 1) -> FormalSeries:
    """Taylor coefficients of phi(z) = (sign ik) z (e^{2 sign ikz}+1)/(e^{2 sign ikz}-1).

    Computed as (sign ik)(E + 1) divided by (E - 1)/z with E = exp(2 sign ik z).
    """
    _check_level(k)
    w = gaussian(0, 2 * sign * k)
    exponential = exponential_series(w, order + 1).coefficients
    numerator = [gaussian(0, sign * k) * (exponential[n] + (ONE if n == 0 else ZERO)) for n in range(order + 1)]
    denominator = [exponential[n + 1] for n in range(order + 1)]
    return FormalSeries(SCALARS, tuple(numerator)) * FormalSeries(SCALARS, tuple(denominator)).inverse()


def rho_series(k: int, order: int) -> FormalSeries:
    """rho(s) = sum_m (ik)^(2m)/(2m+1) s^-(2m+1)."""
    coefficients = [ZERO] * (order + 1)
    for index in range(1, order + 1, 2):
        coefficients[index] = i_power(k, index - 1) * gaussian(rational(1, index))
    return FormalSeries(SCALARS, tuple(coefficients))


@lru_cache(maxsize=64)
def _rho_powers(k: int, order: int) -> Tuple[FormalSeries, ...]:
    rho = rho_series(k, order)
    powers = [FormalSeries.one(SCALARS, order)]
    for _ in range(order):
        powers.append(powers[-1] * rho)
    return tuple(powers)


def rho_power_coefficient(k: int, l: int, n: int) -> GaussianRational:
    """[s^-l] rho(s)^n; zero when l < n or l - n is odd."""
    _check_level(k)
    if l < 0 or n < 0:
        raise ValueError("l and n must be non-negative")
    if l < n or (l - n) % 2:
        return ZERO
    return _rho_powers(k, l)[n].coefficients[l]


def r_exact(k: int, s: float) -> complex:
    """r with e^{4kr} = -tbar/t from the principal logarithm."""
    _check_level(k)
    if s == 0:
        raise BranchPointError("s = 0 puts -tbar/t = -1 on the branch cut")
    t = complex(k, s)
    return cmath.log(-t.conjugate() / t) / (4 * k)


def series_rows(name: str, series: FormalSeries) -> List[dict]:
    """CSV rows (name, index, re, im) of a scalar series."""
    return [
        {"series": name, "index": n, "re": format_rational(c.x), "im": format_rational(c.y)}
        for n, c in enumerate(series.coefficients)
    ]


def scalar_series(coefficients: Sequence[GaussianRational]) -> FormalSeries:
    return FormalSeries(SCALARS, tuple(coefficients))
