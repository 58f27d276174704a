"""Exact Gaussian-rational scalars.

Scalars are elements of sympy's ``QQ_I`` domain: complex numbers whose real
and imaginary parts are rationals. Integers are always lifted through
:func:`gaussian` before they meet a domain element.
"""

import re
from math import factorial
from typing import Union

import numpy as np
from sympy.polys.domains import QQ, QQ_I

GaussianRational = type(QQ_I.one)

ZERO = QQ_I.zero
ONE = QQ_I.one
I = QQ_I(0, 1)

_RATIONAL = r"[+-]?\d+(?:/\d+)?"
_GAUSSIAN_TEXT = re.compile(
    rf"^\s*(?P<re>{_RATIONAL})?\s*(?:(?P<sign>[+-])?\s*(?P<im>\d+(?:/\d+)?)\s*\*\s*i)?\s*$"
)

ScalarLike = Union[int, "GaussianRational"]


def rational(numerator: int, denominator: int = 1):
    """Exact rational numerator/denominator as a QQ element."""
    return QQ(int(numerator), int(denominator))


def gaussian(real: Union[int, object] = 0, imag: Union[int, object] = 0) -> GaussianRational:
    """Build a Gaussian rational from integer or QQ parts."""
    return QQ_I(real, imag)


def as_gaussian(value: ScalarLike) -> GaussianRational:
    """Lift an int (or pass through a Gaussian rational)."""
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, (int, np.integer)):
        return QQ_I(int(value), 0)
    raise TypeError(f"expected an int or Gaussian rational, got {type(value).__name__}")


def i_power(k: int, n: int, sign: int = 1) -> GaussianRational:
    """(sign * i * k) ** n."""
    return gaussian(0, sign * k) ** n


def inverse_factorial(n: int) -> GaussianRational:
    """1 / n!."""
    return gaussian(rational(1, factorial(n)))


def format_rational(q) -> str:
    """Exact ``p/q`` text of a QQ element."""
    return f"{int(q.numerator)}/{int(q.denominator)}"


def format_gaussian(z: GaussianRational) -> str:
    """Canonical text ``a/b+c/d*i`` of a Gaussian rational."""
    real = format_rational(z.x)
    imag_num = int(z.y.numerator)
    imag = f"{abs(imag_num)}/{int(z.y.denominator)}"
    sign = "-" if imag_num < 0 else "+"
    return f"{real}{sign}{imag}*i"


def _parse_rational(text: str):
    if "/" in text:
        num, den = text.split("/")
        return rational(int(num), int(den))
    return rational(int(text))


def parse_gaussian(text: str) -> GaussianRational:
    """Inverse of :func:`format_gaussian`; also accepts ``p/q`` and ``p``."""
    match = _GAUSSIAN_TEXT.match(text)
    if not match or (match.group("re") is None and match.group("im") is None):
        raise ValueError(f"not a Gaussian rational: {text!r}")
    real = _parse_rational(match.group("re")) if match.group("re") else rational(0)
    imag = rational(0)
    if match.group("im"):
        imag = _parse_rational(match.group("im"))
        if match.group("sign") == "-":
            imag = -imag
    return gaussian(real, imag)


def to_complex(z: GaussianRational) -> complex:
    """Floating-point value of a Gaussian rational."""
    return complex(
        int(z.x.numerator) / int(z.x.denominator),
        int(z.y.numerator) / int(z.y.denominator),
    )


def random_gaussian(rng: np.random.Generator, bound: int = 5) -> GaussianRational:
    """Random Gaussian rational with small numerators and denominators."""
    parts = []
    for _ in range(2):
        numerator = int(rng.integers(-bound, bound + 1))
        denominator = int(rng.integers(1, bound + 1))
        parts.append(rational(numerator, denominator))
    return gaussian(*parts)
