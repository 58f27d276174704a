"""Coefficient rings and a small noncommutative word-rewriting algebra.

A :class:`WordAlgebra` has ordinary letters, commuting central symbols and
pairwise rewrite rules ``y x -> x y + lower terms``. Elements are kept in
normal form: a finite map from ``(word, central exponents)`` to a Gaussian
rational coefficient.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from sympy.polys.domains import QQ_I
from sympy.polys.matrices import DomainMatrix

from core.exceptions import LevelMismatchError, RingMismatchError
from .scalars import ONE, ZERO, GaussianRational, as_gaussian, format_gaussian

Word = Tuple[str, ...]
Centrals = Tuple[int, ...]
TermKey = Tuple[Word, Centrals]
RawTerms = Mapping[TermKey, GaussianRational]

STRATEGIES = ("leftmost", "rightmost")
REDUCTION_CACHE_SIZE = 1 << 16


class CoefficientRing(ABC):
    """Minimal ring contract used by formal series and forms."""

    name: str = "ring"

    @property
    @abstractmethod
    def zero(self) -> Any:
        """Additive identity."""

    @property
    @abstractmethod
    def one(self) -> Any:
        """Multiplicative identity."""

    @abstractmethod
    def add(self, a: Any, b: Any) -> Any:
        """a + b."""

    @abstractmethod
    def neg(self, a: Any) -> Any:
        """-a."""

    @abstractmethod
    def mul(self, a: Any, b: Any) -> Any:
        """a * b, left factor first."""

    @abstractmethod
    def eq(self, a: Any, b: Any) -> bool:
        """Exact equality."""

    @abstractmethod
    def from_scalar(self, c: GaussianRational) -> Any:
        """Embed a Gaussian rational as c times the identity."""

    def sub(self, a: Any, b: Any) -> Any:
        return self.add(a, self.neg(b))

    def scale(self, c: GaussianRational, a: Any) -> Any:
        return self.mul(self.from_scalar(c), a)

    def is_zero(self, a: Any) -> bool:
        return self.eq(a, self.zero)

    def inv(self, a: Any) -> Any:
        raise ArithmeticError(f"{self.name} has no general inverse")

    def check_same(self, other: "CoefficientRing") -> None:
        if self != other:
            raise RingMismatchError(f"ring mismatch: {self.name} vs {other.name}")


@dataclass(frozen=True)
class GaussianRing(CoefficientRing):
    """Exact scalars QQ(i)."""

    name: str = "QQ_I"

    @property
    def zero(self) -> GaussianRational:
        return ZERO

    @property
    def one(self) -> GaussianRational:
        return ONE

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def eq(self, a, b) -> bool:
        return a == b

    def from_scalar(self, c):
        return as_gaussian(c)

    def scale(self, c, a):
        return as_gaussian(c) * a

    def is_zero(self, a) -> bool:
        return not a

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("inverse of zero")
        return ONE / a


@dataclass(frozen=True)
class MatrixRing(CoefficientRing):
    """Exact square matrices over QQ_I (sympy DomainMatrix)."""

    size: int = 2
    name: str = "Mat(QQ_I)"

    def _diagonal(self, c: GaussianRational) -> DomainMatrix:
        rows = [[c if i == j else ZERO for j in range(self.size)] for i in range(self.size)]
        return DomainMatrix(rows, (self.size, self.size), QQ_I)

    @property
    def zero(self) -> DomainMatrix:
        return self._diagonal(ZERO)

    @property
    def one(self) -> DomainMatrix:
        return self._diagonal(ONE)

    def add(self, a, b):
        return a.add(b)

    def neg(self, a):
        return a.neg()

    def mul(self, a, b):
        return a.matmul(b)

    def eq(self, a, b) -> bool:
        return a == b

    def from_scalar(self, c):
        return self._diagonal(as_gaussian(c))

    def from_entries(self, entries: Sequence[Sequence[GaussianRational]]) -> DomainMatrix:
        return DomainMatrix([list(row) for row in entries], (self.size, self.size), QQ_I)

    def random(self, rng: np.random.Generator, bound: int = 3) -> DomainMatrix:
        """Random matrix with small Gaussian-integer entries."""
        entries = [
            [QQ_I(int(rng.integers(-bound, bound + 1)), int(rng.integers(-bound, bound + 1)))
             for _ in range(self.size)]
            for _ in range(self.size)
        ]
        return self.from_entries(entries)


def _add_exponents(a: Centrals, b: Centrals) -> Centrals:
    return tuple(x + y for x, y in zip(a, b))


def _accumulate(target: Dict[TermKey, GaussianRational], key: TermKey, coeff: GaussianRational) -> None:
    value = target.get(key, ZERO) + coeff
    if value:
        target[key] = value
    else:
        target.pop(key, None)


class WordAlgebra:
    """Free algebra on letters modulo pairwise rewrite rules, with central symbols.

    ``rules`` maps an adjacent pair ``(y, x)`` to the replacement of ``y x`` as a
    list of ``(coefficient, word, central exponents)``. Each rule must lower the
    number of inversions against the letter order so that rewriting terminates.
    """

    def __init__(
        self,
        name: str,
        level: int,
        letters: Sequence[str],
        centrals: Sequence[str] = (),
        rules: Optional[Mapping[Tuple[str, str], Sequence[Tuple[GaussianRational, Word, Centrals]]]] = None,
        cache_size: int = REDUCTION_CACHE_SIZE,
    ):
        if level < 1:
            raise ValueError(f"level must be a positive integer, got {level}")
        self.name = name
        self.level = level
        self.letters: Tuple[str, ...] = tuple(letters)
        self.centrals: Tuple[str, ...] = tuple(centrals)
        self.rules = {pair: tuple(rhs) for pair, rhs in (rules or {}).items()}
        self._no_centrals: Centrals = (0,) * len(self.centrals)
        self._reducers = {s: self._make_reducer(s, cache_size) for s in STRATEGIES}

        unknown = {letter for pair in self.rules for letter in pair} - set(self.letters)
        if unknown:
            raise ValueError(f"rules mention unknown letters: {sorted(unknown)}")

    def __repr__(self) -> str:
        return f"WordAlgebra({self.name!r}, level={self.level})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WordAlgebra):
            return NotImplemented
        return (self.name, self.level, self.letters, self.centrals) == (
            other.name, other.level, other.letters, other.centrals)

    def __hash__(self) -> int:
        return hash((self.name, self.level, self.letters, self.centrals))

    # ------------------------------------------------------------------
    # Constructors

    def element(self, terms: RawTerms, strategy: str = "leftmost") -> "AlgebraElement":
        return AlgebraElement(self, self.normal_form(terms, strategy))

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, {})

    def one(self) -> "AlgebraElement":
        return self.scalar(ONE)

    def scalar(self, c) -> "AlgebraElement":
        c = as_gaussian(c)
        return AlgebraElement(self, {((), self._no_centrals): c} if c else {})

    def generator(self, letter: str) -> "AlgebraElement":
        if letter in self.centrals:
            exps = tuple(1 if name == letter else 0 for name in self.centrals)
            return AlgebraElement(self, {((), exps): ONE})
        if letter not in self.letters:
            raise KeyError(f"unknown generator {letter!r}")
        return self.word((letter,))

    def word(self, letters: Iterable[str], coeff=ONE, strategy: str = "leftmost") -> "AlgebraElement":
        """Normal form of a raw word; central letters may appear anywhere."""
        plain: List[str] = []
        exps = list(self._no_centrals)
        for letter in letters:
            if letter in self.centrals:
                exps[self.centrals.index(letter)] += 1
            else:
                plain.append(letter)
        return self.element({(tuple(plain), tuple(exps)): as_gaussian(coeff)}, strategy)

    # ------------------------------------------------------------------
    # Rewriting

    def _redex(self, word: Word, strategy: str) -> Optional[int]:
        positions = range(len(word) - 1)
        if strategy == "rightmost":
            positions = reversed(positions)
        for i in positions:
            if (word[i], word[i + 1]) in self.rules:
                return i
        return None

    def _make_reducer(self, strategy: str, cache_size: int):
        @lru_cache(maxsize=cache_size)
        def reduce(word: Word) -> Dict[TermKey, GaussianRational]:
            return self._reduce(word, strategy)
        return reduce

    def _reduce(self, word: Word, strategy: str) -> Dict[TermKey, GaussianRational]:
        position = self._redex(word, strategy)
        if position is None:
            return {(word, self._no_centrals): ONE}
        result: Dict[TermKey, GaussianRational] = {}
        prefix, suffix = word[:position], word[position + 2:]
        for coeff, replacement, exps in self.rules[(word[position], word[position + 1])]:
            for (reduced, reduced_exps), value in self.reduce_word(prefix + replacement + suffix, strategy).items():
                _accumulate(result, (reduced, _add_exponents(reduced_exps, exps)), coeff * value)
        return result

    def reduce_word(self, word: Word, strategy: str = "leftmost") -> Dict[TermKey, GaussianRational]:
        """Normal form of a single word (central exponents zero); cached per strategy, least recently used first out."""
        if strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {strategy!r}")
        return self._reducers[strategy](tuple(word))

    def cache_info(self, strategy: str = "leftmost"):
        return self._reducers[strategy].cache_info()

    def clear_cache(self) -> None:
        for reducer in self._reducers.values():
            reducer.cache_clear()

    def normal_form(self, terms: RawTerms, strategy: str = "leftmost") -> Dict[TermKey, GaussianRational]:
        result: Dict[TermKey, GaussianRational] = {}
        for (word, exps), coeff in terms.items():
            if not coeff:
                continue
            for (reduced, reduced_exps), value in self.reduce_word(tuple(word), strategy).items():
                _accumulate(result, (reduced, _add_exponents(reduced_exps, exps)), coeff * value)
        return result

    # ------------------------------------------------------------------
    # Text form

    def format_key(self, key: TermKey) -> str:
        word, exps = key
        parts: List[str] = []
        run_letter, run = None, 0
        for letter in word + ("",):
            if letter == run_letter:
                run += 1
                continue
            if run_letter is not None:
                parts.append(run_letter if run == 1 else f"{run_letter}^{run}")
            run_letter, run = letter, 1
        for name, e in zip(self.centrals, exps):
            if e:
                parts.append(name if e == 1 else f"{name}^{e}")
        return "*".join(parts) if parts else "1"


class AlgebraElement:
    """Immutable normal-form element of a :class:`WordAlgebra`."""

    __slots__ = ("algebra", "_terms")

    def __init__(self, algebra: WordAlgebra, terms: Mapping[TermKey, GaussianRational]):
        self.algebra = algebra
        self._terms = dict(terms)

    @property
    def terms(self) -> Dict[TermKey, GaussianRational]:
        return dict(self._terms)

    @property
    def level(self) -> int:
        return self.algebra.level

    def _check(self, other: "AlgebraElement") -> None:
        if self.algebra.level != other.algebra.level:
            raise LevelMismatchError(f"levels differ: {self.algebra.level} vs {other.algebra.level}")
        if self.algebra != other.algebra:
            raise RingMismatchError(f"algebras differ: {self.algebra.name} vs {other.algebra.name}")

    def is_zero(self) -> bool:
        return not self._terms

    def letters(self) -> set:
        return {letter for word, _ in self._terms for letter in word}

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        result = dict(self._terms)
        for key, coeff in other._terms.items():
            _accumulate(result, key, coeff)
        return AlgebraElement(self.algebra, result)

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra, {key: -c for key, c in self._terms.items()})

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-other)

    def scale(self, c) -> "AlgebraElement":
        c = as_gaussian(c)
        if not c:
            return self.algebra.zero()
        return AlgebraElement(self.algebra, {key: c * v for key, v in self._terms.items()})

    def __mul__(self, other):
        if not isinstance(other, AlgebraElement):
            return self.scale(other)
        self._check(other)
        raw: Dict[TermKey, GaussianRational] = {}
        for (w1, e1), c1 in self._terms.items():
            for (w2, e2), c2 in other._terms.items():
                _accumulate(raw, (w1 + w2, _add_exponents(e1, e2)), c1 * c2)
        return self.algebra.element(raw)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.algebra == other.algebra and self._terms == other._terms

    __hash__ = None

    def renormalize(self, strategy: str) -> "AlgebraElement":
        return AlgebraElement(self.algebra, self.algebra.normal_form(self._terms, strategy))

    def to_text(self) -> str:
        """Canonical text: terms sorted by word, coefficients as a/b+c/d*i."""
        if not self._terms:
            return "0"
        pieces = [
            f"({format_gaussian(self._terms[key])})*{self.algebra.format_key(key)}"
            for key in sorted(self._terms)
        ]
        return " + ".join(pieces)

    def __repr__(self) -> str:
        return f"AlgebraElement({self.to_text()})"


def commutator(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    """Normal form of xy - yx."""
    return x * y - y * x


@dataclass(frozen=True, eq=False)
class AlgebraRing(CoefficientRing):
    """A word algebra seen through the ring contract."""

    algebra: WordAlgebra = None
    name: str = "algebra"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, AlgebraRing) and self.algebra == other.algebra

    def __hash__(self) -> int:
        return hash(self.algebra)

    @property
    def zero(self) -> AlgebraElement:
        return self.algebra.zero()

    @property
    def one(self) -> AlgebraElement:
        return self.algebra.one()

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def eq(self, a, b) -> bool:
        return a == b

    def from_scalar(self, c):
        return self.algebra.scalar(c)

    def scale(self, c, a):
        return a.scale(c)

    def is_zero(self, a) -> bool:
        return a.is_zero()


def random_word(rng: np.random.Generator, alphabet: Sequence[str], max_length: int) -> Word:
    length = int(rng.integers(0, max_length + 1))
    return tuple(alphabet[int(i)] for i in rng.integers(0, len(alphabet), size=length))


def confluence_check(
    algebra: WordAlgebra,
    rng: np.random.Generator,
    samples: int = 10_000,
    max_length: int = 8,
) -> List[Word]:
    """Reduce random words with both strategies; return the words whose normal forms differ."""
    alphabet = algebra.letters + algebra.centrals
    mismatches: List[Word] = []
    for _ in range(samples):
        raw = random_word(rng, alphabet, max_length)
        left = algebra.word(raw, strategy="leftmost")
        right = algebra.word(raw, strategy="rightmost")
        if left != right:
            mismatches.append(raw)
    return mismatches
