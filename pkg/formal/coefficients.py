"""Numeric recursion for the coefficients C_r^l of the trivialising ansatz.

Row l of a :class:`CoeffTable` holds (C_0^l, ..., C_l^l). Consecutive rows are
linked by a lower-triangular Toeplitz system L T = R X whose entries are the
Taylor coefficients of (e^{wz} - 1)/(2z) and (+-ik)(e^{wz} + 1)/2 with
w = +-2ik; its solution is T = phi(N) X.
"""

from dataclasses import dataclass, replace
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import structlog
from sympy.polys.domains import QQ_I
from sympy.polys.matrices import DomainMatrix

from core.exceptions import (
    LevelMismatchError,
    MissingRowsError,
    SignBranchMismatchError,
    SingularSystemError,
    VerificationError,
)
from .scalars import (
    ONE,
    ZERO,
    GaussianRational,
    as_gaussian,
    format_rational,
    gaussian,
    i_power,
    inverse_factorial,
    random_gaussian,
    rational,
)
from .series import phi_taylor, rho_power_coefficient

logger = structlog.get_logger(__name__)

Row = Tuple[GaussianRational, ...]

CSV_COLUMNS = ["l", "r", "re", "im"]
HALF = gaussian(rational(1, 2))


def _check_sign(sign: int) -> None:
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")


@dataclass(frozen=True)
class CoeffTable:
    """Rows 0..L of the coefficient triangle for a fixed level k."""

    level: int
    rows: Tuple[Row, ...]

    def __post_init__(self):
        if self.level < 1:
            raise ValueError(f"level must be a positive integer, got {self.level}")
        rows = tuple(tuple(as_gaussian(c) for c in row) for row in self.rows)
        object.__setattr__(self, "rows", rows)
        if not rows or rows[0] != (ONE,):
            raise ValueError("a coefficient table must start with C_0^0 = 1")
        for l, row in enumerate(rows):
            if len(row) != l + 1:
                raise ValueError(f"row {l} has {len(row)} entries, expected {l + 1}")

    @property
    def max_order(self) -> int:
        return len(self.rows) - 1

    def entry(self, l: int, r: int) -> GaussianRational:
        if l > self.max_order:
            raise MissingRowsError(f"row {l} requested from a table with rows 0..{self.max_order}")
        return self.rows[l][r]

    def diagonal(self) -> Row:
        return tuple(row[-1] for row in self.rows)

    def truncate(self, order: int) -> "CoeffTable":
        if order > self.max_order:
            raise MissingRowsError(f"cannot truncate rows 0..{self.max_order} to {order}")
        return replace(self, rows=self.rows[:order + 1])

    def with_entry(self, l: int, r: int, value: GaussianRational) -> "CoeffTable":
        """Copy of the table with one entry replaced."""
        row = list(self.rows[l])
        row[r] = as_gaussian(value)
        rows = list(self.rows)
        rows[l] = tuple(row)
        return replace(self, rows=tuple(rows))

    def to_frame(self) -> pd.DataFrame:
        """One row per entry; exact values as p/q strings."""
        records = [
            {"l": l, "r": r, "re": format_rational(c.x), "im": format_rational(c.y)}
            for l, row in enumerate(self.rows)
            for r, c in enumerate(row)
        ]
        return pd.DataFrame.from_records(records, columns=CSV_COLUMNS)


@dataclass(frozen=True)
class TriangularSystem:
    """Lower-triangular Toeplitz pair (L, R) of size l for one sign branch.

    ``left`` and ``right`` hold the entries by offset m - rho.
    """

    level: int
    size: int
    sign: int
    left: Row
    right: Row

    def _toeplitz(self, offsets: Row) -> DomainMatrix:
        rows = [[offsets[m - j] if j <= m else ZERO for j in range(self.size)] for m in range(self.size)]
        return DomainMatrix(rows, (self.size, self.size), QQ_I)

    def as_matrices(self) -> Tuple[DomainMatrix, DomainMatrix]:
        return self._toeplitz(self.left), self._toeplitz(self.right)

    def apply_right(self, x: Sequence[GaussianRational]) -> List[GaussianRational]:
        return [sum((self.right[m - j] * x[j] for j in range(m + 1)), ZERO) for m in range(self.size)]

    def solve_left(self, rhs: Sequence[GaussianRational]) -> List[GaussianRational]:
        """Forward substitution for L T = rhs."""
        lead = self.left[0]
        if not lead:
            raise SingularSystemError(f"vanishing diagonal in a system of size {self.size}")
        solution: List[GaussianRational] = []
        for m in range(self.size):
            acc = rhs[m]
            for j in range(m):
                acc -= self.left[m - j] * solution[j]
            solution.append(acc / lead)
        return solution


def build_system(k: int, l: int, sign: int = 1) -> TriangularSystem:
    """L offset n is w^(n+1)/(2(n+1)!); R offset 0 is sign*ik, offset n>=1 is sign*ik*w^n/(2 n!)."""
    if l < 1:
        raise ValueError(f"system size must be positive, got {l}")
    _check_sign(sign)
    left = tuple(i_power(2 * k, n + 1, sign) * inverse_factorial(n + 1) * HALF for n in range(l))
    ik = i_power(k, 1, sign)
    right = (ik,) + tuple(ik * i_power(2 * k, n, sign) * inverse_factorial(n) * HALF for n in range(1, l))
    return TriangularSystem(level=k, size=l, sign=sign, left=left, right=right)


def solve_step(row: Sequence[GaussianRational], free: GaussianRational = ZERO, sign: int = 1, *, k: int) -> Row:
    """Next row from the previous one: solve L T = R X, then append C_l^l = free."""
    system = build_system(k, len(row), sign)
    head = system.solve_left(system.apply_right(list(row)))
    return tuple(head) + (as_gaussian(free),)


@lru_cache(maxsize=128)
def _phi_coefficients(k: int, order: int, sign: int) -> Row:
    return phi_taylor(k, order, sign).coefficients


def phi_apply(row: Sequence[GaussianRational], k: int, sign: int = 1) -> Row:
    """T = phi(N) X: the first l entries of the next row."""
    _check_sign(sign)
    size = len(row)
    phi = _phi_coefficients(k, max(size - 1, 0), sign)
    return tuple(sum((phi[j] * row[m - j] for j in range(m + 1)), ZERO) for m in range(size))


def check_E(table: CoeffTable, m: int, l: int, sign: int = 1) -> GaussianRational:
    """E_{m,l} = sum_{r<m} (w^(m-r)/(2(m-r)!) C_r^l - (sign ik)^(m-r) C_r^(l-m+r)); zero on valid tables."""
    _check_sign(sign)
    if not 1 <= m <= l:
        raise ValueError(f"need 1 <= m <= l, got m={m}, l={l}")
    if l > table.max_order:
        raise MissingRowsError(f"E_{{{m},{l}}} needs rows up to {l}; table has 0..{table.max_order}")
    k = table.level
    value = ZERO
    for r in range(m):
        gap = m - r
        value += i_power(2 * k, gap, sign) * inverse_factorial(gap) * HALF * table.rows[l][r]
        value -= i_power(k, gap, sign) * table.rows[l - gap][r]
    return value


def violated_equations(table: CoeffTable, sign: int = 1) -> List[Tuple[int, int]]:
    """All (m, l) with E_{m,l} != 0."""
    return [
        (m, l)
        for l in range(1, table.max_order + 1)
        for m in range(1, l + 1)
        if check_E(table, m, l, sign)
    ]


def closed_form_table(k: int, order: int) -> CoeffTable:
    """C_r^l = [s^-l] rho(s)^(l-r): the branch with vanishing free diagonal."""
    rows = [tuple(rho_power_coefficient(k, l, l - r) for r in range(l + 1)) for l in range(order + 1)]
    return CoeffTable(level=k, rows=tuple(rows))


def solve_table(k: int, order: int, diagonal: Optional[Sequence[GaussianRational]] = None) -> CoeffTable:
    """Iterate solve_step on both sign branches; diagonal[l-1] is the free entry C_l^l."""
    free = list(diagonal) if diagonal is not None else [ZERO] * order
    if len(free) < order:
        raise ValueError(f"need {order} diagonal values, got {len(free)}")

    rows: List[Row] = [(ONE,)]
    for l in range(1, order + 1):
        plus = solve_step(rows[-1], free[l - 1], 1, k=k)
        minus = solve_step(rows[-1], free[l - 1], -1, k=k)
        if plus != minus:
            raise SignBranchMismatchError(f"sign branches disagree at row {l} for k={k}")
        rows.append(plus)

    logger.debug("Coefficient table solved", k=k, order=order)
    return CoeffTable(level=k, rows=tuple(rows))


def rescale_table(table: CoeffTable, alpha: Sequence[GaussianRational]) -> CoeffTable:
    """Table of (sum_l alpha_l s^-l) R_0 for the vanishing-diagonal table R_0.

    C_r^l(alpha) = sum_{j<=r} alpha_j C_{r-j}^{l-j}. The result has diagonal
    alpha and must equal solve_table with that diagonal.
    """
    alpha = [as_gaussian(a) for a in alpha]
    if not alpha or alpha[0] != ONE:
        raise ValueError("the rescaling series must start with alpha_0 = 1")
    order = min(table.max_order, len(alpha) - 1)
    nonzero = [l for l, c in enumerate(table.diagonal()[: order + 1]) if l and c]
    if nonzero:
        raise VerificationError("rescale_table", f"diagonal nonzero at rows {nonzero}",
                                "the base table must have a vanishing free diagonal")

    rows = []
    for l in range(order + 1):
        rows.append(tuple(
            sum((alpha[j] * table.rows[l - j][r - j] for j in range(r + 1)), ZERO)
            for r in range(l + 1)
        ))
    rescaled = CoeffTable(level=table.level, rows=tuple(rows))

    solved = solve_table(table.level, order, alpha[1: order + 1])
    if rescaled != solved:
        differing = [l for l in range(order + 1) if rescaled.rows[l] != solved.rows[l]]
        raise VerificationError("rescale_table", f"rows {differing} differ from solve_step",
                                f"k={table.level}")
    return rescaled


def random_diagonal(rng: np.random.Generator, order: int, bound: int = 5) -> List[GaussianRational]:
    return [random_gaussian(rng, bound) for _ in range(order)]


def require_same_level(table: CoeffTable, level: int) -> None:
    if table.level != level:
        raise LevelMismatchError(f"table was built for k={table.level}, algebra has k={level}")
