"""Operator matrices on the truncated Hermite basis.

The prequantum connection in the symmetric gauge is

    nabla_x = d_x + (ik/2) y,    nabla_y = d_y - (ik/2) x,

so [nabla_x, nabla_y] = -ik. Second-order operators are
nabla^2_T = T^{ab} nabla_a nabla_b for a constant tensor T; in particular
Delta = nabla^2_{g~}, b(V) = nabla^2_{G(V)} and bbar(V) = nabla^2_{Gbar(V)}.

Every operator carries its order, the largest basis-degree shift it can cause.
A product of orders p and q is exact on states of degree <= N - p - q, which
is where identities are evaluated.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Optional

import numpy as np
import scipy.sparse as sparse

from .basis import HermiteBasis
from .functions import CurveFunction
from .geometry import GeometryData, G_bar_tensor, G_tensor, inverse_metric, inverse_metric_derivative


@dataclass(frozen=True)
class OperatorMatrix:
    """Sparse complex matrix with its degree-shift bound."""

    matrix: sparse.csr_matrix
    order: int

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix((self.matrix + other.matrix).tocsr(), max(self.order, other.order))

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix((self.matrix - other.matrix).tocsr(), max(self.order, other.order))

    def __neg__(self) -> "OperatorMatrix":
        return OperatorMatrix(-self.matrix, self.order)

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix((self.matrix @ other.matrix).tocsr(), self.order + other.order)

    def scale(self, c: complex) -> "OperatorMatrix":
        return OperatorMatrix((c * self.matrix).tocsr(), self.order)

    def __truediv__(self, c: complex) -> "OperatorMatrix":
        return self.scale(1.0 / c)

    def apply(self, vector: np.ndarray) -> np.ndarray:
        return self.matrix @ vector


def commutator(first: OperatorMatrix, second: OperatorMatrix) -> OperatorMatrix:
    return first @ second - second @ first


class LandauModel:
    """Elementary operators for a fixed level k and cutoff N."""

    def __init__(self, level: int, cutoff: int):
        self.level = level
        self.cutoff = cutoff
        self.basis = HermiteBasis(level, cutoff)

    def __repr__(self) -> str:
        return f"LandauModel(k={self.level}, N={self.cutoff})"

    @cached_property
    def identity(self) -> OperatorMatrix:
        return OperatorMatrix(self.basis.identity, 0)

    @cached_property
    def positions(self):
        return [OperatorMatrix(self.basis.position(axis), 1) for axis in range(2)]

    @cached_property
    def nabla(self):
        """[nabla_x, nabla_y]."""
        x, y = self.positions
        half_ik = 0.5j * self.level
        d_x = OperatorMatrix(self.basis.derivative(0), 1)
        d_y = OperatorMatrix(self.basis.derivative(1), 1)
        return [d_x + y.scale(half_ik), d_y - x.scale(half_ik)]

    @cached_property
    def _second_order_parts(self) -> Dict[str, OperatorMatrix]:
        nx, ny = self.nabla
        return {
            "xx": nx @ nx,
            "xy": nx @ ny + ny @ nx,
            "yy": ny @ ny,
        }

    def second_order(self, tensor: np.ndarray) -> OperatorMatrix:
        """T^{ab} nabla_a nabla_b for a constant symmetric tensor T."""
        parts = self._second_order_parts
        return (
            parts["xx"].scale(tensor[0, 0])
            + parts["xy"].scale(0.5 * (tensor[0, 1] + tensor[1, 0]))
            + parts["yy"].scale(tensor[1, 1])
        )

    def laplacian(self, sigma: complex) -> OperatorMatrix:
        return self.second_order(inverse_metric(complex(sigma)))

    def laplacian_derivative(self, sigma: complex, direction: complex) -> OperatorMatrix:
        """V[Delta] = nabla^2_{V[g~]}."""
        return self.second_order(inverse_metric_derivative(complex(sigma), complex(direction)))

    def b(self, sigma: complex, direction: complex) -> OperatorMatrix:
        return self.second_order(G_tensor(complex(sigma), complex(direction)))

    def b_bar(self, sigma: complex, direction: complex) -> OperatorMatrix:
        return self.second_order(G_bar_tensor(complex(sigma), complex(direction)))

    def beta(self, sigma: complex, direction: complex, t: complex) -> OperatorMatrix:
        """(1/2t) b(V) - (1/2tbar) bbar(V)."""
        return self.b(sigma, direction).scale(1 / (2 * t)) - self.b_bar(sigma, direction).scale(1 / (2 * np.conj(t)))

    def monomial(self, i: int, j: int) -> OperatorMatrix:
        x, y = self.positions
        result = self.identity
        for _ in range(i):
            result = result @ x
        for _ in range(j):
            result = result @ y
        return result

    def multiplication(self, f: CurveFunction) -> OperatorMatrix:
        """M_f for a polynomial f."""
        result = OperatorMatrix(sparse.csr_matrix((len(self.basis), len(self.basis)), dtype=complex), f.degree)
        for (i, j), c in f.terms.items():
            result = result + self.monomial(i, j).scale(c)
        return OperatorMatrix(result.matrix, f.degree)

    def first_order(self, field) -> OperatorMatrix:
        """sum_a M_{v^a} nabla_a for polynomial components v^a."""
        nx, ny = self.nabla
        return self.multiplication(field[0]) @ nx + self.multiplication(field[1]) @ ny

    # ------------------------------------------------------------------
    # Norms on the halo subspace

    def halo_columns(self, halo: int) -> np.ndarray:
        max_degree = self.cutoff - halo
        if max_degree < 0:
            raise ValueError(f"halo {halo} leaves no exact states at cutoff {self.cutoff}")
        return self.basis.low_degree(max_degree)

    def halo_norm(self, operator: OperatorMatrix, halo: Optional[int] = None) -> float:
        """Largest singular value restricted to states of degree <= N - halo."""
        columns = self.halo_columns(operator.order if halo is None else halo)
        block = operator.matrix[:, columns].toarray()
        if not block.size:
            return 0.0
        return float(np.linalg.norm(block, 2))

    def relative_residual(self, residual: OperatorMatrix, reference: OperatorMatrix, halo: Optional[int] = None) -> float:
        halo = max(residual.order, reference.order) if halo is None else halo
        scale = self.halo_norm(reference, halo)
        value = self.halo_norm(residual, halo)
        return value / scale if scale > 0 else value


@dataclass(frozen=True)
class OperatorSet:
    nabla_x: OperatorMatrix
    nabla_y: OperatorMatrix
    delta: OperatorMatrix
    b: OperatorMatrix
    b_bar: OperatorMatrix
    M_f: OperatorMatrix


def build_operators(geom: GeometryData, model: LandauModel, f: CurveFunction) -> OperatorSet:
    """Operators at the geometry's point and direction."""
    return OperatorSet(
        nabla_x=model.nabla[0],
        nabla_y=model.nabla[1],
        delta=model.second_order(geom.g_tilde),
        b=model.second_order(geom.G),
        b_bar=model.second_order(geom.G_bar),
        M_f=model.multiplication(f),
    )
