"""Truncated two-dimensional Hermite basis.

States |n1, n2> with n1 + n2 <= N. The oscillator length is matched to the
lowest Landau level at sigma = i: l^2 = 2/k, so that x = l (a + a^dagger)/sqrt(2)
and d/dx = (a - a^dagger)/(sqrt(2) l) on each axis.
"""

from functools import cached_property
from typing import Dict, List, Tuple

import numpy as np
import scipy.sparse as sparse

State = Tuple[int, int]


class HermiteBasis:
    """Degree-truncated product basis and its elementary sparse matrices."""

    def __init__(self, level: int, cutoff: int):
        if level < 1:
            raise ValueError(f"level must be a positive integer, got {level}")
        if cutoff < 2:
            raise ValueError(f"basis cutoff must be at least 2, got {cutoff}")
        self.level = level
        self.cutoff = cutoff
        self.length = np.sqrt(2.0 / level)

        side = cutoff + 1
        self.states: List[State] = [(n1, d - n1) for d in range(side) for n1 in range(d, -1, -1)]
        self.index: Dict[State, int] = {state: i for i, state in enumerate(self.states)}
        self.degrees = np.array([n1 + n2 for n1, n2 in self.states])
        self._full_index = np.array([n1 * side + n2 for n1, n2 in self.states])

    def __len__(self) -> int:
        return len(self.states)

    def __repr__(self) -> str:
        return f"HermiteBasis(k={self.level}, N={self.cutoff}, dim={len(self)})"

    def _ladder(self) -> sparse.csr_matrix:
        side = self.cutoff + 1
        return sparse.diags(np.sqrt(np.arange(1, side, dtype=float)), 1, shape=(side, side), format="csr")

    def _restrict(self, full: sparse.spmatrix) -> sparse.csr_matrix:
        full = full.tocsr()
        return full[self._full_index][:, self._full_index].tocsr().astype(complex)

    def _embed(self, one_dim: sparse.spmatrix, axis: int) -> sparse.csr_matrix:
        eye = sparse.identity(self.cutoff + 1, format="csr")
        full = sparse.kron(one_dim, eye) if axis == 0 else sparse.kron(eye, one_dim)
        return self._restrict(full)

    @cached_property
    def identity(self) -> sparse.csr_matrix:
        return sparse.identity(len(self), dtype=complex, format="csr")

    def position(self, axis: int) -> sparse.csr_matrix:
        a = self._ladder()
        return self._embed(self.length * (a + a.T) / np.sqrt(2.0), axis)

    def derivative(self, axis: int) -> sparse.csr_matrix:
        a = self._ladder()
        return self._embed((a - a.T) / (np.sqrt(2.0) * self.length), axis)

    def low_degree(self, max_degree: int) -> np.ndarray:
        """Indices of states with degree <= max_degree."""
        return np.flatnonzero(self.degrees <= max_degree)

    def degree_block(self, degree: int) -> np.ndarray:
        return np.flatnonzero(self.degrees == degree)

    def basis_vector(self, state: State) -> np.ndarray:
        vector = np.zeros(len(self), dtype=complex)
        vector[self.index[tuple(state)]] = 1.0
        return vector
