"""Composite-space conventions shared by every module.

The joint space of a target ``A`` with ``n`` levels and an ancilla ``B``
with ``m`` levels is flattened system-major: ``|l, alpha>`` sits at index
``l * m + alpha``. The ancilla ground state ``|g>`` is ``alpha = 0`` and,
for a qubit ancilla, ``|e>`` is ``alpha = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .numerics import as_matrix, unitarity_defect

GROUND = 0
EXCITED = 1

PROPAGATOR_UNITARY_TOL = 1e-8


@dataclass(frozen=True)
class Dims:
    n: int
    m: int = 2

    def __post_init__(self):
        if self.n < 2 or self.m < 2:
            raise ValueError(f"need n >= 2 and m >= 2, got n={self.n}, m={self.m}")

    @property
    def total(self) -> int:
        return self.n * self.m

    def flat(self, l: int, alpha: int = GROUND) -> int:
        return BasisIndex.of(l, alpha, self).flat

    def ground_indices(self) -> np.ndarray:
        """Flat indices of ``|l, g>`` for ``l = 0..n-1``."""
        return np.arange(self.n) * self.m + GROUND


@dataclass(frozen=True)
class BasisIndex:
    l: int
    alpha: int
    flat: int

    @classmethod
    def of(cls, l: int, alpha: int, dims: Dims) -> "BasisIndex":
        if not (0 <= l < dims.n and 0 <= alpha < dims.m):
            raise IndexError(f"|{l},{alpha}> outside n={dims.n}, m={dims.m}")
        return cls(l, alpha, l * dims.m + alpha)

    @classmethod
    def from_flat(cls, flat: int, dims: Dims) -> "BasisIndex":
        if not 0 <= flat < dims.total:
            raise IndexError(f"flat index {flat} outside [0, {dims.total})")
        return cls(flat // dims.m, flat % dims.m, flat)


@dataclass(frozen=True, eq=False)
class Propagator:
    """Joint unitary on ``A (x) B`` after evolving for ``time``."""

    dims: Dims
    matrix: np.ndarray = field(repr=False)
    time: float = 0.0

    def __post_init__(self):
        u = as_matrix(self.matrix)
        if u.shape[0] != self.dims.total:
            raise ValueError(f"matrix is {u.shape[0]}x{u.shape[0]}, dims need {self.dims.total}")
        defect = unitarity_defect(u)
        if defect > PROPAGATOR_UNITARY_TOL:
            raise ValueError(f"propagator is not unitary (defect {defect:.3g})")
        u.setflags(write=False)
        object.__setattr__(self, "matrix", u)

    def entry(self, l: int, alpha: int, k: int, beta: int) -> complex:
        """``U_{l,alpha; k,beta}``."""
        return complex(self.matrix[self.dims.flat(l, alpha), self.dims.flat(k, beta)])

    def ground_block(self) -> np.ndarray:
        """The ``n x n`` matrix ``K[l, k] = U_{l,g; k,g}``.

        This is the Kraus operator of the ancilla-ground outcome for an
        ancilla prepared in ``|g>``.
        """
        idx = self.dims.ground_indices()
        return self.matrix[np.ix_(idx, idx)]
