"""Thermal inputs, ancilla embedding and post-selected ancilla measurement."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .basis import GROUND, Dims, Propagator
from .numerics import as_matrix, dagger

STATE_TOL = 1e-10
# below this the ground outcome is treated as never observed
POSTSELECTION_FLOOR = 1e-12


class NoOutcomeError(ArithmeticError):
    """The ancilla-ground outcome has (numerically) zero probability."""

    def __init__(self, p_g: float):
        super().__init__(f"ancilla ground outcome has vanishing probability ({p_g:.3g})")
        self.p_g = p_g


@dataclass(frozen=True, eq=False)
class DensityOperator:
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        rho = as_matrix(self.matrix)
        if np.max(np.abs(rho - dagger(rho)), initial=0.0) > STATE_TOL:
            raise ValueError("density operator is not Hermitian")
        tr = np.trace(rho).real
        if abs(tr - 1) > STATE_TOL:
            raise ValueError(f"density operator has trace {tr!r}")
        if np.linalg.eigvalsh(rho)[0] < -STATE_TOL:
            raise ValueError("density operator is not positive semidefinite")
        rho.setflags(write=False)
        object.__setattr__(self, "matrix", rho)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def populations(self) -> np.ndarray:
        return self.matrix.diagonal().real.copy()

    def is_diagonal(self) -> bool:
        return not np.any(self.matrix - np.diag(self.matrix.diagonal()))

    @classmethod
    def diagonal(cls, probs) -> "DensityOperator":
        return cls(np.diag(np.asarray(probs, dtype=float)).astype(complex))


@dataclass(frozen=True)
class ThermalSpec:
    omega: float
    temp: float
    n_levels: int

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        if not self.temp >= 0:
            raise ValueError("temperature must be non-negative")
        if self.n_levels < 1:
            raise ValueError("n_levels must be at least 1")


def boltzmann_ratio(omega: float, temp: float) -> float:
    """``exp(-omega / T)`` with the ``T = 0`` and ``T = inf`` limits."""
    if temp == 0:
        return 0.0
    return math.exp(-omega / temp)


def thermal_state(spec: ThermalSpec) -> DensityOperator:
    """Boltzmann populations ``p_l ~ exp(-l omega / T)`` on the kept levels."""
    x = boltzmann_ratio(spec.omega, spec.temp)
    weights = x ** np.arange(spec.n_levels, dtype=float)
    weights[0] = 1.0  # 0**0 at T = 0
    return DensityOperator.diagonal(weights / weights.sum())


def auto_levels(omega: float, temp: float, tail: float = 1e-6, minimum: int = 2) -> int:
    """Smallest level count whose discarded thermal tail mass is below *tail*.

    For the untruncated distribution the mass above level ``N - 1`` is
    exactly ``exp(-N omega / T)``.
    """
    if temp == 0:
        return minimum
    if math.isinf(temp):
        raise ValueError("no finite truncation bounds the tail at infinite temperature")
    n = math.floor(temp * math.log(1 / tail) / omega) + 1
    return max(minimum, n)


def embed_with_ancilla(rho_a: DensityOperator, dims: Dims) -> DensityOperator:
    """``rho_A (x) |g><g|`` in the flat composite basis."""
    if rho_a.dim != dims.n:
        raise ValueError(f"state has dimension {rho_a.dim}, target needs {dims.n}")
    g = np.zeros((dims.m, dims.m))
    g[GROUND, GROUND] = 1.0
    return DensityOperator(np.kron(rho_a.matrix, g))


def _check_dims(u: Propagator, rho_a: DensityOperator):
    if rho_a.dim != u.dims.n:
        raise ValueError(f"state has dimension {rho_a.dim}, propagator target has {u.dims.n}")


def outcome_probability(u: Propagator, rho_a: DensityOperator, l: int) -> float:
    """Probability ``P_{l,g}`` of finding ``|l, g>`` after the joint evolution."""
    _check_dims(u, rho_a)
    if not 0 <= l < u.dims.n:
        raise IndexError(f"level {l} outside [0, {u.dims.n})")
    row = u.ground_block()[l]
    if rho_a.is_diagonal():
        return float(np.sum(rho_a.populations * np.abs(row) ** 2))
    return float((row @ rho_a.matrix @ np.conj(row)).real)


def outcome_distribution(u: Propagator, rho_a: DensityOperator) -> np.ndarray:
    """All joint outcome probabilities as an ``(n, m)`` array ``[l, alpha]``."""
    _check_dims(u, rho_a)
    rho_f = u.matrix @ embed_with_ancilla(rho_a, u.dims).matrix @ dagger(u.matrix)
    return np.clip(rho_f.diagonal().real, 0.0, None).reshape(u.dims.n, u.dims.m)


def measure_ancilla_ground(u: Propagator, rho_a: DensityOperator) -> tuple[float, DensityOperator]:
    """Evolve, project the ancilla on ``|g>`` and renormalize.

    Returns ``(p_g, rho_A_post)``. Raises ``NoOutcomeError`` when the
    ground outcome probability is at or below ``POSTSELECTION_FLOOR``.
    """
    _check_dims(u, rho_a)
    kraus = u.ground_block()
    unnorm = kraus @ rho_a.matrix @ dagger(kraus)
    p_g = float(np.trace(unnorm).real)
    if p_g <= POSTSELECTION_FLOOR:
        raise NoOutcomeError(p_g)
    post = unnorm / p_g
    return p_g, DensityOperator(0.5 * (post + dagger(post)))


def cooling_success(u: Propagator, rho_a: DensityOperator) -> float:
    """``P_c = P_{0,g} / P_g``: ground population after post-selection."""
    p_g, post = measure_ancilla_ground(u, rho_a)
    return float(min(1.0, max(0.0, post.matrix[0, 0].real)))
