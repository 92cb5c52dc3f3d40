"""Dense complex linear algebra and unitary time evolution.

Operators are plain ``numpy`` arrays of dtype ``complex128`` indexed
row-major, ``a[row, col]``. Nothing here mutates its inputs.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

log = logging.getLogger(__name__)

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)

# re-unitarize RK4 output only above this defect
UNITARITY_REPAIR_THRESHOLD = 1e-7


@dataclass(frozen=True)
class Tolerance:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be strictly positive")


DEFAULT_TOL = Tolerance()


def as_matrix(a) -> np.ndarray:
    """Coerce *a* to a square complex128 array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def mat_mul(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    return a @ b


def dagger(a) -> np.ndarray:
    return np.conj(np.asarray(a, dtype=complex)).T


def unitarity_defect(a) -> float:
    """Largest entry-wise modulus of ``a† a - I``."""
    a = as_matrix(a)
    return float(np.max(np.abs(dagger(a) @ a - np.eye(a.shape[0]))))


def is_unitary(a, tol: Tolerance = DEFAULT_TOL) -> bool:
    return unitarity_defect(a) < tol.abs_tol


def is_hermitian(a, tol: Tolerance = DEFAULT_TOL) -> bool:
    a = as_matrix(a)
    return float(np.max(np.abs(a - dagger(a)), initial=0.0)) <= tol.abs_tol


def expm_hermitian(h, t: float, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Return ``exp(-i h t)`` for Hermitian *h* via its eigendecomposition."""
    h = as_matrix(h)
    if not is_hermitian(h, tol):
        raise ValueError("expm_hermitian requires a Hermitian generator")
    h = 0.5 * (h + dagger(h))
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * t)) @ dagger(v)


def polar_unitary(a) -> np.ndarray:
    """Closest unitary to *a* in Frobenius norm (unitary polar factor)."""
    u, _, vh = np.linalg.svd(as_matrix(a))
    return u @ vh


@dataclass(frozen=True)
class IntegrationInfo:
    steps: int
    dt: float
    defect: float          # unitarity defect before any repair
    reunitarized: bool


def integrate_schrodinger(
    h_of_t: Callable[[float], np.ndarray],
    t_final: float,
    dt: float = 1e-3,
    full_output: bool = False,
):
    """Propagate ``dU/dt = -i H(t) U`` from ``U(0) = I`` with fixed-step RK4.

    The step is shrunk slightly so that an integer number of steps lands
    exactly on *t_final*. If the final unitarity defect exceeds
    ``UNITARITY_REPAIR_THRESHOLD`` the result is projected back onto the
    unitary group with a polar decomposition.

    Returns the propagator, or ``(propagator, IntegrationInfo)`` when
    *full_output* is true.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    if t_final < 0:
        raise ValueError("t_final must be non-negative")

    h0 = as_matrix(h_of_t(0.0))
    u = np.eye(h0.shape[0], dtype=complex)
    steps = max(1, math.ceil(t_final / dt - 1e-12)) if t_final > 0 else 0
    step = t_final / steps if steps else 0.0

    def rhs(t, y):
        return -1j * (as_matrix(h_of_t(t)) @ y)

    for i in range(steps):
        t = i * step
        k1 = rhs(t, u)
        k2 = rhs(t + step / 2, u + step / 2 * k1)
        k3 = rhs(t + step / 2, u + step / 2 * k2)
        k4 = rhs(t + step, u + step * k3)
        u = u + step / 6 * (k1 + 2 * k2 + 2 * k3 + k4)

    defect = unitarity_defect(u)
    repaired = defect > UNITARITY_REPAIR_THRESHOLD
    if repaired:
        log.warning("RK4 unitarity defect %.3g exceeds %.0e; projecting", defect,
                    UNITARITY_REPAIR_THRESHOLD)
        u = polar_unitary(u)
    if full_output:
        return u, IntegrationInfo(steps=steps, dt=step, defect=defect, reunitarized=repaired)
    return u
