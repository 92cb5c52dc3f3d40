"""Jaynes-Cummings resonator + qubit: block propagator, truncated measure, success bound.

Fock levels ``0..n_max-1`` are kept. Excitation number is conserved, so
the propagator splits into the scalar ``|0,g>``, two-level blocks
``(|n-1,e>, |n,g>)`` for ``n = 1..n_max-1`` and the lone top state
``|n_max-1,e>`` whose partner fell outside the truncation. Every block
except that top state is exactly the untruncated dynamics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import EXCITED, GROUND, Dims, Propagator
from .states import boltzmann_ratio

DEFAULT_N_MAX = 12


@dataclass(frozen=True)
class JCParams:
    omega: float = 1.0
    delta: float = 1.0
    g: float = 0.2
    n_max: int = DEFAULT_N_MAX

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        if self.g < 0:
            raise ValueError("coupling g must be non-negative")
        if self.n_max < 2:
            raise ValueError("n_max must be at least 2")

    @property
    def dims(self) -> Dims:
        return Dims(self.n_max, 2)


@dataclass(frozen=True)
class JCBlockAngles:
    n: int
    eps_plus: float
    eps_minus: float
    theta_n: float


def _ladder(n_max: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_max)), 1).astype(complex)


def jc_hamiltonian(p: JCParams) -> np.ndarray:
    a = _ladder(p.n_max)
    eye_f, eye_q = np.eye(p.n_max), np.eye(2)
    sz = np.diag([-1.0, 1.0])          # |e><e| - |g><g| with g first
    raise_q = np.zeros((2, 2))
    raise_q[EXCITED, GROUND] = 1.0     # |e><g|
    return (p.omega * np.kron(a.conj().T @ a, eye_q)
            + p.delta / 2 * np.kron(eye_f, sz)
            + p.g * (np.kron(a, raise_q) + np.kron(a.conj().T, raise_q.T)))


def excitation_number(p: JCParams) -> np.ndarray:
    a = _ladder(p.n_max)
    return np.kron(a.conj().T @ a, np.eye(2)) + np.kron(np.eye(p.n_max), np.diag([0.0, 1.0]))


def jc_block_angles(n: int, p: JCParams) -> JCBlockAngles:
    """Eigenenergies and mixing angle of the ``(|n-1,e>, |n,g>)`` block.

    ``theta_n`` is the principal branch of ``arctan(2 g sqrt(n) / (delta - omega)) / 2``,
    with ``pi/4`` on resonance and ``0`` when the coupling vanishes.
    """
    if n < 1:
        raise ValueError("block index n must be >= 1")
    detuning = p.delta - p.omega
    half_gap = math.sqrt(detuning ** 2 + 4 * p.g ** 2 * n) / 2
    mean = p.omega * (n - 0.5)
    if p.g == 0:
        theta = 0.0
    elif detuning == 0:
        theta = math.pi / 4
    else:
        theta = 0.5 * math.atan(2 * p.g * math.sqrt(n) / detuning)
    return JCBlockAngles(n, mean + half_gap, mean - half_gap, theta)


def _block_energies(angles: JCBlockAngles, p: JCParams) -> tuple[float, float]:
    # energy of (cos, sin) and (-sin, cos) eigenvectors; the principal branch
    # flips their order below resonance
    if p.delta >= p.omega:
        return angles.eps_plus, angles.eps_minus
    return angles.eps_minus, angles.eps_plus


def jc_block(n: int, t, p: JCParams) -> np.ndarray:
    """2x2 propagator of block ``n`` in the ``(|n-1,e>, |n,g>)`` basis."""
    ang = jc_block_angles(n, p)
    ea, eb = _block_energies(ang, p)
    c, s = math.cos(ang.theta_n), math.sin(ang.theta_n)
    pa, pb = np.exp(-1j * ea * t), np.exp(-1j * eb * t)
    return np.array([[pa * c * c + pb * s * s, (pa - pb) * s * c],
                     [(pa - pb) * s * c, pa * s * s + pb * c * c]])


def ground_amplitude(n: int, t, p: JCParams):
    """``U_{n,g;n,g}(t)``; broadcasts over array *t*."""
    if n == 0:
        return np.exp(1j * p.delta * np.asarray(t) / 2)
    ang = jc_block_angles(n, p)
    ea, eb = _block_energies(ang, p)
    c2, s2 = math.cos(ang.theta_n) ** 2, math.sin(ang.theta_n) ** 2
    t = np.asarray(t, dtype=float)
    return np.exp(-1j * ea * t) * s2 + np.exp(-1j * eb * t) * c2


def jc_propagator_analytic(t: float, p: JCParams) -> Propagator:
    dims = p.dims
    u = np.zeros((dims.total, dims.total), dtype=complex)
    g0 = dims.flat(0, GROUND)
    u[g0, g0] = np.exp(1j * p.delta * t / 2)
    for n in range(1, p.n_max):
        idx = [dims.flat(n - 1, EXCITED), dims.flat(n, GROUND)]
        u[np.ix_(idx, idx)] = jc_block(n, t, p)
    top = dims.flat(p.n_max - 1, EXCITED)
    u[top, top] = np.exp(-1j * (p.omega * (p.n_max - 1) + p.delta / 2) * t)
    return Propagator(dims, u, t)


def _check_k(k: int, p: JCParams):
    if not 1 <= k < p.n_max:
        raise ValueError(f"need 1 <= k < n_max={p.n_max}, got k={k}")


def jc_f_k(t, p: JCParams, k: int):
    """Cooling measure truncated to the first *k* excited blocks.

    Works for scalar or array *t*. ``|U_{0,g;0,g}|`` is identically one.
    """
    _check_k(k, p)
    total = sum(np.abs(ground_amplitude(n, t, p)) ** 2 for n in range(1, k + 1))
    total = total / np.abs(ground_amplitude(0, t, p)) ** 2
    return float(total) if np.ndim(total) == 0 else total


def partition_function(omega: float, temp: float) -> float:
    return 1.0 / (1.0 - boltzmann_ratio(omega, temp))


def jc_success_bound(t: float, p: JCParams, temp: float, k: int) -> float:
    """Lower bound ``1 - e^{-w/T} (f_k + Z^2 e^{-k w/T})`` on the success probability.

    ``Z`` is the untruncated thermal partition function.
    """
    if not temp > 0:
        raise ValueError("temperature must be positive")
    x = boltzmann_ratio(p.omega, temp)
    z = partition_function(p.omega, temp)
    return 1.0 - x * (jc_f_k(t, p, k) + z * z * x ** k)


def jc_exact_osmgsc_impossible(p: JCParams, k: int, t_range=(0.0, 500.0),
                               samples: int = 50000) -> float:
    """Smallest sampled ``f_k`` over *t_range*.

    A strictly positive result is numerical evidence, not proof, that the
    first *k* blocks never empty simultaneously.
    """
    t = np.linspace(t_range[0], t_range[1], samples)
    return float(np.min(jc_f_k(t, p, k)))
