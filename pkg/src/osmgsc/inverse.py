"""Propagators built to cool in one shot, and the Hamiltonians that drive them.

Two-level blocks follow the SU(2) form ``cos(theta) I + i sin(theta) n.sigma``
whose generator is ``-sigma.[theta' n + sin cos n' + sin^2 (n' x n)]``.
Concrete models:

* ``toy_model``        ``|0><0| (x) sz + |1><1| (x) sx`` with period-pi cooling instants
* ``damped_model``     the lower-block coupling decays as ``pi e^{-t} / 2``
* ``transition_model`` middle block couples ``|0,e>`` and ``|1,g>``
* ``multi_level_assembly``  ``diag(u1, U_2 .. U_n, u2)`` for an n-level target
* ``xu_circuit``       Hadamard / phase / controlled-evolution / Hadamard on a qubit pair

Here ``sz`` acts on the ancilla as ``|e><e| - |g><g|`` (ground first), which
is ``-SIGMA_Z`` in the computational ordering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import block_diag

from .basis import Dims, Propagator
from .numerics import PAULI, SIGMA_X, SIGMA_Z, as_matrix, dagger, expm_hermitian, unitarity_defect

AXIS_TOL = 1e-12
BLOCK_TOL = 1e-10
DERIVATIVE_TOL = 1e-6

QUBIT_PAIR = Dims(2, 2)

Vector = Callable[[float], Sequence[float]]


def _const(value):
    return lambda t: value


@dataclass(frozen=True)
class SU2Control:
    """Rotation angle and axis of a 2x2 block, with analytic derivatives."""

    theta: Callable[[float], float]
    theta_dot: Callable[[float], float]
    axis: Vector
    axis_dot: Vector = _const((0.0, 0.0, 0.0))

    @classmethod
    def fixed_axis(cls, axis, theta, theta_dot) -> "SU2Control":
        axis = tuple(float(a) for a in axis)
        return cls(theta, theta_dot, _const(axis))

    @classmethod
    def linear(cls, axis, rate: float = 1.0) -> "SU2Control":
        """``theta(t) = rate * t`` about a fixed axis."""
        return cls.fixed_axis(axis, lambda t: rate * t, _const(rate))

    @classmethod
    def saturating(cls, axis) -> "SU2Control":
        """``theta(t) = pi (1 - e^{-t}) / 2``, creeping up to pi/2."""
        return cls.fixed_axis(axis, lambda t: math.pi * (1 - math.exp(-t)) / 2,
                              lambda t: math.pi * math.exp(-t) / 2)

    def axis_at(self, t: float) -> np.ndarray:
        n = np.asarray(self.axis(t), dtype=float)
        if abs(np.linalg.norm(n) - 1) > AXIS_TOL:
            raise ValueError(f"rotation axis {n} is not a unit vector at t={t}")
        return n

    def validate(self, times, h: float = 1e-5) -> None:
        """Cross-check the supplied derivatives against central differences."""
        for t in times:
            self.axis_at(t)
            fd = (self.theta(t + h) - self.theta(t - h)) / (2 * h)
            if abs(fd - self.theta_dot(t)) > DERIVATIVE_TOL:
                raise ValueError(f"theta_dot disagrees with finite differences at t={t}")
            fd_axis = (np.asarray(self.axis(t + h)) - np.asarray(self.axis(t - h))) / (2 * h)
            if np.max(np.abs(fd_axis - np.asarray(self.axis_dot(t)))) > DERIVATIVE_TOL:
                raise ValueError(f"axis_dot disagrees with finite differences at t={t}")


def _dot_sigma(v) -> np.ndarray:
    return sum(c * s for c, s in zip(v, PAULI))


def su2_propagator(ctrl: SU2Control, t: float) -> np.ndarray:
    n = ctrl.axis_at(t)
    th = ctrl.theta(t)
    return math.cos(th) * np.eye(2, dtype=complex) + 1j * math.sin(th) * _dot_sigma(n)


def su2_hamiltonian(ctrl: SU2Control, t: float) -> np.ndarray:
    n = ctrl.axis_at(t)
    n_dot = np.asarray(ctrl.axis_dot(t), dtype=float)
    th = ctrl.theta(t)
    s, c = math.sin(th), math.cos(th)
    v = ctrl.theta_dot(t) * n + s * c * n_dot + s * s * np.cross(n_dot, n)
    return -_dot_sigma(v)


def assemble_block_diag(blocks, dims: Dims, time: float = 0.0) -> Propagator:
    """Place unitary blocks and unit-modulus scalars along the diagonal."""
    mats = []
    for b in blocks:
        if np.isscalar(b):
            if abs(abs(b) - 1) > AXIS_TOL:
                raise ValueError(f"scalar block {b} does not have unit modulus")
            mats.append(np.array([[b]], dtype=complex))
        else:
            b = as_matrix(b)
            if unitarity_defect(b) > BLOCK_TOL:
                raise ValueError("block is not unitary")
            mats.append(b)
    total = sum(b.shape[0] for b in mats)
    if total != dims.total:
        raise ValueError(f"blocks span {total} states, composite space has {dims.total}")
    return Propagator(dims, block_diag(*mats), time)


def hamiltonian_from_propagator(u_of_t, t: float, dt: float = 1e-5, full_output: bool = False):
    """Central-difference estimate of ``i (dU/dt) U^dagger``, Hermitized.

    With *full_output* also returns the anti-Hermitian residual that was
    discarded (max entry modulus), a measure of differentiation error.
    """
    def mat(s):
        u = u_of_t(s)
        return u.matrix if isinstance(u, Propagator) else as_matrix(u)

    u_dot = (mat(t + dt) - mat(t - dt)) / (2 * dt)
    h = 1j * u_dot @ dagger(mat(t))
    herm = 0.5 * (h + dagger(h))
    if full_output:
        return herm, float(np.max(np.abs(h - herm)))
    return herm


# ancilla operators in (g, e) order
ANCILLA_SZ = -SIGMA_Z
ANCILLA_SX = SIGMA_X

SZ_BLOCK = SU2Control.linear((0.0, 0.0, 1.0))
SWAP_BLOCK = SU2Control.linear((-1.0, 0.0, 0.0))
SATURATING_BLOCK = SU2Control.saturating((-1.0, 0.0, 0.0))


def toy_model(t: float) -> tuple[Propagator, np.ndarray]:
    """Exact ``U(t)`` and constant ``H = |0><0| (x) sz + |1><1| (x) sx``."""
    u = assemble_block_diag([su2_propagator(SZ_BLOCK, t), su2_propagator(SWAP_BLOCK, t)],
                            QUBIT_PAIR, t)
    h = block_diag(su2_hamiltonian(SZ_BLOCK, t), su2_hamiltonian(SWAP_BLOCK, t))
    return u, h


def damped_model(t: float) -> tuple[Propagator, np.ndarray]:
    """Toy model whose lower-block coupling decays as ``h(t) = pi e^{-t} / 2``.

    The lower block angle saturates at pi/2, so for large ``t`` every
    ``|1,g>`` input ends in ``|1,e>`` while ``|0,g>`` only picks up a
    phase: the ensemble approaches ``p0 |0,g><0,g| + (1 - p0) |1,e><1,e|``.
    """
    u = assemble_block_diag([su2_propagator(SZ_BLOCK, t), su2_propagator(SATURATING_BLOCK, t)],
                            QUBIT_PAIR, t)
    h = block_diag(su2_hamiltonian(SZ_BLOCK, t), su2_hamiltonian(SATURATING_BLOCK, t))
    return u, h


def damped_steady_state(p0: float) -> np.ndarray:
    """Long-time limit of the damped model's joint state for ground weight *p0*."""
    return np.diag([p0, 0.0, 0.0, 1.0 - p0]).astype(complex)


def transition_hamiltonian(omega1: float = 1.0, omega2: float = 1.0) -> np.ndarray:
    h = np.zeros((4, 4), dtype=complex)
    g0, e0, g1, e1 = (QUBIT_PAIR.flat(0, 0), QUBIT_PAIR.flat(0, 1),
                      QUBIT_PAIR.flat(1, 0), QUBIT_PAIR.flat(1, 1))
    h[g0, g0] = omega1
    h[e1, e1] = omega2
    h[g1, e0] = h[e0, g1] = 1.0
    return h


def transition_model(omega1: float = 1.0, omega2: float = 1.0,
                     t: float = 0.0) -> tuple[Propagator, np.ndarray]:
    """``diag(u1, U2, u3)`` generated by a Hamiltonian with ``|0><1|`` terms.

    The middle block swaps ``|0,e>`` and ``|1,g>`` completely at
    ``t = pi/2 + k pi``, which is when the model cools in one shot.
    """
    h = transition_hamiltonian(omega1, omega2)
    return Propagator(QUBIT_PAIR, expm_hermitian(h, t), t), h


def multi_level_assembly(dims: Dims, block_controls: Sequence[SU2Control], t: float,
                         phases: tuple[complex, complex] = (1.0, 1.0)) -> Propagator:
    """``diag(u1, U_2, ..., U_n, u2)`` for an n-level target and qubit ancilla.

    Block ``i`` (1-based level ``i``) acts on ``(|i-1,e>, |i,g>)``. Its
    ``|i,g>`` diagonal entry is ``cos(theta) - i n_z sin(theta)``, which can
    only vanish when the axis has no z-component, so such controls are
    rejected.
    """
    if dims.m != 2:
        raise ValueError("multi-level assembly needs a qubit ancilla")
    if len(block_controls) != dims.n - 1:
        raise ValueError(f"need {dims.n - 1} block controls, got {len(block_controls)}")
    blocks = [phases[0]]
    for ctrl in block_controls:
        if abs(ctrl.axis_at(t)[2]) > AXIS_TOL:
            raise ValueError("block axis has a z-component; U_{i,g;i,g} can never vanish")
        blocks.append(su2_propagator(ctrl, t))
    blocks.append(phases[1])
    return assemble_block_diag(blocks, dims, t)


HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
XU_TARGET_HAMILTONIAN = np.diag([0.0, 1.0]).astype(complex)
_EXCITED_PROJECTOR = np.diag([0.0, 1.0]).astype(complex)
_GROUND_PROJECTOR = np.diag([1.0, 0.0]).astype(complex)


def xu_phase_gate(gamma: float) -> np.ndarray:
    """Ancilla phase shifter ``diag(1, -i e^{i gamma})``.

    The quarter-turn offset makes the circuit's ``U_{1,g;1,g}`` equal to
    ``(1 - i e^{i gamma} e^{-i s}) / 2``, which vanishes at ``s = pi/2``,
    ``gamma = 0``.
    """
    return np.diag([1.0, -1j * np.exp(1j * gamma)])


def xu_circuit(s: float, gamma: float) -> Propagator:
    """Hadamard, phase shifter, ancilla-controlled ``exp(-i H_A s)``, Hadamard.

    Gates are applied in that temporal order; the ancilla is the second
    tensor factor and controls on ``|e>``.
    """
    eye = np.eye(2)
    had = np.kron(eye, HADAMARD)
    phase = np.kron(eye, xu_phase_gate(gamma))
    target_u = expm_hermitian(XU_TARGET_HAMILTONIAN, s)
    controlled = np.kron(eye, _GROUND_PROJECTOR) + np.kron(target_u, _EXCITED_PROJECTOR)
    return Propagator(QUBIT_PAIR, had @ controlled @ phase @ had, s)


def xu_generator() -> np.ndarray:
    """``i (dU/ds) U^dagger`` of the circuit, constant in ``s`` and ``gamma``."""
    had = np.kron(np.eye(2), HADAMARD)
    return had @ np.kron(XU_TARGET_HAMILTONIAN, _EXCITED_PROJECTOR) @ had
