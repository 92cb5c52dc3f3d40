"""Invariant checks behind ``osmgsc verify``.

Each check draws its random inputs from a shared seeded generator and
returns a ``CheckResult``; none of them raise on failure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.stats import unitary_group

from . import inverse
from .basis import Dims, Propagator
from .core import check_osmgsc, measure_f, param_count, scan_f
from .jc import JCParams, jc_f_k, jc_hamiltonian, jc_propagator_analytic, jc_success_bound
from .numerics import expm_hermitian, integrate_schrodinger, is_unitary
from .protocol import build_model
from .states import (DensityOperator, ThermalSpec, cooling_success, outcome_distribution,
                     outcome_probability, thermal_state)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def random_hermitian(rng, dim: int) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (a + a.conj().T) / 2


def random_density(rng, dim: int) -> DensityOperator:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return DensityOperator(rho / np.trace(rho).real)


def random_unitary(rng, dim: int) -> np.ndarray:
    return unitary_group.rvs(dim, random_state=rng)


def _group_property(rng):
    worst = 0.0
    for _ in range(20):
        h = random_hermitian(rng, int(rng.integers(2, 9)))
        t1, t2 = rng.uniform(-5, 5, 2)
        lhs = expm_hermitian(h, t1) @ expm_hermitian(h, t2)
        worst = max(worst, np.max(np.abs(lhs - expm_hermitian(h, t1 + t2))))
    return worst <= 1e-9, f"max deviation {worst:.2e} (tol 1e-9)"


def _expm_unitary(rng):
    ok = all(is_unitary(expm_hermitian(random_hermitian(rng, int(rng.integers(2, 17))),
                                       rng.uniform(-10, 10)))
             for _ in range(20))
    return ok, "20 random Hermitian generators, dim <= 16"


def _rk4_vs_expm(rng):
    h = random_hermitian(rng, 4) / 2
    t = 10.0
    dev = np.max(np.abs(integrate_schrodinger(lambda s: h, t, 1e-3) - expm_hermitian(h, t)))
    return dev <= 1e-6, f"deviation {dev:.2e} at t={t} (tol 1e-6)"


def _completeness(rng):
    worst, ok = 0.0, True
    for _ in range(50):
        dims = Dims(int(rng.integers(2, 7)), 2)
        u = Propagator(dims, random_unitary(rng, dims.total))
        rho = random_density(rng, dims.n)
        probs = outcome_distribution(u, rho)
        worst = max(worst, abs(probs.sum() - 1))
        ok &= 0 <= cooling_success(u, rho) <= 1
    return ok and worst <= 1e-10, f"max |sum - 1| = {worst:.2e}"


def _eq2_paths_agree(rng):
    worst = 0.0
    for _ in range(50):
        dims = Dims(int(rng.integers(2, 6)), int(rng.integers(2, 4)))
        u = Propagator(dims, random_unitary(rng, dims.total))
        p = rng.dirichlet(np.ones(dims.n))
        rho = DensityOperator.diagonal(p)
        l = int(rng.integers(dims.n))
        brute = sum(p[k] * abs(u.matrix[l * dims.m, k * dims.m]) ** 2 for k in range(dims.n))
        general = float(np.real(u.ground_block()[l] @ rho.matrix @ u.ground_block()[l].conj()))
        worst = max(worst, abs(outcome_probability(u, rho, l) - brute), abs(general - brute))
    return worst <= 1e-12, f"max deviation {worst:.2e} (tol 1e-12)"


def _thermal_valid(rng):
    for _ in range(20):
        thermal_state(ThermalSpec(rng.uniform(0.1, 3), rng.uniform(0, 5), int(rng.integers(1, 30))))
    return True, "20 random thermal states constructed as valid density operators"


def _global_phase(rng):
    worst = 0.0
    for _ in range(20):
        dims = Dims(int(rng.integers(2, 5)), 2)
        u = random_unitary(rng, dims.total)
        phase = np.exp(1j * rng.uniform(0, 2 * np.pi))
        f1, f2 = measure_f(Propagator(dims, u)), measure_f(Propagator(dims, phase * u))
        worst = max(worst, abs(f1 - f2) / max(1.0, abs(f1)))
    return worst <= 1e-12, f"max relative change {worst:.2e}"


def _f_zero_iff_condition(rng):
    cases = [inverse.toy_model(math.pi / 2)[0], inverse.toy_model(1.0)[0],
             inverse.xu_circuit(math.pi / 2, 0.0), inverse.xu_circuit(1.0, 0.3),
             inverse.transition_model(1.0, 1.0, math.pi / 2)[0]]
    ok = all((measure_f(u) <= 1e-24) == check_osmgsc(u, 1e-12).satisfied for u in cases)
    return ok, f"{len(cases)} exact constructions"


def _param_counts(rng):
    for n in range(2, 6):
        for m in range(2, 5):
            dims = Dims(n, m)
            pairs = [(l, k) for l in range(1, n) for k in range(n)]
            if param_count(dims).constraints != 2 * len(pairs):
                return False, f"mismatch at n={n}, m={m}"
    return True, "2 <= n <= 5, 2 <= m <= 4"


def _eq4_consistency(rng):
    worst = 0.0
    for name in ("toy", "damped", "transition", "jc", "xu"):
        model = build_model(name)
        for t in rng.uniform(0, 10, 5):
            h_fd = inverse.hamiltonian_from_propagator(model.propagator, t)
            worst = max(worst, np.max(np.abs(h_fd - model.hamiltonian(t))))
    return worst <= 1e-7, f"max deviation {worst:.2e} over five models (tol 1e-7)"


def _toy_scan(rng):
    res = scan_f(lambda t: inverse.toy_model(t)[0], 0.0, 10.0, 2000)
    ts = [t for t, f in res.minima]
    want = [math.pi / 2 + math.pi * k for k in range(3)]
    ok = len(ts) == 3 and all(abs(a - b) <= 1e-5 for a, b in zip(ts, want))
    return ok, f"minima at {', '.join(f'{t:.7f}' for t in ts)}"


def _jc_analytic(rng):
    p = JCParams(1.0, 1.0, 0.2, 12)
    h = jc_hamiltonian(p)
    worst = max(np.max(np.abs(jc_propagator_analytic(t, p).matrix - expm_hermitian(h, t)))
                for t in (1.0, 50.0, 150.0))
    return worst <= 1e-8, f"max deviation {worst:.2e} (tol 1e-8)"


def _jc_bound(rng):
    p = JCParams(1.0, 1.0, 0.2, 12)
    violations = 0
    for temp in (0.5, 1.0, 2.0):
        n_levels = 40
        q = JCParams(p.omega, p.delta, p.g, n_levels)
        rho = thermal_state(ThermalSpec(p.omega, temp, n_levels))
        for t in rng.uniform(0, 200, 10):
            if cooling_success(jc_propagator_analytic(t, q), rho) < jc_success_bound(t, p, temp, 3):
                violations += 1
    return violations == 0, f"{violations} violations over 30 (t, T) samples"


def _fk_monotone(rng):
    p = JCParams()
    t = rng.uniform(0, 500, 200)
    ok = all(np.all(jc_f_k(t, p, k) <= jc_f_k(t, p, k + 1) + 1e-15) for k in range(1, 8))
    return ok, "f_k <= f_(k+1) at 200 random times, k = 1..7"


CHECKS: list[tuple[str, Callable]] = [
    ("expm group property", _group_property),
    ("expm output unitary", _expm_unitary),
    ("RK4 agrees with expm", _rk4_vs_expm),
    ("thermal states valid", _thermal_valid),
    ("outcome probabilities complete", _completeness),
    ("P_lg code paths agree", _eq2_paths_agree),
    ("f invariant under global phase", _global_phase),
    ("f = 0 iff cooling condition", _f_zero_iff_condition),
    ("constraint count by enumeration", _param_counts),
    ("H = i dU/dt U^dagger for all models", _eq4_consistency),
    ("toy scan minima at pi/2 + k pi", _toy_scan),
    ("JC analytic = numeric propagator", _jc_analytic),
    ("JC success bound holds", _jc_bound),
    ("f_k nondecreasing in k", _fk_monotone),
]


def run_checks(seed: int = 0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    results = []
    for name, check in CHECKS:
        try:
            passed, detail = check(rng)
        except Exception as exc:  # a crashing check is a failed check
            passed, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(passed), detail))
    return results
