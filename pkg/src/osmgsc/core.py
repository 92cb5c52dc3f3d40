"""Cooling condition, parameter counts, the cooling measure and time scans."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .basis import Dims, Propagator

ANALYTIC_TOL = 1e-10
INTEGRATED_TOL = 1e-6
DENOMINATOR_FLOOR = 1e-15
REFINE_RESOLUTION = 1e-6


@dataclass(frozen=True)
class OsmgscVerdict:
    satisfied: bool
    max_violation: float
    violating_entry: tuple[int, int]
    tolerance: float


def check_osmgsc(u: Propagator, tol: float = ANALYTIC_TOL) -> OsmgscVerdict:
    """Test ``U_{l,g;k,g} = 0`` for every ``l >= 1`` and every ``k``."""
    excited_rows = np.abs(u.ground_block()[1:])
    l, k = np.unravel_index(np.argmax(excited_rows), excited_rows.shape)
    worst = float(excited_rows[l, k])
    return OsmgscVerdict(worst <= tol, worst, (int(l) + 1, int(k)), tol)


@dataclass(frozen=True)
class ParamCount:
    constraints: int
    free_u: int
    free_h: int


def param_count(dims: Dims) -> ParamCount:
    n, m = dims.n, dims.m
    return ParamCount(
        constraints=2 * n * n - 2 * n,
        free_u=n * (n * (m * m - 2) + 2),
        free_h=n * (m - 1) * (2 * n * (m + 1) - 1),
    )


def measure_f(u: Propagator) -> float:
    """Excited-to-ground post-selected weight ratio of a propagator.

    Returns ``math.inf`` when the ground-to-ground row has no weight; the
    measure is undefined there.
    """
    weights = np.sum(np.abs(u.ground_block()) ** 2, axis=1)
    if weights[0] <= DENOMINATOR_FLOOR:
        return math.inf
    return float(np.sum(weights[1:]) / weights[0])


def golden_section(fun: Callable[[float], float], a: float, b: float,
                   tol: float = REFINE_RESOLUTION) -> tuple[float, float]:
    """Minimize a unimodal *fun* on ``[a, b]`` down to bracket width *tol*."""
    inv_phi = (math.sqrt(5) - 1) / 2
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = fun(d)
    return (c, fc) if fc <= fd else (d, fd)


@dataclass
class TimeScanResult:
    times: np.ndarray
    f_values: np.ndarray
    minima: list[tuple[float, float]] = field(default_factory=list)
    windows: list[tuple[float, float]] = field(default_factory=list)
    undefined: list[float] = field(default_factory=list)

    def best(self, tie_tol: float = 1e-9) -> tuple[float, float] | None:
        """Global minimum over the refined minima and the two grid endpoints.

        Candidates within *tie_tol* of the lowest value count as ties, and
        ties go to the earliest time.
        """
        candidates = list(self.minima)
        for i in (0, len(self.times) - 1):
            if np.isfinite(self.f_values[i]):
                candidates.append((float(self.times[i]), float(self.f_values[i])))
        if not candidates:
            return None
        lowest = min(f for _, f in candidates)
        return min((tf for tf in candidates if tf[1] <= lowest + tie_tol), key=lambda tf: tf[0])


def scan_measure(
    f_of_t: Callable[[float], float],
    t_min: float,
    t_max: float,
    grid_points: int = 2000,
    window_threshold: float = 1e-4,
    resolution: float = REFINE_RESOLUTION,
) -> TimeScanResult:
    """Sample a scalar measure on a uniform grid, then refine.

    Interior grid points where the discrete slope turns from falling to
    non-falling are polished with golden-section search inside their two
    neighbouring cells. Windows are maximal runs of grid points below
    *window_threshold*; their edges are located by root bracketing.
    Non-finite samples are recorded in ``undefined`` and skipped.
    """
    if not t_min < t_max:
        raise ValueError("need t_min < t_max")
    if grid_points < 2:
        raise ValueError("need at least two grid points")

    times = np.linspace(t_min, t_max, grid_points)
    f = np.array([f_of_t(float(t)) for t in times], dtype=float)
    finite = np.isfinite(f)
    result = TimeScanResult(times, f, undefined=[float(t) for t in times[~finite]])

    for i in range(1, grid_points - 1):
        if not (finite[i - 1] and finite[i] and finite[i + 1]):
            continue
        if f[i] < f[i - 1] and f[i] <= f[i + 1]:
            t_ref, f_ref = golden_section(f_of_t, times[i - 1], times[i + 1], resolution)
            if not f_ref <= f[i]:
                t_ref, f_ref = times[i], f[i]
            result.minima.append((float(t_ref), float(f_ref)))

    below = finite & (f < window_threshold)

    def edge(i_out: int, i_in: int) -> float:
        a, b = sorted((times[i_out], times[i_in]))
        g = lambda t: f_of_t(t) - window_threshold
        try:
            return float(brentq(g, a, b, xtol=resolution))
        except ValueError:
            return float(times[i_in])

    i = 0
    while i < grid_points:
        if not below[i]:
            i += 1
            continue
        j = i
        while j + 1 < grid_points and below[j + 1]:
            j += 1
        start = edge(i - 1, i) if i > 0 and finite[i - 1] else float(times[i])
        end = edge(j + 1, j) if j + 1 < grid_points and finite[j + 1] else float(times[j])
        result.windows.append((start, end))
        i = j + 1
    return result


def scan_f(
    u_of_t: Callable[[float], Propagator],
    t_min: float,
    t_max: float,
    grid_points: int = 2000,
    window_threshold: float = 1e-4,
) -> TimeScanResult:
    """``scan_measure`` applied to ``measure_f(u_of_t(t))``."""
    return scan_measure(lambda t: measure_f(u_of_t(t)), t_min, t_max, grid_points,
                        window_threshold)
