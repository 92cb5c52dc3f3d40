"""End-to-end cooling runs: one-shot post-selection and the repeated baseline."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import inverse
from .basis import Dims, Propagator
from .core import TimeScanResult, measure_f, scan_measure
from .jc import JCParams, jc_f_k, jc_hamiltonian, jc_propagator_analytic, jc_success_bound
from .numerics import dagger
from .states import (DensityOperator, NoOutcomeError, ThermalSpec, measure_ancilla_ground,
                     outcome_probability, thermal_state)

log = logging.getLogger(__name__)

MODELS = ("toy", "damped", "transition", "jc", "xu")
SURVIVAL_FLOOR = 1e-15


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Model:
    name: str
    dims: Dims
    propagator: Callable[[float], Propagator]
    hamiltonian: Callable[[float], np.ndarray]
    measure: Callable[[float], float]
    bound: Callable[[float, float], float] | None = None
    time_scale: float = 1.0


def build_model(name: str, params: dict | None = None) -> Model:
    """Instantiate one of ``MODELS`` from a flat parameter mapping.

    Recognised keys: ``omega1``, ``omega2`` (transition); ``omega``,
    ``delta``, ``g``, ``n_max``, ``k`` (jc); ``gamma`` (xu, whose time
    argument is the controlled-evolution duration ``s``).
    """
    params = dict(params or {})
    two = inverse.QUBIT_PAIR
    if name == "toy":
        prop = lambda t: inverse.toy_model(t)[0]
        return Model(name, two, prop, lambda t: inverse.toy_model(t)[1],
                     lambda t: measure_f(prop(t)))
    if name == "damped":
        prop = lambda t: inverse.damped_model(t)[0]
        return Model(name, two, prop, lambda t: inverse.damped_model(t)[1],
                     lambda t: measure_f(prop(t)))
    if name == "transition":
        w1, w2 = float(params.get("omega1", 1.0)), float(params.get("omega2", 1.0))
        h = inverse.transition_hamiltonian(w1, w2)
        prop = lambda t: inverse.transition_model(w1, w2, t)[0]
        return Model(name, two, prop, lambda t: h, lambda t: measure_f(prop(t)))
    if name == "xu":
        gamma = float(params.get("gamma", 0.0))
        prop = lambda s: inverse.xu_circuit(s, gamma)
        h = inverse.xu_generator()
        return Model(name, two, prop, lambda s: h, lambda s: measure_f(prop(s)))
    if name == "jc":
        p = JCParams(float(params.get("omega", 1.0)), float(params.get("delta", 1.0)),
                     float(params.get("g", 0.2)), int(params.get("n_max", 12)))
        k = int(params.get("k", 3))
        if not 1 <= k < p.n_max:
            raise ConfigError(f"need 1 <= k < n_max={p.n_max}, got k={k}")
        h = jc_hamiltonian(p)
        return Model(name, p.dims, lambda t: jc_propagator_analytic(t, p), lambda t: h,
                     lambda t: jc_f_k(t, p, k),
                     bound=lambda t, temp: jc_success_bound(t, p, temp, k),
                     time_scale=1.0 / p.g if p.g > 0 else 1.0)
    raise ConfigError(f"unknown model {name!r}; choose from {', '.join(MODELS)}")


@dataclass(frozen=True)
class ScanSettings:
    t_min: float = 0.0
    t_max: float = 10.0
    grid_points: int = 2000
    window_threshold: float = 1e-4

    def __post_init__(self):
        if not self.t_min < self.t_max:
            raise ConfigError("scan needs t_min < t_max")
        if self.grid_points < 2:
            raise ConfigError("scan needs at least two grid points")


@dataclass(frozen=True)
class ProtocolConfig:
    model: str
    thermal: ThermalSpec
    params: dict = field(default_factory=dict)
    measure_time: float | str = "auto"
    scan: ScanSettings = ScanSettings()
    seed: int = 0
    interval_range: tuple[float, float] = (0.1, 10.0)

    def build(self) -> Model:
        model = build_model(self.model, self.params)
        if self.thermal.n_levels != model.dims.n:
            raise ConfigError(f"thermal state keeps {self.thermal.n_levels} levels, "
                              f"model {self.model} has {model.dims.n}")
        return model


@dataclass
class CoolingReport:
    p_g: float
    p_c: float
    ground_fidelity: float
    populations: list[float]
    f_at_measurement: float
    bound_rhs: float | None
    measure_time: float

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d: dict) -> "CoolingReport":
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "CoolingReport":
        return cls.from_dict(json.loads(text))


def scan_model(model: Model, scan: ScanSettings) -> TimeScanResult:
    return scan_measure(model.measure, scan.t_min, scan.t_max, scan.grid_points,
                        scan.window_threshold)


def resolve_measure_time(cfg: ProtocolConfig, model: Model) -> float:
    if cfg.measure_time != "auto":
        return float(cfg.measure_time)
    best = scan_model(model, cfg.scan).best()
    if best is None:
        raise ConfigError("scan found no time with a defined measure")
    return best[0]


def _report(u: Propagator, rho_a: DensityOperator, f: float, bound, t: float,
            survival: float | None = None) -> tuple[CoolingReport, DensityOperator, float]:
    p_g, post = measure_ancilla_ground(u, rho_a)
    p_c = min(1.0, max(0.0, outcome_probability(u, rho_a, 0) / p_g))
    pops = post.populations
    report = CoolingReport(
        p_g=p_g if survival is None else survival * p_g,
        p_c=p_c,
        ground_fidelity=float(pops[0]),
        populations=[float(x) for x in pops],
        f_at_measurement=float(f),
        bound_rhs=bound,
        measure_time=float(t),
    )
    return report, post, p_g


def run_one_shot(cfg: ProtocolConfig) -> CoolingReport:
    """Thermal target + ancilla in ``|g>``, evolve, keep only ancilla-ground runs."""
    model = cfg.build()
    rho_a = thermal_state(cfg.thermal)
    t = resolve_measure_time(cfg, model)
    bound = None
    if model.bound is not None and cfg.thermal.temp > 0:
        bound = float(model.bound(t, cfg.thermal.temp))
    report, _, _ = _report(model.propagator(t), rho_a, model.measure(t), bound, t)
    if report.ground_fidelity < 1 - 10 * report.f_at_measurement:
        log.warning("ground fidelity %.6g below 1 - 10 f = %.6g at t=%g",
                    report.ground_fidelity, 1 - 10 * report.f_at_measurement, t)
    return report


def run_repeated_baseline(cfg: ProtocolConfig, n_measurements: int,
                          intervals=None) -> list[CoolingReport]:
    """Random-interval evolution with an ancilla-ground measurement after each.

    Intervals are drawn uniformly from ``cfg.interval_range`` scaled by the
    model's natural time unit (``1/g`` for jc) unless given explicitly.
    After every successful measurement the ancilla is back in ``|g>``, so
    the next step starts from ``rho_A_post (x) |g><g|``. Each report
    carries the cumulative survival probability in ``p_g`` and the clock
    time of that measurement. The run stops early, returning the partial
    trajectory, once survival drops below ``SURVIVAL_FLOOR`` or an outcome
    becomes impossible.
    """
    if n_measurements < 1:
        raise ValueError("need at least one measurement")
    model = cfg.build()
    if intervals is None:
        rng = np.random.default_rng(cfg.seed)
        lo, hi = cfg.interval_range
        intervals = rng.uniform(lo, hi, n_measurements) * model.time_scale
    intervals = [float(x) for x in intervals][:n_measurements]

    rho = thermal_state(cfg.thermal)
    survival, clock = 1.0, 0.0
    u_prev = model.propagator(0.0).matrix
    reports = []
    for tau in intervals:
        u_next = model.propagator(clock + tau).matrix
        step = Propagator(model.dims, u_next @ dagger(u_prev), tau)
        clock += tau
        try:
            report, rho, p_step = _report(step, rho, measure_f(step), None, clock, survival)
        except NoOutcomeError:
            log.warning("ancilla ground outcome impossible at t=%g; stopping", clock)
            break
        survival *= p_step
        reports.append(report)
        u_prev = u_next
        if survival < SURVIVAL_FLOOR:
            log.warning("survival %.3g below %.0e; stopping", survival, SURVIVAL_FLOOR)
            break
    return reports
