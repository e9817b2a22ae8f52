"""Scenario configuration, model orchestration, error metrics, and file output.

A scenario runs the same solitary-wave initial data through three models:

* B      -- the coupled symmetric system (reference),
* K      -- the classical two-wave reconstruction (bottom-blind),
* K_topo -- the topography-modified reconstruction,

then records the relative L-infinity errors of K and K_topo against B over
time, reflected-wave metrics, conservation drifts, and field snapshots.
Outputs are plain CSV (17 significant digits, so re-reading reproduces the
float64 values bit-exactly) plus a meta.json echoing the full configuration.

Scenario defaults reproduce the published parameter table:

    validate  eps=0.05: T=20, L=80,  dx=0.03    step  eps=0.05: T=89, L=140, dx=0.03
              eps=0.1:  T=10, L=80,  dx=0.04          eps=0.1:  T=12, L=80,  dx=0.04
              eps=0.2:  T=5,  L=80,  dx=0.05          eps=0.2:  T=12, L=80,  dx=0.05
    sinusoid  eps=0.1:  T=10, L=20,  dx=0.04  (wavelength (1 + eps*alpha/4)/eps)

with alpha = beta0 = b0 = 0.5 everywhere and dt = dx always.  Growth
scenarios integrate the right-going equation only and track the corrector
norm series; the slow sinusoidal bottom case scales its geometry with 1/eps
(start position 1/eps, domain 4/eps) so runs at different eps see the same
modulation phase.
"""

from __future__ import annotations

import dataclasses
import json
import math
import time as _time
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from . import __version__
from .boussinesq import BoussinesqProblem, run_boussinesq
from .errors import ConfigurationError
from .grid import (
    BathymetryProfile,
    Field,
    Grid1D,
    ModelCoefficients,
    SolitonSpec,
    TimeGrid,
    bathymetry_from_config,
    discrete_h1_eps,
    discrete_l2,
    soliton_field,
)
from .kdv import KdvProblem, run
from .reconstruct import GrowthDiagnostic, growth_diagnostic, topo_modified_surfaces

__all__ = [
    "ScenarioConfig",
    "ComparisonReport",
    "SnapshotRecord",
    "GrowthReport",
    "ConvergenceReport",
    "run_scenario",
    "run_growth",
    "convergence_study",
    "relative_linf_error",
    "reflected_wave_metric",
    "write_outputs",
    "write_growth_outputs",
    "write_convergence_outputs",
]

SCHEME_VERSION = f"longwave/{__version__} crank-nicolson-relaxation"

_SCENARIOS = ("validate", "step", "sinusoid", "convergence", "growth")

# (final_time, domain_length, dx, initial_crest) per scenario and epsilon.
_VALIDATE_TABLE = {
    0.05: (20.0, 80.0, 0.03, 30.0),
    0.1: (10.0, 80.0, 0.04, 30.0),
    0.2: (5.0, 80.0, 0.05, 30.0),
}
_STEP_TABLE = {
    0.05: (89.0, 140.0, 0.03, 44.0),
    0.1: (12.0, 80.0, 0.04, 38.0),
    0.2: (12.0, 80.0, 0.05, 38.0),
}
_SINUSOID_TABLE = {
    0.1: (10.0, 20.0, 0.04, 2.0),
}

_BALANCED_TRIPLE = (math.sqrt(2.0 / 3.0), 0.5, 0.5)
_ZERO_SMOOTHING_TRIPLE = (math.sqrt(2.0 / 3.0), 1.0, 1.0)


def _scenario_geometry(scenario: str, growth_kind: str | None,
                       epsilon: float, alpha: float):
    if scenario == "validate" or scenario == "convergence":
        table = _VALIDATE_TABLE
        fallback = (1.0 / epsilon, 80.0, 0.04, 30.0)
    elif scenario == "step" or (scenario == "growth" and growth_kind == "step"):
        table = _STEP_TABLE
        fallback = (max(12.0, 1.0 / epsilon + 2.0), 80.0, 0.04, 38.0)
    elif scenario == "sinusoid":
        table = _SINUSOID_TABLE
        fallback = (1.0 / epsilon, 20.0, 0.04, 2.0)
    elif scenario == "growth" and growth_kind == "sinusoid":
        table = {}
        fallback = (1.0 / epsilon, 4.0 / epsilon, 0.04, 1.0 / epsilon)
    else:
        raise ConfigurationError(f"no geometry defaults for scenario {scenario!r}")
    return table.get(epsilon, fallback)


@dataclass
class ScenarioConfig:
    """Full description of one experiment; mirrors the JSON config schema."""

    scenario: str
    epsilon: float
    final_time: float | None = None
    domain_length: float | None = None
    dx: float | None = None
    alpha: float = 0.5
    shift: float | None = None
    bathymetry: dict | None = None
    theta: float | None = None
    lambda1: float | None = None
    lambda2: float | None = None
    snapshot_times: list[float] | None = None
    output_dir: str | None = None
    error_interval: float | None = None
    overtime: bool = False
    refinement_levels: int = 3
    growth_kind: str | None = None
    sobolev_order: int = 2
    refl_width_multiplier: float = 5.0
    boussinesq_nonlinear_mode: str = "conservative"
    lagged_eta_level: str = "n"
    kdv_nonlinear_mode: str = "neighbor_average"
    topo_eta_bracket: str = "sign_split"

    def __post_init__(self):
        if self.scenario not in _SCENARIOS:
            raise ConfigurationError(
                f"scenario must be one of {_SCENARIOS}, got {self.scenario!r}"
            )
        if self.epsilon <= 0.0:
            raise ConfigurationError(f"epsilon must be positive, got {self.epsilon}")
        if self.alpha <= 0.0:
            raise ConfigurationError(f"soliton amplitude must be positive, got {self.alpha}")
        if self.scenario == "growth":
            if self.growth_kind not in ("step", "sinusoid"):
                raise ConfigurationError(
                    "growth scenarios need growth_kind 'step' or 'sinusoid'"
                )
        elif self.growth_kind is not None:
            raise ConfigurationError("growth_kind is only valid for growth scenarios")
        if self.refinement_levels < 1:
            raise ConfigurationError("refinement_levels must be >= 1")
        self._fill_defaults()
        self._validate_filled()

    def _fill_defaults(self) -> None:
        t_def, l_def, dx_def, x0_def = _scenario_geometry(
            self.scenario, self.growth_kind, self.epsilon, self.alpha
        )
        if self.final_time is None:
            self.final_time = t_def
        if self.overtime:
            self.final_time = self.epsilon ** -1.5
        if self.domain_length is None:
            self.domain_length = l_def
        if self.dx is None:
            self.dx = dx_def
        if self.shift is None:
            self.shift = -x0_def
        if self.theta is None or self.lambda1 is None or self.lambda2 is None:
            triple = (
                _ZERO_SMOOTHING_TRIPLE if self.scenario == "growth" else _BALANCED_TRIPLE
            )
            self.theta, self.lambda1, self.lambda2 = triple
        if self.bathymetry is None:
            self.bathymetry = self._default_bathymetry()
        if self.error_interval is None:
            target = self.final_time / 100.0
            self.error_interval = max(self.dx, round(target / self.dx) * self.dx)
        if self.snapshot_times is None:
            if self.scenario in ("validate", "convergence"):
                self.snapshot_times = [self.final_time]
            else:
                marks = [0.25, 0.5, 0.75, 1.0]
                times = {round(m * self.final_time, 10) for m in marks}
                if 1.0 / self.epsilon < self.final_time:
                    times.add(1.0 / self.epsilon)
                self.snapshot_times = sorted(times)

    def _default_bathymetry(self) -> dict:
        if self.scenario in ("validate", "convergence"):
            return {"kind": "flat"}
        if self.scenario == "step" or (self.scenario == "growth" and self.growth_kind == "step"):
            return {
                "kind": "step",
                "beta0": 0.5,
                "center": self.domain_length / 2.0,
                "ramp_half_width": 1.5,
            }
        if self.scenario == "sinusoid":
            wavelength = (1.0 + self.epsilon * self.alpha / 4.0) / self.epsilon
            return {
                "kind": "sinusoid",
                "b0": 0.5,
                "wavelength": wavelength,
                "phase": math.pi / 2.0,
            }
        # growth over the slowly modulated bottom
        return {"kind": "slow_sinusoid", "amplitude": 0.5, "frequency": self.epsilon}

    def _validate_filled(self) -> None:
        if self.dx <= 0.0 or self.final_time <= 0.0 or self.domain_length <= 0.0:
            raise ConfigurationError("dx, final_time and domain_length must be positive")
        if self.error_interval < self.dx - 1e-12:
            raise ConfigurationError("error_interval must be at least one step dx")
        if self.boussinesq_nonlinear_mode not in ("conservative", "weighted"):
            raise ConfigurationError(
                f"unknown boussinesq_nonlinear_mode {self.boussinesq_nonlinear_mode!r}"
            )
        if self.kdv_nonlinear_mode not in ("neighbor_average", "split_form"):
            raise ConfigurationError(f"unknown kdv_nonlinear_mode {self.kdv_nonlinear_mode!r}")
        if self.lagged_eta_level not in ("n", "predictor"):
            raise ConfigurationError(f"unknown lagged_eta_level {self.lagged_eta_level!r}")
        if self.topo_eta_bracket not in ("sign_split", "identical"):
            raise ConfigurationError(f"unknown topo_eta_bracket {self.topo_eta_bracket!r}")
        bathymetry_from_config(self.bathymetry)  # raises on bad parameters
        for t in self.snapshot_times:
            if t < -1e-12 or t > self.final_time + 1e-9:
                raise ConfigurationError(
                    f"snapshot time {t} outside the simulated window [0, {self.final_time}]"
                )

    # -- derived quantities ------------------------------------------------

    @property
    def dt(self) -> float:
        """Time step; always equal to dx (characteristic-aligned quadrature)."""
        return self.dx

    def build_grid(self) -> Grid1D:
        return Grid1D.from_length(self.domain_length, self.dx)

    def build_time_grid(self) -> TimeGrid:
        return TimeGrid.from_final_time(self.final_time, self.dt)

    def build_coefficients(self) -> ModelCoefficients:
        return ModelCoefficients(self.theta, self.lambda1, self.lambda2, self.epsilon)

    def build_bathymetry(self) -> BathymetryProfile:
        return bathymetry_from_config(self.bathymetry)

    def build_soliton(self) -> SolitonSpec:
        return SolitonSpec(self.alpha, self.shift, self.epsilon)

    def error_stride(self, time_grid: TimeGrid) -> int:
        return max(1, min(int(round(self.error_interval / self.dt)), time_grid.num_steps))

    def snapshot_steps(self, time_grid: TimeGrid) -> list[int]:
        """Snapshot times rounded to multiples of the error cadence."""
        stride = self.error_stride(time_grid)
        steps = set()
        for t in self.snapshot_times:
            m = int(round(t / self.dt / stride)) * stride
            steps.add(min(max(m, 0), time_grid.num_steps))
        return sorted(steps)

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        if not isinstance(data, dict):
            raise ConfigurationError("config root must be a JSON object")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        if "scenario" not in data or "epsilon" not in data:
            raise ConfigurationError("config must provide 'scenario' and 'epsilon'")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigurationError(f"bad config: {exc}") from exc

    @classmethod
    def from_json(cls, path) -> "ScenarioConfig":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config file {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------

def relative_linf_error(a, b) -> float:
    """max|a - b| / max|b|, or the absolute max|a| when b vanishes."""
    a_vals = a.values if isinstance(a, Field) else np.asarray(a, dtype=float)
    b_vals = b.values if isinstance(b, Field) else np.asarray(b, dtype=float)
    if a_vals.shape != b_vals.shape or (
        isinstance(a, Field) and isinstance(b, Field) and a.grid != b.grid
    ):
        raise ConfigurationError("fields to compare live on different grids")
    scale = float(np.max(np.abs(b_vals)))
    diff = float(np.max(np.abs(a_vals - b_vals)))
    if scale < 1e-14:
        return float(np.max(np.abs(a_vals)))
    return diff / scale


def reflected_wave_metric(eta: Field, main_wave_position: float,
                          width_param: float, multiplier: float = 5.0) -> float:
    """Signed extremum of eta over the region more than ``multiplier`` widths
    (multiplier/width_param) left of the main crest; 0.0 when that region is
    empty.  The magnitude is max|eta| there; the sign records whether the
    strongest feature is a crest or a depression."""
    nodes = eta.grid.nodes
    cutoff = main_wave_position - multiplier / width_param
    mask = nodes < cutoff
    if not np.any(mask):
        return 0.0
    region = eta.values[mask]
    return float(region[np.argmax(np.abs(region))])


def _main_crest_position(values: np.ndarray, grid: Grid1D) -> float:
    """Position of the global maximum (ties broken by smallest index)."""
    return float(grid.nodes[int(np.argmax(values))])


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

@dataclass
class SnapshotRecord:
    time: float
    x: np.ndarray
    eta_boussinesq: np.ndarray
    eta_kdv: np.ndarray
    eta_kdv_topo: np.ndarray
    v_boussinesq: np.ndarray
    bottom_rescaled: np.ndarray


@dataclass
class ComparisonReport:
    config: ScenarioConfig
    realized_final_time: float
    error_times: np.ndarray
    err_kdv: np.ndarray
    err_kdv_topo: np.ndarray
    refl_boussinesq: np.ndarray
    refl_kdv: np.ndarray
    refl_topo: np.ndarray
    l2_drift: np.ndarray
    h1eps_drift: np.ndarray
    snapshots: list[SnapshotRecord]
    runtimes: dict[str, float]
    coefficients: ModelCoefficients
    validation_error: float | None
    wrap_contamination: float

    def error_at(self, t: float, which: str = "kdv") -> float:
        series = self.err_kdv if which == "kdv" else self.err_kdv_topo
        idx = int(np.argmin(np.abs(self.error_times - t)))
        if abs(self.error_times[idx] - t) > self.config.error_interval / 2.0 + 1e-9:
            raise ConfigurationError(f"no error sample near t={t}")
        return float(series[idx])


@dataclass
class GrowthReport:
    config: ScenarioConfig
    diagnostic: GrowthDiagnostic
    crossing_time: float | None
    runtimes: dict[str, float]


@dataclass
class ConvergenceReport:
    config: ScenarioConfig
    deltas: list[float]
    kdv_errors: list[float]
    kdv_orders: list[float]
    boussinesq_diffs: list[float]
    boussinesq_orders: list[float]
    monotone: bool


# ---------------------------------------------------------------------------
# Scenario runners
# ---------------------------------------------------------------------------

def run_scenario(config: ScenarioConfig) -> ComparisonReport:
    """Run the three models of a comparison scenario and collect all metrics."""
    if config.scenario not in ("validate", "step", "sinusoid"):
        raise ConfigurationError(
            f"run_scenario handles validate/step/sinusoid, got {config.scenario!r}; "
            "use run_growth or convergence_study instead"
        )
    grid = config.build_grid()
    time_grid = config.build_time_grid()
    coeffs = config.build_coefficients()
    bottom = config.build_bathymetry()
    spec = config.build_soliton()
    u0 = soliton_field(spec, grid)
    half = Field(u0.values / 2.0, grid)
    needs_topo = not bottom.is_flat()

    stride = config.error_stride(time_grid)
    t0 = _time.perf_counter()
    u_traj = run(
        KdvProblem(config.epsilon, grid, time_grid,
                   nonlinear_mode=config.kdv_nonlinear_mode),
        u0,
        stride=1 if needs_topo else stride,
    )
    kdv_seconds = _time.perf_counter() - t0

    t0 = _time.perf_counter()
    b_traj = run_boussinesq(
        BoussinesqProblem(coeffs, bottom, grid, time_grid,
                          nonlinear_mode=config.boussinesq_nonlinear_mode,
                          lagged_eta_level=config.lagged_eta_level),
        half, half, stride=stride,
    )
    boussinesq_seconds = _time.perf_counter() - t0

    error_steps = list(range(0, time_grid.num_steps + 1, stride))
    if error_steps[-1] != time_grid.num_steps:
        error_steps.append(time_grid.num_steps)
    snapshot_steps = set(config.snapshot_steps(time_grid))

    l2_ref = discrete_l2(u0)
    h1_ref = discrete_h1_eps(half, half, coeffs)
    k = spec.width_param
    mult = config.refl_width_multiplier

    times, err_k, err_kt = [], [], []
    refl_b, refl_k, refl_kt = [], [], []
    l2_drift, h1_drift = [], []
    snapshots: list[SnapshotRecord] = []
    wrap_contamination = 0.0
    seam = np.r_[np.arange(grid.num_points - 5, grid.num_points), np.arange(0, 5)]
    recon_seconds = 0.0

    for m in error_steps:
        t = m * time_grid.dt
        u_now = Field(u_traj.at_step(m).copy(), grid)
        v_b, eta_b = b_traj.at_time(t)

        t0 = _time.perf_counter()
        eta_k_vals = u_now.values / 2.0
        if needs_topo:
            topo = topo_modified_surfaces(u_traj, None, bottom, coeffs, t,
                                          eta_bracket=config.topo_eta_bracket)
            eta_kt_vals = topo.eta.values
        else:
            eta_kt_vals = eta_k_vals
        recon_seconds += _time.perf_counter() - t0

        times.append(t)
        err_k.append(relative_linf_error(eta_k_vals, eta_b.values))
        err_kt.append(relative_linf_error(eta_kt_vals, eta_b.values))
        refl_b.append(reflected_wave_metric(
            eta_b, _main_crest_position(eta_b.values, grid), k, mult))
        refl_k.append(reflected_wave_metric(
            Field(eta_k_vals, grid), _main_crest_position(eta_k_vals, grid), k, mult))
        refl_kt.append(reflected_wave_metric(
            Field(eta_kt_vals, grid), _main_crest_position(eta_kt_vals, grid), k, mult))
        l2_drift.append(abs(discrete_l2(u_now) - l2_ref) / l2_ref)
        h1_drift.append(abs(discrete_h1_eps(v_b, eta_b, coeffs) - h1_ref) / h1_ref)
        wrap_contamination = max(
            wrap_contamination, float(np.max(np.abs(eta_b.values[seam]))) / config.alpha
        )

        if m in snapshot_steps:
            snapshots.append(SnapshotRecord(
                time=t,
                x=grid.nodes.copy(),
                eta_boussinesq=eta_b.values.copy(),
                eta_kdv=np.array(eta_k_vals),
                eta_kdv_topo=np.array(eta_kt_vals),
                v_boussinesq=v_b.values.copy(),
                bottom_rescaled=-1.0 + bottom.sample(grid),
            ))

    validation_error = None
    if bottom.is_flat():
        tf = time_grid.final_time
        exact = soliton_field(spec, grid, tf)
        validation_error = relative_linf_error(u_traj.at_step(time_grid.num_steps),
                                               exact.values)

    return ComparisonReport(
        config=config,
        realized_final_time=time_grid.final_time,
        error_times=np.asarray(times),
        err_kdv=np.asarray(err_k),
        err_kdv_topo=np.asarray(err_kt),
        refl_boussinesq=np.asarray(refl_b),
        refl_kdv=np.asarray(refl_k),
        refl_topo=np.asarray(refl_kt),
        l2_drift=np.asarray(l2_drift),
        h1eps_drift=np.asarray(h1_drift),
        snapshots=snapshots,
        runtimes={
            "kdv_solve": kdv_seconds,
            "boussinesq_solve": boussinesq_seconds,
            "reconstruction": recon_seconds,
        },
        coefficients=coeffs,
        validation_error=validation_error,
        wrap_contamination=wrap_contamination,
    )


def run_growth(config: ScenarioConfig) -> GrowthReport:
    """Right-going run plus corrector-norm series for a growth scenario."""
    if config.scenario != "growth":
        raise ConfigurationError("run_growth needs a growth scenario")
    grid = config.build_grid()
    time_grid = config.build_time_grid()
    coeffs = config.build_coefficients()
    bottom = config.build_bathymetry()
    spec = config.build_soliton()
    u0 = soliton_field(spec, grid)

    stride = config.error_stride(time_grid)
    t0 = _time.perf_counter()
    u_traj = run(
        KdvProblem(config.epsilon, grid, time_grid,
                   nonlinear_mode=config.kdv_nonlinear_mode),
        u0, stride=stride,
    )
    kdv_seconds = _time.perf_counter() - t0

    crossing = None
    fit_window = None
    if config.growth_kind == "step":
        center = config.bathymetry.get("center", config.domain_length / 2.0)
        crossing = (center + config.shift) / spec.speed  # crest starts at -shift
        fit_window = (min(crossing + 1.0, time_grid.final_time - 4 * stride * config.dt),
                      time_grid.final_time)

    t0 = _time.perf_counter()
    diag = growth_diagnostic(u_traj, None, bottom, coeffs,
                             s=config.sobolev_order, fit_window=fit_window)
    diag_seconds = _time.perf_counter() - t0
    return GrowthReport(
        config=config,
        diagnostic=diag,
        crossing_time=crossing,
        runtimes={"kdv_solve": kdv_seconds, "diagnostic": diag_seconds},
    )


def convergence_study(config: ScenarioConfig) -> ConvergenceReport:
    """Observed orders of both steppers under successive halvings of dx = dt.

    The scalar stepper is measured against the analytic solitary wave; the
    coupled stepper against its own next-finer solution (the grids nest, so
    coarse nodes are a subset of fine ones)."""
    if config.refinement_levels < 3:
        raise ConfigurationError("convergence study needs at least 3 refinement levels")
    base = dataclasses.replace(config)
    deltas = [base.dx / 2**k for k in range(config.refinement_levels)]

    kdv_errors = []
    eta_fields = []
    for d in deltas:
        grid = Grid1D(int(round(config.domain_length / config.dx)) * int(round(config.dx / d)), d)
        time_grid = TimeGrid(int(round(config.final_time / config.dx)) * int(round(config.dx / d)), d)
        spec = SolitonSpec(config.alpha, config.shift, config.epsilon)
        u0 = soliton_field(spec, grid)
        traj = run(KdvProblem(config.epsilon, grid, time_grid,
                              nonlinear_mode=config.kdv_nonlinear_mode),
                   u0, stride=time_grid.num_steps)
        exact = soliton_field(spec, grid, time_grid.final_time)
        kdv_errors.append(relative_linf_error(traj.at_step(time_grid.num_steps), exact.values))

        half = Field(u0.values / 2.0, grid)
        coeffs = config.build_coefficients()
        btraj = run_boussinesq(
            BoussinesqProblem(coeffs, config.build_bathymetry(), grid, time_grid,
                              nonlinear_mode=config.boussinesq_nonlinear_mode),
            half, half, stride=time_grid.num_steps)
        _, eta = btraj.at_step(time_grid.num_steps)
        eta_fields.append(eta)

    kdv_orders = [math.log2(kdv_errors[k] / kdv_errors[k + 1])
                  for k in range(len(deltas) - 1)]
    b_diffs = []
    for k in range(len(deltas) - 1):
        ratio = int(round(deltas[k] / deltas[k + 1]))
        coarse, fine = eta_fields[k], eta_fields[k + 1][::ratio]
        b_diffs.append(float(np.max(np.abs(coarse - fine))))
    b_orders = [math.log2(b_diffs[k] / b_diffs[k + 1]) for k in range(len(b_diffs) - 1)]
    monotone = all(np.diff(kdv_errors) < 0) and all(np.diff(b_diffs) < 0)
    return ConvergenceReport(
        config=config,
        deltas=deltas,
        kdv_errors=kdv_errors,
        kdv_orders=kdv_orders,
        boussinesq_diffs=b_diffs,
        boussinesq_orders=b_orders,
        monotone=monotone,
    )


# ---------------------------------------------------------------------------
# File output
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> None:
    rows = len(columns[0])
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(rows):
            fh.write(",".join(_fmt(col[i]) for col in columns) + "\n")


def _meta_payload(config: ScenarioConfig, coeffs: ModelCoefficients,
                  runtimes: dict, extra: dict) -> dict:
    payload = {
        "scheme_version": SCHEME_VERSION,
        "config": config.to_dict(),
        "coefficients": {
            "theta": coeffs.theta,
            "lambda1": coeffs.lambda1,
            "lambda2": coeffs.lambda2,
            "epsilon": coeffs.epsilon,
            "a1": coeffs.a1,
            "a2": coeffs.a2,
            "a3": coeffs.a3,
            "a4": coeffs.a4,
        },
        "runtimes_seconds": runtimes,
    }
    payload.update(extra)
    return payload


def write_outputs(report: ComparisonReport, config: ScenarioConfig) -> list[Path]:
    """Write snapshot CSVs, the error time series, and meta.json."""
    if config.output_dir is None:
        raise ConfigurationError("config.output_dir is required to write outputs")
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for snap in report.snapshots:
        path = out / f"snapshot_t{snap.time:g}.csv"
        _write_csv(
            path,
            ["x", "eta_boussinesq", "eta_kdv", "eta_kdv_topo", "v_boussinesq",
             "bottom_rescaled"],
            [snap.x, snap.eta_boussinesq, snap.eta_kdv, snap.eta_kdv_topo,
             snap.v_boussinesq, snap.bottom_rescaled],
        )
        written.append(path)
    errors_path = out / "errors.csv"
    _write_csv(
        errors_path,
        ["t", "err_kdv", "err_kdv_topo", "refl_b", "refl_kdv", "refl_topo",
         "l2_drift", "h1eps_drift"],
        [report.error_times, report.err_kdv, report.err_kdv_topo,
         report.refl_boussinesq, report.refl_kdv, report.refl_topo,
         report.l2_drift, report.h1eps_drift],
    )
    written.append(errors_path)
    meta = _meta_payload(config, report.coefficients, report.runtimes, {
        "realized_final_time": report.realized_final_time,
        "validation_error": report.validation_error,
        "wrap_contamination": report.wrap_contamination,
    })
    meta_path = out / "meta.json"
    with open(meta_path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    written.append(meta_path)
    return written


def write_growth_outputs(report: GrowthReport, config: ScenarioConfig) -> list[Path]:
    """Write the corrector norm series (growth.csv) and meta.json."""
    if config.output_dir is None:
        raise ConfigurationError("config.output_dir is required to write outputs")
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    diag = report.diagnostic
    header = ["t", "u1_norm"] + list(diag.term_norms)
    cols = [diag.times, diag.u1_norms] + [diag.term_norms[k] for k in diag.term_norms]
    csv_path = out / "growth.csv"
    _write_csv(csv_path, header, cols)
    meta = _meta_payload(config, config.build_coefficients(), report.runtimes, {
        "sobolev_order": diag.sobolev_order,
        "fit": {
            "slope": diag.slope,
            "intercept": diag.intercept,
            "r_squared": diag.r_squared,
            "window": list(diag.fit_window),
        },
        "crossing_time": report.crossing_time,
    })
    meta_path = out / "meta.json"
    with open(meta_path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return [csv_path, meta_path]


def write_convergence_outputs(report: ConvergenceReport,
                              config: ScenarioConfig) -> list[Path]:
    if config.output_dir is None:
        raise ConfigurationError("config.output_dir is required to write outputs")
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    payload = _meta_payload(config, config.build_coefficients(), {}, {
        "deltas": report.deltas,
        "kdv_errors": report.kdv_errors,
        "kdv_orders": report.kdv_orders,
        "boussinesq_diffs": report.boussinesq_diffs,
        "boussinesq_orders": report.boussinesq_orders,
        "monotone": report.monotone,
    })
    path = out / "convergence.json"
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return [path]
