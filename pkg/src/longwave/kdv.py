"""Crank-Nicolson relaxation stepper for the fast-time dispersive wave equations.

The right-going equation solved here is

    u_t + u_x + eps * [ 3/4 u u_x + 1/6 u_xxx ] = 0,

its left-going mirror flips the signs of the transport and dispersion terms,
and the variable-coefficient extension adds the bottom terms

    right:  eps * [ -1/2 b u_x - 1/4 b_x u ]
    left:   eps * [ +1/2 b u_x + 1/4 b_x u ].

Time discretization is Crank-Nicolson with the relaxation treatment of the
nonlinearity: the nonlinear factor is frozen at a predictor u^{n+1/2} that
satisfies u^n = (u^{n+1/2} + u^{n-1/2})/2, so each step solves one linear
system and no nonlinear iteration is needed.  With w = (u^{n+1} + u^n)/2 the
default per-node update reads

    (u^{n+1}_i - u^n_i)/dt + (D1 w)_i
      + eps * [ 1/4 (u^p_i + (u^p_{i+1} + u^p_{i-1})/2) (D1 w)_i
              + 1/4 w_i (D1 u^p)_i + 1/6 (D3 w)_i ] = 0.

The 1/4-weighted neighbour average is the spatial pairing that keeps the
discrete L2 norm of the scheme conserved up to round-off for smooth states.
An alternative assembly ("split_form") uses the exactly skew-symmetric pair
eps/4 * (u^p D1 w + D1(u^p w)) instead; both are second order and agree to
O(dx^2).
"""

from __future__ import annotations

import numpy as np

from .errors import (
    ConfigurationError,
    GridMismatchError,
    InstabilityError,
    MissingSnapshotError,
    SolverError,
)
from .findiff import CyclicBandedMatrix, make_d1, make_d3
from .grid import BathymetryProfile, Field, Grid1D, TimeGrid

__all__ = [
    "Trajectory",
    "PairTrajectory",
    "KdvProblem",
    "KdvState",
    "init_predictor",
    "step",
    "run",
]

_MEMORY_GUARD_BYTES = 1 << 30  # refuse trajectories above 1 GB


def _snapshot_plan(num_steps: int, stride: int) -> np.ndarray:
    """Step indices stored by a run: every stride-th step plus the final one."""
    if stride < 1:
        raise ConfigurationError(f"stride must be >= 1, got {stride}")
    idx = list(range(0, num_steps + 1, stride))
    if idx[-1] != num_steps:
        idx.append(num_steps)
    return np.asarray(idx, dtype=int)


class _TrajectoryBase:
    """Time-indexed snapshots at steps m*stride (plus the final step)."""

    def __init__(self, grid: Grid1D, dt: float, step_indices: np.ndarray):
        self.grid = grid
        self.dt = float(dt)
        self.step_indices = np.asarray(step_indices, dtype=int)
        if np.any(np.diff(self.step_indices) <= 0):
            raise ConfigurationError("snapshot steps must be strictly increasing")
        self._row_of = {int(m): i for i, m in enumerate(self.step_indices)}

    @property
    def times(self) -> np.ndarray:
        return self.step_indices * self.dt

    @property
    def final_time(self) -> float:
        return float(self.step_indices[-1] * self.dt)

    def step_of_time(self, t: float) -> int:
        m = int(round(t / self.dt))
        if abs(m * self.dt - t) > 1e-9 * max(1.0, abs(t)):
            raise MissingSnapshotError(f"time {t} is not a step multiple of dt={self.dt}")
        return m

    def row_for_step(self, m: int) -> int:
        if m not in self._row_of:
            raise MissingSnapshotError(f"no snapshot stored at step {m} (t={m * self.dt})")
        return self._row_of[m]

    def has_every_step_upto(self, m: int) -> bool:
        """True when steps 0..m are all stored (stride-1 storage)."""
        k = np.searchsorted(self.step_indices, m)
        return (
            k < len(self.step_indices)
            and self.step_indices[k] == m
            and np.array_equal(self.step_indices[: k + 1], np.arange(m + 1))
        )


class Trajectory(_TrajectoryBase):
    """Scalar-field trajectory from one solver run."""

    def __init__(self, grid, dt, step_indices, data: np.ndarray):
        super().__init__(grid, dt, step_indices)
        self.data = data

    @classmethod
    def zeros_like(cls, other: "Trajectory") -> "Trajectory":
        return cls(other.grid, other.dt, other.step_indices, np.zeros_like(other.data))

    def at_step(self, m: int) -> np.ndarray:
        return self.data[self.row_for_step(m)]

    def at_time(self, t: float) -> Field:
        return Field(self.at_step(self.step_of_time(t)).copy(), self.grid)


class PairTrajectory(_TrajectoryBase):
    """(v, eta) trajectory from a coupled solver run."""

    def __init__(self, grid, dt, step_indices, v_data, eta_data):
        super().__init__(grid, dt, step_indices)
        self.v_data = v_data
        self.eta_data = eta_data

    def at_step(self, m: int) -> tuple[np.ndarray, np.ndarray]:
        row = self.row_for_step(m)
        return self.v_data[row], self.eta_data[row]

    def at_time(self, t: float) -> tuple[Field, Field]:
        v, eta = self.at_step(self.step_of_time(t))
        return Field(v.copy(), self.grid), Field(eta.copy(), self.grid)


class KdvProblem:
    """Problem definition for one propagation direction.

    A problem without bathymetry is the classical (flat-bottom) equation;
    passing a profile selects the variable-coefficient variant with b and b_x
    sampled at the nodes.
    """

    def __init__(self, epsilon: float, grid: Grid1D, time_grid: TimeGrid,
                 bathymetry: BathymetryProfile | None = None,
                 direction: str = "right",
                 nonlinear_mode: str = "neighbor_average"):
        if epsilon <= 0.0:
            raise ConfigurationError(f"epsilon must be positive, got {epsilon}")
        if direction not in ("right", "left"):
            raise ConfigurationError(f"direction must be 'right' or 'left', got {direction!r}")
        if nonlinear_mode not in ("neighbor_average", "split_form"):
            raise ConfigurationError(f"unknown nonlinear_mode {nonlinear_mode!r}")
        self.epsilon = float(epsilon)
        self.grid = grid
        self.time_grid = time_grid
        self.bathymetry = bathymetry
        self.direction = direction
        self.nonlinear_mode = nonlinear_mode
        self._d1 = make_d1(grid)
        self._d3 = make_d3(grid)
        if bathymetry is not None:
            self.bottom = bathymetry.sample(grid)
            self.bottom_slope = np.asarray(bathymetry.derivative(grid.nodes), dtype=float)
        else:
            self.bottom = None
            self.bottom_slope = None

    @property
    def variant(self) -> str:
        return "classical" if self.bathymetry is None else "variable"

    @property
    def _sign(self) -> float:
        return 1.0 if self.direction == "right" else -1.0

    def rhs(self, values: np.ndarray) -> np.ndarray:
        """Explicit spatial right-hand side F(u) of u_t = F(u)."""
        eps, s = self.epsilon, self._sign
        du = self._d1.apply_values(values)
        out = s * du + eps * (0.75 * values * du + s / 6.0 * self._d3.apply_values(values))
        if self.bottom is not None:
            out -= s * eps * (0.5 * self.bottom * du + 0.25 * self.bottom_slope * values)
        return -out


class KdvState:
    """State after n steps: u^n, the predictor u^{n+1/2}, and the step index."""

    def __init__(self, u_current: Field, u_predictor: Field, step_index: int, dt: float):
        if u_current.grid != u_predictor.grid:
            raise GridMismatchError("state fields live on different grids")
        self.u_current = u_current
        self.u_predictor = u_predictor
        self.step_index = int(step_index)
        self.dt = float(dt)

    @property
    def time(self) -> float:
        return self.step_index * self.dt


def init_predictor(problem: KdvProblem, u0: Field) -> KdvState:
    """Start a run: the first predictor is an explicit half-step from u0."""
    if u0.grid != problem.grid:
        raise GridMismatchError("initial data does not live on the problem grid")
    dt = problem.time_grid.dt
    predictor = u0.values + 0.5 * dt * problem.rhs(u0.values)
    if not np.all(np.isfinite(predictor)):
        raise InstabilityError("non-finite predictor during initialization", step_index=0)
    return KdvState(u0.copy(), Field(predictor, problem.grid), 0, dt)


def _assemble_system(problem: KdvProblem, predictor: np.ndarray, dt: float) -> CyclicBandedMatrix:
    """Matrix of (2/dt) w + L w = (2/dt) u^n for the half-sum w."""
    eps, s = problem.epsilon, problem._sign
    n = problem.grid.num_points
    matrix = CyclicBandedMatrix(n, max_offset=2)
    matrix.add_diagonal(2.0 / dt)
    matrix.add_operator(problem._d1, scale=s)
    matrix.add_operator(problem._d3, scale=s * eps / 6.0)
    dup = problem._d1.apply_values(predictor)
    if problem.nonlinear_mode == "neighbor_average":
        smoothed = predictor + 0.5 * (np.roll(predictor, -1) + np.roll(predictor, 1))
        matrix.add_operator(problem._d1, pre_diag=smoothed, scale=eps / 4.0)
        matrix.add_diagonal(eps / 4.0 * dup)
    else:
        matrix.add_operator(problem._d1, pre_diag=predictor, scale=eps / 4.0)
        matrix.add_operator(problem._d1, post_diag=predictor, scale=eps / 4.0)
    if problem.bottom is not None:
        matrix.add_operator(problem._d1, pre_diag=problem.bottom, scale=-s * eps / 2.0)
        matrix.add_diagonal(-s * eps / 4.0 * problem.bottom_slope)
    return matrix


def step(problem: KdvProblem, state: KdvState) -> KdvState:
    """Advance one time step; the predictor follows the relaxation recurrence."""
    dt = problem.time_grid.dt
    matrix = _assemble_system(problem, state.u_predictor.values, dt)
    w = matrix.solve(2.0 / dt * state.u_current.values)
    u_next = 2.0 * w - state.u_current.values
    next_index = state.step_index + 1
    if not np.all(np.isfinite(u_next)):
        raise InstabilityError(
            f"non-finite solution at step {next_index}", step_index=next_index
        )
    predictor_next = 2.0 * u_next - state.u_predictor.values
    return KdvState(
        Field(u_next, problem.grid), Field(predictor_next, problem.grid), next_index, dt
    )


def run(problem: KdvProblem, u0: Field, stride: int = 1) -> Trajectory:
    """Integrate over the full time grid, storing every stride-th field."""
    steps = problem.time_grid.num_steps
    plan = _snapshot_plan(steps, stride)
    nbytes = len(plan) * problem.grid.num_points * 8
    if nbytes > _MEMORY_GUARD_BYTES:
        raise ConfigurationError(
            f"trajectory storage would need {nbytes / 2**30:.2f} GB (> 1 GB guard); "
            "increase the stride or coarsen the run"
        )
    data = np.empty((len(plan), problem.grid.num_points))
    state = init_predictor(problem, u0)
    data[0] = state.u_current.values
    row = 1
    for m in range(1, steps + 1):
        try:
            state = step(problem, state)
        except InstabilityError:
            raise
        except SolverError as exc:
            raise SolverError(f"{exc} (at step {m})") from exc
        if row < len(plan) and plan[row] == m:
            data[row] = state.u_current.values
            row += 1
    return Trajectory(problem.grid, problem.time_grid.dt, plan, data)
