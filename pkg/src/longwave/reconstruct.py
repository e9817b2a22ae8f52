"""Surface reconstructions from the uncoupled wave solutions, with correctors.

A right-going solver snapshot u(t, x) and a left-going one n(t, x) determine
the slow-scale profiles via u(t, x) = U0(eps*t, x - t) and
n(t, x) = N0(eps*t, x + t).  The classical reconstruction combines them as

    v = (U0 + N0)/2,    eta = (U0 - N0)/2,

evaluated at the shifted arguments, which on a grid with dt = dx is pure
index arithmetic: all characteristic shifts land exactly on nodes.

The first-order corrector of the right-going component is

    U1 = - 1/16 (N0(x+t)^2 - N0(x-t)^2)
         + (a2-a4)/4 (N0''(x+t) - N0''(x-t))
         - 1/8 U0(x-t) (N0(x+t) - N0(x-t))
         + 1/4 U0(x-t) (b(x) - b(x-t))
         - 1/4 U0'(x-t) Int_0^t N0(x-t+2s) ds
         + 1/2 U0'(x-t) Int_0^t b(x-t+s) ds
         + 1/4 Int_0^t b'(x-t+s) N0(x-t+2s) ds

(its mirror holds for N1 with x+t arguments and flipped signs).  The last
three integrals can grow secularly for bottoms without decay; the
topography-modified reconstruction promotes exactly those bottom terms into
the surfaces:

    v    +=  eps/4 [ U0'(x-t) Int b(x-t+s) ds  -  N0'(x+t) Int b(x+t-s) ds
                     + 1/2 Int b'(x-t+s) N0(x-t+2s) ds
                     - 1/2 Int b'(x+t-s) U0(x+t-2s) ds
                     + 1/2 U0(x-t) (b(x) - b(x-t))
                     + 1/2 N0(x+t) (b(x+t) - b(x)) ],

with eta receiving the same terms but, consistent with
eta = (U_app - N_app)/2, with the sign of every N1-derived (left
characteristic) term flipped.  The periodic variant additionally subtracts
the counter-propagation integrals

    v   -= eps/8 [ U0'(x-t) Int N0(x-t+2s) ds + N0'(x+t) Int U0(x+t-2s) ds ]
    eta -= eps/8 [ U0'(x-t) Int N0(x-t+2s) ds - N0'(x+t) Int U0(x+t-2s) ds ].

All time integrals use the composite trapezoid rule with step dt = dx, the
bottom profile sampled on the whole real line (no wrap) and the wave
snapshots with periodic wrap.  Quadrature abscissae of the form x - t + 2s
are read from the counter-propagating snapshot at the matching time, which
requires that trajectory to be stored at every step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DiagnosticError
from .findiff import make_d1, make_d2
from .grid import (
    BathymetryProfile,
    Field,
    Grid1D,
    ModelCoefficients,
    discrete_sobolev,
)
from .kdv import Trajectory

__all__ = [
    "CorrectorBreakdown",
    "SurfaceReconstruction",
    "GrowthDiagnostic",
    "classical_surfaces",
    "bottom_shift_integral",
    "characteristic_cross_integral",
    "corrector_fields",
    "topo_modified_surfaces",
    "growth_diagnostic",
]

TERM_NAMES = (
    "quadratic_difference",
    "dispersive_difference",
    "cross_product",
    "bottom_jump",
    "counterprop_integral",
    "bottom_integral",
    "bottom_derivative_integral",
)


@dataclass
class CorrectorBreakdown:
    """Per-node values of each named corrector term at one time, plus their sum."""

    grid: Grid1D
    time: float
    quadratic_difference: np.ndarray
    dispersive_difference: np.ndarray
    cross_product: np.ndarray
    bottom_jump: np.ndarray
    counterprop_integral: np.ndarray
    bottom_integral: np.ndarray
    bottom_derivative_integral: np.ndarray
    total: np.ndarray = field(init=False)

    def __post_init__(self):
        self.total = sum(getattr(self, name) for name in TERM_NAMES)

    def terms(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in TERM_NAMES}

    def total_field(self) -> Field:
        return Field(self.total, self.grid)


@dataclass
class SurfaceReconstruction:
    """(v, eta) surfaces built from the uncoupled trajectories at one time."""

    v: Field
    eta: Field
    time: float
    variant: str  # "classical" | "topo_modified" | "topo_modified_periodic"
    corrector_terms: tuple[CorrectorBreakdown, CorrectorBreakdown] | None = None


def _check_alignment(traj: Trajectory) -> None:
    if traj.dt != traj.grid.dx:
        raise ConfigurationError(
            f"reconstruction requires dt == dx, got dt={traj.dt}, dx={traj.grid.dx}"
        )


def _counter_values(n_traj: Trajectory | None, grid: Grid1D, m: int) -> np.ndarray:
    if n_traj is None:
        return np.zeros(grid.num_points)
    if n_traj.grid != grid:
        raise ConfigurationError("trajectories live on different grids")
    return n_traj.at_step(m)


def _require_full_history(traj: Trajectory, m: int, role: str) -> None:
    if not traj.has_every_step_upto(m):
        raise ConfigurationError(
            f"{role} trajectory must be stored at every step up to {m} "
            "(stride 1) to resolve the characteristic quadrature"
        )


def _trapezoid_weights(m: int, dt: float) -> np.ndarray:
    w = np.full(m + 1, dt)
    w[0] = w[-1] = dt / 2.0
    return w if m > 0 else np.zeros(1)


def _bottom_integral_nodes(b: BathymetryProfile, grid: Grid1D, m: int,
                           direction: str) -> np.ndarray:
    """Trapezoid of b along the shifted window for every node.

    direction 'right': Int_0^t b(x_i - t + s) ds over lattice [i-m .. i];
    direction 'left' : Int_0^t b(x_i + t - s) ds over lattice [i .. i+m].
    The profile is evaluated on the real line (no periodic wrap).
    """
    n = grid.num_points
    dt = grid.dx
    if m == 0:
        return np.zeros(n)
    if direction == "right":
        lattice = np.arange(-m, n) * dt
        first = np.arange(0, n)          # extended index of i-m
    elif direction == "left":
        lattice = np.arange(0, n + m) * dt
        first = np.arange(0, n)          # extended index of i
    else:
        raise ConfigurationError(f"direction must be 'right' or 'left', got {direction!r}")
    ext = np.asarray(b.value(lattice), dtype=float)
    csum = np.concatenate(([0.0], np.cumsum(ext)))
    last = first + m
    sums = csum[last + 1] - csum[first]
    return dt * (sums - 0.5 * ext[first] - 0.5 * ext[last])


def _cross_integral_nodes(weight, counter: Trajectory, m: int, direction: str) -> np.ndarray:
    """Trapezoid of weight(y) * field(s, y) along the characteristic for all nodes.

    direction 'right': y = x_i - t + s, field read from the counter snapshot at s
    (abscissa x_i - t + 2s collapses to y once the snapshot time matches s);
    direction 'left':  y = x_i + t - s.  The weight is evaluated unwrapped when
    it is a bottom profile (derivative) and with periodic wrap when it is a
    per-node array; the counter snapshots always wrap periodically.
    """
    grid = counter.grid
    n = grid.num_points
    dt = grid.dx
    if m == 0:
        return np.zeros(n)
    _require_full_history(counter, m, "counter-propagating")
    if direction == "right":
        ext_idx = np.arange(-m, n)
    elif direction == "left":
        ext_idx = np.arange(0, n + m)
    else:
        raise ConfigurationError(f"direction must be 'right' or 'left', got {direction!r}")

    if weight is None:
        w_ext = None
    elif isinstance(weight, BathymetryProfile):
        w_ext = np.asarray(weight.derivative(ext_idx * dt), dtype=float)
    else:
        vals = weight.values if isinstance(weight, Field) else np.asarray(weight, dtype=float)
        w_ext = vals[ext_idx % n]

    weights = _trapezoid_weights(m, dt)
    out = np.zeros(n)
    for j in range(m + 1):
        snap = counter.data[j]
        if direction == "right":
            shift = j - m
            sl = slice(j, j + n)
        else:
            shift = m - j
            sl = slice(m - j, m - j + n)
        contrib = np.roll(snap, -shift)
        if w_ext is not None:
            contrib = contrib * w_ext[sl]
        out += weights[j] * contrib
    return out


def bottom_shift_integral(b: BathymetryProfile, t: float, x: float,
                          direction: str, dt: float) -> float:
    """Int_0^t b(x - t + s) ds ('right') or Int_0^t b(x + t - s) ds ('left'),
    composite trapezoid with step dt; works for any real x."""
    m = int(round(t / dt))
    if abs(m * dt - t) > 1e-9 * max(1.0, abs(t)):
        raise ConfigurationError(f"t={t} is not a multiple of the quadrature step {dt}")
    if m == 0:
        return 0.0
    s = np.arange(m + 1) * dt
    if direction == "right":
        pts = x - t + s
    elif direction == "left":
        pts = x + t - s
    else:
        raise ConfigurationError(f"direction must be 'right' or 'left', got {direction!r}")
    vals = np.asarray(b.value(pts), dtype=float)
    return float(np.dot(_trapezoid_weights(m, dt), vals))


def characteristic_cross_integral(weight, counter: Trajectory, t: float, x: float,
                                  direction: str) -> float:
    """Single-point value of the characteristic quadrature used by the correctors.

    direction 'right': Int_0^t weight(x-t+s) * N0(eps s, x-t+2s) ds with the
    counter-propagating profile read from the snapshot at time s; 'left' is
    the mirror with x+t-s and x+t-2s.  ``weight`` may be a bottom profile
    (its derivative is used), a per-node array, or None for weight one.
    ``x`` must be a grid node and the counter trajectory must be stored at
    every step (dt = dx).
    """
    _check_alignment(counter)
    grid = counter.grid
    i = int(round(x / grid.dx))
    if abs(i * grid.dx - x) > 1e-9 * max(1.0, abs(x)) or not 0 <= i < grid.num_points:
        raise ConfigurationError(f"x={x} is not a node of the counter trajectory grid")
    m = counter.step_of_time(t)
    return float(_cross_integral_nodes(weight, counter, m, direction)[i])


def classical_surfaces(u_traj: Trajectory, n_traj: Trajectory | None,
                       t: float) -> SurfaceReconstruction:
    """v = (U0 + N0)/2, eta = (U0 - N0)/2 read directly from the two snapshots.

    ``n_traj=None`` stands for the identically zero left-going component."""
    m = u_traj.step_of_time(t)
    u = u_traj.at_step(m)
    n = _counter_values(n_traj, u_traj.grid, m)
    grid = u_traj.grid
    return SurfaceReconstruction(
        v=Field((u + n) / 2.0, grid),
        eta=Field((u - n) / 2.0, grid),
        time=t,
        variant="classical",
    )


def corrector_fields(u_traj: Trajectory, n_traj: Trajectory | None,
                     b: BathymetryProfile, coeffs: ModelCoefficients,
                     t: float, components: str = "both"
                     ) -> tuple[CorrectorBreakdown, CorrectorBreakdown | None]:
    """Evaluate every term of the two correctors at time t, per node.

    ``components="right_only"`` skips the left-going corrector (and with it
    the characteristic integrals over the right-going history, which would
    otherwise require stride-1 storage of ``u_traj``)."""
    if components not in ("both", "right_only"):
        raise ConfigurationError("components must be 'both' or 'right_only'")
    _check_alignment(u_traj)
    grid = u_traj.grid
    n_pts, dx = grid.num_points, grid.dx
    m = u_traj.step_of_time(t)
    u = u_traj.at_step(m)
    n = _counter_values(n_traj, grid, m)
    have_counter = n_traj is not None and bool(np.any(n_traj.data))

    d1 = make_d1(grid)
    d2 = make_d2(grid)
    du = d1.apply_values(u)
    dispersive_coeff = (coeffs.a2 - coeffs.a4) / 4.0

    nodes = grid.nodes
    b_here = np.asarray(b.value(nodes), dtype=float)
    b_back = np.asarray(b.value(nodes - m * dx), dtype=float)

    ib_right = _bottom_integral_nodes(b, grid, m, "right")
    if have_counter:
        cp_right = _cross_integral_nodes(None, n_traj, m, "right")
        jb_right = _cross_integral_nodes(b, n_traj, m, "right")
    else:
        cp_right = jb_right = np.zeros(n_pts)

    # Right-going corrector: shifted reads n(t, x - 2t) etc.
    n_back = np.roll(n, 2 * m)
    d2n = d2.apply_values(n)
    u1 = CorrectorBreakdown(
        grid=grid,
        time=t,
        quadratic_difference=-(n**2 - n_back**2) / 16.0,
        dispersive_difference=dispersive_coeff * (d2n - np.roll(d2n, 2 * m)),
        cross_product=-u * (n - n_back) / 8.0,
        bottom_jump=u * (b_here - b_back) / 4.0,
        counterprop_integral=-du * cp_right / 4.0,
        bottom_integral=du * ib_right / 2.0,
        bottom_derivative_integral=jb_right / 4.0,
    )
    if components == "right_only":
        return u1, None

    dn = d1.apply_values(n)
    b_fwd = np.asarray(b.value(nodes + m * dx), dtype=float)
    ib_left = _bottom_integral_nodes(b, grid, m, "left")
    if np.any(u_traj.data):
        cp_left = _cross_integral_nodes(None, u_traj, m, "left")
        jb_left = _cross_integral_nodes(b, u_traj, m, "left")
    else:
        cp_left = jb_left = np.zeros(n_pts)

    # Left-going corrector: shifted reads u(t, x + 2t) etc.
    u_fwd = np.roll(u, -2 * m)
    d2u = d2.apply_values(u)
    n1 = CorrectorBreakdown(
        grid=grid,
        time=t,
        quadratic_difference=-(u**2 - u_fwd**2) / 16.0,
        dispersive_difference=-dispersive_coeff * (d2u - np.roll(d2u, -2 * m)),
        cross_product=-n * (u - u_fwd) / 8.0,
        bottom_jump=-n * (b_here - b_fwd) / 4.0,
        counterprop_integral=-dn * cp_left / 4.0,
        bottom_integral=-dn * ib_left / 2.0,
        bottom_derivative_integral=-jb_left / 4.0,
    )
    return u1, n1


def topo_modified_surfaces(u_traj: Trajectory, n_traj: Trajectory | None,
                           b: BathymetryProfile, coeffs: ModelCoefficients,
                           t: float, periodic_variant: bool = False,
                           include_correctors: bool = False,
                           eta_bracket: str = "sign_split") -> SurfaceReconstruction:
    """Classical surfaces plus the promoted bottom terms (and, in the periodic
    variant, minus the counter-propagation integrals).

    The bottom bracket added to v always reads as in the module docstring.
    For eta two readings exist: ``sign_split`` (default) flips the sign of
    the left-characteristic terms, which is what eta = (U_app - N_app)/2
    yields from the promoted corrector terms and what gives the reflected
    wave the same polarity as the coupled model; ``identical`` adds the
    v-bracket to eta unchanged and is kept for sensitivity studies.
    """
    if eta_bracket not in ("sign_split", "identical"):
        raise ConfigurationError(f"unknown eta_bracket mode {eta_bracket!r}")
    _check_alignment(u_traj)
    grid = u_traj.grid
    dx = grid.dx
    m = u_traj.step_of_time(t)
    u = u_traj.at_step(m)
    n = _counter_values(n_traj, grid, m)
    have_counter = n_traj is not None and bool(np.any(n_traj.data))
    u_has_signal = bool(np.any(u_traj.data))
    eps = coeffs.epsilon

    d1 = make_d1(grid)
    du = d1.apply_values(u)
    dn = d1.apply_values(n)
    nodes = grid.nodes
    b_here = np.asarray(b.value(nodes), dtype=float)
    b_back = np.asarray(b.value(nodes - m * dx), dtype=float)
    b_fwd = np.asarray(b.value(nodes + m * dx), dtype=float)

    # Terms promoted from the right-going corrector keep their sign in both
    # components; those from the left-going corrector flip sign in eta.
    common = du * _bottom_integral_nodes(b, grid, m, "right")
    common += 0.5 * u * (b_here - b_back)
    flipped = 0.5 * n * (b_fwd - b_here)
    if have_counter:
        flipped -= dn * _bottom_integral_nodes(b, grid, m, "left")
        common += 0.5 * _cross_integral_nodes(b, n_traj, m, "right")
    if u_has_signal:
        flipped -= 0.5 * _cross_integral_nodes(b, u_traj, m, "left")

    v_vals = (u + n) / 2.0 + eps / 4.0 * (common + flipped)
    eta_sign = 1.0 if eta_bracket == "identical" else -1.0
    eta_vals = (u - n) / 2.0 + eps / 4.0 * (common + eta_sign * flipped)
    variant = "topo_modified"
    if periodic_variant:
        right_part = du * _cross_integral_nodes(None, n_traj, m, "right") if have_counter \
            else np.zeros(grid.num_points)
        left_part = dn * _cross_integral_nodes(None, u_traj, m, "left") if u_has_signal \
            else np.zeros(grid.num_points)
        v_vals -= eps / 8.0 * (right_part + left_part)
        eta_vals -= eps / 8.0 * (right_part - left_part)
        variant = "topo_modified_periodic"

    correctors = None
    if include_correctors:
        correctors = corrector_fields(u_traj, n_traj, b, coeffs, t)
    return SurfaceReconstruction(
        v=Field(v_vals, grid), eta=Field(eta_vals, grid),
        time=t, variant=variant, corrector_terms=correctors,
    )


@dataclass
class GrowthDiagnostic:
    """Corrector norm time series with a least-squares line through them."""

    times: np.ndarray
    u1_norms: np.ndarray
    term_norms: dict[str, np.ndarray]
    sobolev_order: int
    slope: float
    intercept: float
    r_squared: float
    fit_window: tuple[float, float]


def _linear_fit(times: np.ndarray, values: np.ndarray) -> tuple[float, float, float]:
    slope, intercept = np.polyfit(times, values, 1)
    predicted = slope * times + intercept
    ss_res = float(np.sum((values - predicted) ** 2))
    ss_tot = float(np.sum((values - np.mean(values)) ** 2))
    if ss_tot == 0.0:
        r_squared = 1.0 if ss_res == 0.0 else 0.0
    else:
        r_squared = 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r_squared


def growth_diagnostic(u_traj: Trajectory, n_traj: Trajectory | None,
                      b: BathymetryProfile, coeffs: ModelCoefficients,
                      s: int, fit_window: tuple[float, float] | None = None
                      ) -> GrowthDiagnostic:
    """Sobolev-norm time series of the right-going corrector over all stored
    snapshots, with per-term norms and a linear fit over ``fit_window``."""
    if s > 3:
        raise ConfigurationError(f"growth diagnostics use Sobolev order <= 3, got {s}")
    times = u_traj.times
    if len(times) < 4:
        raise DiagnosticError(f"growth diagnostic needs >= 4 snapshots, got {len(times)}")
    grid = u_traj.grid
    norms = np.empty(len(times))
    term_norms = {name: np.empty(len(times)) for name in TERM_NAMES}
    for k, t in enumerate(times):
        u1, _ = corrector_fields(u_traj, n_traj, b, coeffs, float(t), components="right_only")
        norms[k] = discrete_sobolev(u1.total_field(), s)
        for name, vals in u1.terms().items():
            term_norms[name][k] = discrete_sobolev(Field(vals, grid), s)
    if fit_window is None:
        fit_window = (float(times[0]), float(times[-1]))
    mask = (times >= fit_window[0] - 1e-12) & (times <= fit_window[1] + 1e-12)
    if np.count_nonzero(mask) < 4:
        raise DiagnosticError("fit window contains fewer than 4 snapshots")
    slope, intercept, r_squared = _linear_fit(times[mask], norms[mask])
    return GrowthDiagnostic(
        times=times,
        u1_norms=norms,
        term_norms=term_norms,
        sobolev_order=s,
        slope=slope,
        intercept=intercept,
        r_squared=r_squared,
        fit_window=fit_window,
    )
