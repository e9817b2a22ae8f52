"""Acceptance suite: every release-gating criterion, one test each.

Each test prints one line per checked clause so a verbose run reads as a
checklist.  Expensive simulations are shared through module-scoped fixtures.
Run with:  pytest tests/test_acceptance.py -v -s
"""

import numpy as np
import pytest

from longwave.grid import (
    Grid1D,
    ModelCoefficients,
    SlowSinusoidBottom,
    SolitonSpec,
    StepBottom,
    TimeGrid,
    soliton_field,
)
from longwave.findiff import make_d1
from longwave.kdv import KdvProblem, run
from longwave.reconstruct import bottom_shift_integral, growth_diagnostic
from longwave.scenarios import ScenarioConfig, convergence_study, run_growth, run_scenario

PAPER_VALIDATION_ERRORS = {0.05: 1.5546e-3, 0.1: 1.3717e-3, 0.2: 1.0534e-3}


def _check(name: str, ok: bool, detail: str) -> None:
    print(f"[acceptance] {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"{name}: {detail}"


# ---------------------------------------------------------------------------
# Shared runs
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def validation_reports():
    return {
        eps: run_scenario(ScenarioConfig(scenario="validate", epsilon=eps))
        for eps in (0.05, 0.1, 0.2)
    }


@pytest.fixture(scope="module")
def step_report_eps02():
    return run_scenario(ScenarioConfig(scenario="step", epsilon=0.2))


@pytest.fixture(scope="module")
def step_report_eps01_scaled():
    """Step run at eps = 0.1 whose crossing happens at the same slow time
    eps*t as the eps = 0.2 default, so the two runs are comparable."""
    eps = 0.2
    crossing_slow_time = (40.0 - 38.0) / (1 + eps * 0.5 / 4) * eps
    eps = 0.1
    x0 = 40.0 - (crossing_slow_time / eps) * (1 + eps * 0.5 / 4)
    return run_scenario(ScenarioConfig(scenario="step", epsilon=eps, shift=-x0))


@pytest.fixture(scope="module")
def tall_step_report():
    """Reflection-measurement run: a taller step makes the reflected wave
    clear the 2% threshold, a longer window and a wider exclusion region keep
    the solitary-wave tail out of the metric."""
    config = ScenarioConfig(
        scenario="step", epsilon=0.2, final_time=16.0,
        bathymetry={"kind": "step", "beta0": 1.5, "center": 40.0,
                    "ramp_half_width": 1.5},
        refl_width_multiplier=8.0,
    )
    return config, run_scenario(config)


@pytest.fixture(scope="module")
def sinusoid_report():
    """Sinusoid run on a widened domain, starting at a bottom maximum so the
    wave descends first (the geometry that produces the depression)."""
    eps, alpha = 0.1, 0.5
    wavelength = (1 + eps * alpha / 4) / eps
    config = ScenarioConfig(scenario="sinusoid", epsilon=eps,
                            domain_length=40.0, shift=-2 * wavelength)
    return config, run_scenario(config)


# ---------------------------------------------------------------------------
# Criteria
# ---------------------------------------------------------------------------

def test_criterion_1_soliton_validation_table(validation_reports):
    for eps, reference in PAPER_VALIDATION_ERRORS.items():
        report = validation_reports[eps]
        err = report.validation_error
        ok = reference / 2.0 <= err <= 2.0 * reference
        _check(
            f"criterion 1 / eps={eps}",
            ok,
            f"final rel Linf error {err:.4e} vs reference {reference:.4e} "
            f"(ratio {err / reference:.2f}, factor-2 window)",
        )
        runtime = report.runtimes["kdv_solve"]
        _check(
            f"criterion 1 runtime / eps={eps}",
            runtime < 60.0,
            f"scalar solve took {runtime:.1f}s (< 60s)",
        )


def test_criterion_2_conservation(validation_reports):
    for eps, report in validation_reports.items():
        drift = report.l2_drift.max()
        _check(
            f"criterion 2 L2 / eps={eps}",
            drift <= 1e-6,
            f"max relative L2 drift {drift:.2e} (<= 1e-6)",
        )
    h1_drift = validation_reports[0.1].h1eps_drift.max()
    _check(
        "criterion 2 H1_eps / eps=0.1 flat bottom",
        h1_drift <= 1e-6,
        f"max relative H1_eps drift over T=1/eps: {h1_drift:.2e} (<= 1e-6)",
    )


def test_criterion_3_convergence_order():
    report = convergence_study(
        ScenarioConfig(scenario="convergence", epsilon=0.1, refinement_levels=3)
    )
    for label, orders in (("scalar", report.kdv_orders),
                          ("coupled", report.boussinesq_orders)):
        for order in orders:
            _check(
                f"criterion 3 {label} stepper",
                1.8 <= order <= 2.2,
                f"observed order {order:.3f} in [1.8, 2.2]",
            )


def test_criterion_4_quadrature_closed_form():
    eps, amp, dt = 0.1, 0.5, 0.04
    bottom = SlowSinusoidBottom(amp, eps)
    worst = 0.0
    for t in np.arange(0.4, 10.0 + 1e-9, 0.4):
        t = round(t / dt) * dt
        for x in np.linspace(-8.0, 92.0, 26):
            got = bottom_shift_integral(bottom, t, x, "right", dt)
            want = 2 * amp / eps * np.sin(eps * (x - t / 2)) * np.sin(eps * t / 2)
            worst = max(worst, abs(got - want))
    _check(
        "criterion 4 quadrature vs closed form",
        worst <= 1e-4,
        f"max abs error {worst:.2e} (<= 1e-4) at dt=0.04, eps=0.1, A=0.5",
    )


def test_criterion_5_step_secular_growth():
    eps, alpha, beta0 = 0.2, 0.5, 0.5
    grid = Grid1D.from_length(80.0, 0.05)
    time_grid = TimeGrid.from_final_time(12.0, 0.05)
    spec = SolitonSpec(alpha=alpha, shift=-38.0, epsilon=eps)
    bottom = StepBottom(beta0, 40.0, 1.5)
    coeffs = ModelCoefficients.zero_smoothing(eps)
    traj = run(KdvProblem(eps, grid, time_grid), soliton_field(spec, grid), stride=4)

    crossing = (40.0 - 38.0) / spec.speed
    diag = growth_diagnostic(traj, None, bottom, coeffs, s=2,
                             fit_window=(crossing + 1.0, time_grid.final_time))

    # Bound constant recomputed from the stored wave: the restricted L2 norm
    # of its slope over nodes beyond the ramp end, at the final snapshot.
    u_final = traj.at_step(time_grid.num_steps)
    du = make_d1(grid).apply_values(u_final)
    past_ramp = grid.nodes > 41.5
    restricted = np.sqrt(grid.dx * float(np.sum(du[past_ramp] ** 2)))
    bound = 0.8 * (beta0 / 2.0) * restricted

    _check(
        "criterion 5 linearity",
        diag.r_squared >= 0.95,
        f"R^2 {diag.r_squared:.4f} (>= 0.95) over window {diag.fit_window}",
    )
    _check(
        "criterion 5 slope",
        diag.slope >= bound,
        f"fitted slope {diag.slope:.4f} >= 0.8*(beta0/2)*|du|_restricted = {bound:.4f}",
    )


def test_criterion_6_sinusoid_inverse_epsilon_scaling():
    maxima = {}
    for eps in (0.1, 0.05):
        report = run_growth(
            ScenarioConfig(scenario="growth", epsilon=eps, growth_kind="sinusoid")
        )
        maxima[eps] = float(report.diagnostic.u1_norms.max())
    ratio = maxima[0.05] / maxima[0.1]
    _check(
        "criterion 6 corrector 1/eps scaling",
        1.4 <= ratio <= 2.8,
        f"max-norm ratio eps=0.05/eps=0.1 = {ratio:.2f} in [1.4, 2.8] "
        f"(maxima {maxima[0.05]:.3f} / {maxima[0.1]:.3f})",
    )


def test_criterion_7_model_discrepancy_ordering(step_report_eps02):
    report = step_report_eps02
    config = report.config
    t_eval = 1.0 / config.epsilon
    err_k = report.error_at(t_eval, "kdv")
    err_kt = report.error_at(t_eval, "kdv_topo")
    _check(
        "criterion 7 topo error halves classical",
        err_kt <= 0.5 * err_k,
        f"err(K_topo vs B)={err_kt:.4f} <= 0.5 * err(K vs B)={err_k:.4f} at t=1/eps",
    )
    crossing = (40.0 + config.shift) / config.build_soliton().speed
    err_cross = report.error_at(round(crossing, 1), "kdv")
    _check(
        "criterion 7 post-step error growth",
        err_k >= 2.0 * err_cross,
        f"err(K vs B) grows from {err_cross:.4f} at crossing to {err_k:.4f} "
        f"at t=1/eps (factor {err_k / max(err_cross, 1e-15):.2f} >= 2)",
    )


def test_criterion_8_reflected_wave(tall_step_report, sinusoid_report):
    config, report = tall_step_report
    alpha = config.alpha
    refl_b = report.refl_boussinesq[-1]
    refl_kt = report.refl_topo[-1]
    refl_k = report.refl_kdv[-1]
    _check(
        "criterion 8 coupled-model reflection",
        refl_b >= 0.02 * alpha,
        f"left-region amplitude {refl_b:.4f} >= 0.02*alpha = {0.02 * alpha:.4f}",
    )
    _check(
        "criterion 8 topo-model reflection",
        refl_kt >= 0.02 * alpha,
        f"left-region amplitude {refl_kt:.4f} >= 0.02*alpha = {0.02 * alpha:.4f}",
    )
    _check(
        "criterion 8 classical model stays unidirectional",
        abs(refl_k) <= 1e-6 * alpha,
        f"left-region amplitude {abs(refl_k):.2e} <= 1e-6*alpha = {1e-6 * alpha:.1e}",
    )
    _, sin_report = sinusoid_report
    depression = sin_report.refl_boussinesq[-1]
    _check(
        "criterion 8 sinusoid depression",
        depression < 0.0,
        f"strongest reflected feature {depression:.4f} is a depression",
    )


def test_criterion_9_epsilon_scaling_of_topo_error(step_report_eps02,
                                                   step_report_eps01_scaled):
    err = {}
    for report in (step_report_eps02, step_report_eps01_scaled):
        eps = report.config.epsilon
        err[eps] = report.error_at(1.0 / eps, "kdv_topo")
    ratio = err[0.1] / err[0.2]
    _check(
        "criterion 9 O(eps) scaling",
        0.3 <= ratio <= 0.8,
        f"err(K_topo vs B) at t=1/eps: eps=0.1 {err[0.1]:.4f} / eps=0.2 "
        f"{err[0.2]:.4f} = {ratio:.2f} in [0.3, 0.8]",
    )
