import math

import numpy as np
import pytest

from backend.app.schemas import SchemeConfig
from backend.app.services import scheme_optimizer
from backend.app.services.fidelity_engine import (
    average_fidelity_closed_form,
    cap_branch_value,
    cap_coefficients,
    gisin_reference_fidelity,
    no_op_fidelity,
)
from backend.app.services.scheme_optimizer import (
    NoKinkFoundError,
    SweepPointError,
    analytic_low_alpha_fidelity,
    fidelity_landscape,
    gisin_crossover,
    inner_optimum,
    locate_kink,
    optimal_k_cap,
    optimize_at_alpha,
    sweep_alpha,
)
from backend.plotting.svg_charts import split_at_jumps
from backend.quantum.bloch_core import make_rng
from backend.quantum.channel_algebra import amplitude_damping_channel, is_completely_positive
from backend.quantum.numerics import golden_section_maximize


HALF_PI = math.pi / 2


def test_optimal_k_cap_examples():
    co = cap_coefficients(HALF_PI)
    assert optimal_k_cap(0.0, co.P, co.Q, co.R) == 1.0
    assert optimal_k_cap(0.5, co.P, co.Q, co.R) == pytest.approx(0.75, abs=1e-12)
    assert optimal_k_cap(1.0, co.P, co.Q, co.R) == 0.0


def test_optimal_k_cap_rejects_negative_coefficients():
    with pytest.raises(ValueError):
        optimal_k_cap(0.5, -0.1, 0.2, 0.3)


def test_optimal_k_cap_beats_grid():
    rng = make_rng(123)
    ks = np.linspace(0.0, 1.0, 10_000)
    for _ in range(100):
        alpha, beta = rng.uniform(0.0, 1.0), rng.uniform(0.0, HALF_PI)
        co = cap_coefficients(beta)
        for P, Q in ((co.P, co.Q), (co.P_prime, co.Q_prime)):
            best = cap_branch_value(alpha, optimal_k_cap(alpha, P, Q, co.R), P, Q, co.R)
            grid = alpha * np.sqrt(1.0 - ks) * P + alpha * (1.0 - ks) * Q + ks * co.R
            assert best >= grid.max() - 1e-12


@pytest.mark.parametrize("alpha,beta", [(0.3, 1.2), (0.6, 1.1), (0.9, 0.4)])
def test_stationary_point_agrees_with_golden_section(alpha, beta):
    co = cap_coefficients(beta)
    k_star = optimal_k_cap(alpha, co.P, co.Q, co.R)
    k_search, _ = golden_section_maximize(lambda k: cap_branch_value(alpha, k, co.P, co.Q, co.R), 0.0, 1.0, 1e-10)
    assert k_search == pytest.approx(k_star, abs=1e-5)


@pytest.mark.parametrize("alpha,beta", [(0.3, 1.2), (0.6, 1.1), (0.8, 0.7)])
def test_k_and_k_prime_decouple(alpha, beta):
    ks = np.linspace(0.0, 1.0, 100)
    joint = np.array([[average_fidelity_closed_form(SchemeConfig(alpha=alpha, beta=beta, k=a, k_prime=b)) for b in ks] for a in ks])
    i, j = np.unravel_index(int(np.argmax(joint)), joint.shape)
    k, k_prime, f_bar = inner_optimum(alpha, beta)
    assert abs(ks[i] - k) <= ks[1]
    assert abs(ks[j] - k_prime) <= ks[1]
    assert f_bar >= joint.max() - 1e-12


def test_landscape_matches_scalar_path():
    betas = np.linspace(0.0, HALF_PI, 17)
    values = fidelity_landscape(0.65, betas)
    for beta, value in zip(betas, values):
        assert value == pytest.approx(inner_optimum(0.65, float(beta))[2], abs=1e-14)


def test_optimize_examples():
    low = optimize_at_alpha(0.3)
    assert low.branch == "boundary_beta"
    assert low.beta_opt == pytest.approx(HALF_PI, abs=1e-12)
    assert low.f_bar == pytest.approx(0.7625, abs=1e-9)

    mid = optimize_at_alpha(0.5)
    assert mid.beta_opt == pytest.approx(HALF_PI, abs=1e-12)
    assert mid.k_opt == pytest.approx(0.75, abs=1e-9)
    assert mid.k_prime_opt == pytest.approx(0.75, abs=1e-9)
    assert mid.f_bar == pytest.approx(0.79166667, abs=1e-8)

    above = optimize_at_alpha(0.6)
    assert above.branch == "interior_beta"
    assert 0.9 < above.beta_opt < 1.15


def test_optimize_rejects_out_of_range_alpha():
    with pytest.raises(ValueError):
        optimize_at_alpha(1.5)


@pytest.mark.parametrize("alpha", [0.0, 0.2, 0.55, 0.7, 0.95, 1.0])
def test_result_matches_closed_form_and_baselines(alpha):
    result = optimize_at_alpha(alpha)
    cfg = SchemeConfig(alpha=alpha, beta=result.beta_opt, k=result.k_opt, k_prime=result.k_prime_opt)
    assert result.f_bar == pytest.approx(average_fidelity_closed_form(cfg), abs=1e-12)
    assert result.f_bar >= max(no_op_fidelity(alpha), 0.75) - 1e-9
    assert is_completely_positive(amplitude_damping_channel(result.k_opt, 1))
    assert is_completely_positive(amplitude_damping_channel(result.k_prime_opt, -1))


def test_analytic_branch_below_kink():
    for alpha in np.linspace(0.0, 0.5, 50):
        result = optimize_at_alpha(float(alpha))
        assert result.f_bar == pytest.approx(analytic_low_alpha_fidelity(float(alpha)), abs=1e-8)
        assert result.beta_opt == pytest.approx(HALF_PI, abs=1e-6)


def test_analytic_formula_examples():
    assert analytic_low_alpha_fidelity(0.0) == 0.75
    assert analytic_low_alpha_fidelity(0.5) == pytest.approx(0.7916667, abs=1e-7)
    assert analytic_low_alpha_fidelity(0.3) == pytest.approx(0.7625, abs=1e-12)
    with pytest.raises(ValueError):
        analytic_low_alpha_fidelity(-0.1)


def test_swap_limit():
    result = optimize_at_alpha(1e-4)
    assert result.k_opt >= 0.99
    assert result.k_prime_opt >= 0.99
    assert result.f_bar == pytest.approx(0.75, abs=1e-3)


def test_sweep_endpoints_and_monotone_fidelity(full_sweep):
    assert len(full_sweep) == 101
    assert [r.alpha for r in full_sweep] == sorted(r.alpha for r in full_sweep)
    assert full_sweep[0].f_bar == pytest.approx(0.75, abs=1e-12)
    assert full_sweep[-1].f_bar == pytest.approx(1.0, abs=1e-9)
    assert all(b.f_bar >= a.f_bar - 1e-12 for a, b in zip(full_sweep, full_sweep[1:]))


def test_sweep_dominates_baselines(full_sweep):
    for row in full_sweep:
        assert row.f_bar >= (1 + row.alpha) / 2 - 1e-9
        assert row.f_bar >= 0.75 - 1e-9
        if row.alpha >= 0.05:
            assert row.f_bar > 0.75 + 1e-4


def test_kink_location(full_sweep):
    report = locate_kink(full_sweep)
    assert 0.52 <= report.alpha_kink <= 0.56
    assert 1.05 <= report.beta_jump_to <= 1.15
    assert report.bracket_width <= 1e-4


def test_interior_branch_decreases_after_kink(full_sweep):
    report = locate_kink(full_sweep)
    after = [r for r in full_sweep if r.alpha > report.alpha_kink and not r.degenerate]
    assert after[-1].alpha == pytest.approx(0.99)
    for left, right in zip(after, after[1:]):
        assert right.beta_opt < left.beta_opt - 1e-6
    below = [r for r in full_sweep if r.alpha < report.alpha_kink]
    assert all(r.beta_opt == pytest.approx(HALF_PI, abs=1e-6) for r in below)


def test_no_kink_in_low_alpha_range():
    with pytest.raises(NoKinkFoundError, match="no kink found"):
        locate_kink(sweep_alpha(0.0, 0.4, 41))


def test_gisin_crossover(fine_sweep):
    crossing = gisin_crossover(fine_sweep)
    assert 0.70 <= crossing <= 0.74
    assert gisin_crossover(fine_sweep, gisin_reference_fidelity()) == crossing


def test_sweep_rejects_bad_range():
    with pytest.raises(ValueError):
        sweep_alpha(0.6, 0.2, 10)
    with pytest.raises(ValueError):
        sweep_alpha(0.0, 1.0, 1)


def test_sweep_reports_failing_alpha(monkeypatch):
    real = scheme_optimizer.optimize_at_alpha

    def flaky(alpha, beta_grid_size=None):
        if alpha == 0.5:
            raise ArithmeticError("boom")
        return real(alpha, beta_grid_size)

    monkeypatch.setattr(scheme_optimizer, "optimize_at_alpha", flaky)
    with pytest.raises(SweepPointError) as excinfo:
        sweep_alpha(0.0, 1.0, 3)
    assert excinfo.value.alpha == 0.5


def test_parallel_sweep_matches_serial():
    serial = sweep_alpha(0.4, 0.8, 5, beta_grid_size=401)
    parallel = sweep_alpha(0.4, 0.8, 5, beta_grid_size=401, n_workers=2)
    assert parallel == serial


def test_only_the_noiseless_point_is_degenerate(full_sweep):
    flat = [r.alpha for r in full_sweep if r.degenerate]
    assert flat == [1.0]
    noiseless = optimize_at_alpha(1.0)
    assert noiseless.degenerate
    assert noiseless.branch == "boundary_beta"
    assert not optimize_at_alpha(0.999).degenerate


def test_beta_curve_breaks_once_at_the_kink(full_sweep):
    drawn = [r for r in full_sweep if not r.degenerate]
    segments = split_at_jumps([r.alpha for r in drawn], [r.beta_opt for r in drawn], 0.1)
    assert len(segments) == 2
    assert segments[0][-1][0] == pytest.approx(0.54)
    assert segments[1][0][0] == pytest.approx(0.55)
    assert 1.0 < segments[1][0][1] < 1.2
