"""
Oracle and invariant checks behind the `verify` command.

Every check is a pure function of the seed and sample count, so two runs
with the same flags produce the same report.
"""

from __future__ import annotations

import math
from typing import Callable, List

import numpy as np

from ...quantum.bloch_core import make_rng, spawn_rng
from ...quantum.channel_algebra import (
    AffineQubitChannel,
    DiagonalChannelParams,
    amplitude_damping_channel,
    amplitude_damping_kraus,
    check_necessary_conditions,
    choi_from_kraus,
    choi_matrix,
    choi_min_eigenvalue,
)
from ..dependencies import get_app_settings
from ..schemas import CheckResult, SchemeConfig, VerifyReport
from .fidelity_engine import (
    average_fidelity_closed_form,
    average_fidelity_monte_carlo,
    average_fidelity_quadrature,
    cap_branch_value,
    cap_coefficients,
    scheme_from_config,
)
from .scheme_optimizer import analytic_low_alpha_fidelity, optimal_k_cap, optimize_at_alpha


# Channel that violates gamma <= sqrt(1 - k); injected to exercise a failing CP check
BROKEN_CHANNEL = DiagonalChannelParams(gamma=0.9, delta=0.5, k=0.5, pole=1)


def random_scheme_configs(seed: int, count: int) -> List[SchemeConfig]:
    rng = make_rng(seed)
    beta_max = get_app_settings().beta_max
    configs = []
    for _ in range(count):
        alpha, beta_u, k, k_prime = rng.uniform(0.0, 1.0, size=4)
        configs.append(SchemeConfig(alpha=alpha, beta=beta_u * beta_max, k=k, k_prime=k_prime))
    return configs


def check_closed_form_vs_quadrature(configs: List[SchemeConfig]) -> CheckResult:
    worst = max(abs(average_fidelity_closed_form(c) - average_fidelity_quadrature(c)) for c in configs)
    return CheckResult(
        name="closed_form_vs_quadrature",
        passed=worst <= 1e-12,
        discrepancy=worst,
        tolerance=1e-12,
        detail=f"{len(configs)} configs",
    )


def check_closed_form_vs_monte_carlo(configs: List[SchemeConfig], seed: int, n_samples: int) -> CheckResult:
    inside = 0
    worst_sigma = 0.0
    for index, cfg in enumerate(configs, start=1):
        estimate, std_error = average_fidelity_monte_carlo(scheme_from_config(cfg), n_samples, spawn_rng(seed, index))
        deviation = abs(estimate - average_fidelity_closed_form(cfg))
        sigmas = deviation / std_error if std_error > 0 else (0.0 if deviation <= 1e-12 else math.inf)
        worst_sigma = max(worst_sigma, sigmas)
        inside += sigmas <= 3.0
    # binomial slack: at 3 sigma about 0.3% of configs are expected outside
    required = math.ceil(0.94 * len(configs))
    return CheckResult(
        name="closed_form_vs_monte_carlo",
        passed=inside >= required,
        discrepancy=worst_sigma,
        tolerance=3.0,
        detail=f"{inside}/{len(configs)} within 3 sigma, need {required}",
    )


def check_amplitude_damping_cp(eps_psd: float) -> CheckResult:
    worst = min(
        choi_min_eigenvalue(amplitude_damping_channel(float(k), pole))
        for k in np.linspace(0.0, 1.0, 101)
        for pole in (1, -1)
    )
    return CheckResult(
        name="amplitude_damping_cp",
        passed=worst >= -eps_psd,
        discrepancy=-worst,
        tolerance=eps_psd,
        detail="101 values of k, both poles",
    )


def check_choi_vs_kraus(k: float = 0.5) -> CheckResult:
    worst = max(
        float(np.abs(choi_matrix(amplitude_damping_channel(k, pole)) - choi_from_kraus(amplitude_damping_kraus(k, pole))).max())
        for pole in (1, -1)
    )
    return CheckResult(name="choi_vs_kraus", passed=worst <= 1e-12, discrepancy=worst, tolerance=1e-12, detail=f"k={k}")


def check_necessary_condition_grid(eps_psd: float, points: int = 20) -> CheckResult:
    grid = np.linspace(0.0, 1.2, points)
    violators = 0
    false_positives = 0
    worst = -math.inf
    for gamma in grid:
        for delta in grid:
            for k in grid:
                params = DiagonalChannelParams(gamma=float(gamma), delta=float(delta), k=float(k))
                if check_necessary_conditions(params):
                    continue
                violators += 1
                lam = choi_min_eigenvalue(params.to_channel())
                worst = max(worst, lam)
                false_positives += lam >= -eps_psd
    return CheckResult(
        name="necessary_conditions_grid",
        passed=false_positives == 0,
        discrepancy=float(false_positives),
        tolerance=0.0,
        detail=f"{violators} violating grid points, largest min Choi eigenvalue {worst:.10g}",
    )


def check_inverse_depolarizing_rejected(eps_psd: float, alpha: float = 0.5) -> CheckResult:
    lam = choi_min_eigenvalue(AffineQubitChannel(np.eye(3) / alpha, np.zeros(3)))
    return CheckResult(
        name="inverse_depolarizing_rejected",
        passed=lam < -eps_psd,
        discrepancy=lam,
        tolerance=-eps_psd,
        detail=f"A = I/{alpha}",
    )


def check_injected_channel(eps_psd: float) -> CheckResult:
    lam = choi_min_eigenvalue(BROKEN_CHANNEL.to_channel())
    return CheckResult(
        name="injected_channel_cp",
        passed=lam >= -eps_psd,
        discrepancy=-lam,
        tolerance=eps_psd,
        detail=f"gamma={BROKEN_CHANNEL.gamma}, delta={BROKEN_CHANNEL.delta}, k={BROKEN_CHANNEL.k}",
    )


def check_analytic_branch(count: int = 50) -> CheckResult:
    worst_f = 0.0
    worst_beta = 0.0
    beta_max = get_app_settings().beta_max
    for alpha in np.linspace(0.0, 0.5, count):
        result = optimize_at_alpha(float(alpha))
        worst_f = max(worst_f, abs(result.f_bar - analytic_low_alpha_fidelity(float(alpha))))
        worst_beta = max(worst_beta, abs(result.beta_opt - beta_max))
    return CheckResult(
        name="analytic_low_alpha_branch",
        passed=worst_f <= 1e-8 and worst_beta <= 1e-6,
        discrepancy=worst_f,
        tolerance=1e-8,
        detail=f"max |beta_opt - pi/2| = {worst_beta:.10g}",
    )


def check_decoupling(points=((0.3, 1.2), (0.6, 1.1), (0.8, 0.7)), grid: int = 100) -> CheckResult:
    """Separate 1-D maximizers of k and k' agree with a joint grid search."""
    ks = np.linspace(0.0, 1.0, grid)
    resolution = 1.0 / (grid - 1)
    worst_gap = 0.0
    worst_k = 0.0
    for alpha, beta in points:
        co = cap_coefficients(beta)
        k = optimal_k_cap(alpha, co.P, co.Q, co.R)
        kp = optimal_k_cap(alpha, co.P_prime, co.Q_prime, co.R)
        best = average_fidelity_closed_form(SchemeConfig(alpha=alpha, beta=beta, k=k, k_prime=kp))
        north = np.array([cap_branch_value(alpha, float(x), co.P, co.Q, co.R) for x in ks])
        south = np.array([cap_branch_value(alpha, float(x), co.P_prime, co.Q_prime, co.R) for x in ks])
        joint = 0.25 * ((1.0 - math.cos(beta)) + north[:, None]) + 0.25 * ((1.0 + math.cos(beta)) + south[None, :])
        i, j = np.unravel_index(int(np.argmax(joint)), joint.shape)
        worst_gap = max(worst_gap, float(joint[i, j]) - best)
        worst_k = max(worst_k, abs(ks[i] - k), abs(ks[j] - kp))
    return CheckResult(
        name="decoupled_inner_optimum",
        passed=worst_gap <= 1e-12 and worst_k <= resolution,
        discrepancy=worst_k,
        tolerance=resolution,
        detail=f"joint grid gain over separable optimum {worst_gap:.3e}",
    )


def run_verification(
    seed: int,
    mc_samples: int,
    *,
    inject_broken_channel: bool = False,
    n_configs: int = 0,
) -> VerifyReport:
    settings = get_app_settings()
    configs = random_scheme_configs(seed, n_configs or settings.verify_configs)
    checks: List[Callable[[], CheckResult]] = [
        lambda: check_closed_form_vs_quadrature(configs),
        lambda: check_amplitude_damping_cp(settings.eps_psd),
        lambda: check_choi_vs_kraus(),
        lambda: check_necessary_condition_grid(settings.eps_psd),
        lambda: check_inverse_depolarizing_rejected(settings.eps_psd),
        lambda: check_analytic_branch(),
        lambda: check_decoupling(),
    ]
    if mc_samples > 0:
        checks.insert(1, lambda: check_closed_form_vs_monte_carlo(configs, seed, mc_samples))
    if inject_broken_channel:
        checks.append(lambda: check_injected_channel(settings.eps_psd))
    return VerifyReport(seed=seed, mc_samples=mc_samples, checks=[run() for run in checks])
