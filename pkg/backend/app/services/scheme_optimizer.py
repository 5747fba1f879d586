"""
Optimal one-cbit recovery for a depolarizing channel.

For a fixed cap angle beta the two recovery strengths decouple: k only
enters the north-cap integral and k' only the south-cap one, and each
1-D problem has a closed-form maximizer. What remains is a search over
beta, where two local maxima compete (the hemisphere split beta = pi/2
and an interior cap). The optimizer always evaluates both candidates so
it never follows the wrong one across the discontinuity in beta_opt.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from ...quantum.numerics import golden_section_maximize
from ..dependencies import get_app_settings
from ..schemas import KinkReport, OptimizationResult, SchemeConfig, SweepRow
from .fidelity_engine import (
    average_fidelity_closed_form,
    cap_branch_value,
    cap_coefficients,
    classical_only_fidelity,
    gisin_reference_fidelity,
    no_op_fidelity,
)


logger = logging.getLogger(__name__)

COEFF_TOL = 1e-12
# Interior candidates must beat the boundary by more than rounding noise
TIE_TOL = 1e-14
# Landscapes with a smaller spread in F are treated as flat in beta
FLAT_TOL = 1e-12


class NoKinkFoundError(RuntimeError):
    """Raised when a sweep shows no jump in beta_opt."""


class SweepPointError(RuntimeError):
    def __init__(self, alpha: float, cause: Exception) -> None:
        super().__init__(f"optimization failed at alpha={alpha!r}: {cause}")
        self.alpha = alpha


def _check_alpha(alpha: float) -> None:
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")


def optimal_k_cap(alpha: float, P: float, Q: float, R: float) -> float:
    """
    Maximizer over k in [0, 1] of f(k) = alpha sqrt(1-k) P + alpha (1-k) Q + k R.

    f is concave, so k = 0 when f'(0) <= 0 and otherwise the stationary
    point sqrt(1-k) = alpha P / (2 (R - alpha Q)).
    """
    if min(P, Q, R) < -COEFF_TOL:
        raise ValueError(f"cap coefficients must be non-negative, got P={P}, Q={Q}, R={R}")
    P, Q, R = max(P, 0.0), max(Q, 0.0), max(R, 0.0)
    slope_at_zero = R - alpha * Q - alpha * P / 2.0
    if slope_at_zero <= 0.0:
        return 0.0
    root = alpha * P / (2.0 * (R - alpha * Q))
    return min(1.0, max(0.0, 1.0 - root * root))


def _optimal_k_array(alpha: float, P: np.ndarray, Q: np.ndarray, R: np.ndarray) -> np.ndarray:
    P, Q, R = np.maximum(P, 0.0), np.maximum(Q, 0.0), np.maximum(R, 0.0)
    slope_at_zero = R - alpha * Q - alpha * P / 2.0
    active = slope_at_zero > 0.0
    denom = np.where(active, 2.0 * (R - alpha * Q), 1.0)
    root = alpha * P / denom
    return np.where(active, np.clip(1.0 - root * root, 0.0, 1.0), 0.0)


def inner_optimum(alpha: float, beta: float) -> Tuple[float, float, float]:
    """(k, k', F) with both recoveries optimal for the cap angle beta."""
    co = cap_coefficients(beta)
    k = optimal_k_cap(alpha, co.P, co.Q, co.R)
    k_prime = optimal_k_cap(alpha, co.P_prime, co.Q_prime, co.R)
    f_bar = average_fidelity_closed_form(SchemeConfig(alpha=alpha, beta=beta, k=k, k_prime=k_prime))
    return k, k_prime, f_bar


def fidelity_landscape(alpha: float, betas: np.ndarray) -> np.ndarray:
    """F(beta) with inner-optimal k and k' along an array of cap angles."""
    c = np.cos(betas)
    co = cap_coefficients(betas)
    k = _optimal_k_array(alpha, co.P, co.Q, co.R)
    kp = _optimal_k_array(alpha, co.P_prime, co.Q_prime, co.R)
    north = (1.0 - c) + cap_branch_value(alpha, k, co.P, co.Q, co.R)
    south = (1.0 + c) + cap_branch_value(alpha, kp, co.P_prime, co.Q_prime, co.R)
    return 0.25 * north + 0.25 * south


def optimize_at_alpha(alpha: float, beta_grid_size: Optional[int] = None) -> OptimizationResult:
    _check_alpha(alpha)
    settings = get_app_settings()
    grid_size = beta_grid_size or settings.beta_grid_size
    if grid_size < 3:
        raise ValueError("beta_grid_size must be at least 3")
    beta_max = settings.beta_max

    betas = np.linspace(0.0, beta_max, grid_size)
    values = fidelity_landscape(alpha, betas)
    degenerate = bool(values.max() - values.min() <= FLAT_TOL)

    # best interior grid point, refined inside its neighbouring cells
    idx = int(np.argmax(values[:-1]))
    lo, hi = betas[max(idx - 1, 0)], betas[idx + 1]
    interior_beta, interior_f = golden_section_maximize(
        lambda b: inner_optimum(alpha, b)[2], float(lo), float(hi), tol=settings.golden_tol
    )

    k_b, kp_b, boundary_f = inner_optimum(alpha, beta_max)
    if interior_beta < beta_max and interior_f > boundary_f + TIE_TOL:
        k, kp, f_bar = inner_optimum(alpha, interior_beta)
        beta_opt, branch = interior_beta, "interior_beta"
    else:
        k, kp, f_bar = k_b, kp_b, boundary_f
        beta_opt, branch = beta_max, "boundary_beta"

    logger.debug(
        "alpha=%.6f boundary F=%.12f interior F=%.12f at beta=%.6f -> %s",
        alpha, boundary_f, interior_f, interior_beta, branch,
    )
    return OptimizationResult(
        alpha=alpha,
        beta_opt=beta_opt,
        k_opt=k,
        k_prime_opt=kp,
        f_bar=f_bar,
        branch=branch,
        degenerate=degenerate,
    )


def _sweep_row(alpha: float, beta_grid_size: Optional[int]) -> SweepRow:
    try:
        result = optimize_at_alpha(alpha, beta_grid_size)
    except Exception as exc:
        raise SweepPointError(alpha, exc) from exc
    return SweepRow(
        alpha=alpha,
        beta_opt=result.beta_opt,
        k_opt=result.k_opt,
        k_prime_opt=result.k_prime_opt,
        f_bar=result.f_bar,
        f_noop=no_op_fidelity(alpha),
        f_classical=classical_only_fidelity(),
        degenerate=result.degenerate,
    )


def sweep_alpha(
    alpha_min: float,
    alpha_max: float,
    steps: int,
    *,
    beta_grid_size: Optional[int] = None,
    n_workers: int = 1,
    show_progress: bool = False,
) -> List[SweepRow]:
    if not 0.0 <= alpha_min < alpha_max <= 1.0:
        raise ValueError(f"need 0 <= alpha_min < alpha_max <= 1, got [{alpha_min}, {alpha_max}]")
    if steps < 2:
        raise ValueError("steps must be at least 2")
    alphas = [float(a) for a in np.linspace(alpha_min, alpha_max, steps)]

    if n_workers > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            # map keeps the alpha order regardless of completion order
            rows = list(
                tqdm(
                    pool.map(_sweep_row, alphas, [beta_grid_size] * steps),
                    total=steps,
                    desc="Sweeping alpha",
                    disable=not show_progress,
                )
            )
    else:
        rows = [
            _sweep_row(a, beta_grid_size)
            for a in tqdm(alphas, desc="Sweeping alpha", disable=not show_progress)
        ]
    return rows


def locate_kink(rows: Sequence[SweepRow], beta_grid_size: Optional[int] = None) -> KinkReport:
    settings = get_app_settings()
    rows = [r for r in rows if not r.degenerate]
    jump_at = next(
        (i for i in range(len(rows) - 1) if rows[i].beta_opt - rows[i + 1].beta_opt > settings.kink_drop),
        None,
    )
    if jump_at is None:
        raise NoKinkFoundError("no kink found")

    lo, hi = rows[jump_at].alpha, rows[jump_at + 1].alpha
    lo_result = optimize_at_alpha(lo, beta_grid_size)
    hi_result = optimize_at_alpha(hi, beta_grid_size)
    while hi - lo > settings.kink_bracket:
        mid = 0.5 * (lo + hi)
        result = optimize_at_alpha(mid, beta_grid_size)
        # same side as lo: same branch and no jump in beta_opt
        if result.branch == lo_result.branch and abs(result.beta_opt - lo_result.beta_opt) <= settings.kink_drop:
            lo = mid
        else:
            hi, hi_result = mid, result
        logger.debug("kink bracket [%.8f, %.8f]", lo, hi)

    return KinkReport(
        alpha_kink=0.5 * (lo + hi),
        beta_jump_to=hi_result.beta_opt,
        bracket_low=lo,
        bracket_high=hi,
    )


def analytic_low_alpha_fidelity(alpha: float) -> float:
    """3/4 + alpha^2 / (3 (3 - 2 alpha)), the value of the hemisphere split."""
    _check_alpha(alpha)
    return 0.75 + alpha * alpha / (3.0 * (3.0 - 2.0 * alpha))


def gisin_crossover(rows: Sequence[SweepRow], level: Optional[float] = None) -> float:
    """First alpha where the optimized fidelity reaches `level`, by linear interpolation."""
    target = gisin_reference_fidelity() if level is None else level
    for left, right in zip(rows, rows[1:]):
        if left.f_bar < target <= right.f_bar:
            t = (target - left.f_bar) / (right.f_bar - left.f_bar)
            return left.alpha + t * (right.alpha - left.alpha)
    raise ValueError(f"optimized fidelity never crosses {target} in the sweep")
