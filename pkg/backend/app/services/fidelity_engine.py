"""
Average fidelity of one-cbit-assisted recovery schemes.

Alice classifies the target state, sends the label as classical bits, and
Bob applies the recovery channel registered for that label to the qubit
that came out of the noisy channel. Targets are uniform on the Bloch
sphere. The closed form covers the cap partition with amplitude-damping
recoveries; the Monte-Carlo evaluator covers any partition into 2**n
labels and any recoveries.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate

from ...quantum.bloch_core import BlochVector, bloch_to_density, fidelity_batch, sample_sphere_array, spawn_rng
from ...quantum.channel_algebra import (
    AffineQubitChannel,
    InvalidChannelError,
    amplitude_damping_channel,
    depolarizing_channel,
    require_physical_channel,
)
from ..dependencies import get_app_settings
from ..schemas import SchemeConfig


logger = logging.getLogger(__name__)

MIN_MC_SAMPLES = 1000
# Samples whose spread is below this are equal up to rounding
SPREAD_TOL = 1e-14

Classifier = Callable[[np.ndarray], np.ndarray]


class InvalidSchemeError(ValueError):
    """Raised when a scheme or scheme configuration cannot be evaluated."""


@dataclass(frozen=True)
class CapPartition:
    """S0 = polar cap of half-angle beta around the north pole, S1 = the rest."""
    beta: float

    def __post_init__(self) -> None:
        beta_max = get_app_settings().beta_max
        if not 0.0 <= self.beta <= beta_max:
            raise InvalidSchemeError(f"beta must lie in [0, {beta_max:.12g}], got {self.beta}")

    def classify(self, n: BlochVector) -> int:
        # polar angle exactly beta belongs to S0
        return 0 if n.z >= math.cos(self.beta) else 1

    def classify_batch(self, points: np.ndarray) -> np.ndarray:
        return np.where(points[:, 2] >= math.cos(self.beta), 0, 1)

    def classify_by_overlap(self, n: BlochVector) -> int:
        """The same rule stated as |<psi|0>|^2 >= cos^2(beta/2)."""
        overlap = float(np.real(bloch_to_density(n)[0, 0]))
        return 0 if overlap >= math.cos(self.beta / 2.0) ** 2 else 1


@dataclass(frozen=True)
class GeneralScheme:
    classifier: Classifier
    recoveries: Tuple[AffineQubitChannel, ...]
    noise: AffineQubitChannel

    def __post_init__(self) -> None:
        count = len(self.recoveries)
        if count < 1 or count & (count - 1):
            raise InvalidSchemeError(f"need 2**n recovery channels, got {count}")
        object.__setattr__(self, "recoveries", tuple(self.recoveries))

    @property
    def n_bits(self) -> int:
        return len(self.recoveries).bit_length() - 1

    def validate(self) -> None:
        for label, channel in enumerate(self.recoveries):
            try:
                require_physical_channel(channel)
            except InvalidChannelError as exc:
                raise InvalidSchemeError(f"recovery for label {label} is not physical: {exc}") from exc


ScalarOrArray = Union[float, np.ndarray]


@dataclass(frozen=True)
class CapCoefficients:
    """Theta-integrals of the average-fidelity integrand for cap angle beta."""
    P: ScalarOrArray
    Q: ScalarOrArray
    P_prime: ScalarOrArray
    Q_prime: ScalarOrArray
    R: ScalarOrArray


def cap_coefficients(beta: ScalarOrArray) -> CapCoefficients:
    """Scalar beta gives float coefficients; an array of angles gives arrays."""
    c = np.cos(beta)
    c3 = c ** 3
    return CapCoefficients(
        P=2.0 / 3.0 - c + c3 / 3.0,
        Q=(1.0 - c3) / 3.0,
        P_prime=2.0 / 3.0 + c - c3 / 3.0,
        Q_prime=(1.0 + c3) / 3.0,
        R=(1.0 - c * c) / 2.0,
    )


def _check_beta(beta: float) -> None:
    beta_max = get_app_settings().beta_max
    if not 0.0 <= beta <= beta_max:
        raise InvalidSchemeError(f"beta must lie in [0, {beta_max:.12g}], got {beta}")


def cap_branch_value(
    alpha: float, k: ScalarOrArray, P: ScalarOrArray, Q: ScalarOrArray, R: ScalarOrArray
) -> ScalarOrArray:
    """alpha sqrt(1-k) P + alpha (1-k) Q + k R, one cap's recovery-dependent part."""
    return alpha * np.sqrt(1.0 - k) * P + alpha * (1.0 - k) * Q + k * R


def average_fidelity_closed_form(cfg: SchemeConfig) -> float:
    _check_beta(cfg.beta)
    c = math.cos(cfg.beta)
    co = cap_coefficients(cfg.beta)
    north = (1.0 - c) + cap_branch_value(cfg.alpha, cfg.k, co.P, co.Q, co.R)
    south = (1.0 + c) + cap_branch_value(cfg.alpha, cfg.k_prime, co.P_prime, co.Q_prime, co.R)
    return float(0.25 * north + 0.25 * south)


def average_fidelity_quadrature(cfg: SchemeConfig, tol: float = 1e-14) -> float:
    """Adaptive quadrature of the polar-angle integrand; independent check of the closed form."""
    _check_beta(cfg.beta)
    a, k, kp = cfg.alpha, cfg.k, cfg.k_prime

    def north(theta: float) -> float:
        s, c = math.sin(theta), math.cos(theta)
        return 0.25 * s * (1.0 + a * math.sqrt(1.0 - k) * s * s + a * (1.0 - k) * c * c + k * c)

    def south(theta: float) -> float:
        s, c = math.sin(theta), math.cos(theta)
        return 0.25 * s * (1.0 + a * math.sqrt(1.0 - kp) * s * s + a * (1.0 - kp) * c * c - kp * c)

    upper, _ = integrate.quad(north, 0.0, cfg.beta, epsabs=tol, epsrel=tol, limit=200)
    lower, _ = integrate.quad(south, cfg.beta, math.pi, epsabs=tol, epsrel=tol, limit=200)
    return upper + lower


def recovery_channels(cfg: SchemeConfig) -> Tuple[AffineQubitChannel, AffineQubitChannel]:
    return amplitude_damping_channel(cfg.k, 1), amplitude_damping_channel(cfg.k_prime, -1)


def scheme_from_config(cfg: SchemeConfig) -> GeneralScheme:
    partition = CapPartition(cfg.beta)
    return GeneralScheme(
        classifier=partition.classify_batch,
        recoveries=recovery_channels(cfg),
        noise=depolarizing_channel(cfg.alpha),
    )


def latitude_band_classifier(n_bits: int) -> Classifier:
    """2**n_bits bands of equal area, labelled from the north pole down."""
    bands = 2 ** n_bits

    def classify(points: np.ndarray) -> np.ndarray:
        # z uniform on [-1, 1] for uniform states, so equal z-slices have equal area
        labels = np.floor((1.0 - points[:, 2]) * bands / 2.0).astype(int)
        return np.clip(labels, 0, bands - 1)

    return classify


def uniform_cap_scheme(
    noise: AffineQubitChannel,
    n_bits: int,
    recoveries: Optional[Sequence[AffineQubitChannel]] = None,
) -> GeneralScheme:
    if n_bits < 0:
        raise InvalidSchemeError("n_bits must be non-negative")
    if recoveries is None:
        recoveries = [AffineQubitChannel.identity()] * (2 ** n_bits)
    return GeneralScheme(
        classifier=latitude_band_classifier(n_bits),
        recoveries=tuple(recoveries),
        noise=noise,
    )


def _fidelity_samples(scheme: GeneralScheme, rng: np.random.Generator, n_samples: int) -> np.ndarray:
    targets = sample_sphere_array(rng, n_samples)
    received = scheme.noise.apply_batch(targets)
    labels = np.asarray(scheme.classifier(targets))
    if np.any((labels < 0) | (labels >= len(scheme.recoveries))):
        raise InvalidSchemeError("classifier returned a label with no recovery channel")
    outputs = np.empty_like(received)
    for label, channel in enumerate(scheme.recoveries):
        mask = labels == label
        if np.any(mask):
            outputs[mask] = channel.apply_batch(received[mask])
    return fidelity_batch(targets, outputs)


@dataclass(frozen=True)
class _ShardStats:
    count: int
    mean: float
    m2: float  # sum of squared deviations from the shard mean
    low: float
    high: float

    @classmethod
    def of(cls, values: np.ndarray) -> "_ShardStats":
        mean = float(values.mean())
        return cls(
            count=int(values.size),
            mean=mean,
            m2=float(np.square(values - mean).sum()),
            low=float(values.min()),
            high=float(values.max()),
        )


def _merge_shards(shards: Sequence[_ShardStats]) -> Tuple[float, float]:
    """(mean, standard error) of the pooled samples, using the unbiased variance."""
    count, mean, m2 = 0, 0.0, 0.0
    for shard in shards:
        total = count + shard.count
        delta = shard.mean - mean
        mean += delta * shard.count / total
        m2 += shard.m2 + delta * delta * count * shard.count / total
        count = total
    spread = max(s.high for s in shards) - min(s.low for s in shards)
    if spread <= SPREAD_TOL:
        return mean, 0.0
    return mean, math.sqrt(m2 / (count - 1) / count)


def average_fidelity_monte_carlo(
    scheme: GeneralScheme,
    n_samples: int,
    rng: np.random.Generator,
) -> Tuple[float, float]:
    """Returns (estimate, standard error) with the unbiased sample variance."""
    if n_samples < MIN_MC_SAMPLES:
        raise InvalidSchemeError(f"n_samples must be at least {MIN_MC_SAMPLES}, got {n_samples}")
    scheme.validate()
    fidelities = _fidelity_samples(scheme, rng, n_samples)
    return _merge_shards([_ShardStats.of(fidelities)])


def average_fidelity_monte_carlo_sharded(
    scheme: GeneralScheme,
    n_samples: int,
    seed: int,
    n_workers: int = 1,
) -> Tuple[float, float]:
    """
    Monte-Carlo estimate split over n_workers shards.

    Shard i draws from the substream (seed, i); shards are merged by
    count-weighted averaging, so the result depends on seed and n_workers
    but not on scheduling.
    """
    if n_samples < MIN_MC_SAMPLES:
        raise InvalidSchemeError(f"n_samples must be at least {MIN_MC_SAMPLES}, got {n_samples}")
    if n_workers < 1:
        raise InvalidSchemeError("n_workers must be at least 1")
    if n_workers > n_samples:
        raise InvalidSchemeError("more shards than samples")
    scheme.validate()
    counts = [n_samples // n_workers + (1 if i < n_samples % n_workers else 0) for i in range(n_workers)]

    def run_shard(index: int) -> _ShardStats:
        return _ShardStats.of(_fidelity_samples(scheme, spawn_rng(seed, index), counts[index]))

    if n_workers == 1:
        shards: List[_ShardStats] = [run_shard(0)]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            shards = list(pool.map(run_shard, range(n_workers)))

    logger.debug("merging %d shards, %d samples", n_workers, n_samples)
    return _merge_shards(shards)


def no_op_fidelity(alpha: float) -> float:
    if not 0.0 <= alpha <= 1.0:
        raise InvalidSchemeError(f"alpha must lie in [0, 1], got {alpha}")
    return (1.0 + alpha) / 2.0


def classical_only_fidelity() -> float:
    return 0.75


def gisin_reference_fidelity() -> float:
    return get_app_settings().gisin_fidelity
