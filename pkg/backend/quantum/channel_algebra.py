"""
Qubit channels as affine maps of the Bloch ball, r -> A r + b.

Choi convention used throughout: unnormalized (trace 2), channel acting
on the second tensor slot,

    C = sum_ij |i><j| (x) Phi(|i><j|) = (id (x) Phi)(|Omega><Omega|),
    |Omega> = |00> + |11>.

With this convention the identity channel has Choi spectrum {2, 0, 0, 0}.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Literal, Sequence

import numpy as np

from .bloch_core import EPS_BALL, IDENTITY_2, PAULIS, BlochVector, UnphysicalStateError
from .numerics import fibonacci_sphere, golden_section_maximize


logger = logging.getLogger(__name__)

EPS_PSD = 1e-10
BOUNDARY_TOL = 1e-12

Pole = Literal[1, -1]


class InvalidChannelError(ValueError):
    """Raised when channel parameters are out of range or the map is not physical."""


@dataclass(frozen=True)
class AffineQubitChannel:
    A: np.ndarray
    b: np.ndarray

    def __post_init__(self) -> None:
        A = np.array(self.A, dtype=float)
        b = np.array(self.b, dtype=float)
        if A.shape != (3, 3) or b.shape != (3,):
            raise InvalidChannelError(f"expected A 3x3 and b length 3, got {A.shape} and {b.shape}")
        A.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @classmethod
    def identity(cls) -> "AffineQubitChannel":
        return cls(np.eye(3), np.zeros(3))

    def is_axially_diagonal(self) -> bool:
        """True for A = Diag(g, g, d), b = (0, 0, t)."""
        off_diag = self.A - np.diag(np.diag(self.A))
        return (
            not np.any(off_diag)
            and self.A[0, 0] == self.A[1, 1]
            and self.b[0] == 0.0
            and self.b[1] == 0.0
        )

    def apply_batch(self, r: np.ndarray) -> np.ndarray:
        """Apply to an (N, 3) array of Bloch vectors without validation."""
        return r @ self.A.T + self.b


@dataclass(frozen=True)
class DiagonalChannelParams:
    gamma: float
    delta: float
    k: float
    pole: Pole = 1

    def to_channel(self) -> AffineQubitChannel:
        return AffineQubitChannel(
            np.diag([self.gamma, self.gamma, self.delta]),
            np.array([0.0, 0.0, self.pole * self.k]),
        )


def depolarizing_channel(alpha: float) -> AffineQubitChannel:
    if not 0.0 <= alpha <= 1.0:
        raise InvalidChannelError(f"alpha must lie in [0, 1], got {alpha}")
    return AffineQubitChannel(alpha * np.eye(3), np.zeros(3))


def amplitude_damping_channel(k: float, pole: Pole = 1) -> AffineQubitChannel:
    """A = Diag(sqrt(1-k), sqrt(1-k), 1-k), b = (0, 0, pole*k)."""
    if not 0.0 <= k <= 1.0:
        raise InvalidChannelError(f"k must lie in [0, 1], got {k}")
    if pole not in (1, -1):
        raise InvalidChannelError(f"pole must be +1 or -1, got {pole}")
    root = float(np.sqrt(1.0 - k))
    return DiagonalChannelParams(gamma=root, delta=1.0 - k, k=k, pole=pole).to_channel()


def amplitude_damping_kraus(k: float, pole: Pole = 1) -> List[np.ndarray]:
    """Standard Kraus pair decaying toward |0> (pole=+1) or |1> (pole=-1)."""
    if not 0.0 <= k <= 1.0:
        raise InvalidChannelError(f"k must lie in [0, 1], got {k}")
    s, t = np.sqrt(1.0 - k), np.sqrt(k)
    if pole == 1:
        return [np.array([[1, 0], [0, s]], dtype=complex), np.array([[0, t], [0, 0]], dtype=complex)]
    return [np.array([[s, 0], [0, 1]], dtype=complex), np.array([[0, 0], [t, 0]], dtype=complex)]


def apply(ch: AffineQubitChannel, r: BlochVector) -> BlochVector:
    if not r.is_physical():
        raise UnphysicalStateError(f"Bloch vector norm {r.norm():.15g} exceeds 1 + {EPS_BALL:g}")
    return BlochVector.from_array(ch.A @ r.as_array() + ch.b)


def compose(second: AffineQubitChannel, first: AffineQubitChannel) -> AffineQubitChannel:
    """Channel applying `first` then `second`."""
    return AffineQubitChannel(second.A @ first.A, second.A @ first.b + second.b)


def mix(channels: Sequence[AffineQubitChannel], weights: Sequence[float]) -> AffineQubitChannel:
    """Probabilistic mixture sum_i w_i Phi_i."""
    w = np.asarray(weights, dtype=float)
    if len(channels) == 0 or len(channels) != len(w):
        raise InvalidChannelError("need one weight per channel")
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
        raise InvalidChannelError("mixture weights must be non-negative and sum to 1")
    A = sum(wi * ch.A for wi, ch in zip(w, channels))
    b = sum(wi * ch.b for wi, ch in zip(w, channels))
    return AffineQubitChannel(A, b)


def _apply_linear(ch: AffineQubitChannel, X: np.ndarray) -> np.ndarray:
    # Linear extension of the affine Bloch map to arbitrary 2x2 operators:
    # X = (tr X I + x.sigma)/2  ->  (tr X I + (A x + tr X b).sigma)/2
    trace = np.trace(X)
    x = np.array([np.trace(X @ p) for p in PAULIS])
    y = ch.A @ x + trace * ch.b
    out = trace * IDENTITY_2
    for component, pauli in zip(y, PAULIS):
        out = out + component * pauli
    return 0.5 * out


def choi_matrix(ch: AffineQubitChannel) -> np.ndarray:
    choi = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            unit = np.zeros((2, 2), dtype=complex)
            unit[i, j] = 1.0
            choi += np.kron(unit, _apply_linear(ch, unit))
    return choi


def choi_from_kraus(kraus: Sequence[np.ndarray]) -> np.ndarray:
    """sum_i (I (x) M_i)|Omega><Omega|(I (x) M_i)^dagger in the same convention as choi_matrix."""
    omega = np.array([1, 0, 0, 1], dtype=complex)
    choi = np.zeros((4, 4), dtype=complex)
    for m in kraus:
        v = np.kron(IDENTITY_2, m) @ omega
        choi += np.outer(v, v.conj())
    return choi


def choi_min_eigenvalue(ch: AffineQubitChannel) -> float:
    return float(np.linalg.eigvalsh(choi_matrix(ch)).min())


def is_completely_positive(ch: AffineQubitChannel, eps_psd: float = EPS_PSD) -> bool:
    return choi_min_eigenvalue(ch) >= -eps_psd


def check_necessary_conditions(p: DiagonalChannelParams, tol: float = BOUNDARY_TOL) -> bool:
    """0 <= k <= 1, 0 <= delta <= 1 - k, 0 <= gamma <= sqrt(1 - k)."""
    if not (-tol <= p.k <= 1.0 + tol):
        return False
    if not (-tol <= p.delta <= 1.0 - p.k + tol):
        return False
    return -tol <= p.gamma <= np.sqrt(max(1.0 - p.k, 0.0)) + tol


def max_output_norm(ch: AffineQubitChannel, grid_size: int = 10_000, ascent_steps: int = 50) -> float:
    """
    Largest |A n + b| over unit vectors n.

    Axially diagonal channels reduce to a polar-angle problem solved on a
    dense grid plus golden-section refinement. Other channels use a
    deterministic sphere lattice followed by projected gradient ascent.
    """
    if ch.is_axially_diagonal():
        g, d, t = ch.A[0, 0], ch.A[2, 2], ch.b[2]

        def radius_sq(theta: float) -> float:
            return g * g * np.sin(theta) ** 2 + (d * np.cos(theta) + t) ** 2

        thetas = np.linspace(0.0, np.pi, grid_size)
        values = g * g * np.sin(thetas) ** 2 + (d * np.cos(thetas) + t) ** 2
        i = int(np.argmax(values))
        lo, hi = thetas[max(i - 1, 0)], thetas[min(i + 1, grid_size - 1)]
        _, best = golden_section_maximize(radius_sq, lo, hi, tol=1e-12)
        return float(np.sqrt(max(best, float(values[i]))))

    points = fibonacci_sphere(grid_size)
    norms = np.linalg.norm(ch.apply_batch(points), axis=1)
    n = points[int(np.argmax(norms))]
    best = float(norms.max())
    step = 0.1
    for _ in range(ascent_steps):
        out = ch.A @ n + ch.b
        grad = ch.A.T @ out
        grad = grad - np.dot(grad, n) * n
        if not np.any(grad):
            break
        candidate = n + step * grad
        candidate = candidate / np.linalg.norm(candidate)
        value = float(np.linalg.norm(ch.A @ candidate + ch.b))
        if value > best:
            n, best = candidate, value
        else:
            step *= 0.5
    return best


def contracts_ball(ch: AffineQubitChannel, eps: float = EPS_BALL) -> bool:
    return max_output_norm(ch) <= 1.0 + eps


def require_physical_channel(ch: AffineQubitChannel, eps_psd: float = EPS_PSD) -> None:
    """Raise InvalidChannelError unless ch is CP and maps the ball into itself."""
    lam = choi_min_eigenvalue(ch)
    if lam < -eps_psd:
        raise InvalidChannelError(f"channel is not completely positive (min Choi eigenvalue {lam:.3e})")
    if not contracts_ball(ch, eps=1e-9):
        raise InvalidChannelError("channel maps part of the Bloch ball outside the ball")
    logger.debug("channel certified physical, min Choi eigenvalue %.3e", lam)
