"""
Qubit states on and inside the Bloch ball.

A state is stored as its Bloch vector r, with density matrix
rho = (I + r . sigma) / 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np


EPS_BALL = 1e-12
UNIT_TOL = 1e-12
DENSITY_TOL = 1e-12

IDENTITY_2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS: Tuple[np.ndarray, np.ndarray, np.ndarray] = (PAULI_X, PAULI_Y, PAULI_Z)


class UnphysicalStateError(ValueError):
    """Raised for vectors or matrices that do not describe a qubit state."""


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    @classmethod
    def from_array(cls, values: Iterable[float]) -> "BlochVector":
        arr = np.asarray(list(values), dtype=float)
        if arr.shape != (3,):
            raise ValueError(f"Bloch vector needs 3 components, got shape {arr.shape}")
        return cls(float(arr[0]), float(arr[1]), float(arr[2]))

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "BlochVector":
        """Unit vector at polar angle theta and azimuth phi (radians)."""
        return cls(
            float(np.sin(theta) * np.cos(phi)),
            float(np.sin(theta) * np.sin(phi)),
            float(np.cos(theta)),
        )

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))

    def is_physical(self, eps: float = EPS_BALL) -> bool:
        return self.norm() <= 1.0 + eps

    def is_pure(self, tol: float = UNIT_TOL) -> bool:
        return abs(self.norm() - 1.0) <= tol

    def polar_angle(self) -> float:
        n = self.norm()
        if n == 0.0:
            return 0.0
        return float(np.arccos(np.clip(self.z / n, -1.0, 1.0)))


def _require_physical(r: BlochVector, eps: float = EPS_BALL) -> None:
    if not r.is_physical(eps):
        raise UnphysicalStateError(f"Bloch vector norm {r.norm():.15g} exceeds 1 + {eps:g}")


def _require_unit(n: BlochVector, tol: float = UNIT_TOL) -> None:
    if not n.is_pure(tol):
        raise UnphysicalStateError(f"expected a unit Bloch vector, got norm {n.norm():.15g}")


def bloch_to_density(r: BlochVector) -> np.ndarray:
    _require_physical(r)
    rho = 0.5 * IDENTITY_2.copy()
    for component, pauli in zip(r.as_array(), PAULIS):
        rho = rho + 0.5 * component * pauli
    return rho


def validate_density(rho: np.ndarray, tol: float = DENSITY_TOL) -> None:
    """Raise UnphysicalStateError unless rho is a 2x2 Hermitian, unit-trace, PSD matrix."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise UnphysicalStateError(f"density matrix must be 2x2, got {rho.shape}")
    if not np.allclose(rho, rho.conj().T, rtol=0.0, atol=tol):
        raise UnphysicalStateError("density matrix is not Hermitian")
    trace = np.trace(rho)
    if abs(trace - 1.0) > tol:
        raise UnphysicalStateError(f"density matrix trace is {trace.real:.15g}, expected 1")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise UnphysicalStateError("density matrix has a negative eigenvalue")


def density_to_bloch(rho: np.ndarray) -> BlochVector:
    rho = np.asarray(rho, dtype=complex)
    validate_density(rho)
    # r_j = tr(rho sigma_j)
    components = [float(np.real(np.trace(rho @ pauli))) for pauli in PAULIS]
    return BlochVector.from_array(components)


def fidelity_pure_vs_mixed(n: BlochVector, r: BlochVector) -> float:
    """<psi|sigma|psi> for pure target n and output r, i.e. (1 + n.r) / 2."""
    _require_unit(n)
    _require_physical(r)
    value = 0.5 * (1.0 + float(np.dot(n.as_array(), r.as_array())))
    return min(1.0, max(0.0, value))


def fidelity_batch(targets: np.ndarray, outputs: np.ndarray) -> np.ndarray:
    """Row-wise (1 + n.r) / 2 for arrays of shape (N, 3); inputs are trusted."""
    return 0.5 * (1.0 + np.einsum("ij,ij->i", targets, outputs))


def make_rng(seed: int) -> np.random.Generator:
    """Seeded PCG64 stream. The seed is mandatory; there is no global state."""
    if seed is None:
        raise ValueError("an explicit seed is required")
    return np.random.Generator(np.random.PCG64(int(seed) & 0xFFFFFFFFFFFFFFFF))


def spawn_rng(seed: int, index: int) -> np.random.Generator:
    """Independent substream for worker `index` derived from `seed`."""
    seq = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, int(index)])
    return np.random.Generator(np.random.PCG64(seq))


def sample_sphere_array(rng: np.random.Generator, size: int) -> np.ndarray:
    """(size, 3) array of unit vectors: z uniform on [-1, 1], azimuth uniform on [0, 2pi)."""
    z = rng.uniform(-1.0, 1.0, size=size)
    phi = rng.uniform(0.0, 2.0 * np.pi, size=size)
    rho = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    return np.column_stack((rho * np.cos(phi), rho * np.sin(phi), z))


def sample_uniform_sphere(rng: np.random.Generator) -> BlochVector:
    return BlochVector.from_array(sample_sphere_array(rng, 1)[0])


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Haar-random 3x3 rotation matrix (QR of a Gaussian matrix, sign-fixed)."""
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q
