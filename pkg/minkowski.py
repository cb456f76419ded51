"""Four-vector algebra on Minkowski space with metric (+,-,-,-), natural units (MeV)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from errors import DomainError

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])


@dataclass(frozen=True)
class FourVector:
    """Real four-vector (t, x, y, z)."""

    t: float
    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        if not all(math.isfinite(value) for value in (self.t, self.x, self.y, self.z)):
            raise DomainError(f"Four-vector components must be finite: {self}")

    @classmethod
    def from_array(cls, values: ArrayLike) -> FourVector:
        t, x, y, z = (float(value) for value in np.asarray(values, dtype=float))
        return cls(t, x, y, z)

    def as_array(self) -> NDArray[np.float64]:
        return np.array([self.t, self.x, self.y, self.z], dtype=float)

    def __array__(self, dtype: object = None, copy: object = None) -> NDArray[np.float64]:
        array = self.as_array()
        return array if dtype is None else array.astype(dtype)

    @property
    def spatial(self) -> NDArray[np.float64]:
        return np.array([self.x, self.y, self.z], dtype=float)

    def spatial_norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def __add__(self, other: FourVector) -> FourVector:
        return FourVector(self.t + other.t, self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: FourVector) -> FourVector:
        return FourVector(self.t - other.t, self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> FourVector:
        return FourVector(-self.t, -self.x, -self.y, -self.z)


FourVectorLike = Union[FourVector, NDArray[np.float64], Sequence[float]]


@dataclass(frozen=True)
class MassShellPoint:
    """Point of the positive-energy mass shell H_m."""

    mass: float
    momentum: FourVector

    @property
    def energy(self) -> float:
        return self.momentum.t


@dataclass(frozen=True, eq=False)
class LorentzMatrix:
    """Real 4x4 matrix Λ acting on column four-vectors (row-major entries)."""

    entries: NDArray[np.float64]

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=float)
        if entries.shape != (4, 4):
            raise DomainError(f"Lorentz matrix must be 4x4, got shape {entries.shape}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def identity(cls) -> LorentzMatrix:
        return cls(np.eye(4))

    @classmethod
    def rotation_z(cls, angle: float) -> LorentzMatrix:
        c, s = math.cos(angle), math.sin(angle)
        entries = np.eye(4)
        entries[1:3, 1:3] = [[c, -s], [s, c]]
        return cls(entries)

    @classmethod
    def boost_z(cls, rapidity: float) -> LorentzMatrix:
        ch, sh = math.cosh(rapidity), math.sinh(rapidity)
        entries = np.eye(4)
        entries[0, 0] = entries[3, 3] = ch
        entries[0, 3] = entries[3, 0] = sh
        return cls(entries)

    def __matmul__(self, other: LorentzMatrix) -> LorentzMatrix:
        return LorentzMatrix(self.entries @ other.entries)

    def is_proper_orthochronous(self, tolerance: float = 1e-10) -> bool:
        """Check ΛᵀηΛ = η, Λ⁰₀ ≥ 1 and det Λ = 1 within ``tolerance``."""
        lam = self.entries
        scale = max(1.0, float(np.max(np.abs(lam))) ** 2)
        metric_ok = np.max(np.abs(lam.T @ METRIC @ lam - METRIC)) <= tolerance * scale
        return bool(
            metric_ok
            and lam[0, 0] >= 1.0 - tolerance * scale
            and abs(np.linalg.det(lam) - 1.0) <= tolerance * scale**2
        )


def minkowski_dot(a: FourVectorLike, b: FourVectorLike) -> float | NDArray[np.float64]:
    """Return a·b = a⁰b⁰ − a⃗·b⃗. Arrays broadcast over leading axes (last axis = 4)."""
    u = np.asarray(a, dtype=float)
    v = np.asarray(b, dtype=float)
    result = u[..., 0] * v[..., 0] - u[..., 1] * v[..., 1] - u[..., 2] * v[..., 2] - u[..., 3] * v[..., 3]
    if np.ndim(result) == 0:
        return float(result)
    return result


def zeta(p: FourVectorLike) -> float:
    """Invariant mass (p²)^½ of a vector in the forward cone C₀."""
    vector = np.asarray(p, dtype=float)
    square = minkowski_dot(vector, vector)
    if square <= 0.0 or vector[0] <= 0.0:
        raise DomainError(f"zeta requires p² > 0 and p⁰ > 0, got p={vector.tolist()}")
    return math.sqrt(square)


def on_shell(mass: float, spatial: ArrayLike) -> MassShellPoint:
    """Place a spatial momentum on the positive-energy mass shell of ``mass``."""
    if mass < 0.0:
        raise DomainError(f"Mass must be non-negative, got {mass}")
    x, y, z = (float(value) for value in np.asarray(spatial, dtype=float))
    energy = math.sqrt(mass * mass + x * x + y * y + z * z)
    return MassShellPoint(mass=float(mass), momentum=FourVector(energy, x, y, z))


def apply_lorentz(lorentz: LorentzMatrix, p: FourVectorLike) -> FourVector:
    return FourVector.from_array(lorentz.entries @ np.asarray(p, dtype=float))
