"""Smooth dynamic change to a centre-of-momentum frame.

For p in the forward cone C₀ the hermitian matrix ζ(p)M(p)⁻¹ is positive
definite; its positive square root a(p) satisfies a M(p) a† = ζ(p)·1₂, so the
Lorentz transformation induced by a(p) takes p to (ζ(p), 0, 0, 0). Applied to
p₁ + p₂ this gives a frame in which the two momenta are back to back, and the
choice depends smoothly on (p₁, p₂).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from clifford import CMatrix2, CMatrix4, hermitian_eig, m_of, pauli
from errors import DomainError
from minkowski import FourVector, FourVectorLike, LorentzMatrix, MassShellPoint, apply_lorentz, zeta

DET_TOLERANCE = 1e-10

_PAULI_STACK = np.stack([pauli(mu) for mu in range(4)])


@dataclass(frozen=True, eq=False)
class KElement:
    """Element of K, stored through its 2x2 block a (|det a| = 1)."""

    a: CMatrix2

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", np.asarray(self.a, dtype=complex))

    @property
    def determinant_deviation(self) -> float:
        return abs(abs(complex(np.linalg.det(self.a))) - 1.0)

    def is_unitary(self, tolerance: float = 1e-10) -> bool:
        return bool(np.max(np.abs(self.a.conj().T @ self.a - np.eye(2))) <= tolerance)

    def dirac(self) -> CMatrix4:
        """4x4 action on Dirac spinors in this repository's Weyl ordering.

        The lower block carries p·σ̄ = M(p) and transforms with a(·)a†, so it
        holds a; the upper block holds a^{†−1}. For a ∈ U(2) this is diag(a, a).
        """
        zero = np.zeros((2, 2), dtype=complex)
        return np.block([[np.linalg.inv(self.a.conj().T), zero], [zero, self.a]])

    def __matmul__(self, other: KElement) -> KElement:
        return KElement(self.a @ other.a)


def conjugation_matrix(a: CMatrix2) -> np.ndarray:
    """Real 4x4 matrix of p ↦ p̃ with M(p̃) = a M(p) a†, without checking det a.

    Column ν is a σ_ν a† read back through p^μ = ½ tr(σ_μ M(p)).
    """
    a = np.asarray(a, dtype=complex)
    images = np.einsum("ij,njk,lk->nil", a, _PAULI_STACK, a.conj())
    return 0.5 * np.einsum("mij,nji->mn", _PAULI_STACK, images).real


def lorentz_of(kappa: KElement) -> LorentzMatrix:
    """Lorentz transformation Λ(κ) defined by M(Λp) = a M(p) a†.

    The determinant check is relative to ‖a‖², the size of the rounding error of
    det a, so strongly boosting elements are accepted.
    """
    tolerance = DET_TOLERANCE * max(1.0, float(np.sum(np.abs(kappa.a) ** 2)))
    if kappa.determinant_deviation > tolerance:
        raise DomainError(f"|det a| deviates from 1 by {kappa.determinant_deviation:.3e}")
    return LorentzMatrix(conjugation_matrix(kappa.a))


def xi(p: FourVectorLike) -> KElement:
    """a(p) = (ζ(p)M(p)⁻¹)^½, the K element boosting p to rest."""
    vector = np.asarray(p, dtype=float)
    invariant_mass = zeta(vector)
    matrix = m_of(vector)
    # ζ·adj(M)/det(M) with det M(p) = p² = ζ²
    adjugate = np.array([[matrix[1, 1], -matrix[0, 1]], [-matrix[1, 0], matrix[0, 0]]])
    target = adjugate / invariant_mass

    unitary, lam1, lam2 = hermitian_eig(target)
    if lam2 <= 0.0:
        raise DomainError(f"M(p) is not positive definite for p={vector.tolist()}")
    # det(ζM⁻¹) = 1, so the small eigenvalue is 1/λ₁
    scale = math.sqrt(lam1)
    root = unitary @ np.diag([scale, 1.0 / scale]) @ unitary.conj().T
    return KElement(root)


@dataclass(frozen=True, eq=False)
class CMFrame:
    """Result of boosting an incoming pair to its centre-of-momentum frame."""

    lorentz: LorentzMatrix
    energy: float
    r1: FourVector
    r2: FourVector


def cm_boost(p1: MassShellPoint, p2: MassShellPoint) -> CMFrame:
    """Λ(p₁, p₂) = Λ(Ξ(p₁ + p₂)) with E = ½ζ(p₁ + p₂)."""
    total = p1.momentum + p2.momentum
    lorentz = lorentz_of(xi(total))
    r1 = apply_lorentz(lorentz, p1.momentum)
    r2 = apply_lorentz(lorentz, p2.momentum)
    if p1.mass == p2.mass:
        energy = float(pair_energies(p1.mass, p1.momentum.spatial, p2.momentum.spatial[np.newaxis, :])[0])
    else:
        energy = 0.5 * zeta(total)
    return CMFrame(lorentz=lorentz, energy=energy, r1=r1, r2=r2)


def cm_energy(p1: FourVectorLike, p2: FourVectorLike) -> float:
    """Total CM energy ζ(p₁ + p₂); Lorentz invariant."""
    return zeta(np.asarray(p1, dtype=float) + np.asarray(p2, dtype=float))


def pair_energies(mass: float, k1: NDArray[np.float64], partners: NDArray[np.float64]) -> NDArray[np.float64]:
    """E = ½ζ(p₁ + p₂) for p₁ and every partner p₂ on the shell H_mass.

    Both are given by spatial momenta (``partners`` has shape (n, 3)).
    s = 2m² + 2(ω₁ω₂ − k⃗₁·k⃗₂) is split into a radial part and an angular part
    so that nearly collinear pairs keep their digits.
    """
    if mass <= 0.0:
        raise DomainError(f"Shell mass must be positive, got {mass}")
    m_sq = mass * mass
    k1 = np.asarray(k1, dtype=float)
    partners = np.asarray(partners, dtype=float)
    n1 = float(np.linalg.norm(k1))
    n2 = np.linalg.norm(partners, axis=-1)
    omega1 = math.sqrt(m_sq + n1 * n1)
    omega2 = np.sqrt(m_sq + n2 * n2)
    radial = m_sq * (n1 * n1 + n2 * n2 + m_sq) / (omega1 * omega2 + n1 * n2)

    u1 = k1 / n1 if n1 > 0.0 else np.zeros(3)
    safe = np.where(n2 > 0.0, n2, 1.0)
    u2 = partners / safe[..., np.newaxis]
    angular = 0.5 * n1 * n2 * np.sum((u1 - u2) ** 2, axis=-1)
    return 0.5 * np.sqrt(2.0 * m_sq + 2.0 * (radial + angular))
