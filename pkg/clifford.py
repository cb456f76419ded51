"""Pauli and Dirac matrices in the Weyl representation, hermitian square roots and spinors."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

from errors import DomainError
from minkowski import FourVectorLike, MassShellPoint

CMatrix2 = NDArray[np.complex128]
CMatrix4 = NDArray[np.complex128]

HERMITIAN_TOLERANCE = 1e-10

_PAULI = (
    np.array([[1, 0], [0, 1]], dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
_ZERO2 = np.zeros((2, 2), dtype=complex)
_BASIS = (np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex))


def pauli(mu: int) -> CMatrix2:
    """σ_μ with σ₀ = 1₂."""
    if mu not in (0, 1, 2, 3):
        raise IndexError(f"Pauli index must be 0..3, got {mu}")
    return _PAULI[mu].copy()


def sigma_upper(mu: int) -> CMatrix2:
    """σ^μ = (σ₀, σ⃗)."""
    return pauli(mu)


def sigma_bar_upper(mu: int) -> CMatrix2:
    """σ̄^μ = (σ₀, −σ⃗)."""
    return pauli(mu) if mu == 0 else -pauli(mu)


def m_of(p: FourVectorLike) -> CMatrix2:
    """M(p) = p^μ σ_μ; hermitian with det M(p) = p²."""
    t, x, y, z = np.asarray(p, dtype=float)
    return np.array([[t + z, x - 1j * y], [x + 1j * y, t - z]], dtype=complex)


def p_dot_sigma(p: FourVectorLike) -> CMatrix2:
    """p·σ = p⁰σ₀ − p⃗·σ⃗."""
    t, x, y, z = np.asarray(p, dtype=float)
    return np.array([[t - z, -x + 1j * y], [-x - 1j * y, t + z]], dtype=complex)


def p_dot_sigma_bar(p: FourVectorLike) -> CMatrix2:
    """p·σ̄ = p⁰σ₀ + p⃗·σ⃗ = M(p)."""
    return m_of(p)


def _require_hermitian(matrix: CMatrix2) -> None:
    scale = max(1.0, float(np.max(np.abs(matrix))))
    if np.max(np.abs(matrix - matrix.conj().T)) > HERMITIAN_TOLERANCE * scale:
        raise DomainError("Matrix is not hermitian within tolerance")


def hermitian_eig(matrix: CMatrix2) -> tuple[CMatrix2, float, float]:
    """Closed-form eigendecomposition A = U·diag(λ1, λ2)·U† with λ1 ≥ λ2.

    The eigenvector of λ1 is read off the row of A − λ1 that avoids the
    cancellation λ1 − a when a ≥ d. The exactly degenerate case returns U = 1₂.
    """
    matrix = np.asarray(matrix, dtype=complex)
    _require_hermitian(matrix)
    a = matrix[0, 0].real
    d = matrix[1, 1].real
    b = 0.5 * (matrix[0, 1] + matrix[1, 0].conjugate())

    mid = 0.5 * (a + d)
    half_gap = math.hypot(0.5 * (a - d), abs(b))
    lam1, lam2 = mid + half_gap, mid - half_gap

    if a >= d:
        first = np.array([lam1 - d, b.conjugate()], dtype=complex)
    else:
        first = np.array([b, lam1 - a], dtype=complex)
    norm = float(np.linalg.norm(first))
    if norm == 0.0:
        return np.eye(2, dtype=complex), lam1, lam2

    first /= norm
    second = np.array([-first[1].conjugate(), first[0].conjugate()], dtype=complex)
    unitary = np.column_stack([first, second])
    return unitary, lam1, lam2


def hermitian_sqrt(matrix: CMatrix2) -> CMatrix2:
    """Unique positive definite hermitian square root of a positive definite matrix."""
    unitary, lam1, lam2 = hermitian_eig(matrix)
    if lam2 <= 0.0:
        raise DomainError(f"Matrix is not positive definite (eigenvalues {lam1}, {lam2})")
    root = unitary @ np.diag([math.sqrt(lam1), math.sqrt(lam2)]) @ unitary.conj().T
    return 0.5 * (root + root.conj().T)


def gamma(mu: int) -> CMatrix4:
    """γ^μ = [[0, σ^μ], [σ̄^μ, 0]] (Weyl representation)."""
    if mu not in (0, 1, 2, 3):
        raise IndexError(f"Gamma index must be 0..3, got {mu}")
    return np.block([[_ZERO2, sigma_upper(mu)], [sigma_bar_upper(mu), _ZERO2]])


def gamma_lower(mu: int) -> CMatrix4:
    """γ_μ = η_μμ γ^μ."""
    return gamma(mu) if mu == 0 else -gamma(mu)


def gamma5() -> CMatrix4:
    """γ⁵ = iγ⁰γ¹γ²γ³ = diag(−1₂, 1₂)."""
    return 1j * gamma(0) @ gamma(1) @ gamma(2) @ gamma(3)


def slash(p: FourVectorLike) -> CMatrix4:
    """Feynman slash p_μγ^μ = [[0, p·σ], [p·σ̄, 0]]."""
    return np.block([[_ZERO2, p_dot_sigma(p)], [p_dot_sigma_bar(p), _ZERO2]])


class SpinorKind(Enum):
    PARTICLE = "u"
    ANTIPARTICLE = "v"


@dataclass(frozen=True, eq=False)
class DiracSpinor:
    """Basis spinor u(p, α) or v(p, α) as a complex 4-component column."""

    components: NDArray[np.complex128]
    kind: SpinorKind
    momentum: MassShellPoint
    polarization: int

    def bar(self) -> NDArray[np.complex128]:
        """Dirac adjoint ψ̄ = ψ†γ⁰ as a row."""
        return self.components.conj() @ gamma(0)


def _shell_roots(point: MassShellPoint) -> tuple[CMatrix2, CMatrix2]:
    if point.mass <= 0.0:
        raise DomainError("Spinors require a massive shell point (m > 0)")
    if point.momentum.t <= 0.0:
        raise DomainError("Spinors require a positive-energy shell point")
    return hermitian_sqrt(p_dot_sigma(point.momentum)), hermitian_sqrt(p_dot_sigma_bar(point.momentum))


def _check_polarization(alpha: int) -> None:
    if alpha not in (1, 2):
        raise IndexError(f"Polarization must be 1 or 2, got {alpha}")


def u_spinor(point: MassShellPoint, alpha: int) -> DiracSpinor:
    """u(p, α) = ((p·σ)^½ e_α, (p·σ̄)^½ e_α)."""
    _check_polarization(alpha)
    root, root_bar = _shell_roots(point)
    basis = _BASIS[alpha - 1]
    components = np.concatenate([root @ basis, root_bar @ basis])
    return DiracSpinor(components, SpinorKind.PARTICLE, point, alpha)


def v_spinor(point: MassShellPoint, alpha: int) -> DiracSpinor:
    """v(p, α) = ((p·σ)^½ η_α, −(p·σ̄)^½ η_α) with η₁ = e₂, η₂ = e₁."""
    _check_polarization(alpha)
    root, root_bar = _shell_roots(point)
    basis = _BASIS[2 - alpha]
    components = np.concatenate([root @ basis, -(root_bar @ basis)])
    return DiracSpinor(components, SpinorKind.ANTIPARTICLE, point, alpha)


def simple_vertex(p_out: MassShellPoint, p_in: MassShellPoint, mu: int) -> CMatrix2:
    """Simple external vertex ū(p′, α′)γ^μu(p, α) as a 2x2 matrix in (α′, α)."""
    root_out, root_bar_out = _shell_roots(p_out)
    root_in, root_bar_in = _shell_roots(p_in)
    return root_out @ sigma_bar_upper(mu) @ root_in + root_bar_out @ sigma_upper(mu) @ root_bar_in


def general_vertex(
    p_out: MassShellPoint,
    p_in: MassShellPoint,
    theta: Sequence[CMatrix4],
) -> list[CMatrix2]:
    """General external vertex ū(p′, α′)Θ^μu(p, α) for each of the four Θ^μ."""
    if len(theta) != 4:
        raise IndexError(f"Expected four vertex matrices, got {len(theta)}")
    root_out, root_bar_out = _shell_roots(p_out)
    root_in, root_bar_in = _shell_roots(p_in)

    vertices: list[CMatrix2] = []
    for block in theta:
        block = np.asarray(block, dtype=complex)
        t1, t2 = block[:2, :2], block[:2, 2:]
        t3, t4 = block[2:, :2], block[2:, 2:]
        vertices.append(
            (root_out @ t3 + root_bar_out @ t1) @ root_in
            + (root_out @ t4 + root_bar_out @ t2) @ root_bar_in
        )
    return vertices
