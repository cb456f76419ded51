from __future__ import annotations

import numpy as np
import pytest

from clifford import (
    gamma,
    gamma5,
    general_vertex,
    hermitian_eig,
    hermitian_sqrt,
    m_of,
    p_dot_sigma,
    pauli,
    simple_vertex,
    slash,
    u_spinor,
    v_spinor,
)
from cmframe import KElement, lorentz_of
from covariance import sample_u2
from errors import DomainError
from minkowski import METRIC, FourVector, MassShellPoint, apply_lorentz, minkowski_dot, on_shell

ELECTRON = on_shell(0.511, (0.3, -0.4, 1.2))
MUON = on_shell(105.7, (20.0, 5.0, -30.0))


def test_pauli_rejects_bad_index() -> None:
    with pytest.raises(IndexError, match="Pauli"):
        pauli(4)


def test_m_of_is_hermitian_with_determinant_p_squared() -> None:
    p = (3.0, 0.5, -1.0, 2.0)
    matrix = m_of(p)

    assert np.allclose(matrix, matrix.conj().T)
    assert np.linalg.det(matrix).real == pytest.approx(minkowski_dot(p, p))
    assert np.allclose(p_dot_sigma(p) @ matrix, minkowski_dot(p, p) * np.eye(2))


def test_gamma_matrices_satisfy_clifford_algebra() -> None:
    for mu in range(4):
        for nu in range(4):
            anticommutator = gamma(mu) @ gamma(nu) + gamma(nu) @ gamma(mu)
            assert np.allclose(anticommutator, 2.0 * METRIC[mu, nu] * np.eye(4))


def test_gamma5_is_chiral_and_anticommutes() -> None:
    assert np.allclose(gamma5(), np.diag([-1.0, -1.0, 1.0, 1.0]))
    for mu in range(4):
        assert np.allclose(gamma5() @ gamma(mu), -gamma(mu) @ gamma5())


def test_gamma_rejects_bad_index() -> None:
    with pytest.raises(IndexError, match="Gamma"):
        gamma(-1)


def test_slash_squares_to_p_squared() -> None:
    p = (2.0, 0.3, -0.7, 1.1)

    assert np.allclose(slash(p) @ slash(p), minkowski_dot(p, p) * np.eye(4))


def test_hermitian_eig_reconstructs_random_matrices() -> None:
    rng = np.random.default_rng(7)
    for _ in range(50):
        raw = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        matrix = raw + raw.conj().T

        unitary, lam1, lam2 = hermitian_eig(matrix)

        assert lam1 >= lam2
        assert np.allclose(unitary.conj().T @ unitary, np.eye(2), atol=1e-12)
        assert np.allclose(unitary @ np.diag([lam1, lam2]) @ unitary.conj().T, matrix, atol=1e-12)


def test_hermitian_eig_handles_diagonal_and_degenerate_input() -> None:
    unitary, lam1, lam2 = hermitian_eig(np.diag([1.0, 4.0]))
    assert (lam1, lam2) == (4.0, 1.0)
    assert np.allclose(unitary @ np.diag([lam1, lam2]) @ unitary.conj().T, np.diag([1.0, 4.0]))

    unitary, lam1, lam2 = hermitian_eig(2.0 * np.eye(2))
    assert (lam1, lam2) == (2.0, 2.0)
    assert np.array_equal(unitary, np.eye(2))


def test_hermitian_eig_rejects_non_hermitian_matrix() -> None:
    with pytest.raises(DomainError, match="hermitian"):
        hermitian_eig(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_hermitian_sqrt_squares_back() -> None:
    matrix = m_of((5.0, 1.0, -2.0, 3.0))

    root = hermitian_sqrt(matrix)

    assert np.allclose(root, root.conj().T)
    assert np.allclose(root @ root, matrix, atol=1e-12)
    assert np.all(np.linalg.eigvalsh(root) > 0.0)


def test_hermitian_sqrt_rejects_indefinite_matrix() -> None:
    with pytest.raises(DomainError, match="positive definite"):
        hermitian_sqrt(np.diag([1.0, -1.0]))


def test_square_root_of_p_sigma_is_u2_covariant() -> None:
    rng = np.random.default_rng(12)
    for _ in range(50):
        a = sample_u2(rng)
        p = on_shell(rng.uniform(0.1, 3.0), 5.0 * rng.standard_normal(3)).momentum
        moved = apply_lorentz(lorentz_of(KElement(a)), p)

        lhs = hermitian_sqrt(p_dot_sigma(moved))
        rhs = a @ hermitian_sqrt(p_dot_sigma(p)) @ np.linalg.inv(a)

        assert np.max(np.abs(lhs - rhs)) <= 1e-9 * max(1.0, float(np.max(np.abs(rhs))))


@pytest.mark.parametrize("point", [ELECTRON, MUON])
def test_spinors_solve_the_dirac_equation(point: MassShellPoint) -> None:
    mass = point.mass
    scale = point.energy
    for alpha in (1, 2):
        u = u_spinor(point, alpha).components
        v = v_spinor(point, alpha).components
        assert np.max(np.abs((slash(point.momentum) - mass * np.eye(4)) @ u)) < 1e-10 * scale
        assert np.max(np.abs((slash(point.momentum) + mass * np.eye(4)) @ v)) < 1e-10 * scale


@pytest.mark.parametrize("point", [ELECTRON, MUON])
def test_spinor_normalization_and_completeness(point: MassShellPoint) -> None:
    mass = point.mass
    us = [u_spinor(point, alpha) for alpha in (1, 2)]
    vs = [v_spinor(point, alpha) for alpha in (1, 2)]

    for alpha in range(2):
        for beta in range(2):
            expected = 2.0 * mass if alpha == beta else 0.0
            assert us[alpha].bar() @ us[beta].components == pytest.approx(expected, abs=1e-9 * point.energy)
            assert vs[alpha].bar() @ vs[beta].components == pytest.approx(-expected, abs=1e-9 * point.energy)

    u_sum = sum(np.outer(spinor.components, spinor.bar()) for spinor in us)
    v_sum = sum(np.outer(spinor.components, spinor.bar()) for spinor in vs)
    assert np.allclose(u_sum, slash(point.momentum) + mass * np.eye(4), atol=1e-9 * point.energy)
    assert np.allclose(v_sum, slash(point.momentum) - mass * np.eye(4), atol=1e-9 * point.energy)


def test_spinors_reject_bad_polarization_and_massless_points() -> None:
    with pytest.raises(IndexError, match="Polarization"):
        u_spinor(ELECTRON, 3)
    with pytest.raises(DomainError, match="massive"):
        v_spinor(MassShellPoint(0.0, FourVector(1.0, 0.0, 0.0, 1.0)), 1)


def test_simple_vertex_matches_explicit_contraction() -> None:
    for mu in range(4):
        vertex = simple_vertex(MUON, ELECTRON, mu)
        for alpha_out in (1, 2):
            for alpha_in in (1, 2):
                explicit = (
                    u_spinor(MUON, alpha_out).bar() @ gamma(mu) @ u_spinor(ELECTRON, alpha_in).components
                )
                assert vertex[alpha_out - 1, alpha_in - 1] == pytest.approx(explicit, rel=1e-10, abs=1e-10)


def test_general_vertex_with_gamma_reduces_to_simple_vertex() -> None:
    vertices = general_vertex(MUON, ELECTRON, [gamma(mu) for mu in range(4)])

    for mu, vertex in enumerate(vertices):
        assert np.allclose(vertex, simple_vertex(MUON, ELECTRON, mu))


def test_general_vertex_needs_four_matrices() -> None:
    with pytest.raises(IndexError, match="four"):
        general_vertex(MUON, ELECTRON, [gamma(0)])
