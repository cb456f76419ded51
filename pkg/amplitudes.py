"""Spin-averaged squared amplitudes Φ = avg|M|² for e⁺e⁻ → γ → l⁺l⁻ and e⁺e⁻ → Z⁰ → μ⁺μ⁻.

Momentum arguments follow the order (p₁, p₂, p₁′, p₂′): incoming positron and
electron, outgoing antiparticle and particle. The closed forms accept single
four-vectors or arrays of shape (..., 4) and broadcast over the leading axes.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Mapping, Union

import numpy as np
from numpy.typing import NDArray

from clifford import gamma, pauli, u_spinor, v_spinor
from errors import ConfigError, DomainError, PoleError
from minkowski import METRIC, FourVector, FourVectorLike, MassShellPoint, minkowski_dot

FINE_STRUCTURE = 1.0 / 137.036
ALPHA_W = 1.0e-6
ELECTRON_MASS = 0.511
ELECTRON_MASS_PRECISE = 0.51099895
MUON_MASS = 105.7
TINY = 1.0e-9

Scalar = Union[float, NDArray[np.float64]]

_GAMMAS = np.stack([gamma(mu) for mu in range(4)])


class ProcessKind(Enum):
    QED_LEPTON = "qed-lepton"
    Z_BOSON = "z-boson"


@dataclass(frozen=True)
class ProcessSpec:
    """Which amplitude is integrated, with its physical constants.

    ``coupling`` is α for the lepton process and α_W for the Z⁰ process.
    """

    process: ProcessKind
    m_in: float
    coupling: float
    m_fixed: Mapping[str, float] = field(default_factory=dict, hash=False)
    high_energy: bool = False
    pole_guard: float = TINY

    def __post_init__(self) -> None:
        if self.m_in <= 0.0:
            raise ConfigError(f"Incoming mass must be positive, got {self.m_in}")
        if self.coupling < 0.0:
            raise ConfigError(f"Coupling must be non-negative, got {self.coupling}")
        if self.pole_guard <= 0.0:
            raise ConfigError(f"Pole guard 'Tiny' must be positive, got {self.pole_guard}")
        for name, value in self.m_fixed.items():
            if value <= 0.0:
                raise ConfigError(f"Mass '{name}' must be positive, got {value}")
        if self.process is ProcessKind.Z_BOSON and "m_mu" not in self.m_fixed:
            raise ConfigError("Z boson process requires a fixed 'm_mu'")
        if self.high_energy and self.process is not ProcessKind.QED_LEPTON:
            raise ConfigError("The high-energy kernel exists only for the lepton process")

    @classmethod
    def qed_lepton(
        cls,
        m: float = ELECTRON_MASS,
        alpha: float = FINE_STRUCTURE,
        high_energy: bool = False,
    ) -> ProcessSpec:
        return cls(ProcessKind.QED_LEPTON, m_in=m, coupling=alpha, high_energy=high_energy)

    @classmethod
    def z_boson(
        cls,
        m_e: float = ELECTRON_MASS_PRECISE,
        m_mu: float = MUON_MASS,
        alpha_w: float = ALPHA_W,
        pole_guard: float = TINY,
    ) -> ProcessSpec:
        return cls(
            ProcessKind.Z_BOSON,
            m_in=m_e,
            coupling=alpha_w,
            m_fixed={"m_mu": m_mu},
            pole_guard=pole_guard,
        )

    @property
    def candidate_mass_symbol(self) -> str:
        return "m_prime" if self.process is ProcessKind.QED_LEPTON else "M"

    def with_coupling(self, coupling: float) -> ProcessSpec:
        return replace(self, coupling=coupling)

    def outgoing_mass(self, candidate: float) -> float:
        """Mass of the outgoing pair when ``candidate`` is the scanned mass."""
        if self.process is ProcessKind.QED_LEPTON:
            return candidate
        return self.m_fixed["m_mu"]

    def coupling_factor(self) -> float:
        """Overall coupling prefactor: e⁴ for the lepton process, c for the Z⁰ process."""
        if self.process is ProcessKind.QED_LEPTON:
            return (4.0 * math.pi * self.coupling) ** 2
        return z_coupling_constant(self.coupling)

    def kernel(
        self,
        candidate: float,
        p1: FourVectorLike,
        p2: FourVectorLike,
        p1_out: FourVectorLike,
        p2_out: FourVectorLike,
    ) -> Scalar:
        """Φ divided by :meth:`coupling_factor`."""
        if self.process is ProcessKind.Z_BOSON:
            return z_kernel(
                candidate,
                self.m_in,
                self.m_fixed["m_mu"],
                p1,
                p2,
                p1_out,
                p2_out,
                tiny=self.pole_guard,
            )
        if self.high_energy:
            return qed_kernel_high_energy(p1, p2, p1_out, p2_out)
        return qed_kernel(self.m_in, candidate, p1, p2, p1_out, p2_out)

    def shell_kernel(
        self,
        candidate: float,
        p1: FourVectorLike,
        p2: FourVectorLike,
        p1_out: FourVectorLike,
        p2_out: FourVectorLike,
    ) -> Scalar:
        """Kernel on the outgoing shell of mass ``candidate``.

        The spin sums behind Ψ hold only when the outgoing mass terms equal
        √(p′²); on this shell that is ``candidate`` for both processes.
        """
        if self.process is ProcessKind.Z_BOSON:
            return z_kernel(candidate, self.m_in, candidate, p1, p2, p1_out, p2_out, tiny=self.pole_guard)
        return self.kernel(candidate, p1, p2, p1_out, p2_out)

    def phi(
        self,
        candidate: float,
        p1: FourVectorLike,
        p2: FourVectorLike,
        p1_out: FourVectorLike,
        p2_out: FourVectorLike,
    ) -> Scalar:
        return self.coupling_factor() * self.kernel(candidate, p1, p2, p1_out, p2_out)


def _lepton_bracket(
    m: float,
    m_out: float,
    p1: FourVectorLike,
    p2: FourVectorLike,
    p1_out: FourVectorLike,
    p2_out: FourVectorLike,
) -> Scalar:
    return (
        minkowski_dot(p1, p1_out) * minkowski_dot(p2, p2_out)
        + minkowski_dot(p2, p1_out) * minkowski_dot(p1, p2_out)
        + m * m * minkowski_dot(p1_out, p2_out)
        + m_out * m_out * minkowski_dot(p1, p2)
        + 2.0 * m * m * m_out * m_out
    )


def _momentum_transfer_squared(p1: FourVectorLike, p2: FourVectorLike) -> Scalar:
    q = np.asarray(p1, dtype=float) + np.asarray(p2, dtype=float)
    return minkowski_dot(q, q)


def _timelike_transfer(p1: FourVectorLike, p2: FourVectorLike) -> Scalar:
    q_sq = _momentum_transfer_squared(p1, p2)
    if np.any(np.asarray(q_sq) <= 0.0):
        raise DomainError("Momentum transfer (p1 + p2) must be timelike")
    return q_sq


def qed_kernel(
    m: float,
    m_out: float,
    p1: FourVectorLike,
    p2: FourVectorLike,
    p1_out: FourVectorLike,
    p2_out: FourVectorLike,
) -> Scalar:
    """8Q⁻⁴[...], the lepton Φ without the e⁴ prefactor."""
    q_sq = _timelike_transfer(p1, p2)
    return 8.0 * _lepton_bracket(m, m_out, p1, p2, p1_out, p2_out) / (q_sq * q_sq)


def qed_kernel_high_energy(
    p1: FourVectorLike,
    p2: FourVectorLike,
    p1_out: FourVectorLike,
    p2_out: FourVectorLike,
) -> Scalar:
    """Massless limit of :func:`qed_kernel`: only the two momentum products survive."""
    q_sq = _timelike_transfer(p1, p2)
    bracket = minkowski_dot(p1, p1_out) * minkowski_dot(p2, p2_out) + minkowski_dot(
        p2, p1_out
    ) * minkowski_dot(p1, p2_out)
    return 8.0 * bracket / (q_sq * q_sq)


def phi_qed(
    m: float,
    m_out: float,
    p1: FourVectorLike,
    p2: FourVectorLike,
    p1_out: FourVectorLike,
    p2_out: FourVectorLike,
    *,
    alpha: float = FINE_STRUCTURE,
) -> Scalar:
    """avg|M|² = 8e⁴Q⁻⁴[(p₁·p₁′)(p₂·p₂′) + (p₂·p₁′)(p₁·p₂′) + m²(p₁′·p₂′) + m′²(p₁·p₂) + 2m²m′²]."""
    e_squared = 4.0 * math.pi * alpha
    return e_squared * e_squared * qed_kernel(m, m_out, p1, p2, p1_out, p2_out)


def phi_qed_high_energy(
    p1: FourVectorLike,
    p2: FourVectorLike,
    p1_out: FourVectorLike,
    p2_out: FourVectorLike,
    *,
    alpha: float = FINE_STRUCTURE,
) -> Scalar:
    e_squared = 4.0 * math.pi * alpha
    return e_squared * e_squared * qed_kernel_high_energy(p1, p2, p1_out, p2_out)


def su2_generators() -> list[NDArray[np.complex128]]:
    """T^α = σ^α / 2 for α = 1, 2, 3."""
    return [0.5 * pauli(alpha) for alpha in (1, 2, 3)]


def z_coupling_constant(alpha_w: float = ALPHA_W) -> float:
    """c = (1/12) g_W⁴ Σ_α Σ_{i₁i₂i₁′i₂′} |T^α_{i₁i₂} T^α_{i₁′i₂′}|² (equals g_W⁴/16)."""
    g_w_squared = 4.0 * math.pi * alpha_w
    total = 0.0
    for generator in su2_generators():
        for i1, i2, j1, j2 in itertools.product(range(2), repeat=4):
            total += abs(generator[i1, i2] * generator[j1, j2]) ** 2
    return float(g_w_squared * g_w_squared * total / 12.0)


def psi_z(
    m_e: float,
    m_mu: float,
    p1: FourVectorLike,
    p2: FourVectorLike,
    p1_out: FourVectorLike,
    p2_out: FourVectorLike,
) -> Scalar:
    """Ψ = ¼Σ|v̄γ^μu η_μν ūγ^νv|² = 8[...] with (m, m′) = (m_e, m_μ)."""
    return 8.0 * _lepton_bracket(m_e, m_mu, p1, p2, p1_out, p2_out)


def pole_epsilon(mass: float, tiny: float = TINY) -> float:
    return tiny * max(1.0, mass * mass)


def z_kernel(
    boson_mass: float,
    m_e: float,
    m_mu: float,
    p1: FourVectorLike,
    p2: FourVectorLike,
    p1_out: FourVectorLike,
    p2_out: FourVectorLike,
    *,
    tiny: float = TINY,
) -> Scalar:
    """(q² − M²)⁻² Ψ, the Z⁰ Φ without the constant c."""
    denominator = _momentum_transfer_squared(p1, p2) - boson_mass * boson_mass
    if np.any(np.abs(np.asarray(denominator)) < pole_epsilon(boson_mass, tiny)):
        raise PoleError(f"q² is within the pole guard of M² = {boson_mass**2}")
    return psi_z(m_e, m_mu, p1, p2, p1_out, p2_out) / (denominator * denominator)


def phi_z(
    boson_mass: float,
    m_e: float,
    m_mu: float,
    p1: FourVectorLike,
    p2: FourVectorLike,
    p1_out: FourVectorLike,
    p2_out: FourVectorLike,
    *,
    alpha_w: float = ALPHA_W,
) -> Scalar:
    """Φ = c (q² − M²)⁻² Ψ for e⁺e⁻ → Z⁰ → μ⁺μ⁻ with pure vector coupling."""
    return z_coupling_constant(alpha_w) * z_kernel(boson_mass, m_e, m_mu, p1, p2, p1_out, p2_out)


def propagator_offshell_photon(q: FourVectorLike) -> float:
    """Scalar factor 1/q² of the off-shell photon propagator −η_μν/q²."""
    q_sq = minkowski_dot(q, q)
    if abs(q_sq) < TINY:
        raise PoleError(f"Photon propagator evaluated at q² = {q_sq}")
    return 1.0 / q_sq


def propagator_offshell_massive(
    q: FourVectorLike, mass: float, tiny: float = TINY
) -> NDArray[np.float64]:
    """Tensor (−η_μν + q_μq_ν/M²)/(q² − M²) of a massive vector boson."""
    vector = np.asarray(q, dtype=float)
    denominator = minkowski_dot(vector, vector) - mass * mass
    if abs(denominator) < pole_epsilon(mass, tiny):
        raise PoleError(f"Massive propagator evaluated within the pole guard of M = {mass}")
    q_lower = METRIC @ vector
    return (-METRIC + np.outer(q_lower, q_lower) / (mass * mass)) / denominator


def _shell_point(mass: float, momentum: FourVectorLike) -> MassShellPoint:
    vector = momentum if isinstance(momentum, FourVector) else FourVector.from_array(momentum)
    return MassShellPoint(mass=mass, momentum=vector)


def _currents(
    m: float,
    m_out: float,
    p1: FourVectorLike,
    p2: FourVectorLike,
    p1_out: FourVectorLike,
    p2_out: FourVectorLike,
) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    """Incoming v̄(p₁,α₁)γ^μu(p₂,α₂) and outgoing ū(p₂′,α₂′)γ^νv(p₁′,α₁′), indexed [α, α, μ]."""
    positron, electron = _shell_point(m, p1), _shell_point(m, p2)
    antiparticle, particle = _shell_point(m_out, p1_out), _shell_point(m_out, p2_out)

    incoming = np.empty((2, 2, 4), dtype=complex)
    outgoing = np.empty((2, 2, 4), dtype=complex)
    for a, b in itertools.product((1, 2), repeat=2):
        v_bar = v_spinor(positron, a).bar()
        u_in = u_spinor(electron, b).components
        u_bar = u_spinor(particle, a).bar()
        v_out = v_spinor(antiparticle, b).components
        incoming[a - 1, b - 1] = np.einsum("i,mij,j->m", v_bar, _GAMMAS, u_in)
        outgoing[a - 1, b - 1] = np.einsum("i,mij,j->m", u_bar, _GAMMAS, v_out)
    return incoming, outgoing


def brute_force_phi(
    spec: ProcessSpec,
    candidate: float,
    p1: FourVectorLike,
    p2: FourVectorLike,
    p1_out: FourVectorLike,
    p2_out: FourVectorLike,
) -> float:
    """avg|M|² by explicit polarization (and SU(2) index) sums over spinor contractions."""
    m_out = spec.outgoing_mass(candidate)
    incoming, outgoing = _currents(spec.m_in, m_out, p1, p2, p1_out, p2_out)
    q = np.asarray(p1, dtype=float) + np.asarray(p2, dtype=float)

    if spec.process is ProcessKind.QED_LEPTON:
        e_squared = 4.0 * math.pi * spec.coupling
        tensor = e_squared * propagator_offshell_photon(q) * METRIC
        amplitudes = np.einsum("abm,mn,cdn->abcd", incoming, tensor, outgoing)
        return float(np.sum(np.abs(amplitudes) ** 2) / 4.0)

    g_w_squared = 4.0 * math.pi * spec.coupling
    tensor = propagator_offshell_massive(q, candidate, spec.pole_guard)
    amplitudes = np.einsum("abm,mn,cdn->abcd", incoming, tensor, outgoing)
    polarization_sum = 0.0
    for generator in su2_generators():
        for i1, i2, j1, j2 in itertools.product(range(2), repeat=4):
            factor = g_w_squared * generator[i1, i2] * generator[j1, j2]
            polarization_sum += float(np.sum(np.abs(factor * amplitudes) ** 2))
    return polarization_sum / 12.0 / 4.0
