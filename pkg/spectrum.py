"""Integral mass spectrum: shell quadrature in the CM frame, outer mass-shell grid, peaks."""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from numpy.typing import NDArray
from scipy import integrate, signal

from amplitudes import ProcessSpec
from cmframe import cm_boost, pair_energies
from errors import ConfigError, DomainError
from minkowski import MassShellPoint, on_shell


@dataclass(frozen=True)
class QuadratureConfig:
    """Grid parameters, named after the listing keys.

    lambda_integral/n_integral: half-width of the momentum cube of each
    incoming shell and its subdivisions per half-axis; n_int_angle: subdivisions
    per spherical angle of the outgoing shell; start/end/n_m_prime: the scanned
    mass window and its bins.
    """

    lambda_integral: float
    n_integral: int
    n_int_angle: int
    start: float
    end: float
    n_m_prime: int

    def __post_init__(self) -> None:
        for key, value in (
            ("N_integral", self.n_integral),
            ("N_int_angle", self.n_int_angle),
            ("N_m_prime", self.n_m_prime),
        ):
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ConfigError(f"'{key}' must be an integer >= 1, got {value!r}")
        if not math.isfinite(self.lambda_integral) or self.lambda_integral <= 0.0:
            raise ConfigError(f"'Lambda_integral' must be positive, got {self.lambda_integral}")
        if not (math.isfinite(self.start) and math.isfinite(self.end)):
            raise ConfigError("'Start' and 'End' must be finite")
        if self.start < 0.0:
            raise ConfigError(f"'Start' must be >= 0, got {self.start}")
        if self.end <= self.start:
            raise ConfigError(f"'End' ({self.end}) must be greater than 'Start' ({self.start})")

    @property
    def bin_width(self) -> float:
        return (self.end - self.start) / self.n_m_prime

    def bin_centers(self) -> NDArray[np.float64]:
        return self.start + (np.arange(self.n_m_prime) + 0.5) * self.bin_width


@dataclass(frozen=True, eq=False)
class SpectrumCurve:
    """Sampled integral mass spectrum.

    Densities are ``shape * scale``: ``shape`` is integrated without the
    coupling prefactor and ``scale`` is that prefactor, so peak locations
    never depend on the coupling.
    """

    masses: tuple[float, ...]
    shape: tuple[float, ...]
    scale: float = 1.0
    config: QuadratureConfig | None = None
    process: ProcessSpec | None = None

    def __post_init__(self) -> None:
        masses = tuple(float(value) for value in self.masses)
        shape = tuple(float(value) for value in self.shape)
        object.__setattr__(self, "masses", masses)
        object.__setattr__(self, "shape", shape)
        if not masses or len(masses) != len(shape):
            raise DomainError("Spectrum needs the same non-zero number of masses and values")
        if any(later <= earlier for earlier, later in zip(masses, masses[1:])):
            raise DomainError("Spectrum bin centres must be strictly increasing")
        if not all(math.isfinite(value) and value >= 0.0 for value in shape):
            raise DomainError("Spectrum values must be finite and non-negative")
        if not math.isfinite(self.scale) or self.scale < 0.0:
            raise DomainError(f"Spectrum scale must be finite and non-negative, got {self.scale}")

    @classmethod
    def from_densities(cls, masses: Sequence[float], densities: Sequence[float]) -> SpectrumCurve:
        return cls(masses=tuple(masses), shape=tuple(densities))

    @property
    def densities(self) -> tuple[float, ...]:
        return tuple(value * self.scale for value in self.shape)

    @property
    def bins(self) -> list[tuple[float, float]]:
        return list(zip(self.masses, self.densities))


@lru_cache(maxsize=32)
def _direction_grid(n_angle: int) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Midpoint grid on S²: unit vectors and weights sinθ·Δθ·Δφ."""
    d_theta = math.pi / n_angle
    d_phi = 2.0 * math.pi / n_angle
    theta = (np.arange(n_angle) + 0.5) * d_theta
    phi = (np.arange(n_angle) + 0.5) * d_phi
    theta_grid, phi_grid = np.meshgrid(theta, phi, indexing="ij")
    sin_theta = np.sin(theta_grid)
    directions = np.stack(
        [sin_theta * np.cos(phi_grid), sin_theta * np.sin(phi_grid), np.cos(theta_grid)],
        axis=-1,
    ).reshape(-1, 3)
    weights = (sin_theta * d_theta * d_phi).reshape(-1)
    directions.setflags(write=False)
    weights.setflags(write=False)
    return directions, weights


def shell_integrals(
    spec: ProcessSpec,
    candidates: NDArray[np.float64],
    energies: NDArray[np.float64],
    n_angle: int,
) -> NDArray[np.float64]:
    """Coupling-free σ_inv,tot of incoming pairs given by their CM energies E.

    In the CM frame the polar axis of the direction grid is the incoming
    direction r⃗₁, so a pair enters only through E. The outgoing momenta
    (E, ±|q⃗′|ω′) lie on the shell of the candidate mass. Rows follow
    ``energies``, columns follow ``candidates``.
    """
    energies = np.asarray(energies, dtype=float)
    directions, weights = _direction_grid(n_angle)
    k_in = np.sqrt(np.maximum(energies * energies - spec.m_in * spec.m_in, 0.0))
    zeros = np.zeros_like(energies)
    r1 = np.stack([energies, zeros, zeros, k_in], axis=-1)[:, np.newaxis, :]
    r2 = np.stack([energies, zeros, zeros, -k_in], axis=-1)[:, np.newaxis, :]

    result = np.zeros((energies.size, len(candidates)))
    for column, mass in enumerate(candidates):
        candidate = float(mass)
        open_shell = energies >= candidate
        if not np.any(open_shell):
            continue
        energy = energies[open_shell]
        momentum = np.sqrt(energy * energy - candidate * candidate)
        spatial = momentum[:, np.newaxis, np.newaxis] * directions[np.newaxis, :, :]
        times = np.broadcast_to(energy[:, np.newaxis, np.newaxis], spatial.shape[:2] + (1,))
        r1_out = np.concatenate([times, spatial], axis=-1)
        r2_out = np.concatenate([times, -spatial], axis=-1)
        values = spec.shell_kernel(candidate, r1[open_shell], r2[open_shell], r1_out, r2_out)
        # q′dq′ = m′dm′ turns the ball integral into a density per unit m′
        result[open_shell, column] = momentum * candidate * (values @ weights)
    return result


def sigma_inv_tot(
    spec: ProcessSpec,
    candidate: float,
    p1: MassShellPoint,
    p2: MassShellPoint,
    cfg: QuadratureConfig,
) -> float:
    """Φ integrated over the outgoing directions of the CM frame of (p₁, p₂)."""
    if candidate <= 0.0:
        raise DomainError(f"Candidate mass must be positive, got {candidate}")
    frame = cm_boost(p1, p2)
    shape = shell_integrals(spec, np.array([candidate]), np.array([frame.energy]), cfg.n_int_angle)
    return spec.coupling_factor() * float(shape[0, 0])


@dataclass(frozen=True, eq=False)
class ShellGrid:
    """Quadrature nodes on H_m: spatial momenta of shape (n, 3) and their weights."""

    mass: float
    momenta: NDArray[np.float64]
    weights: NDArray[np.float64]

    def __len__(self) -> int:
        return int(self.weights.size)

    def points(self) -> list[MassShellPoint]:
        return [on_shell(self.mass, momentum) for momentum in self.momenta]


def shell_grid(mass: float, cfg: QuadratureConfig) -> ShellGrid:
    """Cartesian midpoint grid on the cube [−Λ, Λ]³, step Λ/N_integral, weight d³p."""
    step = cfg.lambda_integral / cfg.n_integral
    axis = -cfg.lambda_integral + (np.arange(2 * cfg.n_integral) + 0.5) * step
    xs, ys, zs = np.meshgrid(axis, axis, axis, indexing="ij")
    momenta = np.stack([xs, ys, zs], axis=-1).reshape(-1, 3)
    weights = np.full(momenta.shape[0], step**3)
    momenta.setflags(write=False)
    weights.setflags(write=False)
    return ShellGrid(mass=mass, momenta=momenta, weights=weights)


_PARTNER_BLOCK = 1024


def _outer_chunk(
    spec: ProcessSpec,
    cfg: QuadratureConfig,
    candidates: NDArray[np.float64],
    grid: ShellGrid,
    index: int,
) -> NDArray[np.float64]:
    partial = np.zeros(candidates.size)
    for begin in range(0, len(grid), _PARTNER_BLOCK):
        block = slice(begin, begin + _PARTNER_BLOCK)
        energies = pair_energies(grid.mass, grid.momenta[index], grid.momenta[block])
        values = shell_integrals(spec, candidates, energies, cfg.n_int_angle)
        partial += grid.weights[block] @ values
    return grid.weights[index] * partial


def integral_mass_spectrum(
    spec: ProcessSpec,
    cfg: QuadratureConfig,
    logger: logging.Logger,
    workers: int = 1,
) -> SpectrumCurve:
    """σ_M per mass bin: σ_inv,tot integrated over both incoming shells.

    One chunk per node of the first shell; chunks may run on any number of
    threads, and their partial sums are added in chunk order, so the result
    does not depend on ``workers``.
    """
    if workers < 1:
        raise ConfigError(f"Worker count must be >= 1, got {workers}")

    candidates = cfg.bin_centers()
    grid = shell_grid(spec.m_in, cfg)
    logger.info(
        "Integrating %s spectrum: %d bins in [%g, %g] MeV, %d shell nodes, %d pairs, %d workers",
        spec.process.value,
        candidates.size,
        cfg.start,
        cfg.end,
        len(grid),
        len(grid) ** 2,
        workers,
    )
    started = time.perf_counter()

    def run_chunk(index: int) -> NDArray[np.float64]:
        partial = _outer_chunk(spec, cfg, candidates, grid, index)
        logger.debug("Finished outer node %d/%d", index + 1, len(grid))
        return partial

    if workers == 1:
        chunks = [run_chunk(index) for index in range(len(grid))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            chunks = list(executor.map(run_chunk, range(len(grid))))

    total = np.zeros(candidates.size)
    for partial in chunks:
        total += partial
    logger.info("Spectrum finished in %.1f s", time.perf_counter() - started)

    return SpectrumCurve(
        masses=tuple(candidates.tolist()),
        shape=tuple(total.tolist()),
        scale=spec.coupling_factor(),
        config=cfg,
        process=spec,
    )


def inverse_relative_velocity(energy: float, mass: float) -> float:
    """1/|v⃗₂ − v⃗₁| = E / (2√(E² − m²)) for an equal-mass pair in its CM frame."""
    if energy <= mass:
        raise DomainError(f"Energy {energy} must exceed the mass {mass}")
    return energy / (2.0 * math.sqrt(energy * energy - mass * mass))


def _cm_kinematics(
    spec: ProcessSpec, energy: float, candidate: float, theta: float
) -> tuple[NDArray[np.float64], ...]:
    m_out = spec.outgoing_mass(candidate)
    if energy <= max(spec.m_in, m_out):
        raise DomainError(f"CM energy {energy} must exceed both masses ({spec.m_in}, {m_out})")
    k_in = math.sqrt(energy * energy - spec.m_in * spec.m_in)
    k_out = math.sqrt(energy * energy - m_out * m_out)
    direction = np.array([math.sin(theta), 0.0, math.cos(theta)])
    r1 = np.array([energy, 0.0, 0.0, k_in])
    r2 = np.array([energy, 0.0, 0.0, -k_in])
    r1_out = np.concatenate([[energy], k_out * direction])
    r2_out = np.concatenate([[energy], -k_out * direction])
    return r1, r2, r1_out, r2_out


def cross_section_cm(spec: ProcessSpec, energy: float, candidate: float, theta: float) -> float:
    """(dσ/dΩ)_CM at beam energy E per particle and scattering angle θ."""
    r1, r2, r1_out, r2_out = _cm_kinematics(spec, energy, candidate, theta)
    phi = float(spec.phi(candidate, r1, r2, r1_out, r2_out))
    xi_value = phi / (32.0 * (2.0 * math.pi) ** 2 * energy * energy)
    return inverse_relative_velocity(energy, spec.m_in) * xi_value


def total_cross_section(spec: ProcessSpec, energy: float, candidate: float) -> float:
    """Total CM cross section.

    Φ depends on the incoming and outgoing directions only through their
    relative angle, so the average over the incoming direction is trivial and
    the outgoing one reduces to an integral over θ.
    """
    _cm_kinematics(spec, energy, candidate, 0.0)
    value, _ = integrate.quad(
        lambda theta: cross_section_cm(spec, energy, candidate, theta) * math.sin(theta),
        0.0,
        math.pi,
    )
    return 2.0 * math.pi * value


@dataclass(frozen=True)
class Peak:
    """Local maximum of a spectrum, refined by a three-point parabola."""

    mass: float
    height: float
    prominence: float
    bin_mass: float


def _parabola_vertex(xs: NDArray[np.float64], ys: NDArray[np.float64]) -> tuple[float, float]:
    x1, y1 = float(xs[1]), float(ys[1])
    u0, u2 = float(xs[0]) - x1, float(xs[2]) - x1
    s0, s2 = (float(ys[0]) - y1) / u0, (float(ys[2]) - y1) / u2
    curvature = (s0 - s2) / (u0 - u2)
    slope = s0 - curvature * u0
    return x1 - slope / (2.0 * curvature), y1 - slope * slope / (4.0 * curvature)


def find_peaks(curve: SpectrumCurve, min_prominence: float = 0.0) -> list[Peak]:
    """Interior local maxima with prominence ≥ ``min_prominence``, highest first.

    Plateaus of three or more equal bins report their midpoint and height
    instead of a parabola fit.
    """
    if min_prominence < 0.0:
        raise DomainError(f"Minimum prominence must be >= 0, got {min_prominence}")
    values = np.asarray(curve.shape, dtype=float)
    masses = np.asarray(curve.masses, dtype=float)
    if values.size < 3:
        return []

    indices, properties = signal.find_peaks(values, prominence=0.0, plateau_size=1)
    peaks: list[Peak] = []
    for index, prominence, left, right in zip(
        indices, properties["prominences"], properties["left_edges"], properties["right_edges"]
    ):
        scaled_prominence = float(prominence) * curve.scale
        if scaled_prominence < min_prominence:
            continue
        if right - left >= 2:
            mass, height = 0.5 * float(masses[left] + masses[right]), float(values[index])
        else:
            window = slice(index - 1, index + 2)
            mass, height = _parabola_vertex(masses[window], values[window])
        peaks.append(
            Peak(
                mass=mass,
                height=height * curve.scale,
                prominence=scaled_prominence,
                bin_mass=float(masses[index]),
            )
        )

    peaks.sort(key=lambda peak: peak.height, reverse=True)
    return peaks
