from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from amplitudes import (
    ALPHA_W,
    FINE_STRUCTURE,
    ProcessKind,
    ProcessSpec,
    brute_force_phi,
    phi_qed,
    phi_qed_high_energy,
    phi_z,
    propagator_offshell_massive,
    propagator_offshell_photon,
    psi_z,
    qed_kernel,
    z_coupling_constant,
    z_kernel,
)
from clifford import gamma, slash, u_spinor, v_spinor
from cmframe import lorentz_of
from covariance import random_kinematics, sample_k
from errors import ConfigError, DomainError, PoleError
from minkowski import METRIC, MassShellPoint, apply_lorentz

QED = ProcessSpec.qed_lepton()
Z = ProcessSpec.z_boson()


def test_process_spec_factories_and_symbols() -> None:
    assert QED.process is ProcessKind.QED_LEPTON
    assert QED.m_in == 0.511
    assert QED.coupling == FINE_STRUCTURE
    assert QED.candidate_mass_symbol == "m_prime"
    assert QED.outgoing_mass(105.7) == 105.7

    assert Z.process is ProcessKind.Z_BOSON
    assert Z.coupling == ALPHA_W
    assert Z.candidate_mass_symbol == "M"
    assert Z.outgoing_mass(91187.6) == 105.7


@pytest.mark.parametrize(
    ("kwargs", "message"),
    [
        ({"process": ProcessKind.QED_LEPTON, "m_in": 0.0, "coupling": 0.1}, "Incoming mass"),
        ({"process": ProcessKind.QED_LEPTON, "m_in": 0.5, "coupling": -0.1}, "Coupling"),
        ({"process": ProcessKind.Z_BOSON, "m_in": 0.5, "coupling": 1e-6}, "m_mu"),
        (
            {"process": ProcessKind.Z_BOSON, "m_in": 0.5, "coupling": 1e-6, "m_fixed": {"m_mu": -1.0}},
            "m_mu",
        ),
        (
            {"process": ProcessKind.Z_BOSON, "m_in": 0.5, "coupling": 1e-6, "m_fixed": {"m_mu": 105.7}, "high_energy": True},
            "high-energy",
        ),
        ({"process": ProcessKind.QED_LEPTON, "m_in": 0.5, "coupling": 0.1, "pole_guard": 0.0}, "Tiny"),
    ],
)
def test_process_spec_validation(kwargs: dict[str, object], message: str) -> None:
    with pytest.raises(ConfigError, match=message):
        ProcessSpec(**kwargs)  # type: ignore[arg-type]


def test_coupling_factor_scales_with_coupling_squared() -> None:
    assert QED.coupling_factor() == pytest.approx((4.0 * math.pi * FINE_STRUCTURE) ** 2)
    assert QED.with_coupling(10.0 * FINE_STRUCTURE).coupling_factor() == pytest.approx(
        100.0 * QED.coupling_factor(), rel=1e-12
    )
    assert QED.with_coupling(0.0).coupling_factor() == 0.0


def test_z_coupling_constant_is_g_to_the_fourth_over_sixteen() -> None:
    g_squared = 4.0 * math.pi * ALPHA_W

    assert z_coupling_constant(ALPHA_W) == pytest.approx(g_squared**2 / 16.0, rel=1e-12)


@pytest.mark.parametrize("spec", [QED, ProcessSpec.qed_lepton(m=1.0, alpha=0.05), Z])
def test_closed_form_matches_spinor_sum(spec: ProcessSpec) -> None:
    rng = np.random.default_rng(17)
    for _ in range(10):
        if spec.process is ProcessKind.QED_LEPTON:
            candidate = spec.m_in * rng.uniform(0.5, 4.0)
            m_out = candidate
        else:
            m_out = spec.outgoing_mass(0.0)
        energy = max(spec.m_in, m_out) * rng.uniform(1.1, 4.0)
        if spec.process is ProcessKind.Z_BOSON:
            candidate = 2.0 * energy * rng.uniform(1.2, 2.0)
        kinematics = random_kinematics(rng, spec.m_in, m_out, energy)

        closed = float(spec.phi(candidate, *kinematics))

        assert closed > 0.0
        assert brute_force_phi(spec, candidate, *kinematics) == pytest.approx(closed, rel=1e-7)


def test_phi_is_lorentz_invariant() -> None:
    rng = np.random.default_rng(5)
    p1, p2, p1_out, p2_out = random_kinematics(rng, 0.511, 50.0)
    reference = phi_qed(0.511, 50.0, p1, p2, p1_out, p2_out)

    lorentz = lorentz_of(sample_k(rng, boost_scale=0.5))
    moved = [apply_lorentz(lorentz, p) for p in (p1, p2, p1_out, p2_out)]

    assert phi_qed(0.511, 50.0, *moved) == pytest.approx(reference, rel=1e-9)


def test_phi_kernels_broadcast_over_momentum_grids() -> None:
    rng = np.random.default_rng(8)
    points = [random_kinematics(rng, 0.511, 20.0, energy=30.0) for _ in range(5)]
    stacked = [np.array([np.asarray(point[i]) for point in points]) for i in range(4)]

    values = qed_kernel(0.511, 20.0, *stacked)

    assert values.shape == (5,)
    for value, point in zip(values, points):
        assert value == pytest.approx(qed_kernel(0.511, 20.0, *point), rel=1e-12)


def test_high_energy_kernel_approaches_exact_kernel() -> None:
    rng = np.random.default_rng(1)
    kinematics = random_kinematics(rng, 0.511, 0.511, energy=1.0e4 * 0.511, boost_scale=0.0)

    exact = phi_qed(0.511, 0.511, *kinematics)

    assert phi_qed_high_energy(*kinematics) == pytest.approx(exact, rel=1e-6)
    assert ProcessSpec.qed_lepton(high_energy=True).phi(0.511, *kinematics) == pytest.approx(exact, rel=1e-6)


def test_qed_kernel_requires_timelike_transfer() -> None:
    with pytest.raises(DomainError, match="timelike"):
        qed_kernel(0.5, 0.5, (1.0, 0.0, 0.0, 0.0), (0.0, 0.0, 0.0, 2.0), (1.0, 0.0, 0.0, 0.0), (1.0, 0.0, 0.0, 0.0))


def test_z_kernel_guards_the_pole() -> None:
    energy = 200.0
    rng = np.random.default_rng(4)
    kinematics = random_kinematics(rng, 0.511, 105.7, energy=energy, boost_scale=0.0)

    with pytest.raises(PoleError, match="pole"):
        z_kernel(2.0 * energy, 0.511, 105.7, *kinematics)

    away = z_kernel(3.0 * energy, 0.511, 105.7, *kinematics)
    q_sq = 4.0 * energy**2
    assert away == pytest.approx(psi_z(0.511, 105.7, *kinematics) / (q_sq - 9.0 * energy**2) ** 2, rel=1e-9)
    assert phi_z(3.0 * energy, 0.511, 105.7, *kinematics) == pytest.approx(
        z_coupling_constant() * away, rel=1e-12
    )


def test_propagators_reject_poles() -> None:
    assert propagator_offshell_photon((2.0, 0.0, 0.0, 0.0)) == 0.25
    with pytest.raises(PoleError):
        propagator_offshell_photon((1.0, 0.0, 0.0, 1.0))
    with pytest.raises(PoleError):
        propagator_offshell_massive((3.0, 0.0, 0.0, 0.0), 3.0)

    tensor = propagator_offshell_massive((2.0, 0.0, 0.0, 0.0), 1.0)
    assert tensor.shape == (4, 4)
    assert tensor[0, 0] == pytest.approx((-1.0 + 4.0) / 3.0)


def test_phi_is_non_negative_on_random_kinematics() -> None:
    rng = np.random.default_rng(12)
    for _ in range(50):
        kinematics = random_kinematics(rng, 0.511, 105.7)
        assert QED.phi(105.7, *kinematics) >= 0.0
        assert Z.phi(91187.6, *kinematics) >= 0.0


def test_z_coupling_constant_is_a_plain_float() -> None:
    assert type(z_coupling_constant()) is float
    assert type(Z.coupling_factor()) is float


def test_phi_qed_is_symmetric_under_exchanging_both_pairs() -> None:
    rng = np.random.default_rng(23)
    for _ in range(20):
        p1, p2, p1_out, p2_out = random_kinematics(rng, 0.511, 30.0)

        direct = phi_qed(0.511, 30.0, p1, p2, p1_out, p2_out)
        exchanged = phi_qed(0.511, 30.0, p2, p1, p2_out, p1_out)

        assert exchanged == pytest.approx(direct, rel=1e-12)


def test_longitudinal_part_of_massive_propagator_drops_out() -> None:
    rng = np.random.default_rng(29)
    m_e, m_mu = 0.51099895, 105.7
    for _ in range(10):
        momenta = random_kinematics(rng, m_e, m_mu)
        p1, p2, p1_out, p2_out = (
            MassShellPoint(mass, vector) for mass, vector in zip((m_e, m_e, m_mu, m_mu), momenta)
        )
        q = np.asarray(p1.momentum) + np.asarray(p2.momentum)
        for a, b in itertools.product((1, 2), repeat=2):
            v_bar = v_spinor(p1, a).bar()
            u_in = u_spinor(p2, b).components
            u_bar = u_spinor(p2_out, a).bar()
            v_out = v_spinor(p1_out, b).components
            for row, column in ((v_bar, u_in), (u_bar, v_out)):
                leading = sum(abs(q[mu]) * abs(row @ gamma(mu) @ column) for mu in range(4))
                assert abs(row @ slash(q) @ column) <= 1e-9 * leading


def test_massive_propagator_tensor_values() -> None:
    tensor = propagator_offshell_massive((3.0, 0.0, 0.0, 0.0), 1.0)

    assert np.allclose(tensor, (-METRIC + np.diag([9.0, 0.0, 0.0, 0.0])) / 8.0, rtol=0.0, atol=1e-15)

    q = (5.0, 1.0, -2.0, 0.5)
    general = propagator_offshell_massive(q, 2.0)
    assert np.array_equal(general, general.T)

    heavy = [propagator_offshell_massive(q, mass) for mass in (1.0e2, 1.0e3, 1.0e4)]
    magnitudes = [float(np.max(np.abs(entry))) for entry in heavy]
    assert magnitudes[0] > magnitudes[1] > magnitudes[2]
    assert np.allclose(heavy[2] * 1.0e8, METRIC, rtol=0.0, atol=1e-5)


def test_spinor_sum_vanishes_at_zero_coupling() -> None:
    rng = np.random.default_rng(6)
    kinematics = random_kinematics(rng, 0.511, 50.0)
    z_kinematics = random_kinematics(rng, Z.m_in, Z.outgoing_mass(0.0))

    assert brute_force_phi(QED.with_coupling(0.0), 50.0, *kinematics) == 0.0
    assert brute_force_phi(Z.with_coupling(0.0), 91187.6, *z_kinematics) == 0.0
