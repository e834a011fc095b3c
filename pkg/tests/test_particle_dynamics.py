#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
粒子推进测试
"""

import math

import numpy as np
import pytest

from core.analytic_shell import ShellSpec, potential
from core.errors import DomainError, MassNonPositive
from core.field_model import FieldPoint, Units
from core.particle_dynamics import (TRAJECTORY_HEADER, ParticleState, force_and_power, mass_rate,
                                    distributed_mass_rate, interaction_invariant, push, trajectory,
                                    coulomb_sampler, shell_sampler, zero_sampler)


def test_state_kinematics(natural):
    s = ParticleState(1.0, 2.0, [0, 0, 0], [0.0, 0.0, 1.5])
    assert s.energy(natural) == pytest.approx(2.5)
    np.testing.assert_allclose(s.velocity(natural), [0.0, 0.0, 0.6])
    assert s.lorentz_factor_inverse(natural) == pytest.approx(0.8)
    assert s.mass_shell_defect(natural) == pytest.approx(0.0, abs=1e-15)


def test_force_and_power_consistent_with_mass_rate(rng):
    u = Units(c=3.0)
    for _ in range(20):
        s = ParticleState(rng.normal(), rng.uniform(0.5, 2.0), rng.normal(size=3), rng.normal(size=3))
        f = FieldPoint(eps=rng.normal(), E=rng.normal(size=3), cB=rng.normal(size=3))
        power, force = force_and_power(s, f, u)
        energy = s.energy(u)
        lhs = energy * power - u.c ** 2 * float(s.p @ force)
        rhs = s.m * u.c ** 4 * mass_rate(s, f.eps, u)
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-10)


def test_magnetic_force_does_no_work(natural):
    s = ParticleState(1.0, 1.0, [0, 0, 0], [0.3, 0.1, 0.0])
    power, force = force_and_power(s, FieldPoint(cB=[0.0, 0.0, 2.0]), natural)
    assert power == pytest.approx(0.0, abs=1e-15)
    assert float(force @ s.velocity(natural)) == pytest.approx(0.0, abs=1e-15)


def test_free_particle_moves_in_straight_line(natural):
    s = ParticleState(1.0, 1.0, [0, 0, 0], [0.75, 0.0, 0.0])
    traj = trajectory(s, zero_sampler, 0.1, 10, natural)
    np.testing.assert_allclose(traj.final.x, [0.6, 0.0, 0.0], atol=1e-14)
    np.testing.assert_allclose(traj.m, 1.0)
    assert traj.invariant_drift() == 0.0


def test_no_mass_change_without_epsilon(rng, natural):
    E = rng.normal(size=3) * 0.1
    B = rng.normal(size=3) * 0.1

    def uniform(t, x):
        return FieldPoint(E=E, cB=B)

    s = ParticleState(1.0, 1.0, np.zeros(3), rng.normal(size=3) * 0.3)
    traj = trajectory(s, uniform, 1e-3, 10000, natural, record_every=500)
    assert np.max(np.abs(traj.m - 1.0)) == 0.0
    assert abs(traj.final.mass_shell_defect(natural)) <= 1e-10


def test_push_validation(natural):
    s = ParticleState(1.0, 1.0, [0, 0, 0], [0, 0, 0])
    with pytest.raises(ValueError):
        push(s, zero_sampler, 0.0, natural)

    def strong(t, x):
        return FieldPoint(eps=18.0)

    with pytest.raises(MassNonPositive):
        push(s, strong, 0.1, natural)


def test_particle_in_shell_field_keeps_interaction_invariant(natural):
    spec = ShellSpec(1.0, 1.0, 1.0, "growth")
    sampler = shell_sampler(spec, natural)
    s = ParticleState(0.1, 1.0, [3.0, 0.0, 0.0], [0.0, 0.0, 0.0])
    traj = trajectory(s, sampler, 0.01, 1000, natural, record_every=50)
    final = traj.final
    # 波前到达前粒子静止，之后被同号球壳沿径向推开
    np.testing.assert_array_equal(traj.p[traj.times < 1.99], 0.0)
    assert final.p[0] > 0
    assert final.p[1] == 0.0 and final.p[2] == 0.0
    assert final.x[0] > 3.0
    start = 1.0 + 0.1 * potential(3.0, 0.0, spec, natural)
    end = final.energy(natural) + 0.1 * potential(float(final.x[0]), final.t, spec, natural)
    assert end == pytest.approx(start, rel=1e-6)
    assert traj.invariant_drift() <= 1e-6


def test_coulomb_orbit_invariant_converges(natural):
    drifts = []
    for dt in (0.05, 0.025):
        s = ParticleState(-1.0, 1.0, [1.0, 0.0, 0.0], [0.0, 0.25, 0.0])
        traj = trajectory(s, coulomb_sampler(1.0, natural), dt, int(round(10.0 / dt)), natural)
        drifts.append(traj.invariant_drift())
    assert drifts[1] < drifts[0]
    assert math.log2(drifts[0] / drifts[1]) >= 3.5


def test_sampler_domain(natural):
    sampler = coulomb_sampler(1.0, natural)
    with pytest.raises(DomainError):
        sampler(0.0, np.zeros(3))
    f = sampler(0.0, np.array([2.0, 0.0, 0.0]))
    assert f.E[0] == pytest.approx(1.0 / (4.0 * math.pi) / 4.0)
    assert sampler.potential(0.0, np.array([0.0, 2.0, 0.0])) == pytest.approx(1.0 / (8.0 * math.pi))


def test_shell_sampler_field_is_radial(natural):
    sampler = shell_sampler(ShellSpec(), natural, center=[1.0, 0.0, 0.0])
    f = sampler(3.0, np.array([1.0, 3.0, 0.0]))
    assert f.E[0] == 0.0 and f.E[2] == 0.0 and f.E[1] != 0.0
    assert f.eps > 0.0


def test_distributed_mass_rate_at_rest(natural):
    rho = np.array([1.0, 2.0])
    eps = np.array([0.5, -0.25])
    w = np.array([0.1, 0.2])
    assert distributed_mass_rate(rho, eps, w, natural) == pytest.approx(-(0.05 - 0.1))
    v = np.array([[0.6, 0.0, 0.0], [0.0, 0.0, 0.0]])
    assert distributed_mass_rate(rho, eps, w, natural, v) == pytest.approx(-(0.05 * 0.8 - 0.1))


def test_interaction_invariant(natural):
    s = ParticleState(2.0, 1.0, [0, 0, 0], [0, 0, 0])
    assert interaction_invariant(s, 0.25, natural) == pytest.approx(1.5)


def test_trajectory_rows_follow_header(natural):
    s = ParticleState(1.0, 1.0, [0, 0, 0], [0.1, 0, 0])
    traj = trajectory(s, zero_sampler, 0.1, 4, natural, record_every=2)
    rows = list(traj.rows())
    assert len(rows) == 3
    assert all(len(r) == len(TRAJECTORY_HEADER) for r in rows)
    assert rows[-1][0] == pytest.approx(0.4)
