#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
守恒律诊断测试
"""

import dataclasses
import math

import numpy as np
import pytest

from core.analytic_shell import ShellSpec, RampSpec, StaticShell, balance_ledger
from core.conservation import (energy_law_terms, momentum_law_terms, energy_momentum_sample,
                               subsystem_energy_terms, subsystem_momentum_terms,
                               divergence_identity_residual, energy_contraction, momentum_contraction,
                               discrete_balance, time_integrated_ledger)
from core.errors import GridMismatch
from core.field_model import (FieldPoint, SourcePoint, Units, ZERO_SOURCE, system_residual, sources_for_jet,
                              plane_wave, plane_wave_jet)
from core.grid_solver import RadialGrid, run_radial


@pytest.mark.parametrize("kappa", [0.0, 0.5, 2.0])
def test_identities_vanish_on_exact_solutions(random_jet, kappa):
    u = Units(c=1.5, zeta=0.7, kappa=kappa)
    for _ in range(20):
        jet = random_jet()
        src = sources_for_jet(jet, u)
        energy, momentum = divergence_identity_residual(jet, src, u)
        assert energy == pytest.approx(0.0, abs=1e-10)
        np.testing.assert_allclose(momentum, 0.0, atol=1e-10)


@pytest.mark.parametrize("kappa", [0.0, 2.0])
def test_identities_equal_residual_contractions(random_jet, rng, kappa):
    u = Units(c=1.5, zeta=0.7, kappa=kappa)
    for _ in range(20):
        jet = random_jet()
        src = SourcePoint.from_array(rng.normal(size=16))
        r = system_residual(jet, src, u)
        energy, momentum = divergence_identity_residual(jet, src, u)
        assert energy == pytest.approx(energy_contraction(jet.value, r, u), abs=1e-10)
        np.testing.assert_allclose(momentum, momentum_contraction(jet.value, r, u), atol=1e-10)


def test_plane_wave_energy_moves_at_light_speed(natural):
    f = plane_wave(1.0, 2.0, (0.0, 0.0, 1.0), 0.0, [0.0, 0.0, 0.0], natural)
    w, power, flux = energy_law_terms(f, ZERO_SOURCE, natural)
    assert power == 0.0
    np.testing.assert_allclose(flux, [0.0, 0.0, w])
    jet = plane_wave_jet(1.0, 2.0, (0.0, 0.0, 1.0), 0.3, [0.0, 0.1, 0.2], natural)
    energy, momentum = divergence_identity_residual(jet, ZERO_SOURCE, natural)
    assert energy == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(momentum, 0.0, atol=1e-12)


def test_energy_density_is_positive(rng, natural):
    f = FieldPoint.from_array(rng.normal(size=16))
    sample = energy_momentum_sample(f, ZERO_SOURCE, natural)
    assert sample.energy_density > 0.0
    assert sample.is_finite()
    assert set(sample.to_dict()) == {"energy_density", "energy_flux", "momentum_density", "stress",
                                     "interaction_power", "interaction_force"}


def test_subsystem_is_restriction(rng, natural):
    for _ in range(20):
        f = FieldPoint(eps=rng.normal(), E=rng.normal(size=3), cB=rng.normal(size=3))
        src = SourcePoint(rho_e=rng.normal(), j_e=rng.normal(size=3))
        for full, sub in zip(energy_law_terms(f, src, natural) + momentum_law_terms(f, src, natural),
                             subsystem_energy_terms(f, src, natural) + subsystem_momentum_terms(f, src, natural)):
            np.testing.assert_allclose(full, sub, atol=1e-14)


def test_static_coulomb_discrete_balance(natural):
    grid = RadialGrid.build(1.0, 9.0, 128, natural)
    rec = run_radial(StaticShell(1.0, 1.0), grid, natural, 1.0, [3.0], 5.0)
    balance = discrete_balance(rec)
    assert np.max(np.abs(balance.residual)) <= 1e-10


def test_discrete_balance_is_second_order(natural):
    spec = RampSpec(1.0, 1.0, 1.0)
    maxima = []
    for n in (256, 512):
        grid = RadialGrid.build(1.0, 9.0, n, natural)
        rec = run_radial(spec, grid, natural, 6.0, [3.0], 5.0)
        maxima.append(float(np.max(np.abs(discrete_balance(rec).residual))))
    assert maxima[0] / maxima[1] >= 3.0


def test_balance_source_term_comes_from_deposited_charge(natural):
    grid = RadialGrid.build(1.0, 9.0, 256, natural)
    rec = run_radial(RampSpec(1.0, 1.0, 1.0), grid, natural, 3.0, [3.0], 5.0)
    assert np.max(rec.source_power) > 0
    closed = np.max(np.abs(discrete_balance(rec).residual))
    unsourced = np.max(np.abs(discrete_balance(dataclasses.replace(
        rec, source_power=np.zeros_like(rec.source_power))).residual))
    assert unsourced > 10.0 * closed
    sim = time_integrated_ledger(rec)
    doubled = time_integrated_ledger(dataclasses.replace(rec, source_power=2.0 * rec.source_power))
    assert doubled.delta_rest_energy == pytest.approx(2.0 * sim.delta_rest_energy)
    assert doubled.w_coul == sim.w_coul and doubled.w_rad == sim.w_rad


def test_discrete_balance_rejects_inconsistent_record(natural):
    grid = RadialGrid.build(1.0, 9.0, 64, natural)
    rec = run_radial(RampSpec(), grid, natural, 1.0, [3.0], 5.0)
    broken = dataclasses.replace(rec, outer_flux=rec.outer_flux[:-1])
    with pytest.raises(GridMismatch):
        discrete_balance(broken)
    with pytest.raises(GridMismatch):
        time_integrated_ledger(dataclasses.replace(rec, flux_index=grid.shell_index))


@pytest.mark.slow
@pytest.mark.parametrize("mode", ["growth", "decay"])
def test_simulated_ledger_matches_closed_form(natural, mode):
    spec = ShellSpec(1.0, 1.0, 1.0, mode)
    grid = RadialGrid.build(1.0, 33.0, 4096, natural)
    rec = run_radial(spec, grid, natural, 31.0, [5.0], 5.0, record_every=1)
    sim = time_integrated_ledger(rec)
    ref = balance_ledger(spec, rec.flux_radius, natural)
    assert sim.mode == mode
    for key in ("delta_rest_energy", "w_coul", "w_rad"):
        assert getattr(sim, key) == pytest.approx(getattr(ref, key), rel=2e-2)
    assert sim.relative_residual < 2e-2
    assert not math.isnan(sim.residual)
