#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
球壳解析解与能量账目测试
"""

import math

import numpy as np
import pytest

from core.analytic_shell import (ShellSpec, RampSpec, EnergyLedger, charge, charge_rate, potential,
                                 epsilon_field, radial_E, radiated_energy, rest_energy_change,
                                 coulomb_energy, balance_ledger, limiting_ledger, renormalization_masses,
                                 flux_quadrature, rest_energy_quadrature, coulomb_energy_quadrature)
from core.errors import ConfigError, DomainError
from core.field_model import Units

COEF = 1.0 / (4.0 * math.pi)


@pytest.mark.parametrize("kwargs, key", [
    ({"r0": 0.0}, "shell.r0"),
    ({"tau": -1.0}, "shell.tau"),
    ({"q0": math.nan}, "shell.q0"),
    ({"mode": "pulse"}, "shell.mode"),
])
def test_shell_spec_validation(kwargs, key):
    with pytest.raises(ConfigError) as info:
        ShellSpec(**kwargs)
    assert info.value.key == key


def test_zero_charge_is_allowed(natural):
    spec = ShellSpec(q0=0.0)
    assert epsilon_field(3.0, 2.5, spec, natural) == 0.0
    assert radiated_energy(math.inf, spec, natural) == 0.0


def test_charge_laws():
    g = ShellSpec(2.0, 1.0, 0.5, "growth")
    d = ShellSpec(2.0, 1.0, 0.5, "decay")
    assert charge(-1.0, g) == 0.0 and charge(-1.0, d) == 2.0
    assert charge(0.5, g) == pytest.approx(2.0 * (1.0 - math.exp(-1.0)))
    assert charge(0.5, d) == pytest.approx(2.0 * math.exp(-1.0))
    assert charge_rate(0.5, g) == pytest.approx(-charge_rate(0.5, d))
    ramp = RampSpec(1.0, 1.0, 2.0)
    assert ramp.charge(0.0) == 0.0 and ramp.charge(2.0) == pytest.approx(1.0)
    assert ramp.charge(1.0) == pytest.approx(0.5)
    assert ramp.mode == "growth"


def test_fields_undefined_inside_shell(natural):
    spec = ShellSpec()
    for func in (potential, epsilon_field, radial_E):
        with pytest.raises(DomainError):
            func(0.5, 1.0, spec, natural)


def test_causal_front(natural):
    spec = ShellSpec(1.0, 1.0, 1.0, "growth")
    r = np.array([3.0, 5.0])
    assert np.all(epsilon_field(r, 1.9, spec, natural) == 0.0)
    assert np.all(potential(r, 1.9, spec, natural) == 0.0)
    assert epsilon_field(3.0, 2.1, spec, natural) > 0.0


@pytest.mark.parametrize("spec", [ShellSpec(1.0, 1.0, 1.0, "growth"), ShellSpec(1.0, 1.0, 0.3, "decay"),
                                  RampSpec(1.0, 1.0, 1.5)])
def test_fields_derive_from_potential(natural, spec):
    h = 1e-5
    for r, t in ((3.0, 2.5), (3.0, 4.5), (5.0, 7.0), (1.5, 1.2)):
        dphi_dt = (potential(r, t + h, spec, natural) - potential(r, t - h, spec, natural)) / (2 * h)
        dphi_dr = (potential(r + h, t, spec, natural) - potential(r - h, t, spec, natural)) / (2 * h)
        assert epsilon_field(r, t, spec, natural) == pytest.approx(dphi_dt / natural.c, rel=1e-6, abs=1e-10)
        assert radial_E(r, t, spec, natural) == pytest.approx(-dphi_dr, rel=1e-6, abs=1e-10)


def test_growth_and_decay_add_to_static_coulomb(natural):
    g = ShellSpec(1.5, 1.0, 0.7, "growth")
    d = ShellSpec(1.5, 1.0, 0.7, "decay")
    r = np.linspace(1.0, 6.0, 11)
    for t in (0.0, 1.0, 3.0, 10.0):
        total = potential(r, t, g, natural) + potential(r, t, d, natural)
        np.testing.assert_allclose(total, COEF * 1.5 / r, rtol=1e-12)
        np.testing.assert_allclose(epsilon_field(r, t, g, natural), -epsilon_field(r, t, d, natural))


def test_late_time_growth_is_coulomb(natural):
    spec = ShellSpec(1.0, 1.0, 1.0, "growth")
    assert epsilon_field(4.0, 80.0, spec, natural) == pytest.approx(0.0, abs=1e-20)
    assert radial_E(4.0, 80.0, spec, natural) == pytest.approx(COEF / 16.0, rel=1e-12)


@pytest.mark.parametrize("mode", ["growth", "decay"])
@pytest.mark.parametrize("R", [1.0, 2.0, 5.0])
def test_radiated_energy_matches_flux_quadrature(natural, mode, R):
    spec = ShellSpec(1.0, 1.0, 1.0, mode)
    assert flux_quadrature(R, spec, natural) == pytest.approx(radiated_energy(R, spec, natural), rel=1e-6)


@pytest.mark.parametrize("mode", ["growth", "decay"])
@pytest.mark.parametrize("tau", [0.2, 1.0, 5.0])
def test_rest_energy_matches_quadrature(natural, mode, tau):
    spec = ShellSpec(1.0, 1.0, tau, mode)
    assert rest_energy_quadrature(spec, natural) == pytest.approx(rest_energy_change(spec, natural), rel=1e-6)


def test_coulomb_energy(natural):
    assert coulomb_energy(2.0, 1.0, math.inf, natural) == pytest.approx(COEF * 2.0)
    assert coulomb_energy_quadrature(2.0, 1.0, 4.0, natural) == pytest.approx(
        coulomb_energy(2.0, 1.0, 4.0, natural), rel=1e-8)
    with pytest.raises(DomainError):
        coulomb_energy(1.0, 2.0, 1.0, natural)


@pytest.mark.parametrize("mode", ["growth", "decay"])
@pytest.mark.parametrize("q0, r0, tau", [(1e-3, 0.01, 10.0), (1.0, 1.0, 1.0), (1e3, 10.0, 0.01)])
def test_balance_ledger_closes(natural, mode, q0, r0, tau):
    spec = ShellSpec(q0, r0, tau, mode)
    for R in (2.0 * r0, 10.0 * r0, math.inf):
        assert balance_ledger(spec, R, natural).relative_residual <= 1e-12
    assert limiting_ledger(spec, natural).relative_residual <= 1e-12


def test_growth_and_decay_rest_energy_difference_is_radiation(natural):
    g = ShellSpec(1.0, 1.0, 0.5, "growth")
    d = ShellSpec(1.0, 1.0, 0.5, "decay")
    deficit = rest_energy_change(g, natural) - rest_energy_change(d, natural)
    radiated = radiated_energy(math.inf, g, natural) + radiated_energy(math.inf, d, natural)
    assert deficit == pytest.approx(radiated, rel=1e-12)


def test_small_shell_limit(natural):
    spec = ShellSpec(1.0, 0.01, 1.0, "growth")
    limit = limiting_ledger(spec, natural)
    assert radiated_energy(math.inf, spec, natural) == pytest.approx(limit.w_rad, rel=2e-2)
    assert limit.w_rad == pytest.approx(COEF / 2.0)


def test_renormalization_masses(natural):
    spec = ShellSpec(1.0, 1.0, 1.0, "growth")
    m_e, m_total = renormalization_masses(5.0, spec, natural)
    assert m_total - m_e == pytest.approx(coulomb_energy(1.0, 1.0, math.inf, natural))
    assert 5.0 - m_total == pytest.approx(radiated_energy(math.inf, spec, natural))


def test_ramp_law_has_no_closed_form(natural):
    with pytest.raises(DomainError):
        radiated_energy(5.0, RampSpec(), natural)


def test_ledger_to_dict():
    data = EnergyLedger("growth", 2.0, 1.5, 0.5, 0.0).to_dict()
    assert data["mode"] == "growth"
    assert data["relative_residual"] == 0.0
    assert set(data) >= {"delta_rest_energy", "w_coul", "w_rad", "residual"}
