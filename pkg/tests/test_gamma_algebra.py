#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
超复数代数测试
"""

import itertools

import numpy as np
import pytest

from core.errors import NonRealDecomposition
from core.field_model import BETA, FieldJet, FieldPoint, Units, ZERO_SOURCE, SLOT_TO_EQUATION, system_residual
from core.gamma_algebra import (ETA, GAMMA, BASIS, BASIS_LABELS, OMEGA, Hypercomplex, basis_matrix,
                                structure_constants, multiply, compose_psi, decompose, dirac_residual,
                                system_lhs_4d)


def test_clifford_relations():
    for mu, nu in itertools.product(range(4), repeat=2):
        anti = GAMMA[mu] @ GAMMA[nu] + GAMMA[nu] @ GAMMA[mu]
        np.testing.assert_allclose(anti, 2.0 * ETA[mu, nu] * np.eye(4), atol=1e-15)


def test_basis_is_linearly_independent():
    stacked = np.array([b.reshape(-1) for b in BASIS])
    assert np.linalg.matrix_rank(stacked) == 16
    assert len(set(BASIS_LABELS)) == 16
    np.testing.assert_allclose(OMEGA @ OMEGA, -np.eye(4), atol=1e-15)


def test_structure_constants_reproduce_matrix_products():
    sign, index = structure_constants()
    for a, b in itertools.product(range(16), repeat=2):
        np.testing.assert_allclose(BASIS[a] @ BASIS[b], sign[a, b] * BASIS[index[a, b]], atol=1e-14)
    np.testing.assert_allclose(np.abs(sign), 1.0)
    assert np.all((sign.real == 0) | (sign.imag == 0))


def test_multiply_matches_matrices(rng):
    a = Hypercomplex(rng.normal(size=16) + 1j * rng.normal(size=16))
    b = Hypercomplex(rng.normal(size=16) + 1j * rng.normal(size=16))
    np.testing.assert_allclose(multiply(a, b).matrix(), a.matrix() @ b.matrix(), atol=1e-12)
    assert (a @ b).allclose(Hypercomplex.from_matrix(a.matrix() @ b.matrix()))
    assert multiply(Hypercomplex.unit(0), a).allclose(a)
    np.testing.assert_array_equal(basis_matrix(3), BASIS[3])


def test_compose_decompose_inverse(rng):
    f = FieldPoint.from_array(rng.normal(size=16))
    np.testing.assert_allclose(decompose(compose_psi(f)).as_array(), f.as_array(), atol=1e-15)


def test_decompose_rejects_complex_components():
    h = Hypercomplex.unit(0) * 1j
    with pytest.raises(NonRealDecomposition):
        decompose(h)


@pytest.mark.parametrize("kappa", [0.0, 0.5, 2.0])
def test_dirac_operator_reproduces_field_system(random_jet, kappa):
    u = Units(kappa=kappa)
    for _ in range(20):
        jet = random_jet()
        a = dirac_residual(jet, kappa)
        np.testing.assert_allclose(a, system_lhs_4d(jet, kappa), atol=1e-12)
        r = system_residual(jet, ZERO_SOURCE, u)
        mapped = np.array([sign * r[i] for i, sign in SLOT_TO_EQUATION])
        np.testing.assert_allclose(a, mapped, atol=1e-12)


def test_slot_map_is_a_permutation():
    assert sorted(i for i, _ in SLOT_TO_EQUATION) == list(range(16))
    assert {s for _, s in SLOT_TO_EQUATION} == {1, -1}


def test_spatial_gamma_squares_to_minus_identity():
    np.testing.assert_array_equal(GAMMA[1] @ GAMMA[1], -np.eye(4))
    np.testing.assert_array_equal(GAMMA[0] @ GAMMA[0], np.eye(4))


def test_bivector_product_lands_on_omega_slot():
    product = multiply(Hypercomplex.unit(5), Hypercomplex.unit(8))
    assert BASIS_LABELS[5] == "g0g1" and BASIS_LABELS[8] == "g2g3"
    assert product.allclose(Hypercomplex.unit(15))
    np.testing.assert_allclose(BASIS[5] @ BASIS[8], OMEGA, atol=1e-15)


def test_electric_field_composes_into_first_bivector_slot():
    psi = compose_psi(FieldPoint(E=[1.0, 0.0, 0.0]))
    np.testing.assert_array_equal(psi.coeffs, Hypercomplex.unit(5).coeffs)


def test_linear_epsilon_gives_unit_residual_in_gamma1_slot():
    d = np.zeros((4, 16))
    d[1, 0] = 1.0
    jet = FieldJet.from_arrays(np.zeros(16), d)
    a = dirac_residual(jet, 0.0)
    expected = np.zeros(16)
    expected[2] = 1.0
    np.testing.assert_allclose(a, expected, atol=1e-15)


def test_hand_built_pseudoscalar_matrix_decomposes_to_beta():
    m = 2.0 * GAMMA[0] @ GAMMA[1] @ GAMMA[2] @ GAMMA[3]
    f = decompose(Hypercomplex.from_matrix(m))
    expected = np.zeros(16)
    expected[BETA] = 2.0
    np.testing.assert_allclose(f.as_array(), expected, atol=1e-15)


def test_decompose_tolerance_follows_matrix_norm():
    # 大量级场上舍入级的虚部可以接受
    big = compose_psi(FieldPoint(eps=1e8)) + Hypercomplex.unit(5) * 1e-6j
    assert decompose(big).eps == pytest.approx(1e8)
    # 小量级场上同量级的虚部必须拒绝
    small = compose_psi(FieldPoint(eps=1e-20)) + Hypercomplex.unit(5) * 1e-20j
    with pytest.raises(NonRealDecomposition):
        decompose(small)
