#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Dirac 矩阵超复数代数模块
由 γ 矩阵乘积张成的 16 单元数系、把 16 个场分量放到基元上的拟设，
以及 Dirac 算子作用后逐项得到 16 个一阶场方程的校验
"""

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import NonRealDecomposition
from .field_model import FieldPoint, FieldJet

logger = logging.getLogger(__name__)

ETA = np.diag([1.0, -1.0, -1.0, -1.0])

_SIGMA = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
_I2 = np.eye(2, dtype=complex)
_Z2 = np.zeros((2, 2), dtype=complex)

# Dirac 表示
GAMMA = (
    np.block([[_I2, _Z2], [_Z2, -_I2]]),
    *(np.block([[_Z2, s], [-s, _Z2]]) for s in _SIGMA),
)

# 各基元对应的 γ 下标，按拟设中出现的顺序
_BASIS_INDICES: Tuple[Tuple[int, ...], ...] = (
    (),
    (0,), (1,), (2,), (3,),
    (0, 1), (0, 2), (0, 3),
    (2, 3), (3, 1), (1, 2),
    (1, 2, 3), (0, 2, 3), (0, 3, 1), (0, 1, 2),
    (0, 1, 2, 3),
)

BASIS_LABELS = tuple(
    "I" if not idx else "".join(f"g{i}" for i in idx) for idx in _BASIS_INDICES
)

# 拟设中系数带 i 的基元
SLOT_I_FACTORS = np.array([1, 1j, 1j, 1j, 1j, 1, 1, 1, 1, 1, 1, 1j, 1j, 1j, 1j, 1], dtype=complex)

_BIVECTOR_PAIRS = _BASIS_INDICES[5:11]


def _product(indices: Sequence[int]) -> np.ndarray:
    m = np.eye(4, dtype=complex)
    for i in indices:
        m = m @ GAMMA[i]
    return m


BASIS = tuple(_product(idx) for idx in _BASIS_INDICES)
OMEGA = BASIS[15]


def basis_matrix(i: int) -> np.ndarray:
    """第 i 个基元的 4x4 矩阵"""
    return BASIS[i].copy()


def _project(m: np.ndarray) -> np.ndarray:
    # 基元矩阵均为幺正矩阵，Tr(G^† G) = 4
    return np.array([np.trace(g.conj().T @ m) / 4.0 for g in BASIS])


@lru_cache(maxsize=1)
def structure_constants() -> Tuple[np.ndarray, np.ndarray]:
    """
    基元乘法表：BASIS[a] @ BASIS[b] = sign[a, b] * BASIS[index[a, b]]

    Returns:
        (sign, index)，sign 取 +1, -1, +i, -i
    """
    sign = np.zeros((16, 16), dtype=complex)
    index = np.zeros((16, 16), dtype=int)
    for a, b in itertools.product(range(16), repeat=2):
        c = _project(BASIS[a] @ BASIS[b])
        k = int(np.argmax(np.abs(c)))
        s = complex(np.round(c[k].real), np.round(c[k].imag))
        if abs(c[k] - s) > 1e-12 or np.count_nonzero(np.abs(c) > 1e-12) != 1:
            raise ArithmeticError(f"基元乘积 {BASIS_LABELS[a]}*{BASIS_LABELS[b]} 不封闭")
        sign[a, b] = s
        index[a, b] = k
    logger.debug("结构常数表已生成")
    return sign, index


@dataclass(frozen=True, eq=False)
class Hypercomplex:
    """基元上的 16 个复系数"""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).reshape(16)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zero(cls) -> "Hypercomplex":
        return cls(np.zeros(16, dtype=complex))

    @classmethod
    def unit(cls, i: int) -> "Hypercomplex":
        c = np.zeros(16, dtype=complex)
        c[i] = 1.0
        return cls(c)

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "Hypercomplex":
        return cls(_project(np.asarray(m, dtype=complex)))

    def matrix(self) -> np.ndarray:
        return np.einsum("i,ijk->jk", self.coeffs, np.array(BASIS))

    def __add__(self, other: "Hypercomplex") -> "Hypercomplex":
        return Hypercomplex(self.coeffs + other.coeffs)

    def __sub__(self, other: "Hypercomplex") -> "Hypercomplex":
        return Hypercomplex(self.coeffs - other.coeffs)

    def __mul__(self, scalar: complex) -> "Hypercomplex":
        return Hypercomplex(self.coeffs * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other: "Hypercomplex") -> "Hypercomplex":
        return multiply(self, other)

    def allclose(self, other: "Hypercomplex", atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.coeffs, other.coeffs, rtol=0.0, atol=atol))


def multiply(a: Hypercomplex, b: Hypercomplex) -> Hypercomplex:
    """
    超复数乘法，结果重新展开到基元上

    Args:
        a: 左因子
        b: 右因子

    Returns:
        a * b
    """
    sign, index = structure_constants()
    out = np.zeros(16, dtype=complex)
    np.add.at(out, index, sign * np.outer(a.coeffs, b.coeffs))
    return Hypercomplex(out)


def _lower(v0: float, v: np.ndarray) -> np.ndarray:
    return np.concatenate(([v0], -np.asarray(v, dtype=float)))


def _slot_values(f: np.ndarray) -> np.ndarray:
    """扁平场数组在各基元上的实系数（未乘 i）"""
    fp = FieldPoint.from_array(f)
    out = np.empty(16)
    out[0] = fp.eps
    out[1:5] = _lower(fp.V0, fp.V)
    out[5:8] = fp.E
    out[8:11] = -fp.cB
    out[11:15] = _lower(fp.U0, fp.U)
    out[15] = fp.beta
    return out


def compose_psi(f: FieldPoint) -> Hypercomplex:
    """
    把场放到基元上：ε I + i V_ν γ^ν + F_0k γ^0γ^k + ... + β γ^0γ^1γ^2γ^3

    Args:
        f: 某一事件点的场

    Returns:
        psi
    """
    return Hypercomplex(_slot_values(f.as_array()) * SLOT_I_FACTORS)


def _real_slots(h: Hypercomplex, tol: float = 1e-12, scale: Optional[float] = None) -> np.ndarray:
    raw = h.coeffs / SLOT_I_FACTORS
    # 虚部相对矩阵范数判断，与场的量级无关
    scale = np.linalg.norm(h.matrix(), 2) if scale is None else scale
    bad = np.abs(raw.imag) > tol * scale
    if np.any(bad):
        labels = [BASIS_LABELS[i] for i in np.flatnonzero(bad)]
        raise NonRealDecomposition(f"场分量出现虚部: {', '.join(labels)}")
    return raw.real


def decompose(h: Hypercomplex) -> FieldPoint:
    """
    compose_psi 的逆

    Args:
        h: compose_psi 实数像中的超复数

    Returns:
        场

    Raises:
        NonRealDecomposition: 某个场分量为复数
    """
    s = _real_slots(h)
    return FieldPoint(
        eps=float(s[0]),
        beta=float(s[15]),
        E=s[5:8].copy(),
        cB=-s[8:11],
        V0=float(s[1]),
        V=-s[2:5],
        U0=float(s[11]),
        U=-s[12:15],
    )


def dirac_residual(jet: FieldJet, kappa: float) -> np.ndarray:
    """
    对拟设 psi 作用 (i γ^ν ∂_ν − κ)，读出 16 个基元系数

    Args:
        jet: 场及其导数
        kappa: Compton 波数

    Returns:
        16 个实系数（已去掉 i 因子）
    """
    d = jet.derivatives()
    total = compose_psi(jet.value) * (-kappa)
    scale = np.linalg.norm(total.matrix(), 2)
    for nu in range(4):
        term = multiply(Hypercomplex.unit(1 + nu), compose_psi(FieldPoint.from_array(d[nu]))) * 1j
        scale += np.linalg.norm(term.matrix(), 2)
        total = total + term
    # 各项相消时以各项范数之和为尺度
    return _real_slots(total, scale=scale)


@lru_cache(maxsize=1)
def _levi_civita() -> np.ndarray:
    eps = np.zeros((4, 4, 4, 4))
    for perm in itertools.permutations(range(4)):
        inversions = sum(1 for i, j in itertools.combinations(range(4), 2) if perm[i] > perm[j])
        eps[perm] = -1.0 if inversions % 2 else 1.0
    return eps


def _tensor_parts(f: np.ndarray):
    """扁平场数组的 (ε, β, V_ν, U_ν, F_μν)，指标均为下标"""
    fp = FieldPoint.from_array(f)
    F = np.zeros((4, 4))
    F[0, 1:] = fp.E
    F[2, 3], F[3, 1], F[1, 2] = -fp.cB
    F = F - F.T
    return fp.eps, fp.beta, _lower(fp.V0, fp.V), _lower(fp.U0, fp.U), F


def system_lhs_4d(jet: FieldJet, kappa: float) -> np.ndarray:
    """
    按基元顺序直接计算 16 个一阶方程的左端

    I 上为 V 散度方程取负，矢量基元上为下标形式的 ε 方程，双矢量基元上为
    V-U 旋度方程，三重积上为下标形式的 β 方程，最后一项为 U 散度方程取负

    Args:
        jet: 场及其导数（下标 0 为 x^0 = ct）
        kappa: Compton 波数

    Returns:
        16 个实数
    """
    lc = _levi_civita()
    eta = np.diag(ETA)
    eps, beta, V, U, F = _tensor_parts(jet.value.as_array())
    parts = [_tensor_parts(row) for row in jet.derivatives()]
    d_eps = np.array([p[0] for p in parts])
    d_beta = np.array([p[1] for p in parts])
    dV = np.array([p[2] for p in parts])        # dV[mu, nu] = ∂_mu V_nu
    dU = np.array([p[3] for p in parts])
    dF = np.array([p[4] for p in parts])        # dF[mu, a, b] = ∂_mu F_ab

    out = np.empty(16)
    out[0] = -(np.einsum("nn,n->", dV, eta) + kappa * eps)
    # ∂_mu F_nu^mu = η^mumu ∂_mu F_nu,mu
    div_F = np.einsum("mnm,m->n", dF, eta)
    out[1:5] = d_eps - div_F - kappa * V
    # ε^{abgd} ∂_d U_g
    dual_dU = np.einsum("abgd,dg->ab", lc, dU)
    for slot, (a, b) in enumerate(_BIVECTOR_PAIRS, start=5):
        out[slot] = dV[b, a] - dV[a, b] + eta[a] * eta[b] * dual_dU[a, b] - kappa * F[a, b]
    # ½ ε^{nbgd} ∂_b F_gd
    dual_dF = 0.5 * np.einsum("nbgd,bgd->n", lc, dF)
    out[11:15] = d_beta + eta * dual_dF - kappa * U
    out[15] = -(np.einsum("nn,n->", dU, eta) + kappa * beta)
    return out
