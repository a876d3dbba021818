"""Conformal maps c, s, c^{-1}, the sections zeta^+ and the charts on M_{j,l}.

All functions accept Python complex scalars; the kernel-level helpers
(``cmap``, ``smap``, ``sqrt_pair``, ``c_inverse``) also accept numpy arrays.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

# Imaginary parts below this (relative to max(1, |z|)) count as lying on a cut.
CUT_BAND = 1e-15


class BranchCutError(ValueError):
    """Argument lies on a branch cut or outside the domain of a map."""


class SingularDerivativeError(ZeroDivisionError):
    """The coordinate change is evaluated at its derivative pole."""


def cmap(w):
    if np.any(np.asarray(w) == 0):
        raise ValueError("c(w) is undefined at w = 0")
    return (w + 1 / w) / 2


def smap(w):
    if np.any(np.asarray(w) == 0):
        raise ValueError("s(w) is undefined at w = 0")
    return (w - 1 / w) / 2


def _on_cut(z, lo: float, hi: float) -> bool:
    """Whether complex scalar z lies in the real interval [lo, hi] up to the band."""
    z = complex(z)
    band = CUT_BAND * max(1.0, abs(z))
    return abs(z.imag) <= band and lo <= z.real <= hi


def branch_sqrt(z: complex) -> complex:
    """Principal square root with the cut (-inf, 0] treated as an error."""
    if _on_cut(z, -math.inf, 0.0):
        raise BranchCutError(f"{z} lies on the cut (-inf, 0]")
    return cmath.sqrt(z)


def sqrt_pair(z):
    """The holomorphic extension of sqrt(z+1)*sqrt(z-1) to C minus [-1, 1].

    In the closed right half-plane the principal roots are used directly; the
    left half-plane is reached through the odd symmetry
    sqrt(-z+1)sqrt(-z-1) = -sqrt(z+1)sqrt(z-1), which avoids the spurious
    jumps of the principal roots along (-inf, -1).
    """
    if np.ndim(z):
        z = np.asarray(z, dtype=complex)
        if np.any((np.abs(z.imag) <= CUT_BAND * np.maximum(1, np.abs(z))) & (np.abs(z.real) <= 1)):
            raise BranchCutError("argument on [-1, 1]")
        sgn = np.where(z.real >= 0, 1.0, -1.0)
        u = sgn * z
        return sgn * np.sqrt(u + 1) * np.sqrt(u - 1)
    if _on_cut(z, -1.0, 1.0):
        raise BranchCutError(f"{z} lies on [-1, 1]")
    z = complex(z)
    if z.real >= 0:
        return cmath.sqrt(z + 1) * cmath.sqrt(z - 1)
    return -cmath.sqrt(-z + 1) * cmath.sqrt(-z - 1)


def c_inverse(z):
    """Inverse of c onto the punctured unit disc."""
    return z - sqrt_pair(z)


def s_c_inverse(z):
    return -sqrt_pair(z)


def _L(L_sq) -> float:
    return math.sqrt(L_sq)


def zeta_plus(L_sq, z: complex) -> complex:
    """The section sqrt(iL/z + 1) sqrt(iL/z - 1) of M: zeta^2 = (iL/z)^2 - 1.

    On the negative imaginary axis the value is the limit from Re z > 0.
    """
    z = complex(z)
    if z == 0:
        raise ValueError("zeta_plus is undefined at z = 0")
    L = _L(L_sq)
    if z.real == 0 and z.imag < 0:
        ratio = L / -z.imag
        if ratio >= 1:
            # iL/z = -ratio is real and left of -1: no limit is needed
            return -math.sqrt(ratio * ratio - 1) + 0j
        return 1j * math.sqrt(1 - ratio * ratio)
    return complex(sqrt_pair(1j * L / z))


def chart_inverse(L_sq, zeta: complex, sign: int) -> complex:
    """Recover z = sign * i L / sqrt(zeta^2 + 1) from a chart coordinate."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    zeta = complex(zeta)
    u = zeta * zeta + 1
    if u == 0:
        raise ValueError("zeta^2 = -1 is outside the chart")
    return sign * 1j * _L(L_sq) / branch_sqrt(u)


@dataclass(frozen=True)
class ChartPoint:
    branch_L_sq: Fraction
    zeta: complex
    half_plane_sign: int

    def __post_init__(self):
        z = complex(self.zeta)
        if abs(z.real) <= CUT_BAND and abs(z.imag) >= 1:
            raise BranchCutError("chart coordinate outside the chart codomain")
        if self.half_plane_sign not in (1, -1):
            raise ValueError("half_plane_sign must be +1 or -1")

    @property
    def z(self) -> complex:
        return chart_inverse(self.branch_L_sq, self.zeta, self.half_plane_sign)


@dataclass(frozen=True)
class SignVector:
    eps: tuple[int, ...]

    def __post_init__(self):
        if any(e not in (1, -1) for e in self.eps):
            raise ValueError("sign vector entries must be +1 or -1")

    def __getitem__(self, i: int) -> int:
        return self.eps[i]

    def __len__(self) -> int:
        return len(self.eps)


def coord_map(L_m_sq, L_l_sq, eps_m: int, zeta_l):
    """zeta_m as a holomorphic function of zeta_l in the lower charts.

    With z = -i L_l / sqrt(zeta_l^2 + 1) this is eps_m * zeta_m^+(z), written
    as eps_m * i * sqrt(1 - (L_m^2/L_l^2)(zeta_l^2 + 1)) so that it stays
    holomorphic across the negative imaginary axis beyond L_m.
    """
    ratio = Fraction(L_m_sq) / Fraction(L_l_sq)
    return eps_m * 1j * np.sqrt(1 - float(ratio) * (np.asarray(zeta_l, dtype=complex) ** 2 + 1))


def coord_change(L_m_sq, L_l_sq, eps_m: int, eps_l: int, zeta_l: complex) -> tuple[complex, complex]:
    """Coordinate change phi from the lower chart of M_l to that of M_m.

    ``zeta_l`` already carries the sheet sign ``eps_l``; the argument is kept
    so callers can pass the sign vector entries alongside the point.
    """
    if eps_m not in (1, -1) or eps_l not in (1, -1):
        raise ValueError("signs must be +1 or -1")
    zeta_l = complex(zeta_l)
    ratio = float(Fraction(L_m_sq) / Fraction(L_l_sq))
    # zeta_m^2 = -(radicand); test it directly since sqrt amplifies rounding
    if abs(1 - ratio * (zeta_l * zeta_l + 1)) < 1e-13:
        raise SingularDerivativeError("|z|^2 = L_m^2: the coordinate change derivative has a pole")
    zeta_m = complex(coord_map(L_m_sq, L_l_sq, eps_m, zeta_l))
    return zeta_m, ratio * zeta_l / zeta_m


def resonance_coordinate(L_sq, z_abs_sq, eps: int) -> complex:
    """Chart coordinate eps * zeta^+(-i|z|) of the point above z = -i|z|."""
    return eps * 1j * math.sqrt(1 - float(Fraction(L_sq) / Fraction(z_abs_sq)))
