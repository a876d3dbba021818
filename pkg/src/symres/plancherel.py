"""Rank-one Plancherel density factors P, Q, p, q and a gamma-function oracle."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np
from scipy.special import loggamma

from .spaces import RankOneSpace


class PoleError(ArithmeticError):
    """Evaluation hit a pole of q; ``point`` is the offending argument."""

    def __init__(self, message: str, point):
        super().__init__(message)
        self.point = point


@dataclass(frozen=True)
class RationalPolynomial:
    """Polynomial with exact rational coefficients in ascending degree."""

    coefficients: tuple[Fraction, ...]

    def __post_init__(self):
        coeffs = [Fraction(c) for c in self.coefficients]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coefficients", tuple(coeffs) or (Fraction(0),))

    @classmethod
    def from_roots(cls, roots: Iterable[Fraction]) -> "RationalPolynomial":
        poly = cls((Fraction(1),))
        for r in roots:
            poly = poly * cls((-Fraction(r), Fraction(1)))
        return poly

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __mul__(self, other: "RationalPolynomial") -> "RationalPolynomial":
        a, b = self.coefficients, other.coefficients
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return RationalPolynomial(tuple(out))

    def __call__(self, x):
        """Horner evaluation; exact for Fractions, vectorised for numpy input."""
        if isinstance(x, (int, Fraction)):
            acc = Fraction(0)
            for c in reversed(self.coefficients):
                acc = acc * x + c
            return acc
        acc = np.zeros_like(np.asarray(x, dtype=complex))
        for c in reversed(self.coefficients):
            acc = acc * x + float(c)
        return acc if np.ndim(acc) else complex(acc)

    def is_even(self) -> bool:
        return all(c == 0 for c in self.coefficients[1::2])

    def is_odd(self) -> bool:
        return all(c == 0 for c in self.coefficients[0::2])

    def format(self) -> list[str]:
        return [str(c) for c in self.coefficients]


def _P_even(rho: Fraction) -> RationalPolynomial:
    # prod_{k=0}^{2(rho-1)} (x - (rho-1) + k)
    top = int(2 * (rho - 1))
    return RationalPolynomial.from_roots(rho - 1 - k for k in range(top + 1))


def P_forms_odd(s: RankOneSpace) -> tuple[RationalPolynomial, RationalPolynomial]:
    """The two product forms of P for odd m_beta; they expand identically."""
    rho, mh, mf = s.rho_beta, s.m_half, s.m_full
    first = RationalPolynomial.from_roots(rho - 1 - k for k in range(int(2 * rho - 2) + 1))
    first = first * RationalPolynomial.from_roots(
        Fraction(mh, 4) - Fraction(1, 2) - k for k in range(mh // 2)
    )
    lo = (mf + 1) // 2
    second = RationalPolynomial.from_roots(rho - k for k in range(lo, int(2 * rho) - lo + 1))
    second = second * RationalPolynomial.from_roots(rho - k for k in range(1, int(2 * rho)))
    return first, second


def build_P(s: RankOneSpace) -> RationalPolynomial:
    if not s.odd:
        return _P_even(s.rho_beta)
    first, second = P_forms_odd(s)
    if first != second:
        raise AssertionError(f"product forms of P disagree for {s.label}")
    return first


@dataclass(frozen=True)
class DensityProfile:
    space: RankOneSpace
    P: RationalPolynomial
    has_cot: bool


_PROFILE_CACHE: dict[RankOneSpace, DensityProfile] = {}


def profile(s: RankOneSpace) -> DensityProfile:
    prof = _PROFILE_CACHE.get(s)
    if prof is None:
        prof = DensityProfile(s, build_P(s), s.odd)
        _PROFILE_CACHE[s] = prof
    return prof


# Arguments within this distance of an integer count as a cotangent pole.
POLE_TOL = 1e-12


def cot_pi(u):
    """cot(pi*u) for complex u, stable for large imaginary parts."""
    u = np.asarray(u, dtype=complex)
    near = np.abs(u - np.round(u.real)) < POLE_TOL
    if np.any(near):
        raise PoleError("cotangent pole", complex(u[near].flat[0]))
    u = u - np.round(u.real)  # period 1: keeps half-integer zeros exact
    upper = u.imag >= 0
    # cot(t) = i(E+1)/(E-1) with E = exp(2it); use exp(-2it) in the lower half-plane
    E = np.exp(np.where(upper, 2j, -2j) * np.pi * u)
    out = np.where(upper, 1j * (E + 1) / (E - 1), 1j * (1 + E) / (1 - E))
    return out if out.ndim else complex(out)


def eval_P(s: RankOneSpace, x):
    return profile(s).P(x)


def eval_Q(s: RankOneSpace, x):
    if not s.odd:
        return np.ones_like(np.asarray(x, dtype=complex)) if np.ndim(x) else 1.0 + 0j
    try:
        return cot_pi(np.asarray(x, dtype=complex) - float(s.rho_beta))
    except PoleError as exc:
        raise PoleError(f"q has a pole at the lattice point {exc.point + float(s.rho_beta)}",
                        exc.point + float(s.rho_beta)) from None


def eval_p(s: RankOneSpace, x):
    """p(x) = P(i x / b)."""
    return eval_P(s, 1j * np.asarray(x) / s.b if np.ndim(x) else 1j * complex(x) / s.b)


def eval_q(s: RankOneSpace, x):
    """q(x) = Q(i x / b); identically 1 when m_beta is even."""
    arg = 1j * np.asarray(x) / s.b if np.ndim(x) else 1j * complex(x) / s.b
    try:
        return eval_Q(s, arg)
    except PoleError as exc:
        # report the point in the x variable, i.e. a lattice point of i*b*(rho + Z)
        raise PoleError(f"q pole at x = {-1j * s.b * exc.point}", -1j * s.b * exc.point) from None


def _u_cot_pi_u(u):
    """u * cot(pi u), regular at u = 0."""
    u = np.asarray(u, dtype=complex)
    small = np.abs(u) < 1e-3
    t2 = (np.pi * np.where(small, u, 0)) ** 2
    series = (1 - t2 / 3 - t2 * t2 / 45 - 2 * t2**3 / 945) / np.pi
    safe = np.where(small, 0.5, u)
    direct = safe * cot_pi(safe)
    return np.where(small, series, direct)


def _P_over_u(s: RankOneSpace) -> RationalPolynomial:
    P = profile(s).P
    if P.coefficients[0] != 0:
        raise ValueError("P has no root at the origin")
    return RationalPolynomial(P.coefficients[1:])


def eval_pq(s: RankOneSpace, x):
    """p(x) * q(x), continued across the removable point x = 0 for integer rho."""
    scalar = not np.ndim(x)
    u = 1j * np.asarray(x, dtype=complex) / s.b
    if s.odd and s.rho_beta.denominator == 1:
        # P(u) cot(pi(u - rho)) = (P(u)/u) * u cot(pi u) when rho is an integer
        try:
            out = _P_over_u(s)(u) * _u_cot_pi_u(u)
        except PoleError as exc:
            raise PoleError(f"q pole at x = {-1j * s.b * exc.point}", -1j * s.b * exc.point) from None
    else:
        out = eval_p(s, x) * eval_q(s, x)
    out = np.asarray(out, dtype=complex)
    return complex(out) if scalar else out


def density_polyform(s: RankOneSpace, lam: float) -> complex:
    """lambda_beta * P(i lambda_beta) * Q(i lambda_beta), up to the constant c_0."""
    lb = lam / s.b
    return lb * eval_P(s, 1j * lb) * complex(eval_Q(s, 1j * lb))


def density_gamma(s: RankOneSpace, lam: float) -> float:
    """|c(i lambda_beta) c(-i lambda_beta)|^{-1} from the gamma-function c-function."""
    if lam == 0:
        raise ValueError("density_gamma is evaluated at nonzero lambda only")
    y = 1j * lam / s.b
    a = s.m_half / 4 + 0.5
    rho = float(s.rho_beta)

    def log_abs_c(x: complex) -> float:
        # |2^{-2x}| = 1 on the imaginary axis, kept for completeness
        val = -2 * x * np.log(2) + loggamma(2 * x) - loggamma(x + a) - loggamma(x + rho)
        return float(val.real)

    return float(np.exp(-(log_abs_c(y) + log_abs_c(-y))))
