"""Exact enumeration of branch points, resonances and residue constants."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

from .plancherel import eval_P
from .spaces import ExtensionClass, ProductSpace, RankOneSpace


class EmptyLatticeError(ValueError):
    """The factor has even m_beta, so its pole lattice is empty."""


class CaseHypothesisError(ValueError):
    """index_bound was called outside the hypotheses of the counting lemma."""


@dataclass(frozen=True, order=True)
class LatticePoint:
    L_sq: Fraction
    factor: int
    ell: int


def lattice_point(p: ProductSpace, factor: int, ell: int) -> LatticePoint:
    s = p.factor(factor)
    if not s.odd:
        raise EmptyLatticeError(f"factor {factor} ({s.label}) has even m_beta: no lattice points")
    if ell < 0:
        raise ValueError("ell must be nonnegative")
    return LatticePoint(s.b_sq * (s.rho_beta + ell) ** 2, factor, ell)


def _lattice_upto(p: ProductSpace, factor: int, R_sq: Fraction) -> list[LatticePoint]:
    out = []
    ell = 0
    while True:
        pt = lattice_point(p, factor, ell)
        if pt.L_sq > R_sq:
            return out
        out.append(pt)
        ell += 1


@dataclass(frozen=True)
class BranchPoint:
    L_sq: Fraction
    sources: tuple[LatticePoint, ...]


def branch_points(p: ProductSpace, R_sq) -> list[BranchPoint]:
    if p.extension_class is ExtensionClass.BothEvenHolomorphicLog:
        raise ValueError("both factors have even m_beta: there are no branch points")
    R_sq = Fraction(R_sq)
    groups: dict[Fraction, list[LatticePoint]] = defaultdict(list)
    for j in (1, 2):
        if p.factor(j).odd:
            for pt in _lattice_upto(p, j, R_sq):
                groups[pt.L_sq].append(pt)
    return [BranchPoint(k, tuple(groups[k])) for k in sorted(groups)]


@dataclass(frozen=True)
class QuadraticNumber:
    """Exact q1*b1 + q2*b2 with b_j = sqrt(b_j^2)."""

    q1: Fraction
    q2: Fraction
    b1_sq: Fraction = Fraction(1)
    b2_sq: Fraction = Fraction(1)

    def _check(self, other: "QuadraticNumber"):
        if (self.b1_sq, self.b2_sq) != (other.b1_sq, other.b2_sq):
            raise ValueError("quadratic numbers over different bases")

    def __add__(self, other: "QuadraticNumber") -> "QuadraticNumber":
        self._check(other)
        return QuadraticNumber(self.q1 + other.q1, self.q2 + other.q2, self.b1_sq, self.b2_sq)

    def scale(self, c) -> "QuadraticNumber":
        c = Fraction(c)
        return QuadraticNumber(self.q1 * c, self.q2 * c, self.b1_sq, self.b2_sq)

    def __float__(self) -> float:
        return float(self.q1) * math.sqrt(self.b1_sq) + float(self.q2) * math.sqrt(self.b2_sq)

    def is_positive(self) -> bool:
        # both basis values are positive, so nonnegative coefficients decide it
        if self.q1 >= 0 and self.q2 >= 0:
            return self.q1 > 0 or self.q2 > 0
        if self.q1 <= 0 and self.q2 <= 0:
            return False
        # mixed signs: compare squares exactly
        a, b = self.q1**2 * self.b1_sq, self.q2**2 * self.b2_sq
        return a > b if self.q1 > 0 else b > a

    def as_rational(self) -> Fraction | None:
        """Exact rational value when both b_j^2 are perfect squares."""
        roots = []
        for v in (self.b1_sq, self.b2_sq):
            n, d = math.isqrt(v.numerator), math.isqrt(v.denominator)
            if n * n != v.numerator or d * d != v.denominator:
                return None
            roots.append(Fraction(n, d))
        return self.q1 * roots[0] + self.q2 * roots[1]

    def to_json(self) -> dict:
        return {"q1": str(self.q1), "q2": str(self.q2)}


def _require_both_odd(p: ProductSpace):
    for j in (1, 2):
        if not p.factor(j).odd:
            raise EmptyLatticeError(f"factor {j} ({p.factor(j).label}) has even m_beta")


def residue_constant(p: ProductSpace, ell1: int, ell2: int) -> QuadraticNumber:
    """C = p1(iL1) p2(iL2) (b1 L2/L1 + b2 L1/L2) in the basis {b1, b2}."""
    _require_both_odd(p)
    s1, s2 = p.s1, p.s2
    r1, r2 = s1.rho_beta + ell1, s2.rho_beta + ell2
    # p_j(i L_j) = P_j(-(rho_j + l_j)) = P_j(rho_j + l_j) since P_j is even
    pp = eval_P(s1, r1) * eval_P(s2, r2)
    # b1 L2/L1 = b2 r2/r1 and b2 L1/L2 = b1 r1/r2
    return QuadraticNumber(pp * r1 / r2, pp * r2 / r1, s1.b_sq, s2.b_sq)


@dataclass(frozen=True)
class Summand:
    ell1: int
    ell2: int
    C: QuadraticNumber

    @property
    def weight(self) -> tuple[int, int]:
        """Coefficients of the highest restricted weight lambda(l1, l2) - rho."""
        return (self.ell1, self.ell2)


@dataclass(frozen=True)
class Resonance:
    z_abs_sq: Fraction
    summands: tuple[Summand, ...]

    @property
    def S_k(self) -> tuple[tuple[int, int], ...]:
        return tuple((s.ell1, s.ell2) for s in self.summands)

    @property
    def z(self) -> complex:
        return -1j * math.sqrt(self.z_abs_sq)


def enumerate_resonances(p: ProductSpace, R_sq) -> list[Resonance]:
    if p.extension_class is not ExtensionClass.BothOddMeromorphic:
        return []
    R_sq = Fraction(R_sq)
    first = _lattice_upto(p, 1, R_sq)
    second = _lattice_upto(p, 2, R_sq)
    groups: dict[Fraction, list[tuple[int, int]]] = defaultdict(list)
    for a in first:
        for b in second:
            key = a.L_sq + b.L_sq
            if key > R_sq:
                break
            groups[key].append((a.ell, b.ell))
    out = []
    for key in sorted(groups):
        pairs = sorted(groups[key])
        out.append(Resonance(key, tuple(Summand(l1, l2, residue_constant(p, l1, l2)) for l1, l2 in pairs)))
    return out


def nth_resonance(p: ProductSpace, k: int) -> Resonance:
    """The k-th resonance (0-based) by increasing |z|^2."""
    if p.extension_class is not ExtensionClass.BothOddMeromorphic:
        raise IndexError("this product has no resonances")
    if k < 0:
        raise IndexError("resonance index must be nonnegative")
    R = p.rho_X_sq * 4
    while True:
        res = enumerate_resonances(p, R)
        if len(res) > k:
            return res[k]
        R *= 4


def resonance_at(p: ProductSpace, z_abs_sq) -> Resonance:
    z_abs_sq = Fraction(z_abs_sq)
    for r in enumerate_resonances(p, z_abs_sq):
        if r.z_abs_sq == z_abs_sq:
            return r
    raise IndexError(f"no resonance with |z|^2 = {z_abs_sq}")


@dataclass(frozen=True)
class SummandReport:
    z_abs_sq: Fraction
    summands: tuple[Summand, ...]

    @property
    def count(self) -> int:
        return len(self.summands)


def residue_summands(p: ProductSpace, k: int | None = None, z_abs_sq=None) -> SummandReport:
    """Decomposition data of the residue operator at one resonance.

    Select the resonance either by index ``k`` or by exact ``z_abs_sq``.
    """
    if (k is None) == (z_abs_sq is None):
        raise ValueError("give exactly one of k and z_abs_sq")
    res = nth_resonance(p, k) if k is not None else resonance_at(p, z_abs_sq)
    return SummandReport(res.z_abs_sq, res.summands)


def _floor_nu(s: RankOneSpace, v: Fraction) -> int:
    """floor(v / b) computed exactly via squares."""
    n = math.isqrt(int(v * v / s.b_sq))
    while (n + 1) ** 2 * s.b_sq <= v * v:
        n += 1
    while n > 0 and n * n * s.b_sq > v * v:
        n -= 1
    return n


def index_bound(s: RankOneSpace, v, cr) -> int:
    """Largest l with rho + l < c(r) v / b, via the floor formulas of the counting lemma."""
    v, cr = Fraction(v), Fraction(cr)
    if not s.odd:
        raise EmptyLatticeError(f"{s.label} has even m_beta")
    if cr <= 1:
        raise CaseHypothesisError("c(r) must exceed 1")
    if v * v < s.b_sq * s.rho_beta**2 or v <= 0:
        raise CaseHypothesisError("v must satisfy v >= b * rho_beta")
    fl = _floor_nu(s, v)
    rho = s.rho_beta
    # "x < cr * nu" with nu = v/b is tested as x^2 * b^2 < (cr v)^2 for x > 0
    crv_sq = (cr * v) ** 2

    def below(x: Fraction) -> bool:
        return x * x * s.b_sq < crv_sq

    if rho.denominator == 1:
        if below(Fraction(fl + 1)):
            raise CaseHypothesisError("need c(r) < (floor(nu) + 1)/nu")
        return fl - int(rho)
    half = Fraction(fl) + Fraction(1, 2)
    if half * half * s.b_sq <= v * v:
        if below(half + 1):
            raise CaseHypothesisError("need c(r) < (floor(nu) + 3/2)/nu")
        return fl - math.floor(rho)
    if below(half):
        raise CaseHypothesisError("need c(r) < (floor(nu) + 1/2)/nu")
    return fl - math.floor(rho) - 1


def index_bound_bruteforce(s: RankOneSpace, v, cr) -> int:
    """Count of l >= 0 with (rho + l) < cr * v / b, minus one."""
    v, cr = Fraction(v), Fraction(cr)
    crv_sq = (cr * v) ** 2
    count = 0
    while (s.rho_beta + count) ** 2 * s.b_sq < crv_sq:
        count += 1
    return count - 1
