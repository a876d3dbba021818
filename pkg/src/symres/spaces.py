"""Rank-one symmetric spaces of the noncompact type and their direct products.

Every quantity here is exact: multiplicities are integers, ``rho_beta`` and
``b_sq`` are :class:`fractions.Fraction` values.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction


class Family(enum.Enum):
    SO_odd = "SO_odd"  # SO_0(2n+1, 1)
    SO_even = "SO_even"  # SO_0(2n, 1)
    SU = "SU"
    Sp = "Sp"
    F4 = "F4"


class ExtensionClass(enum.Enum):
    BothEvenHolomorphicLog = "BothEvenHolomorphicLog"
    OneOddHolomorphic = "OneOddHolomorphic"
    BothOddMeromorphic = "BothOddMeromorphic"


class ParameterRangeError(ValueError):
    """Raised when (family, n) lies outside the classification table."""


class SpecParseError(ValueError):
    """Raised for malformed space specifier strings; carries the column."""

    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position} in {text!r}")
        self.text = text
        self.position = position


def _multiplicities(family: Family, n: int) -> tuple[int, int]:
    """Return (m_half, m_full) for one row of the classification table."""
    if family is Family.F4:
        return 8, 7
    if family is Family.SO_odd:
        if n < 1:
            raise ParameterRangeError("SO_0(2n+1,1) requires n >= 1")
        return 0, 2 * n
    if family is Family.SO_even:
        if n < 1:
            raise ParameterRangeError("SO_0(2n,1) requires n >= 1")
        return 0, 2 * n - 1
    if family is Family.SU:
        if n < 2:
            raise ParameterRangeError("SU(n,1) requires n >= 2")
        return 2 * (n - 1), 1
    if family is Family.Sp:
        if n < 2:
            raise ParameterRangeError("Sp(n,1) requires n >= 2")
        return 4 * (n - 1), 3
    raise ParameterRangeError(f"unknown family {family!r}")


@dataclass(frozen=True)
class RankOneSpace:
    family: Family
    n: int
    m_half: int
    m_full: int
    rho_beta: Fraction
    b_sq: Fraction = Fraction(1)

    def __post_init__(self):
        if self.b_sq <= 0:
            raise ParameterRangeError("b_sq must be positive")
        if 2 * self.rho_beta != self.m_full + Fraction(self.m_half, 2):
            raise ValueError("2*rho_beta must equal m_full + m_half/2")
        if self.m_half % 2 or (self.m_half > 0 and self.m_full % 2 == 0):
            raise ValueError("multiplicities violate the table invariants")

    @property
    def odd(self) -> bool:
        """True when m_beta is odd, i.e. the density carries a cotangent."""
        return self.m_full % 2 == 1

    @property
    def b(self) -> float:
        return math.sqrt(self.b_sq)

    @property
    def label(self) -> str:
        if self.family is Family.F4:
            base = "F4"
        elif self.family is Family.SO_odd:
            base = f"SO({2 * self.n + 1},1)"
        elif self.family is Family.SO_even:
            base = f"SO({2 * self.n},1)"
        else:
            base = f"{self.family.value}({self.n},1)"
        if self.b_sq != 1:
            base += f"@b2={self.b_sq}"
        return base

    def __str__(self) -> str:
        return self.label


def build_space(family: Family | str, n: int, b_sq: Fraction | int | str = 1) -> RankOneSpace:
    if isinstance(family, str):
        family = Family(family)
    if family is Family.F4:
        n = 1
    m_half, m_full = _multiplicities(family, n)
    rho = Fraction(m_full) / 2 + Fraction(m_half, 4)
    return RankOneSpace(family, n, m_half, m_full, rho, Fraction(b_sq))


_SPEC_RE = re.compile(r"\s*(SO|SU|Sp|F4)\s*(?:\(\s*(\d+)\s*,\s*1\s*\))?\s*(?:@\s*b2\s*=\s*([^\s]+))?\s*$")


def parse_space(text: str) -> RankOneSpace:
    """Parse specifiers like ``"SU(2,1)"``, ``"SO(4,1)@b2=1/2"`` or ``"F4"``."""
    m = _SPEC_RE.match(text)
    if m is None:
        # locate the first offending column for the error message
        pos = 0
        prefix = re.match(r"\s*(SO|SU|Sp|F4)", text)
        if prefix:
            pos = prefix.end()
        raise SpecParseError("unrecognised space specifier", text, pos)
    name, num, b2 = m.group(1), m.group(2), m.group(3)
    try:
        b_sq = Fraction(b2) if b2 is not None else Fraction(1)
    except (ValueError, ZeroDivisionError):
        raise SpecParseError("invalid b2 value", text, m.start(3)) from None
    if b_sq <= 0:
        raise SpecParseError("b2 must be positive", text, m.start(3))
    if name == "F4":
        if num is not None:
            raise SpecParseError("F4 takes no (p,1) parameter", text, m.start(2))
        return build_space(Family.F4, 1, b_sq)
    if num is None:
        raise SpecParseError("missing (p,1) parameter", text, m.end(1))
    p = int(num)
    if name == "SO":
        if p % 2:
            return build_space(Family.SO_odd, (p - 1) // 2, b_sq)
        return build_space(Family.SO_even, p // 2, b_sq)
    return build_space(Family(name), p, b_sq)


@dataclass(frozen=True)
class ProductSpace:
    s1: RankOneSpace
    s2: RankOneSpace
    rho_X_sq: Fraction = field(init=False)
    L_sq: Fraction | float = field(init=False)
    extension_class: ExtensionClass = field(init=False)

    def __post_init__(self):
        rho_sq = self.s1.b_sq * self.s1.rho_beta**2 + self.s2.b_sq * self.s2.rho_beta**2
        odd = [s.b_sq * s.rho_beta**2 for s in (self.s1, self.s2) if s.odd]
        if len(odd) == 2:
            cls = ExtensionClass.BothOddMeromorphic
        elif len(odd) == 1:
            cls = ExtensionClass.OneOddHolomorphic
        else:
            cls = ExtensionClass.BothEvenHolomorphicLog
        object.__setattr__(self, "rho_X_sq", rho_sq)
        object.__setattr__(self, "L_sq", min(odd) if odd else math.inf)
        object.__setattr__(self, "extension_class", cls)

    def factor(self, j: int) -> RankOneSpace:
        if j == 1:
            return self.s1
        if j == 2:
            return self.s2
        raise ValueError("factor index must be 1 or 2")

    @property
    def label(self) -> str:
        return f"{self.s1.label} x {self.s2.label}"


def build_product(s1: RankOneSpace, s2: RankOneSpace) -> ProductSpace:
    return ProductSpace(s1, s2)


@dataclass(frozen=True)
class ExtensionReport:
    extension_class: ExtensionClass
    statement: str


def classify_extension(p: ProductSpace) -> ExtensionReport:
    cls = p.extension_class
    if cls is ExtensionClass.BothOddMeromorphic:
        text = f"meromorphic extension with at most simple poles on i(-inf, -sqrt({p.L_sq})]"
    elif cls is ExtensionClass.OneOddHolomorphic:
        text = "holomorphic extension across the continuous spectrum: no resonances"
    else:
        text = "extension to a logarithmic surface branched along (-inf, 0]: no resonances"
    return ExtensionReport(cls, text)
