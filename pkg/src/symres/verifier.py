"""Numerical verification of the contour-deformation and residue identities.

A synthetic even entire test function T(mu1, mu2) stands in for the
convolution with spherical functions. Spectral arguments follow the
convention mu_j = i * z * c(.) / b_j, so that at a pole of q_j the test
function is evaluated at the real point rho_j + l_j.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .complexmaps import (
    BranchCutError,
    c_inverse,
    chart_inverse,
    cmap,
    coord_change,
    coord_map,
    resonance_coordinate,
    s_c_inverse,
    smap,
    zeta_plus,
)
from .plancherel import eval_p, eval_pq
from .resonances import (
    branch_points,
    enumerate_resonances,
    lattice_point,
    nth_resonance,
    residue_constant,
)
from .spaces import ExtensionClass, ProductSpace


class IllConditionedWarning(RuntimeWarning):
    """A pole of the integrand sits close enough to the contour to spoil quadrature."""


class ContourCollisionError(ValueError):
    """A lattice pole lies on the deformed contour (admissibility fails)."""


class UnreliableResidueError(ArithmeticError):
    """The residue estimate changed too much when the circle radius was halved."""


class SingularChartError(ValueError):
    """The resonance sits exactly on the branch point of the requested chart."""


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class SpectralTestFunction:
    """Even entire T(mu1, mu2).

    ``kind`` is ``"gaussian"`` (uses ``sigma``) or ``"even_polynomial"``, where
    ``coeffs[a][b]`` multiplies mu1^(2a) * mu2^(2b).
    """

    kind: str = "gaussian"
    sigma: float = 1.0
    coeffs: tuple[tuple[float, ...], ...] = ()

    def __post_init__(self):
        if self.kind == "gaussian":
            if self.sigma <= 0:
                raise ValueError("sigma must be positive")
        elif self.kind == "even_polynomial":
            if not self.coeffs:
                raise ValueError("even_polynomial needs coefficients")
        else:
            raise ValueError(f"unknown test function kind {self.kind!r}")

    def __call__(self, mu1, mu2):
        if self.kind == "gaussian":
            return np.exp(-(mu1 * mu1 + mu2 * mu2) / self.sigma**2)
        x1, x2 = mu1 * mu1, mu2 * mu2
        total = 0
        for a, row in enumerate(self.coeffs):
            for b, c in enumerate(row):
                if c:
                    total = total + c * x1**a * x2**b
        return total


@dataclass(frozen=True)
class KernelContext:
    product: ProductSpace
    test: SpectralTestFunction = field(default_factory=SpectralTestFunction)
    nodes: int = 2048
    delta: float = 1e-3

    def __post_init__(self):
        if self.nodes <= 0 or self.nodes % 2:
            raise ValueError("the node count must be a positive even integer")
        if self.delta <= 0:
            raise ValueError("delta must be positive")

    @property
    def b1(self) -> float:
        return self.product.s1.b

    @property
    def b2(self) -> float:
        return self.product.s2.b


def psi(ctx: KernelContext, z, w):
    return ctx.test(1j * z * cmap(w) / ctx.b1, 1j * z * cmap(-1j * w) / ctx.b2)


_pq = eval_pq


def phi(ctx: KernelContext, z, w):
    s1, s2 = ctx.product.s1, ctx.product.s2
    cw, cw2 = cmap(w), cmap(-1j * w)
    return -(z * z) * cw * smap(w) / w * _pq(s1, z * cw) * _pq(s2, z * cw2)


def _circle_integral(ctx: KernelContext, z: complex, radius: float, nodes: int | None = None) -> complex:
    M = nodes or ctx.nodes
    w = radius * np.exp(2j * np.pi * np.arange(M) / M)
    vals = psi(ctx, z, w) * phi(ctx, z, w) * 1j * w
    return complex(vals.sum() * 2 * np.pi / M)


def _pole_sources(ctx: KernelContext, z: complex, count: int = 64):
    """Yield (factor, ell, w) for the inner poles w of phi_z, w = c^{-1}(iL/z) (times i for factor 2)."""
    for j in (1, 2):
        if not ctx.product.factor(j).odd:
            continue
        for ell in range(count):
            L = math.sqrt(lattice_point(ctx.product, j, ell).L_sq)
            try:
                w = complex(c_inverse(1j * L / z))
            except BranchCutError:
                yield j, ell, None
                continue
            yield j, ell, (w if j == 1 else 1j * w)
            if abs(w) < 1e-3:
                break


def _warn_if_close(ctx: KernelContext, z: complex, radius: float):
    # trapezoid error decays like (|w|/r)^M or (r/|w|)^M for a pole at w
    M = ctx.nodes
    for j, ell, w in _pole_sources(ctx, z):
        if w is None:
            continue
        gap = abs(math.log(abs(w) / radius))
        if M * gap < 36:
            warnings.warn(
                f"pole of the integrand (factor {j}, l={ell}) at |w|={abs(w):.3g} is within "
                f"numerical reach of the contour |w|={radius}",
                IllConditionedWarning,
                stacklevel=3,
            )
            return


def F_direct(ctx: KernelContext, z: complex) -> complex:
    z = complex(z)
    _warn_if_close(ctx, z, 1.0)
    return _circle_integral(ctx, z, 1.0)


def G_closed(ctx: KernelContext, factor: int, ell: int, z: complex) -> complex:
    """Closed form of psi_z * Res phi_z at the inner pole attached to (factor, ell)."""
    p = ctx.product
    s = p.factor(factor)
    other = p.factor(3 - factor)
    z = complex(z)
    if z == 0:
        raise BranchCutError("z = 0 is excluded")
    L = math.sqrt(lattice_point(p, factor, ell).L_sq)
    a = 1j * L / z
    w = complex(c_inverse(a))
    x = 1j * z * complex(s_c_inverse(a))
    C = s.b / math.pi * L * eval_p(s, 1j * L)
    if factor == 1:
        return complex(C * psi(ctx, z, w) * _pq(other, x))
    return complex(C * psi(ctx, z, 1j * w) * _pq(other, x))


def residues_enclosed(ctx: KernelContext, z: complex, r: float, guard: float = 1e-9):
    """(factor, ell) pairs whose inner poles lie in the annulus r < |w| < 1."""
    out = []
    for j, ell, w in _pole_sources(ctx, z):
        if w is None:
            raise ContourCollisionError(f"lattice point (factor {j}, l={ell}) lies on z * [-1, 1]")
        if abs(abs(w) - r) <= guard or abs(abs(w) - 1) <= guard:
            raise ContourCollisionError(
                f"lattice point (factor {j}, l={ell}) lies on the image of the contour (|w|={abs(w)})"
            )
        if abs(w) > r:
            out.append((j, ell))
    return out


def default_radius(ctx: KernelContext, z: complex) -> float:
    """A radius r in (r_min, 1) that stays as far as possible from every pole modulus.

    r_min solves c(r_min) = (rho + m + 1/2)/(rho + m), the largest value the
    index count allows; inside (r_min, 1) the widest gap in log|w| is bisected.
    """
    v = abs(complex(z))
    cr = None
    for j in (1, 2):
        s = ctx.product.factor(j)
        if not s.odd:
            continue
        m = max(0, math.floor(v / s.b - float(s.rho_beta)))
        target = (float(s.rho_beta) + m + 0.5) / (float(s.rho_beta) + m)
        cr = target if cr is None else min(cr, target)
    if cr is None:
        return 0.5
    r_min = cr - math.sqrt(cr * cr - 1)
    cuts = sorted(
        abs(w) for _, _, w in _pole_sources(ctx, z) if w is not None and r_min < abs(w) < 1
    )
    edges = [r_min, *cuts, 1.0]
    lo, hi = max(zip(edges, edges[1:]), key=lambda e: math.log(e[1] / e[0]))
    return math.sqrt(lo * hi)


def F_deformed(ctx: KernelContext, z: complex, r: float | None = None) -> complex:
    """F_r(z) + 2 pi i G_r(z) with G_r = 2 * sum of the enclosed closed-form residues."""
    z = complex(z)
    if abs(z.real) < 1e-12:
        raise PreconditionError("F_deformed requires z off the imaginary axis")
    if r is None:
        r = default_radius(ctx, z)
    if not 0 < r < 1:
        raise ValueError("r must lie in (0, 1)")
    enclosed = residues_enclosed(ctx, z, r)
    _warn_if_close(ctx, z, r)
    G = sum(G_closed(ctx, j, ell, z) for j, ell in enclosed)
    return _circle_integral(ctx, z, r) + 2j * math.pi * 2 * G


def numeric_residue(
    fn: Callable,
    center: complex,
    delta: float = 1e-3,
    M: int = 64,
    rtol: float = 1e-7,
    atol: float = 1e-12,
    check: bool = True,
) -> complex:
    """(1/2 pi i) times the circle integral of fn around center, with a delta/2 re-check."""

    def once(d: float) -> complex:
        t = np.exp(2j * np.pi * np.arange(M) / M)
        pts = center + d * t
        try:
            vals = np.asarray(fn(pts), dtype=complex)
            if vals.shape != pts.shape:
                raise TypeError
        except (TypeError, ValueError):
            vals = np.array([complex(fn(complex(p))) for p in pts])
        return complex(np.mean(vals * d * t))

    R = once(delta)
    if not check:
        return R
    R2 = once(delta / 2)
    if abs(R - R2) > rtol * max(abs(R), abs(R2)) + atol:
        raise UnreliableResidueError(
            f"residue estimate unstable: {R} at delta={delta} vs {R2} at delta={delta / 2}"
        )
    return R


def Gtilde(ctx: KernelContext, factor: int, ell: int, z, zeta):
    """The lift of G_{factor,ell} to M: a function of (z, zeta) with zeta^2 = (iL/z)^2 - 1."""
    p = ctx.product
    s = p.factor(factor)
    other = p.factor(3 - factor)
    L = math.sqrt(lattice_point(p, factor, ell).L_sq)
    C = s.b / math.pi * L * eval_p(s, 1j * L)
    w = 1j * L / z - zeta
    x = -1j * z * zeta
    if factor == 2:
        w = 1j * w
    return C * psi(ctx, z, w) * _pq(other, x)


def Gtilde_chart(ctx: KernelContext, factor: int, ell: int, sign: int, zeta):
    """Chart expression of the lift on U_{factor,ell,sign}: z = sign*iL/sqrt(zeta^2+1)."""
    p = ctx.product
    s = p.factor(factor)
    other = p.factor(3 - factor)
    L = math.sqrt(lattice_point(p, factor, ell).L_sq)
    C = s.b / math.pi * L * eval_p(s, 1j * L)
    zeta = np.asarray(zeta, dtype=complex)
    root = np.sqrt(zeta * zeta + 1)
    z = sign * 1j * L / root
    # iL/z - zeta = sign*sqrt(zeta^2+1) - zeta and -i z zeta = sign*L*zeta/sqrt(zeta^2+1)
    w = sign * root - zeta
    if factor == 2:
        w = 1j * w
    out = C * psi(ctx, z, w) * _pq(other, sign * L * zeta / root)
    return out if out.ndim else complex(out)


# ---------------------------------------------------------------------------
# residues on the Riemann surfaces


def _pair_data(ctx: KernelContext, ell1: int, ell2: int):
    p = ctx.product
    for j in (1, 2):
        if not p.factor(j).odd:
            raise PreconditionError(f"factor {j} has even m_beta: no chart residues")
    L1 = math.sqrt(lattice_point(p, 1, ell1).L_sq)
    L2 = math.sqrt(lattice_point(p, 2, ell2).L_sq)
    pp = eval_p(p.s1, 1j * L1) * eval_p(p.s2, 1j * L2)
    T = ctx.test(float(p.s1.rho_beta + ell1), float(p.s2.rho_beta + ell2))
    return L1, L2, pp.real, complex(T)


def chart_pole(ctx: KernelContext, factor: int, ell1: int, ell2: int) -> complex:
    """zeta_{j,l1,l2} = i L_other / sqrt(L1^2 + L2^2); poles sit at +/- this value."""
    L1, L2, _, _ = _pair_data(ctx, ell1, ell2)
    return 1j * (L2 if factor == 1 else L1) / math.hypot(L1, L2)


def residue_closed_chart(ctx: KernelContext, ell1: int, ell2: int, sign: int) -> tuple[complex, complex]:
    """Printed closed forms: sign * b_j L_j p1(iL1) p2(iL2) T / (i pi^2) for j = 1, 2."""
    L1, L2, pp, T = _pair_data(ctx, ell1, ell2)
    base = sign * pp * T / (1j * math.pi**2)
    return base * ctx.b1 * L1, base * ctx.b2 * L2


def residue_chart_derived(ctx: KernelContext, ell1: int, ell2: int, sign: int) -> tuple[complex, complex]:
    """Chart residues including Res_x q = b/(i pi) and the Jacobian of x(zeta).

    Res = sign * b1 b2 L_j^3 p1(iL1) p2(iL2) T / (i pi^2 |z|^3), the same at
    both poles +/- zeta_{j,l1,l2} because the chart expression is odd in zeta.
    """
    L1, L2, pp, T = _pair_data(ctx, ell1, ell2)
    base = sign * ctx.b1 * ctx.b2 * pp * T / (1j * math.pi**2 * math.hypot(L1, L2) ** 3)
    return base * L1**3, base * L2**3


def chart_residues_numeric(
    ctx: KernelContext, ell1: int, ell2: int, sign: int, eps: int = 1
) -> tuple[complex, complex]:
    """numeric_residue of both chart expressions at eps * zeta_{j,l1,l2}."""
    out = []
    for j, ell in ((1, ell1), (2, ell2)):
        center = eps * chart_pole(ctx, j, ell1, ell2)
        out.append(numeric_residue(lambda t, j=j, ell=ell: Gtilde_chart(ctx, j, ell, sign, t), center, ctx.delta))
    return out[0], out[1]


@dataclass(frozen=True)
class ChartSetup:
    """Branch points below a resonance and the chart index m used for it."""

    z_abs_sq: Fraction
    branch: tuple  # BranchPoint entries with L_sq < |z|^2, ascending
    m: int
    summands: tuple

    @property
    def L_m_sq(self) -> Fraction:
        return self.branch[self.m].L_sq

    def index_of(self, factor: int, ell: int) -> int:
        for i, bp in enumerate(self.branch):
            if any(s.factor == factor and s.ell == ell for s in bp.sources):
                return i
        raise KeyError((factor, ell))


def chart_setup(ctx: KernelContext, k: int) -> ChartSetup:
    p = ctx.product
    if p.extension_class is not ExtensionClass.BothOddMeromorphic:
        raise PreconditionError("residues of F-tilde exist only when both m_beta are odd")
    res = nth_resonance(p, k)
    bps = branch_points(p, res.z_abs_sq)
    if bps and bps[-1].L_sq == res.z_abs_sq:
        raise SingularChartError(
            f"|z_(k)|^2 = {res.z_abs_sq} is itself a branch point: the chart coordinate change is singular"
        )
    return ChartSetup(res.z_abs_sq, tuple(bps), len(bps) - 1, res.summands)


def _sign_tuple(eps, length: int) -> tuple[int, ...]:
    eps = tuple(eps.eps if hasattr(eps, "eps") else eps)
    if len(eps) < length:
        raise ValueError(f"sign vector needs at least {length} entries")
    if any(e not in (1, -1) for e in eps):
        raise ValueError("sign vector entries must be +1 or -1")
    return eps


def residue_F_tilde(ctx: KernelContext, k: int, eps_m: int) -> complex:
    """Printed residue of F-tilde: i eps_m L_m^2 / (pi^2 sqrt(|z|^2 - L_m^2)) * sum C T."""
    cs = chart_setup(ctx, k)
    p = ctx.product
    total = 0j
    for sm in cs.summands:
        T = ctx.test(float(p.s1.rho_beta + sm.ell1), float(p.s2.rho_beta + sm.ell2))
        total += float(sm.C) * T
    Lm_sq = float(cs.L_m_sq)
    return 1j * eps_m * Lm_sq / (math.pi**2 * math.sqrt(float(cs.z_abs_sq) - Lm_sq)) * total


def residue_F_tilde_derived(ctx: KernelContext, k: int, eps) -> complex:
    """Residue of the sum of lifts in chart m, from the derived chart residues.

    The result depends on the full sign vector: each pair contributes with the
    factor (eps_{1,l1} + eps_{2,l2}), so it vanishes on mixed sheets.
    """
    cs = chart_setup(ctx, k)
    eps = _sign_tuple(eps, cs.m + 1)
    Z2 = float(cs.z_abs_sq)
    total = 0j
    for sm in cs.summands:
        L1, L2, pp, T = _pair_data(ctx, sm.ell1, sm.ell2)
        e = eps[cs.index_of(1, sm.ell1)] + eps[cs.index_of(2, sm.ell2)]
        total += e * L1 * L2 * pp * T
    Lm_sq = float(cs.L_m_sq)
    pref = 1j * eps[cs.m] * Lm_sq * ctx.b1 * ctx.b2 / (math.pi**2 * Z2**1.5 * math.sqrt(Z2 - Lm_sq))
    return pref * total


def _lower_chart_sum(ctx: KernelContext, cs: ChartSetup, eps):
    """Sum of all lifts as a function of zeta_m in the lower chart of M_m."""
    Lm = math.sqrt(cs.L_m_sq)

    def f(zm):
        zm = np.asarray(zm, dtype=complex)
        z = -1j * Lm / np.sqrt(zm * zm + 1)
        total = 0
        for i, bp in enumerate(cs.branch):
            if i == cs.m:
                zl = zm
            else:
                # holomorphic continuation of eps_l * zeta_l^+ across the axis
                zl = eps[i] * 1j * np.sqrt(1 + float(bp.L_sq) / (z * z))
            for src in bp.sources:
                total = total + Gtilde(ctx, src.factor, src.ell, z, zl)
        return total

    return f


def residue_F_tilde_oracle(ctx: KernelContext, k: int, eps) -> complex:
    """numeric_residue in zeta_m of the sum of lifts, all on the sheet fixed by eps."""
    cs = chart_setup(ctx, k)
    eps = _sign_tuple(eps, cs.m + 1)
    center = complex(resonance_coordinate(cs.L_m_sq, cs.z_abs_sq, eps[cs.m]))
    return numeric_residue(_lower_chart_sum(ctx, cs, eps), center, ctx.delta)


def residue_F_tilde_transported(ctx: KernelContext, k: int, eps) -> complex:
    """Per-pair numeric chart residues carried to chart m by coord_change derivatives."""
    cs = chart_setup(ctx, k)
    eps = _sign_tuple(eps, cs.m + 1)
    total = 0j
    for sm in cs.summands:
        for j, ell in ((1, sm.ell1), (2, sm.ell2)):
            i = cs.index_of(j, ell)
            L_sq = cs.branch[i].L_sq
            zeta_l = resonance_coordinate(L_sq, cs.z_abs_sq, eps[i])
            res = numeric_residue(lambda t, j=j, ell=ell: Gtilde_chart(ctx, j, ell, -1, t), zeta_l, ctx.delta)
            _, deriv = coord_change(cs.L_m_sq, L_sq, eps[cs.m], eps[i], zeta_l)
            total += deriv * res
    return total


# ---------------------------------------------------------------------------
# one odd factor


def _odd_even(p: ProductSpace) -> tuple[int, int]:
    if p.extension_class is not ExtensionClass.OneOddHolomorphic:
        raise PreconditionError("expected exactly one factor with odd m_beta")
    return (1, 2) if p.s1.odd else (2, 1)


@dataclass(frozen=True)
class HolomorphyReport:
    points: int
    max_residue: float
    worst: tuple | None


def verify_no_resonance_one_odd(ctx: KernelContext, R_sq) -> HolomorphyReport:
    """Probe the chart lifts of the odd factor where a second odd factor would create poles."""
    p = ctx.product
    odd, even = _odd_even(p)
    s_even = p.factor(even)
    R_sq = Fraction(R_sq)
    worst, max_res, count = None, 0.0, 0
    ell = 0
    while True:
        L_sq = lattice_point(p, odd, ell).L_sq
        if L_sq >= R_sq:
            break
        n = 0
        while True:
            other_sq = s_even.b_sq * (s_even.rho_beta + n) ** 2
            Z2 = L_sq + other_sq
            if Z2 > R_sq:
                break
            for eps in (1, -1):
                for sign in (1, -1):
                    center = complex(resonance_coordinate(L_sq, Z2, eps))
                    r = numeric_residue(lambda t: Gtilde_chart(ctx, odd, ell, sign, t), center, ctx.delta)
                    count += 1
                    if abs(r) >= max_res:
                        max_res, worst = abs(r), (ell, n, eps, sign)
            n += 1
        ell += 1
    return HolomorphyReport(count, max_res, worst)


# ---------------------------------------------------------------------------
# sampling helpers and the verification suite


def admissible_samples(ctx: KernelContext, n: int, rng: np.random.Generator, vmax: float = 4.0):
    """n pairs (z, r) off the imaginary axis for which the deformation is well posed."""
    out = []
    while len(out) < n:
        v = rng.uniform(0.5, vmax)
        theta = rng.uniform(-math.pi, math.pi)
        if abs(abs(theta) - math.pi / 2) < 0.08:
            continue
        z = v * complex(math.cos(theta), math.sin(theta))
        r = rng.uniform(0.3, 0.95)
        with warnings.catch_warnings():
            warnings.simplefilter("error", IllConditionedWarning)
            try:
                residues_enclosed(ctx, z, r)
                _warn_if_close(ctx, z, r)
                _warn_if_close(ctx, z, 1.0)
            except (ContourCollisionError, IllConditionedWarning):
                continue
        out.append((z, r))
    return out


def random_lower_zeta(ctx: KernelContext, rng: np.random.Generator) -> complex:
    return complex(rng.uniform(-1.5, 1.5), rng.uniform(-0.8, 0.8))


@dataclass
class CheckResult:
    name: str
    inputs: dict
    error: float
    tol: float
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = bool(np.isfinite(self.error) and self.error <= self.tol)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "inputs": self.inputs,
            "error": self.error,
            "tol": self.tol,
            "pass": self.passed,
        }


DEFAULT_TOLERANCES = {
    "plancherel_oracle": 1e-9,
    "parity": 1e-12,
    "F_evenness": 1e-12,
    "quadrature_convergence": 1e-11,
    "deformation_identity": 1e-8,
    "G_closed_residue": 1e-7,
    "section_consistency": 1e-10,
    "chart_residues": 1e-6,
    "F_tilde_residue": 1e-6,
    "F_tilde_transport": 1e-6,
    "chart_residues_printed": 1e-6,
    "F_tilde_residue_printed": 1e-6,
    "coord_change_derivative": 1e-6,
    "index_bound": 0.0,
    "enumeration": 0.0,
    "one_odd_holomorphy": 1e-8,
}


def _rel(a: complex, b: complex, scale: float = 0.0) -> float:
    return abs(a - b) / max(abs(a), abs(b), scale, 1e-300)


def run_suite(
    ctx: KernelContext,
    seed: int = 0,
    tolerances: dict | None = None,
    printed_forms: bool = False,
    samples: int = 8,
) -> list[CheckResult]:
    """Run every applicable check on ctx.product; deterministic for a fixed seed."""
    from .complexmaps import coord_change as _cc
    from .plancherel import density_gamma, density_polyform
    from .resonances import index_bound, index_bound_bruteforce

    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    rng = np.random.default_rng(seed)
    p = ctx.product
    cls = p.extension_class
    odd_factors = [j for j in (1, 2) if p.factor(j).odd]
    results: list[CheckResult] = []

    def add(name, inputs, error):
        results.append(CheckResult(name, inputs, float(error), tol[name]))

    lams = [0.5, 1.0, 2.0, 4.0, 8.0]
    for j in (1, 2):
        s = p.factor(j)
        ratios = np.array([density_gamma(s, lam) / abs(density_polyform(s, lam)) for lam in lams])
        add("plancherel_oracle", {"space": s.label, "lambda": lams}, np.ptp(ratios) / ratios.mean())

    worst = 0.0
    for _ in range(200):
        z = complex(*rng.normal(size=2))
        w = complex(*rng.normal(size=2))
        ref = abs(psi(ctx, z, w)) + 1e-300
        worst = max(worst, abs(psi(ctx, -z, w) - psi(ctx, z, w)) / ref, abs(psi(ctx, z, -w) - psi(ctx, z, w)) / ref)
        f = phi(ctx, z, w)
        worst = max(worst, abs(phi(ctx, z, -w) + f) / abs(f), abs(phi(ctx, -z, w) - f) / abs(f))
    add("parity", {"points": 200, "seed": seed}, worst)

    pairs = admissible_samples(ctx, samples, rng)
    worst_even = worst_def = worst_conv = 0.0
    for z, r in pairs:
        Fd = F_direct(ctx, z)
        worst_even = max(worst_even, _rel(Fd, F_direct(ctx, -z)))
        worst_def = max(worst_def, _rel(Fd, F_deformed(ctx, z, r)))
        worst_conv = max(worst_conv, _rel(Fd, _circle_integral(ctx, z, 1.0, 2 * ctx.nodes)))
    zs = [[z.real, z.imag] for z, _ in pairs]
    add("F_evenness", {"z": zs}, worst_even)
    add("quadrature_convergence", {"z": zs, "nodes": ctx.nodes}, worst_conv)
    add("deformation_identity", {"z": zs, "r": [r for _, r in pairs]}, worst_def)

    if odd_factors:
        worst_g = worst_s = 0.0
        for z, _ in pairs[:4]:
            for j in odd_factors:
                for ell in (0, 1):
                    L = math.sqrt(lattice_point(p, j, ell).L_sq)
                    w = complex(c_inverse(1j * L / z))
                    w = w if j == 1 else 1j * w
                    res = numeric_residue(lambda u: phi(ctx, z, u), w, ctx.delta)
                    G = G_closed(ctx, j, ell, z)
                    worst_g = max(worst_g, _rel(psi(ctx, z, w) * res, G))
                    sign = 1 if z.imag > 0 else -1
                    worst_s = max(worst_s, _rel(Gtilde_chart(ctx, j, ell, sign, zeta_plus(lattice_point(p, j, ell).L_sq, z)), G))
        add("G_closed_residue", {"z": zs[:4], "ell": [0, 1]}, worst_g)
        add("section_consistency", {"z": zs[:4], "ell": [0, 1]}, worst_s)

    if cls is ExtensionClass.BothOddMeromorphic:
        worst_c = worst_p = 0.0
        for l1 in (0, 1):
            for l2 in (0, 1):
                for sign in (1, -1):
                    for e in (1, -1):
                        num = chart_residues_numeric(ctx, l1, l2, sign, e)
                        der = residue_chart_derived(ctx, l1, l2, sign)
                        worst_c = max(worst_c, *(_rel(a, b) for a, b in zip(num, der)))
                        if printed_forms:
                            pr = residue_closed_chart(ctx, l1, l2, sign)
                            worst_p = max(worst_p, *(_rel(a, b) for a, b in zip(num, pr)))
        add("chart_residues", {"ell_max": 1}, worst_c)
        if printed_forms:
            add("chart_residues_printed", {"ell_max": 1}, worst_p)

        worst_f = worst_t = worst_fp = 0.0
        for k in range(3):
            try:
                cs = chart_setup(ctx, k)
            except SingularChartError:
                continue
            for eps_m in (1, -1):
                for eps in (tuple([eps_m] * (cs.m + 1)), tuple(rng.choice([1, -1], cs.m).tolist()) + (eps_m,)):
                    oracle = residue_F_tilde_oracle(ctx, k, eps)
                    derived = residue_F_tilde_derived(ctx, k, eps)
                    scale = abs(residue_F_tilde_derived(ctx, k, [eps_m] * (cs.m + 1)))
                    worst_f = max(worst_f, _rel(oracle, derived, scale))
                    worst_t = max(worst_t, _rel(residue_F_tilde_transported(ctx, k, eps), derived, scale))
                if printed_forms:
                    oracle = residue_F_tilde_oracle(ctx, k, [eps_m] * (cs.m + 1))
                    worst_fp = max(worst_fp, _rel(oracle, residue_F_tilde(ctx, k, eps_m)))
        add("F_tilde_residue", {"k": [0, 1, 2]}, worst_f)
        add("F_tilde_transport", {"k": [0, 1, 2]}, worst_t)
        if printed_forms:
            add("F_tilde_residue_printed", {"k": [0, 1, 2]}, worst_fp)

    if odd_factors:
        worst_d = 0.0
        n_pts = 0
        for _ in range(20):
            j = odd_factors[0] if len(odd_factors) == 1 else int(rng.integers(1, 3))
            lm, ll = sorted(rng.integers(0, 4, size=2).tolist(), reverse=True)
            Lm_sq = lattice_point(p, j, lm).L_sq
            Ll_sq = lattice_point(p, j, ll).L_sq
            zl = random_lower_zeta(ctx, rng)
            em, el = (int(x) for x in rng.choice([1, -1], 2))
            try:
                _, d = _cc(Lm_sq, Ll_sq, em, el, zl)
            except ZeroDivisionError:
                continue
            h = 1e-6
            fd = (coord_map(Lm_sq, Ll_sq, em, zl + h) - coord_map(Lm_sq, Ll_sq, em, zl - h)) / (2 * h)
            worst_d = max(worst_d, _rel(complex(fd), d))
            n_pts += 1
        add("coord_change_derivative", {"points": n_pts}, worst_d)

        mismatches = 0
        for _ in range(50):
            s = p.factor(odd_factors[0] if len(odd_factors) == 1 else int(rng.integers(1, 3)))
            v, cr = _index_case(s, rng)
            mismatches += index_bound(s, v, cr) != index_bound_bruteforce(s, v, cr)
        add("index_bound", {"cases": 50}, mismatches)

    if cls is ExtensionClass.BothOddMeromorphic:
        add("enumeration", {"R_sq": "100"}, _enumeration_mismatches(p, Fraction(100)))
    if cls is ExtensionClass.OneOddHolomorphic:
        rep = verify_no_resonance_one_odd(ctx, 10)
        add("one_odd_holomorphy", {"R_sq": "10", "points": rep.points}, rep.max_residue)
    return results


def _index_case(s, rng: np.random.Generator) -> tuple[Fraction, Fraction]:
    """Random (v, c(r)) meeting the counting lemma's hypotheses for space s."""
    from .resonances import CaseHypothesisError, index_bound

    while True:
        v = Fraction(int(rng.integers(1, 4000)), 100)
        if v * v < s.b_sq * s.rho_beta**2:
            continue
        cr = 1 + Fraction(int(rng.integers(1, 1000)), 2000)
        try:
            index_bound(s, v, cr)
        except CaseHypothesisError:
            continue
        return v, cr


def _enumeration_mismatches(p: ProductSpace, R_sq: Fraction) -> int:
    """Compare enumerate_resonances with a plain double loop over all pairs."""
    brute: dict[Fraction, set] = {}
    bound = 0
    while lattice_point(p, 1, bound).L_sq <= R_sq or lattice_point(p, 2, bound).L_sq <= R_sq:
        bound += 1
    for l1 in range(bound + 1):
        for l2 in range(bound + 1):
            key = lattice_point(p, 1, l1).L_sq + lattice_point(p, 2, l2).L_sq
            if key <= R_sq:
                brute.setdefault(key, set()).add((l1, l2))
    got = {r.z_abs_sq: set(r.S_k) for r in enumerate_resonances(p, R_sq)}
    keys = set(brute) | set(got)
    return sum(brute.get(k) != got.get(k) for k in keys)
