import itertools
import math
from collections import Counter
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest

from symres.plancherel import build_P
from symres.resonances import (
    CaseHypothesisError,
    EmptyLatticeError,
    QuadraticNumber,
    branch_points,
    enumerate_resonances,
    index_bound,
    index_bound_bruteforce,
    lattice_point,
    nth_resonance,
    residue_constant,
    residue_summands,
)
from symres.spaces import ExtensionClass, Family, ParameterRangeError, build_product, build_space, parse_space

from conftest import product


def odd_table_spaces(nmax=3):
    out = []
    for fam in Family:
        for n in range(1, nmax + 1):
            try:
                s = build_space(fam, n)
            except ParameterRangeError:
                continue
            if s.odd and s not in out:
                out.append(s)
    return out


def brute_catalog(p, R_sq):
    """Double loop over all index pairs; independent of the module's grouping."""
    s1, s2 = p.s1, p.s2
    lim1 = math.isqrt(int(R_sq / s1.b_sq)) + 2
    lim2 = math.isqrt(int(R_sq / s2.b_sq)) + 2
    groups = {}
    for l1 in range(lim1):
        for l2 in range(lim2):
            v = s1.b_sq * (s1.rho_beta + l1) ** 2 + s2.b_sq * (s2.rho_beta + l2) ** 2
            if v <= R_sq:
                groups.setdefault(v, set()).add((l1, l2))
    return {k: groups[k] for k in sorted(groups)}


def test_lattice_points():
    assert lattice_point(product("SU(2,1)", "SU(2,1)"), 1, 0).L_sq == 1
    assert lattice_point(product("SU(2,1)", "Sp(2,1)"), 2, 1).L_sq == Fraction(49, 4)
    with pytest.raises(EmptyLatticeError):
        lattice_point(product("SU(2,1)", "SO(3,1)"), 2, 0)


def test_branch_points_su2_squared():
    bps = branch_points(product("SU(2,1)", "SU(2,1)"), 16)
    assert [b.L_sq for b in bps] == [1, 4, 9, 16]
    assert all(len(b.sources) == 2 for b in bps)


def test_branch_points_su_sp():
    bps = branch_points(product("SU(2,1)", "Sp(2,1)"), 13)
    assert [b.L_sq for b in bps] == [1, 4, Fraction(25, 4), 9, Fraction(49, 4)]
    assert all(len(b.sources) == 1 for b in bps)


def test_branch_points_su_su4_overlap():
    bps = branch_points(product("SU(2,1)", "SU(4,1)"), 9)
    assert [b.L_sq for b in bps] == [1, 4, 9]
    assert [[s.factor for s in b.sources] for b in bps] == [[1], [1, 2], [1, 2]]


def test_branch_points_one_odd_and_both_even():
    bps = branch_points(product("SU(2,1)", "SO(3,1)"), 10)
    assert all(s.factor == 1 for b in bps for s in b.sources)
    with pytest.raises(ValueError):
        branch_points(product("SO(3,1)", "SO(3,1)"), 10)


def test_enumeration_su2_squared_example():
    res = enumerate_resonances(product("SU(2,1)", "SU(2,1)"), 25)
    assert [r.z_abs_sq for r in res] == [2, 5, 8, 10, 13, 17, 18, 20, 25]
    assert [len(r.summands) for r in res] == [1, 2, 1, 2, 2, 2, 1, 2, 2]
    assert res[-1].S_k == ((2, 3), (3, 2))
    assert res[0].z == pytest.approx(-1j * math.sqrt(2))


def test_enumeration_su_sp_first():
    res = enumerate_resonances(product("SU(2,1)", "Sp(2,1)"), 8)
    assert res[0].z_abs_sq == Fraction(29, 4) and res[0].S_k == ((0, 0),)


def test_one_odd_is_empty():
    assert enumerate_resonances(product("SU(2,1)", "SO(3,1)"), 100) == []
    assert enumerate_resonances(product("SO(3,1)", "SO(5,1)"), 100) == []


@pytest.mark.parametrize(
    "a, b, b1, b2",
    [
        ("SU(2,1)", "SU(2,1)", 1, 1),
        ("SU(2,1)", "SU(4,1)", 1, 1),
        ("SU(2,1)", "Sp(2,1)", 1, 1),
        ("SO(4,1)", "F4", 1, 1),
        ("SU(3,1)", "SO(6,1)", Fraction(1, 2), 3),
    ],
)
def test_enumeration_matches_brute_force(a, b, b1, b2):
    p = build_product(replace(parse_space(a), b_sq=Fraction(b1)), replace(parse_space(b), b_sq=Fraction(b2)))
    oracle = brute_catalog(p, 400)
    got = {r.z_abs_sq: set(r.S_k) for r in enumerate_resonances(p, 400)}
    assert got == oracle
    # the groups partition the full pair set
    assert sum(len(v) for v in got.values()) == len(set().union(*oracle.values()))


def test_first_resonance_is_rho_sq():
    spaces = odd_table_spaces()
    for s1, s2 in itertools.product(spaces, repeat=2):
        p = build_product(s1, s2)
        assert enumerate_resonances(p, p.rho_X_sq)[0].z_abs_sq == p.rho_X_sq


def test_distinctness_su_sp_and_coincidence_su2():
    p = product("SU(2,1)", "Sp(2,1)")
    keys = {r.z_abs_sq for r in enumerate_resonances(p, 100)}
    # coincidences come from Pythagorean triples in half units: (12,5,13), (12,9,15), (8,15,17)
    shared = keys & {b.L_sq for b in branch_points(p, 100)}
    assert shared == {Fraction(169, 4), Fraction(225, 4), Fraction(289, 4)}
    q = product("SU(2,1)", "SU(2,1)")
    keys = {r.z_abs_sq for r in enumerate_resonances(q, 25)}
    assert keys & {b.L_sq for b in branch_points(q, 25)} == {25}


def test_residue_constant_examples():
    assert residue_constant(product("SU(2,1)", "SU(2,1)"), 0, 0).as_rational() == 2
    assert residue_constant(product("SU(2,1)", "Sp(2,1)"), 0, 0).as_rational() == Fraction(2088, 5)


def test_residue_constant_oracle_float():
    # C = p1(iL1) p2(iL2) (b1 L2/L1 + b2 L1/L2), evaluated independently in floats
    s1 = build_space("SU", 3, Fraction(2))
    s2 = build_space("Sp", 2, Fraction(1, 3))
    p = build_product(s1, s2)
    for l1, l2 in [(0, 0), (1, 2), (3, 1)]:
        r1, r2 = s1.rho_beta + l1, s2.rho_beta + l2
        L1, L2 = s1.b * float(r1), s2.b * float(r2)
        pp = float(build_P(s1)(r1) * build_P(s2)(r2))
        expect = pp * (s1.b * L2 / L1 + s2.b * L1 / L2)
        assert float(residue_constant(p, l1, l2)) == pytest.approx(expect, rel=1e-13)


def test_residue_constant_irrational_basis():
    p = build_product(build_space("SU", 2, 2), build_space("SU", 2))
    C = residue_constant(p, 0, 0)
    assert C.as_rational() is None and C.is_positive()


def test_positivity_all_pairs():
    spaces = odd_table_spaces()
    for s1, s2 in itertools.product(spaces, repeat=2):
        p = build_product(s1, s2)
        for l1, l2 in itertools.product(range(11), repeat=2):
            assert residue_constant(p, l1, l2).is_positive(), (s1.label, s2.label, l1, l2)


def test_quadratic_number_sign_logic():
    Q = lambda a, b: QuadraticNumber(Fraction(a), Fraction(b), Fraction(2), Fraction(3))
    assert Q(1, -Fraction(4, 5)).is_positive()  # sqrt2 - 0.8 sqrt3 > 0
    assert not Q(1, -1).is_positive()
    assert not Q(0, 0).is_positive()
    assert (Q(1, 2) + Q(3, 4)).to_json() == {"q1": "4", "q2": "6"}
    with pytest.raises(ValueError):
        Q(1, 1) + QuadraticNumber(Fraction(1), Fraction(1))


def test_residue_summands():
    p = product("SU(2,1)", "SU(2,1)")
    rep = residue_summands(p, k=0)
    assert rep.count == 1 and rep.summands[0].weight == (0, 0) and rep.summands[0].C.as_rational() == 2
    assert [s.weight for s in residue_summands(p, z_abs_sq=5).summands] == [(0, 1), (1, 0)]
    assert residue_summands(p, z_abs_sq=25).summands[0].weight == (2, 3)
    with pytest.raises(IndexError):
        residue_summands(p, z_abs_sq=3)
    with pytest.raises(ValueError):
        residue_summands(p, k=0, z_abs_sq=2)
    assert nth_resonance(p, 30).z_abs_sq > 25


def test_residue_constant_needs_both_odd():
    with pytest.raises(EmptyLatticeError):
        residue_constant(product("SU(2,1)", "SO(3,1)"), 0, 0)


def test_index_bound_examples():
    assert index_bound(parse_space("SU(2,1)"), Fraction(5, 2), Fraction(11, 10)) == 1
    assert index_bound(parse_space("Sp(2,1)"), Fraction(16, 5), Fraction(21, 20)) == 0


def test_index_bound_hypotheses():
    su = parse_space("SU(2,1)")
    with pytest.raises(CaseHypothesisError):
        index_bound(su, Fraction(5, 2), Fraction(3, 2))
    with pytest.raises(CaseHypothesisError):
        index_bound(su, Fraction(1, 2), Fraction(11, 10))
    with pytest.raises(EmptyLatticeError):
        index_bound(parse_space("SO(3,1)"), 2, Fraction(11, 10))


def test_index_bound_vs_bruteforce_random():
    rng = np.random.default_rng(7)
    spaces = odd_table_spaces() + [build_space("SU", 2, Fraction(9, 4)), build_space("Sp", 2, Fraction(1, 4))]
    seen = Counter()
    checked = 0
    while checked < 400:
        s = spaces[rng.integers(len(spaces))]
        v = Fraction(int(rng.integers(1, 4000)), 100)
        cr = 1 + Fraction(int(rng.integers(1, 400)), 1000)
        try:
            n = index_bound(s, v, cr)
        except CaseHypothesisError:
            continue
        assert n == index_bound_bruteforce(s, v, cr), (s.label, v, cr)
        seen[s.rho_beta.denominator] += 1
        checked += 1
    assert seen[1] > 20 and seen[2] > 20
