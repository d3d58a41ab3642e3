import json
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from arithchern.finite_scheme import (Chart, FiniteSchemeData, OverlapAmbiguous, ZeroCycleOnS,
                                      degree_log, gamma_order, koszul,
                                      localized_chern_pushforward, projective_line_scheme,
                                      resultant_cross_check)
from arithchern.poly_ring import BinaryForm, MultiPoly, NotZeroDimensional, parse_poly
from arithchern.selftest import random_form_pair, random_koszul_sequence

X = ("x",)
XYZ = ("x", "y", "z")


def test_koszul_shapes_and_complex_property():
    for n in range(1, 5):
        vars = XYZ + ("w",)
        xs = [MultiPoly.var(v, vars) for v in vars[:n]]
        k = koszul(xs)
        assert k.ranks() == [math.comb(n, i) for i in range(n + 1)]
        assert k.composition_is_zero()
    with pytest.raises(ValueError):
        koszul([MultiPoly.var("x", X)] * 5)


def test_koszul_desk_checks():
    k = koszul([MultiPoly.const(5, X), MultiPoly.var("x", X)])
    assert localized_chern_pushforward(k) == ZeroCycleOnS({5: 1})
    k = koszul([parse_poly("x^2+1", X), MultiPoly.const(5, X)])
    assert localized_chern_pushforward(k) == ZeroCycleOnS({5: 2})


def test_gamma_order_of_x2_plus_1_mod_5_by_enumeration():
    phi = FiniteSchemeData((Chart(X, (parse_poly("x^2+1", X), MultiPoly.const(5, X))),))
    # residues a + b x, x^2 = -1, coefficients mod 5: list them and check closure
    elems = {(a, b) for a in range(5) for b in range(5)}
    mul = lambda p, q: ((p[0] * q[0] - p[1] * q[1]) % 5, (p[0] * q[1] + p[1] * q[0]) % 5)
    assert all(mul(p, q) in elems for p in elems for q in elems)
    assert gamma_order(phi) == len(elems) == 25


def test_random_koszul_degree_log_matches_gamma():
    rng = random.Random(2024)
    for _ in range(20):
        seq = random_koszul_sequence(rng)
        cyc = localized_chern_pushforward(koszul(seq))
        gam = gamma_order(FiniteSchemeData((Chart(seq[0].vars, tuple(seq)),)))
        assert cyc == ZeroCycleOnS.from_order(gam)
        assert abs(degree_log(cyc) - math.log(gam)) <= 1e-12


def test_zero_cycle_algebra_and_json():
    a = ZeroCycleOnS({2: 1, 3: Fraction(1, 2)})
    b = ZeroCycleOnS({2: 1})
    assert (a - b) == ZeroCycleOnS({3: Fraction(1, 2)})
    assert (a - a) == ZeroCycleOnS()
    s = a.dumps()
    assert json.loads(s) == {"2": 1, "3": "1/2"}
    assert ZeroCycleOnS.from_json(a.to_json()) == a
    assert abs(degree_log(a) - (math.log(2) + 0.5 * math.log(3))) < 1e-15


def test_from_order_exact_large():
    n = 2 ** 70 * 3 ** 5
    z = ZeroCycleOnS.from_order(n)
    assert z.multiplicities == {2: 70, 3: 5}


def test_shipped_pair():
    phi = projective_line_scheme(BinaryForm.parse("X0"), BinaryForm.parse("2*X1"))
    assert gamma_order(phi) == 2 == resultant_cross_check(phi)


def test_support_at_infinity_and_both_charts():
    # 3 X0 + X1 and X1 meet only at [1:0] mod 3, invisible to the u-chart
    f, g = BinaryForm.parse("3*X0+X1"), BinaryForm.parse("X1")
    phi = projective_line_scheme(f, g)
    u, v = phi.charts
    assert gamma_order(FiniteSchemeData((u,))) == 1
    assert gamma_order(phi) == resultant_cross_check(phi) == 3
    # add a finite point mod 5 as well: the orders multiply, nothing is double counted
    f2 = f * BinaryForm.parse("X0-2*X1")
    g2 = g * BinaryForm.parse("X0+3*X1")
    phi2 = projective_line_scheme(f2, g2)
    assert gamma_order(phi2) == resultant_cross_check(phi2)


def test_overlap_requires_witness():
    c = Chart(X, (parse_poly("x", X), MultiPoly.const(2, X)))
    with pytest.raises(OverlapAmbiguous):
        gamma_order(FiniteSchemeData((c, c)))


def test_shared_content_is_not_zero_dimensional():
    with pytest.raises(NotZeroDimensional):
        projective_line_scheme(BinaryForm.parse("2*X0"), BinaryForm.parse("2*X1"))


def test_fifty_random_pairs_match_resultant():
    rng = random.Random(99)
    for _ in range(50):
        f, g = random_form_pair(rng)
        phi = projective_line_scheme(f, g)
        assert gamma_order(phi) == resultant_cross_check(phi)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-9, 9), min_size=1, max_size=4),
       st.lists(st.integers(-9, 9), min_size=1, max_size=4))
def test_gamma_equals_abs_resultant_property(a, b):
    from arithchern.poly_ring import resultant_forms
    f, g = BinaryForm(tuple(a)), BinaryForm(tuple(b))
    if f.degree + g.degree == 0 or resultant_forms(f, g) == 0:
        return
    if math.gcd(math.gcd(*a), math.gcd(*b)) != 1:
        with pytest.raises(NotZeroDimensional):
            projective_line_scheme(f, g)
        return
    assert gamma_order(projective_line_scheme(f, g)) == abs(resultant_forms(f, g))
