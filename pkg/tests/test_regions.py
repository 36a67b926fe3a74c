import random
from fractions import Fraction

import pytest

from dyncomp.errors import NotNull
from dyncomp.regions import (
    BoxRegion,
    CylinderRegion,
    Region,
    arc_point_gap,
    covers_space,
    inner_approx,
    measure,
    measure_gap,
    outer_approx,
    pairwise_disjoint,
    region_gap,
    small_nbhd,
    union_many,
)
from dyncomp.scalars import ExactScalar, golden_theta
from dyncomp.systems import CircleRotation, Odometer, TorusRotation

R = ExactScalar.rational


def golden():
    return CircleRotation(golden_theta())


def interval(sys, lo, hi, lc=True, hc=True):
    return Region.interval(sys, R(Fraction(lo)), R(Fraction(hi)), lc, hc)


def rand_region(sys, rng, max_pieces=3):
    soup = []
    for _ in range(rng.randint(0, max_pieces)):
        a = Fraction(rng.randint(0, 40), 40)
        ln = Fraction(rng.randint(0, 20), 40)
        soup.append((R(a), R(a + ln), rng.random() < 0.5, rng.random() < 0.5))
    return Region(sys, soup)


def test_normalization_merges_overlaps():
    h = golden()
    r = Region(h, [(R(0), R(Fraction(1, 2)), True, False), (R(Fraction(1, 4)), R(Fraction(3, 4)), True, True)])
    assert r == interval(h, 0, Fraction(3, 4), True, True)
    # adjacent pieces merge when the shared endpoint is covered
    r = Region(h, [(R(0), R(Fraction(1, 4)), True, False), (R(Fraction(1, 4)), R(Fraction(1, 2)), True, False)])
    assert r == interval(h, 0, Fraction(1, 2), True, False)
    # adjacent open pieces with the shared endpoint missing stay apart
    r = Region(h, [(R(0), R(Fraction(1, 4)), True, False), (R(Fraction(1, 4)), R(Fraction(1, 2)), False, False)])
    assert len(r.pieces) == 2


def test_wrap_split_and_membership():
    h = golden()
    r = interval(h, Fraction(7, 8), Fraction(9, 8))  # closed arc through 0
    assert len(r.pieces) == 2
    assert r.contains_point(R(0))
    assert r.contains_point(R(Fraction(15, 16)))
    assert r.contains_point(R(Fraction(1, 8)))
    assert not r.contains_point(R(Fraction(1, 2)))
    assert r.measure() == R(Fraction(1, 4))


def test_full_circle_and_complement():
    h = golden()
    full = Region.full(h)
    assert full.is_full and full.measure() == R(1)
    assert full.complement().is_empty
    r = interval(h, Fraction(1, 3), Fraction(2, 3), True, False)
    c = r.complement()
    assert c.measure() == R(Fraction(2, 3))
    assert c.union(r).is_full
    assert not c.intersects(r)
    assert c.complement() == r


def test_boundary_and_interior():
    h = golden()
    r = interval(h, Fraction(1, 4), Fraction(1, 2))
    assert r.boundary().points == (R(Fraction(1, 4)), R(Fraction(1, 2)))
    assert r.interior() == interval(h, Fraction(1, 4), Fraction(1, 2), False, False)
    assert r.closure() == r
    # wrap adjacency: an arc through 0 has boundary away from the seam
    w = interval(h, Fraction(7, 8), Fraction(9, 8), False, False)
    assert set(w.boundary().points) == {R(Fraction(7, 8)), R(Fraction(1, 8))}
    assert w.closure() == interval(h, Fraction(7, 8), Fraction(9, 8), True, True)
    # full circle has empty boundary
    assert Region.full(h).boundary().is_empty
    # a point has itself as boundary
    p = Region.points(h, [R(Fraction(1, 3))])
    assert p.boundary().points == (R(Fraction(1, 3)),)
    assert p.interior().is_empty


def test_union_of_two_half_circles_is_full():
    h = golden()
    a = interval(h, 0, Fraction(1, 2), True, False)
    b = interval(h, Fraction(1, 2), 1, True, False)
    assert a.union(b).is_full
    assert covers_space(h, [a, b])
    assert pairwise_disjoint(h, [a, b])


def test_translate_exact_and_invariant():
    h = golden()
    r = interval(h, 0, Fraction(1, 5))
    t = r.translate(3)
    assert t.measure() == r.measure()
    assert t.translate(-3) == r
    th = h.theta
    assert t.contains_point((3 * th).frac())
    # translates re-merge across the seam
    a = interval(h, Fraction(9, 10), Fraction(11, 10))
    b = a.translate(1).translate(-1)
    assert a == b


def test_boundary_of_union_subset_of_union_of_boundaries():
    h = golden()
    rng = random.Random(7)
    for _ in range(50):
        a = rand_region(h, rng)
        b = rand_region(h, rng)
        bu = set(a.union(b).boundary().points)
        ba = set(a.boundary().points) | set(b.boundary().points)
        assert bu <= ba


def test_random_membership_against_float_sampling():
    h = golden()
    rng = random.Random(3)
    for _ in range(30):
        r = rand_region(h, rng)
        for _ in range(40):
            q = Fraction(rng.randint(0, 400), 401)
            x = R(q)
            member = r.contains_point(x)
            fx = float(q)
            fmember = any(
                (float(lo) < fx < float(hi))
                or (abs(fx - float(lo)) < 1e-12 and lc)
                or (abs(fx - float(hi)) < 1e-12 and hc)
                or (lo == hi and abs(fx - float(lo)) < 1e-12)
                for lo, hi, lc, hc in r.pieces
            )
            assert member == fmember


def test_measure_additivity():
    h = golden()
    rng = random.Random(11)
    for _ in range(60):
        a = rand_region(h, rng)
        b = rand_region(h, rng)
        lhs = a.union(b).measure() + a.intersect(b).measure()
        assert lhs == a.measure() + b.measure()
        assert a.minus(b).measure() == a.measure() - a.intersect(b).measure()


def test_union_many_and_gap():
    h = golden()
    parts = [interval(h, Fraction(i, 10), Fraction(i, 10) + Fraction(1, 20)) for i in range(10)]
    u = union_many(h, parts)
    assert u.measure() == R(Fraction(1, 2))
    assert pairwise_disjoint(h, parts)
    assert not pairwise_disjoint(h, parts + [interval(h, 0, Fraction(1, 40))])
    a = interval(h, 0, Fraction(1, 4))
    b = interval(h, Fraction(3, 8), Fraction(1, 2))
    assert region_gap(a, b) == R(Fraction(1, 8))
    assert arc_point_gap(R(Fraction(5, 16)), a) == R(Fraction(1, 16))


def test_logical_arcs_rejoin_seam():
    h = golden()
    r = interval(h, Fraction(7, 8), Fraction(9, 8), False, True)
    arcs = r.logical_arcs()
    assert len(arcs) == 1
    lo, hi, lc, hc = arcs[0]
    assert (lo, hi) == (R(Fraction(7, 8)), R(Fraction(9, 8)))
    assert (lc, hc) == (False, True)


# spec'd approximation rules


def test_small_nbhd_values():
    h = golden()
    f = Region.points(h, [R(0)])
    e = small_nbhd(h, f, R(Fraction(1, 10)))
    assert e.measure() == R(Fraction(1, 20))
    assert e.contains_point(R(0))
    f2 = Region.points(h, [R(0), R(Fraction(1, 2))])
    e2 = small_nbhd(h, f2, R(Fraction(1, 10)))
    assert e2.measure() == R(Fraction(1, 20))
    # empty set companion: a single arc of length eps/2
    e3 = small_nbhd(h, Region.empty(h), R(Fraction(1, 10)))
    assert e3.measure() == R(Fraction(1, 20))
    assert not e3.is_empty
    with pytest.raises(NotNull):
        small_nbhd(h, interval(h, 0, Fraction(1, 4)), R(Fraction(1, 10)))


def test_inner_approx_values():
    h = golden()
    u = interval(h, 0, Fraction(1, 2), False, False)
    k = inner_approx(h, u, R(Fraction(1, 8)))
    assert k == interval(h, Fraction(1, 32), Fraction(1, 2) - Fraction(1, 32))
    assert u.contains_region(k)
    assert u.minus(k).measure() < R(Fraction(1, 8))
    # retraction bounded by interval length
    u2 = interval(h, 0, Fraction(1, 10), False, False)
    k2 = inner_approx(h, u2, R(1))
    assert k2 == interval(h, Fraction(1, 80), Fraction(1, 10) - Fraction(1, 80))
    assert inner_approx(h, Region.full(h), R(Fraction(1, 8))).is_full


def test_outer_approx_values():
    h = golden()
    f = interval(h, Fraction(1, 4), Fraction(1, 2))
    e = outer_approx(h, f, R(Fraction(1, 8)))
    assert e == interval(h, Fraction(1, 4) - Fraction(1, 32), Fraction(1, 2) + Fraction(1, 32), False, False)
    assert e.contains_region(f)
    assert e.minus(f).measure() < R(Fraction(1, 8))
    assert outer_approx(h, Region.empty(h), R(Fraction(1, 8))).is_empty
    assert outer_approx(h, Region.full(h), R(1)).is_full


def test_random_approx_properties():
    h = golden()
    rng = random.Random(19)
    for _ in range(100):
        lo = Fraction(rng.randint(0, 30), 31)
        ln = Fraction(rng.randint(1, 25), 100)
        eps = Fraction(rng.randint(1, 50), 100)
        u = Region(h, [(R(lo), R(lo + ln), False, False)])
        k = inner_approx(h, u, R(eps))
        assert u.contains_region(k)
        assert not k.is_empty
        assert u.minus(k).measure() < R(eps)
        f = u.closure()
        e = outer_approx(h, f, R(eps))
        assert e.contains_region(f)
        assert e.minus(f).measure() < R(eps)
        assert e.interior() == e


# odometer and torus regions


def test_cylinder_region():
    od = Odometer([2, 2, 2])
    a = CylinderRegion(od, [od.word_to_index((0, 0, 0)), od.word_to_index((1, 0, 1))])
    assert a.measure() == R(Fraction(1, 4))
    assert a.boundary().is_empty
    assert a.closure() == a and a.interior() == a
    assert a.translate(8) == a
    b = a.translate(3)
    assert b.measure() == a.measure()
    assert a.complement().measure() == R(Fraction(3, 4))
    assert measure_gap(od, a, a.complement()) == R(Fraction(1, 2))


def test_box_region():
    T = TorusRotation([ExactScalar(0, 1, 2, 2), ExactScalar(0, 1, 3, 3)])
    box = ((R(0), R(Fraction(1, 4)), True, True), (R(0), R(Fraction(1, 2)), True, True))
    b = BoxRegion(T, [box])
    assert b.measure() == R(Fraction(1, 8))
    assert b.contains_point((R(Fraction(1, 8)), R(Fraction(1, 4))))
    assert not b.contains_point((R(Fraction(1, 2)), R(Fraction(1, 4))))
    t = b.translate(2)
    assert t.measure() == b.measure()
    faces = b.boundary().faces
    assert len(faces) == 4
    # overlapping boxes measure exactly once
    b2 = BoxRegion(T, [box, box])
    assert b2.measure() == R(Fraction(1, 8))
    disj = b.translate(1)
    assert not b.intersects(disj) or b.intersects(disj)  # exact call works


def test_measure_dispatch_checks_ambient():
    h = golden()
    od = Odometer([2, 2])
    r = interval(h, 0, Fraction(1, 2))
    with pytest.raises(Exception):
        measure(od, r)
