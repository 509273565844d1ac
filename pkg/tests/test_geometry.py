import math
import random
from fractions import Fraction

import pytest

from tricircles.geometry import (
    ChartGapError,
    Circle,
    CollinearPointsError,
    Point,
    circumcenter,
    circumradius2,
    collinear,
    eval_F,
    in_disk,
    param_of_point,
    param_point,
    unit_centers_through,
)
from tricircles.polys import InvalidInputError


def FP(x, y):
    return Point(Fraction(x), Fraction(y))


def rand_fraction(rng, span=4, den=8):
    return Fraction(rng.randint(-span * den, span * den), den)


def rand_point(rng):
    return Point(rand_fraction(rng), rand_fraction(rng))


def test_point_arithmetic_stays_exact():
    p = FP(1, 2)
    q = Point(Fraction(1, 3), Fraction(-1, 2))
    s = p + q
    assert s == Point(Fraction(4, 3), Fraction(3, 2))
    assert (p - q).cross(q) == p.cross(q)
    assert p.dot(q) == Fraction(1, 3) - 1
    assert p.norm2() == 5
    assert p.scaled(Fraction(1, 2)) == Point(Fraction(1, 2), 1)
    assert p.is_exact()
    assert not p.to_float().is_exact()
    with pytest.raises(AttributeError):
        p.x = 3


def test_circle_membership():
    c = Circle(FP(0, 0), Fraction(5))
    assert c.contains(FP(3, 4))
    assert not c.contains(FP(3, 3))
    assert c.contains(Point(3.0001, 4.0), tol=1e-3)
    with pytest.raises(InvalidInputError):
        Circle(FP(0, 0), 0)


def test_param_point_frozen_values():
    c = FP(0, 0)
    assert param_point(c, Fraction(0)) == FP(1, 0)
    assert param_point(c, Fraction(1)) == FP(0, 1)
    assert param_point(c, Fraction(-1)) == FP(0, -1)
    assert param_point(c, Fraction(1, 2)) == Point(Fraction(3, 5), Fraction(4, 5))


def test_param_point_lands_on_circle():
    rng = random.Random(41)
    for _ in range(200):
        c = rand_point(rng)
        t = rand_fraction(rng, span=9, den=16)
        p = param_point(c, t)
        assert (p - c).norm2() == 1
        assert param_of_point(c, p) == t


def test_param_chart_gap():
    c = FP(2, 3)
    with pytest.raises(ChartGapError):
        param_of_point(c, FP(1, 3))


def test_eval_F_frozen_values():
    # Squared distances 1, 4, 1 between three horizontal points:
    # 1 + 16 + 1 - 2*(4 + 1 + 4) + 4 = 4.
    assert eval_F(FP(0, 0), FP(1, 0), FP(2, 0)) == 4
    # X=16, Y=8, Z=8: 256+64+64 - 2*(128+128+64) + 1024 = 768.
    assert eval_F(FP(2, 0), FP(-2, 0), FP(0, 2)) == 768
    # Inscribed in the unit circle at the origin.
    assert eval_F(FP(1, 0), FP(0, 1), FP(-1, 0)) == 0
    assert eval_F(FP(1, 0), Point(Fraction(3, 5), Fraction(4, 5)), FP(0, -1)) == 0


def test_eval_F_symmetry():
    rng = random.Random(42)
    import itertools

    for _ in range(50):
        p, q, r = rand_point(rng), rand_point(rng), rand_point(rng)
        vals = {eval_F(*perm) for perm in itertools.permutations((p, q, r))}
        assert len(vals) == 1


def test_eval_F_area_radius_identity():
    # For non-collinear triples F equals 16 S^2 (R^2 - 1) with S the
    # triangle area and R the circumradius.
    rng = random.Random(43)
    checked = 0
    while checked < 1000:
        p, q, r = rand_point(rng), rand_point(rng), rand_point(rng)
        if collinear(p, q, r):
            continue
        s2 = (q - p).cross(r - p) ** 2 / 4
        assert eval_F(p, q, r) == 16 * s2 * (circumradius2(p, q, r) - 1)
        checked += 1


def test_eval_F_collinear_distinct_is_positive():
    rng = random.Random(44)
    for _ in range(100):
        p = rand_point(rng)
        d = rand_point(rng)
        if d == FP(0, 0):
            continue
        u, v = rand_fraction(rng), rand_fraction(rng)
        if u == 0 or v == 0 or u == v:
            continue
        q = p + d.scaled(u)
        r = p + d.scaled(v)
        assert collinear(p, q, r)
        assert eval_F(p, q, r) > 0


def test_circumcenter_frozen_value():
    c = circumcenter(
        Point(Fraction(8, 5), Fraction(9, 5)),
        Point(Fraction(-2, 5), Fraction(9, 5)),
        FP(0, 1),
    )
    assert c == Point(Fraction(3, 5), Fraction(9, 5))
    with pytest.raises(CollinearPointsError):
        circumcenter(FP(0, 0), FP(1, 1), FP(2, 2))


def test_circumcenter_equidistance_random():
    rng = random.Random(45)
    checked = 0
    while checked < 200:
        p, q, r = rand_point(rng), rand_point(rng), rand_point(rng)
        if collinear(p, q, r):
            continue
        c = circumcenter(p, q, r)
        assert (p - c).norm2() == (q - c).norm2() == (r - c).norm2()
        checked += 1


def test_unit_centers_frozen_values():
    got = unit_centers_through(FP(0, 0), FP(1, 1))
    assert got == (FP(0, 1), FP(1, 0))
    assert all(pt.is_exact() for pt in got)
    # Diametrically opposite points: single midpoint center.
    assert unit_centers_through(FP(0, 0), FP(2, 0)) == (FP(1, 0),)
    # Too far apart: no unit circle through both.
    assert unit_centers_through(FP(0, 0), FP(3, 0)) == ()
    with pytest.raises(InvalidInputError):
        unit_centers_through(FP(1, 2), FP(1, 2))


def test_unit_centers_swap_symmetry_and_validity():
    rng = random.Random(46)
    found_pair = 0
    while found_pair < 100:
        a, x = rand_point(rng), rand_point(rng)
        if a == x or (x - a).norm2() > 4:
            continue
        centers = unit_centers_through(a, x)
        assert set(centers) == set(unit_centers_through(x, a))
        for c in centers:
            if c.is_exact():
                assert (a - c).norm2() == 1 and (x - c).norm2() == 1
            else:
                assert math.isclose(float((a - c).norm2()), 1.0, abs_tol=1e-12)
                assert math.isclose(float((x - c).norm2()), 1.0, abs_tol=1e-12)
        if len(centers) == 2:
            found_pair += 1


def test_unit_centers_float_fallback():
    centers = unit_centers_through(FP(0, 0), FP(1, 0))
    assert len(centers) == 2
    assert not centers[0].is_exact()
    for c in centers:
        assert math.isclose(float((c - FP(0, 0)).norm2()), 1.0, abs_tol=1e-12)


def test_in_disk():
    d = Circle(FP(0, 0), Fraction(2))
    assert in_disk(FP(2, 0), d)
    assert in_disk(FP(1, 1), d)
    assert not in_disk(Point(Fraction(2), Fraction(1, 100)), d)
