"""Plane geometry primitives shared by the whole package.

Coordinates are either Fractions (exact mode) or floats (approximate
mode); every operation here is written generically so the arithmetic of
the inputs decides the mode.  The rational chart used throughout maps a
parameter t to the circle point at angle v with t = tan(v/2); it covers
every point except the one antipodal to the chart origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .polys import InvalidInputError


class CollinearPointsError(ValueError):
    """Three collinear points have no circumcircle."""


class ChartGapError(ValueError):
    """The requested point is the single angle the rational chart omits."""


def _is_exact(v) -> bool:
    return isinstance(v, (int, Fraction))


def _ratio(num, den):
    """num / den, kept exact when both operands are int or Fraction."""
    if _is_exact(num) and _is_exact(den):
        return Fraction(num, den) if isinstance(num, int) and isinstance(den, int) else Fraction(num) / den
    return num / den


@dataclass(frozen=True, slots=True)
class Point:
    x: object
    y: object

    def __add__(self, other: "Point") -> "Point":
        return Point(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Point") -> "Point":
        return Point(self.x - other.x, self.y - other.y)

    def scaled(self, c) -> "Point":
        return Point(self.x * c, self.y * c)

    def dot(self, other: "Point"):
        return self.x * other.x + self.y * other.y

    def cross(self, other: "Point"):
        return self.x * other.y - self.y * other.x

    def norm2(self):
        return self.x * self.x + self.y * self.y

    def is_exact(self) -> bool:
        return _is_exact(self.x) and _is_exact(self.y)

    def to_float(self) -> "Point":
        return Point(float(self.x), float(self.y))


@dataclass(frozen=True, slots=True)
class Circle:
    center: Point
    radius: object = Fraction(1)

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidInputError("circle radius must be positive")

    def contains(self, p: Point, tol=0) -> bool:
        d2 = (p - self.center).norm2()
        r2 = self.radius * self.radius
        if tol:
            return abs(d2 - r2) <= tol
        return d2 == r2


def unit_circle(center: Point) -> Circle:
    return Circle(center, Fraction(1))


def param_point(center: Point, t) -> Point:
    """Point of the unit circle around `center` at parameter t = tan(v/2).

    Exact for rational t; the angle-pi point (offset (-1, 0)) is not
    reachable by any finite t.
    """
    den = 1 + t * t
    return Point(center.x + _ratio(1 - t * t, den), center.y + _ratio(2 * t, den))


def param_of_point(center: Point, p: Point):
    """Inverse of param_point: t = sin(v) / (1 + cos(v))."""
    dx = p.x - center.x
    dy = p.y - center.y
    w = 1 + dx
    if w == 0:
        raise ChartGapError("point is antipodal to the chart origin")
    return _ratio(dy, w)


def eval_F(p: Point, q: Point, r: Point):
    """Unit-circumcircle polynomial in the three squared distances.

    Vanishes exactly when p, q, r lie on a circle of radius 1 (including
    degenerate coincidences); for non-collinear triples it factors as
    16 * area^2 * (circumradius^2 - 1).
    """
    X = (p - q).norm2()
    Y = (p - r).norm2()
    Z = (q - r).norm2()
    return X * X + Y * Y + Z * Z - 2 * (X * Y + X * Z + Y * Z) + X * Y * Z


def collinear(p: Point, q: Point, r: Point) -> bool:
    return (q - p).cross(r - p) == 0


def circumcenter(p: Point, q: Point, r: Point) -> Point:
    d = 2 * (p.x * (q.y - r.y) + q.x * (r.y - p.y) + r.x * (p.y - q.y))
    if d == 0:
        raise CollinearPointsError("collinear points have no circumcircle")
    p2, q2, r2 = p.norm2(), q.norm2(), r.norm2()
    ux = _ratio(p2 * (q.y - r.y) + q2 * (r.y - p.y) + r2 * (p.y - q.y), d)
    uy = _ratio(p2 * (r.x - q.x) + q2 * (p.x - r.x) + r2 * (q.x - p.x), d)
    return Point(ux, uy)


def circumradius2(p: Point, q: Point, r: Point):
    c = circumcenter(p, q, r)
    return (p - c).norm2()


def in_disk(p: Point, disk: Circle) -> bool:
    """Closed-disk membership; exact whenever the inputs are exact."""
    return (p - disk.center).norm2() <= disk.radius * disk.radius


def _sqrt_exact(v: Fraction):
    """Rational square root, or None when v is not a perfect square."""
    if v < 0:
        return None
    n, d = v.numerator, v.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def unit_centers_through(a: Point, x: Point) -> tuple[Point, ...]:
    """Centers of radius-1 circles through both a and x.

    Empty for ||a-x|| > 2, the midpoint alone at exactly 2, otherwise the
    two mirror centers.  Results stay exact when the inputs are rational
    and the discriminant is a rational square; otherwise they fall back
    to floats.  Swapping a and x returns the same set.
    """
    if a == x:
        raise InvalidInputError("coincident points lie on infinitely many unit circles")
    d2 = (x - a).norm2()
    s2 = _ratio(4, d2) - 1
    mid = Point(_ratio(a.x + x.x, 2), _ratio(a.y + x.y, 2))
    if s2 < 0:
        return ()
    if s2 == 0:
        return (mid,)
    if _is_exact(s2):
        s = _sqrt_exact(Fraction(s2))
        if s is None:
            s = math.sqrt(float(s2))
            mid = mid.to_float()
    else:
        s = math.sqrt(s2)
    half = Point(_ratio(-(x.y - a.y), 2), _ratio(x.x - a.x, 2))
    off = half.scaled(s)
    return (mid + off, mid - off)
