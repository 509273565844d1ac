"""Exact univariate polynomial algebra over the rationals.

Polynomials are dense coefficient sequences of Fractions, lowest degree
first, trimmed so the leading coefficient is nonzero.  The zero
polynomial has no coefficients and degree -1.  Everything in this module
is exact: no floats, no rounding.

Provided machinery: arithmetic, exact division, monic gcd (primitive
pseudo-remainder sequences under the hood), square-free parts, Sturm
real-root counting with isolating-interval refinement, Cauchy root
bounds, Sylvester resultants via fraction-free integer elimination, and
Lagrange/Newton interpolation.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as _int_gcd


class DegenerateInputError(ValueError):
    """An operation received an input it is mathematically undefined for."""


class InvalidInputError(ValueError):
    """Arguments violate an operation's preconditions."""


def _coerce(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise InvalidInputError(f"expected an exact rational coefficient, got {value!r}")


class UniPoly:
    """Dense univariate polynomial over Q, coefficients lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [_coerce(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("UniPoly is immutable")

    def __getstate__(self):
        return self.coeffs

    def __setstate__(self, state):
        object.__setattr__(self, "coeffs", tuple(state))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> Fraction:
        if self.is_zero:
            raise DegenerateInputError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __eq__(self, other):
        return isinstance(other, UniPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"UniPoly({list(self.coeffs)!r})"

    def __neg__(self):
        return UniPoly(-c for c in self.coeffs)

    def __add__(self, other):
        if not isinstance(other, UniPoly):
            other = UniPoly([other])
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return UniPoly(out)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, UniPoly):
            other = UniPoly([other])
        return self + (-other)

    def __rsub__(self, other):
        return UniPoly([other]) + (-self)

    def __mul__(self, other):
        if isinstance(other, UniPoly):
            if self.is_zero or other.is_zero:
                return UniPoly()
            out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                if a:
                    for j, b in enumerate(other.coeffs):
                        out[i + j] += a * b
            return UniPoly(out)
        c = _coerce(other)
        return UniPoly(a * c for a in self.coeffs)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise InvalidInputError("polynomial powers must be nonnegative integers")
        result = UniPoly([1])
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "UniPoly":
        return UniPoly(i * c for i, c in enumerate(self.coeffs) if i)

    def monic(self) -> "UniPoly":
        if self.is_zero:
            raise DegenerateInputError("cannot normalize the zero polynomial")
        lc = self.lead
        if lc == 1:
            return self
        return UniPoly(c / lc for c in self.coeffs)

    def divmod(self, other: "UniPoly"):
        """Exact long division: self = q*other + r with deg r < deg other."""
        if other.is_zero:
            raise DegenerateInputError("division by the zero polynomial")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return UniPoly(), self
        quo = [Fraction(0)] * (dq + 1)
        oc = other.coeffs
        lc = oc[-1]
        for k in range(dq, -1, -1):
            c = rem[k + len(oc) - 1] / lc
            quo[k] = c
            if c:
                for j, b in enumerate(oc):
                    rem[k + j] -= c * b
        return UniPoly(quo), UniPoly(rem)

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]


def _int_coeffs(p: UniPoly) -> list[int]:
    """Clear denominators and strip content; sign of the lead is kept positive."""
    if p.is_zero:
        return []
    den = 1
    for c in p.coeffs:
        den = den * c.denominator // _int_gcd(den, c.denominator)
    ints = [int(c * den) for c in p.coeffs]
    g = 0
    for v in ints:
        g = _int_gcd(g, v)
    if g > 1:
        ints = [v // g for v in ints]
    if ints[-1] < 0:
        ints = [-v for v in ints]
    return ints


def _int_content_strip(ints: list[int]) -> list[int]:
    while ints and ints[-1] == 0:
        ints.pop()
    if not ints:
        return ints
    g = 0
    for v in ints:
        g = _int_gcd(g, v)
    if g > 1:
        ints = [v // g for v in ints]
    return ints


def _prem(a: list[int], b: list[int]) -> list[int]:
    """Pseudo-remainder: lc(b)^(da-db+1) * a modulo b, over the integers.

    The scale factor is exactly lc(b)^(da-db+1), which the Sturm chain
    relies on to fix signs.
    """
    da, db = len(a) - 1, len(b) - 1
    if da < db:
        return list(a)
    lb = b[-1]
    rem = list(a)
    scalings = da - db + 1
    while rem and len(rem) - 1 >= db:
        top = rem[-1]
        shift = len(rem) - 1 - db
        scalings -= 1
        rem = [lb * v for v in rem]
        for j, c in enumerate(b):
            rem[shift + j] -= top * c
        while rem and rem[-1] == 0:
            rem.pop()
    if rem and scalings > 0:
        s = lb**scalings
        rem = [s * v for v in rem]
    return rem


def poly_gcd(p: UniPoly, q: UniPoly) -> UniPoly:
    """Monic gcd of two polynomials over Q.

    Uses a primitive pseudo-remainder sequence over the integers to keep
    coefficient growth in check, then normalizes the result monic.
    gcd(0, 0) is undefined.
    """
    if p.is_zero and q.is_zero:
        raise DegenerateInputError("gcd(0, 0) is undefined")
    if p.is_zero:
        return q.monic()
    if q.is_zero:
        return p.monic()
    a, b = _int_coeffs(p), _int_coeffs(q)
    if len(a) < len(b):
        a, b = b, a
    while b:
        a, b = b, _int_content_strip(_prem(a, b))
    return UniPoly(a).monic()


def squarefree_part(p: UniPoly) -> UniPoly:
    """p divided by gcd(p, p'): same roots, all simple, monic."""
    if p.is_zero:
        raise DegenerateInputError("zero polynomial has no square-free part")
    if p.degree == 0:
        return UniPoly([1])
    g = poly_gcd(p, p.derivative())
    q, r = p.divmod(g)
    if not r.is_zero:
        raise AssertionError("gcd division left a remainder")
    return q.monic()


def cauchy_root_bound(p: UniPoly) -> Fraction:
    """A rational B with every real root of p strictly inside (-B, B)."""
    if p.is_zero or p.degree == 0:
        raise DegenerateInputError("root bound needs degree >= 1")
    lead = abs(p.coeffs[-1])
    top = max(abs(c) for c in p.coeffs[:-1])
    return Fraction(top, lead) + 2


def _sign_at(ints: list[int], x: Fraction) -> int:
    """Sign of the integer-coefficient polynomial at rational x, exactly.

    Evaluates p(a/b) * b^deg, which is an integer, so only integer
    arithmetic is involved.
    """
    a, b = x.numerator, x.denominator
    acc = 0
    bp = 1
    for c in reversed(ints):
        acc = acc * a + c * bp
        bp *= b
    return (acc > 0) - (acc < 0)


def _sturm_chain(p: UniPoly) -> list[list[int]]:
    sf = _int_coeffs(squarefree_part(p))
    chain = [sf]
    d = [i * c for i, c in enumerate(sf)][1:]
    chain.append(_int_content_strip(d))
    while len(chain[-1]) > 1:
        a, b = chain[-2], chain[-1]
        rem = _prem(a, b)
        # prem = lc(b)^(da-db+1) * remainder; flip sign so the chain entry
        # is a positive multiple of the negated true remainder
        delta = len(a) - len(b) + 1
        if chain[-1][-1] > 0 or delta % 2 == 0:
            rem = [-v for v in rem]
        rem = _int_content_strip(rem)
        if not rem:
            break
        chain.append(rem)
    return chain


def _variations(chain: list[list[int]], x: Fraction) -> int:
    signs = []
    for ints in chain:
        s = _sign_at(ints, x)
        if s:
            signs.append(s)
    return sum(1 for u, v in zip(signs, signs[1:]) if u != v)


def _split_points(lo: Fraction, hi: Fraction):
    span = hi - lo
    for den in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43):
        for num in range(1, den):
            if _int_gcd(num, den) == 1:
                yield lo + span * Fraction(num, den)


class RootIsolation:
    """Count plus pairwise-disjoint rational intervals, one root in each.

    Interval semantics are half-open (lo, hi]; endpoints are never roots
    of the square-free part except possibly a user-supplied upper bound.
    """

    __slots__ = ("count", "intervals")

    def __init__(self, count: int, intervals):
        self.count = count
        self.intervals = tuple(intervals)

    def __iter__(self):
        return iter((self.count, self.intervals))

    def __repr__(self):
        return f"RootIsolation(count={self.count}, intervals={list(self.intervals)})"


def sturm_real_roots(p: UniPoly, lo=None, hi=None, width=None) -> RootIsolation:
    """Count distinct real roots of p in (lo, hi] and isolate them.

    None bounds mean -/+ infinity (realized through a Cauchy bound).
    Multiplicities are collapsed via the square-free part.  If `width` is
    given, every isolating interval is refined by bisection until
    hi - lo <= width.
    """
    if p.is_zero:
        raise DegenerateInputError("the zero polynomial has every point as a root")
    if p.degree == 0:
        return RootIsolation(0, ())
    chain = _sturm_chain(p)
    bound = cauchy_root_bound(p)
    flo = -bound if lo is None else Fraction(lo)
    fhi = bound if hi is None else Fraction(hi)
    if flo > fhi:
        raise InvalidInputError("lower bound exceeds upper bound")
    if lo is not None and flo < -bound:
        flo = -bound
    if hi is not None and fhi > bound:
        fhi = bound
    if flo >= fhi:
        # interval beyond the root bound on one side
        total = 0
        return RootIsolation(total, ())
    sf = chain[0]

    def count_between(a: Fraction, b: Fraction) -> int:
        return _variations(chain, a) - _variations(chain, b)

    total = count_between(flo, fhi)
    intervals = []
    stack = [(flo, fhi, total)]
    while stack:
        a, b, cnt = stack.pop()
        if cnt == 0:
            continue
        if cnt == 1:
            intervals.append((a, b))
            continue
        for m in _split_points(a, b):
            if _sign_at(sf, m) != 0:
                break
        else:  # pragma: no cover - more candidates than possible roots
            raise AssertionError("could not find a root-free split point")
        left = count_between(a, m)
        stack.append((a, m, left))
        stack.append((m, b, cnt - left))

    if width is not None:
        refined = []
        w = Fraction(width)
        for a, b in intervals:
            while b - a > w:
                for m in _split_points(a, b):
                    if _sign_at(sf, m) != 0:
                        break
                else:  # pragma: no cover
                    raise AssertionError("could not find a root-free split point")
                if count_between(a, m) == 1:
                    b = m
                else:
                    a = m
            refined.append((a, b))
        intervals = refined

    intervals.sort(key=lambda iv: iv[0])
    return RootIsolation(total, intervals)


def count_real_roots(p: UniPoly, lo=None, hi=None) -> int:
    return sturm_real_roots(p, lo, hi).count


def _bareiss_det(m: list[list[int]]) -> int:
    """Fraction-free determinant of a square integer matrix (destructive)."""
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        row_k = m[k]
        for i in range(k + 1, n):
            row_i = m[i]
            mik = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - mik * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
    return sign * m[-1][-1]


def _clear_denominators(p: UniPoly) -> tuple[list[int], int]:
    den = 1
    for c in p.coeffs:
        den = den * c.denominator // _int_gcd(den, c.denominator)
    return [int(c * den) for c in p.coeffs], den


def sylvester_resultant(p: UniPoly, q: UniPoly) -> Fraction:
    """Resultant of p and q via the Sylvester matrix.

    Degrees are the formal degrees after trimming.  Zero iff p and q
    share a complex root (given nonzero inputs).  Two nonzero constants
    give 1 by the empty-matrix convention; a zero input is an error.
    """
    if p.is_zero or q.is_zero:
        raise DegenerateInputError("resultant of the zero polynomial is undefined")
    m, n = p.degree, q.degree
    if m == 0 and n == 0:
        return Fraction(1)
    if m == 0:
        return p.coeffs[0] ** n
    if n == 0:
        return q.coeffs[0] ** m
    pi, pden = _clear_denominators(p)
    qi, qden = _clear_denominators(q)
    det = _bareiss_det(_sylvester_matrix(pi, qi))
    return Fraction(det, pden**n * qden**m)


def _sylvester_matrix(pc: list[int], qc: list[int]) -> list[list[int]]:
    m, n = len(pc) - 1, len(qc) - 1
    size = m + n
    prow = list(reversed(pc))
    qrow = list(reversed(qc))
    rows = []
    for i in range(n):
        rows.append([0] * i + prow + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + qrow + [0] * (size - n - 1 - i))
    return rows


def interpolate(points) -> UniPoly:
    """Unique polynomial of degree < len(points) through the given (x, y).

    Newton's divided differences over Fractions.  Repeated abscissae are
    rejected.
    """
    pts = [(Fraction(x), Fraction(y)) for x, y in points]
    if not pts:
        raise InvalidInputError("interpolation needs at least one point")
    xs = [x for x, _ in pts]
    if len(set(xs)) != len(xs):
        raise InvalidInputError("interpolation abscissae must be distinct")
    coef = [y for _, y in pts]
    for j in range(1, len(pts)):
        for i in range(len(pts) - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    result = UniPoly()
    basis = UniPoly([1])
    for j, c in enumerate(coef):
        result = result + basis * c
        basis = basis * UniPoly([-xs[j], 1])
    return result
