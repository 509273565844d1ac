"""Plane curves carved out by shared third points of unit triples.

For fixed points a, b on the first circle, the set of parameter pairs
(t_x, t_y) whose C2 points extend a and b to two unit triples with a
common third point on C3 is an algebraic curve: the resultant in t3 of
the two specialized quartics vanishes.  This module evaluates that
resultant exactly, classifies curve points by the realness of the
shared root, recovers fibers as interpolated univariate polynomials,
locates real/non-real transitions along traced arcs, and audits curve
pairs for shared components by counting common zeros against a Bezout
threshold.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .geometry import Point, param_point
from .phi import (
    ConstructionFailedError,
    DegeneracyReport,
    PhiChain,
    TraceResult,
    _nearest_branches,
    classify_degeneracy,
    phi_chain_apply,
    ultra_pair_candidate,
)
from .polys import (
    InvalidInputError,
    UniPoly,
    interpolate,
    poly_gcd,
    squarefree_part,
    sturm_real_roots,
    sylvester_resultant,
)

# Cleared specializations have degree <= 4 in t3, so a fiber of the
# resultant curve has degree <= 4 * 4 = 16 in each plane variable; the
# bound is attained generically (verified empirically across random
# configurations).  The audit constants follow the Bezout reasoning:
# two degree-16 curves without a common component meet in at most 16^2
# points, so seeing more forces a shared component.
FIBER_DEGREE_BOUND = 16
CURVE_DEGREE = 16
AUDIT_THRESHOLD = CURVE_DEGREE * CURVE_DEGREE + 1
AUDIT_ABSCISSAE = 2 * CURVE_DEGREE * CURVE_DEGREE + 1


class DegenerateSpecializationError(ValueError):
    """A specialized quartic vanished identically; the probe is excluded."""


class PointClass(Enum):
    NOT_ON_CURVE = "not-on-curve"
    REAL_ARC = "real-arc"
    NON_REAL_ARC = "non-real-arc"


@dataclass(frozen=True, slots=True)
class CurveRef:
    """Curve selector: base-point parameters plus the plane it lives in.

    role_swap False: base points on C1, probe plane is C2 x C2.
    role_swap True: base points on C2, probe plane is C1 x C1 (dual).
    """

    t_a: Fraction
    t_b: Fraction
    role_swap: bool = False


@dataclass(frozen=True, slots=True)
class SpecializedF:
    t1: Fraction
    t2: Fraction
    poly: UniPoly


@dataclass(frozen=True, slots=True)
class FiberResult:
    poly: UniPoly
    vertical: bool
    clearing_exponent: int
    abscissae: tuple


@dataclass(frozen=True, slots=True)
class FiberTable:
    """Bivariate coefficient table of the cleared resultant surface.

    coeff_polys[k] is the polynomial in t_x multiplying t_y^k; fiber_at
    evaluates a whole column cheaply.  Columns differ from raw fibers by
    the strictly positive factor (1 + t_x^2)^(2 dB), so zero sets and
    signs at rational points are unchanged.
    """

    coeff_polys: tuple
    a_degree: int
    b_degree: int

    def fiber_at(self, x) -> UniPoly:
        x = Fraction(x)
        return UniPoly([p(x) for p in self.coeff_polys])


@dataclass(frozen=True, slots=True)
class Transition:
    t_x: float
    bracket: tuple
    failing_step: int
    annotations: tuple
    reports: tuple


def _rational_stream(den: int = 16, avoid=()):
    """0, 1/den, -1/den, 2/den, ... skipping the avoid set."""
    banned = {Fraction(v) for v in avoid}
    k = 0
    while True:
        candidates = (Fraction(0),) if k == 0 else (Fraction(k, den), Fraction(-k, den))
        for c in candidates:
            if c not in banned:
                yield c
        k += 1


class CurveFamily:
    """All curves attached to one ordered triple of unit-circle centers."""

    def __init__(self, c1: Point, c2: Point, c3: Point):
        for c in (c1, c2, c3):
            if not c.is_exact():
                raise InvalidInputError("circle centers must be rational")
        self.c1 = c1
        self.c2 = c2
        self.c3 = c3
        self._spec_cache: dict = {}
        self._table_cache: dict = {}

    def _cleared_sqdist(self, p: Point) -> UniPoly:
        # (1 + t^2) * ||p - z(t)||^2 for z running over C3, as a quadratic in t.
        d = p - self.c3
        d2 = d.norm2()
        return UniPoly([d2 + 1 - 2 * d.x, -4 * d.y, d2 + 1 + 2 * d.x])

    def specialize(self, t1, t2) -> SpecializedF:
        """Quartic in t3 equal to (1 + t3^2)^2 F(P1(t1), P2(t2), P3(t3)).

        Identically zero exactly when the two base points coincide or
        both lie on C3 (then every t3 completes a unit triple).
        """
        key = (Fraction(t1), Fraction(t2))
        hit = self._spec_cache.get(key)
        if hit is not None:
            return hit
        t1, t2 = key
        p1 = param_point(self.c1, t1)
        p2 = param_point(self.c2, t2)
        X = (p1 - p2).norm2()
        Yt = self._cleared_sqdist(p1)
        Zt = self._cleared_sqdist(p2)
        q = UniPoly([1, 0, 1])
        poly = (
            (X * X) * (q * q)
            + Yt * Yt
            + Zt * Zt
            - (2 * X) * (Yt * q)
            - (2 * X) * (Zt * q)
            - 2 * (Yt * Zt)
            + X * (Yt * Zt)
        )
        result = SpecializedF(t1, t2, poly)
        self._spec_cache[key] = result
        return result

    def _pair(self, ref: CurveRef, t_x, t_y):
        if ref.role_swap:
            return self.specialize(t_x, ref.t_a), self.specialize(t_y, ref.t_b)
        return self.specialize(ref.t_a, t_x), self.specialize(ref.t_b, t_y)

    def curve_eval(self, ref: CurveRef, t_x, t_y) -> Fraction:
        """Resultant of the two specializations; zero iff they share a
        complex root, i.e. iff (t_x, t_y) lies on the curve."""
        A, B = self._pair(ref, t_x, t_y)
        if A.poly.is_zero:
            raise DegenerateSpecializationError(
                f"specialization at (t={A.t1}, t={A.t2}) is identically zero"
            )
        if B.poly.is_zero:
            raise DegenerateSpecializationError(
                f"specialization at (t={B.t1}, t={B.t2}) is identically zero"
            )
        return sylvester_resultant(A.poly, B.poly)

    def classify_point(self, ref: CurveRef, t_x, t_y) -> PointClass:
        """Curve membership refined by the realness of the shared root."""
        A, B = self._pair(ref, t_x, t_y)
        value = self.curve_eval(ref, t_x, t_y)
        if value != 0:
            return PointClass.NOT_ON_CURVE
        g = poly_gcd(A.poly, B.poly)
        if g.degree < 1:
            raise InvalidInputError("vanishing resultant with trivial gcd")
        roots = sturm_real_roots(g)
        return PointClass.REAL_ARC if roots.count >= 1 else PointClass.NON_REAL_ARC

    def _b_specialization(self, ref: CurveRef, rho: Fraction) -> UniPoly:
        if ref.role_swap:
            return self.specialize(rho, ref.t_b).poly
        return self.specialize(ref.t_b, rho).poly

    def _a_specialization(self, ref: CurveRef, x: Fraction) -> UniPoly:
        if ref.role_swap:
            return self.specialize(x, ref.t_a).poly
        return self.specialize(ref.t_a, x).poly

    def _collect(self, fetch, count, require_degree=None, avoid=()):
        """Draw (value, poly) samples from fetch, skipping zero polys and,
        when require_degree is set, any degree-dropped samples."""
        stream = _rational_stream(16, avoid)
        out = []
        scanned = 0
        limit = 64 * (count + 4)
        while len(out) < count:
            if scanned >= limit:
                raise DegenerateSpecializationError(
                    "could not collect enough nondegenerate specializations"
                )
            v = next(stream)
            scanned += 1
            poly = fetch(v)
            if poly.is_zero:
                continue
            if require_degree is not None and poly.degree != require_degree:
                continue
            out.append((v, poly))
        return out

    def _fiber_core(self, A: UniPoly, bsamples, degree_bound: int, held_out: int):
        clearing = 2 * A.degree
        pts = []
        for rho, B in bsamples[: degree_bound + 1 + held_out]:
            val = sylvester_resultant(A, B)
            pts.append((rho, (1 + rho * rho) ** clearing * val))
        fit = interpolate(pts[: degree_bound + 1])
        for rho, val in pts[degree_bound + 1 :]:
            if fit(rho) != val:
                raise InvalidInputError("fiber degree bound too small for this curve")
        return fit, clearing, tuple(r for r, _ in pts[: degree_bound + 1])

    def curve_fiber(
        self, ref: CurveRef, t_x, degree_bound: int = FIBER_DEGREE_BOUND, held_out: int = 3
    ) -> FiberResult:
        """The one-variable slice {t_y : (t_x, t_y) on the curve} as a
        polynomial, recovered by exact evaluation plus interpolation.

        Samples at degree-dropped ordinates are skipped so all retained
        resultants share one formal degree; the cleared values carry the
        strictly positive factor (1 + t_y^2)^(2 deg A), so real roots
        and signs match the pointwise resultant.  A held-out sample
        check guards the degree bound.
        """
        t_x = Fraction(t_x)
        A = self._a_specialization(ref, t_x)
        if A.is_zero:
            return FiberResult(UniPoly([]), True, 0, ())
        need = degree_bound + 1 + held_out
        first = self._collect(lambda v: self._b_specialization(ref, v), need)
        generic = max(b.degree for _, b in first)
        good = [(v, b) for v, b in first if b.degree == generic]
        if len(good) < need:
            good = self._collect(
                lambda v: self._b_specialization(ref, v), need, require_degree=generic
            )
        fit, clearing, used = self._fiber_core(A, good, degree_bound, held_out)
        return FiberResult(fit, fit.is_zero, clearing, used)

    def fiber_table(self, ref: CurveRef, degree_bound: int = FIBER_DEGREE_BOUND) -> FiberTable:
        """Interpolate whole fiber columns into a bivariate coefficient
        table so later columns cost only polynomial evaluation."""
        cached = self._table_cache.get(ref)
        if cached is not None:
            return cached
        need_cols = degree_bound + 1 + 2
        bneed = degree_bound + 1 + 3
        bfirst = self._collect(lambda v: self._b_specialization(ref, v), bneed)
        b_generic = max(b.degree for _, b in bfirst)
        bsamples = [(v, b) for v, b in bfirst if b.degree == b_generic]
        if len(bsamples) < bneed:
            bsamples = self._collect(
                lambda v: self._b_specialization(ref, v), bneed, require_degree=b_generic
            )
        afirst = self._collect(lambda v: self._a_specialization(ref, v), need_cols)
        a_generic = max(a.degree for _, a in afirst)
        acols = [(v, a) for v, a in afirst if a.degree == a_generic]
        if len(acols) < need_cols:
            acols = self._collect(
                lambda v: self._a_specialization(ref, v), need_cols, require_degree=a_generic
            )
        scale_exp = 2 * b_generic
        columns = []
        for x, A in acols:
            fit, _, _ = self._fiber_core(A, bsamples, degree_bound, held_out=3)
            columns.append((x, (1 + x * x) ** scale_exp * fit))
        fit_cols, check_cols = columns[: degree_bound + 1], columns[degree_bound + 1 :]
        coeff_polys = []
        for k in range(degree_bound + 1):
            pts = [
                (x, col.coeffs[k] if k <= col.degree else Fraction(0)) for x, col in fit_cols
            ]
            coeff_polys.append(interpolate(pts))
        table = FiberTable(tuple(coeff_polys), a_generic, b_generic)
        for x, col in check_cols:
            if table.fiber_at(x) != col:
                raise InvalidInputError("fiber table degree bound too small")
        self._table_cache[ref] = table
        return table

    def chain_for(self, ref: CurveRef) -> PhiChain:
        """The four-step construction whose input/output plane matches ref."""
        if ref.role_swap:
            a = param_point(self.c2, ref.t_a)
            b = param_point(self.c2, ref.t_b)
            return PhiChain.build(a, b, self.c1, self.c3)
        a = param_point(self.c1, ref.t_a)
        b = param_point(self.c1, ref.t_b)
        return PhiChain.build(a, b, self.c2, self.c3)

    def find_transitions(
        self,
        ref: CurveRef,
        trace: TraceResult,
        width: float = 1e-6,
        annotation_tol: float = 1e-4,
    ) -> list[Transition]:
        """Boundaries where the traced construction gains or loses its
        real branch, bisected to `width` and annotated with the active
        distance-2 conditions.

        A flip whose followed sheet turns out to survive on the far
        bracket edge is discarded: such flips come from the tracker
        hopping sheets or the output crossing the chart gap, not from
        the sheet actually losing its real branch.  (A genuine loss at
        step i forces the step-i discriminant to zero, so the kept
        boundaries always fire the matching distance-2 condition.)
        """
        chain = trace.chain
        out = []
        for s0, s1 in zip(trace.samples, trace.samples[1:]):
            if s0.ok == s1.ok:
                continue
            ok_s, bad_s = (s0, s1) if s0.ok else (s1, s0)
            ok_t, ok_state = ok_s.t_x, ok_s.state
            bad_t = bad_s.t_x
            failing = bad_s.failed_step or 0
            while abs(ok_t - bad_t) > width:
                mid = 0.5 * (ok_t + bad_t)
                try:
                    br = _nearest_branches(chain, mid, ok_state)
                    res = phi_chain_apply(chain, mid, br)
                    ok_t, ok_state = mid, res.state
                except ConstructionFailedError as exc:
                    bad_t = mid
                    failing = exc.step_index
            try:
                br = _nearest_branches(chain, bad_t, ok_state)
                phi_chain_apply(chain, bad_t, br)
                continue
            except ConstructionFailedError as exc:
                failing = exc.step_index
            reports = classify_degeneracy(ok_state, tol=annotation_tol)
            out.append(
                Transition(
                    t_x=0.5 * (ok_t + bad_t),
                    bracket=(min(ok_t, bad_t), max(ok_t, bad_t)),
                    failing_step=failing,
                    annotations=tuple(r.label for r in reports),
                    reports=tuple(reports),
                )
            )
        return out

    def ultra_candidate(self, ref: CurveRef) -> bool:
        """Exact screen for the aligned same-fraction degeneracy families."""
        if ref.role_swap:
            a = param_point(self.c2, ref.t_a)
            b = param_point(self.c2, ref.t_b)
            return ultra_pair_candidate(a, b, self.c1, self.c3)
        a = param_point(self.c1, ref.t_a)
        b = param_point(self.c1, ref.t_b)
        return ultra_pair_candidate(a, b, self.c2, self.c3)

    def overlap_audit(
        self,
        refs,
        threshold: int | None = None,
        n_abscissae: int | None = None,
        avoid=(),
        grid_size: int = 17,
        prefilter: bool = True,
        degree_bound: int = FIBER_DEGREE_BOUND,
    ) -> dict:
        """Count common zeros of every curve pair along probe columns.

        A pair whose distinct common zeros reach the threshold must
        share a component (Bezout); isolated crossings cannot trigger
        the flag.  Identical refs are flagged without probing.  The
        report also carries an informational grid-commons table, the
        ultra-degenerate exclusion list, and the component-multiplicity
        histogram over non-excluded curves.
        """
        refs = list(refs)
        if threshold is None:
            threshold = degree_bound * degree_bound + 1
        if n_abscissae is None:
            n_abscissae = 2 * degree_bound * degree_bound + 1
        if threshold < degree_bound * degree_bound + 1:
            raise InvalidInputError("threshold below the Bezout bound is unsound")
        tables = [self.fiber_table(r, degree_bound) for r in refs]
        ultra = [self.ultra_candidate(r) for r in refs]
        stream = _rational_stream(16, avoid)
        columns = [next(stream) for _ in range(n_abscissae)]
        npairs = [(i, j) for i in range(len(refs)) for j in range(i + 1, len(refs))]
        counts = {p: 0 for p in npairs}
        notes = {p: set() for p in npairs}
        done = {p: refs[p[0]] == refs[p[1]] for p in npairs}
        for p in npairs:
            if done[p]:
                notes[p].add("identical")
        grid_rows = []
        grid_ys = [Fraction(j - grid_size // 2, 16) for j in range(grid_size)]
        for k, x in enumerate(columns):
            if k >= grid_size and all(done.values()):
                break
            fibers = [tables[i].fiber_at(x) for i in range(len(refs))]
            for p in npairs:
                if done[p]:
                    continue
                f, g = fibers[p[0]], fibers[p[1]]
                counts[p] += self._common_root_count(f, g, degree_bound, notes[p], prefilter)
                if counts[p] >= threshold:
                    done[p] = True
                    notes[p].add("threshold-reached-early")
            if k < grid_size:
                grid_rows.append(fibers)
        grid_commons = {p: 0 for p in npairs}
        for fibers in grid_rows:
            for p in npairs:
                f, g = fibers[p[0]], fibers[p[1]]
                for y in grid_ys:
                    if f(y) == 0 and g(y) == 0:
                        grid_commons[p] += 1
        flagged = {p: ("identical" in notes[p]) or counts[p] >= threshold for p in npairs}
        parent = list(range(len(refs)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for (i, j), f in flagged.items():
            if f and not ultra[i] and not ultra[j]:
                parent[find(i)] = find(j)
        sizes: dict = {}
        for i in range(len(refs)):
            if ultra[i]:
                continue
            root = find(i)
            sizes[root] = sizes.get(root, 0) + 1
        histogram: dict = {}
        for s in sizes.values():
            histogram[s] = histogram.get(s, 0) + 1
        return {
            "threshold": threshold,
            "n_abscissae": n_abscissae,
            "degree_bound": degree_bound,
            "curves": [
                {
                    "index": i,
                    "t_a": str(r.t_a),
                    "t_b": str(r.t_b),
                    "role_swap": r.role_swap,
                    "ultra_candidate": ultra[i],
                }
                for i, r in enumerate(refs)
            ],
            "pairs": [
                {
                    "i": i,
                    "j": j,
                    "shared_zeros": counts[(i, j)],
                    "flagged": flagged[(i, j)],
                    "notes": sorted(notes[(i, j)]),
                    "grid_commons": grid_commons[(i, j)],
                }
                for i, j in npairs
            ],
            "component_histogram": {str(k): v for k, v in sorted(histogram.items())},
            "max_multiplicity_non_ultra": max(sizes.values(), default=0),
            "excluded_ultra": [i for i, u in enumerate(ultra) if u],
        }

    @staticmethod
    def _common_root_count(f: UniPoly, g: UniPoly, degree_bound: int, note: set, prefilter: bool) -> int:
        if f.is_zero and g.is_zero:
            note.add("shared-vertical-column")
            return degree_bound
        if f.is_zero or g.is_zero:
            note.add("vertical-column")
            other = g if f.is_zero else f
            return squarefree_part(other).degree if other.degree >= 1 else 0
        if f.degree < 1 or g.degree < 1:
            return 0
        if prefilter and _clearly_coprime(f, g):
            return 0
        common = poly_gcd(f, g)
        if common.degree < 1:
            return 0
        return squarefree_part(common).degree


def _clearly_coprime(f: UniPoly, g: UniPoly, margin: float = 1e-3) -> bool:
    """Numeric screen: root sets farther apart than `margin` everywhere.

    Conservative by construction: any doubt (overflow, nan, close roots)
    returns False so the exact gcd path decides.
    """
    try:
        import numpy as np
    except ImportError:
        return False
    arrays = []
    for p in (f, g):
        scale = max(abs(c) for c in p.coeffs)
        coeffs = [float(c / scale) for c in reversed(p.coeffs)]
        if not all(abs(c) < 1e300 for c in coeffs):
            return False
        roots = np.roots(coeffs)
        if not np.all(np.isfinite(roots.view(float))):
            return False
        arrays.append(roots)
    rf, rg = arrays
    gap = min(abs(rf[:, None] - rg[None, :]).min(initial=float("inf")), float("inf"))
    return gap > margin
