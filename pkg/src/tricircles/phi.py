"""Center-chasing construction steps and their derivative bookkeeping.

The primitive step sends a point x moving on a source circle to a center
w of a unit circle through x and a fixed anchor; four such steps chained
through the anchors (a, c3, b, c2) rebuild, from a point of C2, the
matching point of C2 completing two unit triples that share the same
third point.  Everything works over Fractions when the intermediate
square roots are rational squares and falls back to floats otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .geometry import Circle, Point, _is_exact, _ratio, _sqrt_exact, param_of_point, param_point
from .polys import InvalidInputError

SQDIST_TOL = 1e-9


class NoRealBranchError(ValueError):
    """The two circles the step intersects have drifted apart."""


class ConstructionFailedError(ValueError):
    """A chain step failed; carries the 1-based step index."""

    def __init__(self, step_index: int, message: str):
        super().__init__(f"step {step_index}: {message}")
        self.step_index = step_index


class AtBoundaryError(ValueError):
    """Derivative denominator vanished (input pair at distance 2)."""


class ZeroDerivativeError(ValueError):
    """Derivative numerator vanished (output tangency condition)."""


def _rot90(p: Point) -> Point:
    return Point(-p.y, p.x)


def _close(value, target, tol) -> bool:
    if _is_exact(value) and tol == 0:
        return value == target
    return abs(value - target) <= tol


@dataclass(frozen=True, slots=True)
class PhiStep:
    anchor: Point
    source: Circle
    branch: int = 1

    def __post_init__(self):
        if self.branch not in (1, -1):
            raise InvalidInputError("branch must be +1 or -1")
        d2 = (self.anchor - self.source.center).norm2()
        r2 = self.source.radius * self.source.radius
        tol = 0 if (self.anchor.is_exact() and self.source.center.is_exact()) else SQDIST_TOL
        if _close(d2, r2, tol):
            raise InvalidInputError("anchor must not lie on the source circle")


def phi_apply(step: PhiStep, x: Point, branch: int | None = None, tol: float = SQDIST_TOL) -> Point:
    """One step: the `branch` center of a unit circle through anchor and x.

    Succeeds on the closed region ||x-anchor|| <= 2 (boundary gives the
    unique midpoint center); beyond it there is no real branch.
    """
    if branch is None:
        branch = step.branch
    if branch not in (1, -1):
        raise InvalidInputError("branch must be +1 or -1")
    a = step.anchor
    exact = a.is_exact() and x.is_exact()
    src_d2 = (x - step.source.center).norm2()
    r2 = step.source.radius * step.source.radius
    if not _close(src_d2, r2, 0 if exact else tol):
        raise InvalidInputError("input point does not lie on the source circle")
    if x == a:
        raise InvalidInputError("input point coincides with the anchor")
    d2 = (x - a).norm2()
    s2 = _ratio(4, d2) - 1
    if s2 < 0:
        if exact or float(-s2) > tol:
            raise NoRealBranchError(f"||x-anchor||^2 = {float(d2):.12g} exceeds 4")
        s2 = 0
    mid = Point(_ratio(a.x + x.x, 2), _ratio(a.y + x.y, 2))
    if s2 == 0:
        return mid
    if exact:
        s = _sqrt_exact(Fraction(s2))
        if s is None:
            s = math.sqrt(float(s2))
    else:
        s = math.sqrt(s2)
    half = Point(_ratio(-(x.y - a.y), 2), _ratio(x.x - a.x, 2))
    return mid + half.scaled(branch * s)


def phi_derivative(step: PhiStep, x: Point, w: Point | None = None, tol: float = 1e-12):
    """Angular derivative dv_w/dv_x of the step at x.

    Ratio of two dot products against the rotated radius vectors; the
    denominator vanishes exactly when ||x-anchor|| = 2 and the numerator
    exactly when the produced circle is internally tangent to the source
    circle (||w - source center|| = 2 for unit sources off the anchor).
    """
    if w is None:
        w = phi_apply(step, x)
    chord = w - x
    num = chord.dot(_rot90(x - step.source.center))
    den = chord.dot(_rot90(w - step.anchor))
    exact = chord.is_exact() and x.is_exact() and w.is_exact()
    if (den == 0) if exact else (abs(float(den)) < tol):
        raise AtBoundaryError("derivative denominator vanished: ||x-anchor|| = 2")
    if (num == 0) if exact else (abs(float(num)) < tol):
        raise ZeroDerivativeError("derivative numerator vanished: output at tangency")
    return num / den


@dataclass(frozen=True, slots=True)
class PhiChain:
    a: Point
    b: Point
    c2: Point
    c3: Point
    steps: tuple[PhiStep, PhiStep, PhiStep, PhiStep]

    @classmethod
    def build(cls, a: Point, b: Point, c2: Point, c3: Point) -> "PhiChain":
        for name, p in (("a", a), ("b", b)):
            if (p - c2).norm2() <= 1:
                raise InvalidInputError(f"point {name} must lie strictly outside the disk around c2")
        steps = (
            PhiStep(a, Circle(c2)),
            PhiStep(c3, Circle(a)),
            PhiStep(b, Circle(c3)),
            PhiStep(c2, Circle(b)),
        )
        return cls(a, b, c2, c3, steps)


@dataclass(frozen=True, slots=True)
class ChainState:
    a: Point
    b: Point
    xi: Point
    w: Point
    z: Point
    wprime: Point
    eta: Point
    c2: Point
    c3: Point

    def is_exact(self) -> bool:
        return all(
            p.is_exact() for p in (self.a, self.b, self.xi, self.w, self.z, self.wprime, self.eta)
        )


@dataclass(frozen=True, slots=True)
class ChainResult:
    t_y: object
    state: ChainState
    branches: tuple[int, int, int, int]


def phi_chain_apply(chain: PhiChain, t_x, branches=(1, 1, 1, 1), tol: float = SQDIST_TOL) -> ChainResult:
    """Run the four steps from the C2 point at parameter t_x.

    Returns the parameter of the produced C2 point together with the
    full intermediate state; raises ConstructionFailedError naming the
    first step whose real branch does not exist.
    """
    if len(branches) != 4:
        raise InvalidInputError("exactly four branch choices required")
    xi = param_point(chain.c2, t_x)
    points = []
    current = xi
    for i, (step, br) in enumerate(zip(chain.steps, branches), start=1):
        try:
            current = phi_apply(step, current, branch=br, tol=tol)
        except NoRealBranchError as exc:
            raise ConstructionFailedError(i, str(exc)) from exc
        points.append(current)
    w, z, wprime, eta = points
    try:
        t_y = param_of_point(chain.c2, eta)
    except ValueError as exc:
        raise ConstructionFailedError(4, f"output hit the chart gap: {exc}") from exc
    state = ChainState(chain.a, chain.b, xi, w, z, wprime, eta, chain.c2, chain.c3)
    return ChainResult(t_y, state, tuple(branches))


def chain_derivative(chain: PhiChain, t_x, branches=(1, 1, 1, 1), tol: float = 1e-12):
    """Chain-rule product of the four step derivatives at t_x."""
    result = phi_chain_apply(chain, t_x, branches)
    st = result.state
    inputs = (st.xi, st.w, st.z, st.wprime)
    outputs = (st.w, st.z, st.wprime, st.eta)
    value = 1
    for step, xin, wout in zip(chain.steps, inputs, outputs):
        value = value * phi_derivative(step, xin, w=wout, tol=tol)
    return value


_CONDITIONS = (
    ("N1", 1, "numerator", lambda s: (s.w - s.c2).norm2()),
    ("N2", 2, "numerator", lambda s: (s.a - s.z).norm2()),
    ("N3", 3, "numerator", lambda s: (s.wprime - s.c3).norm2()),
    ("N4", 4, "numerator", lambda s: (s.eta - s.b).norm2()),
    ("D1", 1, "denominator", lambda s: (s.a - s.xi).norm2()),
    ("D2", 2, "denominator", lambda s: (s.w - s.c3).norm2()),
    ("D3", 3, "denominator", lambda s: (s.z - s.b).norm2()),
    ("D4", 4, "denominator", lambda s: (s.wprime - s.c2).norm2()),
)

_CONDITION_TEXT = {
    "N1": "dist(w,c2)=2",
    "N2": "dist(a,z)=2",
    "N3": "dist(w',c3)=2",
    "N4": "dist(eta,b)=2",
    "D1": "dist(a,xi)=2",
    "D2": "dist(w,c3)=2",
    "D3": "dist(z,b)=2",
    "D4": "dist(w',c2)=2",
}


@dataclass(frozen=True, slots=True)
class DegeneracyReport:
    which_fraction: int
    part: str
    condition: str
    label: str
    ultra: str | None = None


def classify_degeneracy(state: ChainState, tol: float | None = None) -> list[DegeneracyReport]:
    """All distance-2 conditions holding at the state, with ultra tags.

    tol=None picks exact comparison for fully rational states and an
    absolute 1e-9 squared-distance tolerance otherwise.  A report is
    tagged ultra when the state fires at least one numerator and one
    denominator: same-fraction co-occurrences get "same-fraction-k",
    cross-fraction ones "N{i}D{j}".
    """
    if tol is None:
        tol = 0 if state.is_exact() else SQDIST_TOL
    active = [
        (label, frac, part)
        for label, frac, part, dist2 in _CONDITIONS
        if _close(dist2(state), 4, tol)
    ]
    num_fracs = sorted(frac for label, frac, part in active if part == "numerator")
    den_fracs = sorted(frac for label, frac, part in active if part == "denominator")
    reports = []
    for label, frac, part in active:
        ultra = None
        if num_fracs and den_fracs:
            if part == "numerator" and frac in den_fracs:
                ultra = f"same-fraction-{frac}"
            elif part == "denominator" and frac in num_fracs:
                ultra = f"same-fraction-{frac}"
            elif part == "numerator":
                ultra = f"N{frac}D{den_fracs[0]}"
            else:
                ultra = f"N{num_fracs[0]}D{frac}"
        reports.append(DegeneracyReport(frac, part, _CONDITION_TEXT[label], label, ultra))
    return reports


def ultra_pair_candidate(a: Point, b: Point, c2: Point, c3: Point) -> bool:
    """Exact necessary condition for the aligned same-fraction families.

    Each same-fraction co-occurrence forces one anchor-to-center
    distance to equal 3; the four candidates are checked on squared
    distances so the test stays rational.
    """
    return any(
        (p - c).norm2() == 9 for p, c in ((a, c2), (a, c3), (b, c3), (b, c2))
    )


@dataclass(frozen=True, slots=True)
class TraceSample:
    t_x: float
    ok: bool
    t_y: float | None
    state: ChainState | None
    branches: tuple[int, int, int, int] | None
    failed_step: int | None
    flags: tuple[str, ...]


@dataclass(frozen=True, slots=True)
class TraceResult:
    chain: PhiChain
    samples: tuple[TraceSample, ...]


def _nearest_branches(chain: PhiChain, t_x: float, prev: ChainState) -> tuple[int, int, int, int]:
    """Pick each step's branch so its output stays nearest the previous state."""
    targets = (prev.w, prev.z, prev.wprime, prev.eta)
    xi = param_point(chain.c2, t_x)
    current = xi
    branches = []
    for i, (step, target) in enumerate(zip(chain.steps, targets), start=1):
        best = None
        for br in (1, -1):
            try:
                cand = phi_apply(step, current, branch=br)
            except NoRealBranchError as exc:
                raise ConstructionFailedError(i, str(exc)) from exc
            gap = float((cand - target).norm2())
            if best is None or gap < best[0]:
                best = (gap, br, cand)
        branches.append(best[1])
        current = best[2]
    return tuple(branches)


def trace_chain(
    chain: PhiChain,
    t_start: float,
    t_stop: float,
    branches=(1, 1, 1, 1),
    step: float = 1e-3,
    flag_tol: float = 1e-4,
    slow_zone: float = 5e-2,
) -> TraceResult:
    """March t_x from t_start to t_stop recording the chain outputs.

    Branches continue by nearest-center matching from the previous
    successful sample; the step is halved while any degeneracy metric is
    within `slow_zone` of firing.  Failed samples record the failing
    step and break branch continuity.
    """
    if step <= 0:
        raise InvalidInputError("step must be positive")
    direction = 1.0 if t_stop >= t_start else -1.0
    samples = []
    prev_state = None
    t = float(t_start)
    while True:
        try:
            br = branches if prev_state is None else _nearest_branches(chain, t, prev_state)
            result = phi_chain_apply(chain, float(t), br)
            st = result.state
            flags = tuple(r.label for r in classify_degeneracy(st, tol=flag_tol))
            gap = min(abs(float(d(st)) - 4) for _, _, _, d in _CONDITIONS)
            samples.append(TraceSample(float(t), True, float(result.t_y), st, br, None, flags))
            prev_state = st
        except ConstructionFailedError as exc:
            samples.append(TraceSample(float(t), False, None, None, None, exc.step_index, ()))
            prev_state = None
            gap = slow_zone
        if t == t_stop:
            break
        h = step / 2 if gap < slow_zone else step
        t = t + direction * h
        if (t - t_stop) * direction >= 0:
            t = t_stop
    return TraceResult(chain, tuple(samples))


def trace_csv(trace: TraceResult) -> str:
    """CSV dump: parameters, intermediate centers, and active flags."""
    lines = ["t_x,t_y,w_x,w_y,z_x,z_y,wp_x,wp_y,flags"]
    for s in trace.samples:
        if s.ok:
            st = s.state
            coords = [s.t_y, st.w.x, st.w.y, st.z.x, st.z.y, st.wprime.x, st.wprime.y]
            fields = [f"{s.t_x:.12g}"] + [f"{float(v):.12g}" for v in coords]
            fields.append(";".join(s.flags))
        else:
            fields = [f"{s.t_x:.12g}", "", "", "", "", "", "", "", f"construction-failed-step-{s.failed_step}"]
        lines.append(",".join(fields))
    return "\n".join(lines) + "\n"
