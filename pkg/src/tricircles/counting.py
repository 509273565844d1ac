"""Exact counting of unit triples, spanned circles, and curve incidences.

Everything here is integer/rational arithmetic; no tolerance appears anywhere.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .curves import CurveFamily, CurveRef
from .geometry import Point, circumcenter, circumradius2, collinear, eval_F, param_point
from .polys import InvalidInputError, UniPoly, sylvester_resultant, _int_coeffs

__all__ = [
    "Configuration",
    "CountReport",
    "IncidenceResult",
    "InternalInvariantError",
    "ReductionResult",
    "ScalingResult",
    "build_report",
    "count_M",
    "count_incidences",
    "count_unit_triples",
    "double_count",
    "reduce_S1_outside_D2",
    "scaling_experiment",
]

SCALING_CSV_HEADER = "n,M,triples,sumP,Q,Iprime,I,seconds"

# soft caps mirrored by the CLI; the library itself never enforces them
INCIDENCE_SOFT_CAP = 24
COUNT_SOFT_CAP = 64


class InternalInvariantError(RuntimeError):
    """A quantity that is a theorem came out false; indicates a bug."""


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    raise InvalidInputError(f"orientation parameters must be rational, got {v!r}")


@dataclass(frozen=True)
class Configuration:
    """Three rational circle centers plus one orientation list per circle."""

    c1: Point
    c2: Point
    c3: Point
    theta1: tuple[Fraction, ...]
    theta2: tuple[Fraction, ...]
    theta3: tuple[Fraction, ...]

    def __post_init__(self):
        for name in ("theta1", "theta2", "theta3"):
            vals = tuple(_as_fraction(t) for t in getattr(self, name))
            object.__setattr__(self, name, vals)
            if len(set(vals)) != len(vals):
                raise InvalidInputError(f"duplicate orientation parameter in {name}")
        for name in ("c1", "c2", "c3"):
            if not getattr(self, name).is_exact():
                raise InvalidInputError(f"center {name} must have rational coordinates")

    @property
    def centers(self) -> tuple[Point, Point, Point]:
        return (self.c1, self.c2, self.c3)

    @property
    def thetas(self) -> tuple[tuple[Fraction, ...], ...]:
        return (self.theta1, self.theta2, self.theta3)

    @property
    def sizes(self) -> tuple[int, int, int]:
        return (len(self.theta1), len(self.theta2), len(self.theta3))

    def points(self, index: int) -> tuple[Point, ...]:
        """Points of S_index (1-based circle index)."""
        c = self.centers[index - 1]
        return tuple(param_point(c, t) for t in self.thetas[index - 1])


def _sqdist_nd(p: Point, q: Point) -> tuple[int, int]:
    d = p - q
    v = d.x * d.x + d.y * d.y
    return v.numerator, v.denominator


def _triples_for_row(
    p1: Point,
    t1: Fraction,
    pts2: tuple[Point, ...],
    th2: tuple[Fraction, ...],
    pts3: tuple[Point, ...],
    th3: tuple[Fraction, ...],
) -> list[tuple[Fraction, Fraction, Fraction]]:
    # integer-cleared F: with X = xn/xd etc., F * (xd*yd*zd)^2 is the integer below
    out = []
    row13 = [_sqdist_nd(p1, p3) for p3 in pts3]
    for j, p2 in enumerate(pts2):
        xn, xd = _sqdist_nd(p1, p2)
        for k, p3 in enumerate(pts3):
            yn, yd = row13[k]
            zn, zd = _sqdist_nd(p2, p3)
            a = xn * yd * zd
            b = yn * xd * zd
            c = zn * xd * yd
            n = (
                a * a + b * b + c * c
                - 2 * (a * b + a * c + b * c)
                + xn * yn * zn * xd * yd * zd
            )
            if n == 0 and not collinear(p1, p2, p3):
                out.append((t1, th2[j], th3[k]))
    return out


def count_unit_triples(cfg: Configuration, jobs: int = 1) -> list[tuple[Fraction, Fraction, Fraction]]:
    """All (t1, t2, t3) whose points span a unit circle, in Θ-list order."""
    pts1, pts2, pts3 = cfg.points(1), cfg.points(2), cfg.points(3)
    rows = [
        (pts1[i], cfg.theta1[i], pts2, cfg.theta2, pts3, cfg.theta3)
        for i in range(len(pts1))
    ]
    if jobs > 1 and len(rows) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_triples_row_star, rows))
    else:
        chunks = [_triples_row_star(r) for r in rows]
    out: list[tuple[Fraction, Fraction, Fraction]] = []
    for ch in chunks:
        out.extend(ch)
    return out


def _triples_row_star(args):
    return _triples_for_row(*args)


def count_M(cfg: Configuration, triples=None, jobs: int = 1):
    """Distinct spanned unit circles; returns (M, inventory center -> triples)."""
    if triples is None:
        triples = count_unit_triples(cfg, jobs=jobs)
    c1, c2, c3 = cfg.centers
    inventory: dict[Point, list[tuple[Fraction, Fraction, Fraction]]] = {}
    for t1, t2, t3 in triples:
        p1 = param_point(c1, t1)
        p2 = param_point(c2, t2)
        p3 = param_point(c3, t3)
        v = circumcenter(p1, p2, p3)
        if circumradius2(p1, p2, p3) != 1:
            raise InternalInvariantError("spanned circle has radius^2 != 1")
        inventory.setdefault(v, []).append((t1, t2, t3))
    for v, group in inventory.items():
        if not 1 <= len(group) <= 8:
            raise InternalInvariantError(
                f"circle at {v} spanned by {len(group)} triples (bound is 8)"
            )
    return len(inventory), inventory


def double_count(cfg: Configuration, triples=None, jobs: int = 1):
    """P-fiber sizes keyed by t3, plus Q = sum of squares and sum_P."""
    if triples is None:
        triples = count_unit_triples(cfg, jobs=jobs)
    p_sizes: dict[Fraction, int] = {t3: 0 for t3 in cfg.theta3}
    for _, _, t3 in triples:
        p_sizes[t3] += 1
    q = sum(v * v for v in p_sizes.values())
    sum_p = sum(p_sizes.values())
    return p_sizes, q, sum_p


@dataclass(frozen=True)
class IncidenceResult:
    i_prime: int
    i: int
    same_pair: int
    degenerate_cells: tuple[tuple[Fraction, Fraction], ...]
    method: str


def _cells(cfg: Configuration):
    """Specialization quartics indexed by (i over Θ1, j over Θ2); zeros excluded."""
    fam = CurveFamily(cfg.c1, cfg.c2, cfg.c3)
    cells: dict[tuple[int, int], UniPoly] = {}
    degenerate: list[tuple[Fraction, Fraction]] = []
    for i, ta in enumerate(cfg.theta1):
        for j, tx in enumerate(cfg.theta2):
            p = fam.specialize(ta, tx).poly
            if p.is_zero:
                degenerate.append((ta, tx))
            else:
                cells[(i, j)] = p
    return cells, degenerate


def _brute_incidences(cells) -> tuple[int, int]:
    keys = sorted(cells)
    i_prime = 0
    same = 0
    for u in keys:
        for v in keys:
            pu, pv = cells[u], cells[v]
            hit = (u == v) or sylvester_resultant(pu, pv) == 0
            if hit:
                i_prime += 1
                if u[0] == v[0]:
                    same += 1
    return i_prime, same


def _factor_key_set(poly: UniPoly) -> frozenset[tuple[int, ...]]:
    import sympy

    ints = _int_coeffs(poly)
    sym = sympy.Poly(list(reversed(ints)), _factor_symbol())
    keys = []
    for fac, _mult in sym.factor_list()[1]:
        cs = [int(c) for c in reversed(fac.all_coeffs())]
        if len(cs) <= 1:
            continue
        if cs[-1] < 0:
            cs = [-c for c in cs]
        keys.append(tuple(cs))
    return frozenset(keys)


_SYMBOL = None


def _factor_symbol():
    global _SYMBOL
    if _SYMBOL is None:
        import sympy

        _SYMBOL = sympy.symbols("t")
    return _SYMBOL


def _factor_chunk(polys: list[UniPoly]) -> list[frozenset[tuple[int, ...]]]:
    return [_factor_key_set(p) for p in polys]


def _subsets(keys: frozenset) -> list[frozenset]:
    items = sorted(keys)
    out = []
    for mask in range(1, 1 << len(items)):
        out.append(frozenset(items[b] for b in range(len(items)) if mask >> b & 1))
    return out


def _moebius_pair_count(factor_sets: list[frozenset]) -> int:
    """Ordered pairs (u, v) whose factor sets intersect, via inclusion-exclusion."""
    counts: dict[frozenset, int] = {}
    for fs in factor_sets:
        for s in _subsets(fs):
            counts[s] = counts.get(s, 0) + 1
    total = 0
    for s, m in counts.items():
        total += (m * m) if len(s) % 2 == 1 else -(m * m)
    return total


def _fast_incidences(cells, jobs: int = 1) -> tuple[int, int]:
    keys = sorted(cells)
    polys = [cells[k] for k in keys]
    if jobs > 1 and len(polys) > 8:
        chunks = [polys[i::jobs] for i in range(jobs)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_factor_chunk, chunks))
        factor_sets: list = [None] * len(polys)
        for start, part in enumerate(parts):
            factor_sets[start::jobs] = part
    else:
        factor_sets = _factor_chunk(polys)
    by_key = dict(zip(keys, factor_sets))
    i_prime = _moebius_pair_count(factor_sets)
    same = 0
    rows = sorted({k[0] for k in keys})
    for r in rows:
        row_sets = [by_key[k] for k in keys if k[0] == r]
        same += _moebius_pair_count(row_sets)
    return i_prime, same


def count_incidences(cfg: Configuration, method: str = "auto", jobs: int = 1) -> IncidenceResult:
    """Exact incidence counts I' (all ordered curve pairs) and I (a != b).

    An incidence is an ordered tuple (a, x, b, y) over S1 x Θ2 x S1 x Θ2 whose
    two specializations share a root, i.e. the resultant curve passes through
    (x, y).  Identically-zero specializations are excluded and reported.
    """
    if method not in ("auto", "brute", "fast"):
        raise InvalidInputError(f"unknown incidence method {method!r}")
    cells, degenerate = _cells(cfg)
    if method == "auto":
        method = "brute" if len(cells) <= 576 else "fast"
    if method == "brute":
        i_prime, same = _brute_incidences(cells)
    else:
        i_prime, same = _fast_incidences(cells, jobs=jobs)
    return IncidenceResult(
        i_prime=i_prime,
        i=i_prime - same,
        same_pair=same,
        degenerate_cells=tuple(degenerate),
        method=method,
    )


@dataclass(frozen=True)
class CountReport:
    M: int
    triple_count: int
    P_sizes: dict
    Q: int
    sum_P: int
    I_prime: Optional[int]
    I: Optional[int]
    verdicts: list

    def as_json_dict(self) -> dict:
        return {
            "M": self.M,
            "triple_count": self.triple_count,
            "P_sizes": {str(k): v for k, v in self.P_sizes.items()},
            "Q": self.Q,
            "sum_P": self.sum_P,
            "I_prime": self.I_prime,
            "I": self.I,
            "verdicts": self.verdicts,
        }

    def all_hold(self) -> bool:
        return all(v["holds"] is not False for v in self.verdicts)


def build_report(
    cfg: Configuration,
    incidences: Optional[IncidenceResult] = None,
    jobs: int = 1,
) -> CountReport:
    """Counts plus pass/fail verdicts for every stated inequality."""
    triples = count_unit_triples(cfg, jobs=jobs)
    m, _inventory = count_M(cfg, triples=triples)
    p_sizes, q, sum_p = double_count(cfg, triples=triples)
    n3 = len(cfg.theta3)
    verdicts = [
        {"name": "M<=sum_P", "holds": m <= sum_p, "lhs": m, "rhs": sum_p},
        {"name": "sum_P<=8M", "holds": sum_p <= 8 * m, "lhs": sum_p, "rhs": 8 * m},
        {"name": "M^2<=Q*n3", "holds": m * m <= q * n3, "lhs": m * m, "rhs": q * n3},
        {
            "name": "sum_P^2<=Q*n3",
            "holds": sum_p * sum_p <= q * n3,
            "lhs": sum_p * sum_p,
            "rhs": q * n3,
        },
    ]
    i_prime = i_count = None
    if incidences is not None:
        i_prime, i_count = incidences.i_prime, incidences.i
        if incidences.degenerate_cells:
            verdicts.append(
                {
                    "name": "Q<=4*I_prime",
                    "holds": None,
                    "lhs": q,
                    "rhs": 4 * i_prime,
                    "note": "not-applicable: degenerate specializations excluded",
                }
            )
        else:
            verdicts.append(
                {
                    "name": "Q<=4*I_prime",
                    "holds": q <= 4 * i_prime,
                    "lhs": q,
                    "rhs": 4 * i_prime,
                }
            )
    return CountReport(
        M=m,
        triple_count=len(triples),
        P_sizes=p_sizes,
        Q=q,
        sum_P=sum_p,
        I_prime=i_prime,
        I=i_count,
        verdicts=verdicts,
    )


@dataclass(frozen=True)
class ReductionResult:
    configuration: Configuration
    original_triples: int
    retained_triples: int
    role: tuple[int, int]
    dropped_points: int

    @property
    def retention(self) -> Fraction:
        if self.original_triples == 0:
            return Fraction(1)
        return Fraction(self.retained_triples, self.original_triples)


_ROLE_ORDER = ((1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2))


def reduce_S1_outside_D2(cfg: Configuration, jobs: int = 1) -> ReductionResult:
    """Relabel circles and discard points so S1 lies strictly outside D2.

    All six ordered role assignments (which circle becomes C1, which D2) are
    tried; the one retaining the most unit triples wins, first in role order
    on ties.  At least one sixth of the triples always survives.
    """
    original = count_unit_triples(cfg, jobs=jobs)
    centers = cfg.centers
    thetas = cfg.thetas
    best = None
    for role in _ROLE_ORDER:
        i, j = role
        k = 6 - i - j
        ci, cj, ck = centers[i - 1], centers[j - 1], centers[k - 1]
        kept = tuple(
            t for t in thetas[i - 1] if (param_point(ci, t) - cj).norm2() > 1
        )
        reduced = Configuration(
            c1=ci,
            c2=cj,
            c3=ck,
            theta1=kept,
            theta2=thetas[j - 1],
            theta3=thetas[k - 1],
        )
        retained = len(count_unit_triples(reduced, jobs=jobs))
        dropped = len(thetas[i - 1]) - len(kept)
        if best is None or retained > best[0]:
            best = (retained, role, reduced, dropped)
    retained, role, reduced, dropped = best
    if original and retained == 0:
        raise InternalInvariantError("reduction lost every triple")
    if retained < -(-len(original) // 6):
        raise InternalInvariantError(
            f"reduction kept {retained} of {len(original)} triples (< 1/6)"
        )
    return ReductionResult(
        configuration=reduced,
        original_triples=len(original),
        retained_triples=retained,
        role=role,
        dropped_points=dropped,
    )


@dataclass(frozen=True)
class ScalingRow:
    n: int
    M: int
    triples: int
    sumP: int
    Q: int
    Iprime: int
    I: int
    seconds: float


@dataclass(frozen=True)
class ScalingResult:
    rows: tuple[ScalingRow, ...]
    slope: float

    def csv_text(self) -> str:
        lines = [SCALING_CSV_HEADER]
        for r in self.rows:
            lines.append(
                f"{r.n},{r.M},{r.triples},{r.sumP},{r.Q},{r.Iprime},{r.I},{r.seconds:.6f}"
            )
        return "\n".join(lines) + "\n"


def _fit_slope(xs: list[float], ys: list[float]) -> float:
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    num = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    den = sum((x - mx) ** 2 for x in xs)
    if den == 0:
        raise InvalidInputError("slope undefined: all n equal")
    return num / den


def scaling_experiment(
    kind: str,
    n_values: list[int],
    seed: int = 0,
    include_seconds: bool = True,
    jobs: int = 1,
    incidence_method: str = "auto",
) -> ScalingResult:
    """Run the generator at each n, count everything, fit slope of log M vs log n.

    Row i uses seed + i so rows are independently reproducible.
    """
    if len(n_values) < 3:
        raise InvalidInputError("need at least 3 n values")
    if any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise InvalidInputError("n values must be strictly ascending")
    from . import configgen

    rows = []
    for idx, n in enumerate(n_values):
        spec = configgen.GeneratorSpec(kind=kind, n=n, seed=seed + idx)
        cfg = configgen.generate(spec)
        t0 = time.perf_counter()
        triples = count_unit_triples(cfg, jobs=jobs)
        m, _ = count_M(cfg, triples=triples)
        _, q, sum_p = double_count(cfg, triples=triples)
        inc = count_incidences(cfg, method=incidence_method, jobs=jobs)
        dt = time.perf_counter() - t0
        report = build_report(cfg, incidences=inc, jobs=jobs)
        if not report.all_hold():
            raise InternalInvariantError(f"inequality verdict failed at n={n}")
        rows.append(
            ScalingRow(
                n=n,
                M=m,
                triples=len(triples),
                sumP=sum_p,
                Q=q,
                Iprime=inc.i_prime,
                I=inc.i,
                seconds=dt if include_seconds else 0.0,
            )
        )
    slope = _fit_slope(
        [math.log(r.n) for r in rows],
        [math.log(max(r.M, 1)) for r in rows],
    )
    return ScalingResult(rows=tuple(rows), slope=slope)
