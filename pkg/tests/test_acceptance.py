"""End-to-end acceptance checks, one test per criterion.

Each test prints a single pass line (visible with pytest -s); a failed
assert is the fail line.  Budgets are wall-clock seconds on the target
container and are asserted, not aspirational.
"""

import csv
import io
import math
import random
import time
from fractions import Fraction as F
from pathlib import Path

import pytest

from tricircles import configgen
from tricircles.counting import (
    Configuration,
    build_report,
    count_incidences,
    count_M,
    count_unit_triples,
    double_count,
    reduce_S1_outside_D2,
    scaling_experiment,
)
from tricircles.curves import (
    CurveFamily,
    CurveRef,
    DegenerateSpecializationError,
    PointClass,
)
from tricircles.geometry import (
    Circle,
    Point,
    circumradius2,
    collinear,
    eval_F,
    param_point,
)
from tricircles.phi import (
    AtBoundaryError,
    ConstructionFailedError,
    NoRealBranchError,
    PhiChain,
    PhiStep,
    ZeroDerivativeError,
    chain_derivative,
    phi_apply,
    phi_chain_apply,
    phi_derivative,
    trace_chain,
)
from tricircles.polys import InvalidInputError, sturm_real_roots

ARTIFACTS = Path(__file__).parent / "_artifacts"

GOLDEN = Configuration(
    c1=Point(F(1), F(1)),
    c2=Point(F(-1), F(1)),
    c3=Point(F(0), F(2)),
    theta1=(F(-1), F(1, 2)),
    theta2=(F(-1), F(1, 2)),
    theta3=(F(-1),),
)

BRANCH_COMBOS = tuple(
    (a, b, c, d) for a in (1, -1) for b in (1, -1) for c in (1, -1) for d in (1, -1)
)


def _passed(criterion: int, detail: str) -> None:
    print(f"criterion {criterion}: PASS ({detail})")


def _suite_configs():
    """The 50 shared configurations of criteria 3 and 4."""
    configs = []
    for i in range(50):
        n = (4, 8, 12)[i % 3]
        kind = "random-uniform" if i % 2 == 0 else "golden-replicated"
        spec = configgen.GeneratorSpec(kind=kind, n=n, seed=100 + i)
        configs.append(configgen.generate(spec))
    return configs


def test_criterion_1_golden_fixture():
    t0 = time.perf_counter()
    triples = count_unit_triples(GOLDEN)
    assert triples == [(F(-1), F(-1), F(-1)), (F(1, 2), F(1, 2), F(-1))]
    m, _ = count_M(GOLDEN)
    _, q, sum_p = double_count(GOLDEN)
    assert m == 2 and sum_p == 2 and q == 4
    assert m * m == q * len(GOLDEN.theta3)  # equality case of the bound

    fam = CurveFamily(GOLDEN.c1, GOLDEN.c2, GOLDEN.c3)
    assert fam.curve_eval(CurveRef(F(-1), F(1, 2)), F(-1), F(1, 2)) == 0
    assert fam.curve_eval(CurveRef(F(1, 2), F(-1)), F(1, 2), F(-1)) == 0
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    _passed(1, f"golden counts and curve memberships exact in {elapsed:.2f}s")


def test_criterion_2_f_identity():
    t0 = time.perf_counter()
    rng = random.Random(20250819)

    def rnd_pt():
        return Point(F(rng.randint(-48, 48), 8), F(rng.randint(-48, 48), 8))

    done = 0
    while done < 1000:
        p, q, r = rnd_pt(), rnd_pt(), rnd_pt()
        if collinear(p, q, r):
            continue
        shoelace = (
            p.x * (q.y - r.y) + q.x * (r.y - p.y) + r.x * (p.y - q.y)
        )  # twice the signed area
        s2 = shoelace * shoelace / 4
        r2 = circumradius2(p, q, r)
        assert eval_F(p, q, r) == 16 * s2 * (r2 - 1)
        done += 1

    done = 0
    while done < 1000:
        center = Point(F(rng.randint(-64, 64), 8), F(rng.randint(-64, 64), 8))
        ts = {F(rng.randint(-512, 512), 64) for _ in range(3)}
        if len(ts) < 3:
            continue
        p, q, r = (param_point(center, t) for t in sorted(ts))
        assert eval_F(p, q, r) == 0
        done += 1

    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0
    _passed(2, f"2000 exact identity checks in {elapsed:.2f}s")


@pytest.fixture(scope="module")
def suite_configs():
    return _suite_configs()


def test_criterion_3_inequalities(suite_configs):
    t0 = time.perf_counter()
    violations = []
    for idx, cfg in enumerate(suite_configs):
        inc = count_incidences(cfg)
        report = build_report(cfg, incidences=inc)
        for v in report.verdicts:
            if v["holds"] is not True:
                violations.append((idx, v))
    elapsed = time.perf_counter() - t0
    assert violations == []
    assert elapsed < 300.0
    _passed(3, f"5 inequalities x 50 configurations, zero violations in {elapsed:.1f}s")


def test_criterion_4_reduction(suite_configs):
    violations = []
    for idx, cfg in enumerate(suite_configs):
        r = reduce_S1_outside_D2(cfg)
        need = -(-r.original_triples // 6)
        if r.retained_triples < need:
            violations.append((idx, "retention", r.retained_triples, need))
        out = r.configuration
        for t in out.theta1:
            if (param_point(out.c1, t) - out.c2).norm2() <= 1:
                violations.append((idx, "inside", t))
    assert violations == []
    _passed(4, "S1 strictly outside D2 with >= 1/6 retention on all 50 configurations")


def test_criterion_5_derivatives():
    rng = random.Random(20240817)
    checked = 0
    while checked < 200:
        cx = Point(F(rng.randint(-8, 8), 4), F(rng.randint(-8, 8), 4))
        anchor = Point(F(rng.randint(-8, 8), 4), F(rng.randint(-8, 8), 4))
        if (anchor - cx).norm2() == 1:
            continue
        step = PhiStep(anchor, Circle(cx), branch=rng.choice((1, -1)))
        theta = rng.uniform(-math.pi, math.pi)

        def out_angle(th):
            x = Point(float(cx.x) + math.cos(th), float(cx.y) + math.sin(th))
            d = phi_apply(step, x) - anchor
            return math.atan2(float(d.y), float(d.x))

        x0 = Point(float(cx.x) + math.cos(theta), float(cx.y) + math.sin(theta))
        try:
            d = phi_derivative(step, x0)
        except (NoRealBranchError, AtBoundaryError, ZeroDerivativeError):
            continue
        if not 1e-3 <= abs(d) <= 1e3:
            continue
        h = 1e-6
        try:
            fd = (out_angle(theta + h) - out_angle(theta - h)) / (2 * h)
        except NoRealBranchError:
            continue
        if abs(fd) > 2.5:  # wrapped across the atan2 cut
            continue
        assert abs(d - fd) <= 1e-5 * max(1.0, abs(fd))
        checked += 1

    chains = 0
    attempts = 0
    combos = list(BRANCH_COMBOS)
    while chains < 200:
        attempts += 1
        assert attempts < 40000
        c1 = Point(F(rng.randint(-4, 4), 4), F(rng.randint(-4, 4), 4))
        c2 = Point(F(rng.randint(-4, 4), 4), F(rng.randint(-4, 4), 4))
        c3 = Point(F(rng.randint(-4, 4), 4), F(rng.randint(-4, 4), 4))
        if len({c1, c2, c3}) < 3:
            continue
        a = param_point(c1, F(rng.randint(-8, 8), 8))
        b = param_point(c1, F(rng.randint(-8, 8), 8))
        try:
            chain = PhiChain.build(a, b, c2, c3)
        except InvalidInputError:
            continue
        tx = rng.uniform(-1.0, 1.0)
        rng.shuffle(combos)
        got = None
        for br in combos:
            try:
                res = phi_chain_apply(chain, tx, br)
                d = chain_derivative(chain, tx, br)
            except (ConstructionFailedError, AtBoundaryError, ZeroDerivativeError):
                continue
            if 1e-3 <= abs(float(d)) <= 1e3:
                got = (br, res, d)
                break
        if got is None:
            continue
        br, res, d = got

        st = res.state
        prod = 1.0
        for stp, xin, wout in zip(
            chain.steps, (st.xi, st.w, st.z, st.wprime), (st.w, st.z, st.wprime, st.eta)
        ):
            prod *= float(phi_derivative(stp, xin, w=wout))
        assert abs(prod - float(d)) <= 1e-5 * max(1.0, abs(prod))

        def vy(vx):
            r = phi_chain_apply(chain, math.tan(vx / 2), br)
            return 2 * math.atan(float(r.t_y))

        vx0 = 2 * math.atan(tx)
        h = 1e-6
        try:
            fd = (vy(vx0 + h) - vy(vx0 - h)) / (2 * h)
        except (ConstructionFailedError, ValueError):
            continue
        if abs(fd) > 1e3 or abs(fd) < 1e-4:
            continue
        assert abs(float(d) - fd) <= 1e-5 * max(1.0, abs(fd))
        assert abs(float(eval_F(st.a, st.xi, st.z))) <= 1e-9
        assert abs(float(eval_F(st.b, st.eta, st.z))) <= 1e-9
        chains += 1
    _passed(5, f"200 step and 200 chain derivative checks ({attempts} chain attempts)")


def test_criterion_6_curve_consistency():
    rng = random.Random(6)
    golden = CurveFamily(GOLDEN.c1, GOLDEN.c2, GOLDEN.c3)

    checked = 0
    while checked < 100:
        if rng.random() < 0.5:
            fam = golden
        else:
            pts = [
                Point(F(rng.randint(-4, 4), 4), F(rng.randint(-4, 4), 4))
                for _ in range(3)
            ]
            if len(set(pts)) < 3:
                continue
            fam = CurveFamily(*pts)
        ref = CurveRef(
            F(rng.randint(-16, 16), 8),
            F(rng.randint(-16, 16), 8),
            role_swap=rng.random() < 0.25,
        )
        x = F(rng.randint(-32, 32), 16)
        y = F(rng.randint(-32, 32), 16)
        try:
            value = fam.curve_eval(ref, x, y)
            fiber = fam.curve_fiber(ref, x)
            table = fam.fiber_table(ref)
        except DegenerateSpecializationError:
            continue
        if fiber.vertical:
            assert value == 0
            checked += 1
            continue
        fv = fiber.poly(y)
        assert (fv == 0) == (value == 0)
        if fam._b_specialization(ref, y).degree == table.b_degree:
            assert fv == (1 + y * y) ** fiber.clearing_exponent * value
        roots = sturm_real_roots(fiber.poly)
        assert roots.count <= fiber.poly.degree
        if checked % 10 == 0:
            cls = fam.classify_point(ref, x, y)
            assert (cls is PointClass.NOT_ON_CURVE) == (value != 0)
        checked += 1

    # pinned membership classifications, all three kinds
    gab, gba = CurveRef(F(-1), F(1, 2)), CurveRef(F(1, 2), F(-1))
    assert golden.classify_point(gab, F(-1), F(1, 2)) is PointClass.REAL_ARC
    assert golden.classify_point(gba, F(1, 2), F(-1)) is PointClass.REAL_ARC
    assert golden.classify_point(gab, F(-1), F(-1)) is PointClass.NOT_ON_CURVE
    assert golden.classify_point(CurveRef(F(-1), F(-1)), F(-2), F(-2)) is PointClass.NON_REAL_ARC
    fr = golden.curve_fiber(gab, F(-1))
    assert fr.poly(F(1, 2)) == 0
    assert sturm_real_roots(fr.poly, F(1, 4), F(3, 4)).count >= 1

    # 20 traced arcs: every surviving transition carries an annotation
    refs = [
        CurveRef(ta, tb, role_swap=sw)
        for sw in (False, True)
        for ta in (F(-1), F(1, 2))
        for tb in (F(-1), F(1, 2))
    ]
    combos = [(-1, -1, 1, 1), (1, 1, 1, 1), (1, -1, 1, 1), (-1, 1, -1, 1), (1, 1, -1, -1)]
    arcs = [(ref, br) for ref in refs for br in combos][::2]
    assert len(arcs) == 20
    total = 0
    for ref, br in arcs:
        chain = golden.chain_for(ref)
        tr = trace_chain(chain, -0.8, 0.8, br, step=0.01, flag_tol=1e-4)
        for t in golden.find_transitions(ref, tr, annotation_tol=1e-4):
            total += 1
            assert len(t.annotations) >= 1
            assert t.bracket[1] - t.bracket[0] <= 1e-6
            assert all(a in {"N1", "N2", "N3", "N4", "D1", "D2", "D3", "D4"}
                       for a in t.annotations)
    assert total >= 8  # the sweep is not vacuous
    _passed(6, f"100 probe agreements and {total} annotated transitions on 20 arcs")


def test_criterion_7_scaling():
    t0 = time.perf_counter()
    result = scaling_experiment("random-uniform", [8, 16, 32, 64], seed=7)
    elapsed = time.perf_counter() - t0
    assert elapsed < 600.0

    text = result.csv_text()
    rows = list(csv.DictReader(io.StringIO(text)))
    assert [int(r["n"]) for r in rows] == [8, 16, 32, 64]
    for r in rows:
        n, m = int(r["n"]), int(r["M"])
        triples, sum_p = int(r["triples"]), int(r["sumP"])
        q, i_prime = int(r["Q"]), int(r["Iprime"])
        assert m <= sum_p <= 8 * m
        assert m * m <= q * n
        assert sum_p * sum_p <= q * n
        assert q <= 4 * i_prime
        assert triples >= 0 and float(r["seconds"]) >= 0.0
    assert math.isfinite(result.slope)

    ARTIFACTS.mkdir(exist_ok=True)
    (ARTIFACTS / "scaling_criterion7.csv").write_text(text)
    _passed(7, f"n up to 64 in {elapsed:.1f}s, slope {result.slope:.6f} (observational)")
