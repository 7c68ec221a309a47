"""Acceptance suite: one test per criterion, each printing a pass/fail line.

The two random corpora are built once per session and shared: the scalar
corpus feeds the sandwich/envelope equivalence and the oracle agreement, the
graph corpus feeds the selection property; both are rerun for the determinism
criterion.
"""

import json
from pathlib import Path

import numpy as np
import pytest

from affsel.checks import TripleGrid, check_condition1, check_condition2
from affsel.cli import EXIT_FAILURE, EXIT_OK, report_text, run
from affsel.geometry import separation_distance
from affsel.instances import (
    builtin,
    oracle_lp_enumerate,
    oracle_sandwich,
    random_convex_graph,
    random_interval_pl,
)
from affsel.lp import Halfspace, solve
from affsel.model import IntervalPL, contains_value, inf_sup, validate_raw
from affsel.select import (
    affine_selection_convex,
    affine_selection_endpoint,
    fixed_point,
    sandwich_affine,
    transversal_constraints,
    transversal_solve,
)

SCALAR_CORPUS = 500
GRAPH_CORPUS = 200
FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def _criterion(num: int, description: str, ok: bool):
    print(f"criterion {num:02d} {'PASS' if ok else 'FAIL'} - {description}")
    assert ok, f"criterion {num} failed: {description}"


def run_scalar_corpus() -> str:
    """Sandwich vs combos-grid envelope check vs oracle on 500 seeded instances."""
    records = []
    for seed in range(SCALAR_CORPUS):
        F = random_interval_pl(2 + seed % 11, seed)
        f, g = inf_sup(F)
        res = sandwich_affine(f, g, probe_uniqueness=False)
        cond1 = check_condition1(f, g, TripleGrid.breakpoint_combos(F.breakpoints))
        ora = oracle_sandwich(f, g)
        rec = {
            "seed": seed,
            "sandwich": res.status,
            "cond1": cond1.status,
            "oracle": ora.status,
        }
        if res.status == "found":
            rec["map"] = [res.map.d[0], res.map.c[0]]
        else:
            rec["witness"] = [res.witness.x, res.witness.y, res.witness.t]
            m = res.witness.t * res.witness.x + (1 - res.witness.t) * res.witness.y
            first = f(m) - (res.witness.t * g(res.witness.x) + (1 - res.witness.t) * g(res.witness.y))
            second = (res.witness.t * f(res.witness.x) + (1 - res.witness.t) * f(res.witness.y)) - g(m)
            rec["margin"] = float(max(first, second))
        records.append(rec)
    return json.dumps(records)


def run_graph_corpus() -> str:
    """Both selection routes on 200 seeded convex graphs with n in {1, 2, 3}."""
    records = []
    for seed in range(GRAPH_CORPUS):
        n = 1 + seed % 3
        F = random_convex_graph(n, 4 + (seed * 7) % 21, seed)
        rec = {"seed": seed, "n": n}
        for label, method in (
            ("inductive", affine_selection_convex),
            ("endpoint", affine_selection_endpoint),
        ):
            res = method(F)
            rec[label] = {
                "status": res.status,
                "map": [list(res.map.c), list(res.map.d)],
                "violation": res.max_violation,
            }
        records.append(rec)
    return json.dumps(records)


@pytest.fixture(scope="session")
def scalar_corpus():
    return json.loads(run_scalar_corpus())


@pytest.fixture(scope="session")
def graph_corpus():
    return json.loads(run_graph_corpus())


def test_criterion_1_sadowska_transversal():
    F = builtin("sadowska").instance
    first_four = transversal_solve(list(F.fibers[:4]))
    ok = first_four.status == "found" and first_four.uniqueness is True
    ok &= bool(np.allclose(first_four.map.c, (-2.0, 1.0), atol=1e-9))
    ok &= bool(np.allclose(first_four.map.d, (1.0, -1.0), atol=1e-9))

    with_f4 = transversal_solve(list(F.fibers))
    ok &= with_f4.status == "infeasible" and bool(with_f4.certificate)
    if with_f4.certificate:
        cons, _, total = transversal_constraints(list(F.fibers))
        combo = np.zeros(total)
        weight = 0.0
        for idx, mult in with_f4.certificate:
            ok &= mult >= 0.0
            combo += mult * np.asarray(cons[idx].normal)
            weight += mult * cons[idx].offset
        ok &= float(np.max(np.abs(combo))) <= 1e-8 and weight < -1e-9
    _criterion(1, "sadowska transversal: unique four-fiber line, infeasible with the fifth", ok)


def test_criterion_2_sadowska_miss_distance():
    F = builtin("sadowska").instance
    res = transversal_solve(list(F.fibers[:4]))
    at4 = res.map(4.0)
    ok = bool(np.allclose(at4, (2.0, -3.0), atol=1e-9))
    dist = separation_distance(F.fibers[4][1], at4)
    ok &= dist >= 3.5
    ok &= abs(dist - 5.0 / np.sqrt(2.0)) <= 1e-6
    _criterion(2, f"line misses the diagonal fiber by {dist:.4f} >= 3.5", ok)


def test_criterion_3_sadowska_condition2():
    F = builtin("sadowska").instance
    combos = check_condition2(F, TripleGrid.breakpoint_combos((0.0, 1.0, 2.0, 3.0, 4.0)))
    dense = check_condition2(F, TripleGrid.dense(0.0, 4.0, 8))
    ok = combos.status == "pass" and combos.triples_checked == 10
    ok &= dense.status == "pass" and dense.triples_checked > 0
    _criterion(3, "intersection condition passes on combos and dense-8 grids", ok)


def test_criterion_4_sandwich_uniqueness_fixture():
    F = builtin("triangle_sandwich").instance
    f, g = inf_sup(F)
    res = sandwich_affine(f, g)
    ok = res.status == "found" and res.uniqueness is True
    ok &= abs(res.map.d[0] - 0.0) <= 1e-9 and abs(res.map.c[0] - 1.0) <= 1e-9
    ora = oracle_sandwich(f, g)
    ok &= len(ora.vertex_set) == 1
    ok &= abs(ora.vertex_set[0][0] - 0.0) <= 1e-9 and abs(ora.vertex_set[0][1] - 1.0) <= 1e-9
    _criterion(4, "triangle fixture pins (alpha, beta) = (0, 1); oracle vertex set is a point", ok)


def test_criterion_5_equivalence_at_breakpoints(scalar_corpus):
    ok = len(scalar_corpus) == SCALAR_CORPUS
    feasible = infeasible = 0
    for rec in scalar_corpus:
        agrees = (rec["sandwich"] == "infeasible") == (rec["cond1"] == "violation")
        ok &= agrees
        if rec["sandwich"] == "infeasible":
            infeasible += 1
            ok &= rec["margin"] > 1e-9
        else:
            feasible += 1
    ok &= feasible > 0 and infeasible > 0
    _criterion(
        5,
        f"sandwich infeasible iff combo-grid violation on {SCALAR_CORPUS} instances "
        f"({feasible} feasible / {infeasible} infeasible), all witnesses re-fail",
        ok,
    )


def test_criterion_6_selection_property(graph_corpus):
    ok = len(graph_corpus) == GRAPH_CORPUS
    worst = 0.0
    for rec in graph_corpus:
        for label in ("inductive", "endpoint"):
            ok &= rec[label]["status"] == "found"
            ok &= rec[label]["violation"] <= 1e-7
            worst = max(worst, rec[label]["violation"])
    # independent LP spot check on a subsample
    for rec in graph_corpus[::10]:
        n = rec["n"]
        F = random_convex_graph(n, 4 + (rec["seed"] * 7) % 21, rec["seed"])
        for label in ("inductive", "endpoint"):
            c, d = rec[label]["map"]
            a, b = F.domain.a, F.domain.b
            for x in np.linspace(a, b, 5):
                y = np.asarray(c) + float(x) * np.asarray(d)
                ok &= contains_value(F, float(x), y, 1e-7)
    _criterion(
        6,
        f"both selection routes succeed on {GRAPH_CORPUS} graphs, worst violation {worst:.2e}",
        ok,
    )


def test_criterion_7_fixed_points():
    F = builtin("halfstrip_fixed").instance
    x_star = fixed_point(F, "chebyshev")
    ok = abs(x_star - 0.5) <= 1e-9
    lo = float(np.interp(x_star, F.breakpoints, F.lower))
    hi = float(np.interp(x_star, F.breakpoints, F.upper))
    slack = min(x_star - lo, hi - x_star)
    ok &= slack >= 0.25 - 1e-9
    ident = IntervalPL((0.0, 1.0), (0.0, 1.0), (0.0, 1.0))
    ok &= fixed_point(ident) == 0.0
    _criterion(7, f"halfstrip fixed point 0.5 with slack {slack:.3f}; identity rule takes 0", ok)


def test_criterion_8_oracle_agreement(scalar_corpus):
    ok = all(rec["sandwich"] == rec["oracle"] for rec in scalar_corpus)

    regressions = [
        ([Halfspace((1.0,), 1.0), Halfspace((-1.0,), 0.0)], (1.0,), "max"),
        (
            [Halfspace((-1.0, 0.0), 0.0), Halfspace((0.0, -1.0), 0.0), Halfspace((1.0, 1.0), 2.0)],
            (1.0, 1.0),
            "max",
        ),
    ]
    rng = np.random.default_rng(2024)
    while len(regressions) < 120:
        d = int(rng.integers(1, 4))
        m = int(rng.integers(d + 1, 13))
        cons = [
            Halfspace(tuple(rng.integers(-4, 5, d).astype(float)), float(rng.integers(-3, 7)))
            for _ in range(m)
        ]
        regressions.append((cons, tuple(rng.integers(-3, 4, d).astype(float)), "min"))
    compared = 0
    for cons, obj, sense in regressions:
        mine = solve(cons, objective=obj, sense=sense)
        oracle = oracle_lp_enumerate(cons, obj, sense)
        if mine.status != "feasible" or oracle is None:
            continue
        compared += 1
        ok &= abs(mine.value - oracle[0]) <= 1e-9
    ok &= compared >= 25
    _criterion(
        8, f"sandwich statuses match the oracle on all {SCALAR_CORPUS}; "
        f"LP optima match enumeration on {compared} regression cases", ok
    )


def test_criterion_9_rejection():
    ok = True
    for name, message in (
        ("reject_unbounded", "fibers must be compact"),
        ("reject_open_domain", "domain must be a compact interval"),
    ):
        named = builtin(name)
        violations = validate_raw(named.raw)
        ok &= message in violations
        ok &= named.instance is None
        code, report = run(["solve-sandwich", str(FIXTURES / f"{name}.json")])
        ok &= code == EXIT_FAILURE and report["status"] == "invalid"
        ok &= "map" not in report  # no solver ran
    _criterion(9, "non-compact fixtures rejected with documented messages; solvers refuse them", ok)


def test_criterion_10_determinism(scalar_corpus, graph_corpus):
    code1, rep1 = run(["verify", "sadowska"])
    code2, rep2 = run(["verify", "sadowska"])
    ok = code1 == code2 == EXIT_OK
    ok &= report_text(rep1, stable_timing=True) == report_text(rep2, stable_timing=True)
    ok &= run_scalar_corpus() == json.dumps(scalar_corpus)
    ok &= run_graph_corpus() == json.dumps(graph_corpus)
    _criterion(10, "verify sadowska and both corpora reproduce byte-identically", ok)
