"""Selection constructors: sandwich, induction, endpoints, fixed points, transversals."""

import numpy as np
import pytest

from affsel.geometry import Polytope, contains_point
from affsel.instances import builtin, oracle_sandwich, random_convex_graph, random_interval_pl
from affsel.model import GraphPolytope, IntervalPL, PiecewiseLinear, contains_value, inf_sup
from affsel.select import (
    N_VERIFY,
    FixedPointPreconditionError,
    affine_selection_convex,
    affine_selection_endpoint,
    fixed_point,
    sandwich_affine,
    transversal_solve,
)


def pl(xs, ys):
    return PiecewiseLinear(tuple(xs), tuple(ys))


def test_sandwich_triangle_unique():
    res = sandwich_affine(pl((0, 1, 2), (1, 0, 1)), pl((0, 1, 2), (1, 1, 1)))
    assert res.status == "found"
    assert res.map.d[0] == pytest.approx(0.0, abs=1e-9)
    assert res.map.c[0] == pytest.approx(1.0, abs=1e-9)
    assert res.uniqueness is True
    assert max(res.spread) <= 1e-9


def test_sandwich_halfstrip_chebyshev():
    res = sandwich_affine(pl((0, 1), (0, 0.5)), pl((0, 1), (0.5, 1)))
    assert res.map.d[0] == pytest.approx(0.5, abs=1e-9)
    assert res.map.c[0] == pytest.approx(0.25, abs=1e-9)
    assert res.uniqueness is False


def test_sandwich_lexmin():
    res = sandwich_affine(pl((0, 1), (0, 0.5)), pl((0, 1), (0.5, 1)), objective="lexmin")
    # feasible (alpha, beta) parallelogram has leftmost vertex (0, 0.5)
    assert res.map.d[0] == pytest.approx(0.0, abs=1e-9)
    assert res.map.c[0] == pytest.approx(0.5, abs=1e-9)


def test_sandwich_infeasible_witness():
    res = sandwich_affine(pl((0, 1, 2), (0, 1, 0)), pl((0, 1, 2), (0.5, 1, 0.5)))
    assert res.status == "infeasible"
    assert (res.witness.x, res.witness.y) == (0.0, 2.0)
    assert res.witness.t == pytest.approx(0.5)
    assert res.certificate is not None
    # the recomputed margin at the witness exceeds the tolerance
    f, g = pl((0, 1, 2), (0, 1, 0)), pl((0, 1, 2), (0.5, 1, 0.5))
    m = res.witness.t * res.witness.x + (1 - res.witness.t) * res.witness.y
    assert f(m) - (res.witness.t * g(res.witness.x) + (1 - res.witness.t) * g(res.witness.y)) > 1e-9


def test_sandwich_input_validation():
    with pytest.raises(ValueError):
        sandwich_affine(pl((0, 1), (0, 0)), pl((0, 2), (1, 1)))
    with pytest.raises(ValueError):
        sandwich_affine(pl((0, 1), (2, 0)), pl((0, 1), (1, 1)))
    with pytest.raises(ValueError):
        sandwich_affine(pl((0, 1), (0, 0)), pl((0, 1), (1, 1)), objective="steepest")


def test_sandwich_degenerate_single_breakpoint():
    res = sandwich_affine(pl((1,), (0,)), pl((1,), (2,)))
    assert res.status == "found"
    assert res.map.d[0] == 0.0
    assert res.map.c[0] == pytest.approx(1.0)


def test_selection_tetra_both_routes():
    F = builtin("tetra_convex").instance
    for method in (affine_selection_convex, affine_selection_endpoint):
        res = method(F)
        assert res.status == "found"
        assert np.allclose(res.map.c, (0.0, 0.0), atol=1e-7)
        assert np.allclose(res.map.d, (0.0, 0.0), atol=1e-7)
        assert contains_value(F, 0.5, res.map(0.5), 1e-7)


def test_selection_scalar_graph():
    G = GraphPolytope(1, Polytope(((0.0, 0.0), (1.0, 0.0), (1.0, 1.0))))
    for method in (affine_selection_convex, affine_selection_endpoint):
        res = method(G)
        assert res.map.d[0] == pytest.approx(0.5, abs=1e-6)
        assert res.map.c[0] == pytest.approx(0.0, abs=1e-6)


def test_selection_degenerate_domain():
    D = GraphPolytope(1, Polytope(((0.0, -1.0), (0.0, 1.0))))
    res = affine_selection_convex(D)
    assert res.status == "found"
    assert res.map.c == (0.0,) and res.map.d == (0.0,)
    prism = GraphPolytope(2, Polytope(((0.0, 1.0, 3.0), (0.0, 3.0, 1.0), (0.0, 2.0, 2.0))))
    res = affine_selection_endpoint(prism)
    assert res.map.d == (0.0, 0.0)
    assert contains_point(Polytope(((1.0, 3.0), (3.0, 1.0), (2.0, 2.0))), res.map.c, 1e-9)


def test_selection_random_graphs_verify():
    for seed in range(40):
        n = 1 + seed % 3
        F = random_convex_graph(n, 4 + seed % 20, seed)
        for method in (affine_selection_convex, affine_selection_endpoint):
            res = method(F)
            assert res.status == "found"
            assert res.max_violation <= 1e-7
            xs = np.linspace(F.domain.a, F.domain.b, N_VERIFY)
            for x in xs[:: 20]:
                assert contains_value(F, float(x), res.map(float(x)), 1e-7)


def test_sandwich_agrees_with_oracle():
    for seed in range(120):
        F = random_interval_pl(2 + seed % 10, seed)
        f, g = inf_sup(F)
        mine = sandwich_affine(f, g)
        ora = oracle_sandwich(f, g)
        assert mine.status == ora.status, seed
        if mine.status == "found" and mine.uniqueness and ora.uniqueness:
            assert mine.map.d[0] == pytest.approx(ora.map[0], abs=1e-9)
            assert mine.map.c[0] == pytest.approx(ora.map[1], abs=1e-9)


def test_fixed_point_halfstrip():
    F = builtin("halfstrip_fixed").instance
    x_star = fixed_point(F)
    assert x_star == pytest.approx(0.5, abs=1e-9)
    assert contains_value(F, x_star, x_star, 1e-9)


def test_fixed_point_identity_rule():
    F = IntervalPL((0.0, 1.0), (0.0, 1.0), (0.0, 1.0))
    assert fixed_point(F) == 0.0


def test_fixed_point_constant():
    F = IntervalPL((0.0, 1.0), (0.0, 0.0), (1.0, 1.0))
    assert fixed_point(F) == pytest.approx(0.5, abs=1e-9)


def test_fixed_point_range_escape():
    F = IntervalPL((0.0, 1.0), (0.0, 0.0), (2.0, 2.0))
    with pytest.raises(FixedPointPreconditionError):
        fixed_point(F)


def test_transversal_sadowska_first_four():
    F = builtin("sadowska").instance
    res = transversal_solve(list(F.fibers[:4]))
    assert res.status == "found"
    assert res.uniqueness is True
    assert np.allclose(res.map.c, (-2.0, 1.0), atol=1e-9)
    assert np.allclose(res.map.d, (1.0, -1.0), atol=1e-9)
    for x, P in F.fibers[:4]:
        assert contains_point(P, res.map(x), 1e-7)


def test_transversal_sadowska_all_five_infeasible():
    F = builtin("sadowska").instance
    res = transversal_solve(list(F.fibers))
    assert res.status == "infeasible"
    assert res.certificate


def test_transversal_translation_invariant_family():
    seg = Polytope(((-1.0, 0.0), (1.0, 0.0)))
    res = transversal_solve([(0.0, seg), (1.0, seg)])
    assert res.status == "multiple"
    assert res.uniqueness is False
    assert res.spread[0] == pytest.approx(2.0, abs=1e-9)  # the c1 range is [-1, 1]
    for x in (0.0, 1.0):
        assert contains_point(seg, res.map(x), 1e-7)


def test_transversal_input_validation():
    seg = Polytope(((-1.0, 0.0), (1.0, 0.0)))
    with pytest.raises(ValueError):
        transversal_solve([])
    with pytest.raises(ValueError):
        transversal_solve([(0.0, seg), (0.0, seg)])
    with pytest.raises(ValueError):
        transversal_solve([(0.0, seg), (1.0, Polytope(((0.0,),)))])
