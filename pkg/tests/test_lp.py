"""LP engine: examples, certificates, oracle agreement, determinism."""

import math

import numpy as np
import pytest

from affsel.lp import (
    Halfspace,
    InfeasibleRegionError,
    LpError,
    UnboundedRegionError,
    chebyshev_center,
    solve,
    solve_standard,
)
from affsel.instances import oracle_lp_enumerate


def box_1d():
    return [Halfspace((1.0,), 1.0), Halfspace((-1.0,), 0.0)]


def test_box_maximize():
    out = solve(box_1d(), objective=(1.0,), sense="max")
    assert out.status == "feasible"
    assert out.point == pytest.approx((1.0,), abs=1e-12)
    assert out.value == pytest.approx(1.0, abs=1e-12)


def test_empty_interval_certificate():
    out = solve([Halfspace((1.0,), 0.0), Halfspace((-1.0,), -1.0)])
    assert out.status == "infeasible"
    assert sorted(idx for idx, _ in out.certificate) == [0, 1]
    mult = dict(out.certificate)
    assert mult[0] == pytest.approx(1.0, abs=1e-9)
    assert mult[1] == pytest.approx(1.0, abs=1e-9)


def test_barycentric_membership_feasible():
    # lambda >= 0, sum lambda = 1, sum lambda_i p_i = (0, 0) for the hull of
    # (-1,0), (1,0), (0,1); enumeration of the 3-variable system shows e.g.
    # lambda = (1/2, 1/2, 0) works.
    pts = [(-1.0, 0.0), (1.0, 0.0), (0.0, 1.0)]
    cons = [
        Halfspace((1.0, 1.0, 1.0), 1.0),
        Halfspace((-1.0, -1.0, -1.0), -1.0),
        Halfspace(tuple(p[0] for p in pts), 0.0),
        Halfspace(tuple(-p[0] for p in pts), 0.0),
        Halfspace(tuple(p[1] for p in pts), 0.0),
        Halfspace(tuple(-p[1] for p in pts), 0.0),
        Halfspace((-1.0, 0.0, 0.0), 0.0),
        Halfspace((0.0, -1.0, 0.0), 0.0),
        Halfspace((0.0, 0.0, -1.0), 0.0),
    ]
    out = solve(cons)
    assert out.status == "feasible"
    lam = np.asarray(out.point)
    assert lam.sum() == pytest.approx(1.0, abs=1e-9)
    assert np.allclose(lam @ np.asarray(pts), (0.0, 0.0), atol=1e-9)
    assert np.all(lam >= -1e-9)


def test_feasible_points_satisfy_constraints():
    rng = np.random.default_rng(7)
    for _ in range(50):
        d = int(rng.integers(1, 4))
        m = int(rng.integers(1, 11))
        cons = [
            Halfspace(tuple(rng.integers(-5, 6, d).astype(float)), float(rng.integers(-5, 6)))
            for _ in range(m)
        ]
        out = solve(cons)
        if out.status != "feasible":
            continue
        A = np.array([h.normal for h in cons])
        b = np.array([h.offset for h in cons])
        assert np.max(A @ np.asarray(out.point) - b) <= 1e-8


def test_infeasibility_certificates_verify():
    rng = np.random.default_rng(11)
    seen = 0
    for _ in range(200):
        d = int(rng.integers(1, 4))
        m = int(rng.integers(2, 12))
        cons = [
            Halfspace(tuple(rng.integers(-4, 5, d).astype(float)), float(rng.integers(-6, 3)))
            for _ in range(m)
        ]
        out = solve(cons)
        if out.status != "infeasible":
            continue
        seen += 1
        assert len(out.certificate) <= d + 1
        combo = np.zeros(d)
        total = 0.0
        for idx, mult in out.certificate:
            assert mult >= 0.0
            combo += mult * np.asarray(cons[idx].normal)
            total += mult * cons[idx].offset
        assert np.max(np.abs(combo)) <= 1e-8
        assert total < -1e-9
    assert seen >= 20  # the family must actually exercise infeasibility


def test_optimum_matches_enumeration_oracle():
    rng = np.random.default_rng(3)
    compared = 0
    for _ in range(120):
        d = int(rng.integers(1, 4))
        m = int(rng.integers(d + 1, 13))
        cons = [
            Halfspace(tuple(rng.integers(-4, 5, d).astype(float)), float(rng.integers(-3, 7)))
            for _ in range(m)
        ]
        obj = tuple(rng.integers(-3, 4, d).astype(float))
        out = solve(cons, objective=obj, sense="min")
        if out.status != "feasible":
            continue
        oracle = oracle_lp_enumerate(cons, obj, "min")
        if oracle is None:
            continue
        compared += 1
        value, point = oracle
        assert out.value == pytest.approx(value, abs=1e-9)
        assert np.allclose(out.point, point, atol=1e-8)
    assert compared >= 25


def test_lexicographic_tie_break():
    square = [
        Halfspace((1.0, 0.0), 1.0),
        Halfspace((-1.0, 0.0), 0.0),
        Halfspace((0.0, 1.0), 1.0),
        Halfspace((0.0, -1.0), 0.0),
    ]
    out = solve(square, objective=(0.0, 1.0), sense="max")
    assert out.point == pytest.approx((0.0, 1.0), abs=1e-12)


def test_unbounded_detection():
    out = solve([Halfspace((-1.0,), 0.0)], objective=(1.0,), sense="max")
    assert out.status == "unbounded"


def test_trivial_constraints():
    out = solve([Halfspace((0.0, 0.0), -1.0), Halfspace((1.0, 0.0), 1.0)])
    assert out.status == "infeasible"
    assert out.certificate == ((0, 1.0),)
    out = solve([Halfspace((0.0,), 2.0), Halfspace((1.0,), 1.0), Halfspace((-1.0,), 0.0)])
    assert out.status == "feasible"


def test_input_validation():
    with pytest.raises(LpError):
        solve([Halfspace((1.0,), 1.0), Halfspace((1.0, 2.0), 1.0)])
    with pytest.raises(LpError):
        solve([Halfspace((float("nan"),), 1.0)])
    with pytest.raises(LpError):
        solve([Halfspace((1.0,), 1.0)], objective=(1.0, 2.0))


def test_chebyshev_unit_square():
    square = [
        Halfspace((1.0, 0.0), 1.0),
        Halfspace((-1.0, 0.0), 0.0),
        Halfspace((0.0, 1.0), 1.0),
        Halfspace((0.0, -1.0), 0.0),
    ]
    center, radius = chebyshev_center(square)
    assert center == pytest.approx((0.5, 0.5), abs=1e-9)
    assert radius == pytest.approx(0.5, abs=1e-9)


def test_chebyshev_triangle_equal_slack():
    tri = [
        Halfspace((-1.0, 0.0), 0.0),
        Halfspace((0.0, -1.0), 0.0),
        Halfspace((1.0, 1.0), 2.0),
    ]
    center, radius = chebyshev_center(tri)
    expected = 2.0 - math.sqrt(2.0)
    assert center == pytest.approx((expected, expected), abs=1e-9)
    assert radius == pytest.approx(expected, abs=1e-9)


def test_chebyshev_segment():
    seg = [Halfspace((1.0,), 1.0), Halfspace((-1.0,), 1.0)]
    center, radius = chebyshev_center(seg)
    assert center == pytest.approx((0.0,), abs=1e-9)
    assert radius == pytest.approx(1.0, abs=1e-9)


def test_chebyshev_errors():
    with pytest.raises(InfeasibleRegionError) as err:
        chebyshev_center([Halfspace((1.0,), 0.0), Halfspace((-1.0,), -1.0)])
    assert err.value.certificate
    with pytest.raises(UnboundedRegionError):
        chebyshev_center([Halfspace((-1.0, 0.0), 0.0), Halfspace((0.0, -1.0), 0.0)])


def test_determinism_bitwise():
    rng = np.random.default_rng(23)
    for _ in range(20):
        d = int(rng.integers(1, 4))
        m = int(rng.integers(2, 10))
        cons = [
            Halfspace(tuple(rng.integers(-4, 5, d).astype(float)), float(rng.integers(-4, 7)))
            for _ in range(m)
        ]
        obj = tuple(rng.integers(-3, 4, d).astype(float))
        first = solve(cons, objective=obj, sense="min")
        second = solve(cons, objective=obj, sense="min")
        assert first == second


def test_solve_standard_roundtrip():
    # min z2 s.t. z1 + z2 = 1 is attained at (1, 0)
    out = solve_standard([[1.0, 1.0]], [1.0], objective=(0.0, 1.0), sense="min")
    assert out.status == "feasible"
    assert out.value == pytest.approx(0.0, abs=1e-12)
    out = solve_standard([[1.0, 1.0]], [-1.0])
    assert out.status == "infeasible"
