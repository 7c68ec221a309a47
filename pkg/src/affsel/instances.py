"""Builtin instances, seeded random generators, and brute-force oracles.

The oracles deliberately avoid the LP engine: the sandwich oracle enumerates
candidate lines through constraint boundaries, the dense intersection oracle
uses interval arithmetic (n = 1) or a separating-axis test on vertex clouds
(planar fiber families), and the LP oracle enumerates basic solutions.
Fixture names are stable API; the files under fixtures/ are the canonical
serializations of the builtins here.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .checks import CheckOutcome, TripleGrid
from .geometry import Polytope
from .lp import Halfspace
from .model import (
    UndefinedFiberError,
    FiberFamily,
    GraphPolytope,
    IntervalPL,
    PiecewiseLinear,
    SvFunction,
    parse_instance,
    validate_raw,
)
from .tolerances import DEFAULT, Tolerances


@dataclass(frozen=True)
class NamedInstance:
    name: str
    raw: dict
    instance: SvFunction | None  # None when the fixture is a rejection case
    expected: dict


def _seg(p, q) -> list[list[float]]:
    return [list(map(float, p)), list(map(float, q))]


_BUILTINS: dict[str, dict] = {
    "sadowska": {
        "raw": {
            "kind": "fibers",
            "dim": 2,
            "domain": [0, 4],
            "fibers": [
                {"x": 0, "vertices": _seg((-4, 1), (4, 1))},
                {"x": 1, "vertices": _seg((-1, -4), (-1, 4))},
                {"x": 2, "vertices": _seg((-4, -1), (4, -1))},
                {"x": 3, "vertices": _seg((1, -4), (1, 4))},
                {"x": 4, "vertices": _seg((-4, -4), (4, 4))},
            ],
            "default": {"vertices": [[-4, -4], [-4, 4], [4, -4], [4, 4]]},
        },
        "expected": {
            "transversal_first_four": "found",
            "transversal_unique": True,
            "transversal_c": [-2.0, 1.0],
            "transversal_d": [1.0, -1.0],
            "with_f4": "infeasible",
            "condition2": "pass",
            "convex": "violation",
        },
    },
    "triangle_sandwich": {
        "raw": {
            "kind": "interval_pl",
            "breakpoints": [0, 1, 2],
            "lower": [1, 0, 1],
            "upper": [1, 1, 1],
        },
        "expected": {"sandwich": "found", "unique": True, "alpha": 0.0, "beta": 1.0},
    },
    "halfstrip_fixed": {
        "raw": {
            "kind": "interval_pl",
            "breakpoints": [0, 1],
            "lower": [0, 0.5],
            "upper": [0.5, 1],
        },
        "expected": {"sandwich": "found", "fixed_point": 0.5, "alpha": 0.5, "beta": 0.25},
    },
    "tetra_convex": {
        "raw": {
            "kind": "graph_polytope",
            "dim": 2,
            "vertices": [[0, -1, 0], [0, 1, 0], [1, 0, -1], [1, 0, 1]],
        },
        "expected": {"convex": "pass", "selection": "found"},
    },
    "singleton_violation": {
        "raw": {
            "kind": "fibers",
            "dim": 1,
            "domain": [0, 2],
            "fibers": [
                {"x": 0, "vertices": [[0]]},
                {"x": 1, "vertices": [[1]]},
                {"x": 2, "vertices": [[0]]},
            ],
        },
        "expected": {"condition2": "violation", "witness": [0.0, 2.0, 0.5]},
    },
    "peak_infeasible": {
        "raw": {
            "kind": "interval_pl",
            "breakpoints": [0, 1, 2],
            "lower": [0, 1, 0],
            "upper": [0.5, 1, 0.5],
        },
        "expected": {"sandwich": "infeasible", "witness": [0.0, 2.0, 0.5]},
    },
    "reject_unbounded": {
        "raw": {
            "kind": "interval_pl",
            "breakpoints": [0, 1],
            "lower": [0, 1],
            "upper": [1, "inf"],
        },
        "expected": {"validate": ["fibers must be compact"]},
    },
    "reject_open_domain": {
        "raw": {
            "kind": "fibers",
            "dim": 1,
            "domain": ["(-1", "1)"],
            "fibers": [{"x": 0, "vertices": [[0], [1]]}],
        },
        "expected": {"validate": ["domain must be a compact interval"]},
    },
}


def builtin_names() -> tuple[str, ...]:
    return tuple(_BUILTINS)


def builtin(name: str) -> NamedInstance:
    """A named instance with exact integer data and its expected outcomes."""
    if name not in _BUILTINS:
        raise KeyError(f"unknown builtin instance {name!r}")
    spec = _BUILTINS[name]
    raw = spec["raw"]
    instance = None if validate_raw(raw) else parse_instance(raw)
    return NamedInstance(name, raw, instance, dict(spec["expected"]))


# ---------------------------------------------------------------------------
# generators


def random_convex_graph(n: int, num_points: int, seed: int) -> GraphPolytope:
    """Seeded graph polytope with integer coordinates in [-8, 8].

    At least two distinct abscissae are guaranteed, so the domain has width
    at least one; the output always passes validation.
    """
    if not (1 <= n <= 4):
        raise ValueError("n must be in 1..4")
    if not (4 <= num_points <= 64):
        raise ValueError("num_points must be in 4..64")
    rng = np.random.default_rng(seed)
    pts = rng.integers(-8, 9, size=(num_points, 1 + n)).astype(float)
    while len(np.unique(pts[:, 0])) < 2:
        pts[:, 0] = rng.integers(-8, 9, size=num_points)
    return GraphPolytope(n, Polytope(tuple(tuple(p) for p in pts)))


def random_interval_pl(num_breakpoints: int, seed: int) -> IntervalPL:
    """Seeded scalar envelope with integer data in [-8, 8]."""
    if not (2 <= num_breakpoints <= 17):
        raise ValueError("num_breakpoints must be in 2..17")
    rng = np.random.default_rng(seed)
    bps = np.sort(rng.choice(np.arange(-8, 9), size=num_breakpoints, replace=False)).astype(float)
    lower = rng.integers(-8, 9, size=num_breakpoints).astype(float)
    upper = np.maximum(lower, rng.integers(-8, 9, size=num_breakpoints)).astype(float)
    return IntervalPL(tuple(bps), tuple(lower), tuple(upper))


# ---------------------------------------------------------------------------
# oracles


@dataclass(frozen=True)
class OracleSandwich:
    """Result of the candidate-line enumeration; vertex_set lists the corners
    of the feasible (alpha, beta) region that the enumeration visited."""

    status: str  # found | infeasible
    map: tuple[float, float] | None
    uniqueness: bool | None
    vertex_set: tuple[tuple[float, float], ...]


def oracle_sandwich(f: PiecewiseLinear, g: PiecewiseLinear, tol: float = 1e-9) -> OracleSandwich:
    """Sandwich feasibility by brute force, independent of the LP engine.

    Candidates are the lines through every pair of constraint boundary points
    plus the horizontal lines through each boundary value; a candidate that
    satisfies all constraints is a basic feasible point, i.e. a vertex of the
    feasible (alpha, beta) polygon.
    """
    if f.xs != g.xs:
        raise ValueError("envelope functions must share breakpoints")
    m = len(f.xs)
    if m > 16:
        raise ValueError("oracle is limited to 16 breakpoints")
    xs = np.asarray(f.xs)
    los = np.asarray(f.ys)
    his = np.asarray(g.ys)
    boundary = [(x, v) for x, v in zip(xs, los)] + [(x, v) for x, v in zip(xs, his)]

    candidates: list[tuple[float, float]] = []
    for (x1, v1), (x2, v2) in combinations(boundary, 2):
        if x1 == x2:
            continue
        alpha = (v2 - v1) / (x2 - x1)
        candidates.append((alpha, v1 - alpha * x1))
    for _, v in boundary:
        candidates.append((0.0, v))

    scale = max(1.0, float(np.max(np.abs(np.concatenate([xs, los, his])))))
    slack = tol * scale
    feasible: list[tuple[float, float]] = []
    for alpha, beta in candidates:
        h = alpha * xs + beta
        if np.all(h >= los - slack) and np.all(h <= his + slack):
            feasible.append((alpha, beta))
    if not feasible:
        return OracleSandwich("infeasible", None, None, ())

    dedup: list[tuple[float, float]] = []
    for cand in sorted((float(a) + 0.0, float(b) + 0.0) for a, b in feasible):
        if not any(abs(cand[0] - d[0]) <= slack and abs(cand[1] - d[1]) <= slack for d in dedup):
            dedup.append(cand)
    unique = len(dedup) == 1
    return OracleSandwich("found", dedup[0] if unique else None, unique, tuple(dedup))


def _naive_scalar_fiber(F: SvFunction, x: float) -> tuple[float, float]:
    """[inf F(x), sup F(x)] by plain arithmetic: interpolation, listed fibers,
    or chord envelopes over bracketing graph vertex pairs."""
    if isinstance(F, IntervalPL):
        return (
            float(np.interp(x, F.breakpoints, F.lower)),
            float(np.interp(x, F.breakpoints, F.upper)),
        )
    if isinstance(F, FiberFamily):
        for fx, P in F.fibers:
            if abs(fx - x) <= 1e-9:
                vals = P.array[:, 0]
                return float(vals.min()), float(vals.max())
        if F.default is None:
            raise UndefinedFiberError(f"no fiber defined at x={x}")
        vals = F.default.array[:, 0]
        return float(vals.min()), float(vals.max())
    arr = F.graph.array
    lo, hi = np.inf, -np.inf
    for (x1, y1), (x2, y2) in combinations(arr, 2):
        if x1 > x2:
            x1, x2, y1, y2 = x2, x1, y2, y1
        if x1 - 1e-12 <= x <= x2 + 1e-12:
            y = y1 if x2 == x1 else y1 + (y2 - y1) * (x - x1) / (x2 - x1)
            lo, hi = min(lo, y), max(hi, y)
    for x1, y1 in arr:
        if abs(x1 - x) <= 1e-12:
            lo, hi = min(lo, y1), max(hi, y1)
    if lo > hi:
        raise ValueError(f"empty fiber at x={x}")
    return float(lo), float(hi)


def _sat_disjoint(A: np.ndarray, B: np.ndarray, tol: float) -> bool:
    """Separating-axis disjointness for planar vertex clouds, degenerate-safe:
    axes are every pairwise difference within each cloud, its normal, and the
    differences across clouds."""
    axes = []
    for cloud in (A, B):
        for p, q in combinations(cloud, 2):
            d = q - p
            if np.any(np.abs(d) > 0):
                axes.append(d)
                axes.append(np.array([-d[1], d[0]]))
    for p in A:
        for q in B:
            d = q - p
            if np.any(np.abs(d) > 0):
                axes.append(d)
    if not axes:
        return False  # identical single points
    for axis in axes:
        a_proj = A @ axis
        b_proj = B @ axis
        if a_proj.max() < b_proj.min() - tol or b_proj.max() < a_proj.min() - tol:
            return True
    return False


def _family_fiber_cloud(F: FiberFamily, x: float) -> np.ndarray:
    for fx, P in F.fibers:
        if abs(fx - x) <= 1e-9:
            return P.array
    if F.default is None:
        raise UndefinedFiberError(f"no fiber defined at x={x}")
    return F.default.array


def oracle_condition2_dense(
    F: SvFunction, resolution: int, tol: float = 1e-9, tolerances: Tolerances = DEFAULT
) -> CheckOutcome:
    """Intersection condition on the full dense lattice via naive set arithmetic.

    Scalar instances use interval arithmetic; planar fiber families use
    vertex-cloud Minkowski sums with a separating-axis disjointness test.
    Graph encodings in n >= 2 are outside this oracle's naive toolbox.
    """
    if resolution > 64:
        raise ValueError("resolution is limited to 64")
    scalar = (
        isinstance(F, IntervalPL)
        or (isinstance(F, GraphPolytope) and F.dim == 1)
        or (isinstance(F, FiberFamily) and F.dim == 1)
    )
    if not scalar and not (isinstance(F, FiberFamily) and F.dim == 2):
        raise ValueError("dense oracle handles scalar instances and planar fiber families")
    dom = F.domain
    grid = TripleGrid.dense(dom.a, dom.b, resolution)
    count = 0
    for x, y, t in grid.triples():
        count += 1
        mx = t * x + (1.0 - t) * y
        try:
            if scalar:
                lo_x, hi_x = _naive_scalar_fiber(F, x)
                lo_y, hi_y = _naive_scalar_fiber(F, y)
                lo_m, hi_m = _naive_scalar_fiber(F, mx)
            else:
                cx = _family_fiber_cloud(F, x)
                cy = _family_fiber_cloud(F, y)
                cm = _family_fiber_cloud(F, mx)
        except UndefinedFiberError:
            continue  # mirror the checker: only sample where a value is defined
        if scalar:
            lo_mix = t * lo_x + (1.0 - t) * lo_y
            hi_mix = t * hi_x + (1.0 - t) * hi_y
            gap = max(lo_m - hi_mix, lo_mix - hi_m)
            if gap > tol:
                return CheckOutcome("violation", (x, y, t, float(gap)), count)
        else:
            mix = (t * cx[:, None, :] + (1.0 - t) * cy[None, :, :]).reshape(-1, 2)
            if _sat_disjoint(cm, mix, tol):
                return CheckOutcome("violation", (x, y, t, float("nan")), count)
    return CheckOutcome("pass", None, count)


def oracle_lp_enumerate(
    constraints: list[Halfspace], objective, sense: str = "min", tol: float = 1e-9
):
    """Optimal value and lexicographically smallest optimizer by enumerating
    all basic solutions (intersections of d constraint boundaries); d <= 3 and
    at most 12 constraints. Returns None when no feasible basic point exists."""
    A = np.array([h.normal for h in constraints], dtype=float)
    b = np.array([h.offset for h in constraints], dtype=float)
    m, d = A.shape
    if d > 3 or m > 12:
        raise ValueError("enumeration oracle is limited to d <= 3, m <= 12")
    c = np.asarray(objective, dtype=float)
    scale = max(1.0, float(np.max(np.abs(A))), float(np.max(np.abs(b))))
    best_val = None
    best_points = []
    for rows in combinations(range(m), d):
        sub = A[list(rows)]
        if abs(np.linalg.det(sub)) < 1e-10 * scale**d:
            continue
        v = np.linalg.solve(sub, b[list(rows)])
        if np.all(A @ v <= b + tol * scale):
            val = float(c @ v)
            if best_val is None:
                best_val = val
                best_points = [v]
            elif (val < best_val - tol) if sense == "min" else (val > best_val + tol):
                best_val = val
                best_points = [v]
            elif abs(val - best_val) <= tol:
                best_points.append(v)
    if best_val is None:
        return None
    best_points.sort(key=lambda p: tuple(p))
    return best_val, tuple(float(x) for x in best_points[0])
