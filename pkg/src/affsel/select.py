"""Constructors for the objects whose existence the theory guarantees.

* :func:`sandwich_affine` finds an affine h with f <= h <= g between two
  piecewise-linear envelopes (or a certificate + violating triple when none
  exists).
* :func:`affine_selection_convex` runs the dimension-reduction induction for a
  convex graph encoding into R^n: project the last value coordinate away,
  select recursively, then slice the graph along the recursive selection and
  interpolate slice midpoints.
* :func:`affine_selection_endpoint` is the independent cross-check route that
  only uses endpoint fibers and graph convexity.
* :func:`fixed_point` turns a sandwich selection of F : [a,b] -> cc([a,b])
  into a point with x in F(x).
* :func:`transversal_solve` finds an affine map meeting every listed fiber, or
  proves none exists, with a uniqueness probe per coordinate.

Every successful selection is verified by membership at N_VERIFY equally
spaced sample points before it is returned; the verification budget is
``tolerances.select``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .checks import CertificateWitness, TripleGrid, check_condition2, witness_from_certificate
from .geometry import Polytope, membership_gap, slice_with_weights
from .lp import Halfspace, LpError, solve
from .model import (
    AffineMap,
    GraphPolytope,
    PiecewiseLinear,
    SvFunction,
    inf_sup,
    value_gap,
)
from .tolerances import DEFAULT, Tolerances

N_VERIFY = 101


class SelectionVerificationError(RuntimeError):
    """A constructed map failed its membership verification; never expected
    for valid convex inputs and reported rather than silently repaired."""


class FixedPointPreconditionError(ValueError):
    """The fixed-point hypotheses fail: values escape the domain interval."""


class FixedPointInfeasibleError(ValueError):
    """No affine selection exists; carries the violating triple."""

    def __init__(self, witness):
        super().__init__(f"no affine selection: violated at {witness}")
        self.witness = witness


@dataclass(frozen=True)
class SelectionResult:
    status: str  # found | infeasible | multiple
    map: AffineMap | None = None
    witness: CertificateWitness | None = None
    certificate: tuple[tuple[int, float], ...] | None = None
    uniqueness: bool | None = None
    spread: tuple[float, ...] | None = None
    max_violation: float | None = None


# ---------------------------------------------------------------------------
# scalar sandwich


def sandwich_constraints(f: PiecewiseLinear, g: PiecewiseLinear) -> list[Halfspace]:
    """Sandwich LP over (alpha, beta): per breakpoint the lower bound first."""
    cons: list[Halfspace] = []
    for x, lo, hi in zip(f.xs, f.ys, g.ys):
        cons.append(Halfspace((-x, -1.0), -lo))
        cons.append(Halfspace((x, 1.0), hi))
    return cons


def _scalar_map(alpha: float, beta: float) -> AffineMap:
    return AffineMap((beta,), (alpha,))


def sandwich_affine(
    f: PiecewiseLinear,
    g: PiecewiseLinear,
    objective: str = "chebyshev",
    tolerances: Tolerances = DEFAULT,
    probe_uniqueness: bool = True,
) -> SelectionResult:
    """Affine h with f <= h <= g on the common breakpoint interval.

    Enforcing the bounds at the breakpoints is enough: h is affine and f, g
    are linear between breakpoints. The chebyshev objective maximizes the
    minimal slack; lexmin picks the lexicographically smallest (alpha, beta).
    """
    if f.xs != g.xs:
        raise ValueError("envelope functions must share breakpoints")
    if any(lo > hi for lo, hi in zip(f.ys, g.ys)):
        raise ValueError("lower envelope exceeds upper envelope")
    if objective not in ("chebyshev", "lexmin"):
        raise ValueError(f"unknown objective {objective!r}")

    if len(f.xs) == 1:
        # Degenerate domain: slope unconstrained, fix it at zero.
        beta = 0.5 * (f.ys[0] + g.ys[0]) if objective == "chebyshev" else f.ys[0]
        return SelectionResult("found", _scalar_map(0.0, beta), uniqueness=f.ys[0] == g.ys[0])

    cons = sandwich_constraints(f, g)
    feas = solve(cons, tolerances=tolerances)
    if feas.status == "infeasible":
        witness = witness_from_certificate(feas.certificate, f.xs)
        return SelectionResult("infeasible", witness=witness, certificate=feas.certificate)

    if objective == "chebyshev":
        lifted = [Halfspace(h.normal + (1.0,), h.offset) for h in cons]
        out = solve(lifted, objective=(0.0, 0.0, 1.0), sense="max", tolerances=tolerances)
        if out.status != "feasible":
            raise LpError("slack maximization failed unexpectedly")
        alpha, beta = out.point[0], out.point[1]
    else:
        out = solve(cons, objective=(1.0, 0.0), sense="min", tolerances=tolerances)
        if out.status == "unbounded":
            raise LpError("lexmin needs a bounded slope; got an unbounded one")
        alpha, beta = out.point

    uniqueness = None
    spread = None
    if probe_uniqueness:
        bounds = []
        for j in (0, 1):
            e = [0.0, 0.0]
            e[j] = 1.0
            lo = solve(cons, objective=e, sense="min", tolerances=tolerances, lex_refine=False)
            hi = solve(cons, objective=e, sense="max", tolerances=tolerances, lex_refine=False)
            if lo.status != "feasible" or hi.status != "feasible":
                raise LpError("uniqueness probe must stay feasible")
            bounds.append(hi.value - lo.value)
        spread = tuple(bounds)
        uniqueness = all(s <= tolerances.unique for s in spread)

    amap = _scalar_map(alpha, beta)
    xs = np.linspace(f.xs[0], f.xs[-1], N_VERIFY)
    hvals = alpha * xs + beta
    violation = float(np.max(np.maximum(f(xs) - hvals, hvals - g(xs)), initial=0.0))
    if violation > tolerances.select:
        raise SelectionVerificationError(f"sandwich map violates the envelope by {violation}")
    return SelectionResult(
        "found", amap, uniqueness=uniqueness, spread=spread, max_violation=violation
    )


# ---------------------------------------------------------------------------
# convex graph selections


def _interp_map(a: float, b: float, point_a: np.ndarray, point_b: np.ndarray) -> AffineMap:
    d = (point_b - point_a) / (b - a)
    c = point_a - a * d
    return AffineMap(tuple(c), tuple(d))


def _verify_graph_selection(
    F: GraphPolytope,
    amap: AffineMap,
    lam_a: np.ndarray,
    lam_b: np.ndarray,
    tolerances: Tolerances,
) -> float:
    """Membership of the selection at N_VERIFY samples, certified by
    interpolated barycentric weights; falls back to exact LP gaps on demand."""
    arr = F.graph.array
    a, b = F.domain.a, F.domain.b
    xs = np.linspace(a, b, N_VERIFY)
    theta = (b - xs) / (b - a)
    lam = np.outer(lam_a, theta) + np.outer(lam_b, 1.0 - theta)  # k x N
    pts = arr.T @ lam  # (1+n) x N
    target = np.vstack([xs[None, :], np.asarray(amap.c)[:, None] + np.outer(amap.d, xs)])
    resid = np.abs(pts - target)
    mass = np.abs(lam.sum(axis=0) - 1.0)
    gaps = np.maximum(resid.max(axis=0), mass)
    worst = float(gaps.max())
    if worst > tolerances.select:
        worst = 0.0
        for i in np.nonzero(gaps > tolerances.select)[0]:
            exact = value_gap(F, float(xs[i]), amap(float(xs[i])), tolerances)
            if exact > tolerances.select:
                raise SelectionVerificationError(
                    f"selection leaves the graph at x={float(xs[i])} by {exact}"
                )
            worst = max(worst, exact)
        worst = max(worst, float(gaps[gaps <= tolerances.select].max(initial=0.0)))
    for x in (a, 0.5 * (a + b), b):  # independent spot check through the LP
        exact = value_gap(F, x, amap(x), tolerances)
        if exact > tolerances.select:
            raise SelectionVerificationError(f"selection leaves the graph at x={x} by {exact}")
    return worst


def _constant_map_result(F: GraphPolytope, tolerances: Tolerances) -> SelectionResult:
    """Degenerate domain a == b: the constant map at the fiber's center.

    For n == 1 the center is the interval midpoint (its Chebyshev center);
    for n >= 2 the vertex barycenter stands in, since a Chebyshev center of a
    V-polytope would need facet enumeration.
    """
    arr = F.graph.array
    if F.dim == 1:
        lo, hi = float(arr[:, 1].min()), float(arr[:, 1].max())
        center = np.array([0.5 * (lo + hi)])
    else:
        center = arr[:, 1:].mean(axis=0)
    amap = AffineMap(tuple(center), (0.0,) * F.dim)
    gap = value_gap(F, F.domain.a, center, tolerances)
    if gap > tolerances.select:
        raise SelectionVerificationError(f"degenerate-domain center misses the fiber by {gap}")
    return SelectionResult("found", amap, max_violation=float(gap))


def _inductive_endpoints(arr: np.ndarray, a: float, b: float, tolerances: Tolerances):
    """Endpoint points of the inductive selection plus their barycentric weights.

    arr columns are (x, y_1 .. y_k). Base case k = 1: midpoints of the two
    endpoint slices. Otherwise recurse on the projection that drops the last
    column, then slice the full graph along the recursive values.

    Slices first run at the engine noise floor; when a recursive value sits on
    the projected boundary in floating point that slice can come back empty,
    and only then is the documented ``slice_slack`` fattening applied. An
    empty fattened slice is a reported failure, never silently repaired.
    """
    if arr.shape[1] == 2:
        w_a: tuple[float, ...] = (a,)
        w_b: tuple[float, ...] = (b,)
    else:
        pa, _, pb, _ = _inductive_endpoints(arr[:, :-1], a, b, tolerances)
        w_a, w_b = tuple(pa), tuple(pb)

    P = Polytope.from_array(arr)
    floor = tolerances.feas(P.scale_of())

    def sliced(w, x):
        out = slice_with_weights(P, w, floor, tolerances)
        if out is None:
            out = slice_with_weights(P, w, tolerances.slice_slack, tolerances)
        if out is None:
            raise SelectionVerificationError(
                f"empty slice at x={x} beyond slack {tolerances.slice_slack}"
            )
        return out

    sl_a = sliced(w_a, a)
    sl_b = sliced(w_b, b)
    zlo_a, lam_lo_a, zhi_a, lam_hi_a = sl_a
    zlo_b, lam_lo_b, zhi_b, lam_hi_b = sl_b
    point_a = np.array(w_a + (0.5 * (zlo_a + zhi_a),))
    point_b = np.array(w_b + (0.5 * (zlo_b + zhi_b),))
    return point_a, 0.5 * (lam_lo_a + lam_hi_a), point_b, 0.5 * (lam_lo_b + lam_hi_b)


def affine_selection_convex(F: GraphPolytope, tolerances: Tolerances = DEFAULT) -> SelectionResult:
    """Affine selection of a convex graph encoding by dimension reduction.

    The segment between the two constructed endpoint points stays inside the
    convex graph, so interpolating them is a selection; slices taken along
    the recursive values are fattened by ``tolerances.slice_slack`` because
    those values may sit on the projected graph's boundary in floating point.
    """
    a, b = F.domain.a, F.domain.b
    if b - a <= tolerances.feas(F.graph.scale_of()):
        return _constant_map_result(F, tolerances)
    point_a, lam_a, point_b, lam_b = _inductive_endpoints(F.graph.array, a, b, tolerances)
    amap = _interp_map(a, b, point_a[1:], point_b[1:])
    worst = _verify_graph_selection(F, amap, lam_a, lam_b, tolerances)
    return SelectionResult("found", amap, max_violation=worst)


def affine_selection_endpoint(F: GraphPolytope, tolerances: Tolerances = DEFAULT) -> SelectionResult:
    """Cross-check selection using only the endpoint fibers.

    Any segment between points of the endpoint fibers lies in the convex
    graph. For n = 1 the endpoints are slice midpoints; for n >= 2 the
    barycenter of the vertices at each extreme abscissa is used, which is
    feasible by construction (uniform weights witness it).
    """
    a, b = F.domain.a, F.domain.b
    arr = F.graph.array
    if b - a <= tolerances.feas(F.graph.scale_of()):
        return _constant_map_result(F, tolerances)
    if F.dim == 1:
        point_a, lam_a, point_b, lam_b = _inductive_endpoints(arr, a, b, tolerances)
    else:
        tol = tolerances.feas(F.graph.scale_of())
        lam_a = (np.abs(arr[:, 0] - a) <= tol).astype(float)
        lam_b = (np.abs(arr[:, 0] - b) <= tol).astype(float)
        lam_a /= lam_a.sum()
        lam_b /= lam_b.sum()
        point_a = arr.T @ lam_a
        point_b = arr.T @ lam_b
    amap = _interp_map(a, b, np.asarray(point_a)[1:], np.asarray(point_b)[1:])
    worst = _verify_graph_selection(F, amap, np.asarray(lam_a), np.asarray(lam_b), tolerances)
    return SelectionResult("found", amap, max_violation=worst)


# ---------------------------------------------------------------------------
# fixed points


def fixed_point(
    F: SvFunction, objective: str = "chebyshev", tolerances: Tolerances = DEFAULT
) -> float:
    """A point with x in F(x), for scalar F mapping [a, b] into itself.

    Solves the sandwich between the envelopes and intersects the resulting h
    with the diagonal; a slope of one forces h to be (numerically) the
    identity, in which case the left endpoint is returned.
    """
    flo, fup = inf_sup(F, tolerances)
    a, b = flo.xs[0], flo.xs[-1]
    tol = tolerances.feas(max(1.0, abs(a), abs(b), max(abs(v) for v in flo.ys + fup.ys)))
    if max(fup.ys) > b + tol or min(flo.ys) < a - tol:
        raise FixedPointPreconditionError("values escape the domain interval")

    pre = check_condition2(F, TripleGrid.breakpoint_combos(flo.xs), tolerances=tolerances)
    if pre.status == "violation":
        x, y, t, _ = pre.witness
        m = t * x + (1.0 - t) * y
        first = flo(m) - (t * fup(x) + (1.0 - t) * fup(y))
        second = (t * flo(x) + (1.0 - t) * flo(y)) - fup(m)
        raise FixedPointInfeasibleError(
            CertificateWitness(x, y, t, "first" if first >= second else "second")
        )

    res = sandwich_affine(flo, fup, objective, tolerances, probe_uniqueness=False)
    if res.status != "found":
        raise FixedPointInfeasibleError(res.witness)
    alpha, beta = res.map.d[0], res.map.c[0]
    if abs(alpha - 1.0) > tolerances.opt:
        x_star = beta / (1.0 - alpha)
        if not (a - tol <= x_star <= b + tol):
            raise SelectionVerificationError(f"fixed point {x_star} left the domain")
        x_star = min(max(x_star, a), b)
    else:
        x_star = a
    gap = value_gap(F, x_star, x_star, tolerances)
    if gap > tolerances.select:
        raise SelectionVerificationError(f"candidate fixed point misses its fiber by {gap}")
    return float(x_star)


# ---------------------------------------------------------------------------
# transversals


def transversal_constraints(fibers) -> tuple[list[Halfspace], int, int]:
    """Halfspace encoding of: c + x_i d in conv(P_i) for every listed fiber.

    Variables are (c, d, lambda blocks); equalities appear as inequality
    pairs so infeasibility certificates stay in the documented format.
    """
    n = fibers[0][1].dim
    sizes = [len(P.vertices) for _, P in fibers]
    total = 2 * n + sum(sizes)
    cons: list[Halfspace] = []
    offset = 2 * n
    for (x, P), k in zip(fibers, sizes):
        arr = P.array
        for j in range(n):
            row = np.zeros(total)
            row[j] = 1.0
            row[n + j] = x
            row[offset : offset + k] = -arr[:, j]
            cons.append(Halfspace(tuple(row), 0.0))
            cons.append(Halfspace(tuple(-row), 0.0))
        row = np.zeros(total)
        row[offset : offset + k] = 1.0
        cons.append(Halfspace(tuple(row), 1.0))
        cons.append(Halfspace(tuple(-row), -1.0))
        for j in range(k):
            row = np.zeros(total)
            row[offset + j] = -1.0
            cons.append(Halfspace(tuple(row), 0.0))
        offset += k
    return cons, n, total


def transversal_solve(fibers, tolerances: Tolerances = DEFAULT) -> SelectionResult:
    """Affine map whose graph meets every listed fiber.

    When feasible, each coordinate of (c, d) is minimized and maximized; if
    every spread stays below ``tolerances.unique`` the solution is the unique
    transversal and the per-coordinate midpoints are returned, otherwise one
    feasible map is returned with status ``multiple``.
    """
    fibers = [(float(x), P) for x, P in fibers]
    if not fibers:
        raise ValueError("at least one fiber is required")
    n = fibers[0][1].dim
    if any(P.dim != n for _, P in fibers):
        raise ValueError("fibers must share one dimension")
    xs = [x for x, _ in fibers]
    if len(set(xs)) != len(xs):
        raise ValueError("fiber abscissae must be distinct")

    cons, n, total = transversal_constraints(fibers)
    feas = solve(cons, tolerances=tolerances)
    if feas.status == "infeasible":
        return SelectionResult("infeasible", certificate=feas.certificate)

    lows, highs = [], []
    bounded = True
    for j in range(2 * n):
        e = np.zeros(total)
        e[j] = 1.0
        lo = solve(cons, objective=tuple(e), sense="min", tolerances=tolerances, lex_refine=False)
        hi = solve(cons, objective=tuple(e), sense="max", tolerances=tolerances, lex_refine=False)
        if lo.status != "feasible" or hi.status != "feasible":
            bounded = False  # an unbounded coordinate already rules out uniqueness
            break
        lows.append(lo.value)
        highs.append(hi.value)
    spread = tuple(h - l for l, h in zip(lows, highs)) if bounded else None
    unique = bounded and all(s <= tolerances.unique for s in spread)

    if unique:
        mid = [0.5 * (l + h) for l, h in zip(lows, highs)]
        amap = AffineMap(tuple(mid[:n]), tuple(mid[n:]))
        status = "found"
    else:
        amap = _map_from_point(feas.point, n)
        status = "multiple"

    worst = 0.0
    for x, P in fibers:
        gap = membership_gap(P, amap(x), tolerances)
        if gap > tolerances.select:
            raise SelectionVerificationError(f"transversal misses the fiber at x={x} by {gap}")
        worst = max(worst, gap)
    return SelectionResult(
        status, amap, uniqueness=unique if bounded else False, spread=spread, max_violation=worst
    )


def _map_from_point(point, n: int) -> AffineMap:
    return AffineMap(tuple(point[:n]), tuple(point[n : 2 * n]))
