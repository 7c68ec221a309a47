"""Compact convex sets as vertex lists (V-representation).

Everything the sandwich/selection machinery needs from a convex set is
LP-expressible over its vertices, so no facet enumeration ever happens here.
Degenerate polytopes (segments, points) are first-class citizens.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .lp import Halfspace, LpError, solve, solve_standard
from .tolerances import DEFAULT, Tolerances


@dataclass(frozen=True)
class Polytope:
    """conv(vertices) for a nonempty finite vertex list in R^dim."""

    vertices: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        verts = tuple(tuple(float(c) for c in v) for v in self.vertices)
        if not verts:
            raise ValueError("a polytope needs at least one vertex")
        dim = len(verts[0])
        if dim < 1 or any(len(v) != dim for v in verts):
            raise ValueError("vertices must share a positive dimension")
        if not all(all(np.isfinite(c) for c in v) for v in verts):
            raise ValueError("vertex coordinates must be finite")
        object.__setattr__(self, "vertices", verts)

    @property
    def dim(self) -> int:
        return len(self.vertices[0])

    @cached_property
    def array(self) -> np.ndarray:
        a = np.array(self.vertices, dtype=float)
        a.setflags(write=False)
        return a

    @staticmethod
    def from_array(arr) -> "Polytope":
        return Polytope(tuple(tuple(row) for row in np.atleast_2d(np.asarray(arr, dtype=float))))

    def scale_of(self) -> float:
        return max(1.0, float(np.max(np.abs(self.array))))


@dataclass(frozen=True)
class IntervalSet:
    """A compact real interval [lo, hi]."""

    lo: float
    hi: float

    def __post_init__(self):
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)):
            raise ValueError("interval bounds must be finite")
        if self.lo > self.hi:
            raise ValueError("interval lower bound exceeds upper bound")

    def as_polytope(self) -> Polytope:
        return Polytope(((self.lo,), (self.hi,)))

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)


def scale(t: float, P: Polytope) -> Polytope:
    """The scalar multiple t.conv(P); exact duplicates are dropped."""
    t = float(t)
    if not np.isfinite(t):
        raise ValueError("scale factor must be finite")
    arr = t * P.array
    _, idx = np.unique(arr, axis=0, return_index=True)
    return Polytope.from_array(arr[np.sort(idx)])


def minkowski_sum(P: Polytope, Q: Polytope) -> Polytope:
    """Vertex cloud spanning conv(P) + conv(Q); redundancy survives until reduce()."""
    if P.dim != Q.dim:
        raise ValueError("dimension mismatch")
    sums = (P.array[:, None, :] + Q.array[None, :, :]).reshape(-1, P.dim)
    return Polytope.from_array(sums)


def _barycentric_system(P: Polytope, v) -> tuple[np.ndarray, np.ndarray]:
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.shape[0] != P.dim:
        raise ValueError("point dimension does not match the polytope")
    E = np.vstack([np.ones((1, len(P.vertices))), P.array.T])
    f = np.concatenate([[1.0], v])
    return E, f


def _linf_gap(E: np.ndarray, f: np.ndarray, tolerances: Tolerances) -> float:
    """min over z >= 0 of the worst-row residual |Ez - f|_inf."""
    r, k = E.shape
    cols = k + 1 + 2 * r
    big = np.zeros((2 * r, cols))
    big[:r, :k] = E
    big[r:, :k] = -E
    big[:, k] = -1.0
    big[:r, k + 1 : k + 1 + r] = np.eye(r)
    big[r:, k + 1 + r :] = np.eye(r)
    rhs = np.concatenate([f, -f])
    obj = np.zeros(cols)
    obj[k] = 1.0
    out = solve_standard(big, rhs, objective=obj, sense="min", tolerances=tolerances)
    if out.status != "feasible":
        raise LpError("gap program must be feasible")
    return max(0.0, float(out.value))


def membership_gap(P: Polytope, v, tolerances: Tolerances = DEFAULT) -> float:
    """Smallest uniform slack making v a convex combination of the vertices."""
    E, f = _barycentric_system(P, v)
    return _linf_gap(E, f, tolerances)


def contains_point(P: Polytope, v, eps: float, tolerances: Tolerances = DEFAULT) -> bool:
    """Membership in conv(P) with per-constraint slack eps in the barycentric LP."""
    s = max(P.scale_of(), float(np.max(np.abs(np.asarray(v, dtype=float)))) if np.size(v) else 1.0)
    return membership_gap(P, v, tolerances) <= eps + tolerances.feas(s)


def intersection_gap(P: Polytope, Q: Polytope, tolerances: Tolerances = DEFAULT) -> float:
    """Smallest uniform slack under which conv(P) and conv(Q) share a point."""
    if P.dim != Q.dim:
        raise ValueError("dimension mismatch")
    kp, kq = len(P.vertices), len(Q.vertices)
    E = np.zeros((P.dim + 2, kp + kq))
    E[0, :kp] = 1.0
    E[1, kp:] = 1.0
    E[2:, :kp] = P.array.T
    E[2:, kp:] = -Q.array.T
    f = np.zeros(P.dim + 2)
    f[0] = 1.0
    f[1] = 1.0
    return _linf_gap(E, f, tolerances)


def intersects(P: Polytope, Q: Polytope, eps: float, tolerances: Tolerances = DEFAULT) -> bool:
    s = max(P.scale_of(), Q.scale_of())
    return intersection_gap(P, Q, tolerances) <= eps + tolerances.feas(s)


def subset(P: Polytope, Q: Polytope, eps: float, tolerances: Tolerances = DEFAULT) -> bool:
    """conv(P) inside conv(Q): every vertex of P belongs to Q (Q is convex)."""
    if P.dim != Q.dim:
        raise ValueError("dimension mismatch")
    return all(contains_point(Q, v, eps, tolerances) for v in P.vertices)


def subset_gap(P: Polytope, Q: Polytope, tolerances: Tolerances = DEFAULT) -> float:
    """Worst membership gap of a P-vertex in Q; 0 when P is inside Q."""
    return max(membership_gap(Q, v, tolerances) for v in P.vertices)


def project_drop_last(P: Polytope) -> Polytope:
    """Coordinate projection deleting the last axis; hull commutes with it."""
    if P.dim < 2:
        raise ValueError("projection needs dimension at least 2")
    return Polytope.from_array(P.array[:, :-1])


def _slice_system(P: Polytope, w, eps: float):
    w = np.asarray(w, dtype=float).reshape(-1)
    if w.shape[0] != P.dim - 1:
        raise ValueError("slice point must match the leading coordinates")
    k = len(P.vertices)
    B = np.vstack([np.ones((1, k)), P.array[:, :-1].T])
    g = np.concatenate([[1.0], w])
    r = B.shape[0]
    E = np.zeros((2 * r, k + 2 * r))
    E[:r, :k] = B
    E[r:, :k] = -B
    E[:r, k : k + r] = np.eye(r)
    E[r:, k + r :] = np.eye(r)
    f = np.concatenate([g + eps, eps - g])
    obj = np.zeros(k + 2 * r)
    obj[:k] = P.array[:, -1]
    return E, f, obj, k


def slice_interval(
    P: Polytope, w, eps: float, tolerances: Tolerances = DEFAULT
) -> IntervalSet | None:
    """Range of the last coordinate over the fiber at w, each equality relaxed by eps."""
    if P.dim < 2:
        raise ValueError("slicing needs dimension at least 2")
    E, f, obj, _ = _slice_system(P, w, eps)
    lo = solve_standard(E, f, objective=obj, sense="min", tolerances=tolerances)
    if lo.status != "feasible":
        return None
    hi = solve_standard(E, f, objective=obj, sense="max", tolerances=tolerances)
    if hi.status != "feasible":
        return None
    if lo.value > hi.value:  # roundoff on a degenerate fiber
        mid = 0.5 * (lo.value + hi.value)
        return IntervalSet(mid, mid)
    return IntervalSet(lo.value, hi.value)


def slice_with_weights(P: Polytope, w, eps: float, tolerances: Tolerances = DEFAULT):
    """Like slice_interval but also returns the barycentric weights attaining
    the two extremes; None when the fiber is empty."""
    if P.dim < 2:
        raise ValueError("slicing needs dimension at least 2")
    E, f, obj, k = _slice_system(P, w, eps)
    lo = solve_standard(E, f, objective=obj, sense="min", tolerances=tolerances)
    if lo.status != "feasible":
        return None
    hi = solve_standard(E, f, objective=obj, sense="max", tolerances=tolerances)
    if hi.status != "feasible":
        return None
    lam_lo = np.asarray(lo.point[:k])
    lam_hi = np.asarray(hi.point[:k])
    return float(lo.value), lam_lo, float(hi.value), lam_hi


def reduce(P: Polytope, tolerances: Tolerances = DEFAULT) -> Polytope:
    """Minimal vertex list spanning the same hull, in lexicographic order.

    A vertex is dropped iff it lies in the hull of the remaining ones, so each
    removal preserves the set; near-duplicates go first.
    """
    tol = tolerances.feas(P.scale_of())
    rows = [np.asarray(v) for v in sorted(P.vertices)]
    kept: list[np.ndarray] = []
    for v in rows:
        if any(np.max(np.abs(v - u)) <= tol for u in kept):
            continue
        kept.append(v)
    i = 0
    while i < len(kept) and len(kept) > 1:
        rest = kept[:i] + kept[i + 1 :]
        if membership_gap(Polytope.from_array(np.array(rest)), kept[i], tolerances) <= tol:
            kept.pop(i)
        else:
            i += 1
    return Polytope(tuple(tuple(map(float, v)) for v in kept))


def hull_equal(P: Polytope, Q: Polytope, tolerances: Tolerances = DEFAULT) -> bool:
    """Equality of the spanned hulls via reduce() and sorted vertex comparison."""
    rp, rq = reduce(P, tolerances), reduce(Q, tolerances)
    if len(rp.vertices) != len(rq.vertices):
        return False
    tol = tolerances.feas(max(P.scale_of(), Q.scale_of()))
    return bool(np.max(np.abs(rp.array - rq.array)) <= 10 * tol)


def separation_distance(P: Polytope, v, tolerances: Tolerances = DEFAULT) -> float:
    """Lower bound on the Euclidean distance from v to conv(P).

    Maximizes the separation margin over directions in the unit box, then
    renormalizes the best direction to Euclidean length one. Returns 0.0 for
    points inside the hull; exact whenever the nearest face's normal is a box
    optimum (always true for the segment/point fixtures exercised here).
    """
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.shape[0] != P.dim:
        raise ValueError("point dimension does not match the polytope")
    d = P.dim
    cons: list[Halfspace] = []
    for p in P.vertices:
        cons.append(Halfspace(tuple(p) + (-1.0,), 0.0))  # a.p <= s
    for j in range(d):
        e = [0.0] * (d + 1)
        e[j] = 1.0
        cons.append(Halfspace(tuple(e), 1.0))
        e[j] = -1.0
        cons.append(Halfspace(tuple(e), 1.0))
    out = solve(cons, objective=tuple(v) + (-1.0,), sense="max", tolerances=tolerances)
    if out.status != "feasible":
        raise LpError("separation program must have a bounded optimum")
    if out.value <= 0.0:
        return 0.0
    a = np.asarray(out.point[:d])
    norm = float(np.linalg.norm(a))
    if norm == 0.0:
        return 0.0
    return float(out.value) / norm
