"""Finite-grid checks of the set-valued hypotheses.

Verdicts are statements about the sampled triples (x, y, t) only; reports
carry the grid description. For piecewise-linear envelopes the
``breakpoint-combos`` policy is exactly sufficient: an affine sandwich exists
iff no combo triple violates the crossed envelope inequalities, which is the
2-D Helly argument made executable.

Fibers of graph encodings in n >= 2 are never materialized, so for those the
inclusion checks compare support functions over a fixed direction set and the
intersection check solves one combined feasibility program per triple.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement, product

import numpy as np

from .geometry import (
    IntervalSet,
    Polytope,
    intersection_gap,
    minkowski_sum,
    scale,
    subset_gap,
    _linf_gap,
)
from .lp import solve_standard
from .model import (
    GraphPolytope,
    IntervalPL,
    PiecewiseLinear,
    SvFunction,
    UndefinedFiberError,
    evaluate,
)
from .tolerances import DEFAULT, Tolerances


class MalformedCertificateError(ValueError):
    """An infeasibility certificate that is not a bracketed sandwich pattern."""


@dataclass(frozen=True)
class TripleGrid:
    """Sampled quantifiers: abscissa pairs from xs, mixing weights from ts."""

    xs: tuple[float, ...]
    ts: tuple[float, ...]
    policy: str = "all-pairs"

    def __post_init__(self):
        object.__setattr__(self, "xs", tuple(float(v) for v in self.xs))
        object.__setattr__(self, "ts", tuple(float(v) for v in self.ts))
        if any(t < 0.0 or t > 1.0 for t in self.ts):
            raise ValueError("mixing weights must lie in [0, 1]")
        if self.policy not in ("all-pairs", "breakpoint-combos"):
            raise ValueError(f"unknown grid policy {self.policy!r}")

    @staticmethod
    def all_pairs(xs, ts) -> "TripleGrid":
        return TripleGrid(tuple(sorted(set(float(x) for x in xs))), tuple(ts), "all-pairs")

    @staticmethod
    def breakpoint_combos(xs) -> "TripleGrid":
        return TripleGrid(tuple(sorted(set(float(x) for x in xs))), (), "breakpoint-combos")

    @staticmethod
    def dense(a: float, b: float, resolution: int) -> "TripleGrid":
        xs = [a + k * (b - a) / resolution for k in range(resolution + 1)]
        ts = [j / resolution for j in range(resolution + 1)]
        return TripleGrid.all_pairs(xs, ts)

    def triples(self):
        """Deterministic lexicographic enumeration of (x, y, t)."""
        if self.policy == "breakpoint-combos":
            xs = self.xs
            for i in range(len(xs)):
                for j in range(i + 1, len(xs)):
                    for k in range(j + 1, len(xs)):
                        t = (xs[k] - xs[j]) / (xs[k] - xs[i])
                        yield xs[i], xs[k], t
        else:
            for x, y in combinations_with_replacement(self.xs, 2):
                for t in self.ts:
                    yield x, y, t

    def describe(self) -> str:
        if self.policy == "breakpoint-combos":
            return f"breakpoint-combos over xs={list(self.xs)}"
        return f"all-pairs over xs={list(self.xs)}, ts={list(self.ts)}"


@dataclass(frozen=True)
class CheckOutcome:
    status: str  # pass | violation
    witness: tuple[float, float, float, float] | None = None  # (x, y, t, margin)
    triples_checked: int = 0


def _instance_scale(F: SvFunction) -> float:
    if isinstance(F, IntervalPL):
        vals = F.breakpoints + F.lower + F.upper
        return max(1.0, max(abs(v) for v in vals))
    if isinstance(F, GraphPolytope):
        return F.graph.scale_of()
    s = 1.0
    for _, P in F.fibers:
        s = max(s, P.scale_of())
    if F.default is not None:
        s = max(s, F.default.scale_of())
    return max(s, abs(F.domain.a), abs(F.domain.b))


def _fiber(F: SvFunction, x: float, tolerances: Tolerances) -> Polytope:
    val = evaluate(F, x, tolerances.feas(_instance_scale(F)), tolerances)
    return val.as_polytope() if isinstance(val, IntervalSet) else val


def _materializable(F: SvFunction) -> bool:
    return not (isinstance(F, GraphPolytope) and F.dim >= 2)


def _directions(n: int) -> list[np.ndarray]:
    dirs = []
    for v in product((-1.0, 0.0, 1.0), repeat=n):
        if any(v):
            a = np.array(v)
            dirs.append(a / np.linalg.norm(a))
    return dirs


def _graph_support(graph: Polytope, x: float, a: np.ndarray, tolerances: Tolerances) -> float:
    """max a.y over the graph fiber at x, abscissa rows relaxed by the noise floor."""
    arr = graph.array
    k = arr.shape[0]
    eps = tolerances.feas(graph.scale_of())
    B = np.vstack([np.ones((1, k)), arr[:, :1].T])
    g = np.array([1.0, x])
    E = np.zeros((4, k + 4))
    E[:2, :k] = B
    E[2:, :k] = -B
    E[:2, k : k + 2] = np.eye(2)
    E[2:, k + 2 :] = np.eye(2)
    f = np.concatenate([g + eps, eps - g])
    obj = np.zeros(k + 4)
    obj[:k] = arr[:, 1:] @ a
    out = solve_standard(E, f, objective=obj, sense="max", tolerances=tolerances)
    if out.status != "feasible":
        raise ValueError(f"empty fiber at x={x}")
    return float(out.value)


def _graph_inclusion_gap(
    F: GraphPolytope, x: float, y: float, t: float, direction: str, tolerances: Tolerances
) -> float:
    """Support-function excess for the convexity (or concavity) inclusion."""
    m = t * x + (1.0 - t) * y
    worst = 0.0
    for a in _directions(F.dim):
        hx = _graph_support(F.graph, x, a, tolerances)
        hy = _graph_support(F.graph, y, a, tolerances)
        hm = _graph_support(F.graph, m, a, tolerances)
        mix = t * hx + (1.0 - t) * hy
        excess = (mix - hm) if direction == "convex" else (hm - mix)
        worst = max(worst, excess)
    return worst


def _graph_condition2_gap(
    F: GraphPolytope, x: float, y: float, t: float, tolerances: Tolerances
) -> float:
    """Smallest uniform relaxation under which F(tx+(1-t)y) meets tF(x)+(1-t)F(y)."""
    arr = F.graph.array
    k = arr.shape[0]
    n = F.dim
    m = t * x + (1.0 - t) * y
    rows = 6 + n
    E = np.zeros((rows, 3 * k))
    f = np.zeros(rows)
    for blk, (absc, mass_row, absc_row) in enumerate(((m, 0, 3), (x, 1, 4), (y, 2, 5))):
        sl = slice(blk * k, (blk + 1) * k)
        E[mass_row, sl] = 1.0
        E[absc_row, sl] = arr[:, 0]
        f[mass_row] = 1.0
        f[absc_row] = absc
    Y = arr[:, 1:]
    for j in range(n):
        E[6 + j, 0:k] = Y[:, j]
        E[6 + j, k : 2 * k] = -t * Y[:, j]
        E[6 + j, 2 * k :] = -(1.0 - t) * Y[:, j]
    return _linf_gap(E, f, tolerances)


def check_convex(
    F: SvFunction, grid: TripleGrid, eps: float | None = None, tolerances: Tolerances = DEFAULT
) -> CheckOutcome:
    """Inclusion tF(x) + (1-t)F(y) inside F(tx + (1-t)y) at every grid triple."""
    return _check_inclusion(F, grid, "convex", eps, tolerances)


def check_concave(
    F: SvFunction, grid: TripleGrid, eps: float | None = None, tolerances: Tolerances = DEFAULT
) -> CheckOutcome:
    """Reverse inclusion: F(tx + (1-t)y) inside tF(x) + (1-t)F(y)."""
    return _check_inclusion(F, grid, "concave", eps, tolerances)


def _check_inclusion(F, grid, direction, eps, tolerances) -> CheckOutcome:
    if eps is None:
        eps = tolerances.feas(_instance_scale(F))
    count = 0
    for x, y, t in grid.triples():
        count += 1
        mx = t * x + (1.0 - t) * y
        try:
            if _materializable(F):
                fx = _fiber(F, x, tolerances)
                fy = _fiber(F, y, tolerances)
                fm = _fiber(F, mx, tolerances)
                mix = minkowski_sum(scale(t, fx), scale(1.0 - t, fy))
                gap = subset_gap(mix, fm, tolerances) if direction == "convex" else subset_gap(fm, mix, tolerances)
            else:
                gap = _graph_inclusion_gap(F, x, y, t, direction, tolerances)
        except UndefinedFiberError:
            continue  # checks only sample where the encoding determines a value
        if gap > eps:
            return CheckOutcome("violation", (x, y, t, float(gap)), count)
    return CheckOutcome("pass", None, count)


def check_condition2(
    F: SvFunction, grid: TripleGrid, eps: float | None = None, tolerances: Tolerances = DEFAULT
) -> CheckOutcome:
    """Nonempty intersection of F(tx+(1-t)y) with tF(x) + (1-t)F(y) at each triple."""
    if eps is None:
        eps = tolerances.feas(_instance_scale(F))
    count = 0
    for x, y, t in grid.triples():
        count += 1
        mx = t * x + (1.0 - t) * y
        try:
            if _materializable(F):
                fx = _fiber(F, x, tolerances)
                fy = _fiber(F, y, tolerances)
                fm = _fiber(F, mx, tolerances)
                mix = minkowski_sum(scale(t, fx), scale(1.0 - t, fy))
                gap = intersection_gap(fm, mix, tolerances)
            else:
                gap = _graph_condition2_gap(F, x, y, t, tolerances)
        except UndefinedFiberError:
            continue  # checks only sample where the encoding determines a value
        if gap > eps:
            return CheckOutcome("violation", (x, y, t, float(gap)), count)
    return CheckOutcome("pass", None, count)


def check_condition1(
    f: PiecewiseLinear,
    g: PiecewiseLinear,
    grid: TripleGrid,
    eps: float | None = None,
    tolerances: Tolerances = DEFAULT,
) -> CheckOutcome:
    """Crossed envelope inequalities linking f = inf F and g = sup F.

    At each triple both ``f(tx+(1-t)y) <= t g(x) + (1-t) g(y)`` and
    ``g(tx+(1-t)y) >= t f(x) + (1-t) f(y)`` must hold within eps.
    """
    if f.xs != g.xs:
        raise ValueError("envelope functions must share breakpoints")
    if eps is None:
        s = max(1.0, max(abs(v) for v in f.ys + g.ys + f.xs))
        eps = tolerances.feas(s)
    triples = list(grid.triples())
    if not triples:
        return CheckOutcome("pass", None, 0)
    xs = np.array([tr[0] for tr in triples])
    ys = np.array([tr[1] for tr in triples])
    ts = np.array([tr[2] for tr in triples])
    mids = ts * xs + (1.0 - ts) * ys
    first = f(mids) - (ts * g(xs) + (1.0 - ts) * g(ys))
    second = (ts * f(xs) + (1.0 - ts) * f(ys)) - g(mids)
    margins = np.maximum(first, second)
    bad = np.nonzero(margins > eps)[0]
    if bad.size == 0:
        return CheckOutcome("pass", None, len(triples))
    i = int(bad[0])
    return CheckOutcome("violation", (float(xs[i]), float(ys[i]), float(ts[i]), float(margins[i])), i + 1)


@dataclass(frozen=True)
class CertificateWitness:
    """A violating triple recovered from a sandwich infeasibility certificate."""

    x: float
    y: float
    t: float
    inequality: str  # first | second | empty-fiber
    note: str = ""


def sandwich_constraint_meta(index: int, breakpoints) -> tuple[str, float]:
    """Canonical constraint layout of the sandwich LP: per breakpoint i the
    lower bound ``h(x_i) >= f_i`` sits at 2i and the upper bound at 2i+1."""
    return ("lower" if index % 2 == 0 else "upper", float(breakpoints[index // 2]))


def witness_from_certificate(certificate, breakpoints) -> CertificateWitness:
    """Map a Farkas certificate over sandwich constraints to a violating triple.

    Two lower bounds bracketing an upper one break the second envelope
    inequality; two upper bounds bracketing a lower one break the first. A
    crossed pair at one abscissa means that fiber is empty.
    """
    kinds = [sandwich_constraint_meta(idx, breakpoints) for idx, mult in certificate if mult > 0.0]
    lowers = sorted(x for kind, x in kinds if kind == "lower")
    uppers = sorted(x for kind, x in kinds if kind == "upper")
    if len(kinds) == 2 and len(lowers) == 1 and len(uppers) == 1:
        if abs(lowers[0] - uppers[0]) <= 1e-12:
            x = lowers[0]
            return CertificateWitness(x, x, 0.5, "empty-fiber", f"empty fiber at x={x}")
        raise MalformedCertificateError("two-constraint certificate at distinct abscissae")
    if len(kinds) == 3 and len(lowers) == 2 and len(uppers) == 1 and lowers[0] < uppers[0] < lowers[1]:
        x, y, mid = lowers[0], lowers[1], uppers[0]
        return CertificateWitness(x, y, (y - mid) / (y - x), "second")
    if len(kinds) == 3 and len(uppers) == 2 and len(lowers) == 1 and uppers[0] < lowers[0] < uppers[1]:
        x, y, mid = uppers[0], uppers[1], lowers[0]
        return CertificateWitness(x, y, (y - mid) / (y - x), "first")
    raise MalformedCertificateError(f"certificate support is not a bracketed pattern: {kinds}")
