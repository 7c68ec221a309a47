"""Data model for set-valued functions F : [a, b] -> compact convex subsets of R^n.

Three encodings are supported:

* ``interval_pl``    -- scalar envelope [f(x), g(x)] with piecewise-linear f, g;
* ``graph_polytope`` -- F(x) is the fiber {y : (x, y) in conv(graph)} of a
  convex polytope whose first coordinate is the domain variable;
* ``fibers``         -- finitely many listed fibers plus an optional default.

Only compact domains and compact fibers are representable. Unbounded or open
inputs are not runnable instances; they surface as validation violations with
documented messages, which is exactly how the classical counterexamples
(parabola-to-infinity, open vertical strip) are handled.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Union

import numpy as np

from .geometry import (
    IntervalSet,
    Polytope,
    contains_point,
    membership_gap,
    slice_interval,
)
from .tolerances import DEFAULT, Tolerances

EPS_X = 1e-9  # abscissa matching tolerance for listed fibers

MSG_COMPACT = "fibers must be compact"
MSG_DOMAIN = "domain must be a compact interval"


class InvalidInstanceError(ValueError):
    """Raised when an instance fails validation; carries the violation list."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = list(violations)


class UndefinedFiberError(ValueError):
    """A fiber family without a default was evaluated off its listed abscissae."""


class FiberNotMaterializedError(ValueError):
    """Fibers of a graph encoding in n >= 2 are only queried through
    membership and 1-D slices, never expanded to vertex lists."""


@dataclass(frozen=True)
class DomainInterval:
    a: float
    b: float

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))

    def contains(self, x: float, eps: float = EPS_X) -> bool:
        return self.a - eps <= x <= self.b + eps

    @property
    def width(self) -> float:
        return self.b - self.a


@dataclass(frozen=True)
class PiecewiseLinear:
    """Piecewise-linear interpolant through (xs[i], ys[i])."""

    xs: tuple[float, ...]
    ys: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "xs", tuple(float(v) for v in self.xs))
        object.__setattr__(self, "ys", tuple(float(v) for v in self.ys))
        if len(self.xs) != len(self.ys) or not self.xs:
            raise ValueError("breakpoints and values must pair up")

    def __call__(self, x):
        return np.interp(x, self.xs, self.ys)


@dataclass(frozen=True)
class IntervalPL:
    breakpoints: tuple[float, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "breakpoints", tuple(float(v) for v in self.breakpoints))
        object.__setattr__(self, "lower", tuple(float(v) for v in self.lower))
        object.__setattr__(self, "upper", tuple(float(v) for v in self.upper))

    @property
    def dim(self) -> int:
        return 1

    @property
    def domain(self) -> DomainInterval:
        return DomainInterval(self.breakpoints[0], self.breakpoints[-1])


@dataclass(frozen=True)
class GraphPolytope:
    dim: int
    graph: Polytope

    @property
    def domain(self) -> DomainInterval:
        xs = self.graph.array[:, 0]
        return DomainInterval(float(xs.min()), float(xs.max()))


@dataclass(frozen=True)
class FiberFamily:
    dim: int
    domain: DomainInterval
    fibers: tuple[tuple[float, Polytope], ...]
    default: Polytope | None = None

    @cached_property
    def listed_xs(self) -> tuple[float, ...]:
        return tuple(x for x, _ in self.fibers)


SvFunction = Union[IntervalPL, GraphPolytope, FiberFamily]


@dataclass(frozen=True)
class AffineMap:
    """x |-> c + x * d with c, d in R^n."""

    c: tuple[float, ...]
    d: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(float(v) for v in self.c))
        object.__setattr__(self, "d", tuple(float(v) for v in self.d))
        if len(self.c) != len(self.d) or not self.c:
            raise ValueError("c and d must share a positive dimension")
        if not all(np.isfinite(v) for v in self.c + self.d):
            raise ValueError("affine map entries must be finite")

    @property
    def n(self) -> int:
        return len(self.c)

    def __call__(self, x: float) -> np.ndarray:
        return np.asarray(self.c) + float(x) * np.asarray(self.d)


# ---------------------------------------------------------------------------
# validation


def _num(value, out: list[float], violations: list[str], message: str) -> None:
    """Append value to out if it is a finite number, else record message."""
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        violations.append(message)
        out.append(0.0)
    elif not np.isfinite(float(value)):
        violations.append(message)
        out.append(0.0)
    else:
        out.append(float(value))


def _vertices_ok(raw, dim: int, violations: list[str], where: str) -> list[list[float]]:
    verts: list[list[float]] = []
    if not isinstance(raw, list) or not raw:
        violations.append(f"{where}: vertices must be a nonempty list")
        return verts
    for v in raw:
        if not isinstance(v, list) or len(v) != dim:
            violations.append(f"{where}: vertex length must equal {dim}")
            continue
        row: list[float] = []
        for coord in v:
            _num(coord, row, violations, MSG_COMPACT)
        verts.append(row)
    return verts


def validate_raw(obj) -> list[str]:
    """Validate a parsed JSON object; [] means the instance is well-formed."""
    v: list[str] = []
    if not isinstance(obj, dict):
        return ["instance must be a JSON object"]
    kind = obj.get("kind")
    if kind == "interval_pl":
        bps: list[float] = []
        for x in obj.get("breakpoints", []):
            _num(x, bps, v, MSG_DOMAIN)
        if not bps:
            v.append("breakpoints must be nonempty")
        if any(b - a <= 0 for a, b in zip(bps, bps[1:])):
            v.append("breakpoints not strictly increasing")
        lower: list[float] = []
        upper: list[float] = []
        for y in obj.get("lower", []):
            _num(y, lower, v, MSG_COMPACT)
        for y in obj.get("upper", []):
            _num(y, upper, v, MSG_COMPACT)
        if len(lower) != len(bps) or len(upper) != len(bps):
            v.append("lower/upper must match the breakpoint count")
        else:
            for i, (lo, hi) in enumerate(zip(lower, upper)):
                if lo > hi:
                    v.append(f"lower exceeds upper at index {i}")
    elif kind == "graph_polytope":
        dim = obj.get("dim")
        if not isinstance(dim, int) or dim < 1:
            v.append("dim must be a positive integer")
            return v
        verts = _vertices_ok(obj.get("vertices"), 1 + dim, v, "graph")
        for row in verts:
            if not np.isfinite(row[0]):
                v.append(MSG_DOMAIN)
    elif kind == "fibers":
        dim = obj.get("dim")
        if not isinstance(dim, int) or dim < 1:
            v.append("dim must be a positive integer")
            return v
        dom = obj.get("domain")
        ab: list[float] = []
        if not isinstance(dom, list) or len(dom) != 2:
            v.append(MSG_DOMAIN)
        else:
            for x in dom:
                _num(x, ab, v, MSG_DOMAIN)
            if len(ab) == 2 and ab[0] > ab[1]:
                v.append("domain lower endpoint exceeds upper endpoint")
        xs: list[float] = []
        for fib in obj.get("fibers", []):
            if not isinstance(fib, dict):
                v.append("each fiber must be an object with x and vertices")
                continue
            _num(fib.get("x"), xs, v, MSG_DOMAIN)
            _vertices_ok(fib.get("vertices"), dim, v, f"fiber x={fib.get('x')}")
        for i, x in enumerate(xs):
            if any(abs(x - y) <= EPS_X for y in xs[:i]):
                v.append("fiber abscissae must be distinct")
            if len(ab) == 2 and not (ab[0] - EPS_X <= x <= ab[1] + EPS_X):
                v.append(f"fiber abscissa {x} outside domain")
        if obj.get("default") is not None:
            if not isinstance(obj["default"], dict):
                v.append("default must be an object with vertices")
            else:
                _vertices_ok(obj["default"].get("vertices"), dim, v, "default")
    else:
        v.append(f"unknown kind {kind!r}")
    return v


def validate(instance: SvFunction) -> list[str]:
    """Validate a constructed instance by round-tripping its raw form."""
    return validate_raw(instance_to_dict(instance))


# ---------------------------------------------------------------------------
# parsing / serialization


def parse_instance(obj: dict) -> SvFunction:
    violations = validate_raw(obj)
    if violations:
        raise InvalidInstanceError(violations)
    kind = obj["kind"]
    if kind == "interval_pl":
        return IntervalPL(tuple(obj["breakpoints"]), tuple(obj["lower"]), tuple(obj["upper"]))
    if kind == "graph_polytope":
        return GraphPolytope(obj["dim"], Polytope(tuple(tuple(v) for v in obj["vertices"])))
    fibers = tuple(
        (float(f["x"]), Polytope(tuple(tuple(v) for v in f["vertices"])))
        for f in obj.get("fibers", [])
    )
    default = None
    if obj.get("default") is not None:
        default = Polytope(tuple(tuple(v) for v in obj["default"]["vertices"]))
    a, b = obj["domain"]
    return FiberFamily(obj["dim"], DomainInterval(a, b), fibers, default)


def instance_to_dict(instance: SvFunction) -> dict:
    if isinstance(instance, IntervalPL):
        return {
            "kind": "interval_pl",
            "breakpoints": list(instance.breakpoints),
            "lower": list(instance.lower),
            "upper": list(instance.upper),
        }
    if isinstance(instance, GraphPolytope):
        return {
            "kind": "graph_polytope",
            "dim": instance.dim,
            "vertices": [list(v) for v in instance.graph.vertices],
        }
    if isinstance(instance, FiberFamily):
        out = {
            "kind": "fibers",
            "dim": instance.dim,
            "domain": [instance.domain.a, instance.domain.b],
            "fibers": [
                {"x": x, "vertices": [list(v) for v in P.vertices]}
                for x, P in instance.fibers
            ],
        }
        if instance.default is not None:
            out["default"] = {"vertices": [list(v) for v in instance.default.vertices]}
        return out
    raise TypeError(f"not an instance: {type(instance)!r}")


def _canonical_number(x: float):
    return int(x) if float(x).is_integer() and abs(x) < 1e15 else float(x)


def _canonicalize(obj):
    if isinstance(obj, float):
        return _canonical_number(obj)
    if isinstance(obj, list):
        return [_canonicalize(v) for v in obj]
    if isinstance(obj, dict):
        return {k: _canonicalize(v) for k, v in obj.items()}
    return obj


def serialize(instance: SvFunction) -> str:
    """Canonical instance text: fixed key order, shortest round-trip decimals."""
    return json.dumps(_canonicalize(instance_to_dict(instance)), indent=2) + "\n"


def load_raw(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def load_instance(path) -> SvFunction:
    return parse_instance(load_raw(path))


# ---------------------------------------------------------------------------
# evaluation


def domain_of(F: SvFunction) -> DomainInterval:
    return F.domain


def _check_domain(F: SvFunction, x: float, eps: float) -> None:
    dom = F.domain
    if not dom.contains(x, max(eps, EPS_X)):
        raise ValueError(f"x={x} outside the domain [{dom.a}, {dom.b}]")


def evaluate(F: SvFunction, x: float, eps: float = EPS_X, tolerances: Tolerances = DEFAULT):
    """F(x) as an IntervalSet (scalar encodings) or Polytope (fiber families).

    Graph encodings with n >= 2 are deliberately not materialized; use
    contains_value for membership queries against them.
    """
    x = float(x)
    _check_domain(F, x, eps)
    if isinstance(F, IntervalPL):
        lo = float(np.interp(x, F.breakpoints, F.lower))
        hi = float(np.interp(x, F.breakpoints, F.upper))
        return IntervalSet(lo, hi)
    if isinstance(F, FiberFamily):
        for fx, P in F.fibers:
            if abs(fx - x) <= EPS_X:
                return P
        if F.default is None:
            raise UndefinedFiberError(f"no fiber defined at x={x}")
        return F.default
    if isinstance(F, GraphPolytope):
        if F.dim != 1:
            raise FiberNotMaterializedError(
                "graph fibers in n >= 2 are not materialized; use contains_value"
            )
        iv = slice_interval(F.graph, (x,), tolerances.feas(F.graph.scale_of()), tolerances)
        if iv is None:
            raise ValueError(f"empty fiber at x={x}")
        return iv
    raise TypeError(f"not an instance: {type(F)!r}")


def _point(y) -> np.ndarray:
    return np.atleast_1d(np.asarray(y, dtype=float))


def value_gap(F: SvFunction, x: float, y, tolerances: Tolerances = DEFAULT) -> float:
    """Membership slack of y in F(x): 0 means inside, larger means farther out."""
    x = float(x)
    _check_domain(F, x, tolerances.feas())
    yv = _point(y)
    if isinstance(F, GraphPolytope):
        if yv.shape[0] != F.dim:
            raise ValueError("value dimension does not match the instance")
        return membership_gap(F.graph, np.concatenate([[x], yv]), tolerances)
    fiber = evaluate(F, x, tolerances.feas(), tolerances)
    if isinstance(fiber, IntervalSet):
        return max(0.0, fiber.lo - float(yv[0]), float(yv[0]) - fiber.hi)
    return membership_gap(fiber, yv, tolerances)


def contains_value(F: SvFunction, x: float, y, eps: float, tolerances: Tolerances = DEFAULT) -> bool:
    """Whether y belongs to F(x) within slack eps."""
    if isinstance(F, GraphPolytope):
        yv = _point(y)
        if yv.shape[0] != F.dim:
            raise ValueError("value dimension does not match the instance")
        return contains_point(F.graph, np.concatenate([[float(x)], yv]), eps, tolerances)
    fiber = evaluate(F, float(x), max(eps, EPS_X), tolerances)
    yv = _point(y)
    if isinstance(fiber, IntervalSet):
        s = max(1.0, abs(fiber.lo), abs(fiber.hi), abs(float(yv[0])))
        return fiber.lo - eps - tolerances.feas(s) <= float(yv[0]) <= fiber.hi + eps + tolerances.feas(s)
    return contains_point(fiber, yv, eps, tolerances)


def graph_abscissae(P: Polytope, tolerances: Tolerances = DEFAULT) -> tuple[float, ...]:
    """Distinct vertex abscissae of a graph polytope, ascending."""
    xs = np.sort(np.unique(P.array[:, 0]))
    tol = tolerances.feas(float(max(1.0, np.max(np.abs(xs)))))
    merged = [float(xs[0])]
    for x in xs[1:]:
        if x - merged[-1] > tol:
            merged.append(float(x))
    return tuple(merged)


def inf_sup(F: SvFunction, tolerances: Tolerances = DEFAULT) -> tuple[PiecewiseLinear, PiecewiseLinear]:
    """Pointwise envelope functions f = inf F and g = sup F for scalar instances."""
    if isinstance(F, IntervalPL):
        return (
            PiecewiseLinear(F.breakpoints, F.lower),
            PiecewiseLinear(F.breakpoints, F.upper),
        )
    if isinstance(F, GraphPolytope) and F.dim == 1:
        xs = graph_abscissae(F.graph, tolerances)
        eps = tolerances.feas(F.graph.scale_of())
        lows, highs = [], []
        for x in xs:
            iv = slice_interval(F.graph, (x,), eps, tolerances)
            if iv is None:
                raise ValueError(f"empty fiber at x={x}")
            lows.append(iv.lo)
            highs.append(iv.hi)
        return PiecewiseLinear(xs, tuple(lows)), PiecewiseLinear(xs, tuple(highs))
    raise ValueError("inf_sup needs a scalar interval_pl or graph encoding")


def sample_abscissae(F: SvFunction, tolerances: Tolerances = DEFAULT) -> tuple[float, ...]:
    """Natural grid abscissae: breakpoints, vertex abscissae, or listed fibers."""
    if isinstance(F, IntervalPL):
        return F.breakpoints
    if isinstance(F, GraphPolytope):
        return graph_abscissae(F.graph, tolerances)
    xs = set(F.listed_xs) | {F.domain.a, F.domain.b}
    return tuple(sorted(xs))
