"""Small dense linear programming with infeasibility certificates.

Two entry points:

* :func:`solve` handles inequality systems ``normal . v <= offset`` over free
  variables and, on infeasibility, produces a Farkas certificate supported on
  at most ``d + 1`` constraints (the Helly bound in dimension ``d``).
* :func:`solve_standard` handles equality systems over nonnegative variables,
  the form every barycentric membership / slice / support query reduces to.

The engine is a two-phase tableau simplex with Bland's rule, so outcomes are
deterministic functions of the input; there is no randomized pivoting.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .tolerances import DEFAULT, Tolerances

_MAX_PIVOTS = 50_000


class LpError(ValueError):
    """Malformed program: mixed dimensions, non-finite data, or engine failure."""


class InfeasibleRegionError(LpError):
    """The region handed to :func:`chebyshev_center` is empty."""

    def __init__(self, certificate):
        super().__init__("constraint region is infeasible")
        self.certificate = certificate


class UnboundedRegionError(LpError):
    """The region handed to :func:`chebyshev_center` is unbounded."""


@dataclass(frozen=True)
class Halfspace:
    """Linear inequality ``normal . v <= offset`` over v in R^d."""

    normal: tuple[float, ...]
    offset: float

    def __post_init__(self):
        object.__setattr__(self, "normal", tuple(float(c) for c in self.normal))
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def is_trivial(self) -> bool:
        """True when the normal vanishes, so the inequality is void or impossible."""
        return not any(c != 0.0 for c in self.normal)


@dataclass(frozen=True)
class LpOutcome:
    """Result of an LP solve.

    ``certificate`` is a tuple of ``(constraint_index, multiplier)`` pairs with
    nonnegative multipliers whose weighted normal sum vanishes while the
    weighted offset sum is negative; it is present exactly when the status is
    ``infeasible``.
    """

    status: str  # feasible | infeasible | unbounded
    point: tuple[float, ...] | None = None
    value: float | None = None
    certificate: tuple[tuple[int, float], ...] | None = None


def _pivot(tab: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    tab[row] /= tab[row, col]
    other = tab[:, col].copy()
    other[row] = 0.0
    tab -= np.outer(other, tab[row])
    tab[:, col] = 0.0
    tab[row, col] = 1.0
    basis[row] = col


def _bland(tab: np.ndarray, basis: np.ndarray, ncols: int, tol: float) -> str:
    """Pivot until the objective row has no improving column; Bland's rule."""
    m = len(basis)
    for _ in range(_MAX_PIVOTS):
        entering = np.nonzero(tab[-1, :ncols] < -tol)[0]
        if entering.size == 0:
            return "optimal"
        j = int(entering[0])
        col = tab[:m, j]
        rows = np.nonzero(col > tol)[0]
        if rows.size == 0:
            return "unbounded"
        ratios = tab[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + tol]
        i = int(ties[np.argmin(basis[ties])])
        _pivot(tab, basis, i, j)
    raise LpError("simplex did not terminate")


def _standard_simplex(E, f, c, tol, feas_tol):
    """min c.z subject to E z = f, z >= 0.

    Returns ``(status, z, value)`` with status in {optimal, infeasible,
    unbounded}; on infeasibility ``value`` carries the phase-1 residual.
    """
    E = np.asarray(E, dtype=float)
    f = np.asarray(f, dtype=float)
    c = np.asarray(c, dtype=float)
    m, n = E.shape
    if m == 0:
        if np.any(c < -tol):
            return "unbounded", None, None
        return "optimal", np.zeros(n), 0.0

    sign = np.where(f < 0.0, -1.0, 1.0)
    tab = np.zeros((m + 1, n + m + 1))
    tab[:m, :n] = E * sign[:, None]
    tab[:m, n : n + m] = np.eye(m)
    tab[:m, -1] = f * sign
    tab[-1, :n] = -tab[:m, :n].sum(axis=0)
    tab[-1, -1] = -tab[:m, -1].sum()
    basis = np.arange(n, n + m)

    _bland(tab, basis, n + m, tol)  # phase 1 is bounded below by zero
    if -tab[-1, -1] > feas_tol:
        return "infeasible", None, float(-tab[-1, -1])

    # Drive leftover artificials out of the basis; all-zero rows are redundant.
    keep = []
    for i in range(m):
        if basis[i] >= n:
            cols = np.nonzero(np.abs(tab[i, :n]) > tol)[0]
            if cols.size:
                _pivot(tab, basis, i, int(cols[0]))
                keep.append(i)
            elif abs(tab[i, -1]) > feas_tol:
                return "infeasible", None, float(abs(tab[i, -1]))
        else:
            keep.append(i)
    if len(keep) < m:
        tab = np.vstack([tab[keep], tab[-1:]])
        basis = basis[keep]
        m = len(keep)

    tab = np.hstack([tab[:, :n], tab[:, -1:]])
    obj = np.zeros(n + 1)
    obj[:n] = c
    for i in range(m):
        obj -= c[basis[i]] * tab[i]
    tab[-1] = obj

    status = _bland(tab, basis, n, tol)
    if status == "unbounded":
        return "unbounded", None, None
    z = np.zeros(n)
    z[basis] = tab[:m, -1]
    np.maximum(z, 0.0, out=z)  # clip phase-noise negatives
    return "optimal", z, float(c @ z)


def _scale(*arrays) -> float:
    s = 1.0
    for a in arrays:
        if a is not None and np.size(a):
            s = max(s, float(np.max(np.abs(a))))
    return s


def solve_standard(
    E,
    f,
    objective=None,
    sense: str = "min",
    tolerances: Tolerances = DEFAULT,
) -> LpOutcome:
    """Solve ``sense objective.z`` subject to ``E z = f, z >= 0``.

    With ``objective=None`` this is a pure feasibility query. No certificate
    is produced here; callers needing one go through :func:`solve`.
    """
    E = np.asarray(E, dtype=float)
    f = np.asarray(f, dtype=float)
    if not (np.all(np.isfinite(E)) and np.all(np.isfinite(f))):
        raise LpError("non-finite input")
    n = E.shape[1]
    scale = _scale(E, f)
    tol = 1e-11 * scale
    feas_tol = tolerances.feas(scale)
    if objective is None:
        c = np.zeros(n)
    else:
        c = np.asarray(objective, dtype=float)
        if sense == "max":
            c = -c
        elif sense != "min":
            raise LpError(f"unknown sense {sense!r}")
    status, z, value = _standard_simplex(E, f, c, tol, feas_tol)
    if status == "infeasible":
        return LpOutcome("infeasible")
    if status == "unbounded":
        return LpOutcome("unbounded")
    if objective is None:
        return LpOutcome("feasible", point=tuple(map(float, z)))
    if sense == "max":
        value = -value
    return LpOutcome("feasible", point=tuple(map(float, z)), value=float(value))


def _as_matrix(constraints: Sequence[Halfspace]) -> tuple[np.ndarray, np.ndarray]:
    d = len(constraints[0].normal)
    A = np.zeros((len(constraints), d))
    b = np.zeros(len(constraints))
    for i, h in enumerate(constraints):
        if len(h.normal) != d:
            raise LpError("dimension mismatch between constraints")
        A[i] = h.normal
        b[i] = h.offset
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        raise LpError("non-finite input")
    return A, b


def _split_standard(A: np.ndarray, b: np.ndarray):
    """Standard form of ``A v <= b`` via v = p - q and slack s."""
    m, d = A.shape
    E = np.hstack([A, -A, np.eye(m)])
    return E, b.copy()


def _farkas_certificate(A, b, index_map, tol, feas_tol):
    """Basic solution of {u >= 0 : A^T u = 0, b.u = -1}; support <= d+1."""
    m, d = A.shape
    E = np.vstack([A.T, b[None, :]])
    f = np.zeros(d + 1)
    f[-1] = -1.0
    status, u, _ = _standard_simplex(E, f, np.zeros(m), tol, feas_tol)
    if status != "optimal":
        raise LpError("failed to extract an infeasibility certificate")
    combo = A.T @ u
    if np.max(np.abs(combo)) > feas_tol or b @ u > -feas_tol:
        raise LpError("extracted certificate does not verify")
    cutoff = max(u.max() * 1e-12, 0.0)
    support = np.nonzero(u > cutoff)[0]
    return tuple((index_map[int(i)], float(u[i])) for i in support)


def solve(
    constraints: Sequence[Halfspace],
    objective=None,
    sense: str = "min",
    tolerances: Tolerances = DEFAULT,
    lex_refine: bool = True,
) -> LpOutcome:
    """Solve an inequality system over free variables.

    Without an objective, any feasible point is returned (or a Farkas
    certificate). With one, optima are tie-broken to the lexicographically
    smallest optimal basic point when ``lex_refine`` is set, which makes
    reports reproducible.
    """
    constraints = list(constraints)
    if not constraints:
        raise LpError("at least one constraint is required to fix the dimension")
    d = len(constraints[0].normal)
    if d < 1:
        raise LpError("dimension must be at least 1")
    if sense not in ("min", "max"):
        raise LpError(f"unknown sense {sense!r}")

    live: list[Halfspace] = []
    index_map: list[int] = []
    for i, h in enumerate(constraints):
        if h.is_trivial:
            if h.offset < 0.0:
                return LpOutcome("infeasible", certificate=((i, 1.0),))
            continue  # void constraint 0.v <= nonnegative
        live.append(h)
        index_map.append(i)

    obj = None if objective is None else np.asarray(objective, dtype=float)
    if obj is not None and (obj.shape != (d,) or not np.all(np.isfinite(obj))):
        raise LpError("objective must be a finite vector matching the dimension")

    if not live:
        if obj is None:
            return LpOutcome("feasible", point=(0.0,) * d)
        if np.any(obj != 0.0):
            return LpOutcome("unbounded")
        return LpOutcome("feasible", point=(0.0,) * d, value=0.0)

    A, b = _as_matrix(live)
    scale = _scale(A, b, obj)
    tol = 1e-11 * scale
    feas_tol = tolerances.feas(scale)
    E, f = _split_standard(A, b)

    def run(E_, f_, c_std):
        return _standard_simplex(E_, f_, c_std, tol, feas_tol)

    nz = E.shape[1]
    status, z, _ = run(E, f, np.zeros(nz))
    if status == "infeasible":
        cert = _farkas_certificate(A, b, index_map, tol, feas_tol)
        return LpOutcome("infeasible", certificate=cert)

    def point_of(z_):
        return z_[:d] - z_[d : 2 * d]

    def check_point(v):
        resid = A @ v - b
        if resid.size and resid.max() > feas_tol:
            raise LpError("solver returned an infeasible point")

    if obj is None:
        v = point_of(z)
        check_point(v)
        return LpOutcome("feasible", point=tuple(map(float, v)))

    c_std = np.zeros(nz)
    c_int = -obj if sense == "max" else obj
    c_std[:d] = c_int
    c_std[d : 2 * d] = -c_int
    status, z, value = run(E, f, c_std)
    if status == "unbounded":
        return LpOutcome("unbounded")
    if status == "infeasible":  # should have been caught by the feasibility pass
        raise LpError("inconsistent feasibility classification")

    v = point_of(z)
    if lex_refine:
        # Pin the optimal value, then minimize coordinates in index order.
        # When a coordinate is unbounded below on the optimal face there is no
        # lexicographically smallest point; refinement stops and the (still
        # deterministic) current basic point stands.
        E_ref = np.vstack([E, np.concatenate([c_int, -c_int, np.zeros(E.shape[0])])])
        f_ref = np.concatenate([f, [value]])
        for j in range(d):
            cj = np.zeros(E_ref.shape[1])
            cj[j] = 1.0
            cj[d + j] = -1.0
            status, zj, vj = run(E_ref, f_ref, cj)
            if status == "unbounded":
                break
            if status != "optimal":
                raise LpError("lexicographic refinement failed")
            z = zj
            row = np.zeros(E_ref.shape[1])
            row[j] = 1.0
            row[d + j] = -1.0
            E_ref = np.vstack([E_ref, row])
            f_ref = np.concatenate([f_ref, [vj]])
        v = point_of(z)
    check_point(v)
    opt = float(obj @ v)
    return LpOutcome("feasible", point=tuple(map(float, v)), value=opt)


def chebyshev_center(
    constraints: Sequence[Halfspace],
    tolerances: Tolerances = DEFAULT,
) -> tuple[tuple[float, ...], float]:
    """Center and radius of the largest ball inside the constraint region.

    Constraint normals are unit-normalized so the radius is Euclidean. Ties
    between centers resolve to the lexicographically smallest one. Raises
    :class:`InfeasibleRegionError` (carrying the certificate) on an empty
    region and :class:`UnboundedRegionError` on an unbounded one.
    """
    constraints = list(constraints)
    if not constraints:
        raise LpError("at least one constraint is required to fix the dimension")
    d = len(constraints[0].normal)

    probe = solve(constraints, tolerances=tolerances)
    if probe.status == "infeasible":
        raise InfeasibleRegionError(probe.certificate)

    for j in range(d):
        for sense in ("min", "max"):
            e = [0.0] * d
            e[j] = 1.0
            out = solve(constraints, objective=e, sense=sense, tolerances=tolerances, lex_refine=False)
            if out.status == "unbounded":
                raise UnboundedRegionError("constraint region is unbounded")

    lifted: list[Halfspace] = []
    kept: list[int] = []
    for i, h in enumerate(constraints):
        if h.is_trivial:
            continue
        norm = float(np.linalg.norm(h.normal))
        lifted.append(Halfspace(tuple(c / norm for c in h.normal) + (1.0,), h.offset / norm))
        kept.append(i)
    lifted.append(Halfspace((0.0,) * d + (-1.0,), 0.0))

    out = solve(lifted, objective=(0.0,) * d + (1.0,), sense="max", tolerances=tolerances)
    if out.status != "feasible":
        raise LpError("radius program failed unexpectedly")
    center = tuple(map(float, out.point[:d]))
    return center, float(out.value)
