"""Command-line front end.

Every command prints one JSON report to stdout with a stable key order and
exits 0 on pass/found, 2 on an expected negative outcome (violation or
infeasibility), and 1 on invalid input or an internal failure, so pipelines can
tell "checked and false" apart from "could not check". ``emit-plot`` writes the
sampled envelope as CSV and, by default, renders the same series to an SVG
figure next to it.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import checks, instances, model, select
from .geometry import separation_distance
from .model import AffineMap, GraphPolytope, IntervalPL
from .tolerances import DEFAULT, Tolerances, with_base

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_NEGATIVE = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); the contract wants 1
        raise _UsageError(message)


def _tolerances_from(args) -> Tolerances:
    eps = args.eps
    if eps is None:
        env = os.environ.get("SVF_EPS")
        if env:
            eps = float(env)
    return with_base(eps) if eps is not None else DEFAULT


def _tolerances_dict(tol: Tolerances) -> dict:
    return {
        "eps_base": tol.base,
        "eps_opt": tol.opt,
        "eps_slice": tol.slice_slack,
        "eps_select": tol.select,
        "eps_unique": tol.unique,
    }


def _load(source: str):
    """Resolve an instance argument: an existing file path or a builtin name."""
    path = Path(source)
    if path.exists():
        return source, model.load_raw(path)
    if source in instances.builtin_names():
        return source, instances.builtin(source).raw
    raise _UsageError(f"no such instance file or builtin: {source}")


def _grid_for(F, args, tolerances) -> checks.TripleGrid:
    if getattr(args, "combos", False):
        return checks.TripleGrid.breakpoint_combos(model.sample_abscissae(F, tolerances))
    if getattr(args, "grid", None):
        dom = F.domain
        return checks.TripleGrid.dense(dom.a, dom.b, args.grid)
    ts = tuple(j / 8 for j in range(9))
    return checks.TripleGrid.all_pairs(model.sample_abscissae(F, tolerances), ts)


def _map_payload(amap: AffineMap) -> dict:
    payload = {"c": list(amap.c), "d": list(amap.d)}
    if amap.n == 1:
        payload["alpha"] = amap.d[0]
        payload["beta"] = amap.c[0]
    return payload


def _witness_payload(witness) -> dict:
    if isinstance(witness, tuple):
        x, y, t, margin = witness
        return {"x": x, "y": y, "t": t, "margin": margin}
    out = {"x": witness.x, "y": witness.y, "t": witness.t, "inequality": witness.inequality}
    if witness.note:
        out["note"] = witness.note
    return out


def _certificate_payload(cert) -> list:
    return [{"constraint": idx, "multiplier": mult} for idx, mult in cert]


def _parse_or_report(report: dict, raw: dict):
    violations = model.validate_raw(raw)
    if violations:
        report["status"] = "invalid"
        report["violations"] = violations
        return None
    return model.parse_instance(raw)


# ---------------------------------------------------------------------------
# commands


def _cmd_validate(args, report, tolerances):
    _, raw = _load(args.instance)
    violations = model.validate_raw(raw)
    if violations:
        report["status"] = "invalid"
        report["violations"] = violations
        return EXIT_FAILURE
    report["status"] = "pass"
    return EXIT_OK


def _check_command(checker):
    def run(args, report, tolerances):
        _, raw = _load(args.instance)
        F = _parse_or_report(report, raw)
        if F is None:
            return EXIT_FAILURE
        grid = _grid_for(F, args, tolerances)
        report["grid"] = grid.describe()
        out = checker(F, grid, tolerances=tolerances)
        report["status"] = out.status
        report["triples_checked"] = out.triples_checked
        if out.witness is not None:
            report["witness"] = _witness_payload(out.witness)
        return EXIT_OK if out.status == "pass" else EXIT_NEGATIVE

    return run


def _cmd_check_cond1(args, report, tolerances):
    _, raw = _load(args.instance)
    F = _parse_or_report(report, raw)
    if F is None:
        return EXIT_FAILURE
    f, g = model.inf_sup(F, tolerances)
    grid = _grid_for(F, args, tolerances)
    report["grid"] = grid.describe()
    out = checks.check_condition1(f, g, grid, tolerances=tolerances)
    report["status"] = out.status
    report["triples_checked"] = out.triples_checked
    if out.witness is not None:
        report["witness"] = _witness_payload(out.witness)
    return EXIT_OK if out.status == "pass" else EXIT_NEGATIVE


def _cmd_solve_sandwich(args, report, tolerances):
    _, raw = _load(args.instance)
    F = _parse_or_report(report, raw)
    if F is None:
        return EXIT_FAILURE
    f, g = model.inf_sup(F, tolerances)
    res = select.sandwich_affine(f, g, args.objective, tolerances)
    report["status"] = res.status
    if res.map is not None:
        report["map"] = _map_payload(res.map)
    if res.uniqueness is not None:
        report["unique"] = res.uniqueness
        report["spread"] = list(res.spread)
    if res.witness is not None:
        report["witness"] = _witness_payload(res.witness)
    if res.certificate is not None:
        report["certificate"] = _certificate_payload(res.certificate)
    return EXIT_OK if res.status == "found" else EXIT_NEGATIVE


def _cmd_solve_affine(args, report, tolerances):
    _, raw = _load(args.instance)
    F = _parse_or_report(report, raw)
    if F is None:
        return EXIT_FAILURE
    if not isinstance(F, GraphPolytope):
        report["status"] = "invalid"
        report["violations"] = ["solve-affine needs a graph_polytope instance"]
        return EXIT_FAILURE
    method = (
        select.affine_selection_endpoint
        if args.method == "endpoint"
        else select.affine_selection_convex
    )
    res = method(F, tolerances)
    report["status"] = res.status
    report["method"] = args.method
    report["map"] = _map_payload(res.map)
    report["max_violation"] = res.max_violation
    return EXIT_OK


def _cmd_fixed_point(args, report, tolerances):
    _, raw = _load(args.instance)
    F = _parse_or_report(report, raw)
    if F is None:
        return EXIT_FAILURE
    try:
        x_star = select.fixed_point(F, args.objective, tolerances)
    except select.FixedPointPreconditionError as exc:
        report["status"] = "invalid"
        report["violations"] = [str(exc)]
        return EXIT_FAILURE
    except select.FixedPointInfeasibleError as exc:
        report["status"] = "infeasible"
        report["witness"] = _witness_payload(exc.witness)
        return EXIT_NEGATIVE
    report["status"] = "found"
    report["x_star"] = x_star
    iv = model.evaluate(F, x_star, tolerances.feas(), tolerances)
    report["fiber"] = [iv.lo, iv.hi]
    report["slack"] = min(x_star - iv.lo, iv.hi - x_star)
    return EXIT_OK


def _cmd_transversal(args, report, tolerances):
    _, raw = _load(args.instance)
    F = _parse_or_report(report, raw)
    if F is None:
        return EXIT_FAILURE
    if not hasattr(F, "fibers"):
        report["status"] = "invalid"
        report["violations"] = ["transversal needs a fibers instance"]
        return EXIT_FAILURE
    res = select.transversal_solve(list(F.fibers), tolerances)
    report["status"] = res.status
    if res.map is not None:
        report["map"] = _map_payload(res.map)
    if res.uniqueness is not None:
        report["unique"] = res.uniqueness
        report["spread"] = list(res.spread)
    if res.certificate is not None:
        report["certificate"] = _certificate_payload(res.certificate)
    return EXIT_OK if res.status == "found" else EXIT_NEGATIVE


def _verify_sadowska(report, tolerances):
    named = instances.builtin("sadowska")
    F = named.instance
    ok = True

    first_four = select.transversal_solve(list(F.fibers[:4]), tolerances)
    report["transversal"] = {
        "status": first_four.status,
        "unique": bool(first_four.uniqueness),
    }
    if first_four.map is not None:
        report["transversal"]["map"] = _map_payload(first_four.map)
        expected_c = named.expected["transversal_c"]
        expected_d = named.expected["transversal_d"]
        ok &= bool(
            np.allclose(first_four.map.c, expected_c, atol=1e-9)
            and np.allclose(first_four.map.d, expected_d, atol=1e-9)
        )
    ok &= first_four.status == "found" and bool(first_four.uniqueness)

    with_f4 = select.transversal_solve(list(F.fibers), tolerances)
    report["with_f4"] = with_f4.status
    if with_f4.certificate is not None:
        report["with_f4_certificate"] = _certificate_payload(with_f4.certificate)
    ok &= with_f4.status == "infeasible"

    if first_four.map is not None:
        miss = separation_distance(F.fibers[4][1], first_four.map(4.0), tolerances)
        report["miss_distance_at_4"] = miss
        ok &= miss >= 3.5

    combos = checks.TripleGrid.breakpoint_combos((0.0, 1.0, 2.0, 3.0, 4.0))
    cond_combos = checks.check_condition2(F, combos, tolerances=tolerances)
    dense = checks.TripleGrid.dense(0.0, 4.0, 8)
    cond_dense = checks.check_condition2(F, dense, tolerances=tolerances)
    report["condition2_combos"] = cond_combos.status
    report["condition2_dense8"] = cond_dense.status
    ok &= cond_combos.status == "pass" and cond_dense.status == "pass"
    return ok


def _verify_generic(name, report, tolerances):
    named = instances.builtin(name)
    expected = named.expected
    ok = True
    if "validate" in expected:
        violations = model.validate_raw(named.raw)
        report["violations"] = violations
        for msg in expected["validate"]:
            ok &= msg in violations
        return ok
    F = named.instance
    if "sandwich" in expected:
        f, g = model.inf_sup(F, tolerances)
        res = select.sandwich_affine(f, g, "chebyshev", tolerances)
        report["sandwich"] = res.status
        ok &= res.status == expected["sandwich"]
        if res.status == "found":
            report["map"] = _map_payload(res.map)
            if "alpha" in expected:
                ok &= abs(res.map.d[0] - expected["alpha"]) <= 1e-9
                ok &= abs(res.map.c[0] - expected["beta"]) <= 1e-9
            if expected.get("unique"):
                ok &= bool(res.uniqueness)
        elif res.witness is not None:
            report["witness"] = _witness_payload(res.witness)
    if "fixed_point" in expected:
        x_star = select.fixed_point(F, "chebyshev", tolerances)
        report["x_star"] = x_star
        ok &= abs(x_star - expected["fixed_point"]) <= 1e-9
    if "convex" in expected:
        grid = _grid_for(F, argparse.Namespace(combos=False, grid=None), tolerances)
        out = checks.check_convex(F, grid, tolerances=tolerances)
        report["convex"] = out.status
        ok &= out.status == expected["convex"]
    if "selection" in expected:
        res1 = select.affine_selection_convex(F, tolerances)
        res2 = select.affine_selection_endpoint(F, tolerances)
        report["selection_inductive"] = _map_payload(res1.map)
        report["selection_endpoint"] = _map_payload(res2.map)
        ok &= res1.status == "found" and res2.status == "found"
    if "condition2" in expected:
        grid = checks.TripleGrid.breakpoint_combos(model.sample_abscissae(F, tolerances))
        out = checks.check_condition2(F, grid, tolerances=tolerances)
        report["condition2"] = out.status
        ok &= out.status == expected["condition2"]
        if out.witness is not None:
            report["witness"] = _witness_payload(out.witness)
            if "witness" in expected:
                wx, wy, wt = expected["witness"]
                ok &= (
                    abs(out.witness[0] - wx) <= 1e-9
                    and abs(out.witness[1] - wy) <= 1e-9
                    and abs(out.witness[2] - wt) <= 1e-9
                )
    return ok


def _cmd_verify(args, report, tolerances):
    name = args.instance
    if name not in instances.builtin_names():
        raise _UsageError(f"unknown builtin {name!r}; choices: {', '.join(instances.builtin_names())}")
    ok = (
        _verify_sadowska(report, tolerances)
        if name == "sadowska"
        else _verify_generic(name, report, tolerances)
    )
    report["status"] = "pass" if ok else "violation"
    return EXIT_OK if ok else EXIT_NEGATIVE


def _cmd_emit_plot(args, report, tolerances):
    _, raw = _load(args.instance)
    F = _parse_or_report(report, raw)
    if F is None:
        return EXIT_FAILURE
    if not (isinstance(F, IntervalPL) or (isinstance(F, GraphPolytope) and F.dim == 1)):
        report["status"] = "invalid"
        report["violations"] = ["emit-plot needs a scalar instance"]
        return EXIT_FAILURE
    amap = None
    if args.affine is not None:
        amap = AffineMap((args.affine[1],), (args.affine[0],))
    elif args.solve:
        f, g = model.inf_sup(F, tolerances)
        res = select.sandwich_affine(f, g, args.objective, tolerances)
        if res.status != "found":
            report["status"] = "infeasible"
            if res.witness is not None:
                report["witness"] = _witness_payload(res.witness)
            return EXIT_NEGATIVE
        amap = res.map

    out_path = Path(args.out) if args.out else Path(f"{Path(args.instance).stem}_plot.csv")
    rows = emit_plot(F, amap, out_path, svg=not args.no_svg, tolerances=tolerances)
    report["status"] = "pass"
    report["rows"] = rows
    report["csv"] = str(out_path)
    if not args.no_svg:
        report["svg"] = str(out_path.with_suffix(".svg"))
    if amap is not None:
        report["map"] = _map_payload(amap)
    return EXIT_OK


def emit_plot(
    F,
    amap: AffineMap | None,
    out_path: Path,
    svg: bool = True,
    tolerances: Tolerances = DEFAULT,
) -> int:
    """Write the sampled envelope (and selection, when given) as CSV, and
    render the same series to an SVG figure alongside it."""
    f, g = model.inf_sup(F, tolerances)
    dom = F.domain
    xs = np.linspace(dom.a, dom.b, 101)
    lows = f(xs)
    highs = g(xs)
    hvals = None if amap is None else amap.d[0] * xs + amap.c[0]

    out_path = Path(out_path)
    with out_path.open("w", encoding="utf-8", newline="") as fh:
        header = "x,lower,upper,h" if hvals is not None else "x,lower,upper"
        fh.write(header + "\r\n")
        for i, x in enumerate(xs):
            cells = [repr(float(x)), repr(float(lows[i])), repr(float(highs[i]))]
            if hvals is not None:
                cells.append(repr(float(hvals[i])))
            fh.write(",".join(cells) + "\r\n")

    if svg:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(6, 4))
        ax.fill_between(xs, lows, highs, alpha=0.25, color="tab:blue", label="F(x)")
        ax.plot(xs, lows, color="tab:blue", lw=1)
        ax.plot(xs, highs, color="tab:blue", lw=1)
        if hvals is not None:
            ax.plot(xs, hvals, color="tab:red", lw=1.5, label="selection h")
        ax.set_xlabel("x")
        ax.set_ylabel("value")
        ax.legend(loc="best")
        fig.savefig(out_path.with_suffix(".svg"), metadata={"Date": None})
        plt.close(fig)
    return len(xs)


# ---------------------------------------------------------------------------
# wiring

_COMMANDS = {
    "validate": _cmd_validate,
    "check-convex": _check_command(checks.check_convex),
    "check-concave": _check_command(checks.check_concave),
    "check-cond2": _check_command(checks.check_condition2),
    "check-cond1": _cmd_check_cond1,
    "solve-sandwich": _cmd_solve_sandwich,
    "solve-affine": _cmd_solve_affine,
    "fixed-point": _cmd_fixed_point,
    "transversal": _cmd_transversal,
    "verify": _cmd_verify,
    "emit-plot": _cmd_emit_plot,
}


def _build_parser() -> _Parser:
    parser = _Parser(prog="affsel", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("instance", help="instance file path or builtin name")
        p.add_argument("--grid", type=int, default=None, help="dense lattice resolution")
        p.add_argument("--combos", action="store_true", help="breakpoint-combos grid policy")
        p.add_argument("--objective", choices=("chebyshev", "lexmin"), default="chebyshev")
        p.add_argument("--eps", type=float, default=None, help="base epsilon override")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", type=str, default=None, help="also write the report/CSV here")
        if name == "solve-affine":
            p.add_argument("--method", choices=("inductive", "endpoint"), default="inductive")
        if name == "emit-plot":
            p.add_argument("--solve", action="store_true", help="include a chebyshev sandwich map")
            p.add_argument("--affine", type=float, nargs=2, metavar=("ALPHA", "BETA"))
            p.add_argument("--no-svg", action="store_true", help="skip the figure")
    return parser


def run(argv) -> tuple[int, dict]:
    """Execute one CLI invocation; returns (exit_code, report)."""
    parser = _build_parser()
    args = parser.parse_args(argv)
    tolerances = _tolerances_from(args)
    report: dict = {
        "command": args.command,
        "instance": args.instance,
        "status": "error",
    }
    started = time.perf_counter()
    try:
        code = _COMMANDS[args.command](args, report, tolerances)
    except _UsageError:
        raise
    except (model.InvalidInstanceError, ValueError, RuntimeError, OSError) as exc:
        report["status"] = "error"
        report["error"] = str(exc)
        code = EXIT_FAILURE
    report["tolerances"] = _tolerances_dict(tolerances)
    report["seed"] = args.seed
    report["duration_ms"] = round(1000.0 * (time.perf_counter() - started), 3)
    return code, report


def report_text(report: dict, stable_timing: bool = False) -> str:
    """Deterministic serialization; zeroing the timing field makes repeated
    runs byte-identical."""
    if stable_timing:
        report = dict(report)
        report["duration_ms"] = 0.0
    return json.dumps(report, indent=2) + "\n"


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        code, report = run(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        _build_parser().print_usage(sys.stderr)
        return EXIT_FAILURE
    text = report_text(report)
    sys.stdout.write(text)
    out = report.get("command") != "emit-plot" and _out_path(argv)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    return code


def _out_path(argv) -> str | None:
    for i, arg in enumerate(argv):
        if arg == "--out" and i + 1 < len(argv):
            return argv[i + 1]
        if arg.startswith("--out="):
            return arg.split("=", 1)[1]
    return None


if __name__ == "__main__":
    sys.exit(main())
