"""Command-line interface: solve / perturb / sweep / demo.

Every command consumes a TOML run file, writes CSV (17 significant digits,
LF line endings, '#' comment rows for fit metadata), a JSON diagnostics
sidecar, and, for the sweep/demo report paths, a PNG figure next to the CSV.

Exit codes: 0 ok, 2 input error, 3 solver failure, 4 precision exhausted.
"""
from __future__ import annotations

import argparse
import cmath
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import engine, oracles, scenarios, tails
from .errors import (IntegrationFailure, NoRoot, PrecisionExhausted, QnmError,
                     RejectedRoot, RunFileError)
from .potentials import BumpPerturbation, poschl_teller, pt_tail_expansion
from .riccati import MatchData, pt_eigenvalue, shoot_eigenvalue, step_eigenvalue
from .runfile import RunFile, load_runfile


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return "" if x is None else str(x)


def _write_csv(path, header, rows, comments=()):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(c) for c in row))
    lines += [f"# {c}" for c in comments]
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


def _jsonable(obj):
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return float(obj)
    return obj


def _write_json(path, payload):
    Path(path).write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True)
                          + "\n", newline="\n")


def _out_paths(rf: RunFile, out_dir, default_stem):
    out = Path(out_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    csv = out / rf.output.get("csv", f"{default_stem}.csv")
    diag = out / rf.output.get("diagnostics", f"{default_stem}.json")
    fig = csv.with_suffix(".png")
    return csv, diag, fig


def _want_figures(rf: RunFile, args) -> bool:
    if getattr(args, "figures", None) is not None:
        return args.figures
    return bool(rf.output.get("figures", True))


def _potential_params(rf: RunFile):
    kind = rf.potential.get("kind")
    if kind is None:
        raise RunFileError(f"{rf.path}: [potential] kind is required")
    v0 = float(rf.potential.get("v0", 100.0 if kind == "step" else 5.0))
    b = float(rf.potential.get("b", 1.0))
    return kind, v0, b


def cmd_solve(rf: RunFile, args) -> int:
    kind, v0, b = _potential_params(rf)
    tol = args.tol or rf.solver_get("ode_tol", 1e-10)
    rows = []
    if kind == "step":
        n = int(rf.mode.get("root_index", 1))
        freq = step_eigenvalue(v0, b, n)
        rows.append((n, freq.value.real, freq.value.imag, freq.residual))
    else:
        j = int(rf.mode.get("j", 0))
        branch = int(rf.mode.get("branch", 1))
        freq = pt_eigenvalue(v0, b, j, branch)
        # residual: re-derive the mode by parity shooting off the tail series
        l_rad = float(rf.solver_get("l_radius", 5.0))
        k_max = int(rf.solver_get("k_max", 8))
        pot = poschl_teller(v0, b, k_max)
        start = tails.tail_boundary(pot.tail_right, l_rad, k_max)
        bc = "neumann" if j % 2 == 0 else "dirichlet"
        shot = shoot_eigenvalue(pot, freq.value, match_point=0.0, tol=1e-11,
                                left_bc=bc, right_start=start, ode_tol=tol)
        rows.append((j, freq.value.real, freq.value.imag,
                     abs(shot.value - freq.value)))
    csv, diag, _ = _out_paths(rf, args.out, "solve")
    _write_csv(csv, ("mode_index", "re_omega", "im_omega", "residual"), rows)
    _write_json(diag, {"scenario": "solve", "kind": kind, "v0": v0, "b": b,
                       "rows": [list(r) for r in rows]})
    return 0


def _perturb_step(rf: RunFile, order: int, quad_tol: float):
    kind, v0, b = _potential_params(rf)
    a = float(rf.solver_get("a", 1.6))
    x0 = float(rf.perturbation.get("x0", 0.3))
    w = float(rf.perturbation.get("width", 0.1))
    height = float(rf.perturbation.get("height", 1.0))
    bump = BumpPerturbation(x0, w, height)
    oracle = oracles.step_exact(v0, b, a, int(rf.mode.get("root_index", 1)))
    profile = scenarios._step_profile(oracle)
    match = MatchData.free_wave(oracle.omega0, l_minus=0.0, l_plus=a)
    result = engine.run_lpt(profile, match, bump.evaluate, order,
                            v1_breakpoints=(*bump.support, b),
                            quad_rel_tol=quad_tol)
    support_edge = max(b, bump.support[1])
    l_resid = engine.l_independence_residual(profile, match, bump.evaluate,
                                             support_edge,
                                             v1_breakpoints=(*bump.support, b),
                                             quad_rel_tol=quad_tol)
    rows = [(od.n, od.omega_n.real, od.omega_n.imag, result.norm.digits_lost,
             l_resid) for od in result.orders]
    diag = {"omega0": result.omega0, "norm": result.norm.value,
            "norm_method": result.norm.method,
            "digits_lost": result.norm.digits_lost,
            "l_independence_residual": l_resid}
    return rows, diag


def _perturb_pt(rf: RunFile, order: int, quad_tol: float, subtract: bool):
    kind, v0, b = _potential_params(rf)
    if order != 1:
        raise RunFileError(
            "width-scaling perturbation is implemented to first order; the "
            "higher tail responses D_n (n >= 2) are not derived")
    j = int(rf.mode.get("j", 0))
    branch = int(rf.mode.get("branch", 1))
    l_rad = float(rf.solver_get("l_radius", 5.0))
    k_max = int(rf.solver_get("k_max", 4))
    oracle = oracles.pt_exact(j, v0, branch)
    om1, norm, me, match, profile = scenarios.pt_first_order(
        oracle, l_rad, k_max, quad_rel_tol=quad_tol,
        subtraction="series" if subtract else "none")
    om1b, *_ = scenarios.pt_first_order(oracle, l_rad - 1.0, k_max,
                                        quad_rel_tol=quad_tol,
                                        subtraction="series" if subtract else "none")
    l_resid = abs(om1b - om1) / abs(om1)
    rows = [(1, om1.real, om1.imag, norm.digits_lost, l_resid)]
    diag = {"omega0": oracle.omega0, "omega1": om1, "norm": norm.value,
            "digits_lost": norm.digits_lost, "l_independence_residual": l_resid,
            "closed_form_omega1": oracle.omega1}
    return rows, diag


def cmd_perturb(rf: RunFile, args) -> int:
    order = int(args.order or rf.solver_get("order", 2))
    quad_tol = args.tol or rf.solver_get("quad_tol", 1e-12)
    subtract = args.subtract_asymptotics
    if subtract is None:
        subtract = bool(rf.solver_get("subtract_asymptotics", True))
    pkind = rf.perturbation.get("kind", "bump")
    if pkind == "bump":
        rows, diag = _perturb_step(rf, order, quad_tol)
    else:
        rows, diag = _perturb_pt(rf, order, quad_tol, subtract)
    csv, diag_path, _ = _out_paths(rf, args.out, "perturb")
    _write_csv(csv, ("order", "re_omega_n", "im_omega_n", "digits_lost",
                     "L_independence_residual"), rows)
    _write_json(diag_path, {"scenario": "perturb", **diag})
    return 0


def _sweep_values(rf: RunFile, log_default: bool):
    sw = rf.sweep
    if not sw:
        raise RunFileError(f"{rf.path}: [sweep] section is required")
    start = sw.get("start")
    stop = sw.get("stop")
    count = int(sw.get("count", 0))
    if start is None or stop is None or count < 1 or not (stop > start):
        raise RunFileError(f"{rf.path}: [sweep] needs start < stop and count >= 1")
    if bool(sw.get("log", log_default)):
        return np.geomspace(float(start), float(stop), count)
    return np.linspace(float(start), float(stop), count)


def cmd_sweep(rf: RunFile, args) -> int:
    which = args.sweep or rf.scenario
    if which not in ("bump-x0", "mu-scaling"):
        raise RunFileError(f"sweep kind must be bump-x0 or mu-scaling, got {which!r}")
    kind, v0, b = _potential_params(rf)
    a = float(rf.solver_get("a", 1.6))
    w = float(rf.perturbation.get("width", 0.1))
    ode_tol = args.tol or rf.solver_get("ode_tol", 1e-12)
    quad_tol = rf.solver_get("quad_tol", 1e-12)

    if which == "bump-x0":
        xs = _sweep_values(rf, log_default=False)
        mu = float(rf.perturbation.get("mu", 10.0))
        res = scenarios.run_bump_sweep(
            xs, v0=v0, b=b, mu=mu, w=w, a=a,
            seed_from_exact=args.seed_from_exact, ode_tol=ode_tol,
            quad_rel_tol=quad_tol)
        header = ("x0", "re_exact", "im_exact", "re_first", "im_first",
                  "re_second", "im_second", "err0", "err1", "err2", "residual")
        comments = [f"omega0 = {_fmt(res.omega0.real)} {_fmt(res.omega0.imag)}"]
    else:
        xs = _sweep_values(rf, log_default=True)
        x0 = float(rf.perturbation.get("x0", 0.3))
        res = scenarios.run_mu_scaling(
            xs, x0=x0, v0=v0, b=b, w=w, a=a, ode_tol=ode_tol,
            quad_rel_tol=quad_tol)
        header = ("mu", "re_exact", "im_exact", "re_first", "im_first",
                  "re_second", "im_second", "err0", "err1", "err2", "residual")
        comments = [f"slope_{k} = {_fmt(v)}" for k, v in (res.slopes or {}).items()]
        if res.degenerate_fit:
            comments.append("degenerate_fit = true")

    rows = []
    for r in res.rows:
        rows.append((
            r.parameter,
            None if r.exact is None else r.exact.real,
            None if r.exact is None else r.exact.imag,
            r.first.real, r.first.imag, r.second.real, r.second.imag,
            r.err0, r.err1, r.err2, r.residual))
    csv, diag_path, fig = _out_paths(rf, args.out, which)
    _write_csv(csv, header, rows, comments)
    _write_json(diag_path, {
        "scenario": which, "omega0": res.omega0, "metadata": res.metadata,
        "slopes": res.slopes, "degenerate_fit": res.degenerate_fit,
        "missing_points": [r.parameter for r in res.rows if r.missing]})
    if _want_figures(rf, args):
        from . import report
        if which == "bump-x0":
            report.render_bump_sweep(res, fig)
        else:
            report.render_mu_scaling(res, fig)
    return 0


def cmd_demo(rf: RunFile, args) -> int:
    kind, v0, b = _potential_params(rf)
    res = scenarios.run_pt_demo(
        v0=v0, j=int(rf.mode.get("j", 0)), branch=int(rf.mode.get("branch", 1)),
        l_radius=float(rf.solver_get("l_radius", 5.0)),
        k_max=int(rf.solver_get("k_max", 4)),
        quad_rel_tol=args.tol or rf.solver_get("quad_tol", 1e-12))
    rows = [
        ("omega0", res.omega0.real, res.omega0.imag),
        ("omega1_closed", res.omega1_closed.real, res.omega1_closed.imag),
        ("omega1_surface", res.omega1_surface.real, res.omega1_surface.imag),
        ("omega1_contour", res.omega1_contour.real, res.omega1_contour.imag),
        ("norm_closed", res.norm_closed.real, res.norm_closed.imag),
        ("norm_surface", res.norm_surface.real, res.norm_surface.imag),
        ("me_closed", res.me_closed.real, res.me_closed.imag),
        ("me_surface", res.me_surface.real, res.me_surface.imag),
        ("me_contour", res.me_contour.real, res.me_contour.imag),
        ("digits_lost_raw", res.digits_lost_raw, 0.0),
        ("digits_lost_subtracted", res.digits_lost_subtracted, 0.0),
    ]
    for l_val in sorted(res.l_sweep):
        om1 = res.l_sweep[l_val]["omega1"]
        rows.append((f"omega1_L_{l_val:g}", om1.real, om1.imag))
    comments = [
        f"surface_vs_closed = {_fmt(res.surface_vs_closed)}",
        f"contour_vs_closed = {_fmt(res.contour_vs_closed)}",
    ]
    csv, diag_path, fig = _out_paths(rf, args.out, "pt-demo")
    _write_csv(csv, ("quantity", "re_value", "im_value"), rows, comments)
    _write_json(diag_path, {
        "scenario": "pt-demo", "j": res.j, "branch": res.branch,
        "v0": res.v0, "sigma": res.sigma, "omega0": res.omega0,
        "omega1": {"closed": res.omega1_closed, "surface": res.omega1_surface,
                   "contour": res.omega1_contour},
        "digits_lost": {"raw": res.digits_lost_raw,
                        "subtracted": res.digits_lost_subtracted},
        "amplitude_spread": res.amplitude_spread,
        "l_sweep": {str(k): v for k, v in res.l_sweep.items()}})
    if _want_figures(rf, args):
        from . import report
        report.render_pt_demo(res, fig)
    return 0


def _bool_flag(parser, name, default=None, help=""):
    group = parser.add_mutually_exclusive_group()
    dest = name.replace("-", "_")
    group.add_argument(f"--{name}", dest=dest, action="store_true", help=help)
    group.add_argument(f"--no-{name}", dest=dest, action="store_false")
    parser.set_defaults(**{dest: default})


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qnmpert",
        description="Outgoing-mode eigenvalues of 1-d wave problems and their "
                    "perturbative corrections.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, fn in (("solve", cmd_solve), ("perturb", cmd_perturb),
                     ("sweep", cmd_sweep), ("demo", cmd_demo)):
        q = sub.add_parser(name)
        q.add_argument("--runfile", required=True, help="TOML run file")
        q.add_argument("--out", default=None, help="output directory")
        q.add_argument("--tol", type=float, default=None,
                       help="override the solver tolerance")
        q.set_defaults(func=fn)
        if name == "perturb":
            q.add_argument("--order", type=int, default=None)
            _bool_flag(q, "subtract-asymptotics", default=None,
                       help="control cancellation handling in the norm")
        if name == "sweep":
            q.add_argument("--sweep", choices=("bump-x0", "mu-scaling"),
                           default=None)
            _bool_flag(q, "seed-from-exact", default=True,
                       help="chain eigenvalue seeds along the sweep")
            _bool_flag(q, "figures", default=None)
        if name in ("demo",):
            _bool_flag(q, "figures", default=None)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rf = load_runfile(args.runfile)
        return args.func(rf, args)
    except RunFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PrecisionExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (NoRoot, RejectedRoot, IntegrationFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (QnmError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
