"""Command-line front end.

Subcommands: eigen, eigen-nonrel, scan, current, fit, formula.  Every value
flows from flags, an optional --config JSON file, or built-in defaults, in
that priority order; the environment is never consulted, so a command line
is a complete, reproducible run description.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import eigensolver as es
from .current import current_trace, envelope_from_eigvec, envelope_from_real, resolve_n_tau
from .fitting import (FAMILIES, FitError, TrialParams, default_fit_matrix,
                      match_eigenvector, maximize_backflow, trial_eval)
from .kernel import assemble
from .params import EpsilonParams, build_grid
from .scan import closed_form_flux, eigen_scan, fit_scan, write_scan_csv

SOLVER_DEFAULTS = {
    "q0": es.DEFAULT_Q0,
    "n0": es.DEFAULT_N0,
    "eig_tol": es.DEFAULT_EIG_TOL,
    "refine_tol": es.DEFAULT_REFINE_TOL,
    "h_max": es.DEFAULT_H_MAX,
}

DEFAULT_SCAN_EPS = [round(0.1 * k, 1) for k in range(1, 26)]


def _add_solver_flags(p):
    p.add_argument("--q0", type=float, default=None, help="base integration range")
    p.add_argument("--n0", type=int, default=None, help="base node count")
    p.add_argument("--eig-tol", type=float, default=None, dest="eig_tol")
    p.add_argument("--refine-tol", type=float, default=None, dest="refine_tol")
    p.add_argument("--h-max", type=int, default=None, dest="h_max")


def _build_parser():
    top = argparse.ArgumentParser(prog="backflow",
                                  description="Relativistic quantum backflow toolkit")
    top.add_argument("--config", default=None,
                     help="JSON file of parameter values; explicit flags win over it")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eigen", help="converged maximum-backflow eigenvalue at one epsilon")
    p.add_argument("--epsilon", type=float, default=None)
    _add_solver_flags(p)
    p.add_argument("--out", default=None, help="write the solution as JSON")
    p.add_argument("--dump-matrix", default=None, dest="dump_matrix",
                   help="debug: dump the final kernel matrix as CSV")

    p = sub.add_parser("eigen-nonrel", help="non-relativistic backflow constant")
    _add_solver_flags(p)
    p.add_argument("--out", default=None)

    p = sub.add_parser("scan", help="epsilon sweep (eigenvalues, model, optional fits)")
    p.add_argument("--eps-list", default=None, dest="eps_list",
                   help="comma-separated epsilons (default 0.1..2.5 step 0.1)")
    p.add_argument("--with-fits", action="store_true", dest="with_fits")
    p.add_argument("--families", default=None, help="comma-separated subset of airy,bessel")
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    _add_solver_flags(p)
    p.add_argument("--out", default=None, help="CSV path (default scan.csv)")

    p = sub.add_parser("current", help="current trace J(tau) and integrated flux")
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--n-tau", type=int, default=None, dest="n_tau")
    p.add_argument("--trial", default=None, choices=FAMILIES,
                   help="use a trial function instead of the computed eigenvector")
    p.add_argument("--params", default=None, help="six comma-separated trial coefficients")
    _add_solver_flags(p)
    p.add_argument("--out", default=None, help="CSV path (default current.csv)")

    p = sub.add_parser("fit", help="optimize a trial family (maximize backflow or match)")
    p.add_argument("--family", default=None, choices=FAMILIES)
    p.add_argument("--mode", default=None, choices=("maximize", "match"))
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--fix-a6", action="store_true", dest="fix_a6")
    p.add_argument("--verbose-trace", action="store_true", dest="verbose_trace",
                   help="include the per-restart trace in the JSON output")
    _add_solver_flags(p)
    p.add_argument("--out", default=None, help="JSON path (default fit.json)")

    p = sub.add_parser("formula", help="closed-form model value for |lambda|")
    p.add_argument("--epsilon", type=float, default=None)

    return top


def _merge_config(args, parser):
    """Layer values: explicit flag > config file > None (defaults applied later)."""
    if not args.config:
        return args
    try:
        with open(args.config) as f:
            cfg = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read config {args.config}: {exc}")
    if not isinstance(cfg, dict):
        parser.error("config file must hold a JSON object")
    for key, value in cfg.items():
        dest = key.replace("-", "_")
        if not hasattr(args, dest):
            parser.error(f"config key {key!r} does not apply to command {args.command!r}")
        if getattr(args, dest) in (None, False):
            setattr(args, dest, value)
    return args


def _solver_kwargs(args):
    return {k: getattr(args, k) if getattr(args, k) is not None else v
            for k, v in SOLVER_DEFAULTS.items()}


def _require_epsilon(args, parser, positive=True):
    if args.epsilon is None:
        parser.error("--epsilon is required")
    if positive and args.epsilon <= 0:
        parser.error(f"--epsilon must be > 0, got {args.epsilon}")
    return EpsilonParams(args.epsilon)


def _parse_eps_list(text, parser):
    if text is None:
        return list(DEFAULT_SCAN_EPS)
    items = [s for s in text.split(",") if s.strip()]
    if not items:
        parser.error("--eps-list is empty")
    try:
        values = [float(s) for s in items]
    except ValueError:
        parser.error(f"bad --eps-list: {text!r}")
    if any(v <= 0 for v in values):
        parser.error("--eps-list entries must be > 0")
    return values


def _write_json(path, payload):
    with open(path, "w") as f:
        json.dump(payload, f, indent=1, sort_keys=True)
        f.write("\n")


def _cmd_eigen(args, parser):
    if args.command == "eigen":
        eps = _require_epsilon(args, parser)
    else:
        eps = EpsilonParams(0.0)
    kw = _solver_kwargs(args)
    try:
        sol = es.solve_converged(eps, **kw)
    except (es.RefinementError, es.EigensolverError) as exc:
        diag = {"error": str(exc), "epsilon": eps.epsilon}
        if isinstance(exc, es.RefinementError):
            diag["lambdas"] = exc.lambdas
        if args.out:
            _write_json(args.out, diag)
        print(f"solve failed: {exc}", file=sys.stderr)
        return 1
    print(f"lambda = {sol.lam:.17e}")
    print(f"epsilon={eps.epsilon:g} h_final={sol.h_final} nodes={sol.grid.size} "
          f"iterations={sol.iterations} residual={sol.residual:.3e}")
    if args.out:
        _write_json(args.out, sol.to_dict())
    if getattr(args, "dump_matrix", None):
        assemble(eps, sol.grid).dump_csv(args.dump_matrix)
    return 0


def _cmd_scan(args, parser):
    eps_list = _parse_eps_list(args.eps_list, parser)
    kw = _solver_kwargs(args)
    out = args.out or "scan.csv"
    if args.with_fits:
        families = tuple(s.strip() for s in (args.families or "airy,bessel").split(",") if s.strip())
        for fam in families:
            if fam not in FAMILIES:
                parser.error(f"unknown family {fam!r}")
        rows = fit_scan(eps_list, families=families,
                        restarts=args.restarts if args.restarts is not None else 200,
                        seed=args.seed if args.seed is not None else 0, **kw)
    else:
        rows = eigen_scan(eps_list, **kw)
    write_scan_csv(rows, out, with_fits=args.with_fits)
    print(f"wrote {out} ({len(rows)} rows)")
    for r in rows:
        if r.error:
            print(f"  epsilon={r.epsilon:g}: {r.error}", file=sys.stderr)
    return 0


def _cmd_current(args, parser):
    eps = _require_epsilon(args, parser)
    if args.n_tau is not None and args.n_tau < 2:
        parser.error(f"--n-tau must be >= 2, got {args.n_tau}")
    n_tau = resolve_n_tau(eps, args.n_tau)
    out = args.out or "current.csv"
    if args.trial:
        if not args.params:
            parser.error("--trial requires --params a1,a2,a3,a4,a5,a6")
        try:
            coeffs = tuple(float(s) for s in args.params.split(","))
            trial = TrialParams(args.trial, coeffs)
        except ValueError as exc:
            parser.error(f"bad --params: {exc}")
        matrix = default_fit_matrix(eps)
        grid = matrix.grid
        t = trial_eval(trial, grid.nodes)
        t = t / np.sqrt(np.sum(grid.weights * t * t))
        env = envelope_from_real(t, grid, eps)
        label = f"trial {args.trial}"
    else:
        kw = _solver_kwargs(args)
        try:
            sol = es.solve_converged(eps, **kw)
        except (es.RefinementError, es.EigensolverError) as exc:
            print(f"solve failed: {exc}", file=sys.stderr)
            return 1
        env = envelope_from_eigvec(sol)
        label = f"eigenvector (lambda={sol.lam:.17e})"
    trace = current_trace(env, eps, n_tau)
    trace.to_csv(out)
    print(f"wrote {out} ({n_tau} samples), source: {label}")
    print(f"delta = {trace.delta:.17e}")
    return 0


def _cmd_fit(args, parser):
    eps = _require_epsilon(args, parser)
    if args.family is None or args.mode is None:
        parser.error("--family and --mode are required")
    restarts = args.restarts if args.restarts is not None else 5000
    seed = args.seed if args.seed is not None else 0
    out = args.out or "fit.json"
    try:
        if args.mode == "maximize":
            res = maximize_backflow(args.family, eps, restarts, seed, a6_fixed=args.fix_a6)
        else:
            kw = _solver_kwargs(args)
            sol = es.solve_converged(eps, **kw)
            res = match_eigenvector(args.family, sol, restarts, seed, a6_fixed=args.fix_a6)
    except (FitError, es.RefinementError, es.EigensolverError) as exc:
        print(f"fit failed: {exc}", file=sys.stderr)
        return 1
    _write_json(out, res.to_dict(include_trace=args.verbose_trace))
    print(f"wrote {out}")
    print(f"delta = {res.delta:.17e}")
    if res.residual is not None:
        print(f"residual = {res.residual:.17e}")
    return 0


def _cmd_formula(args, parser):
    if args.epsilon is None:
        parser.error("--epsilon is required")
    if args.epsilon < 0:
        parser.error(f"--epsilon must be >= 0, got {args.epsilon}")
    print(f"{closed_form_flux(args.epsilon):.17e}")
    return 0


_DISPATCH = {
    "eigen": _cmd_eigen,
    "eigen-nonrel": _cmd_eigen,
    "scan": _cmd_scan,
    "current": _cmd_current,
    "fit": _cmd_fit,
    "formula": _cmd_formula,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    args = _merge_config(args, parser)
    return _DISPATCH[args.command](args, parser)


if __name__ == "__main__":
    sys.exit(main())
