"""Command-line front end.

Every subcommand writes one artifact (CSV or JSON) to ``--out`` or stdout.
Floats are printed with 17 significant digits so runs are byte-reproducible.
Exit codes: 0 success, 1 numerical failure, 2 usage error.
"""
import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from irkprec import __version__
from irkprec.bound import bound_curve, kappa_S
from irkprec.errors import ConvergenceError
from irkprec.fem import make_problem
from irkprec.kron import MAX_SIZE, assemble_full, oracle_spectrum
from irkprec.krylov import (PrecondOperator, SolverConfig, StageSystemOperator, gmres,
                            irk_integrate)
from irkprec.pencil import SpatialPencil, eig_pencil
from irkprec.smalldense import match_spectra
from irkprec.spectrum import METHODS, follow_branches, full_spectrum, track_branches
from irkprec.tableau import MAX_STAGES, factorize, radau_iia

PROBLEMS = ("laplace1d", "laplace2d", "scalar")


def fmt(x):
    """17 significant digits; non-finite values as ``inf``/``-inf``/``nan``."""
    return "%.17g" % x


def _json_value(v):
    if isinstance(v, (bool, np.bool_)) or v is None:
        return json.dumps(None if v is None else bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt(v) if math.isfinite(v) else "null"
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, dict):
        return "{" + ", ".join("%s: %s" % (json.dumps(k), _json_value(x)) for k, x in v.items()) + "}"
    if isinstance(v, np.ndarray):
        v = v.tolist()
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_json_value(x) for x in v) + "]"
    raise TypeError("cannot serialize %r" % type(v))


def dumps_json(obj):
    """JSON text with 17-digit floats (non-finite values become ``null``)."""
    return _json_value(obj) + "\n"


# argparse validators raise ArgumentTypeError, which becomes exit code 2
def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected an integer, got %r" % text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1, got %d" % v)
    return v


def _nonneg_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected an integer, got %r" % text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0, got %d" % v)
    return v


def _stages(text):
    v = _positive_int(text)
    if v > MAX_STAGES:
        raise argparse.ArgumentTypeError("stages must be in [1, %d], got %d" % (MAX_STAGES, v))
    return v


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected a number, got %r" % text)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError("must be positive and finite, got %r" % text)
    return v


def _add_problem(p, tau=True):
    p.add_argument("--problem", choices=PROBLEMS, default="laplace1d",
                   help="spatial model; for laplace2d --n is the points per side")
    p.add_argument("--n", type=_positive_int, default=10, help="interior unknowns (default 10)")
    if tau:
        p.add_argument("--tau", type=_positive_float, default=0.1, help="time step (default 0.1)")


def _add_stages(p):
    p.add_argument("--stages", type=_stages, default=2, help="RadauIIA stages (default 2)")


def _add_out(p):
    p.add_argument("--out", default="-", help="output file (default stdout)")


def build_parser():
    parser = argparse.ArgumentParser(prog="irkprec", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version="%(prog)s " + __version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tableau", help="RadauIIA tableau and its LDU factors")
    _add_stages(p)
    p.add_argument("--json", action="store_true", help="emit JSON instead of text")
    _add_out(p)

    p = sub.add_parser("pencil", help="pencil eigenvalues mu_k as CSV")
    _add_problem(p)
    _add_out(p)

    p = sub.add_parser("spectrum", help="eigenvalues of the preconditioned operator as CSV")
    _add_problem(p)
    _add_stages(p)
    p.add_argument("--method", choices=METHODS, default="matrix")
    _add_out(p)

    p = sub.add_parser("branches", help="mode eigenvalues over a log-spaced mu grid")
    _add_stages(p)
    p.add_argument("--mu-min", type=_positive_float, default=1e-2)
    p.add_argument("--mu-max", type=_positive_float, default=1e3)
    p.add_argument("--grid", type=_positive_int, default=400)
    _add_out(p)

    p = sub.add_parser("verify", help="compare all per-mode methods with the dense oracle")
    _add_problem(p)
    _add_stages(p)
    p.add_argument("--tol", type=_positive_float, default=1e-8)
    _add_out(p)

    p = sub.add_parser("gmres", help="solve one stage system with GMRES")
    _add_problem(p)
    _add_stages(p)
    p.add_argument("--tol", type=_positive_float, default=1e-10)
    p.add_argument("--precond", choices=("on", "off"), default="on")
    p.add_argument("--seed", type=_nonneg_int, default=0, help="seed for the random right-hand side")
    _add_out(p)

    p = sub.add_parser("integrate", help="time integration of the heat equation")
    _add_problem(p, tau=False)
    _add_stages(p)
    p.add_argument("--T", type=_positive_float, default=1.0, help="final time")
    p.add_argument("--steps", type=_nonneg_int, default=10)
    p.add_argument("--tol", type=_positive_float, default=1e-10)
    p.add_argument("--precond", choices=("on", "off"), default="on")
    _add_out(p)

    p = sub.add_parser("bound", help="spectral GMRES bound kappa(S) * minmax(l)")
    _add_problem(p)
    _add_stages(p)
    p.add_argument("--L", type=_nonneg_int, default=15, help="largest polynomial degree")
    _add_out(p)
    return parser


def parse_args(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "branches" and not args.mu_min < args.mu_max:
        build_parser().error("--mu-min must be smaller than --mu-max")
    if args.command == "branches" and args.grid < 2:
        build_parser().error("--grid must be at least 2")
    return args


def _setup(args):
    problem = make_problem(args.problem, args.n)
    tab = radau_iia(args.stages) if hasattr(args, "stages") else None
    return problem, tab


def _csv(rows, header, preamble=()):
    buf = io.StringIO()
    for line in preamble:
        buf.write(line + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def cmd_tableau(args):
    tab = radau_iia(args.stages)
    f = factorize(tab)
    data = {
        "stages": tab.s,
        "A": tab.A, "b": tab.b, "c": tab.c,
        "Ainv": f.Ainv, "L": f.L, "Uhat": f.Uhat,
        "Uhat_norm2": f.uhat_norm2, "Uhat_normF": f.uhat_normF,
        "L_norm2": f.l_norm2, "L_normF": f.l_normF,
    }
    if args.json:
        return dumps_json(data), 0
    lines = []
    for key, v in data.items():
        if isinstance(v, np.ndarray) and v.ndim == 2:
            lines.append("%s =" % key)
            lines.extend("  " + " ".join(fmt(x) for x in row) for row in v)
        elif isinstance(v, np.ndarray):
            lines.append("%s = %s" % (key, " ".join(fmt(x) for x in v)))
        else:
            lines.append("%s = %s" % (key, fmt(v) if isinstance(v, float) else v))
    return "\n".join(lines) + "\n", 0


def _pencil(args, problem):
    return eig_pencil(SpatialPencil.from_problem(problem, args.tau))


def cmd_pencil(args):
    problem, _ = _setup(args)
    pe = _pencil(args, problem)
    return _csv(((k + 1, float(m)) for k, m in enumerate(pe.mu)), ["k", "mu"]), 0


def _spectrum_rows(mu, vals):
    for k in range(vals.shape[0]):
        for i in range(vals.shape[1]):
            z = vals[k, i]
            yield k + 1, float(mu[k]), float(z.real), float(z.imag), i + 1


def cmd_spectrum(args):
    problem, tab = _setup(args)
    pe = _pencil(args, problem)
    sr = full_spectrum(factorize(tab), pe, args.method)
    vals, _ = follow_branches(pe.mu, [m.lambdas for m in sr.modes])
    return _csv(_spectrum_rows(pe.mu, vals), ["k", "mu", "re", "im", "branch"]), 0


def cmd_branches(args):
    f = factorize(radau_iia(args.stages))
    grid = np.logspace(np.log10(args.mu_min), np.log10(args.mu_max), args.grid)
    bs = track_branches(f, grid)
    for m in bs.merges:
        sys.stderr.write("merge mu=%s lambda=%s gap=%s\n" % (fmt(m.mu), fmt(m.lam), fmt(m.gap)))
    return _csv(_spectrum_rows(bs.mu, bs.values), ["k", "mu", "re", "im", "branch"]), 0


def _full(args, problem, tab):
    if problem.n * tab.s > MAX_SIZE:
        raise ValueError("n*s = %d exceeds the dense limit %d" % (problem.n * tab.s, MAX_SIZE))
    f = factorize(tab)
    p = SpatialPencil.from_problem(problem, args.tau)
    return f, p, eig_pencil(p), assemble_full(tab, f, p)


def cmd_verify(args):
    problem, tab = _setup(args)
    f, p, pe, fs = _full(args, problem, tab)
    oracle = oracle_spectrum(fs)
    lines = []
    worst = 0.0
    for method in METHODS:
        d = match_spectra(full_spectrum(f, pe, method).values(), oracle)
        worst = max(worst, d)
        lines.append("method=%s max_distance=%s" % (method, fmt(d)))
    ones = int(np.count_nonzero(np.abs(oracle - 1.0) <= 1e-9))
    lines.append("ones=%d required=%d" % (ones, problem.n))
    lines.append("max_mismatch=%s" % fmt(worst))
    ok = worst <= args.tol and ones >= problem.n
    return "\n".join(lines) + "\n", 0 if ok else 1


def _operators(args, problem, tab):
    f = factorize(tab)
    op = StageSystemOperator(problem.M, problem.K, args.tau, f.Ainv)
    pc = PrecondOperator(problem.M, problem.K, args.tau, f.L) if args.precond == "on" else None
    return op, pc


def cmd_gmres(args):
    problem, tab = _setup(args)
    op, pc = _operators(args, problem, tab)
    b = np.random.default_rng(args.seed).standard_normal(op.size)
    res = gmres(op.apply, b, tol=args.tol, apply_prec=None if pc is None else pc.apply)
    out = {
        "iterations": res.iterations,
        "converged": res.converged,
        "precond": args.precond,
        "history": res.relative_history,
        "true_residual": res.true_residual / float(np.linalg.norm(b)),
    }
    return dumps_json(out), 0


def _initial(problem):
    if problem.kind == "laplace1d_p1":
        return np.sin(np.pi * problem.nodes)
    if problem.kind == "laplace2d_fd":
        return np.sin(np.pi * problem.nodes[:, 0]) * np.sin(np.pi * problem.nodes[:, 1])
    return np.ones(problem.n)


def cmd_integrate(args):
    problem, tab = _setup(args)
    cfg = SolverConfig(tol=args.tol, precond=args.precond == "on")
    traj = irk_integrate(_initial(problem), args.T, args.steps, tab, problem, cfg)
    header = ["step", "t", "iterations"] + ["u%d" % (i + 1) for i in range(problem.n)]
    iters = [0] + list(traj.iterations)
    rows = ([j, float(t), iters[j]] + [float(x) for x in traj.states[j]]
            for j, t in enumerate(traj.times))
    return _csv(rows, header), 0


def cmd_bound(args):
    problem, tab = _setup(args)
    f, p, pe, fs = _full(args, problem, tab)
    sr = full_spectrum(f, pe)
    bc = bound_curve(fs, sr, args.L, kappa=kappa_S(fs, sr))
    rows = ((int(l), float(m), float(b)) for l, m, b in zip(bc.ell, bc.minmax, bc.bound))
    return _csv(rows, ["ell", "minmax", "bound"], ["# kappa_S=%s" % fmt(bc.kappa)]), 0


COMMANDS = {
    "tableau": cmd_tableau,
    "pencil": cmd_pencil,
    "spectrum": cmd_spectrum,
    "branches": cmd_branches,
    "verify": cmd_verify,
    "gmres": cmd_gmres,
    "integrate": cmd_integrate,
    "bound": cmd_bound,
}


def run(args):
    """Execute a parsed configuration and return the exit code."""
    try:
        text, code = COMMANDS[args.command](args)
    except ValueError as exc:
        sys.stderr.write("irkprec: error: %s\n" % exc)
        return 2
    except (ArithmeticError, ConvergenceError, np.linalg.LinAlgError) as exc:
        sys.stderr.write("irkprec: numerical failure: %s\n" % exc)
        return 1
    try:
        if args.out == "-":
            sys.stdout.write(text)
            sys.stdout.flush()
        else:
            with open(args.out, "w", newline="") as fh:
                fh.write(text)
    except OSError as exc:
        sys.stderr.write("irkprec: cannot write output: %s\n" % exc)
        return 1
    return code


def main(argv=None):
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
