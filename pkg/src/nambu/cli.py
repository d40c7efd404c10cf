"""Command-line front end.

Exit codes: 0 all checks passed (or a verdict was delivered), 1 a
mathematical violation or tolerance breach, 2 bad input or usage.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .brackets import derived_poisson, hamiltonian_vector_field
from .dynamics import (FlowProblem, NonFiniteStateError, conservation_report,
                       generator_derivatives, integrate_rk4)
from .parser import ParseError, VariableTable, load_system, parse_expr, render_tensor
from .polyalgebra import monomial_basis, variables
from .transform import InvalidMapError, transform_tensor
from .verify import (RankParityError, check_casimir, check_compatibility, check_cond_algebraic,
                     check_cond_differential, check_fundamental_identity, check_jacobi,
                     generic_rank)


class UsageError(Exception):
    pass


def _fraction(text: str) -> Fraction:
    vt = VariableTable(("scratch",))
    p = parse_expr(text, vt)
    if not p.is_constant():
        raise UsageError(f"not a constant: {text!r}")
    return p.constant_value()


def _overrides(pairs) -> dict:
    out = {}
    for item in pairs or ():
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--param expects NAME=VALUE, got {item!r}")
        out[name.strip()] = _fraction(value)
    return out


def _load(args):
    return load_system(args.file, _overrides(args.param))


def _pick(bucket: dict, name: str, kind: str):
    if name not in bucket:
        known = ", ".join(sorted(bucket)) or "none"
        raise UsageError(f"unknown {kind} {name!r} (available: {known})")
    return bucket[name]


def _object(spec, args):
    """The tensor or matrix selected by ``--tensor`` / ``--matrix``."""
    if getattr(args, "tensor", None) and getattr(args, "matrix", None):
        raise UsageError("give either --tensor or --matrix, not both")
    if getattr(args, "tensor", None):
        return args.tensor, _pick(spec.tensors, args.tensor, "tensor")
    if getattr(args, "matrix", None):
        return args.matrix, _pick(spec.matrices, args.matrix, "matrix")
    raise UsageError("select an object with --tensor or --matrix")


def _observable(spec, name):
    if name in spec.observables:
        return spec.observables[name]
    if name in spec.variables.names:
        return variables(spec.dimension)[spec.variables.index(name)]
    raise UsageError(f"unknown observable {name!r}")


def _emit(args, payload: dict, text: str):
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


# -- subcommands ---------------------------------------------------------------


def cmd_verify(args) -> int:
    spec = _load(args)
    names = spec.variables.names
    reports = []
    label = None
    obj = None
    if args.tensor or args.matrix:
        label, obj = _object(spec, args)
    explicit = args.cond1 or args.cond2 or args.jacobi or args.fi or args.casimir or args.compatible
    if obj is None and explicit:
        raise UsageError("select an object with --tensor or --matrix")
    if obj is None:
        raise UsageError("nothing to verify: select --tensor or --matrix")
    if not explicit:
        if obj.rank == 3:
            args.cond1 = args.cond2 = True
        elif obj.rank == 2:
            args.jacobi = True
        else:
            args.fi = True
    if args.cond1:
        if obj.rank != 3:
            raise UsageError("--cond1 needs a rank-3 tensor")
        reports.append(check_cond_algebraic(obj))
    if args.cond2:
        if obj.rank != 3:
            raise UsageError("--cond2 needs a rank-3 tensor")
        reports.append(check_cond_differential(obj))
    if args.jacobi:
        if obj.rank != 2:
            raise UsageError("--jacobi needs a matrix")
        reports.append(check_jacobi(obj))
    for cname in args.casimir or ():
        if obj.rank != 2:
            raise UsageError("--casimir needs --matrix")
        rep = check_casimir(obj, _observable(spec, cname))
        rep.check = f"casimir[{cname}]"
        reports.append(rep)
    for other in args.compatible or ():
        if obj.rank != 2:
            raise UsageError("--compatible needs --matrix")
        rep = check_compatibility(obj, _pick(spec.matrices, other, "matrix"))
        rep.check = f"compatibility[{other}]"
        reports.append(rep)
    if args.fi:
        if args.fi_tuple:
            obs = {}
            tuples = []
            for raw in args.fi_tuple:
                tup = [x.strip() for x in raw.split(",")]
                for x in tup:
                    obs[x] = _observable(spec, x)
                tuples.append(tup)
            reports.append(check_fundamental_identity(obj, obs, tuples))
        else:
            if args.fi_degree < 1:
                raise UsageError("--fi-degree must be >= 1")
            basis = monomial_basis(spec.dimension, args.fi_degree)
            obs = {m.render(names): m for m in basis}
            reports.append(check_fundamental_identity(obj, obs))
    ok = all(r.passed for r in reports)
    payload = {"object": label, "passed": ok, "reports": [r.to_dict(names) for r in reports]}
    _emit(args, payload, "\n".join(r.render(names) for r in reports))
    return 0 if ok else 1


def cmd_admissible(args) -> int:
    spec = _load(args)
    if args.samples < 1:
        raise UsageError("--samples must be positive")
    name = args.matrix
    if name is None:
        if "J" in spec.matrices:
            name = "J"
        elif len(spec.matrices) == 1:
            name = next(iter(spec.matrices))
        else:
            raise UsageError("select a matrix with --matrix")
    J = _pick(spec.matrices, name, "matrix")
    try:
        rep = generic_rank(J, args.samples, args.seed)
    except RankParityError as exc:
        print(f"inconsistent rank: {exc}", file=sys.stderr)
        return 1
    payload = {"matrix": name, **rep.to_dict()}
    _emit(args, payload, rep.render())
    return 0


def _render_object(name: str, t, n: int) -> str:
    xs = [f"x{i + 1}" for i in range(n)]
    return "vars: " + " ".join(xs) + "\n" + render_tensor(name, t, xs)


def cmd_transform(args) -> int:
    spec = _load(args)
    label, obj = _object(spec, args)
    cmap = _pick(spec.maps, args.map, "map")
    if args.inverse:
        cmap = cmap.inverted()
    out = transform_tensor(obj, cmap)
    text = _render_object(label, out, spec.dimension)
    payload = {"object": label, "map": args.map, "inverse": args.inverse,
               "rank": out.rank,
               "entries": {" ".join(map(str, k)): v.render([f"x{i + 1}" for i in range(spec.dimension)])
                           for k, v in out.items()},
               "system": text}
    _emit(args, payload, text)
    return 0


def cmd_derive(args) -> int:
    spec = _load(args)
    tensor = _pick(spec.tensors, args.tensor, "tensor")
    cas = [_observable(spec, c) for c in args.casimir or ()]
    if len(cas) != tensor.rank - 2:
        raise UsageError(f"tensor {args.tensor} has rank {tensor.rank}: "
                         f"give {tensor.rank - 2} --casimir selectors")
    J = derived_poisson(tensor, cas)
    names = spec.variables.names
    text = "vars: " + " ".join(names) + "\n" + render_tensor(args.name, J, names)
    payload = {"matrix": args.name,
               "entries": {" ".join(map(str, k)): v.render(names) for k, v in J.items()},
               "system": text}
    _emit(args, payload, text)
    return 0


def cmd_simulate(args) -> int:
    spec = _load(args)
    label, obj = _object(spec, args)
    gens = [_observable(spec, g) for g in args.gen or ()]
    if len(gens) != obj.rank - 1:
        raise UsageError(f"{label} has rank {obj.rank}: give {obj.rank - 1} --gen selectors")
    try:
        z0 = [float(x) for x in args.z0.split(",")]
    except ValueError:
        raise UsageError(f"bad --z0 {args.z0!r}") from None
    monitored = {}
    for g in list(args.gen) + list(args.monitor or ()):
        monitored[g] = _observable(spec, g)
    if args.tol is not None and not args.tol > 0:
        raise UsageError("--tol must be positive")
    exact = generator_derivatives(obj, gens)
    if any(not d.is_zero() for d in exact):
        print("generator not conserved symbolically", file=sys.stderr)
        return 1
    field = hamiltonian_vector_field(obj, gens)
    try:
        problem = FlowProblem(field, z0, args.dt, args.T, monitored)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    status = 0
    try:
        traj = integrate_rk4(problem, backend=args.backend)
    except NonFiniteStateError as exc:
        print(f"non-finite state at step {exc.step}", file=sys.stderr)
        traj = exc.trajectory
        status = 1
    report = conservation_report(traj, args.tol)
    if status == 0 and not report.passed:
        status = 1
    to_stdout = args.out == "-"
    if to_stdout:
        traj.to_csv(sys.stdout)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            traj.to_csv(fh)
    summary_stream = sys.stderr if to_stdout else sys.stdout
    if args.format == "json":
        print(json.dumps(report.to_dict(), indent=2, sort_keys=True), file=summary_stream)
    else:
        print(report.render(), file=summary_stream)
    return status


# -- argument parsing ------------------------------------------------------------


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nambu", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("file", help="system file")
        p.add_argument("--param", action="append", metavar="NAME=VALUE",
                       help="override a declared parameter (repeatable)")
        p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("verify", help="run exact identity checks")
    common(p)
    p.add_argument("--tensor")
    p.add_argument("--matrix")
    p.add_argument("--cond1", action="store_true", help="algebraic (quadratic) tensor condition")
    p.add_argument("--cond2", action="store_true", help="differential tensor condition")
    p.add_argument("--jacobi", action="store_true")
    p.add_argument("--fi", action="store_true", help="fundamental identity")
    p.add_argument("--fi-degree", type=int, default=2,
                   help="max degree of the monomial basis for --fi (default 2)")
    p.add_argument("--fi-tuple", action="append", metavar="A,B,...,D,E",
                   help="designated observable selection for --fi (repeatable)")
    p.add_argument("--casimir", action="append", metavar="OBS")
    p.add_argument("--compatible", action="append", metavar="MATRIX",
                   help="check that the pencil with MATRIX satisfies Jacobi")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("admissible", help="generic rank and the N = K + 2 verdict")
    common(p)
    p.add_argument("--matrix")
    p.add_argument("--samples", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_admissible)

    p = sub.add_parser("transform", help="transform a tensor or matrix by a coordinate map")
    common(p)
    p.add_argument("--tensor")
    p.add_argument("--matrix")
    p.add_argument("--map", required=True)
    p.add_argument("--inverse", action="store_true", help="use the inverse direction of the map")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("simulate", help="integrate a bracket flow with RK4")
    common(p)
    p.add_argument("--tensor")
    p.add_argument("--matrix")
    p.add_argument("--gen", action="append", required=True, metavar="OBS")
    p.add_argument("--monitor", action="append", metavar="OBS")
    p.add_argument("--z0", required=True, help="comma separated initial state")
    p.add_argument("--dt", type=_positive_float, required=True)
    p.add_argument("--T", type=_positive_float, required=True)
    p.add_argument("--tol", type=float)
    p.add_argument("--out", default="-", help="CSV path ('-' for stdout)")
    p.add_argument("--backend", choices=("python", "cython"))
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("derive", help="Poisson matrix from a Nambu tensor and Casimirs")
    common(p)
    p.add_argument("--tensor", required=True)
    p.add_argument("--casimir", action="append", metavar="OBS")
    p.add_argument("--name", default="J")
    p.set_defaults(func=cmd_derive)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ParseError, InvalidMapError, OSError, ValueError, KeyError,
            ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
