"""Command line front end.

Exit codes: 0 ok, 2 bad input, 3 support overflow, 4 residual check failed
(reports are still written), 5 doubly invariant input, 6 verify failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from . import suites
from .boundary import make_grid, write_trace_csv
from .errors import (
    DoublyInvariant,
    FactorizationResidual,
    SliceLabError,
    SupportOverflow,
)
from .idempotents import (
    IdempotentSpec,
    build_idempotent,
    fit_residual,
    is_self_tilde_conjugate,
    verify_idempotent,
)
from .quaternions import Quaternion
from .series import (
    SliceLaurentSeries,
    conjugate,
    evaluate,
    star,
    star_inverse,
    symmetrize,
)
from .subspaces import (
    cyclicity_residual,
    cyclicity_verdict,
    default_depth,
    inner_outer_factorize,
    wandering_vector,
)

EXIT_OK, EXIT_INPUT, EXIT_OVERFLOW, EXIT_RESIDUAL, EXIT_DOUBLY, EXIT_VERIFY = 0, 2, 3, 4, 5, 6

ENV_PREFIX = "SLICELAB_"


class InputError(Exception):
    pass


@dataclass(frozen=True)
class Config:
    max_degree: int = 256
    tol: float = 1e-8
    grid_t: int = 128
    grid_sphere: int = 256
    depth: int | None = None
    seed: int = 0

    def validate(self) -> Config:
        for name in ("max_degree", "grid_t", "grid_sphere"):
            if getattr(self, name) <= 0:
                raise InputError(f"{name} must be positive")
        if self.depth is not None and self.depth <= 0:
            raise InputError("depth must be positive")
        if self.seed < 0:
            raise InputError("seed must be non-negative")
        if not 0.0 < self.tol < 1e-2:
            raise InputError("tol must lie in (0, 1e-2)")
        return self


def _env(name, cast):
    raw = os.environ.get(ENV_PREFIX + name.upper())
    if raw is None or raw == "":
        return None
    try:
        return cast(raw)
    except ValueError as exc:
        raise InputError(f"bad value for {ENV_PREFIX}{name.upper()}: {raw!r}") from exc


def resolve_config(args) -> Config:
    """Flags win over environment variables, which win over defaults."""
    vals = {}
    for name, cast in (("max_degree", int), ("tol", float), ("grid_t", int),
                       ("grid_sphere", int), ("depth", int), ("seed", int)):
        flag = getattr(args, name, None)
        vals[name] = flag if flag is not None else _env(name, cast)
    return Config(**{k: v for k, v in vals.items() if v is not None}).validate()


# -- io ------------------------------------------------------------------------

def read_json(path):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def read_series(path) -> SliceLaurentSeries:
    try:
        return SliceLaurentSeries.from_dict(read_json(path))
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc


def write_json(obj, path):
    text = json.dumps(obj) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _hardy(f: SliceLaurentSeries, what: str = "input"):
    if not f.is_hardy():
        raise InputError(f"{what} is not in H^2: coefficients at negative indices")


# -- commands ------------------------------------------------------------------

def cmd_star(args, cfg):
    write_json(star(read_series(args.f), read_series(args.g), cfg.max_degree).to_dict(), args.out)
    return EXIT_OK


def cmd_conj(args, cfg):
    write_json(conjugate(read_series(args.f)).to_dict(), args.out)
    return EXIT_OK


def cmd_sym(args, cfg):
    write_json(symmetrize(read_series(args.f), cfg.max_degree).to_dict(), args.out)
    return EXIT_OK


def cmd_inv(args, cfg):
    f = read_series(args.f)
    span = f.nonzero_support(1e-12)
    if span is None:
        raise InputError("cannot invert the zero series")
    lo = -span[0]
    hi = lo + args.terms - 1
    write_json(star_inverse(f, (lo, hi), cfg.max_degree).to_dict(), args.out)
    return EXIT_OK


def cmd_eval(args, cfg):
    f = read_series(args.f)
    q = Quaternion(*args.point)
    write_json(evaluate(f, q).to_json(), args.out)
    return EXIT_OK


def _idem_report(f, cfg):
    grid = make_grid(cfg.grid_t, cfg.grid_sphere)
    res = verify_idempotent(f, grid, max_degree=None)
    return {
        "residual": res,
        "grid": [cfg.grid_t, cfg.grid_sphere],
        "alias_period": grid.alias_period,
        "self_tilde_conjugate": is_self_tilde_conjugate(f, period=grid.alias_period),
        "passed": res < cfg.tol,
    }


def cmd_idem_verify(args, cfg):
    report = _idem_report(read_series(args.f), cfg)
    write_json(report, args.out)
    return EXIT_OK if report["passed"] else EXIT_RESIDUAL


def cmd_idem_build(args, cfg):
    if args.example is not None:
        spec = suites.IDEMPOTENT_EXAMPLES[args.example]()
    elif args.spec is not None:
        try:
            spec = IdempotentSpec.from_dict(read_json(args.spec))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad idempotent spec: {exc}") from exc
    else:
        raise InputError("give a spec file or --example")
    f = build_idempotent(spec, cfg.grid_t)
    fit = fit_residual(f, spec, make_grid(cfg.grid_t, cfg.grid_sphere))
    write_json(f.to_dict(), args.out)
    if fit >= cfg.tol:
        print(f"spec is not reproduced on the sphere lattice (fit residual {fit:.3e})",
              file=sys.stderr)
        return EXIT_RESIDUAL
    return EXIT_OK


def cmd_factor(args, cfg):
    f = read_series(args.f)
    _hardy(f)
    try:
        report = inner_outer_factorize(f, depth=cfg.depth, max_degree=cfg.max_degree,
                                       tol=cfg.tol, grid=make_grid(cfg.grid_t, cfg.grid_sphere))
    except FactorizationResidual as exc:
        if exc.report is not None:
            write_json(exc.report.to_dict(), args.out)
        raise
    write_json(report.to_dict(), args.out)
    return EXIT_OK


def cmd_wander(args, cfg):
    gens = [read_series(p) for p in args.f]
    for p, g in zip(args.f, gens):
        _hardy(g, p)
    depth = cfg.depth or max(default_depth(g, cfg.max_degree) for g in gens)
    write_json(wandering_vector(gens, depth).to_dict(), args.out)
    return EXIT_OK


def cmd_cyclic(args, cfg):
    g = read_series(args.f)
    _hardy(g)
    depth = cfg.depth or default_depth(g, cfg.max_degree)
    r = cyclicity_residual(g, depth)
    write_json({"residual": r, "depth": depth, "verdict": cyclicity_verdict(r)}, args.out)
    return EXIT_OK


def cmd_trace(args, cfg):
    f = read_series(args.f)
    grid = make_grid(cfg.grid_t, cfg.grid_sphere)
    if args.out is None or args.out == "-":
        write_trace_csv(f, grid, sys.stdout)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_trace_csv(f, grid, fh)
    return EXIT_OK


def cmd_verify(args, cfg):
    names = list(suites.SUITES) if args.suite == "all" else [args.suite]
    if any(n not in suites.SUITES for n in names):
        print(f"unknown suite {args.suite!r}; choose from: all, {', '.join(suites.SUITES)}",
              file=sys.stderr)
        return EXIT_INPUT
    ok = True
    for name in names:
        print(f"[{name}]")
        for row in suites.run_suite(name, seed=cfg.seed, quick=args.quick):
            print("  " + row.line())
            ok = ok and row.passed
    print("all checks passed" if ok else "some checks FAILED")
    return EXIT_OK if ok else EXIT_VERIFY


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    # shared options are accepted before or after the command name
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("configuration (flags override SLICELAB_* variables)")
    g.add_argument("--max-degree", dest="max_degree", type=int, default=argparse.SUPPRESS)
    g.add_argument("--tol", type=float, default=argparse.SUPPRESS)
    g.add_argument("--grid-t", dest="grid_t", type=int, default=argparse.SUPPRESS)
    g.add_argument("--grid-sphere", dest="grid_sphere", type=int, default=argparse.SUPPRESS)
    g.add_argument("--depth", type=int, default=argparse.SUPPRESS)
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    p = argparse.ArgumentParser(prog="slicelab", parents=[common], description=(
        "Slice functions on the quaternionic unit sphere: star products, "
        "idempotents, wandering vectors and inner-outer factorization."))
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_, files=1, out=True):
        sp = sub.add_parser(name, help=help_, parents=[common])
        if files == 1:
            sp.add_argument("f")
        elif files == 2:
            sp.add_argument("f")
            sp.add_argument("g")
        elif files == "+":
            sp.add_argument("f", nargs="+")
        if out:
            sp.add_argument("-o", "--out", default=None)
        sp.set_defaults(func=fn)
        return sp

    add("star", cmd_star, "star product of two series", files=2)
    add("conj", cmd_conj, "conjugate the coefficients")
    add("sym", cmd_sym, "symmetrization f^c * f")
    add("inv", cmd_inv, "truncated star-reciprocal").add_argument("--terms", type=int, default=128)
    add("eval", cmd_eval, "evaluate at a quaternion").add_argument(
        "--point", type=float, nargs=4, required=True, metavar=("W", "X", "Y", "Z"))
    add("idem-verify", cmd_idem_verify, "check f * f = f at grid resolution")
    b = add("idem-build", cmd_idem_build, "build an idempotent from a sphere-wise spec", files=0)
    b.add_argument("spec", nargs="?")
    b.add_argument("--example", choices=sorted(suites.IDEMPOTENT_EXAMPLES))
    f = add("factor", cmd_factor, "inner-outer factorization report")
    f.add_argument("--report", dest="out")
    add("wander", cmd_wander, "wandering vector of the shift span of the inputs", files="+")
    add("cyclic", cmd_cyclic, "cyclicity residual and verdict")
    add("trace", cmd_trace, "boundary values as CSV")
    v = sub.add_parser("verify", help="run property suites", parents=[common])
    v.add_argument("suite", help=f"all or one of: {', '.join(suites.SUITES)}")
    v.add_argument("--quick", action="store_true", help="reduced sample counts")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = resolve_config(args)
        return args.func(args, cfg)
    except SupportOverflow as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OVERFLOW
    except FactorizationResidual as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESIDUAL
    except DoublyInvariant as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOUBLY
    except (InputError, SliceLabError, ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
