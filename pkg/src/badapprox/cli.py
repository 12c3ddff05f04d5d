"""Batch command-line front end.

Subcommands: params | build | verify | cantor-check | export.
Runs are driven by a JSON config file plus flag overrides (flags win),
so every experiment leaves a reproducible record.  Exit codes:
0 ok, 2 constraint violation, 3 empty level, 4 enumeration budget,
5 verification failure.
"""

import argparse
import json
import sys
from fractions import Fraction

import mpmath

from . import io as tio
from .cantor import (
    CantorRecipe,
    check_condition,
    dimension_lower_bound,
    standard_schedule,
    zero_schedule,
)
from .errors import (
    BadApproxError,
    BudgetExceeded,
    ConditionViolated,
    ConstraintViolation,
    Degenerate,
    DiophantineConditionSuspect,
    EmptyLevel,
    InvariantViolation,
)
from .lines import coefficient_box, enumerate_class
from .numerics import mpf_str, to_mpf, workprec
from .params import (
    CurveSpec,
    ExponentPair,
    c_upper_bound,
    derive_line_params,
    derive_params,
    derive_rational_params,
    line_construction_params,
)
from .survivors import build_rational_case, build_survivors, verify_no_low_height
from .verify import dual_badness, quadratic_badness, sim_badness

EXIT_OK = 0
EXIT_CONSTRAINT = 2
EXIT_EMPTY = 3
EXIT_BUDGET = 4
EXIT_VERIFY = 5

CONFIG_DEFAULTS = {
    "mode": "build",
    "curve": {"kind": "parabola", "domain": ["1/2", "3/2"]},
    "i": "1/2",
    "j": "1/2",
    "R": 4,
    "depth": 5,
    "c": None,
    "offset": "0",
    "precision": 128,
    "eps_dioph": "1/10",
    "Q_check": 100000,
    "pair_cap": 20000000,
    "out": {"tree": "tree.json", "ledger": "ledger.csv",
            "summary": "summary.txt", "svg": None},
}


def _load_config(args):
    cfg = json.loads(json.dumps(CONFIG_DEFAULTS))  # deep copy
    if getattr(args, "config", None):
        with open(args.config) as fh:
            user = json.load(fh)
        for key, value in user.items():
            if key in ("curve", "out") and isinstance(value, dict):
                cfg[key].update(value)
            else:
                cfg[key] = value
    overrides = {
        "i": args.i, "j": args.j, "R": args.R,
        "depth": getattr(args, "depth", None),
        "c": getattr(args, "c", None),
        "offset": getattr(args, "offset", None),
        "precision": args.precision,
        "mode": getattr(args, "mode", None),
        "eps_dioph": getattr(args, "eps_dioph", None),
        "Q_check": getattr(args, "Q_check", None),
        "pair_cap": getattr(args, "pair_cap", None),
    }
    for key, value in overrides.items():
        if value is not None:
            cfg[key] = value
    if getattr(args, "curve", None):
        cfg["curve"]["kind"] = args.curve
    if getattr(args, "domain", None):
        cfg["curve"]["domain"] = args.domain
    if getattr(args, "alpha", None) is not None:
        cfg["curve"]["alpha"] = args.alpha
    if getattr(args, "beta", None) is not None:
        cfg["curve"]["beta"] = args.beta
    if getattr(args, "f_expr", None):
        cfg["curve"]["expr"] = args.f_expr
    for key in ("tree", "ledger", "summary", "svg"):
        value = getattr(args, key.replace("-", "_"), None)
        if value is not None:
            cfg["out"][key] = value
    return cfg


def _parse_alpha(spec, precision):
    """Slope from a decimal string or a sympy expression like (1+sqrt(5))/2."""
    with workprec(2 * precision):
        try:
            return mpmath.mpf(spec), str(spec)
        except (ValueError, TypeError):
            pass
        import sympy

        expr = sympy.sympify(spec)
        val = sympy.N(expr, int(precision * 0.61) + 10)
        return mpmath.mpf(str(val)), str(spec)


def _curve_from_config(cfg):
    cdef = cfg["curve"]
    kind = cdef.get("kind", "parabola")
    domain = tuple(Fraction(str(v)) for v in cdef.get("domain", ["1/2", "3/2"]))
    precision = int(cfg["precision"])
    if kind in ("parabola", CurveSpec.PARABOLA):
        C0 = Fraction(str(cdef["C0"])) if "C0" in cdef else None
        return CurveSpec.parabola(domain, C0=C0, precision=precision)
    if kind in ("line", CurveSpec.AFFINE):
        alpha, alpha_expr = _parse_alpha(str(cdef.get("alpha", "1")), precision)
        beta, _ = _parse_alpha(str(cdef.get("beta", "0")), precision)
        return CurveSpec.affine(alpha, beta, domain, precision=precision,
                                alpha_expr=alpha_expr)
    if kind in ("general", CurveSpec.GENERAL):
        return tio.general_curve_from_expr(
            cdef["expr"], domain,
            c0=Fraction(str(cdef["c0"])) if "c0" in cdef else None,
            C0=Fraction(str(cdef["C0"])) if "C0" in cdef else None,
            precision=precision)
    raise ConstraintViolation("curve kind in {parabola, line, general}", kind)


def _pair_from_config(cfg):
    return ExponentPair.make(Fraction(str(cfg["i"])), Fraction(str(cfg["j"])))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_params(args):
    cfg = _load_config(args)
    pair = _pair_from_config(cfg)
    precision = int(cfg["precision"])
    R = int(cfg["R"])
    curve = _curve_from_config(cfg)
    payload = {}
    if pair.i == 0 or pair.j == 0:
        # the (0,1) pair routes to the rational-case parameterization
        rp = derive_rational_params(curve, max(R, 4),
                                    c=cfg["c"], precision_bits=precision)
        payload = rp.describe()
        print("rational-case parameterization (exponent pair touches 0):")
    else:
        norm = pair.normalized()
        if cfg["mode"] == "line-mode":
            alpha, _ = _parse_alpha(str(cfg["curve"].get("alpha", "1")), precision)
            lp = derive_line_params(alpha, norm, R, Fraction(str(cfg["eps_dioph"])),
                                    int(cfg["Q_check"]), precision_bits=precision)
            params = line_construction_params(lp, norm, R, curve.C0,
                                              precision_bits=precision)
            payload = params.describe()
            payload.update(lp.describe())
        else:
            c_override = None if cfg["c"] is None else mpmath.mpf(str(cfg["c"]))
            params = derive_params(norm, R, curve.C0, c_override=c_override,
                                   precision_bits=precision)
            payload = params.describe()
            with workprec(precision):
                payload["c_bound"] = mpf_str(
                    c_upper_bound(norm, R, curve.C0, params.lam), precision)
        payload["pair_swapped"] = pair.normalized().swapped
    for key, value in sorted(payload.items()):
        print(f"{key} = {value}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)
            fh.write("\n")
    return EXIT_OK


def _build_tree(cfg):
    precision = int(cfg["precision"])
    curve = _curve_from_config(cfg)
    mode = cfg["mode"]
    depth = int(cfg["depth"])
    offset = mpmath.mpf(str(cfg["offset"]))
    pair_cap = int(cfg["pair_cap"])
    if mode == "rational-case":
        c = None if cfg["c"] is None else mpmath.mpf(str(cfg["c"]))
        return build_rational_case(curve, c, int(cfg["R"]), depth,
                                   j0_offset=offset, precision_bits=precision)
    pair = _pair_from_config(cfg).normalized()
    if mode == "line-mode":
        if curve.kind != CurveSpec.AFFINE:
            raise ConstraintViolation("line-mode curve", "line mode needs an affine curve")
        lp = derive_line_params(curve.alpha, pair, int(cfg["R"]),
                                Fraction(str(cfg["eps_dioph"])),
                                int(cfg["Q_check"]), beta=curve.beta,
                                precision_bits=precision)
        params = line_construction_params(lp, pair, int(cfg["R"]), curve.C0,
                                          precision_bits=precision)
        return build_survivors(curve, params, depth, j0_offset=offset,
                               line_params=lp, pair_cap=pair_cap)
    c_override = None if cfg["c"] is None else mpmath.mpf(str(cfg["c"]))
    params = derive_params(pair, int(cfg["R"]), curve.C0, c_override=c_override,
                           precision_bits=precision)
    return build_survivors(curve, params, depth, j0_offset=offset,
                           pair_cap=pair_cap)


def cmd_build(args):
    cfg = _load_config(args)
    tree = _build_tree(cfg)
    out = cfg["out"]
    if out.get("tree"):
        tio.write_tree(tree, out["tree"])
    if out.get("ledger"):
        tio.write_ledger_csv(tree, out["ledger"])
    if out.get("summary"):
        tio.write_summary(tree, out["summary"])
    if out.get("svg"):
        tio.write_svg(tree, out["svg"])
    sys.stdout.write(tio.summary_text(tree))
    return EXIT_OK


def cmd_verify(args):
    tree = tio.load_tree(args.tree)
    for n in range(1, tree.depth() + 1):
        result = verify_no_low_height(tree, n)
        if not result:
            print(f"level {n}: VIOLATION {json.dumps(result.witness, sort_keys=True)}")
            return EXIT_VERIFY
        print(f"level {n}: ok ({len(tree.trace.levels[n])} intervals)")
    if args.point is not None:
        with workprec(tree.params.precision_bits):
            x = mpmath.mpf(args.point)
        reports = _point_reports(tree, x)
        for rep in reports:
            print(json.dumps(rep.to_jsonable(), sort_keys=True))
        if args.json:
            with open(args.json, "w") as fh:
                json.dump([r.to_jsonable() for r in reports], fh,
                          indent=1, sort_keys=True)
                fh.write("\n")
    return EXIT_OK


def _point_reports(tree, x):
    depth = tree.depth()
    precision = tree.params.precision_bits
    with workprec(precision):
        y = tree.curve.f(x)
    if tree.mode == "rational":
        R = tree.params.R
        Q = math_isqrt(R ** max(depth - 1, 1))
        return [sim_badness(x, y, ExponentPair.make(0, 1), max(Q, 10),
                            precision_bits=precision)]
    params = tree.params
    n_box = max(depth - 1, 1)
    box = coefficient_box(params, n_box)
    reports = [
        dual_badness(x, y, params.pair, max(box.Amax, 1), max(box.Bmax, 1),
                     precision_bits=precision),
        sim_badness(x, y, params.pair, params.R ** n_box, precision_bits=precision),
    ]
    if tree.curve.kind == CurveSpec.PARABOLA:
        reports.append(quadratic_badness(x, max(box.Amax, 1),
                                         precision_bits=precision))
    return reports


def math_isqrt(n):
    import math

    return math.isqrt(n)


def cmd_cantor_check(args):
    precision = int(args.precision or 128)
    R = int(args.R)
    if args.schedule == "zero":
        schedule = zero_schedule()
    else:
        schedule = standard_schedule(R, Fraction(str(args.eps)), int(args.n0),
                                     d=int(args.d), precision=precision)
    recipe = CantorRecipe.constant((0, 1), R, schedule, precision=precision)
    flags = check_condition(recipe, int(args.horizon))
    for n, ok in enumerate(flags):
        print(f"n={n}: {'ok' if ok else 'FAIL'}")
    if all(flags):
        bound = dimension_lower_bound(recipe, int(args.horizon))
        print(f"dimension lower bound (finite horizon): {bound}")
        return EXIT_OK
    print("budget condition fails; no dimension bound")
    return EXIT_CONSTRAINT


def cmd_export(args):
    tree = tio.load_tree(args.tree)
    wrote = False
    if args.ledger:
        tio.write_ledger_csv(tree, args.ledger)
        wrote = True
    if args.svg:
        tio.write_svg(tree, args.svg)
        wrote = True
    if args.summary:
        tio.write_summary(tree, args.summary)
        wrote = True
    if not wrote:
        sys.stdout.write(tio.summary_text(tree))
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------


def _add_common(p):
    p.add_argument("--config", help="JSON config file; flags override its keys")
    p.add_argument("--i", help="first exponent (rational, e.g. 1/2 or 0.5)")
    p.add_argument("--j", help="second exponent")
    p.add_argument("--R", type=int, help="splitting factor")
    p.add_argument("--precision", type=int, help="working precision in bits")
    p.add_argument("--curve", choices=["parabola", "line", "general"])
    p.add_argument("--domain", nargs=2, metavar=("LO", "HI"))
    p.add_argument("--alpha", help="line slope (decimal or expression)")
    p.add_argument("--beta", help="line intercept")
    p.add_argument("--f-expr", help="general curve expression in x")
    p.add_argument("--c", help="override for the removal constant c")
    p.add_argument("--mode", choices=["build", "rational-case", "line-mode"])
    p.add_argument("--eps-dioph", dest="eps_dioph",
                   help="epsilon in the slope Diophantine condition")
    p.add_argument("--Q-check", dest="Q_check", type=int,
                   help="finite range for the slope quality estimate")
    p.add_argument("--pair-cap", dest="pair_cap", type=int,
                   help="enumeration budget on coefficient pairs")


def build_parser():
    ap = argparse.ArgumentParser(prog="badapprox", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="derive and print construction constants")
    _add_common(p)
    p.add_argument("--json", help="also dump the constants as JSON")
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("build", help="run a construction and write artifacts")
    _add_common(p)
    p.add_argument("--depth", type=int)
    p.add_argument("--offset", help="offset of the base interval from the left end")
    p.add_argument("--tree", help="tree JSON output path")
    p.add_argument("--ledger", help="ledger CSV output path")
    p.add_argument("--summary", help="summary text output path")
    p.add_argument("--svg", help="optional SVG rendering path")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="re-check a tree file, optionally a point")
    p.add_argument("--tree", required=True)
    p.add_argument("--point", help="x coordinate to certify")
    p.add_argument("--json", help="write the point reports as JSON")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("cantor-check", help="budget condition and dimension bound")
    p.add_argument("--R", required=True, type=int)
    p.add_argument("--eps", default="1/128")
    p.add_argument("--n0", default=1, type=int)
    p.add_argument("--d", default=1, type=int)
    p.add_argument("--horizon", default=50, type=int)
    p.add_argument("--schedule", choices=["standard", "zero"], default="standard")
    p.add_argument("--precision", type=int)
    p.set_defaults(func=cmd_cantor_check)

    p = sub.add_parser("export", help="derive CSV/SVG/summary from a tree file")
    p.add_argument("--tree", required=True)
    p.add_argument("--ledger")
    p.add_argument("--svg")
    p.add_argument("--summary")
    p.set_defaults(func=cmd_export)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ConstraintViolation, DiophantineConditionSuspect, Degenerate) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONSTRAINT
    except EmptyLevel as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InvariantViolation, ConditionViolated) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except BadApproxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONSTRAINT


if __name__ == "__main__":
    sys.exit(main())
