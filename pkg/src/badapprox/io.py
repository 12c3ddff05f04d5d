"""Serialization: tree JSON, ledger CSV, summary text, SVG rendering.

Tree files are self-contained: they embed the curve description and every
derived constant (as full-precision decimal strings), so a tree can be
reloaded and re-verified without the original invocation.  Payloads carry
no timestamps; identical runs serialize byte-identically.
"""

import csv
import json
from fractions import Fraction

import mpmath

from .cantor import ConstructionTrace, RemovalSchedule, standard_schedule
from .errors import ConstraintViolation
from .lines import Line
from .numerics import mpf_str, to_mpf, workprec
from .params import (
    ConstructionParams,
    CurveSpec,
    ExponentPair,
    LineModeParams,
    RationalCaseParams,
)
from .survivors import RemovalLedgerEntry, SurvivorTree, ledger_report

SCHEMA = "badapprox-tree/1"


# ---------------------------------------------------------------------------
# curves
# ---------------------------------------------------------------------------


def curve_to_dict(curve):
    out = {
        "kind": curve.kind,
        "domain": [str(curve.domain[0]), str(curve.domain[1])],
        "c0": str(curve.c0),
        "C0": str(curve.C0),
        "precision": curve.precision,
    }
    if curve.kind == CurveSpec.AFFINE:
        out["alpha"] = mpf_str(curve.alpha, curve.precision * 2)
        out["beta"] = mpf_str(curve.beta, curve.precision * 2)
        if curve.expr:
            out["alpha_expr"] = curve.expr
    elif curve.kind == CurveSpec.GENERAL:
        if not curve.expr:
            raise ConstraintViolation("serializable curve",
                                      "general curves need an expression")
        out["expr"] = curve.expr
    return out


def general_curve_from_expr(expr, domain, c0=None, C0=None, precision=128):
    """Build a general curve from a sympy expression in x."""
    import sympy

    x = sympy.Symbol("x")
    fe = sympy.sympify(expr)
    f = sympy.lambdify(x, fe, modules="mpmath")
    fp = sympy.lambdify(x, sympy.diff(fe, x), modules="mpmath")
    fpp = sympy.lambdify(x, sympy.diff(fe, x, 2), modules="mpmath")
    return CurveSpec.general(f, fp, fpp, domain, c0=c0, C0=C0, expr=expr,
                             precision=precision)


def curve_from_dict(d):
    kind = d["kind"]
    domain = (Fraction(d["domain"][0]), Fraction(d["domain"][1]))
    precision = int(d.get("precision", 128))
    if kind == CurveSpec.PARABOLA:
        return CurveSpec.parabola(domain, C0=Fraction(d["C0"]), precision=precision)
    if kind == CurveSpec.AFFINE:
        with workprec(2 * precision):
            alpha = mpmath.mpf(d["alpha"])
            beta = mpmath.mpf(d["beta"])
        return CurveSpec.affine(alpha, beta, domain, C0=Fraction(d["C0"]),
                                precision=precision, alpha_expr=d.get("alpha_expr"))
    if kind == CurveSpec.GENERAL:
        return general_curve_from_expr(d["expr"], domain, c0=Fraction(d["c0"]),
                                       C0=Fraction(d["C0"]), precision=precision)
    raise ConstraintViolation("known curve kind", kind)


# ---------------------------------------------------------------------------
# params
# ---------------------------------------------------------------------------


def params_to_dict(params):
    if isinstance(params, RationalCaseParams):
        return params.describe()
    d = params.describe()
    d["mode"] = "construction"
    return d


def params_from_dict(d):
    precision = int(d["precision_bits"])
    if d.get("mode") == "rational-case":
        with workprec(precision):
            return RationalCaseParams(
                R=int(d["R"]), c=mpmath.mpf(d["c"]), c1=mpmath.mpf(d["c1"]),
                c0=Fraction(d["c0"]), C0=Fraction(d["C0"]),
                precision_bits=precision)
    pair = ExponentPair.make(Fraction(d["i"]), Fraction(d["j"]))
    with workprec(precision):
        return ConstructionParams(
            pair=pair, R=int(d["R"]), lam=int(d["lambda"]),
            omega=Fraction(d["omega"]), epsilon=Fraction(d["epsilon"]),
            c=mpmath.mpf(d["c"]), c1=mpmath.mpf(d["c1"]), n0=int(d["n0"]),
            K=mpmath.mpf(d["K"]), C0=Fraction(d["C0"]),
            precision_bits=precision)


def line_params_to_dict(lp):
    return lp.describe() if lp is not None else None


def line_params_from_dict(d):
    if d is None:
        return None
    with workprec(256):
        return LineModeParams(
            alpha=mpmath.mpf(d["alpha"]), beta=mpmath.mpf(d["beta"]),
            sigma=Fraction(d["sigma"]), eps_dioph=Fraction(d["eps_dioph"]),
            tau=mpmath.mpf(d["tau_estimate"]), tau_argmin=int(d["tau_argmin_q"]),
            lambda_line=int(d["lambda_line"]), Q_check=int(d["Q_check"]))


# ---------------------------------------------------------------------------
# trees
# ---------------------------------------------------------------------------


def tree_to_jsonable(tree):
    trace = tree.trace
    out = {
        "schema": SCHEMA,
        "mode": tree.mode,
        "curve": curve_to_dict(tree.curve),
        "params": params_to_dict(tree.params),
        "line_params": line_params_to_dict(tree.line_params),
        "j0_offset": mpf_str(to_mpf(tree.j0_offset)),
        "trace": trace.to_jsonable(),
        "level_indices": [list(lv) for lv in trace.levels],
        "ledger": [e.to_jsonable(trace) for e in tree.ledger],
        "report": ledger_report(tree),
    }
    if tree.mode == "rational":
        out["rational_checks"] = tree.rational_checks
    return out


def write_tree(tree, path):
    with open(path, "w") as fh:
        json.dump(tree_to_jsonable(tree), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_tree(path):
    with open(path) as fh:
        d = json.load(fh)
    if d.get("schema") != SCHEMA:
        raise ConstraintViolation("schema", f"unknown tree schema {d.get('schema')}")
    curve = curve_from_dict(d["curve"])
    params = params_from_dict(d["params"])
    line_params = line_params_from_dict(d.get("line_params"))
    precision = params.precision_bits
    mode = d["mode"]
    with workprec(precision):
        base_lo = mpmath.mpf(d["trace"]["base"]["lo"])
        base_len = mpmath.mpf(d["trace"]["base"]["len"])
        j0_offset = mpmath.mpf(d["j0_offset"])
    trace = ConstructionTrace(base_lo=base_lo, base_len=base_len,
                              R_used=[int(r) for r in d["trace"]["R"]],
                              levels=[list(map(int, lv)) for lv in d["level_indices"]],
                              warnings=list(d["trace"].get("warnings", [])),
                              precision=precision)
    for row in d["trace"].get("removal_counts", []):
        trace.removal_counts[(row["k"], row["n"])] = row["count"]
        trace.budgets[(row["k"], row["n"])] = row["budget"]
    ledger = []
    for e in d.get("ledger", []):
        ledger.append(RemovalLedgerEntry(
            n_child=int(e["n_child"]), m_ancestor=int(e["m_ancestor"]),
            line=Line(*[int(v) for v in e["line"]]),
            child_index=int(e["child_index"]),
            group=e["group"], label=None))
    if mode == "rational":
        schedule = RemovalSchedule(lambda m, n: 3 if m == n else 0, name="rational(3)")
    else:
        schedule = standard_schedule(params.R, params.epsilon, params.n0, d=1,
                                     precision=precision)
    tree = SurvivorTree(params=params, curve=curve, trace=trace, ledger=ledger,
                        schedule=schedule, mode=mode, j0_offset=j0_offset,
                        line_params=line_params,
                        rational_checks=d.get("rational_checks", []))
    return tree


# ---------------------------------------------------------------------------
# ledger CSV / summary / SVG
# ---------------------------------------------------------------------------

CSV_COLUMNS = ["m", "n", "class", "empirical_max", "budget", "flag"]


def write_ledger_csv(tree, path):
    rows = ledger_report(tree)
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        w.writeheader()
        for row in rows:
            w.writerow({k: row[k] for k in CSV_COLUMNS})


def summary_text(tree):
    trace = tree.trace
    lines = [
        f"mode: {tree.mode}",
        f"curve: {tree.curve.kind} on {tree.curve.domain}",
        f"depth: {trace.depth()}",
        "level sizes: " + " ".join(str(len(lv)) for lv in trace.levels),
        f"removals: {len(tree.ledger)}",
        f"schedule warnings: {len(trace.warnings)}",
    ]
    for key, value in sorted(params_to_dict(tree.params).items()):
        lines.append(f"param {key}: {value}")
    if tree.mode == "rational":
        worst_rm = max((c["max_removed_per_parent"] for c in tree.rational_checks),
                       default=0)
        worst_nb = max((c["max_neighborhoods_per_parent"] for c in tree.rational_checks),
                       default=0)
        lines.append(f"rational-case max removals per parent: {worst_rm} (cap 3)")
        lines.append(f"rational-case max neighborhoods per parent: {worst_nb} (cap 1)")
    for w in trace.warnings:
        lines.append("warning: " + w)
    return "\n".join(lines) + "\n"


def write_summary(tree, path):
    with open(path, "w") as fh:
        fh.write(summary_text(tree))


def write_svg(tree, path, width=900, row_height=16, pad=4):
    """One row of rectangles per level, in base-interval coordinates."""
    trace = tree.trace
    n_levels = len(trace.levels)
    height = n_levels * (row_height + pad) + pad
    with workprec(trace.precision):
        base_lo = to_mpf(trace.base_lo)
        base_len = to_mpf(trace.base_len)
        parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
            f'height="{height}" viewBox="0 0 {width} {height}">',
            '<rect width="100%" height="100%" fill="white"/>',
        ]
        for n in range(n_levels):
            y = pad + n * (row_height + pad)
            for lo, hi in trace.intervals(n):
                x = float((lo - base_lo) / base_len) * width
                w = max(float((hi - lo) / base_len) * width, 0.5)
                parts.append(
                    f'<rect x="{x:.3f}" y="{y}" width="{w:.3f}" '
                    f'height="{row_height}" fill="#33557a"/>')
        parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
