"""Command-line front end.

Every report is assembled in full before anything is written, so a failure
never leaves partial output.  Exit codes: 0 ok, 2 validation, 3 numeric
failure, 4 solver failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import Any, Sequence

import mpmath
import numpy as np

from . import characters as ch
from . import kappacoeffs as kc
from . import localconst as lc
from . import shiftframe as sf
from . import weights as wt
from . import zeros as zr
from .errors import NumericError, SolverError, ValidationError
from .lfunc import PrecisionConfig, dirichlet_l, evaluate_w, fe_residual, w_value

SCHEMA_VERSION = 1
EXIT_OK, EXIT_VALIDATION, EXIT_NUMERIC, EXIT_SOLVER = 0, 2, 3, 4


@dataclass(frozen=True)
class RunConfig:
    command: tuple[str, ...]
    args: argparse.Namespace
    prec_bits: int
    fmt: str
    threads: int
    seed: int


def _num(x: Any, prec: int) -> Any:
    """JSON-safe value: high-precision and float numbers become decimal strings."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, mpmath.mpc):
        return {"re": _num(x.real, prec), "im": _num(x.imag, prec)}
    if isinstance(x, mpmath.mpf):
        return mpmath.nstr(x, max(17, int(prec * math.log10(2))), strip_zeros=False, min_fixed=-1, max_fixed=1) \
            if mpmath.isfinite(x) else str(x)
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, dict):
        return {k: _num(v, prec) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_num(v, prec) for v in x]
    return str(x)


def _rows_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: (json.dumps(v) if isinstance(v, (dict, list)) else v) for k, v in r.items()})
    return buf.getvalue()


def _cfg(rc: RunConfig) -> PrecisionConfig:
    return PrecisionConfig(prec=rc.prec_bits)


def _char(q: int, idx: int) -> ch.DirichletCharacter:
    if q < 1:
        raise ValidationError("q must be positive")
    return ch.character(q, idx)


def _q_range(a: argparse.Namespace) -> range:
    if a.q is not None and (a.q_min is not None or a.q_max is not None):
        raise ValidationError("--q conflicts with --q-min/--q-max")
    if a.q is not None:
        return range(a.q, a.q + 1)
    if a.q_min is None or a.q_max is None:
        raise ValidationError("give --q or both --q-min and --q-max")
    if not 1 <= a.q_min <= a.q_max:
        raise ValidationError("need 1 <= q-min <= q-max")
    return range(a.q_min, a.q_max + 1)


# command handlers return (record, rows-for-csv or None)

def cmd_characters(rc: RunConfig):
    a = rc.args
    rows = []
    for q in _q_range(a):
        for i, chi in enumerate(ch.enumerate_characters(q)):
            if a.primitive and not chi.is_primitive:
                continue
            if a.even and not chi.is_even:
                continue
            G = ch.gauss_sum(chi, rc.prec_bits)
            rows.append({"modulus": q, "index": i, "label": chi.label(), "conductor": chi.conductor,
                         "parity": "even" if chi.is_even else "odd", "primitive": chi.is_primitive,
                         "order": chi.order, "gauss_norm_residual": G.norm_residual})
    return {"count": len(rows), "characters": rows}, rows


def cmd_lfunc(rc: RunConfig):
    a = rc.args
    chi = _char(a.q, a.chi_index)
    cfg = _cfg(rc)
    if a.t is not None:
        cv = evaluate_w(a.t, chi, cfg)
        rec = {"q": a.q, "chi_index": a.chi_index, "t": a.t, "W": w_value(a.t, chi, cfg),
               "imag_residual": abs(cv.value.imag), "error_estimate": cv.error}
        s = mpmath.mpc(0.5, a.t)
    else:
        try:
            re, im = (float(x) for x in a.s.split(","))
        except ValueError as e:
            raise ValidationError("--s expects 're,im'") from e
        s = mpmath.mpc(re, im)
        rec = {"q": a.q, "chi_index": a.chi_index, "s": s, "L": dirichlet_l(s, chi, cfg)}
    if chi.is_primitive and chi.is_even:
        rec["fe_residual"] = fe_residual(s, chi, cfg)
    return rec, None


def cmd_zeros(rc: RunConfig):
    a = rc.args
    cfg = _cfg(rc)
    if a.action == "count-check":
        chi = _char(a.q, a.chi_index)
        r = zr.count_vs_formula(chi, a.T, cfg, a.step, rc.threads)
        env = 8 * math.log(max(a.q, 1) * a.T)
        return {"q": a.q, "chi_index": a.chi_index, "T": a.T, "empirical": r.empirical,
                "predicted": r.predicted, "residual": r.residual, "envelope": env,
                "within_envelope": abs(r.residual) <= env}, None
    if a.action == "scan":
        chi = _char(a.q, a.chi_index)
        z = zr.scan_zeros(chi, a.t_min, a.t_max, a.step, cfg, workers=rc.threads)
        rows = []
        scale = math.log(a.q) / (2 * math.pi) if a.q > 1 else float("nan")
        for i, t in enumerate(z.ordinates):
            gap = t - z.ordinates[i - 1] if i else float("nan")
            rows.append({"ordinate": t, "gap": gap, "normalized_gap": gap * scale})
        return {"q": a.q, "chi_index": a.chi_index, "t_min": a.t_min, "t_max": a.t_max,
                "count": len(z), "zeros": rows}, rows
    # gaps: every even primitive character in the q-range
    rows = []
    for q in _q_range(a):
        if q < 2:
            continue
        for i, chi in enumerate(ch.enumerate_characters(q)):
            if not (chi.is_primitive and chi.is_even):
                continue
            z = zr.scan_zeros(chi, a.t_min, a.t_max, a.step, cfg, workers=rc.threads)
            if len(z) < 2:
                continue
            g = zr.gap_report(z, q)
            rows.append({"q": q, "chi_index": i, "zeros": len(z), "max_normalized_gap": g.max_normalized,
                         "min_normalized_gap": g.min_normalized})
    best = max(rows, key=lambda r: r["max_normalized_gap"], default=None)
    return {"t_min": a.t_min, "t_max": a.t_max, "characters": rows, "largest": best}, rows


def cmd_oracle(rc: RunConfig):
    a = rc.args
    if a.which == "c0":
        dirs = None
    elif a.case is not None:
        if a.i is not None or a.j is not None:
            raise ValidationError("--case conflicts with --i/--j")
        if a.case not in sf.CASE_DIRECTIONS:
            raise ValidationError("--case must be 1..9")
        dirs = sf.CASE_DIRECTIONS[a.case]
    elif a.i is not None and a.j is not None:
        dirs = (a.i, a.j)
    else:
        raise ValidationError("give --case or both --i and --j")
    res = sf.r_sum_series(a.kappa, a.order, rc.prec_bits, dirs)
    value = sf._checked(res, rc.prec_bits)
    table = [{"k": k, "coefficient": res.series[k]} for k in range(res.series.val, a.order + 1)]
    rec = {"kappa": a.kappa, "order": a.order, "directions": list(dirs) if dirs else None, "value": value,
           "principal_residual": res.principal_residual, "imag_residual": res.imag_residual,
           "coefficients": table}
    return rec, table


def cmd_coeffs(rc: RunConfig):
    a = rc.args
    if a.action == "eval":
        d = kc.macl_detail(kc.c_closed(a.which), a.kappa, rc.prec_bits)
        return {"which": a.which, "kappa": a.kappa, "value": d.value, "regime": d.regime,
                "tail_bound": d.tail_bound}, None
    s = kc.solve_kappa(a.tol, prec=rc.prec_bits)
    return {"tol": a.tol, "kappa_star": s.kappa_star, "ratio_to_2pi": s.ratio_to_2pi, "gap_multiplier": s.gap_multiplier,
            "bracket": list(s.bracket), "trace": [list(t) for t in s.trace]}, None


def cmd_constants(rc: RunConfig):
    a = rc.args
    if a.which in ("a3", "a3l"):
        est = (lc.a3 if a.which == "a3" else lc.a3_L)(a.prime_limit, rc.prec_bits)
        return {"model": est.model, "prime_limit": est.P, "value": est.value, "tail_bound": est.tail_bound}, None
    fit = lc.slope_fit(a.x_max)
    a3v = lc.a3(a.x_max, rc.prec_bits).value
    a3l = lc.a3_L(a.x_max, rc.prec_bits).value
    ratio = a3l / a3v
    return {"x_max": a.x_max, "slope": fit.slope, "intercept": fit.intercept,
            "max_abs_residual": float(np.abs(fit.residuals).max()), "euler_ratio": ratio,
            "slope_rel_diff": abs(fit.slope - float(ratio)) / float(ratio), "h2_over_t": fit.h2_over_t,
            "h2_rel_diff": abs(fit.h2_over_t - float(ratio) / 2) / (float(ratio) / 2)}, None


def cmd_weights(rc: RunConfig):
    a = rc.args
    p = wt.WeightParams(a.u, a.eps, a.T)
    checks = wt.sandwich_checks(p, a.samples, rc.seed)
    rows = [{"inequality": c.name, "ok": c.ok, "worst_margin": c.worst_margin, "samples": c.samples}
            for c in checks]
    erfc = [wt.erfc_bound_check(x) for x in (0.0, 0.5, 1.0, 2.0, 3.0, 5.0)]
    for e in erfc:
        rows.append({"inequality": f"erfc({e.x}) <= exp(-x^2)", "ok": e.ok,
                     "worst_margin": e.bound - e.erfc, "samples": 1})
    r = wt.reasonableness(p)
    return {"u": p.u, "eps": p.eps, "T": p.T, "seed": rc.seed, "checks": rows,
            "all_ok": all(x["ok"] for x in rows), "N1": r.N1, "N2": r.N2, "log_N3": r.log_N3}, rows


HANDLERS = {"characters": cmd_characters, "lfunc": cmd_lfunc, "zeros": cmd_zeros, "oracle": cmd_oracle,
            "coeffs": cmd_coeffs, "constants": cmd_constants, "weights": cmd_weights}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prec-bits", type=int, default=None, help="working precision (default 128, oracle 256)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--seed", type=int, default=0)

    p = argparse.ArgumentParser(prog="dirgaps", description="Zero gaps of Dirichlet L-functions: numerics.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("characters", parents=[common])
    c.add_argument("--q", type=int)
    c.add_argument("--q-min", type=int)
    c.add_argument("--q-max", type=int)
    c.add_argument("--primitive", action="store_true")
    c.add_argument("--even", action="store_true")

    lf = sub.add_parser("lfunc").add_subparsers(dest="action", required=True).add_parser("eval", parents=[common])
    lf.add_argument("--q", type=int, required=True)
    lf.add_argument("--chi-index", type=int, required=True)
    pt = lf.add_mutually_exclusive_group(required=True)
    pt.add_argument("--s", help="complex point as 're,im'")
    pt.add_argument("--t", type=float)

    z = sub.add_parser("zeros").add_subparsers(dest="action", required=True)
    for name in ("scan", "gaps", "count-check"):
        zp = z.add_parser(name, parents=[common])
        zp.add_argument("--q", type=int, required=name != "gaps")
        zp.add_argument("--chi-index", type=int, default=0)
        zp.add_argument("--step", type=float)
        if name == "count-check":
            zp.add_argument("--T", type=float, required=True)
        else:
            zp.add_argument("--t-min", type=float, default=0.0)
            zp.add_argument("--t-max", type=float, required=True)
        if name == "gaps":
            zp.add_argument("--q-min", type=int)
            zp.add_argument("--q-max", type=int)

    o = sub.add_parser("oracle").add_subparsers(dest="which", required=True)
    for name in ("c0", "ci"):
        op = o.add_parser(name, parents=[common])
        op.add_argument("--kappa", type=float, required=True)
        op.add_argument("--order", type=int, default=sf.DEFAULT_ORDER)
        if name == "ci":
            op.add_argument("--i", type=int)
            op.add_argument("--j", type=int)
            op.add_argument("--case", type=int)

    k = sub.add_parser("coeffs").add_subparsers(dest="action", required=True)
    ke = k.add_parser("eval", parents=[common])
    ke.add_argument("--which", type=int, choices=(0, 1, 2, 4, 6), required=True)
    ke.add_argument("--kappa", type=float, required=True)
    ks = k.add_parser("solve", parents=[common])
    ks.add_argument("--tol", type=float, default=1e-12)

    cs = sub.add_parser("constants").add_subparsers(dest="which", required=True)
    for name in ("a3", "a3l"):
        cp = cs.add_parser(name, parents=[common])
        cp.add_argument("--prime-limit", type=int, default=10**6)
    cp = cs.add_parser("slope", parents=[common])
    cp.add_argument("--x-max", type=int, default=10**6)

    w = sub.add_parser("weights").add_subparsers(dest="action", required=True).add_parser("check", parents=[common])
    w.add_argument("--u", type=float, default=0.01)
    w.add_argument("--eps", type=float)
    w.add_argument("--T", type=float, default=10.0)
    w.add_argument("--samples", type=int, default=10_000)
    return p


def render(rc: RunConfig, record: dict, rows: list[dict] | None) -> str:
    rec = _num(record, rc.prec_bits)
    if rc.fmt == "csv":
        table = _num(rows, rc.prec_bits) if rows is not None else [
            {k: v for k, v in rec.items() if not isinstance(v, (list, dict))}]
        return _rows_csv(table)
    out = {"schema_version": SCHEMA_VERSION, "command": " ".join(rc.command), "result": rec}
    return json.dumps(out, indent=2) + "\n"


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    command = tuple(x for x in (args.command, getattr(args, "action", None), getattr(args, "which", None))
                    if isinstance(x, str))
    prec = args.prec_bits or (sf.DEFAULT_PREC if args.command == "oracle" else 128)
    rc = RunConfig(command, args, prec, args.format, args.threads, args.seed)
    try:
        if rc.prec_bits < 32:
            raise ValidationError("--prec-bits must be at least 32")
        if rc.threads < 1:
            raise ValidationError("--threads must be positive")
        record, rows = HANDLERS[args.command](rc)
        text = render(rc, record, rows)
    except ValidationError as e:
        print(f"error: {e}", file=stderr)
        return EXIT_VALIDATION
    except SolverError as e:
        print(f"solver failure: {e}", file=stderr)
        return EXIT_SOLVER
    except NumericError as e:
        print(f"numeric failure: {e}", file=stderr)
        return EXIT_NUMERIC
    stdout.write(text)
    return EXIT_OK


def main() -> None:
    sys.exit(run())
