"""Command-line interface: deterministic JSON/CSV reports.

Every subcommand emits one JSON document {"spec", "results", "violations",
"version"} where "spec" echoes the parsed configuration; any detected
invariant violation lands in "violations" and flips the exit code to 1.
Usage problems (bad flags, malformed spec files, unknown keys) exit with 2.
Floats in CSV output carry 17 significant digits; files are UTF-8 with LF
line endings, so repeated runs are byte-identical.
"""

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .assembly import GlobalSpec, conductors, d3_status, d4_toy, default_case
from .characters import (MultChar, canonical_psi, enumerate_chars, gauss_sum,
                         trivial_char)
from .charsum import SCAN_FLAG_THRESHOLD, scan
from .errors import MomentkitError, UsageError
from .field import make_field, odd_prime_powers, quad_ext
from .hypergeom import HyperSpec, classify_exceptional, hyper_all_t, hyper_sum
from .oracle import oracle_m4
from .padic import (VANISHES, Case1, Case2NS, Case2SC, Case3, LocalCharParam,
                    LocalFieldModel, _ADMISSIBLE_I, m4I_term, m4_closed)


# ---------------------------------------------------------------------------
# serialization helpers


def _fmt_float(x: float) -> str:
    return f"{x:.17g}"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.complexfloating, complex)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def _csv_cell(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (np.complexfloating, complex)):
        return f"{_fmt_float(float(v.real))}{float(v.imag):+.17g}j"
    if isinstance(v, (np.floating, float)):
        return _fmt_float(float(v))
    return str(v)


def _write_csv(path: str, rows: list[dict]):
    buf = io.StringIO()
    if rows:
        writer = csv.writer(buf, lineterminator="\n")
        header = list(rows[0].keys())
        writer.writerow(header)
        for row in rows:
            writer.writerow([_csv_cell(row.get(k, "")) for k in header])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


def _emit(args, spec_echo: dict, results: list, violations: list) -> int:
    doc = {
        "spec": _jsonable(spec_echo),
        "results": _jsonable(results),
        "violations": _jsonable(violations),
        "version": __version__,
    }
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if getattr(args, "json", None):
        with open(args.json, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if getattr(args, "csv", None):
        rows = [r for r in results if isinstance(r, dict)]
        _write_csv(args.csv, [_flatten(r) for r in rows])
    return 1 if violations else 0


def _flatten(row: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in row.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict) and set(v) == {"re", "im"}:
            out[key] = complex(v["re"], v["im"])
        elif isinstance(v, dict):
            out.update(_flatten(v, f"{key}."))
        elif isinstance(v, (list, tuple)):
            out[key] = ";".join(_csv_cell(x) for x in v)
        else:
            out[key] = v
    return out


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError as exc:
        raise UsageError(f"cannot parse complex number {text!r}") from exc


def _parse_spec(text: str) -> GlobalSpec:
    if text.startswith("@"):
        try:
            with open(text[1:], encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read spec file: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"spec is not valid JSON: {exc}") from exc
    return GlobalSpec.from_dict(data)


def _qlist(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad q list {text!r}") from exc


# ---------------------------------------------------------------------------
# subcommands


def _cmd_gauss(args) -> int:
    results, violations = [], []
    for q in _qlist(args.qlist):
        pf = {p ** f: (p, f) for p, f in odd_prime_powers(3, q)}
        if q not in pf:
            raise UsageError(f"q = {q} is not an odd prime power")
        ctx = make_field(*pf[q])
        psi = canonical_psi(ctx)
        sq = math.sqrt(q)
        for chi in enumerate_chars(ctx):
            tau = gauss_sum(chi, psi)
            row = {"q": q, "chi_k": chi.k, "re": tau.real, "im": tau.imag,
                   "abs": abs(tau)}
            if chi.is_trivial:
                row["expected_abs"] = 1.0
                dev = abs(tau - (-1.0))
            else:
                row["expected_abs"] = sq
                dev = abs(abs(tau) - sq)
            row["deviation"] = dev
            results.append(row)
            if dev > 1e-9 * sq:
                violations.append({"kind": "gauss_modulus", "q": q,
                                   "chi_k": chi.k, "deviation": dev})
    echo = {"command": "gauss", "qlist": _qlist(args.qlist)}
    return _emit(args, echo, results, violations)


def _cmd_charsum_scan(args) -> int:
    report = scan(args.qmin, args.qmax, rho_restricted=args.rho_restricted)
    violations = []
    for row in report["rows"]:
        if row["abs_S_over_q"] > 1000 or row["abs_T_over_sqrt_q"] > 1000:
            violations.append({"kind": "bound_exceeded", **row})
        elif row["flagged"]:
            violations.append({"kind": "flagged", **row})
    if args.advisory:
        flagged = [row for row in report["rows"] if row["flagged"]]
        with open(args.advisory, "w", encoding="utf-8", newline="") as fh:
            fh.write(json.dumps(_jsonable(flagged), sort_keys=True, indent=2)
                     + "\n")
    echo = {"command": "charsum-scan", "qmin": args.qmin, "qmax": args.qmax,
            "rho_restricted": args.rho_restricted,
            "flag_threshold": SCAN_FLAG_THRESHOLD}
    results = list(report["rows"])
    results.append({"q": 0, "summary": True,
                    "max_abs_S_over_q": report["max_abs_S_over_q"],
                    "max_abs_T_over_sqrt_q": report["max_abs_T_over_sqrt_q"]})
    return _emit(args, echo, results, violations)


def _cmd_hyper(args) -> int:
    pf = {p ** f: (p, f) for p, f in odd_prime_powers(3, args.q)}
    if args.q not in pf:
        raise UsageError(f"q = {args.q} is not an odd prime power")
    ctx = make_field(*pf[args.q])
    chi0 = trivial_char(ctx)
    results, violations = [], []
    if args.chi is None and args.eta is None:
        # Kloosterman mode: H(t, q; (1,1), ()) for every t, Weil bound 2
        spec = HyperSpec((chi0, chi0), ())
        ts = [args.t] if args.t is not None else range(1, ctx.q)
        for t in ts:
            h = hyper_sum(spec, t)
            results.append({"q": args.q, "t": t, "re": h.real, "im": h.imag,
                            "abs": abs(h)})
            if abs(h) > 2 + 1e-9:
                violations.append({"kind": "weil_bound", "q": args.q,
                                   "t": t, "abs": abs(h)})
        echo = {"command": "hyper", "q": args.q, "mode": "kloosterman",
                "t": args.t}
    else:
        if args.chi is None or args.eta is None:
            raise UsageError("give both --chi and --eta (or neither)")
        chi = MultChar(ctx, args.chi)
        eta = MultChar(ctx, args.eta)
        spec = HyperSpec((chi0, chi0), (chi, eta))
        h = hyper_all_t(spec)
        ts = [args.t] if args.t is not None else range(1, ctx.q)
        for t in ts:
            results.append({"q": args.q, "t": t, "re": h[t].real,
                            "im": h[t].imag, "abs": abs(h[t])})
        results.append({"q": args.q, "classification": True,
                        **classify_exceptional(spec)})
        echo = {"command": "hyper", "q": args.q, "mode": "2F1",
                "chi_k": args.chi, "eta_k": args.eta, "t": args.t}
    return _emit(args, echo, results, violations)


def _build_local_case(args):
    pf = {p ** f: (p, f) for p, f in odd_prime_powers(3, args.q)}
    if args.q not in pf:
        raise UsageError(f"q = {args.q} is not an odd prime power")
    p, f = pf[args.q]
    model = LocalFieldModel(p, f)
    if args.case == "case1":
        return Case1(model, xi_pm=args.xi_pm)
    if args.case == "case2ns":
        return Case2NS(model, n=args.n, xi_pm=args.xi_pm, xi2_k=args.xi2_k)
    if args.case == "case2sc":
        qctx = quad_ext(p, f)
        if args.theta_k is not None:
            theta = MultChar(qctx.ext, args.theta_k)
            return Case2SC(qctx, theta)
        return default_case("case2sc", args.q)
    if args.case == "case3":
        return Case3(model, t=args.t)
    raise UsageError(f"unknown case {args.case!r}")


def _build_local_chi(args) -> LocalCharParam:
    ram = None
    if args.chi_ram:
        pf = {p ** f: (p, f) for p, f in odd_prime_powers(3, args.q)}
        ram = MultChar(make_field(*pf[args.q]), args.chi_ram)
    return LocalCharParam(c=_parse_complex(args.chi_c), ram=ram,
                          ram2_k=args.chi_ram2)


def _cmd_local(args) -> int:
    case = _build_local_case(args)
    chi = _build_local_chi(args)
    s = _parse_complex(args.s)
    results, violations = [], []
    row = {"case": args.case, "q": args.q, "s": s,
           "chi_a": chi.a, "chi_c": chi.c}
    try:
        closed = m4_closed(case, chi, s=s)
        if closed is VANISHES:
            row["closed"] = "vanishes"
            closed = 0j
        else:
            row["closed"] = complex(closed)
    except MomentkitError as exc:
        row["closed"] = f"unavailable: {exc}"
        closed = None
    if isinstance(case, Case2SC):
        row["components"] = {
            "".join(map(str, I)) or "empty": m4I_term(case, chi, s, I)
            for I in sorted(_ADMISSIBLE_I)}
    if args.oracle:
        val, bound = oracle_m4(case, chi, s=s, N=args.oracle)
        row["oracle"] = val
        row["tail_bound"] = bound
        if closed is not None:
            diff = abs(val - closed)
            row["abs_diff"] = diff
            if diff > bound:
                violations.append({"kind": "oracle_mismatch",
                                   "case": args.case, "q": args.q,
                                   "abs_diff": diff, "tail_bound": bound})
    results.append(row)
    echo = {"command": "local", "case": args.case, "q": args.q, "s": s,
            "oracle_N": args.oracle}
    return _emit(args, echo, results, violations)


def _cmd_degenerate(args) -> int:
    spec = _parse_spec(args.spec)
    status = d3_status(spec)
    results = [{"d3_vanishes": status.vanishes, "d3_reason": status.reason,
                "d3_order": status.order}]
    violations = []
    if args.d4:
        toy = d4_toy(spec, arch_stubs=_parse_complex(args.arch_stub))
        results.append({"residue_at_1": toy["residue_at_1"],
                        "residue_at_0": toy["residue_at_0"],
                        "difference": toy["difference"]})
        for entry in toy["ledger"]:
            results.append(entry)
    echo = {"command": "degenerate", "spec": spec.to_dict(), "d4": args.d4}
    return _emit(args, echo, results, violations)


def _cmd_conductors(args) -> int:
    spec = _parse_spec(args.spec)
    results = [conductors(spec)]
    echo = {"command": "conductors", "spec": spec.to_dict()}
    return _emit(args, echo, results, [])


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="momentkit",
        description="character sums and local moment weights")
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--json", metavar="PATH",
                       help="write the JSON report here instead of stdout")
        p.add_argument("--csv", metavar="PATH",
                       help="also write the result rows as CSV")

    p = sub.add_parser("gauss", help="Gauss-sum modulus sweep")
    p.add_argument("--qlist", default="3,5,7,9,11,13")
    common(p)
    p.set_defaults(func=_cmd_gauss)

    p = sub.add_parser("charsum-scan", help="double character sum bound scan")
    p.add_argument("--qmin", type=int, default=3)
    p.add_argument("--qmax", type=int, default=11)
    p.add_argument("--rho-restricted", action="store_true")
    p.add_argument("--advisory", metavar="PATH",
                   help="write the flagged-row advisory JSON here")
    common(p)
    p.set_defaults(func=_cmd_charsum_scan)

    p = sub.add_parser("hyper", help="hypergeometric sums / Kloosterman check")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--chi", type=int, help="chi exponent (2F1 mode)")
    p.add_argument("--eta", type=int, help="eta exponent (2F1 mode)")
    p.add_argument("--t", type=int, help="single argument instead of a sweep")
    common(p)
    p.set_defaults(func=_cmd_hyper)

    p = sub.add_parser("local", help="local weight: closed form vs oracle")
    p.add_argument("--case", required=True,
                   choices=["case1", "case2ns", "case2sc", "case3"])
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--s", default="0", help="complex, e.g. '0.1+0.2j'")
    p.add_argument("--oracle", type=int, metavar="N", default=0,
                   help="also run the numerical integrator at window N")
    p.add_argument("--xi-pm", type=int, default=-1, dest="xi_pm")
    p.add_argument("--n", type=int, default=1, help="depth (case2ns)")
    p.add_argument("--xi2-k", type=int, default=0, dest="xi2_k")
    p.add_argument("--theta-k", type=int, default=None, dest="theta_k")
    p.add_argument("--t", type=int, default=1, help="unit twist (case3)")
    p.add_argument("--chi-c", default="1", dest="chi_c",
                   help="chi at the uniformizer (complex)")
    p.add_argument("--chi-ram", type=int, default=0, dest="chi_ram",
                   help="level-1 residue character exponent")
    p.add_argument("--chi-ram2", type=int, default=0, dest="chi_ram2",
                   help="level-2 residue character index")
    common(p)
    p.set_defaults(func=_cmd_local)

    p = sub.add_parser("degenerate", help="third-moment vanishing and toy "
                                          "fourth-moment residues")
    p.add_argument("--spec", required=True,
                   help="JSON spec or @file, e.g. "
                        "'{\"r\":1,\"finite\":[{\"q\":7,\"case\":\"case3\"}]}'")
    p.add_argument("--d4", action="store_true",
                   help="also assemble the toy fourth-moment residues")
    p.add_argument("--arch-stub", default="1", dest="arch_stub",
                   help="constant archimedean stub for the d4 assembly")
    common(p)
    p.set_defaults(func=_cmd_degenerate)

    p = sub.add_parser("conductors", help="conductor aggregates and exponent")
    p.add_argument("--spec", required=True, help="JSON spec or @file")
    common(p)
    p.set_defaults(func=_cmd_conductors)

    return top


def cli_run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MomentkitError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main():  # console entry point
    sys.exit(cli_run())


if __name__ == "__main__":
    main()
