"""Command-line entry point: verify, lvalue, petersson, constants, coeffs.

Reports are UTF-8 JSON with "schema": 1 and every number written as a
decimal string.  Exit codes: 0 pass, 1 numeric failure, 2 usage or data error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

import mpmath

from . import __version__

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _num(x, digits: int = 20):
    if x is None:
        return None
    if isinstance(x, bool):
        return x
    if isinstance(x, (int, Fraction)):
        return str(x)
    with mpmath.workdps(digits + 5):
        return mpmath.nstr(mpmath.mpf(x), digits, min_fixed=-4, max_fixed=4)


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------


def cmd_verify(args) -> int:
    from .lfunctions import determine_sign_and_conductor, sym2_tensor_lseries
    from .qseries import newform_fixture
    from .saitokurokawa import EXAMPLES, verify_pullback

    t0 = time.perf_counter()
    scan = None
    if args.conductor_candidates:
        ex = EXAMPLES[args.example]
        f, g = newform_fixture(ex.f_label, args.truncation), newform_fixture(ex.g_label, args.truncation)
        scan = determine_sign_and_conductor(sym2_tensor_lseries(f, g), args.conductor_candidates, max_terms=args.truncation)
        if (scan.conductor, scan.sign) != (ex.conductor, ex.sign):
            sys.stderr.write(f"conductor scan picked Q = {scan.conductor}, eps = {scan.sign}\n")
            return EXIT_FAIL
    rep = verify_pullback(args.example, digits=args.digits)
    d = args.digits
    p = rep.parameters
    doc = {
        "schema": 1,
        "command": "verify",
        "example_id": rep.example_id,
        "parameters": {"kappa": p.kappa, "kappa_prime": p.kappa_prime, "m": p.m, "N": p.N},
        "precision_digits": d,
        "intermediates": {
            q.name: {
                "computed": _num(q.computed, d),
                "published_target": _num(q.target, d),
                "abs_delta": _num(q.abs_delta, 5),
                "rel_delta": _num(q.rel_delta, 5),
                "verdict": None if q.passed is None else ("pass" if q.passed else "fail"),
            }
            for q in rep.quantities
        },
        "theorem": {
            "lhs": _num(rep.lhs, d),
            "rhs": _num(rep.rhs, d),
            "rel_residual": _num(rep.residual, 5),
            "tolerance": _num(rep.residual_tolerance, 3),
            "verdict": "pass" if rep.residual <= rep.residual_tolerance else "fail",
        },
        "verdict": "pass" if rep.passed else "fail",
        "runtime_seconds": round(time.perf_counter() - t0, 3),
    }
    if scan is not None:
        doc["conductor_scan"] = {
            "conductor": scan.conductor,
            "sign": scan.sign,
            "residual": _num(scan.residual, 5),
            "table": [{"conductor": Q, "sign": e, "residual": "inf" if r == float("inf") else _num(r, 5)} for Q, e, r in scan.table],
        }
    _emit(doc, args.out)
    return EXIT_PASS if rep.passed else EXIT_FAIL


def load_lseries_descriptor(path: str):
    """LSeries from a JSON descriptor (fixture reference or inline coefficients)."""
    from .lfunctions import LSeries, sym2_tensor_lseries, twisted_lseries
    from .qseries import newform_fixture

    try:
        with open(path, encoding="utf-8") as fh:
            spec = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read descriptor: {exc}") from exc
    if not isinstance(spec, dict):
        raise UsageError("descriptor must be a JSON object")
    try:
        if "fixture" in spec:
            fx = spec["fixture"]
            trunc = int(spec.get("truncation", 2000))
            if fx.get("type") == "sym2":
                L = sym2_tensor_lseries(newform_fixture(fx["f"], trunc), newform_fixture(fx["g"], trunc))
            elif fx.get("type") == "twist":
                L = twisted_lseries(newform_fixture(fx["f"], trunc), int(fx["D"]))
            else:
                raise UsageError(f"unknown fixture type {fx.get('type')!r}")
            return L.with_functional_equation(int(spec.get("sign", L.sign)), int(spec.get("conductor", L.conductor)))
        coeffs = [int(c) for c in spec["coefficients"]]
        # shifts are Gamma_C shifts, each contributing degree 2
        if int(spec["degree"]) != 2 * len(spec["gamma_shifts"]):
            raise UsageError("degree must be twice the number of Gamma_C shifts")
        return LSeries(
            label=str(spec.get("label", path)),
            degree=int(spec["degree"]),
            gamma_shifts=tuple(spec["gamma_shifts"]),
            weight=int(spec["weight"]),
            euler_factor=lambda p: None,
            conductor=int(spec["conductor"]),
            sign=int(spec["sign"]),
            _coeffs=[0] + coeffs,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed descriptor: {exc!r}") from exc


def cmd_lvalue(args) -> int:
    from .lfunctions import ShortfallError, evaluate_completed
    from .numerics import DomainError

    L = load_lseries_descriptor(args.spec)
    try:
        s = Fraction(args.s)
    except ValueError as exc:
        raise UsageError(f"bad --s value {args.s!r}") from exc
    t0 = time.perf_counter()
    try:
        with mpmath.workdps(args.digits + 10):
            s_mp = mpmath.mpf(s.numerator) / s.denominator
        v = evaluate_completed(L, s_mp, dps=args.digits, normalization=args.normalization)
    except (ShortfallError, DomainError) as exc:
        raise UsageError(f"{exc} (supply more coefficients or lower --digits)") from exc
    doc = {
        "schema": 1,
        "command": "lvalue",
        "label": L.label,
        "s": args.s,
        "normalization": args.normalization,
        "value": _num(v.value, args.digits),
        "error_estimate": _num(v.error_estimate, 3),
        "terms": v.terms,
        "conductor": v.conductor,
        "sign": v.sign,
        "precision_digits": args.digits,
        "runtime_seconds": round(time.perf_counter() - t0, 3),
    }
    _emit(doc, args.out)
    return EXIT_PASS


def cmd_petersson(args) -> int:
    from .petersson import petersson_norm
    from .qseries import newform_fixture

    f = newform_fixture(args.form, args.truncation)
    t0 = time.perf_counter()
    r = petersson_norm(f, digits=args.digits)
    doc = {
        "schema": 1,
        "command": "petersson",
        "form": args.form,
        "value": _num(r.value, args.digits),
        "error_estimate": _num(r.error_estimate, 3),
        "nodes_used": r.nodes_used,
        "precision_digits": args.digits,
        "runtime_seconds": round(time.perf_counter() - t0, 3),
    }
    _emit(doc, args.out)
    return EXIT_PASS


ROW_LIMIT = 2000


def constants_suite(kappa_prime_max: int, m_max: int) -> dict:
    """Scan, named constants and the three identity checks as one report."""
    from .archimedean import c_const, constant_report, conjecture_scan, ghate_sum_check, j_integral_check, z_cross_check

    scan = conjecture_scan(kappa_prime_max, m_max)
    rows = []
    # the full table is only written for grids of moderate size
    if scan.cells <= ROW_LIMIT:
        for m in range(m_max + 1):
            for kp in range(1, kappa_prime_max + 1):
                r = constant_report(kp + 2 * m, kp)
                rows.append(
                    {
                        "kappa": r.kappa,
                        "kappa_prime": r.kappa_prime,
                        "m": r.m,
                        "c_infty": str(r.c_infty),
                        "c_const": str(r.c_const),
                        "conjecture_rhs": str(r.conjecture_rhs),
                        "equal": r.equal,
                    }
                )
    named = {f"C({k},{kp})": str(c_const(k, kp)) for k, kp in ((11, 9), (1, 1))}
    ghate_ok = all(ghate_sum_check(kp + 2 * m, kp)[2] for m in range(min(m_max, 3) + 1) for kp in range(1, kappa_prime_max + 1))
    z_rel = mpmath.mpf(0)
    for kp in range(1, min(kappa_prime_max, 6) + 1):
        for m in range(min(m_max, 3) + 1):
            a, b = z_cross_check(kp + 2 * m, kp, 40)
            z_rel = max(z_rel, abs(a - b) / abs(b))
    j_rel = mpmath.mpf(0)
    for m, n, r in ((0, 1, 1), (1, 2, Fraction(1, 2)), (2, 3, 2)):
        q, c = j_integral_check(m, n, r, 20)
        j_rel = max(j_rel, abs(q - c) / abs(c))
    verdicts = {
        "conjecture_scan": not scan.failures,
        "nonzero": not scan.zero_cells,
        "named_constants": all(v == "1" for v in named.values()),
        "ghate_sum": ghate_ok,
        "z_cross_check": z_rel < mpmath.mpf(10) ** -30,
        "j_integral": j_rel < mpmath.mpf(10) ** -8,
    }
    return {
        "grid": {"kappa_prime_max": kappa_prime_max, "m_max": m_max, "cells": scan.cells},
        "failures": [list(c) for c in scan.failures],
        "named": named,
        "rows": rows,
        "z_cross_check_rel": _num(z_rel, 3),
        "j_integral_rel": _num(j_rel, 3),
        "verdicts": verdicts,
    }


def cmd_constants(args) -> int:
    if args.kappa_prime_max < 1 or args.m_max < 0:
        raise UsageError("bounds must be positive")
    res = constants_suite(args.kappa_prime_max, args.m_max)
    ok = all(res["verdicts"].values())
    if args.format == "csv":
        lines = ["kappa,kappa_prime,m,c_infty,c_const,conjecture_rhs,equal"]
        lines += [f"{r['kappa']},{r['kappa_prime']},{r['m']},{r['c_infty']},{r['c_const']},{r['conjecture_rhs']},{r['equal']}" for r in res["rows"]]
        text = "\n".join(lines) + "\n"
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    else:
        _emit({"schema": 1, "command": "constants", **res, "verdict": "pass" if ok else "fail"}, args.out)
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_coeffs(args) -> int:
    from .halfintegral import plus_form_fixture, plus_form_labels
    from .qseries import fixture_labels, newform_fixture

    if args.form in plus_form_labels():
        text = plus_form_fixture(args.form).to_text()
    elif args.form in fixture_labels():
        text = newform_fixture(args.form, args.truncation).to_text()
    else:
        raise UsageError(f"unknown form {args.form!r}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_PASS


def _candidates(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError("expected comma-separated integers") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skpullback", description="Numerical checks of the Saito-Kurokawa pullback formula.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the end-to-end check for a worked example")
    p.add_argument("--example", type=int, choices=(1, 2), required=True)
    p.add_argument("--digits", type=int, default=20)
    p.add_argument("--conductor-candidates", type=_candidates, default=None, help="comma-separated Q to scan")
    p.add_argument("--truncation", type=int, default=40000, help="coefficients available to the conductor scan")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("lvalue", help="completed L-value from a JSON descriptor")
    p.add_argument("spec")
    p.add_argument("--s", required=True)
    p.add_argument("--digits", type=int, default=30)
    p.add_argument("--normalization", choices=("conductor", "gamma"), default="conductor")
    p.add_argument("--out")
    p.set_defaults(func=cmd_lvalue)

    p = sub.add_parser("petersson", help="Petersson norm of a newform fixture")
    p.add_argument("--form", required=True)
    p.add_argument("--digits", type=int, default=14)
    p.add_argument("--truncation", type=int, default=2000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_petersson)

    p = sub.add_parser("constants", help="archimedean constants, conjecture scan and identity checks")
    p.add_argument("--kappa-prime-max", type=int, default=6)
    p.add_argument("--m-max", type=int, default=20)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("coeffs", help="dump fixture coefficients as text")
    p.add_argument("--form", required=True)
    p.add_argument("--truncation", type=int, default=200)
    p.add_argument("--out")
    p.set_defaults(func=cmd_coeffs)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    if getattr(args, "digits", 1) is not None and getattr(args, "digits", 1) < 1:
        sys.stderr.write("error: --digits must be positive\n")
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (ValueError, KeyError, OSError) as exc:
        sys.stderr.write(f"error in {args.command}: {exc}\n")
        return EXIT_USAGE
    except (ArithmeticError, RuntimeError) as exc:
        sys.stderr.write(f"{args.command} failed: {exc}\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
