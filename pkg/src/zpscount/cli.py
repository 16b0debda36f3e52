"""Command-line front end.

Exit codes: 0 success, 1 verification mismatch, 2 usage or input error,
3 oracle budget exceeded.
"""

import argparse
import csv
import io
import json
import os
import re
import sys
from decimal import Context, Decimal
from fractions import Fraction

from .errors import BudgetExceeded, DuplicatePrime
from .exact_arith import is_prime
from .explicit import explicit_route
from .linalg import (
    ZpsMatrix,
    det_valuation,
    determinant,
    gcd_det_correct,
    smith_profile,
    solution_count,
)
from .oracle import DEFAULT_MAX_MATRICES, DEFAULT_MAX_VECTORS, OracleBudget, \
    bruteforce_table, bruteforce_table_direct
from .probability import asymptotic_residual, crt_compose, prob_gcd_correct
from .recursive import CountTable, E_rec, count_table

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _env_int(name, default):
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{name} must be an integer, got {raw!r}")


def _budget(args):
    matrices = args.budget if args.budget is not None else \
        _env_int("ZPS_COUNT_BUDGET", DEFAULT_MAX_MATRICES)
    if matrices < 1:
        raise UsageError("budget must be positive")
    return OracleBudget(matrices, DEFAULT_MAX_VECTORS)


def _workers(args):
    w = args.workers if args.workers is not None else _env_int("ZPS_COUNT_THREADS", 1)
    if w < 1:
        raise UsageError("worker count must be positive")
    return w


def _check_prime(p):
    if not is_prime(p):
        raise UsageError(f"p={p} is not prime")


def _check_nonneg(**kw):
    for name, v in kw.items():
        if v < 0:
            raise UsageError(f"--{name} must be nonnegative, got {v}")


def _check_shape(args):
    _check_prime(args.p)
    _check_nonneg(n=args.n, m=args.m)
    if args.s < 1:
        raise UsageError(f"--s must be at least 1, got {args.s}")


def frac_str(x):
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def frac_decimal(x, digits):
    ctx = Context(prec=digits)
    return str(ctx.divide(Decimal(x.numerator), Decimal(x.denominator)))


def _emit(obj):
    print(json.dumps(obj, indent=2))


def _table(args):
    """CountTable for the requested method; bruteforce uses the normal-form oracle."""
    if args.method == "bruteforce":
        return bruteforce_table(args.n, args.m, args.p, args.s, _budget(args), _workers(args))
    if args.method == "recursive":
        return count_table(args.n, args.m, args.p, args.s)
    counts = {j: explicit_route(args.n, args.m, args.p, args.s, j)[0]
              for j in range(args.s * args.m + 1)}
    return CountTable(args.n, args.m, args.p, args.s, counts, method="explicit")


def cmd_count(args):
    _check_shape(args)
    _check_nonneg(j=args.j)
    n, m, p, s, j = args.n, args.m, args.p, args.s, args.j
    if args.method == "explicit":
        value, formula = explicit_route(n, m, p, s, j)
    elif args.method == "recursive":
        value, formula = E_rec(n, m, p, s, j), "recursion"
    else:
        table = bruteforce_table(n, m, p, s, _budget(args), _workers(args))
        value, formula = table[j], "enumeration"
    _emit({"n": n, "m": m, "p": p, "s": s, "j": j, "count": str(value),
           "method": args.method, "formula": formula})
    return EXIT_OK


def render_table(table, fmt):
    if fmt == "json":
        return json.dumps(table.to_dict(), indent=2)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["j", "count"])
        for j, c in sorted(table.counts.items()):
            if c:
                w.writerow([j, c])
        return buf.getvalue().rstrip("\n")
    rows = [(str(j), str(c)) for j, c in sorted(table.counts.items())]
    width = max([len(c) for _, c in rows] + [len("count")])
    lines = [f"E({table.n}x{table.m}, {table.p}^{table.s}, p^j)  method={table.method}",
             f"{'j':>4}  {'count':>{width}}"]
    lines += [f"{j:>4}  {c:>{width}}" for j, c in rows]
    lines.append(f"{'sum':>4}  {str(table.total):>{width}}")
    return "\n".join(lines)


def cmd_table(args):
    _check_shape(args)
    print(render_table(_table(args), args.format))
    return EXIT_OK


def _parse_int_list(text, what):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"malformed {what}: {text!r}")


def verify_point(n, m, p, s, with_bruteforce, budget, workers):
    """Compare every available route at one grid point; return (ok, report dict)."""
    rec = count_table(n, m, p, s).counts
    routes = {"recursive": rec}
    formulas = {}
    explicit = {}
    for j in range(s * m + 1):
        explicit[j], formulas[j] = explicit_route(n, m, p, s, j)
    routes["explicit"] = explicit
    notes = []
    if with_bruteforce:
        try:
            routes["bruteforce"] = bruteforce_table(n, m, p, s, budget, workers).counts
        except BudgetExceeded as exc:
            notes.append(f"bruteforce skipped ({exc})")
        try:
            routes["bruteforce_direct"] = bruteforce_table_direct(n, m, p, s, budget, workers).counts
        except BudgetExceeded as exc:
            notes.append(f"direct enumeration skipped ({exc})")
    mismatches = []
    for j in range(s * m + 1):
        values = {name: r[j] for name, r in routes.items()}
        if len(set(values.values())) > 1:
            mismatches.append({"j": j, "formula": formulas[j],
                               "values": {k: str(v) for k, v in values.items()}})
    total_ok = sum(rec.values()) == p ** (s * n * m)
    if not total_ok:
        mismatches.append({"j": None, "formula": "normalization",
                           "values": {"sum": str(sum(rec.values())),
                                      "expected": str(p ** (s * n * m))}})
    return not mismatches, {"n": n, "m": m, "p": p, "s": s,
                            "routes": sorted(routes), "mismatches": mismatches,
                            "notes": notes}


def cmd_verify(args):
    primes = _parse_int_list(args.primes, "prime list")
    if not primes:
        raise UsageError("--primes must name at least one prime")
    for p in primes:
        _check_prime(p)
    if args.max_n < 1 or args.max_m < 1 or args.max_s < 1:
        raise UsageError("--max-n, --max-m and --max-s must be at least 1")
    budget, workers = _budget(args), _workers(args)
    failures = 0
    for p in primes:
        for s in range(1, args.max_s + 1):
            for n in range(1, args.max_n + 1):
                for m in range(1, args.max_m + 1):
                    ok, report = verify_point(n, m, p, s, args.with_bruteforce, budget, workers)
                    tag = "ok" if ok else "MISMATCH"
                    extra = f" [{'; '.join(report['notes'])}]" if report["notes"] else ""
                    print(f"{tag:8} n={n} m={m} p={p} s={s} "
                          f"routes={','.join(report['routes'])}{extra}")
                    if not ok:
                        failures += 1
                        print(json.dumps(report["mismatches"]))
    print(f"{failures} mismatching point(s)")
    return EXIT_MISMATCH if failures else EXIT_OK


def cmd_solve(args):
    try:
        with open(args.input) as fh:
            A = ZpsMatrix.from_json(fh.read())
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read matrix from {args.input}: {exc}")
    pp = A.modulus
    eta = solution_count(A)
    exponent = _log_exact(eta, pp.p)
    out = {"p": pp.p, "s": pp.s, "n": A.n, "m": A.m,
           "eta": str(eta), "eta_power": f"{pp.p}^{exponent}",
           "valuations": list(smith_profile(A).valuations)}
    if A.n == A.m:
        v = det_valuation(A)
        out.update({"det_mod": str(determinant(A)), "gcd_det": str(pp.p ** v),
                    "gcd_correct": gcd_det_correct(A)})
    _emit(out)
    return EXIT_OK


def _log_exact(x, p):
    e = 0
    while x > 1:
        x //= p
        e += 1
    return e


def cmd_prob(args):
    _check_prime(args.p)
    if args.n < 1 or args.s < 1:
        raise UsageError("--n and --s must be at least 1")
    if args.precision < 1:
        raise UsageError("--precision must be positive")
    pr = prob_gcd_correct(args.n, args.p, args.s)
    leading = 1 - Fraction(1, args.p ** (args.s + 3))
    out = {"n": args.n, "p": args.p, "s": args.s,
           "probability": frac_str(pr), "decimal": frac_decimal(pr, args.precision),
           "leading_term": frac_str(leading)}
    if args.n >= 2:
        r = asymptotic_residual(args.n, args.p, args.s)
        out["residual"] = frac_str(r)
        out["residual_decimal"] = frac_decimal(r, args.precision)
    else:
        out["residual"] = None
    _emit(out)
    return EXIT_OK


_FACTOR = re.compile(r"^\s*(\d+)\s*\^\s*(\d+)\s*$")


def parse_factors(text):
    out = []
    for part in text.split(","):
        match = _FACTOR.match(part)
        if not match:
            raise UsageError(f"malformed factor {part!r}; expected p^s")
        p, s = int(match.group(1)), int(match.group(2))
        _check_prime(p)
        if s < 1:
            raise UsageError(f"exponent in {part!r} must be at least 1")
        out.append((p, s))
    return out


def cmd_crt(args):
    _check_nonneg(n=args.n, m=args.m)
    factors = parse_factors(args.factors)
    js = _parse_int_list(args.j, "exponent list")
    if len(js) != len(factors):
        raise UsageError(f"{len(factors)} factor(s) but {len(js)} exponent(s)")
    try:
        composite = crt_compose(
            [(p, s, count_table(args.n, args.m, p, s)) for p, s in factors])
    except DuplicatePrime as exc:
        raise UsageError(str(exc))
    _emit({"n": args.n, "m": args.m,
           "modulus": str(composite.modulus),
           "factors": [f"{p}^{s}" for p, s in factors],
           "j": js,
           "solutions": str(composite.solutions(js)),
           "count": str(composite[js])})
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="zpscount",
        description="Count n x m matrices over Z/p^s by the size of their kernel.")
    sub = parser.add_subparsers(dest="command", required=True)

    def oracle_flags(sp):
        sp.add_argument("--budget", type=int, default=None,
                        help="max matrices the oracle may enumerate (env ZPS_COUNT_BUDGET)")
        sp.add_argument("--workers", type=int, default=None,
                        help="oracle worker processes (env ZPS_COUNT_THREADS)")

    def shape_flags(sp):
        for name in ("n", "m", "p", "s"):
            sp.add_argument(f"--{name}", type=int, required=True)
        sp.add_argument("--method", choices=["explicit", "recursive", "bruteforce"],
                        default="explicit")
        oracle_flags(sp)

    sp = sub.add_parser("count", help="one count E(n x m, p^s, p^j)")
    shape_flags(sp)
    sp.add_argument("--j", type=int, required=True)
    sp.set_defaults(func=cmd_count)

    sp = sub.add_parser("table", help="all counts for j = 0..s*m")
    shape_flags(sp)
    sp.add_argument("--format", choices=["json", "csv", "plain"], default="json")
    sp.set_defaults(func=cmd_table)

    sp = sub.add_parser("verify", help="cross-check closed forms, recursion and oracle")
    sp.add_argument("--max-n", type=int, required=True)
    sp.add_argument("--max-m", type=int, required=True)
    sp.add_argument("--max-s", type=int, required=True)
    sp.add_argument("--primes", required=True, help="comma-separated, e.g. 2,3")
    sp.add_argument("--with-bruteforce", action="store_true")
    oracle_flags(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("solve", help="solution count of a concrete matrix")
    sp.add_argument("--input", required=True, help="JSON matrix file")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("prob", help="probability that gcd(det A, p^s) counts solutions")
    for name in ("n", "p", "s"):
        sp.add_argument(f"--{name}", type=int, required=True)
    sp.add_argument("--precision", type=int, default=12, help="significant digits")
    sp.set_defaults(func=cmd_prob)

    sp = sub.add_parser("crt", help="count modulo a composite via prime-power factors")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--factors", required=True, help='e.g. "2^2,3^1"')
    sp.add_argument("--j", required=True, help='exponents per factor, e.g. "0,0"')
    sp.set_defaults(func=cmd_crt)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"zpscount {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"zpscount {args.command}: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
