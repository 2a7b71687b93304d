"""Command-line interface: ``kekule <verb> ...``.

Exit status: 0 success, 1 verification failure, 2 usage error,
3 computation failure.  ``--json`` prints a report-shaped JSON document for
every verb.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import closedform as cf
from . import harness as hs
from . import numtheory as nt
from . import oeis
from .realfield import (
    BigReal,
    DomainError,
    Limit,
    PrecisionContext,
    QuadratureError,
    inner_integral_numeric,
)
from .recognition import RecognitionError, recognize_conj10, recognize_log_surd, recognize_surd_pi

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_COMPUTE = 0, 1, 2, 3


class UsageError(ValueError):
    pass


# --------------------------------------------------------------------------
# argument parsing helpers
# --------------------------------------------------------------------------

def parse_range(text: str) -> list[int]:
    """'0..3' -> [0, 1, 2, 3]; '2,4,6' and '5' are accepted as well."""
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise UsageError(f"empty range {text!r}")
            return list(range(lo, hi + 1))
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise UsageError(f"cannot parse range {text!r} (use e.g. 0..3)") from None
    if not values:
        raise UsageError("empty range")
    return values


def parse_rational(text: str):
    if "." in text or "e" in text.lower():
        raise UsageError(f"decimals are not accepted here: {text!r}; use a fraction")
    try:
        return nt.as_rational(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}") from None


def parse_limit(text: str) -> Limit:
    try:
        return Limit.parse(text)
    except DomainError as exc:
        raise UsageError(str(exc)) from None


def check_digits(digits: int) -> int:
    if not 20 <= digits <= hs.MAX_DIGITS:
        raise UsageError(f"--digits must be between 20 and {hs.MAX_DIGITS}")
    return digits


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit with status 2 and the help text
        self.print_help(sys.stderr)
        self.exit(EXIT_USAGE, f"\n{self.prog}: error: {message}\n")


SEQ_NAMES = ("kekule", "companion", "y", "z", "core", "a019554", "a000188", "a083481", "convergent", "pell")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kekule", description="High-precision verification toolkit for the "
                     "Kekule-number integrals and the conjectured surd evaluations.")
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def common(p, digits=True):
        p.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                       help="machine-readable output")
        if digits:
            p.add_argument("--digits", type=int, default=60, help="working precision (default 60, max 300)")

    p = sub.add_parser("seq", help="exact sequence terms")
    p.add_argument("name", choices=SEQ_NAMES)
    p.add_argument("--n", required=True, help="index range, e.g. 0..10")
    p.add_argument("--k", default="2", help="parameter k for y and z (rational)")
    p.add_argument("--radicand", type=int, default=2, help="radicand for convergent")
    common(p, digits=False)

    p = sub.add_parser("integral", help="integral of cos(nx)/(k + sin^2 x) over [-pi, pi]")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", required=True, help="positive rational, e.g. 7/3")
    common(p)

    p = sub.add_parser("double", help="double integral over t in [lower, upper]")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--upper", required=True, help="exact limit: 1, 5/4, 3*sqrt2")
    p.add_argument("--lower", default="0")
    p.add_argument("--no-cache", action="store_true")
    common(p)

    p = sub.add_parser("recognize", help="identify a constant")
    p.add_argument("--value", required=True, help="decimal string or @file")
    p.add_argument("--form", choices=("surd", "logsurd", "conj10"), default="surd")
    p.add_argument("--m", type=int, help="m for the conj10 template")
    p.add_argument("--error-bound", default=None, help="absolute error of the value "
                   "(default: half a unit in the last digit)")
    common(p)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("--suite", required=True, help="suite id or 'all' (comma-separated allowed)")
    p.add_argument("--range", dest="range_", help="range for the suite's index (n or m)")
    p.add_argument("--m", help="m range for m-indexed conjectures")
    p.add_argument("--n", help="n range for n-indexed suites")
    p.add_argument("--n-max", type=int, default=20, help="largest n for lemma/theorem suites")
    p.add_argument("--k", help="comma-separated k values for theorem2/lemma2")
    p.add_argument("--N", type=int, default=10_000, help="Fourier partial-sum order")
    p.add_argument("--series-N", type=int, default=100_000, help="series partial-sum order")
    p.add_argument("--offline", action="store_true", help="never touch the network")
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--no-cache", action="store_true")
    common(p)

    p = sub.add_parser("oeis", help="OEIS b-file terms")
    p.add_argument("--id", required=True)
    p.add_argument("--terms", type=int, default=10)
    p.add_argument("--offline", action="store_true")
    common(p, digits=False)

    p = sub.add_parser("cache", help="integral cache maintenance")
    p.add_argument("action", choices=("stats", "clear"))
    common(p, digits=False)
    return parser


# --------------------------------------------------------------------------
# report-shaped output
# --------------------------------------------------------------------------

def _case(cid: str, params: dict, computed: str, *, recognized: str = "", expected: str = "",
          status: str = "pass", residual: str = "0", digits: int = 0, ms: int = 0, **extra) -> dict:
    out = {"id": cid, "params": {k: str(v) for k, v in params.items()}, "computed": computed,
           "recognized": recognized, "expected": expected, "offset": None, "status": status,
           "residual": residual, "digits": digits, "ms": ms}
    out.update(extra)
    return out


def _report(label: str, cases: list[dict], **extra) -> dict:
    n_pass = sum(c["status"] == "pass" for c in cases)
    kinds: dict = {}
    for c in cases:
        if c["status"] != "pass":
            kinds[c["status"]] = kinds.get(c["status"], 0) + 1
    doc = {"suite": label, "cases": cases,
           "summary": {"pass": n_pass, "fail": len(cases) - n_pass, "failures_by_kind": kinds}}
    doc.update(extra)
    return doc


def _emit(doc: dict, as_json: bool, table_lines: Sequence[str]) -> None:
    if as_json:
        sys.stdout.write(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")
    else:
        for line in table_lines:
            print(line)


# --------------------------------------------------------------------------
# verbs
# --------------------------------------------------------------------------

def cmd_seq(args) -> int:
    indices = parse_range(args.n)
    if any(i < 0 for i in indices):
        raise UsageError("indices must be >= 0")
    k = parse_rational(args.k)
    fn = {
        "kekule": nt.kekule_c, "companion": nt.companion_d,
        "y": lambda i: nt.y_seq(i, k), "z": lambda i: nt.z_seq(i, k),
        "core": nt.core, "a019554": nt.a019554, "a000188": nt.a000188, "a083481": nt.a083481,
        "pell": nt.pell,
        "convergent": lambda i: nt.convergents_sqrt(args.radicand, i).fraction,
    }[args.name]
    values = [fn(i) for i in indices]
    cases = [_case(f"{args.name}[n={i}]", {"n": i}, str(v)) for i, v in zip(indices, values)]
    _emit(_report(f"seq:{args.name}", cases), args.json, [" ".join(str(v) for v in values)])
    return EXIT_OK


def cmd_integral(args) -> int:
    ctx = PrecisionContext(check_digits(args.digits))
    if args.n < 0:
        raise UsageError("--n must be >= 0")
    k = parse_rational(args.k)
    if k <= 0:
        raise UsageError("--k must be positive")
    start = time.perf_counter()
    num = inner_integral_numeric(args.n, k, ctx)
    closed = cf.inner_integral_closed(args.n, k, ctx)
    residual = abs(ctx.mp.mpf(num.value) - closed.value.value)
    ok = residual < hs.CLOSED_FORM_TOL
    ms = int((time.perf_counter() - start) * 1000)
    case = _case(f"integral[n={args.n},k={k}]", {"n": args.n, "k": k}, num.decimal(),
                 recognized=closed.value.decimal(), expected=closed.value.decimal(),
                 status="pass" if ok else "fail", residual=ctx.mp.nstr(residual, 3),
                 digits=ctx.digits, ms=ms, error_bound=num.error_decimal())
    _emit(_report("integral", [case]), args.json, [
        f"quadrature   {num.decimal()}  (+- {num.error_decimal()})",
        f"closed form  {closed.value.decimal()}",
        f"residual     {ctx.mp.nstr(residual, 3)}",
    ])
    return EXIT_OK if ok else EXIT_FAIL


def _recognize_any(value: BigReal, n: int, upper: Limit, ctx) -> str:
    if n == 0:
        if upper.radicand == 2 and upper.coeff.denominator == 1:
            m = int(upper.coeff)
            a, b = recognize_conj10(value, m, ctx)
            return hs._conj10_text(m, a, b)
        return str(recognize_log_surd(value, ctx))
    return str(recognize_surd_pi(value, ctx=ctx).factored())


def cmd_double(args) -> int:
    digits = check_digits(args.digits)
    if args.n < 0 or args.n % 2:
        raise UsageError("--n must be a non-negative even integer")
    upper, lower = parse_limit(args.upper), parse_limit(args.lower)
    ctx = PrecisionContext(digits)
    start = time.perf_counter()
    if lower.coeff == 0:
        cache = hs.IntegralCache(enabled=not args.no_cache)
        value = hs.cached_double(args.n, upper, digits, cache)
    else:
        from .realfield import double_integral_numeric
        value = double_integral_numeric(args.n, upper, ctx, lower=lower)
    try:
        recognized = _recognize_any(value, args.n, upper, ctx) if lower.coeff == 0 else ""
    except RecognitionError as exc:
        recognized = ""
        note = str(exc)
    else:
        note = ""
    ms = int((time.perf_counter() - start) * 1000)
    case = _case(f"double[n={args.n},upper={upper.tag},lower={lower.tag}]",
                 {"n": args.n, "upper": upper.tag, "lower": lower.tag}, value.decimal(),
                 recognized=recognized, residual=value.error_decimal(), digits=digits, ms=ms,
                 error_bound=value.error_decimal(), **({"note": note} if note else {}))
    _emit(_report("double", [case]), args.json, [
        f"value       {value.decimal()}  (+- {value.error_decimal()})",
        f"recognized  {recognized or '(none)'}",
    ])
    return EXIT_OK


def _read_value(text: str) -> str:
    if text.startswith("@"):
        try:
            return Path(text[1:]).read_text(encoding="utf-8").strip()
        except OSError as exc:
            raise UsageError(f"cannot read {text[1:]}: {exc}") from None
    return text.strip()


def cmd_recognize(args) -> int:
    digits = check_digits(args.digits)
    ctx = PrecisionContext(digits)
    raw = _read_value(args.value)
    try:
        value = BigReal.from_decimal(raw, args.error_bound, digits)
    except (ValueError, TypeError):
        raise UsageError(f"not a decimal number: {raw[:40]!r}") from None
    if args.form == "conj10" and (args.m is None or args.m < 1):
        raise UsageError("--form conj10 needs --m >= 1")
    start = time.perf_counter()
    if args.form == "surd":
        form = recognize_surd_pi(value, ctx=ctx)
        text = str(form.factored())
        synth = form.value(ctx).value
    elif args.form == "logsurd":
        lform = recognize_log_surd(value, ctx)
        text, synth = str(lform), lform.value(ctx).value
    else:
        a, b = recognize_conj10(value, args.m, ctx)
        text = hs._conj10_text(args.m, a, b)
        synth = hs._conj10_value(args.m, a, b, ctx.mp)
    residual = ctx.mp.nstr(abs(ctx.mp.mpf(value.value) - synth), 3)
    ms = int((time.perf_counter() - start) * 1000)
    case = _case(f"recognize[form={args.form}]", {"form": args.form}, value.decimal(),
                 recognized=text, residual=residual, digits=digits, ms=ms)
    _emit(_report("recognize", [case]), args.json, [text])
    return EXIT_OK


def _verify_config(args) -> hs.HarnessConfig:
    suites = [s.strip() for s in args.suite.split(",") if s.strip()]
    cfg = dict(suites=suites, digits=check_digits(args.digits), n_max=args.n_max, N=args.N,
               series_N=args.series_N, offline=args.offline, jobs=args.jobs,
               use_cache=not args.no_cache)
    if args.k:
        cfg["k"] = [parse_rational(x) for x in args.k.split(",")]
    if args.m:
        cfg["m"] = parse_range(args.m)
    if args.n:
        cfg["n"] = parse_range(args.n)
    if args.range_:
        if len(suites) != 1 or suites[0] not in hs.CONJECTURES:
            raise UsageError("--range needs a single conjecture suite; use --m/--n otherwise")
        cfg[hs.CONJ_DEFAULTS[suites[0]][0]] = parse_range(args.range_)
    return hs.HarnessConfig(**cfg)


def cmd_verify(args) -> int:
    cfg = _verify_config(args)
    try:
        cfg.validate()
        hs.build_cases(cfg, cfg.validate())
    except hs.ConfigError as exc:
        raise UsageError(str(exc)) from None
    report = hs.run_suite(cfg)
    if args.out:
        report.write(args.out)
    lines = []
    for r in report.results:
        rec = r.form or r.recognized
        lines.append(f"{r.status:<20} {r.case.id:<40} {rec}  [residual {r.residual}]")
    s = report.summary()
    lines.append(f"{s['pass']} passed, {s['fail']} failed")
    for suite, entry in report.offsets.items():
        if entry.get("offset") is not None:
            lines.append(f"offset {suite}: {entry['offset']:+d}" + (" (ambiguous)" if entry["ambiguous"] else ""))
    if args.out:
        lines.append(f"report written to {args.out}")
    if args.json:
        sys.stdout.write(report.dumps())
    else:
        print("\n".join(lines))
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_oeis(args) -> int:
    try:
        seq_id = oeis.validate_id(args.id)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.terms < 1:
        raise UsageError("--terms must be >= 1")
    bf = oeis.get_terms(seq_id, args.terms, args.offline).head(args.terms)
    cases = [_case(f"{seq_id}[{i}]", {"index": i}, str(v)) for i, v in bf.terms]
    _emit(_report(f"oeis:{seq_id}", cases, source=bf.source), args.json,
          [", ".join(str(v) for v in bf.values) + f"   ({bf.source})"])
    return EXIT_OK


def cmd_cache(args) -> int:
    cache = hs.IntegralCache()
    if args.action == "stats":
        info = cache.stats()
        lines = [f"{k}: {v}" for k, v in info.items()]
    else:
        removed = cache.clear()
        info = {"path": str(cache.path), "removed": removed}
        lines = [f"removed {removed} entries from {cache.path}"]
    _emit(_report(f"cache:{args.action}", [], cache=info), args.json, lines)
    return EXIT_OK


COMMANDS = {"seq": cmd_seq, "integral": cmd_integral, "double": cmd_double,
            "recognize": cmd_recognize, "verify": cmd_verify, "oeis": cmd_oeis, "cache": cmd_cache}


def _verb_parsers(parser: argparse.ArgumentParser) -> dict:
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return dict(action.choices)
    return {}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits on --help and on bad syntax
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return COMMANDS[args.verb](args)
    except UsageError as exc:
        verb_parser = _verb_parsers(parser).get(args.verb, parser)
        print(verb_parser.format_usage().rstrip(), file=sys.stderr)
        print(f"kekule {args.verb}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RecognitionError, QuadratureError, oeis.OEISError, cf.VerificationError,
            ArithmeticError, DomainError) as exc:
        print(f"kekule {args.verb}: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
