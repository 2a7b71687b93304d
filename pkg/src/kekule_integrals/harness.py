"""Verification suites, reports and the integral cache.

A suite expands into :class:`ConjectureCase` objects, each case is evaluated
independently (optionally in worker processes) into a :class:`CaseResult`,
and the results are gathered into a :class:`Report` in canonical order.

Conjecture suites compare one recognized component per case (for example
``c=2``) with a predicted integer sequence.  Because printed term lists and
prose sometimes disagree by a small index shift, every shift in
[-3, 3] is tried; a shift is accepted when it is the only one matching at
least five consecutive cases (or all of them if there are fewer), and it is
written to the report's offset ledger.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
import threading
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

from . import closedform as cf
from . import numtheory as nt
from . import oeis
from .realfield import (
    BigReal,
    Limit,
    PrecisionContext,
    QuadratureError,
    complex_log_integral,
    double_integral_numeric,
    inner_integral_numeric,
    mpcontext,
)
from .recognition import (
    LogSurdForm,
    RecognitionError,
    SurdForm,
    recognize_conj10,
    recognize_log_surd,
    recognize_surd_pi,
)

CONJECTURES = tuple(f"conj{i}" for i in range(1, 11))
SUITES = ("lemma1", "lemma2", "lemma3", "theorem1", "theorem2", *CONJECTURES, "prop1", "prop2", "series")
STATUSES = ("pass", "fail", "recognition_failure", "quadrature_failure")

MAX_DIGITS = 300
ESCALATE_ABOVE = 1e-45
OFFSET_RANGE = 3
ALIGN_RUN = 5
CLOSED_FORM_TOL = 1e-40
PROP_TOL = 1e-25
CONJ4_TOL = 1e-35
SERIES_TOL = 1e-4


class ConfigError(ValueError):
    """Invalid suite configuration (reported before any computation)."""


# --------------------------------------------------------------------------
# report schema
# --------------------------------------------------------------------------

REPORT_SCHEMA = {
    "type": "object",
    "required": ["suite", "cases", "summary"],
    "properties": {
        "suite": {"type": "string"},
        "cases": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "params", "computed", "recognized", "expected",
                             "offset", "status", "residual", "digits", "ms"],
                "properties": {
                    "id": {"type": "string"},
                    "params": {"type": "object", "additionalProperties": {"type": "string"}},
                    "computed": {"type": "string"},
                    "recognized": {"type": "string"},
                    "expected": {"type": "string"},
                    "offset": {"type": ["integer", "null"]},
                    "status": {"enum": list(STATUSES)},
                    "residual": {"type": "string"},
                    "digits": {"type": "integer", "minimum": 0},
                    "ms": {"type": "integer", "minimum": 0},
                },
            },
        },
        "summary": {
            "type": "object",
            "required": ["pass", "fail", "failures_by_kind"],
            "properties": {
                "pass": {"type": "integer", "minimum": 0},
                "fail": {"type": "integer", "minimum": 0},
                "failures_by_kind": {"type": "object", "additionalProperties": {"type": "integer"}},
            },
        },
    },
}

#: top-level keys that vary between otherwise identical runs
TIMING_KEYS = ("timing",)
CASE_TIMING_KEYS = ("ms",)


# --------------------------------------------------------------------------
# cases, results, reports
# --------------------------------------------------------------------------

def _param_text(v) -> str:
    if isinstance(v, Limit):
        return v.tag
    return str(v)


@dataclass(frozen=True)
class ConjectureCase:
    suite: str
    params: tuple  # ((name, value), ...) in declaration order
    digits: int = 60

    def __post_init__(self):
        if self.suite not in SUITES:
            raise ConfigError(f"unknown suite {self.suite!r}")
        missing = [p for p in REQUIRED_PARAMS[self.suite] if p not in dict(self.params)]
        if missing:
            raise ConfigError(f"{self.suite}: missing params {missing}")

    @property
    def p(self) -> dict:
        return dict(self.params)

    @property
    def id(self) -> str:
        inner = ",".join(f"{k}={_param_text(v)}" for k, v in self.params)
        return f"{self.suite}[{inner}]"

    def params_json(self) -> dict:
        return {k: _param_text(v) for k, v in self.params}


REQUIRED_PARAMS = {
    "lemma1": ("n",),
    "lemma2": ("kind", "n", "k"),
    "lemma3": ("n", "k"),
    "theorem1": ("kind", "n"),
    "theorem2": ("n", "k"),
    "prop1": ("kind",),
    "prop2": ("n",),
    "series": ("which", "N"),
    **{c: ("n", "upper") for c in CONJECTURES},
}


@dataclass
class CaseResult:
    case: ConjectureCase
    computed: str
    recognized: str
    expected: str
    residual: str
    status: str
    digits_used: int
    duration_ms: int
    offset: Optional[int] = None
    form: str = ""
    note: str = ""
    index: Optional[int] = None  # sequence index used for offset alignment
    cache_hits: int = 0
    predictions: dict = field(default_factory=dict)  # offset -> expected component
    synth_ok: bool = False

    def to_json(self) -> dict:
        out = {
            "id": self.case.id,
            "params": self.case.params_json(),
            "computed": self.computed,
            "recognized": self.recognized,
            "expected": self.expected,
            "offset": self.offset,
            "status": self.status,
            "residual": self.residual,
            "digits": self.digits_used,
            "ms": self.duration_ms,
        }
        if self.form:
            out["form"] = self.form
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class Report:
    suite: str
    results: list
    environment: dict = field(default_factory=dict)
    offsets: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.status == "pass" for r in self.results)

    def summary(self) -> dict:
        kinds: dict = {}
        for r in self.results:
            if r.status != "pass":
                kinds[r.status] = kinds.get(r.status, 0) + 1
        n_pass = sum(r.status == "pass" for r in self.results)
        return {"pass": n_pass, "fail": len(self.results) - n_pass,
                "failures_by_kind": dict(sorted(kinds.items()))}

    def suite_summaries(self) -> dict:
        out: dict = {}
        for r in self.results:
            s = out.setdefault(r.case.suite, {"pass": 0, "fail": 0})
            s["pass" if r.status == "pass" else "fail"] += 1
        return out

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "cases": [r.to_json() for r in self.results],
            "summary": self.summary(),
            "suites": self.suite_summaries(),
            "environment": self.environment,
            "offsets": self.offsets,
            "notes": self.notes,
            "timing": self.timing,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=False, ensure_ascii=False) + "\n"

    def write(self, path) -> None:
        oeis.atomic_write_text(Path(path), self.dumps())


def strip_timing(report_json: dict) -> dict:
    """Copy of a report dict without the fields that legitimately vary between runs."""
    out = {k: v for k, v in report_json.items() if k not in TIMING_KEYS}
    out["cases"] = [{k: v for k, v in c.items() if k not in CASE_TIMING_KEYS}
                    for c in report_json.get("cases", [])]
    return out


# --------------------------------------------------------------------------
# integral cache
# --------------------------------------------------------------------------

def default_cache_root() -> Path:
    root = os.environ.get("KEKULE_CACHE_DIR")
    return Path(root) if root else Path.home() / ".cache" / "kekule-integrals"


class IntegralCache:
    """JSON-lines store of integral values keyed by kind, n, exact limit tag.

    Records: {key, value_decimal, error_bound_decimal, digits, created_at}.
    Entries computed at fewer digits than requested are ignored (and
    superseded on the next store).  Writes rewrite the whole file through
    a temporary file and os.replace under a lock.
    """

    FILENAME = "integrals.jsonl"

    def __init__(self, directory=None, enabled: bool = True):
        self.directory = Path(directory) if directory is not None else default_cache_root()
        self.enabled = enabled
        self.hits = 0
        self.misses = 0
        self._lock = threading.Lock()

    @property
    def path(self) -> Path:
        return self.directory / self.FILENAME

    def _read(self) -> dict:
        records: dict = {}
        if not self.path.is_file():
            return records
        with open(self.path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError:
                    continue  # a torn line from a foreign writer; ignore it
                prev = records.get(rec.get("key"))
                if prev is None or rec["digits"] >= prev["digits"]:
                    records[rec["key"]] = rec
        return records

    def get(self, key: str, digits: int) -> Optional[BigReal]:
        if not self.enabled:
            return None
        rec = self._read().get(key)
        if rec is None or rec["digits"] < digits:
            self.misses += 1
            return None
        self.hits += 1
        mp = PrecisionContext(digits).mp
        return BigReal(mp.mpf(rec["value_decimal"]), mp.mpf(rec["error_bound_decimal"]), digits)

    def put(self, key: str, value: BigReal) -> None:
        if not self.enabled:
            return
        mp = mpcontext(value.digits + 20)
        rec = {
            "key": key,
            "value_decimal": mp.nstr(mp.mpf(value.value), value.digits + 10, strip_zeros=False),
            "error_bound_decimal": mp.nstr(mp.mpf(value.error_bound) + mp.mpf(10) ** (-(value.digits + 9)), 5),
            "digits": value.digits,
            "created_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        }
        with self._lock:
            records = self._read()
            prev = records.get(key)
            if prev is not None and prev["digits"] > value.digits:
                return
            records[key] = rec
            text = "".join(json.dumps(records[k], sort_keys=True) + "\n" for k in sorted(records))
            oeis.atomic_write_text(self.path, text)

    def stats(self) -> dict:
        records = self._read() if self.enabled else {}
        size = self.path.stat().st_size if self.path.is_file() else 0
        return {"path": str(self.path), "entries": len(records), "bytes": size,
                "hits": self.hits, "misses": self.misses}

    def clear(self) -> int:
        n = len(self._read())
        if self.path.is_file():
            self.path.unlink()
        return n


def double_key(n: int, upper: Limit) -> str:
    return f"double:n={n}:upper={upper.tag}"


def cached_double(n: int, upper: Limit, digits: int, cache: Optional[IntegralCache]) -> BigReal:
    key = double_key(n, upper)
    hit = cache.get(key, digits) if cache else None
    if hit is not None:
        return hit
    value = double_integral_numeric(n, upper, PrecisionContext(digits))
    if cache:
        cache.put(key, value)
    return value


def escalating_double(n: int, upper: Limit, digits: int, cache) -> tuple[BigReal, int]:
    """Double integral, doubling the precision while the error bound is >= 1e-45."""
    while True:
        value = cached_double(n, upper, digits, cache)
        if float(value.error_bound) < ESCALATE_ABOVE or digits * 2 > MAX_DIGITS:
            return value, digits
        digits *= 2


# --------------------------------------------------------------------------
# configuration
# --------------------------------------------------------------------------

DEFAULT_K_SET = (Fraction(1, 2), 1, 2, 3, 4, Fraction(7, 3))

#: default index ranges per conjecture when none are given
CONJ_DEFAULTS = {
    "conj1": ("n", list(range(2, 21, 2))),
    "conj2": ("m", list(range(1, 8))),
    "conj3": ("n", [2, 6, 10, 14, 18]),
    "conj4": ("n", list(range(2, 13, 2))),
    "conj5": ("m", list(range(1, 17))),
    "conj6": ("m", list(range(1, 17))),
    "conj7": ("m", list(range(1, 17))),
    "conj8": ("m", list(range(1, 21))),
    "conj9": ("m", list(range(1, 21))),
    "conj10": ("m", list(range(1, 21))),
}

#: fixed double-integral index n for the m-indexed conjectures
CONJ_FIXED_N = {"conj2": 4, "conj5": 2, "conj6": 2, "conj7": 2, "conj8": 0, "conj9": 4, "conj10": 0}


@dataclass
class HarnessConfig:
    suites: Sequence[str] = ()
    digits: int = 60
    n_max: int = 20
    k: Sequence = DEFAULT_K_SET
    n: Optional[Sequence[int]] = None
    m: Optional[Sequence[int]] = None
    N: int = 10_000
    series_N: int = 100_000
    cache_dir: Optional[str] = None
    use_cache: bool = True
    offline: bool = True
    jobs: int = 1

    @classmethod
    def from_mapping(cls, cfg) -> "HarnessConfig":
        if isinstance(cfg, HarnessConfig):
            return cfg
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a mapping")
        known = set(cls.__dataclass_fields__)
        unknown = set(cfg) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**cfg)

    def validate(self) -> list[str]:
        suites = list(self.suites)
        if "all" in suites:
            suites = list(SUITES)
        bad = [s for s in suites if s not in SUITES]
        if bad:
            raise ConfigError(f"unknown suites: {bad}")
        if not isinstance(self.digits, int) or not 20 <= self.digits <= MAX_DIGITS:
            raise ConfigError(f"digits must be in [20, {MAX_DIGITS}]")
        if not isinstance(self.n_max, int) or not 0 <= self.n_max <= 100:
            raise ConfigError("n_max must be in [0, 100]")
        for name in ("n", "m"):
            vals = getattr(self, name)
            if vals is not None:
                if any(not isinstance(v, int) or isinstance(v, bool) for v in vals):
                    raise ConfigError(f"{name} values must be integers")
                if any(v < 0 or v > 40 for v in vals):
                    raise ConfigError(f"{name} values must be in [0, 40]")
        try:
            ks = [nt.as_rational(k) for k in self.k]
        except TypeError as exc:
            raise ConfigError(f"k values must be exact rationals: {exc}") from None
        if any(k <= 0 for k in ks):
            raise ConfigError("k values must be positive")
        if not isinstance(self.N, int) or self.N < 1 or not isinstance(self.series_N, int) or self.series_N < 1:
            raise ConfigError("N must be a positive integer")
        if not isinstance(self.jobs, int) or self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        return list(dict.fromkeys(suites))


def _conj_cases(suite: str, cfg: HarnessConfig) -> list[ConjectureCase]:
    var, default = CONJ_DEFAULTS[suite]
    values = getattr(cfg, var)
    values = list(default if values is None else values)
    d = cfg.digits
    cases = []
    if var == "n":
        upper = {"conj1": Limit(1), "conj3": Limit(Fraction(1, 2)), "conj4": Limit(Fraction(1, 3))}[suite]
        for n in values:
            if n < 2 or n % 2 or (suite == "conj3" and n % 4 != 2):
                raise ConfigError(f"{suite}: n={n} is outside the conjecture's range")
            cases.append(ConjectureCase(suite, (("n", n), ("upper", upper)), d))
        return cases
    n_fixed = CONJ_FIXED_N[suite]
    if suite == "conj2" and cfg.n is not None:
        ns = list(cfg.n)
        if any(n < 2 or n % 2 for n in ns):
            raise ConfigError("conj2: n must be even and >= 2")
    else:
        ns = [n_fixed]
    for n in ns:
        for m in values:
            if m < 1:
                raise ConfigError(f"{suite}: m must be >= 1")
            if suite in ("conj7", "conj8", "conj9"):
                upper = Limit(Fraction(m + 1, m))
            elif suite == "conj10":
                upper = Limit(Fraction(m), 2)
            else:
                upper = Limit(Fraction(m))
            cases.append(ConjectureCase(suite, (("n", n), ("m", m), ("upper", upper)), d))
    return cases


def build_cases(cfg: HarnessConfig, suites: Sequence[str]) -> list[ConjectureCase]:
    d = cfg.digits
    out: list[ConjectureCase] = []
    ks = [nt.as_rational(k) for k in cfg.k]
    for suite in suites:
        if suite == "lemma1":
            out += [ConjectureCase(suite, (("n", n), ("k", 2)), d) for n in range(cfg.n_max + 1)]
        elif suite == "lemma2":
            base = [ConjectureCase(suite, (("kind", kind), ("n", n), ("k", k)), d)
                    for k in ks for kind, n in (("P0", 0), ("P1", 2))]
            body = [ConjectureCase(suite, (("kind", "triangular"), ("n", n), ("k", k)), d)
                    for k in ks for n in range(min(cfg.n_max, 12) + 1)]
            out += base + body
        elif suite == "lemma3":
            out += [ConjectureCase(suite, (("n", n), ("k", k)), d)
                    for k in range(1, 9) for n in range(0, 41)]
        elif suite == "theorem1":
            out += [ConjectureCase(suite, (("kind", "kekule"), ("n", n)), d) for n in range(13)]
            out += [ConjectureCase(suite, (("kind", "companion"), ("n", n)), d) for n in range(61)]
        elif suite == "theorem2":
            out += [ConjectureCase(suite, (("n", n), ("k", k)), d)
                    for k in ks for n in range(cfg.n_max + 1)]
        elif suite in CONJECTURES:
            out += _conj_cases(suite, cfg)
        elif suite == "prop1":
            out += [ConjectureCase(suite, (("kind", "coefficient"), ("n", n)), d) for n in range(1, 17)]
            out += [ConjectureCase(suite, (("kind", "fourier"), ("x", x), ("N", cfg.N)), d)
                    for x in ("0", "pi/2", "pi")]
        elif suite == "prop2":
            out += [ConjectureCase(suite, (("n", n),), d) for n in range(1, 17)]
        elif suite == "series":
            out += [ConjectureCase(suite, (("which", w), ("N", cfg.series_N)), d) for w in cf.SERIES]
    return out


# --------------------------------------------------------------------------
# evaluation helpers
# --------------------------------------------------------------------------

def _dec(x, digits: int = 60) -> str:
    mp = mpcontext(digits + 15)
    return mp.nstr(mp.mpf(x), digits, strip_zeros=False)


def _res(x) -> str:
    return mpcontext(30).nstr(abs(x), 3)


def _numeric_match(case, computed: BigReal, reference, expected_text: str, tol: float) -> CaseResult:
    """Result for suites that compare a computed number with a closed form."""
    mp = mpcontext(case.digits + 40)
    ref = reference.value if isinstance(reference, BigReal) else reference
    residual = abs(mp.mpf(computed.value) - mp.mpf(ref))
    ok = residual < tol
    return CaseResult(case, _dec(computed.value, case.digits), expected_text if ok else "no match",
                      expected_text, _res(residual), "pass" if ok else "fail", case.digits, 0)


def _frac_text(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _eval_lemma1(case):
    n = case.p["n"]
    ctx = PrecisionContext(case.digits)
    num = inner_integral_numeric(n, 2, ctx)
    closed = cf.lemma_form(n, 2, ctx)
    if n % 2:
        text = "0"
    else:
        j = n // 2
        text = f"π (-{nt.kekule_c(j)} + {nt.companion_d(j)} √(2/3))"
    return _numeric_match(case, num, closed, text, CLOSED_FORM_TOL)


def _eval_lemma2(case):
    n, k, kind = case.p["n"], case.p["k"], case.p["kind"]
    ctx = PrecisionContext(case.digits)
    mp = ctx.mp
    num = inner_integral_numeric(n, k, ctx)
    kk = mp.mpf(Fraction(k).numerator) / Fraction(k).denominator
    if kind == "P0":
        ref = 2 * mp.sqrt(1 + 1 / kk) * mp.pi / (1 + kk)
        text = f"2 √(1 + 1/k) π/(1 + k), k={_frac_text(k)}"
    elif kind == "P1":
        # the elementary evaluation as printed, principal logarithms throughout
        root = mp.sqrt(kk) * mp.sqrt(1 + kk)
        inner = mp.pi + 2j * mp.log(-1j / mp.sqrt(kk / (1 + kk))) + 1j * mp.log(kk / (1 + kk))
        w = (-4 * root * mp.pi + (1 + 2 * kk) * inner) / root
        if abs(w.imag) > mp.mpf(10) ** (-case.digits):
            return CaseResult(case, _dec(num.value, case.digits), "complex value", "real value",
                              _res(w.imag), "fail", case.digits, 0)
        ref = w.real
        text = f"P(1,k) elementary form, k={_frac_text(k)}"
    else:
        ref = cf.lemma_form(n, k, ctx).value
        text = f"π (-y + z √(2/T_k)), n={n}, k={_frac_text(k)}"
    return _numeric_match(case, num, ref, text, CLOSED_FORM_TOL)


def _eval_lemma3(case):
    n, k = case.p["n"], case.p["k"]
    ctx = PrecisionContext(case.digits)
    y, z = cf.yz_closed(n, k, ctx)
    ey, ez = nt.y_seq(n, k), nt.z_seq(n, k)
    mp = mpcontext(case.digits + 15 + len(str(ez)))
    residual = max(abs(mp.mpf(y.value) - ey), abs(mp.mpf(z.value) - ez))
    ok = residual < CLOSED_FORM_TOL
    text = f"y={ey}, z={ez}"
    got = f"y={mp.nint(y.value)}, z={mp.nint(z.value)}" if ok else "no match"
    return CaseResult(case, f"{_dec(y.value, case.digits)}, {_dec(z.value, case.digits)}",
                      got if ok else "no match", text, _res(residual), "pass" if ok else "fail",
                      case.digits, 0)


def _eval_theorem1(case):
    n, kind = case.p["n"], case.p["kind"]
    ctx = PrecisionContext(case.digits)
    if kind == "kekule":
        v = cf.kekule_integral_value(n, ctx)
        expected = nt.kekule_c(n)
    else:
        v = cf.dn_trig(n, ctx).value
        expected = nt.companion_d(n)
    mp = mpcontext(case.digits + 15 + n + 2)
    nearest = mp.nint(v.value)
    residual = abs(mp.mpf(v.value) - nearest)
    got = int(nearest)
    tol = 1e-30 if kind == "kekule" else 0.5
    ok = got == expected and residual < tol
    return CaseResult(case, _dec(v.value, case.digits), str(got), str(expected), _res(residual),
                      "pass" if ok else "fail", case.digits, 0)


def _eval_theorem2(case):
    n, k = case.p["n"], case.p["k"]
    ctx = PrecisionContext(case.digits)
    num = inner_integral_numeric(n, k, ctx)
    closed = cf.inner_integral_closed(n, k, ctx)
    if closed.exact_parts and n % 2 == 0:
        y, z = closed.exact_parts
        text = f"π (-{_frac_text(y)} + {_frac_text(z)}·2/√(k(k+1))), k={_frac_text(k)}"
    else:
        text = "0"
    tol = CLOSED_FORM_TOL
    r = _numeric_match(case, num, closed.value, text, tol)
    combined = float(num.error_bound) + float(closed.value.error_bound)
    if r.status == "pass" and float(r.residual) > 10 * combined + 1e-70:
        r.note = "residual exceeds the combined error bounds"
    return r


def _eval_prop(case):
    ctx = PrecisionContext(case.digits)
    mp = ctx.mp
    if case.suite == "prop1" and case.p["kind"] == "fourier":
        x, N = case.p["x"], case.p["N"]
        # the partial sums need far less than working precision
        fctx = PrecisionContext(30)
        got = cf.fourier_series_eval(x, N, fctx)
        target = cf.principal_log_sin_plus_cos(x, fctx)
        res = max(abs(got.re.value - target.re.value), abs(got.im.value - target.im.value))
        ok = res <= 10 / N
        note = "tolerance 10/N"
        if not ok:
            note += f"; signed real residual {_dec(got.re.value - target.re.value, 6)}"
        tgt = f"{_dec(target.re.value, 20)} + {_dec(target.im.value, 20)} i"
        return CaseResult(case, f"{_dec(got.re.value, 20)} + {_dec(got.im.value, 20)} i",
                          tgt if ok else "no match", tgt, _res(res), "pass" if ok else "fail", 30, 0, note=note)
    mode = "cos" if case.suite == "prop1" else "sin"
    n = case.p["n"]
    num = complex_log_integral(mode, n, ctx)
    closed = cf.prop_fourier_coeff(mode, n, ctx)
    dre = abs(mp.mpf(num.re.value) - closed.re.value)
    dim = abs(mp.mpf(num.im.value) - closed.im.value)
    res = max(dre, dim)
    ok = res < PROP_TOL
    text = f"{_dec(closed.re.value, 30)} + {_dec(closed.im.value, 30)} i"
    note = ""
    if not ok:
        parts = [name for name, d in (("real", dre), ("imaginary", dim)) if d >= PROP_TOL]
        note = f"{' and '.join(parts)} part differs"
        if dre >= PROP_TOL and abs(mp.mpf(num.re.value) + closed.re.value) < PROP_TOL:
            note += "; computed real part is the negative of the stated one"
    return CaseResult(case, f"{_dec(num.re.value, case.digits)} + {_dec(num.im.value, case.digits)} i",
                      text if ok else "no match", text, _res(res), "pass" if ok else "fail",
                      case.digits, 0, note=note)


def _eval_series(case):
    which, N = case.p["which"], case.p["N"]
    ctx = PrecisionContext(30)
    got = cf.series_partial(which, N, ctx)
    target = cf.series_target(which, ctx)
    res = abs(got.value - target)
    ok = res <= min(SERIES_TOL, 10 / N)
    text = "-π/√2" if which == "sqrt2" else "-ln(2)/4"
    return CaseResult(case, _dec(got.value, 30), text if ok else "no match", text, _res(res),
                      "pass" if ok else "fail", 30, 0, note=f"target {_dec(target, 20)}")


# ---- conjectures ---------------------------------------------------------

def _conj10_text(m: int, a: int, b: int) -> str:
    radicand = f"{2 * m} + √2" if b == 1 else f"{b} ({2 * m} + √2)"
    coef = "" if a == 1 else f"{a} "
    return f"2 π ln(1 + {2 * m} √2 + {coef}√({radicand}))"


def _conj10_value(m: int, a: int, b: int, mp):
    s2 = mp.sqrt(2)
    return 2 * mp.pi * mp.log(1 + 2 * m * s2 + a * mp.sqrt(b * (2 * m + s2)))


def _imag_power(n: int) -> int:
    return (1, 0, -1, 0)[n % 4]


def conj1_prefactor(n: int) -> Fraction:
    """(1/48)(-5 + i^n)(2 + i^n) n for even n (i^n = +-1 there)."""
    if n % 2:
        raise nt.DomainError("n must be even")
    u = _imag_power(n)
    return Fraction((-5 + u) * (2 + u) * n, 48)


def _conj1_forms(n: int, idx: int) -> Optional[tuple[SurdForm, SurdForm]]:
    if idx < 1:
        return None
    a_num = nt.convergents_sqrt(2, idx).numerator
    p_den = nt.pell(idx)
    if (n // 2) % 2 == 0:
        stated = SurdForm(2 * p_den, -2 * p_den, a_num, 2)
        flipped = SurdForm(-2 * p_den, -2 * p_den, a_num, 2)
    else:
        stated = SurdForm(a_num, -a_num, p_den, 2)
        flipped = SurdForm(-a_num, -a_num, p_den, 2)
    return stated, flipped


def _conj3_form(idx: int) -> Optional[SurdForm]:
    if idx < 1:
        return None
    conv = nt.convergents_sqrt(3, idx)
    return SurdForm(conv.numerator, -conv.numerator, conv.denominator, 3)


def _conj4_form(n: int) -> Optional[SurdForm]:
    if n < 2 or n % 2:
        return None
    h = 3 ** (n // 2)
    return SurdForm(Fraction(4 * h - 4, h), 1, 0, 1)


def _surd_hints(suite: str, m: int) -> list[int]:
    if suite == "conj1":
        return [2]
    if suite == "conj3":
        return [3]
    if suite in ("conj2", "conj5", "conj6"):
        return [nt.core(m * (m + 1))]
    if suite in ("conj7", "conj9"):
        return [nt.core((m + 1) * (2 * m + 1))]
    return []


def _predict(suite: str, case: ConjectureCase, index: int) -> Optional[str]:
    """Expected component string for sequence index ``index`` (None if undefined)."""
    if index < 0:
        return None
    try:
        if suite == "conj2":
            return f"d={nt.a083481(index)}" if index >= 1 else None
        if suite == "conj5":
            return f"c={nt.a000188(index)}" if index >= 1 else None
        if suite in ("conj6", "conj7"):
            return f"|b|={nt.a019554(index)}" if index >= 1 else None
        if suite == "conj8":
            return f"a^2={nt.a168077(index)}, b={nt.a165367(index)}"
        if suite == "conj9":
            return f"c={nt.a165367(index)}"
        if suite == "conj10":
            return f"b={nt.a007913(index)}" if index >= 1 else None
    except nt.DomainError:
        return None
    raise KeyError(suite)


def _eval_conjecture(case: ConjectureCase, cache: Optional[IntegralCache]) -> CaseResult:
    suite, p = case.suite, case.p
    n, upper = p["n"], p["upper"]
    m = p.get("m")
    try:
        value, digits = escalating_double(n, upper, case.digits, cache)
    except QuadratureError as exc:
        return CaseResult(case, _dec(exc.estimate.value, case.digits), "", "", "nan",
                          "quadrature_failure", case.digits, 0, note=str(exc))
    ctx = PrecisionContext(digits)
    mp = ctx.mp
    scale = Fraction(1)
    if suite == "conj1":
        scale = conj1_prefactor(n)
    elif suite == "conj3":
        scale = Fraction(n, 4)
    elif suite == "conj4":
        scale = Fraction(n)
    v = value.scale(scale) if scale != 1 else value
    computed = _dec(v.value, digits)

    def refine(D):
        return cached_double(n, upper, D, cache).scale(scale)

    base = dict(case=case, computed=computed, digits_used=digits, duration_ms=0)
    try:
        if suite == "conj8":
            form = recognize_log_surd(v, ctx, refine=refine)
            recognized = f"a^2={form.a * form.a}, b={form.b}"
            rendered = str(form)
            synth = form.value(ctx).value
            extra = f"c={form.c}, d={form.d}; derived d=core((m+1)(2m+1))={nt.core((m + 1) * (2 * m + 1))}"
        elif suite == "conj10":
            a, b = recognize_conj10(v, m, ctx)
            recognized = f"b={b}"
            rendered = _conj10_text(m, a, b)
            synth = _conj10_value(m, a, b, mp)
            extra = f"a={a}; derived a=2·A000188(m)={2 * nt.a000188(m)}"
        else:
            raw = recognize_surd_pi(v, ctx=ctx, hints=_surd_hints(suite, m or 0), refine=refine)
            form = raw.factored()
            rendered = str(form)
            synth = form.value(ctx).value
            extra = ""
            if suite == "conj2":
                recognized = f"d={form.d}"
            elif suite == "conj5":
                recognized = f"c={abs(int(form.c))}"
            elif suite in ("conj6", "conj7"):
                recognized = f"|b|={abs(int(form.b))}"
            elif suite == "conj9":
                recognized = f"c={abs(int(form.c))}"
            else:
                recognized = rendered
    except RecognitionError as exc:
        return CaseResult(**base, recognized="", expected="", residual="nan",
                          status="recognition_failure", note=str(exc))

    residual = abs(mp.mpf(v.value) - synth)
    tol = 10 * (mp.mpf(v.error_bound) + mp.mpf(10) ** (-digits) * max(1, abs(v.value)))
    synth_ok = residual <= tol
    res = CaseResult(**base, recognized=recognized, expected="", residual=_res(residual),
                     status="fail", form=rendered, note=extra, synth_ok=bool(synth_ok))

    if suite in ("conj1", "conj3", "conj4"):
        res.index = n // 2 if suite != "conj4" else n
        for s in range(-OFFSET_RANGE, OFFSET_RANGE + 1):
            if suite == "conj1":
                forms = _conj1_forms(n, n // 2 + s)
                if forms is None:
                    continue
                stated, flipped = (str(f) for f in forms)
                if recognized == flipped and recognized != stated:
                    res.predictions[s] = (flipped, "-")
                else:
                    res.predictions[s] = (stated, "+")
            elif suite == "conj3":
                f = _conj3_form(n // 2 + s)
                if f is not None:
                    res.predictions[s] = (str(f), "")
            else:
                f = _conj4_form(n + 2 * s)
                if f is not None:
                    res.predictions[s] = (str(f), "")
        if suite == "conj4":
            # the claimed value is explicit: compare numerically at its stated tolerance
            exp_val = _conj4_form(n).value(ctx).value
            res.synth_ok = bool(abs(mp.mpf(v.value) - exp_val) < CONJ4_TOL)
    else:
        res.index = m
        for s in range(-OFFSET_RANGE, OFFSET_RANGE + 1):
            pred = _predict(suite, case, m + s)
            if pred is not None:
                res.predictions[s] = (pred, "")
    return res


def evaluate_case(case: ConjectureCase, cache_dir: Optional[str] = None, use_cache: bool = True) -> CaseResult:
    """Evaluate one case; exceptions become failure statuses, never escape."""
    cache = IntegralCache(cache_dir, enabled=use_cache) if case.suite in CONJECTURES else None
    start = time.perf_counter()
    try:
        if case.suite in CONJECTURES:
            result = _eval_conjecture(case, cache)
        else:
            handler = {
                "lemma1": _eval_lemma1, "lemma2": _eval_lemma2, "lemma3": _eval_lemma3,
                "theorem1": _eval_theorem1, "theorem2": _eval_theorem2,
                "prop1": _eval_prop, "prop2": _eval_prop, "series": _eval_series,
            }[case.suite]
            result = handler(case)
    except QuadratureError as exc:
        result = CaseResult(case, _dec(exc.estimate.value, case.digits), "", "", "nan",
                            "quadrature_failure", case.digits, 0, note=str(exc))
    except (ArithmeticError, ValueError) as exc:
        result = CaseResult(case, "", "", "", "nan", "fail", case.digits, 0,
                            note=f"{type(exc).__name__}: {exc}")
    result.duration_ms = int((time.perf_counter() - start) * 1000)
    if cache is not None:
        result.cache_hits = cache.hits
    return result


# --------------------------------------------------------------------------
# offset alignment
# --------------------------------------------------------------------------

def _longest_run(flags: Sequence[bool]) -> int:
    best = cur = 0
    for f in flags:
        cur = cur + 1 if f else 0
        best = max(best, cur)
    return best


def align_offsets(results: list[CaseResult]) -> dict:
    """Choose an index shift for one conjecture suite and settle each case.

    Returns the ledger entry for the suite.
    """
    if not results:
        return {}
    need = min(ALIGN_RUN, len(results))
    runs = {}
    for s in range(-OFFSET_RANGE, OFFSET_RANGE + 1):
        flags = [s in r.predictions and r.predictions[s][0] == r.recognized and r.recognized != ""
                 for r in results]
        runs[s] = _longest_run(flags)
    qualifying = [s for s in sorted(runs, key=lambda s: (abs(s), s)) if runs[s] >= need]
    entry = {"offset": None, "ambiguous": len(qualifying) > 1, "candidates": qualifying,
             "required_run": need}
    chosen = qualifying[0] if qualifying else 0
    if qualifying:
        entry["offset"] = chosen
        entry["matched_run"] = runs[chosen]
    for r in results:
        pred = r.predictions.get(chosen)
        if pred is not None:
            r.expected = pred[0]
        if r.status in ("recognition_failure", "quadrature_failure"):
            continue
        r.offset = chosen if qualifying else None
        ok = bool(qualifying) and pred is not None and r.recognized == pred[0] and r.synth_ok
        r.status = "pass" if ok else "fail"
    return entry


# --------------------------------------------------------------------------
# running
# --------------------------------------------------------------------------

SEQUENCE_CHECKS = {
    "conj2": ("A083481", nt.a083481, 1),
    "conj5": ("A000188", nt.a000188, 1),
    "conj6": ("A019554", nt.a019554, 1),
    "conj7": ("A019554", nt.a019554, 1),
    "conj8": ("A168077", nt.a168077, 0),
    "conj9": ("A165367", nt.a165367, 0),
    "conj10": ("A007913", nt.a007913, 1),
}


def _fixture_agreement(suite: str, offline: bool) -> dict:
    """Compare the numbers-module predictor with the b-file used as ground truth."""
    seq_id, fn, _ = SEQUENCE_CHECKS[suite]
    try:
        bf = oeis.get_terms(seq_id, 50, offline)
    except oeis.OEISError as exc:
        return {"sequence": seq_id, "status": f"unavailable: {exc}"}
    bad = [i for i, v in bf.terms if fn(i) != v]
    return {"sequence": seq_id, "source": bf.source, "terms": len(bf),
            "status": "agree" if not bad else f"disagree at {bad[:5]}"}


def _conj1_sequence_notes(results: list[CaseResult], offline: bool) -> dict:
    """Match the magnitudes in the recognized conj1 forms against A143608 / A079496."""
    outer, surd = [], []
    for r in sorted(results, key=lambda r: r.case.p["n"]):
        if not r.form:
            return {}
        # "-41 (-41 + 29 √2) π": outer factor and coefficient of the root
        head, _, rest = r.form.partition(" (")
        coef = rest.split(" + ")[1].split(" √")[0] if " + " in rest else ""
        try:
            outer.append(abs(int(head.lstrip("-") or 1)))
            surd.append(int(coef) if coef else 1)
        except ValueError:
            return {}
    out = {"outer_factors": outer, "root_coefficients": surd}
    for seq_id, cand in (("A143608", outer), ("A079496", surd)):
        if len(cand) < oeis.MIN_PREFIX:
            out[seq_id] = "too few cases to align"
            continue
        try:
            match = oeis.compare_prefix(seq_id, cand, 10, offline=offline)
        except oeis.OEISError as exc:
            out[seq_id] = f"unavailable: {exc}"
            continue
        out[seq_id] = ({"first_index": match.first_index} if match.matched
                       else {"ambiguous": match.ambiguous, "shifts": list(match.matching_shifts)})
    return out


def run_cases(cases: list[ConjectureCase], cfg: HarnessConfig) -> list[CaseResult]:
    if cfg.jobs > 1 and len(cases) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            futures = [pool.submit(evaluate_case, c, cfg.cache_dir, cfg.use_cache) for c in cases]
            return [f.result() for f in futures]
    return [evaluate_case(c, cfg.cache_dir, cfg.use_cache) for c in cases]


def run_suite(config) -> Report:
    """Run every requested suite and aggregate one report (canonical order)."""
    cfg = HarnessConfig.from_mapping(config)
    suites = cfg.validate()
    cases = build_cases(cfg, suites)
    start = time.perf_counter()
    results = run_cases(cases, cfg)
    order = {s: i for i, s in enumerate(SUITES)}
    results.sort(key=lambda r: order[r.case.suite])  # stable: case order within a suite is canonical

    offsets: dict = {}
    notes: dict = {}
    for suite in suites:
        if suite not in CONJECTURES:
            continue
        group = [r for r in results if r.case.suite == suite]
        entry = align_offsets(group)
        if suite == "conj1":
            signs = sorted({r.predictions.get(entry.get("offset") or 0, ("", ""))[1]
                            for r in group if r.status == "pass"})
            entry["sign"] = signs[0] if len(signs) == 1 else ("mixed" if signs else "unresolved")
            entry["sign_note"] = ("'-' means the computed values are the negatives of the "
                                  "conjectured right-hand sides")
            seq = _conj1_sequence_notes(group, cfg.offline)
            if seq:
                notes["conj1"] = seq
        if suite == "conj8":
            entry["appendix_rows"] = "appendix row r corresponds to m = r + 3"
        if suite == "conj2":
            notes["conj2"] = ("the prose definition (m-th k with k^2 (k+1) a square) gives "
                              "k = 3, 8, 15, ...; the printed terms 2, 6, 3, 5, 30, 42 are "
                              "core(m(m+1)), which is what is tested")
        if suite in SEQUENCE_CHECKS:
            entry["fixture_check"] = _fixture_agreement(suite, cfg.offline)
        offsets[suite] = entry
    if any(s in suites for s in ("prop1",)):
        notes["prop1"] = ("coefficients are evaluated exactly as stated; fourier cases use "
                          "the stated coefficients of both propositions")

    hits = sum(r.cache_hits for r in results)
    label = ",".join(suites) if len(suites) != len(SUITES) else "all"
    env = {
        "digits": cfg.digits,
        "max_digits": MAX_DIGITS,
        "escalate_if_error_above": ESCALATE_ABOVE,
        "offline": cfg.offline,
        "cache": "enabled" if cfg.use_cache else "disabled",
        "offset_search": [-OFFSET_RANGE, OFFSET_RANGE],
    }
    timing = {"total_ms": int((time.perf_counter() - start) * 1000), "cache_hits": hits,
              "jobs": cfg.jobs}
    return Report(label, results, env, offsets, notes, timing)


def verify_closed_forms(n_max: int, k_set: Iterable, ctx: PrecisionContext = PrecisionContext()) -> Report:
    """Closed-form checks (theorem2, plus lemma1 when k = 2 is included) for n <= n_max."""
    if n_max > 100:
        raise ConfigError("n_max must be <= 100")
    ks = list(k_set)
    suites = ["theorem2"] + (["lemma1"] if 2 in ks else [])
    return run_suite(HarnessConfig(suites=suites, digits=ctx.digits, n_max=n_max, k=ks))


def verify_conjecture(conj_id: str, values: Optional[Sequence[int]] = None,
                      ctx: PrecisionContext = PrecisionContext(), **kw) -> Report:
    """One conjecture suite over n (conj1, 3, 4) or m (the others)."""
    if conj_id not in CONJECTURES:
        raise ConfigError(f"unknown conjecture {conj_id!r}")
    var = CONJ_DEFAULTS[conj_id][0]
    if values is not None:
        kw[var] = list(values)
    return run_suite(HarnessConfig(suites=[conj_id], digits=ctx.digits, **kw))


def empty_report(label: str = "") -> Report:
    return Report(label, [], {}, {}, {}, {})
