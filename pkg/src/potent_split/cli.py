"""Command-line front end.

Exit codes: 0 success, 1 verification or claim failure, 2 input/parse error,
3 trace outside the prime subfield, 4 matrix not nonderogatory.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path
from typing import Sequence

from .canonical import companion_form
from .decomp import Decomposition, check_trace_condition, decompose
from .errors import (
    InvalidField,
    NotNonderogatory,
    ParseError,
    PotentSplitError,
    TraceNotPrimeSubfield,
)
from .field import FieldSpec, parse_field_header
from .matf import Matrix, nilpotency_index
from .oracle import SWEEP_GUARD, exhaustive_sweep, sharpness_scan, sweep_workers

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2
EXIT_TRACE = 3
EXIT_DEROGATORY = 4


# -- matrix text format --

def render_matrix(A: Matrix) -> str:
    lines = [A.spec.header(), f"n: {A.rows}", "rows:"]
    lines += [" ".join(A.spec.format(x) for x in row) for row in A.codes]
    return "\n".join(lines) + "\n"


def parse_matrix_text(text: str) -> Matrix:
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines or not lines[0].lstrip().startswith("field:"):
        raise ParseError("missing 'field:' header", 1, 1)
    try:
        spec = parse_field_header(lines[0])
    except ParseError as exc:
        raise ParseError(str(exc), 1, 1) from None
    if len(lines) < 2:
        raise ParseError("missing 'n:' line", 2, 1)
    m = re.fullmatch(r"\s*n:\s*(\d+)\s*", lines[1])
    if not m or int(m.group(1)) < 1:
        raise ParseError("expected 'n: <positive integer>'", 2, 1)
    n = int(m.group(1))
    if len(lines) < 3 or lines[2].strip() != "rows:":
        raise ParseError("expected 'rows:'", 3, 1)
    body = lines[3:]
    if len(body) != n:
        raise ParseError(f"expected {n} rows, found {len(body)}", 4 + min(len(body), n), 1)
    rows = []
    for offset, line in enumerate(body):
        lineno = 4 + offset
        tokens = list(re.finditer(r"\S+", line))
        if len(tokens) != n:
            raise ParseError(f"expected {n} entries, found {len(tokens)}", lineno, 1)
        row = []
        for tok in tokens:
            try:
                row.append(spec.parse(tok.group()))
            except ParseError as exc:
                raise ParseError(str(exc), lineno, tok.start() + 1) from None
        rows.append(tuple(row))
    return Matrix._raw(spec, tuple(rows))


def parse_matrix_file(path: str | Path) -> Matrix:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    return parse_matrix_text(text)


# -- certificates --

def _matrix_from_json(spec: FieldSpec, rows, n: int, name: str) -> Matrix:
    if not isinstance(rows, list) or len(rows) != n or any(not isinstance(r, list) or len(r) != n for r in rows):
        raise ParseError(f"certificate matrix {name} is not {n}x{n}")
    return Matrix._raw(spec, tuple(tuple(spec.parse(str(x)) for x in r) for r in rows))


def load_certificate(obj: dict) -> tuple[Matrix, Matrix, Matrix, dict]:
    try:
        spec = FieldSpec.from_json(obj["field"])
        n = int(obj["n"])
        mats = [_matrix_from_json(spec, obj[k], n, k) for k in ("A", "E", "V")]
    except (KeyError, TypeError, ValueError, InvalidField) as exc:
        raise ParseError(f"malformed certificate: {exc}") from None
    return mats[0], mats[1], mats[2], obj.get("checks", {})


def verify_certificate(obj: dict, max_index: int = 3) -> tuple[bool, list[str]]:
    """Recheck a JSON certificate; returns (ok, problems)."""
    A, E, V, claimed = load_certificate(obj)
    problems = []
    if E + V != A:
        problems.append("A != E + V")
    if E ** A.spec.p != E:
        problems.append("E^p != E")
    idx = nilpotency_index(V)
    if idx is None or idx > max_index:
        problems.append(f"V^{max_index} != 0 (index {idx})")
    if claimed:
        recomputed = {"sum_ok": E + V == A, "p_potent_ok": E ** A.spec.p == E, "nil_index": idx}
        for key, value in recomputed.items():
            if key in claimed and claimed[key] != value:
                problems.append(f"claimed {key}={claimed[key]} but recomputed {value}")
    return not problems, problems


# -- output helpers --

def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _describe(dec: Decomposition) -> str:
    f = dec.A.spec
    params = " ".join(f"{k}={dec.params.get(k)}" for k in ("k", "a", "l", "t") if dec.params.get(k) is not None)
    lines = [
        f"field: {f}",
        f"route: {dec.route.value}" + (" (fallback)" if dec.fallback else ""),
    ]
    if dec.detail:
        lines.append(f"detail: {dec.detail}")
    if params:
        lines.append(f"params: {params}")
    lines += ["E:", str(dec.E), "V:", str(dec.V)]
    c = dec.checks
    lines.append(f"checks: sum_ok={c.sum_ok} p_potent_ok={c.p_potent_ok} nil_index={c.nil_index}")
    return "\n".join(lines)


def _parse_modulus(text: str | None) -> tuple[int, ...] | None:
    if text is None:
        return None
    cleaned = text.strip().strip("[]")
    try:
        return tuple(int(c) for c in cleaned.split(",") if c.strip())
    except ValueError:
        raise ParseError(f"bad modulus {text!r}") from None


def _parse_sizes(text: str) -> list[int]:
    sizes: list[int] = []
    for part in text.split(","):
        part = part.strip()
        m = re.fullmatch(r"(\d+)(?:-(\d+))?", part)
        if not m:
            raise ParseError(f"bad size list {text!r}")
        lo, hi = int(m.group(1)), int(m.group(2) or m.group(1))
        if lo < 1 or hi < lo:
            raise ParseError(f"bad size range {part!r}")
        sizes.extend(range(lo, hi + 1))
    return sizes


# -- subcommands --

def _cmd_decompose(args) -> int:
    A = parse_matrix_file(args.path)
    dec = decompose(A)
    if args.json:
        _emit(json.dumps(dec.to_json(), indent=2), args.out)
    else:
        _emit(_describe(dec), args.out)
    return EXIT_OK if dec.checks.ok(args.max_index) else EXIT_FAILED


def _cmd_verify(args) -> int:
    try:
        obj = json.loads(Path(args.path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read certificate {args.path}: {exc}") from None
    ok, problems = verify_certificate(obj, args.max_index)
    if args.json:
        _emit(json.dumps({"ok": ok, "problems": problems}), args.out)
    else:
        _emit("certificate verified" if ok else "certificate REJECTED: " + "; ".join(problems), args.out)
    return EXIT_OK if ok else EXIT_FAILED


def _cmd_companion(args) -> int:
    A = parse_matrix_file(args.path)
    C, W = companion_form(A)
    if args.json:
        _emit(json.dumps({
            "field": A.spec.to_json(),
            "n": C.n,
            "coeffs": [A.spec.format(c) for c in C.codes],
            "P": W.P.tolist(),
            "note": W.note,
        }, indent=2), args.out)
    else:
        _emit(f"{C}\nwitness ({W.note}):\n{W.P}", args.out)
    return EXIT_OK


def _cmd_check_trace(args) -> int:
    A = parse_matrix_file(args.path)
    t = check_trace_condition(A)
    if args.json:
        _emit(json.dumps({"trace": str(A.trace()), "t": t}), args.out)
    elif t is None:
        _emit(f"trace {A.trace()} is not an integer multiple of unity", args.out)
    else:
        _emit(f"trace = {t}*1", args.out)
    return EXIT_OK if t is not None else EXIT_TRACE


def _field_from_args(args) -> FieldSpec:
    if args.p is None:
        raise ParseError("--p is required")
    try:
        return FieldSpec(args.p, args.m, _parse_modulus(args.modulus))
    except InvalidField as exc:
        raise ParseError(str(exc)) from None


def _cmd_sweep(args) -> int:
    spec = _field_from_args(args)
    sizes = _parse_sizes(args.n)
    too_big = [n for n in sizes if spec.q ** n > SWEEP_GUARD]
    if too_big:
        raise ParseError(f"{spec.q}^{too_big[0]} companions exceed the sweep limit {SWEEP_GUARD}")
    try:
        workers = sweep_workers()
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    reports = [exhaustive_sweep(n, spec, workers) for n in sizes]
    ok = all(not r.failures and r.consistent() for r in reports)
    if args.json:
        _emit(json.dumps([r.to_json() for r in reports], indent=2), args.out)
    else:
        lines = []
        for r in reports:
            hist = ", ".join(f"{k}={v}" for k, v in sorted(r.route_histogram.items()))
            lines.append(
                f"{spec} n={r.n}: total={r.total} succeeded={r.succeeded} "
                f"rejected_trace={r.rejected_trace} failures={len(r.failures)} routes: {hist}"
            )
            if r.fallbacks:
                lines.append(f"  fallback certificates: {len(r.fallbacks)}")
            for C in r.oracle_fallbacks:
                lines.append(f"  ORACLE_FALLBACK {C}")
            for C in r.failures:
                lines.append(f"  FAILED {C}")
        _emit("\n".join(lines), args.out)
    return EXIT_OK if ok else EXIT_FAILED


def _cmd_sharpness(args) -> int:
    report = sharpness_scan()
    if args.json:
        _emit(json.dumps(report.to_json(), indent=2), args.out)
    else:
        lines = [f"{len(report.entries)} qualifying companions over GF(3) "
                 f"({report.p_potent_candidates} tripotent candidates each)"]
        for e in report.entries:
            lines.append(
                f"  {e.companion}: index 2 impossible={e.index2_impossible}, "
                f"certificate nil_index={e.certificate.checks.nil_index} route={e.certificate.route.value}"
            )
        lines.append("claim confirmed" if report.confirmed else "claim VIOLATED")
        _emit("\n".join(lines), args.out)
    return EXIT_OK if report.confirmed else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="potent-split",
        description="Decompose nonderogatory matrices over GF(p^m) as E + V with E^p = E and V^3 = 0.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON")
    common.add_argument("--out", help="write the report to this file instead of stdout")
    common.add_argument("--max-index", type=int, default=3, help="accepted nilpotency index bound")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", parents=[common], help="decompose a matrix file")
    p.add_argument("path")
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("verify", parents=[common], help="re-verify a JSON certificate")
    p.add_argument("path")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("companion", parents=[common], help="companion form with witness")
    p.add_argument("path")
    p.set_defaults(func=_cmd_companion)

    p = sub.add_parser("check-trace", parents=[common], help="is the trace t*1 for an integer t?")
    p.add_argument("path")
    p.set_defaults(func=_cmd_check_trace)

    p = sub.add_parser("sweep", parents=[common], help="decompose every companion of given sizes")
    p.add_argument("--p", type=int)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--modulus", help="low-to-high coefficients, e.g. 1,0,1")
    p.add_argument("--n", default="1-3", help="sizes: 5, 1-7 or 2,4")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("sharpness", parents=[common], help="3x3 sharpness scan over GF(3)")
    p.set_defaults(func=_cmd_sharpness)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.max_index < 1:
        print("error: --max-index must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except TraceNotPrimeSubfield as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return EXIT_TRACE
    except NotNonderogatory as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return EXIT_DEROGATORY
    except PotentSplitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
