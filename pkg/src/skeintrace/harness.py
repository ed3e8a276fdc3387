"""Command line driver: job validation, per-n rows, JSON/CSV/pretty reports.

Output is deterministic for a fixed job: rows are sorted by n, JSON field
order is fixed, floats carry 12 significant digits and exact integers are
written as decimal strings.  Wall-clock timings are only emitted with
``--timings`` because they would break byte-identical reruns.

Exit codes: 0 success, 1 a verification failed, 2 invalid input (with a JSON
error object on stderr).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional, Sequence

from .cyclotomic import OrderTooLarge, abs_sq
from .intertwiner import (
    DET_MAX_N,
    NotCoprime,
    NotInvariant,
    TraceRow,
    abs_det_check,
    build_intertwiner,
    build_verified_intertwiner,
    gauss_sum,
    periodic_power_check,
    trace_bound_holds,
    trace_row,
)
from .punctured_torus import (
    periodic_det_check,
    periodic_trace_sweep,
    build_periodic_intertwiner,
    verify_periodic_intertwiner,
)
from .quantum_torus import SIGNS, MappingClass
from .torus_rep import EvenLevel, TorusCharacter, is_invariant, parse_angle, solve_invariant_characters

COMMANDS = ("trace", "intertwiner", "sweep", "verify", "gauss", "punctured", "accept")
MODES = ("exact", "float", "auto")
PATHS = ("auto", "closed", "exact", "float")
OUTPUTS = ("json", "csv", "pretty")
CSV_FIELDS = ("n", "abs_trace", "abs_trace_sq_exact", "log_trace_over_n", "is_exact_zero", "path")
PUNCTURED_MATRIX_CAP = 99


class InvalidJob(ValueError):
    pass


@dataclass(frozen=True)
class JobSpec:
    command: str
    n_values: tuple[int, ...] = ()
    matrix: Optional[MappingClass] = None
    sign: str = "plus"
    character: Optional[TorusCharacter] = None
    character_text: str = "auto"
    k: tuple[int, int] = (0, 0)
    lifts: tuple[int, int] = (0, 0)
    gauss_k: int = 0
    mode: str = "auto"
    path: str = "auto"
    output: str = "json"
    workers: int = 1
    verify: bool = False
    timings: bool = False

    def describe(self) -> dict:
        out: dict[str, Any] = {"command": self.command}
        if self.command == "gauss":
            out["k"] = str(self.gauss_k)
        if self.matrix is not None:
            out["matrix"] = [str(x) for x in self.matrix.entries()]
            out["sign"] = self.sign
            out["character"] = self.character_text
            ch = self.character
            out["angles"] = [str(ch.angle1), str(ch.angle2)]
            out["lifts"] = [str(ch.r1), str(ch.r2)]
            out["mode"] = self.mode
            out["path"] = self.path
        out["n"] = [str(n) for n in self.n_values]
        return out


# ---------------------------------------------------------------------------
# parsing


def parse_n(text: str) -> tuple[int, ...]:
    """'9', '3,5,7' or an inclusive odd range '3..101'."""
    values: list[int] = []
    for part in text.replace(" ", "").split(","):
        if ".." in part:
            lo, hi = (int(x) for x in part.split(".."))
            if lo % 2 == 0:
                raise EvenLevel(f"range start {lo} is even")
            values.extend(range(lo, hi + 1, 2))
        elif part:
            values.append(int(part))
    if not values:
        raise InvalidJob("no n values given")
    for n in values:
        if n < 1 or n % 2 == 0:
            raise EvenLevel(f"n must be an odd positive integer, got {n}")
    return tuple(sorted(set(values)))


def _int_pair(text: str, what: str) -> tuple[int, int]:
    parts = [int(p) for p in text.replace(" ", "").split(",")]
    if len(parts) != 2:
        raise InvalidJob(f"{what} takes two comma-separated integers, got {text!r}")
    return parts[0], parts[1]


def resolve_character(
    A: MappingClass, sign: str, text: str, k: tuple[int, int], lifts: tuple[int, int]
) -> TorusCharacter:
    if text == "auto":
        fam = solve_invariant_characters(A, sign, *k)
        if fam.solution is None:
            raise NotInvariant(f"no invariant character for k={k}: {fam.description}")
        ch = fam.character(*lifts)
    elif text == "trivial":
        ch = TorusCharacter.trivial(sign).with_lifts(*lifts)
    else:
        parts = text.split(",")
        if len(parts) != 2:
            raise InvalidJob(f"character must be auto, trivial or p/q,p/q; got {text!r}")
        ch = TorusCharacter(parse_angle(parts[0]), parse_angle(parts[1]), sign, *lifts)
    if not is_invariant(A, sign, ch.angle1, ch.angle2):
        raise NotInvariant(f"character ({ch.angle1}, {ch.angle2}) is not invariant under {A.entries()} ({sign})")
    return ch


def job_from_args(ns: argparse.Namespace) -> JobSpec:
    cmd = ns.command
    n_values = parse_n(ns.n) if getattr(ns, "n", None) else ()
    common = dict(output=ns.output, workers=max(1, ns.workers), timings=ns.timings)
    if cmd == "gauss":
        return JobSpec("gauss", n_values, gauss_k=ns.k_gauss, **common)
    if cmd == "punctured":
        if any(n < 3 for n in n_values):
            raise InvalidJob("the punctured-torus intertwiner needs n >= 3")
        return JobSpec("punctured", n_values, verify=ns.verify, **common)
    if not ns.matrix:
        raise InvalidJob(f"{cmd} needs --matrix a,b,c,d")
    A = MappingClass.parse(ns.matrix)
    k = _int_pair(ns.k, "--k")
    lifts = _int_pair(ns.lifts, "--lifts")
    ch = resolve_character(A, ns.sign, ns.character, k, lifts)
    return JobSpec(
        cmd,
        n_values,
        matrix=A,
        sign=ns.sign,
        character=ch,
        character_text=ns.character,
        k=k,
        lifts=lifts,
        mode=ns.mode,
        path=ns.path,
        verify=ns.verify or cmd == "verify",
        **common,
    )


# ---------------------------------------------------------------------------
# rows


@dataclass
class ReportRow:
    n: int
    abs_trace: float
    abs_trace_sq_exact: Optional[Fraction]
    log_trace_over_n: float
    is_exact_zero: bool
    path: str
    variant_matched: Optional[str] = None
    verified: Optional[bool] = None
    checks: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)
    seconds: Optional[float] = None

    @classmethod
    def from_trace_row(cls, row: TraceRow) -> "ReportRow":
        return cls(
            row.n, row.abs_trace, row.abs_trace_sq_exact, row.log_trace_over_n,
            row.is_exact_zero, row.path, row.variant_matched, row.verified, seconds=row.seconds,
        )


def _fmt_float(x: float) -> Any:
    if math.isinf(x):
        return "-inf" if x < 0 else "inf"
    if math.isnan(x):
        return "nan"
    return float(f"{x:.12g}")


def _fmt_exact(x: Optional[Fraction]) -> Optional[str]:
    if x is None:
        return None
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def row_to_dict(row: ReportRow, timings: bool) -> dict:
    out: dict[str, Any] = {
        "n": str(row.n),
        "abs_trace": _fmt_float(row.abs_trace),
        "abs_trace_sq_exact": _fmt_exact(row.abs_trace_sq_exact),
        "log_trace_over_n": _fmt_float(row.log_trace_over_n),
        "is_exact_zero": row.is_exact_zero,
        "path": row.path,
        "variant_matched": row.variant_matched,
        "verified": row.verified,
    }
    if row.checks:
        out["checks"] = row.checks
    out.update(row.extra)
    if timings and row.seconds is not None:
        out["seconds"] = _fmt_float(row.seconds)
    return out


def _torus_row(job: JobSpec, n: int) -> ReportRow:
    A, ch = job.matrix, job.character
    if job.command in ("trace", "sweep"):
        return ReportRow.from_trace_row(trace_row(A, n, ch, path=job.path, mode=job.mode, verify=job.verify))
    if job.command == "intertwiner":
        res = build_intertwiner(A, n, ch, mode=job.mode)
        row = _result_row(res, "exact" if res.exact else "float")
        if job.verify:
            from .intertwiner import verify_intertwining

            row.verified = verify_intertwining(res)
        row.extra["n_prime"] = str(res.n_prime)
        row.extra["matrix"] = _matrix_payload(res)
        return row
    if job.command == "verify":
        res, ok, fallback = build_verified_intertwiner(A, n, ch, mode=job.mode)
        row = _result_row(res, "exact" if res.exact else "float")
        checks: dict[str, Any] = {"intertwining": ok, "shift_fallback": fallback}
        if n <= DET_MAX_N:
            det = abs_det_check(res)
            checks["determinant"] = det.ok
            checks["determinant_blocks"] = det.blocks_ok
        checks["trace_bound"] = trace_bound_holds(res)
        if A.is_periodic() and res.exact:
            pc = periodic_power_check(A, res)
            checks["power_order"] = str(pc.k)
            checks["power_scalar"] = pc.is_scalar and pc.unit_after_normalization
        row.checks = checks
        row.verified = all(v for key, v in checks.items() if isinstance(v, bool) and key != "shift_fallback")
        return row
    raise InvalidJob(f"unknown command {job.command!r}")


def _result_row(res, path: str) -> ReportRow:
    exact = res.abs_trace_sq_exact()
    if res.exact and res.matrix.trace().is_zero():
        return ReportRow(res.n, 0.0, Fraction(0), -math.inf, True, path)
    value = res.abs_trace
    return ReportRow(res.n, value, exact, math.log(value) / res.n if value > 0 else -math.inf, False, path)


def _matrix_payload(res) -> dict:
    if res.exact:
        return {"order": str(res.matrix.order), "exponents": res.matrix.exps.tolist()}
    M = res.matrix
    return {"entries": [[[_fmt_float(z.real), _fmt_float(z.imag)] for z in row] for row in M]}


def _gauss_row(k: int, n: int) -> ReportRow:
    S = gauss_sum(k, n)
    sq = abs_sq(S).as_integer()
    zero = sq == 0
    value = math.sqrt(sq)
    return ReportRow(
        n, value, Fraction(sq), -math.inf if zero else math.log(value) / n, zero, "gauss",
        extra={"expected_sq": str(math.gcd(k, n) * n)},
        verified=sq == math.gcd(k, n) * n,
    )


def _punctured_row(n: int, verify: bool) -> ReportRow:
    (pr,) = periodic_trace_sweep([n], matrix_cap=PUNCTURED_MATRIX_CAP)
    row = ReportRow(
        n, pr.abs_trace, Fraction(pr.abs_trace_sq_exact), pr.log_trace_over_n, False, pr.path,
        extra={"expected_sq": str(math.gcd(6, n))},
    )
    checks: dict[str, Any] = {"trace_formula": pr.abs_trace_sq_exact == math.gcd(6, n)}
    if verify:
        checks["intertwining"] = verify_periodic_intertwiner(build_periodic_intertwiner(n))
        if n <= DET_MAX_N:
            checks["determinant"] = periodic_det_check(n)[0]
    row.checks = checks
    row.verified = all(checks.values())
    return row


def compute_row(job: JobSpec, n: int) -> ReportRow:
    if job.command == "gauss":
        return _gauss_row(job.gauss_k, n)
    if job.command == "punctured":
        return _punctured_row(n, job.verify)
    return _torus_row(job, n)


def compute_rows(job: JobSpec) -> list[ReportRow]:
    if job.workers > 1 and len(job.n_values) > 1:
        with ProcessPoolExecutor(max_workers=job.workers) as pool:
            rows = list(pool.map(compute_row, [job] * len(job.n_values), job.n_values))
    else:
        rows = [compute_row(job, n) for n in job.n_values]
    return sorted(rows, key=lambda r: r.n)


def summarize_rows(rows: Sequence[ReportRow]) -> dict:
    finite = [r.log_trace_over_n for r in rows if not math.isinf(r.log_trace_over_n)]
    return {
        "max_log_trace_over_n": _fmt_float(max(finite)) if finite else "-inf",
        "zeros": [str(r.n) for r in rows if r.is_exact_zero],
        "all_verified": all(r.verified is not False for r in rows),
    }


def build_report(job: JobSpec, rows: Sequence[ReportRow]) -> dict:
    return {
        "job": job.describe(),
        "rows": [row_to_dict(r, job.timings) for r in rows],
        "summary": summarize_rows(rows),
    }


def render(report: dict, output: str) -> str:
    if output == "json":
        return json.dumps(report, indent=2) + "\n"
    if output == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for row in report["rows"]:
            w.writerow(_csv_cell(row[f]) for f in CSV_FIELDS)
        return buf.getvalue()
    lines = [f"{'n':>5}  {'|trace|':>14}  {'|trace|^2':>10}  {'log|trace|/n':>14}  path"]
    for row in report["rows"]:
        sq = row["abs_trace_sq_exact"] if row["abs_trace_sq_exact"] is not None else "-"
        flag = "  ZERO" if row["is_exact_zero"] else ""
        bad = "  UNVERIFIED" if row["verified"] is False else ""
        lines.append(
            f"{row['n']:>5}  {row['abs_trace']!s:>14}  {sq:>10}  {row['log_trace_over_n']!s:>14}  "
            f"{row['path']}{flag}{bad}"
        )
    s = report["summary"]
    lines.append(f"max log|trace|/n = {s['max_log_trace_over_n']}; zeros at {s['zeros'] or 'none'}")
    return "\n".join(lines) + "\n"


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def run(job: JobSpec) -> tuple[dict, int]:
    """Compute the report; the exit code is 1 if any row failed verification."""
    rows = compute_rows(job)
    report = build_report(job, rows)
    return report, 0 if report["summary"]["all_verified"] else 1


# ---------------------------------------------------------------------------
# CLI


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skeintrace",
        description="Exact intertwiners, traces and Gauss sums for quantum torus representations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, needs_n: bool = True) -> None:
        if needs_n:
            p.add_argument("--n", required=True, help="odd n: '9', '3,5,7' or an inclusive range '3..101'")
        p.add_argument("--output", choices=OUTPUTS, default="json")
        p.add_argument("--out", help="write the report to this file instead of stdout")
        p.add_argument("--workers", type=int, default=1, help="parallel worker processes per sweep")
        p.add_argument("--timings", action="store_true", help="include per-row seconds (not reproducible)")

    for name in ("trace", "intertwiner", "sweep", "verify"):
        p = sub.add_parser(name)
        p.add_argument("--matrix", required=True, help="a,b,c,d with ad - bc = 1")
        p.add_argument("--sign", choices=SIGNS, default="plus")
        p.add_argument("--character", default="auto", help="auto, trivial or two angles p/q,p/q (in turns)")
        p.add_argument("--k", default="0,0", help="integers k1,k2 selecting the solution for --character auto")
        p.add_argument("--lifts", default="0,0", help="lift offsets r1,r2")
        p.add_argument("--mode", choices=MODES, default="auto")
        p.add_argument("--path", choices=PATHS, default="auto")
        p.add_argument("--verify", action="store_true", help="also check the intertwining relation")
        common(p)

    p = sub.add_parser("gauss")
    p.add_argument("--k", dest="k_gauss", type=int, required=True)
    common(p)

    p = sub.add_parser("punctured")
    p.add_argument("--verify", action="store_true", help="check conjugation and |det| as well")
    common(p)

    p = sub.add_parser("accept")
    p.add_argument("--only", action="append", default=None, help="criterion number or module name (repeatable)")
    return parser


def _fail_input(exc: Exception) -> int:
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
    return 2


# raised while computing rows but caused by the job (closed path with gcd(b, n) > 1, ring too large)
_RUN_INPUT_ERRORS = (InvalidJob, EvenLevel, NotCoprime, OrderTooLarge)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = make_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    if ns.command == "accept":
        from .acceptance import run_acceptance

        return 0 if run_acceptance(ns.only, stream=sys.stdout) else 1
    try:
        job = job_from_args(ns)
    except ValueError as exc:  # parse errors, NotSL2Z, NotInvariant, EvenLevel
        return _fail_input(exc)
    try:
        report, code = run(job)
    except _RUN_INPUT_ERRORS as exc:
        return _fail_input(exc)
    text = render(report, job.output)
    if ns.out:
        with open(ns.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code
