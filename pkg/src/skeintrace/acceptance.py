"""The twelve acceptance criteria, shared by ``skeintrace accept`` and the test suite.

Each criterion returns a pass flag and a short string of measured values.
A criterion with a runtime limit fails when it overruns, even if every
value was right.  Intertwiners built by criteria 1-6 are cached so the
trace-bound criterion re-checks the same instances instead of rebuilding
them (it rebuilds them when run on its own).
"""

from __future__ import annotations

import math
import random
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence, TextIO

from . import intertwiner as itw
from .cyclotomic import RootOfUnity, abs_sq
from .punctured_torus import (
    build_cf_rep,
    build_periodic_intertwiner,
    central,
    embed_skein_generators,
    periodic_det_check,
    periodic_trace_sweep,
    puncture_scalar,
    shadow_equations_check,
    skein_residuals,
    verify_periodic_intertwiner,
)
from .quantum_torus import MappingClass
from .torus_rep import TorusCharacter, decompose_subreps

EXAMPLE_A = MappingClass(2, 1, -7, -3)
THIRDS = TorusCharacter(Fraction(1, 3), Fraction(2, 3), "plus")
PERIODIC_CLASSES = (MappingClass(0, 1, -1, 0), MappingClass(0, 1, -1, -1), MappingClass(0, -1, 1, 1))
RANDOM_SEED = 20240601


def odd_range(lo: int, hi: int) -> list[int]:
    return list(range(lo | 1, hi + 1, 2))


def periodic_branch(A: MappingClass) -> str:
    """Trace -1 classes use the minus branch; trace 0 and 1 the plus branch."""
    return "minus" if A.trace == -1 else "plus"


@dataclass(frozen=True)
class Instance:
    A: MappingClass
    n: int
    character: TorusCharacter


# (A, character) setups per criterion; n lists are attached where used
DET_SETUPS = (
    (MappingClass(1, 0, 2, 1), TorusCharacter(Fraction(1, 2), Fraction(1, 5), "plus")),
    (EXAMPLE_A, THIRDS),
    (MappingClass(2, 3, 1, 2), TorusCharacter(Fraction(-1, 2), Fraction(1, 2), "plus")),
    (MappingClass(2, 5, 1, 3), TorusCharacter(Fraction(-1, 3), Fraction(2, 3), "plus")),
)
DET_NS = (9, 15, 25, 45)

EXACTNESS_SETUPS = (
    (EXAMPLE_A, THIRDS),
    (EXAMPLE_A, TorusCharacter.trivial("minus")),
    (MappingClass(1, 0, 2, 1), TorusCharacter(Fraction(1, 2), Fraction(1, 5), "plus")),
    (MappingClass(-1, 0, 3, -1), TorusCharacter.trivial("minus")),
    (MappingClass(2, 3, 1, 2), TorusCharacter(Fraction(-1, 2), Fraction(1, 2), "plus")),
)
EXACTNESS_NS = (5, 9, 15, 27)

SQRT_N_CLASSES = (MappingClass(1, 1, 0, 1), MappingClass(0, 1, -1, 2))


def instances_for(number: int) -> list[Instance]:
    """The intertwiner instances used by criteria 1, 2, 3, 5 and 6."""
    if number == 1:
        return [Instance(EXAMPLE_A, n, THIRDS) for n in (3, 9, 15, 21, 27, 33, 5, 7, 11, 13)]
    if number == 2:
        return [Instance(EXAMPLE_A, n, TorusCharacter.trivial("minus")) for n in odd_range(3, 101)]
    if number == 3:
        return [
            Instance(A, n, TorusCharacter.trivial("plus"))
            for A in SQRT_N_CLASSES
            for n in odd_range(3, 99)
            if math.gcd(A.b, n) == 1
        ]
    if number == 5:
        return [Instance(A, n, ch) for A, ch in DET_SETUPS for n in DET_NS]
    if number == 6:
        return [Instance(A, n, ch) for A, ch in EXACTNESS_SETUPS for n in EXACTNESS_NS]
    return []


@dataclass
class Context:
    cache: dict = field(default_factory=dict)

    def build(self, inst: Instance) -> itw.IntertwinerResult:
        key = (inst.A, inst.n, inst.character)
        if key not in self.cache:
            self.cache[key] = itw.build_intertwiner(inst.A, inst.n, inst.character, mode="exact")
        return self.cache[key]


@dataclass(frozen=True)
class Outcome:
    passed: bool
    measured: str


@dataclass(frozen=True)
class Criterion:
    number: int
    slug: str
    modules: tuple[str, ...]
    limit: Optional[float]
    check: Callable[[Context], Outcome]


@dataclass(frozen=True)
class CriterionResult:
    number: int
    slug: str
    passed: bool
    measured: str
    seconds: float
    limit: Optional[float]

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        limit = f", limit {self.limit:g} s" if self.limit is not None else ""
        return f"[{status}] {self.number:2d} {self.slug}: {self.measured} ({self.seconds:.2f} s{limit})"


# ---------------------------------------------------------------------------
# criteria


def c1_zero_traces(ctx: Context) -> Outcome:
    zeros, nonzeros = [], []
    for inst in instances_for(1):
        (zeros if ctx.build(inst).matrix.trace().is_zero() else nonzeros).append(inst.n)
    ok = zeros == [3, 9, 15, 21, 27, 33] and nonzeros == [5, 7, 11, 13]
    return Outcome(ok, f"zero at {zeros}, nonzero at {nonzeros}")


def c2_minus_branch(ctx: Context) -> Outcome:
    bad = []
    for inst in instances_for(2):
        res = ctx.build(inst)
        u, v = inst.character.lifts(inst.n)
        minus_one = RootOfUnity.minus_one()
        if res.abs_trace_sq_exact() != 1 or u != minus_one or v != minus_one:
            bad.append(inst.n)
    return Outcome(not bad, f"{len(instances_for(2))} values of n, |normalized trace|^2 != 1 at {bad or 'none'}")


def c3_sqrt_n(ctx: Context) -> Outcome:
    bad = [
        (inst.A.entries(), inst.n)
        for inst in instances_for(3)
        if ctx.build(inst).abs_trace_sq_exact() != inst.n
    ]
    return Outcome(not bad, f"{len(instances_for(3))} instances, failures {bad or 'none'}")


def c4_gauss(ctx: Context) -> Outcome:
    bad, count = [], 0
    for k in range(25):
        for n in odd_range(3, 99):
            count += 1
            if abs_sq(itw.gauss_sum(k, n)).as_integer() != math.gcd(k, n) * n:
                bad.append((k, n))
    return Outcome(not bad, f"{count} (k, n) pairs, mismatches {bad[:5] or 'none'}")


def c5_determinants(ctx: Context) -> Outcome:
    worst_rel, worst_block, bad, m_gt_1 = 0.0, 0.0, [], 0
    for inst in instances_for(5):
        res = ctx.build(inst)
        det = itw.abs_det_check(res, rel_tol=1e-6, block_tol=1e-8)
        worst_rel = max(worst_rel, abs(math.expm1(det.log_abs_det - det.expected_log)))
        worst_block = max(worst_block, det.max_block_rel_err)
        m_gt_1 += det.blocks > 1
        if not det.ok:
            bad.append((inst.A.b, inst.n))
    ok = not bad and m_gt_1 > 0
    return Outcome(
        ok,
        f"max rel err {worst_rel:.2e}, max block rel err {worst_block:.2e}, "
        f"{m_gt_1} cases with m > 1, failures {bad or 'none'}",
    )


def c6_intertwining(ctx: Context) -> Outcome:
    insts = instances_for(6)
    bad = [(inst.A.entries(), inst.character.sign, inst.n) for inst in insts
           if not itw.verify_intertwining(ctx.build(inst))]
    signs = sorted({inst.character.sign for inst in insts})
    b_zero = sum(inst.A.b == 0 for inst in insts)
    ok = not bad and len(insts) >= 20 and signs == ["minus", "plus"] and b_zero > 0
    return Outcome(ok, f"{len(insts)} instances ({b_zero} with b = 0), failures {bad or 'none'}")


def c7_trace_bound(ctx: Context) -> Outcome:
    count, bad = 0, []
    for number in (1, 2, 3, 5, 6):
        for inst in instances_for(number):
            count += 1
            if not itw.trace_bound_holds(ctx.build(inst)):
                bad.append((inst.A.entries(), inst.n))
    # Gauss sums of criterion 4: |S|^2 = gcd(k, n) n <= n^3
    for k in range(25):
        for n in odd_range(3, 99):
            count += 1
            if abs_sq(itw.gauss_sum(k, n)).as_integer() > n**3:
                bad.append(("gauss", k, n))
    return Outcome(not bad, f"{count} instances checked, violations {bad or 'none'}")


def c8_subreps(ctx: Context) -> Outcome:
    bad, count = [], 0
    for n in odd_range(3, 31):
        for u in (1, -1):
            for v in (1, -1):
                count += 1
                sub = decompose_subreps(n, u, v)
                ok = (
                    len(sub.V1) == (n + 1) // 2
                    and len(sub.V2) == (n - 1) // 2
                    and sub.closed
                    and sub.complementary
                )
                if not ok:
                    bad.append((n, u, v))
    return Outcome(not bad, f"{count} (n, u, v) cases, failures {bad or 'none'}")


def c9_punctured(ctx: Context) -> Outcome:
    conj_bad = [n for n in odd_range(3, 31) if not verify_periodic_intertwiner(build_periodic_intertwiner(n))]
    rows = periodic_trace_sweep(odd_range(3, 99), matrix_cap=99)
    trace_bad = [r.n for r in rows if r.abs_trace_sq_exact != math.gcd(6, r.n)]
    det_errs = [periodic_det_check(n) for n in odd_range(3, 31)]
    det_bad = [n for n, (ok, _) in zip(odd_range(3, 31), det_errs) if not ok]
    worst = max(err for _, err in det_errs)
    ok = not (conj_bad or trace_bad or det_bad)
    return Outcome(
        ok,
        f"conjugation failures {conj_bad or 'none'}, trace failures {trace_bad or 'none'}, "
        f"max |det| rel err {worst:.2e}",
    )


def random_unit(rng: random.Random, order: int = 60) -> RootOfUnity:
    return RootOfUnity(order, rng.randrange(order))


def c10_chekhov_fock(ctx: Context, triples: int = 50) -> Outcome:
    rng = random.Random(RANDOM_SEED)
    bad, count = [], 0
    for n in (3, 5, 7, 9):
        for _ in range(triples):
            r = (random_unit(rng), random_unit(rng), random_unit(rng))
            rep = build_cf_rep(n, *r)
            count += 1
            P = embed_skein_generators(rep)[3]
            ok = (
                all(res.is_zero() for res in skein_residuals(rep))
                and central(rep)
                and P.scalar_value() == puncture_scalar(rep)
                and shadow_equations_check(rep).ok
            )
            if not ok:
                bad.append((n, tuple(z.exponent for z in r)))
    return Outcome(not bad, f"{count} random triples, failures {bad or 'none'}")


def c11_periodic(ctx: Context) -> Outcome:
    bad, count, orders = [], 0, {}
    for A in PERIODIC_CLASSES:
        sign = periodic_branch(A)
        ch = TorusCharacter.trivial(sign)
        for n in odd_range(3, 99):
            count += 1
            res = itw.build_intertwiner(A, n, ch, mode="exact")
            pc = itw.periodic_power_check(A, res)
            orders[A.entries()] = pc.k
            if not (pc.is_scalar and pc.unit_after_normalization and res.abs_trace_sq_exact() == 1):
                bad.append((A.entries(), n))
    return Outcome(not bad, f"{count} cases, power orders {orders}, failures {bad or 'none'}")


def c12_asymptotics(ctx: Context) -> Outcome:
    ns = odd_range(101, 501)
    ex = itw.asymptotic_sweep(EXAMPLE_A, THIRDS, ns, path="closed")
    some_unit = any(not r.is_exact_zero and r.abs_trace >= 1 - 1e-12 for r in ex.rows)
    limit = math.log(3) / (2 * 101) + 1e-9
    periodic_max = -math.inf
    for A in PERIODIC_CLASSES:
        sw = itw.asymptotic_sweep(A, TorusCharacter.trivial(periodic_branch(A)), ns, path="closed")
        periodic_max = max(periodic_max, sw.max_log_trace_over_n)
    punct = periodic_trace_sweep(ns, matrix_cap=0)
    punct_max = max(r.log_trace_over_n for r in punct)
    ok = ex.bound_ok and some_unit and periodic_max <= limit and punct_max <= limit
    return Outcome(
        ok,
        f"example A: bound {'holds' if ex.bound_ok else 'FAILS'}, {len(ex.zeros)} zero rows, "
        f"max log/n {ex.max_log_trace_over_n:.3g}; periodic max {periodic_max:.3g}; "
        f"punctured max {punct_max:.6g} (limit {limit:.6g})",
    )


CRITERIA: tuple[Criterion, ...] = (
    Criterion(1, "example-A zero traces", ("intertwiner",), 5.0, c1_zero_traces),
    Criterion(2, "example-A minus branch", ("intertwiner",), 30.0, c2_minus_branch),
    Criterion(3, "square-root-of-n law", ("intertwiner",), None, c3_sqrt_n),
    Criterion(4, "Gauss-sum identity", ("intertwiner", "cyclotomic"), 60.0, c4_gauss),
    Criterion(5, "determinant law", ("intertwiner",), None, c5_determinants),
    Criterion(6, "intertwining exactness", ("intertwiner", "torus_rep"), None, c6_intertwining),
    Criterion(7, "trace bound", ("intertwiner",), None, c7_trace_bound),
    Criterion(8, "subrepresentation decomposition", ("torus_rep",), None, c8_subreps),
    Criterion(9, "punctured-torus intertwiner", ("punctured_torus",), None, c9_punctured),
    Criterion(10, "Chekhov-Fock structure", ("punctured_torus",), None, c10_chekhov_fock),
    Criterion(11, "periodicity", ("intertwiner",), None, c11_periodic),
    Criterion(12, "asymptotic behavior", ("intertwiner", "punctured_torus", "harness"), 300.0, c12_asymptotics),
)


def select(only: Optional[Iterable[str]]) -> list[Criterion]:
    """Criteria matching any token: a number, a module name or a slug substring."""
    if not only:
        return list(CRITERIA)
    tokens = [t.strip().lower() for item in only for t in item.split(",") if t.strip()]
    chosen = []
    for c in CRITERIA:
        for t in tokens:
            if (t.isdigit() and int(t) == c.number) or t in c.modules or (not t.isdigit() and t in c.slug.lower()):
                chosen.append(c)
                break
    return chosen


def run_criterion(c: Criterion, ctx: Optional[Context] = None) -> CriterionResult:
    ctx = ctx or Context()
    start = time.perf_counter()
    try:
        out = c.check(ctx)
    except Exception as exc:  # a crash is a failure with the reason shown
        out = Outcome(False, f"raised {type(exc).__name__}: {exc}")
    seconds = time.perf_counter() - start
    passed = out.passed and (c.limit is None or seconds < c.limit)
    measured = out.measured
    if out.passed and not passed:
        measured += f"; over the {c.limit:g} s limit"
    return CriterionResult(c.number, c.slug, passed, measured, seconds, c.limit)


def run_acceptance(only: Optional[Sequence[str]] = None, stream: Optional[TextIO] = None) -> bool:
    """Run the selected criteria, print one line each, return True if all passed."""
    stream = stream or sys.stdout
    chosen = select(only)
    if not chosen:
        stream.write(f"no criteria match {list(only or [])}\n")
        return False
    ctx = Context()
    results = []
    for c in chosen:
        res = run_criterion(c, ctx)
        results.append(res)
        stream.write(res.line() + "\n")
        stream.flush()
    passed = sum(r.passed for r in results)
    stream.write(f"{passed}/{len(results)} criteria passed\n")
    return passed == len(results)
