"""One test per acceptance criterion; each records a pass/fail line for the summary."""

import dataclasses
import itertools
import time
from collections import Counter

import pytest

from conftest import ACCEPTANCE, corpus_files, load
from fgdict import interp, tl
from fgdict.equiv import Budgets, Verdict, diff_run, value_corresponds
from fgdict.genfuzz import GenConfig, derive_seed, gen_program
from fgdict.interp import fg_run
from fgdict.outcome import AtValue, Panic, Stepped, Value
from fgdict.parser import parse_program, print_program
from fgdict.statics import build_table, subtype
from fgdict.syntax import Assert, StructLit
from fgdict.tl import App, Case, TLProgram, from_value, tl_free_vars, tl_run
from fgdict.translate import RULES, Translator, translate_program, translate_program_typed
from tl_oracle import alpha_eq

FUZZ_COUNT = 1000
FUZZ_SEED = 0
TRACE_SAMPLE = 200


def record(n, ok, detail):
    ACCEPTANCE[n] = (bool(ok), detail)
    assert ok, detail


@pytest.fixture(scope="module")
def fuzz_run():
    """The criterion 2 run, shared with the criteria that inspect its programs."""
    cfg = GenConfig()
    budgets = Budgets(10**4, 10**6)
    counts = Counter()
    programs, verdicts = [], []
    start = time.perf_counter()
    for i in range(FUZZ_COUNT):
        p = gen_program(dataclasses.replace(cfg, seed=derive_seed(FUZZ_SEED, i)))
        translate_program_typed(p, counts)
        programs.append(p)
        verdicts.append(diff_run(p, budgets))
    return cfg, programs, verdicts, counts, time.perf_counter() - start


# Criterion 1

INT_EQ_RUN = ("\\m. \\a. case a of { (i,) -> case i of {"
            " K_Eq(z) -> case z of { (x, eq) -> eq x (i,) } } }")
INT_EQ_EQ = ("\\this. \\a. case a of { (that,) -> "
           "case case this of { K_Int(r) -> case r of { (v,) -> v } } of {"
           " K_Bool(d) -> case d of { (p, n, e) -> e p ("
           "case (\\x. case x of { K_Eq(z) -> case z of { (q, s) -> case q of {"
           " K_Int(y) -> K_Int(y) } } }) that of { K_Int(w) -> case w of { (u,) -> u } },) } } }")
INT_EQ_MAIN = ("run$Main K_Main(()) ((\\x. K_Eq((x, eq$Int))) K_Int(((\\y. K_Bool((y, not$True, "
             "eqBool$True))) K_True(()),)),)")


def test_criterion_1_int_eq_end_to_end(int_eq):
    start = time.perf_counter()
    t, prog = translate_program_typed(int_eq)
    shape = (alpha_eq(prog.mu["run$Main"], INT_EQ_RUN) and alpha_eq(prog.mu["eq$Int"], INT_EQ_EQ)
             and alpha_eq(prog.main, INT_EQ_MAIN))
    v = diff_run(int_eq)
    corresponds = v.verdict is Verdict.AgreeValue and \
        value_corresponds(build_table(int_eq), t, v.fg.value, v.tl.value)
    elapsed = time.perf_counter() - start
    ok = shape and corresponds and v.fg.steps <= 20 and v.tl.steps <= 200 and elapsed < 1
    record(1, ok, f"shape={shape} {v.kind} fg={v.fg.steps} tl={v.tl.steps} "
                  f"time={elapsed:.3f}s")


# Criterion 2

def test_criterion_2_fuzz(fuzz_run):
    cfg, programs, verdicts, _, elapsed = fuzz_run
    tally = Counter(v.verdict for v in verdicts)
    violations = [(i, v.summary()) for i, v in enumerate(verdicts)
                  if v.verdict is Verdict.Violation]
    rate = tally[Verdict.Inconclusive] / len(verdicts)
    ok = not violations and rate <= cfg.diverge_bias + 0.05 and elapsed < 120
    record(2, ok, f"n={len(verdicts)} violations={len(violations)} "
                  f"agreeValue={tally[Verdict.AgreeValue]} agreePanic={tally[Verdict.AgreePanic]} "
                  f"inconclusive={rate:.3f} (limit {cfg.diverge_bias + 0.05:.2f}) "
                  f"time={elapsed:.1f}s {violations[:3]}")


# Criterion 3

def test_criterion_3_panic_corpus():
    files = corpus_files("panic")
    bad, to_struct, to_iface, empty = [], 0, 0, 0
    for f in files:
        p = parse_program(f.read_text())
        v = diff_run(p)
        if v.verdict is not Verdict.AgreePanic:
            bad.append(f.name)
            continue
        target = v.fg.witness.tname
        if build_table(p).is_struct(target):
            to_struct += 1
        else:
            to_iface += 1
        w = v.tl.witness
        empty += isinstance(w, Case) and not w.clauses and not build_table(p).is_struct(target)
    ok = len(files) >= 20 and not bad and to_struct and to_iface and empty
    record(3, ok, f"files={len(files)} notAgreePanic={bad} iface->struct={to_struct} "
                  f"iface->iface={to_iface} emptyClauses={empty}")


# Criterion 4

def test_criterion_4_divergence():
    files = corpus_files("diverge")
    base = Budgets(10**3, 10**5)
    bad = [f.name for f in files for b in (base, base.scaled(10))
           if diff_run(parse_program(f.read_text()), b).verdict is not Verdict.Inconclusive]
    record(4, len(files) >= 10 and not bad, f"files={len(files)} notInconclusive={bad}")


# Criterion 5

def _trace_is_deterministic(step, decompose, contract, e, limit=TRACE_SAMPLE):
    """Check the first `limit` states: one decomposition, contracting to the step."""
    for _ in range(limit):
        r = step(e)
        ds = decompose(e)
        if isinstance(r, AtValue):
            return ds == []
        if len(ds) != 1 or contract(ds[0]) != r:
            return False
        if not isinstance(r, Stepped):
            return True
        e = r.expr
    return True


def _both_traces(p):
    table = build_table(p)
    prog = translate_program(p)
    mu = prog.mu
    fg_ok = _trace_is_deterministic(
        lambda e: interp.fg_step(table, e), interp.fg_decompose_all,
        lambda d: interp.contract_in_context(table, d), p.main)
    tl_ok = _trace_is_deterministic(
        lambda e: tl.tl_step(mu, e), tl.tl_decompose_all,
        lambda d: tl.contract_in_context(mu, d), prog.main)
    return fg_ok and tl_ok


def test_criterion_5_determinism(fuzz_run, int_eq):
    _, programs, *_ = fuzz_run
    corpus = [int_eq] + [parse_program(f.read_text())
                       for f in corpus_files("panic") + corpus_files("diverge")]
    everything = corpus + programs
    bad = [i for i, p in enumerate(everything) if not _both_traces(p)]
    record(5, not bad, f"programs={len(everything)} steps<={TRACE_SAMPLE} failing={bad[:5]}")


# Criterion 6

CAST_FIXTURE = """
type I interface {
    a() A
}
type J interface {
    a() A
    b(y I) I
}
type A struct {}
type B struct {
    l I
    r I
}
type C struct {
    g A
    h J
}
func (x A) a() A {
    return x
}
func (x A) b(y I) I {
    return y
}
func (x B) a() A {
    return x.l.a()
}
func (x B) b(y I) I {
    return x.r
}
func (x C) a() A {
    return x.g
}
func main() {
    _ = A{}
}
"""


def _values(table, depth):
    """Every closed value with nesting depth at most `depth`."""
    structs = [t for t in table.types if table.is_struct(t)]
    found = {s: [] for s in structs}
    for _ in range(depth):
        found = {s: [StructLit(s, args) for args in itertools.product(*(
            [v for u in structs if subtype(table, u, f.type) for v in found[u]]
            for f in table.fields(s)))] for s in structs}
    return [v for vs in found.values() for v in vs]


def test_criterion_6_casts_brute_force():
    start = time.perf_counter()
    p = parse_program(CAST_FIXTURE)
    table = build_table(p)
    tr = Translator(table)
    bindings = translate_program(p).bindings
    structs = [t for t in table.types if table.is_struct(t)]
    ifaces = [t for t in table.types if not table.is_struct(t)]

    def tl_eval(e):
        return tl_run(TLProgram(bindings, e), 10**4)

    cases = failures = panics = 0
    values = _values(table, 3)
    for v in values:
        V = tl_eval(tr.expr({}, v)[1]).value
        for ui in ifaces:
            if not subtype(table, v.tname, ui):
                continue
            cases += 1
            up = tl_eval(App(tr.build_upcast(v.tname, ui), from_value(V)))
            if not (isinstance(up, Value) and value_corresponds(table, ui, v, up.value)):
                failures += 1
                continue
            for u in structs + ifaces:
                if u == ui or table.is_struct(u) and not subtype(table, u, ui):
                    continue  # identity, or rejected statically
                cases += 1
                fo = fg_run(table, Assert(v, u), 10)
                to = tl_eval(App(tr.build_downcast(ui, u), from_value(up.value)))
                if isinstance(fo, Panic):
                    panics += 1
                    good = isinstance(to, Panic)
                else:
                    good = isinstance(to, Value) and bool(
                        value_corresponds(table, u, fo.value, to.value))
                failures += not good
    elapsed = time.perf_counter() - start
    ok = failures == 0 and elapsed < 30 and len(structs) == 3 and len(ifaces) == 2 \
        and 0 < panics < cases
    record(6, ok, f"values={len(values)} checks={cases} panics={panics} failures={failures} "
                  f"time={elapsed:.2f}s")


# Criterion 7

def _closed(prog):
    names = set(prog.mu)
    for e in [prog.main] + [b for _, b in prog.bindings]:
        terms, mvars = tl_free_vars(e)
        if terms or not mvars <= names:
            return False
    return True


def test_criterion_7_round_trip_and_closedness(fuzz_run):
    _, programs, *_ = fuzz_run
    corpus = [parse_program(f.read_text()) for f in corpus_files() + corpus_files("panic")
              + corpus_files("diverge")]
    everything = corpus + programs
    no_round_trip = [i for i, p in enumerate(everything)
                     if parse_program(print_program(p)) != p]
    translatable = [p for p in everything if p != load("recursive_struct.fg")]
    open_ = [i for i, p in enumerate(translatable) if not _closed(translate_program(p))]
    record(7, not no_round_trip and not open_,
           f"programs={len(everything)} roundTripFailures={no_round_trip[:5]} "
           f"translated={len(translatable)} notClosed={open_[:5]}")


# Criterion 8

def test_criterion_8_rule_coverage(fuzz_run):
    counts = fuzz_run[3]
    missing = [r for r in RULES if counts[r] < 1]
    rarest = min(RULES, key=lambda r: counts[r])
    record(8, not missing, f"rules={len(RULES)} missing={missing} "
                           f"rarest={rarest}:{counts[rarest]}")
