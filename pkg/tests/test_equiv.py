import json

import pytest
from hypothesis import given, settings

from conftest import load
from fgdict import outcome
from fgdict.equiv import (
    Budgets, Verdict, ViolationKind, classify, diff_run, diff_with_retry, value_corresponds,
)
from fgdict.interp import fg_run
from fgdict.parser import parse_expr, parse_program
from fgdict.statics import build_table
from fgdict.tl import App, ConVal, Lam, MethodName, TLProgram, mk_tuple, spine, tl_run
from fgdict.translate import Translator, translate_expr
from strategies import programs

TRUE_BOOL = ConVal("K_Bool", (ConVal("Tuple3", (
    ConVal("K_True", (ConVal("Tuple0"),)), MethodName("not$True"), MethodName("eqBool$True"))),))
INT = ConVal("K_Int", (ConVal("Tuple1", (TRUE_BOOL,)),))


def eq_value(slot):
    return ConVal("K_Eq", (ConVal("Tuple2", (INT, MethodName(slot))),))


def test_empty_struct():
    t = build_table(parse_program("type T struct {}\nfunc main() { _ = T{} }"))
    assert value_corresponds(t, "T", parse_expr("T{}"), ConVal("K_T", (ConVal("Tuple0"),)))


def test_int_eq_interface_value(int_eq):
    t = build_table(int_eq)
    assert value_corresponds(t, "Eq", parse_expr("Int{True{}}"), eq_value("eq$Int"))


def test_wrong_dictionary_slot(int_eq):
    m = value_corresponds(build_table(int_eq), "Eq", parse_expr("Int{True{}}"), eq_value("other$T"))
    assert not m and "slot 1" in m.reason


@pytest.mark.parametrize("fg, V", [
    ("False{}", ConVal("K_True", (ConVal("Tuple0"),))),
    ("True{}", ConVal("K_True", ())),
    ("Int{True{}}", ConVal("K_Int", (ConVal("Tuple1", (ConVal("K_True", (ConVal("Tuple0"),)),)),))),
])
def test_mismatches(int_eq, fg, V):
    t = build_table(int_eq)
    ty = parse_expr(fg).tname
    assert not value_corresponds(t, ty, parse_expr(fg), V)


def test_payload_must_implement(int_eq):
    t = build_table(int_eq)
    V = ConVal("K_Eq", (ConVal("Tuple2", (ConVal("K_True", (ConVal("Tuple0"),)),
                                          MethodName("eq$True"))),))
    assert not value_corresponds(t, "Eq", parse_expr("True{}"), V)


def test_int_eq_agrees(int_eq):
    v = diff_run(int_eq, Budgets(100, 10000))
    assert v.verdict is Verdict.AgreeValue
    assert (v.fg.steps, v.tl.steps, v.type) == (6, 26, "Bool")


def test_loop_inconclusive():
    v = diff_run(load("loop.fg"))
    assert v.verdict is Verdict.Inconclusive
    assert v.kind == "Inconclusive(bothBudgetsExhausted)"


def test_panic_agrees():
    assert diff_run(load("assert_panic.fg")).verdict is Verdict.AgreePanic


def test_budgets_invariant():
    with pytest.raises(ValueError):
        Budgets(10, 5)
    assert Budgets(1, 2).scaled(10) == Budgets(10, 20)


def test_mixed_timeout_is_retried(int_eq):
    first = diff_run(int_eq, Budgets(10, 10))
    assert first.violation is ViolationKind.FGValueTLTimeout and first.suspected
    v = diff_with_retry(int_eq, Budgets(10, 10))
    assert v.verdict is Verdict.AgreeValue and v.retries == 1
    stuck = diff_with_retry(int_eq, Budgets(10, 10), retries=0)
    assert stuck.verdict is Verdict.Violation and stuck.retries == 0


def test_classify_table(int_eq):
    t = build_table(int_eq)
    val_fg = outcome.Value(parse_expr("True{}"), 1)
    val_tl = outcome.Value(TRUE_BOOL, 1)
    pan = outcome.Panic(1, None)
    out = outcome.BudgetExhausted(None, 5)
    K = ViolationKind
    cases = {
        (val_fg, pan): K.FGValueTLPanic, (pan, val_tl): K.FGPanicTLValue,
        (val_fg, out): K.FGValueTLTimeout, (pan, out): K.FGPanicTLTimeout,
        (out, val_tl): K.FGTimeoutTLValue, (out, pan): K.FGTimeoutTLPanic,
    }
    for (a, b), kind in cases.items():
        v = classify(t, "Bool", a, b, Budgets())
        assert v.verdict is Verdict.Violation and v.violation is kind
        assert v.suspected == ("Timeout" in kind.value)
    assert classify(t, "Bool", val_fg, val_tl, Budgets()).verdict is Verdict.AgreeValue
    assert classify(t, "Bool", pan, pan, Budgets()).verdict is Verdict.AgreePanic
    assert classify(t, "Bool", out, out, Budgets()).verdict is Verdict.Inconclusive
    wrong = classify(t, "Bool", outcome.Value(parse_expr("False{}"), 1), val_tl, Budgets())
    assert wrong.violation is K.ValueMismatch


def test_json_record(int_eq):
    rec = diff_run(int_eq).to_json("int_eq.fg")
    assert json.loads(json.dumps(rec)) == rec
    assert set(rec) == {"program", "verdict", "fg", "tl", "type", "detail"}
    assert rec["verdict"] == "AgreeValue" and rec["type"] == "Bool"
    assert rec["fg"]["outcome"] == "Value" and rec["tl"]["steps"] == 26


class SwappedSlots(Translator):
    """Builds dictionaries in reverse order: a deliberate translator bug."""

    def build_upcast(self, t, ui):
        e = super().build_upcast(t, ui)
        if self.table.is_struct(t):
            head, [tup] = spine(e.body)
            _, items = spine(tup)
            return Lam(e.param, App(head, mk_tuple(items[0], *reversed(items[1:]))))
        return e


def test_buggy_translator_is_caught(int_eq):
    v = diff_run(int_eq, translator=SwappedSlots)
    assert v.verdict is Verdict.Violation


@settings(max_examples=40, deadline=None)
@given(programs(panic_bias=0.0, diverge_bias=0.0))
def test_translated_values_correspond(p):
    table = build_table(p)
    r = fg_run(table, p.main, 10_000)
    assert isinstance(r, outcome.Value)
    t, E = translate_expr(table, {}, r.value)
    V = tl_run(TLProgram((), E), 10_000)
    assert value_corresponds(table, t, r.value, V.value)


@settings(max_examples=40, deadline=None)
@given(programs())
def test_no_violations_on_generated_programs(p):
    assert diff_with_retry(p).verdict is not Verdict.Violation
