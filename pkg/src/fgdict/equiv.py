"""Value correspondence between FG and TL, and the differential run.

`value_corresponds` is the decidable part of the value relation: struct
values must agree tag by tag and field by field; an interface value must
wrap a corresponding struct value together with a dictionary whose slots
are exactly the bindings of the receiver's method declarations.  Whether
those bindings behave like the declarations is not decidable and is taken
on trust from the translator.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from . import outcome
from .interp import fg_run
from .parser import print_expr
from .statics import DeclTable, NoSuchMethod, build_table, method_lookup, methods, subtype
from .syntax import Assert, Call, Program, Select, StructLit, Var
from .tl import ConVal, MethodName, TLValue, tl_run, tuple_arity
from .tl_text import print_tl_expr, print_tl_value
from .translate import Translator, con_name, method_name, translate_program_typed

FGExpr = (Assert, Call, Select, StructLit, Var)

DEFAULT_FG_BUDGET = 10**4
DEFAULT_TL_BUDGET = 10**6


@dataclass(frozen=True)
class Match:
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _fail(path: str, msg: str) -> Match:
    return Match(False, f"{path}: {msg}" if path else msg)


def _unwrap(V: TLValue, con: str, arity: int, path: str):
    """Check ``V = con((x1..x_arity))`` and return the tuple items or a Match."""
    if not isinstance(V, ConVal) or V.con != con or len(V.args) != 1:
        return _fail(path, f"expected {con}(...) but got {print_tl_value(V)}")
    inner = V.args[0]
    if not isinstance(inner, ConVal) or tuple_arity(inner.con) != arity \
            or len(inner.args) != arity:
        return _fail(path, f"expected a {arity}-tuple inside {con}")
    return inner.args


def value_corresponds(table: DeclTable, t: str, v: StructLit, V: TLValue, path: str = "") -> Match:
    if table.is_struct(t):
        if not isinstance(v, StructLit) or v.tname != t:
            return _fail(path, f"FG value {print_expr(v)} is not a {t}")
        fields = table.fields(t)
        items = _unwrap(V, con_name(t), len(fields), path)
        if isinstance(items, Match):
            return items
        for f, vi, Vi in zip(fields, v.args, items):
            m = value_corresponds(table, f.type, vi, Vi, f"{path}.{f.name}" if path else f.name)
            if not m:
                return m
        return Match(True)
    specs = methods(table, t)
    items = _unwrap(V, con_name(t), len(specs) + 1, path)
    if isinstance(items, Match):
        return items
    us = v.tname
    if us not in table.types or not table.is_struct(us):
        return _fail(path, f"payload tag {us} is not a struct")
    if not subtype(table, us, t):
        return _fail(path, f"{us} does not implement {t}")
    m = value_corresponds(table, us, v, items[0], f"{path}<{us}>")
    if not m:
        return m
    for i, (s, Y) in enumerate(zip(specs, items[1:]), start=1):
        try:
            method_lookup(table, s.name, us)
        except NoSuchMethod:
            return _fail(path, f"slot {i}: no declaration of {s.name} for {us}")
        want = method_name(s.name, us)
        if Y != MethodName(want):
            return _fail(path, f"slot {i}: expected {want} but got {print_tl_value(Y)}")
    return Match(True)


class Verdict(enum.Enum):
    AgreeValue = "AgreeValue"
    AgreePanic = "AgreePanic"
    Violation = "Violation"
    Inconclusive = "Inconclusive"


class ViolationKind(enum.Enum):
    ValueMismatch = "ValueMismatch"
    FGValueTLPanic = "FGValueTLPanic"
    FGPanicTLValue = "FGPanicTLValue"
    FGValueTLTimeout = "FGValueTLTimeout"
    FGPanicTLTimeout = "FGPanicTLTimeout"
    FGTimeoutTLValue = "FGTimeoutTLValue"
    FGTimeoutTLPanic = "FGTimeoutTLPanic"


_TIMEOUT_KINDS = {
    ViolationKind.FGValueTLTimeout, ViolationKind.FGPanicTLTimeout,
    ViolationKind.FGTimeoutTLValue, ViolationKind.FGTimeoutTLPanic,
}


@dataclass(frozen=True)
class Budgets:
    fg: int = DEFAULT_FG_BUDGET
    tl: int = DEFAULT_TL_BUDGET

    def __post_init__(self):
        if self.fg < 0 or self.tl < self.fg:
            raise ValueError(f"need 0 <= fg budget <= tl budget, got {self.fg}, {self.tl}")

    def scaled(self, k: int) -> Budgets:
        return Budgets(self.fg * k, self.tl * k)


@dataclass
class DiffVerdict:
    verdict: Verdict
    fg: outcome.Outcome
    tl: outcome.Outcome
    type: str
    violation: ViolationKind | None = None
    detail: str = ""
    retries: int = 0
    budgets: Budgets = field(default_factory=Budgets)

    @property
    def suspected(self) -> bool:
        """Mixed timeouts are suspicions: exhausting a budget proves nothing."""
        return self.violation in _TIMEOUT_KINDS

    @property
    def kind(self) -> str:
        if self.verdict is Verdict.Violation:
            return f"Violation({self.violation.value})"
        if self.verdict is Verdict.Inconclusive:
            return "Inconclusive(bothBudgetsExhausted)"
        return self.verdict.value

    def to_json(self, program: str = "") -> dict:
        return {
            "program": program,
            "verdict": self.kind,
            "fg": _outcome_json(self.fg, "fg"),
            "tl": _outcome_json(self.tl, "tl"),
            "type": self.type,
            "detail": self.detail,
        }

    def summary(self) -> str:
        s = f"{self.kind} fg={self.fg.kind}/{self.fg.steps} tl={self.tl.kind}/{self.tl.steps}"
        if self.detail:
            s += f" ({self.detail})"
        return s


def _outcome_json(o: outcome.Outcome, lang: str) -> dict:
    rec = {"outcome": o.kind, "steps": o.steps}
    if isinstance(o, outcome.Value):
        rec["value"] = print_expr(o.value) if lang == "fg" else print_tl_value(o.value)
    return rec


def _witness_text(w) -> str:
    if w is None:
        return "?"
    if isinstance(w, FGExpr):
        return print_expr(w)
    return print_tl_expr(w)


def classify(table: DeclTable, t: str, fo: outcome.Outcome, to: outcome.Outcome,
             budgets: Budgets) -> DiffVerdict:
    """Map a pair of outcomes to a verdict."""
    V, P, B = outcome.Value, outcome.Panic, outcome.BudgetExhausted
    K = ViolationKind

    def violation(kind, detail=""):
        return DiffVerdict(Verdict.Violation, fo, to, t, kind, detail, budgets=budgets)

    if isinstance(fo, V) and isinstance(to, V):
        m = value_corresponds(table, t, fo.value, to.value)
        if m:
            return DiffVerdict(Verdict.AgreeValue, fo, to, t, budgets=budgets)
        return violation(K.ValueMismatch, m.reason)
    if isinstance(fo, P) and isinstance(to, P):
        return DiffVerdict(Verdict.AgreePanic, fo, to, t, budgets=budgets)
    if isinstance(fo, B) and isinstance(to, B):
        return DiffVerdict(Verdict.Inconclusive, fo, to, t, budgets=budgets)
    kind = {
        (V, P): K.FGValueTLPanic, (P, V): K.FGPanicTLValue,
        (V, B): K.FGValueTLTimeout, (P, B): K.FGPanicTLTimeout,
        (B, V): K.FGTimeoutTLValue, (B, P): K.FGTimeoutTLPanic,
    }[(type(fo), type(to))]
    detail = "suspected; retry with larger budgets" if kind in _TIMEOUT_KINDS else ""
    if isinstance(to, P) and not detail:
        detail = f"TL panicked at {_witness_text(to.witness)}"
    elif isinstance(fo, P) and not detail:
        detail = f"FG panicked at {_witness_text(fo.witness)}"
    return violation(kind, detail)


def diff_run(p: Program, budgets: Budgets = Budgets(), translator=Translator,
             detect_cycles: bool = True) -> DiffVerdict:
    """Run `p` in FG and its translation in TL and compare the outcomes."""
    t, prog = translate_program_typed(p, translator=translator)
    table = build_table(p)
    fo = fg_run(table, p.main, budgets.fg, detect_cycles)
    to = tl_run(prog, budgets.tl, detect_cycles)
    return classify(table, t, fo, to, budgets)


def diff_with_retry(p: Program, budgets: Budgets = Budgets(), retries: int = 2,
                    translator=Translator) -> DiffVerdict:
    """`diff_run`, rerunning mixed-timeout violations with 10x budgets.

    A violation still present after `retries` reruns is reported as is.
    """
    v = diff_run(p, budgets, translator)
    n = 0
    while v.suspected and n < retries:
        n += 1
        budgets = budgets.scaled(10)
        v = diff_run(p, budgets, translator)
    v.retries = n
    return v
