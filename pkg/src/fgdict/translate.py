"""Dictionary-passing translation from FG to the target calculus.

Representation of an FG value `tS{v1..vn}`:

* at struct type tS:    ``K_tS((V1, ..., Vn))``
* at interface type tI: ``K_tI((V, m1$tS, ..., mk$tS))`` where V is the
  struct representation and the dictionary follows ``methods(tI)`` order.

Types are synthesized bottom-up (the minimal type of each expression) and
coercions are inserted only where a declared type is demanded: struct
literal fields, call arguments and method results.  Equal types need no
coercion.  Nested patterns are desugared into nested `case` expressions.
"""

from __future__ import annotations

import enum
import itertools
from collections import Counter

from .statics import (
    DeclTable,
    WellFormednessError,
    build_table,
    check_conditions,
    method_lookup,
    methods,
    subtype,
)
from .syntax import Assert, Call, Expr, MethodDecl, Program, Select, StructLit, Var
from .tl import (
    App,
    Case,
    Clause,
    Con,
    Lam,
    MethodVar,
    TLExpr,
    TLProgram,
    apply,
    mk_tuple,
    tuple_con,
)
from .tl import Var as TVar
from .tl_text import name_kind

RULES = (
    "td-var", "td-struct", "td-access", "td-call-struct", "td-call-iface",
    "td-assert", "td-sub", "td-cons-struct-iface", "td-cons-iface-iface",
    "td-destr-iface-struct", "td-destr-iface-iface", "td-method", "td-prog",
)


class TKind(enum.Enum):
    UnknownVar = "UnknownVar"
    NotAStruct = "NotAStruct"
    NotAnInterface = "NotAnInterface"
    NoSuchField = "NoSuchField"
    NoSuchMethod = "NoSuchMethod"
    NotASubtype = "NotASubtype"
    AssertOnStruct = "AssertOnStruct"
    UndefinedType = "UndefinedType"
    ArityMismatch = "ArityMismatch"


class TranslationError(Exception):
    def __init__(self, kind: TKind, location: str):
        self.kind = kind
        self.location = location
        super().__init__(f"{kind.value}: {location}")


def con_name(t: str) -> str:
    return f"K_{t}"


def method_name(m: str, ts: str) -> str:
    return f"{m}${ts}"


def var_name(x: str) -> str:
    """TL name for the FG variable `x`.

    FG identifiers that would read as a constructor or keyword in TL text
    get a `%` prefix; generated names are `%<digits>`, so no clash.
    """
    return x if name_kind(x) == "var" else f"%{x}"


class Translator:
    """Translates one program; owns the fresh-name counter and rule counters."""

    def __init__(self, table: DeclTable, counts: Counter | None = None):
        self.table = table
        self.counts = counts if counts is not None else Counter()
        self._fresh = itertools.count()

    def fresh(self) -> str:
        return f"%{next(self._fresh)}"

    def fire(self, rule: str):
        self.counts[rule] += 1

    def _need_type(self, t: str, where: str):
        if t not in self.table.types:
            raise TranslationError(TKind.UndefinedType, f"{where}: {t}")

    # interface values

    def unpack(self, scrut: TLExpr, con: str, n: int, body) -> TLExpr:
        """``case scrut of con((X1..Xn)) -> body(X1..Xn)`` as two flat cases."""
        z = self.fresh()
        xs = [self.fresh() for _ in range(n)]
        inner = Case(TVar(z), (Clause(tuple_con(n), tuple(xs), body(*xs)),))
        return Case(scrut, (Clause(con, (z,), inner),))

    def build_upcast(self, t: str, ui: str) -> TLExpr:
        tab = self.table
        self._need_type(t, "upcast")
        self._need_type(ui, "upcast")
        if not tab.is_interface(ui):
            raise TranslationError(TKind.NotAnInterface, ui)
        if not subtype(tab, t, ui):
            raise TranslationError(TKind.NotASubtype, f"{t} <: {ui}")
        wanted = methods(tab, ui)
        x = self.fresh()
        if tab.is_struct(t):
            self.fire("td-cons-struct-iface")
            dictionary = [MethodVar(method_name(s.name, t)) for s in wanted]
            return Lam(x, App(Con(con_name(ui)), mk_tuple(TVar(x), *dictionary)))
        self.fire("td-cons-iface-iface")
        given = methods(tab, t)
        perm = [given.index(s) for s in wanted]

        def body(payload, *slots):
            picked = [TVar(slots[j]) for j in perm]
            return App(Con(con_name(ui)), mk_tuple(TVar(payload), *picked))

        return Lam(x, self.unpack(TVar(x), con_name(t), len(given) + 1, body))

    def build_downcast(self, ti: str, u: str) -> TLExpr:
        tab = self.table
        self._need_type(ti, "assertion")
        self._need_type(u, "assertion")
        if not tab.is_interface(ti):
            raise TranslationError(TKind.NotAnInterface, ti)
        n = len(methods(tab, ti))
        x = self.fresh()
        if tab.is_struct(u):
            if not subtype(tab, u, ti):
                raise TranslationError(TKind.NotASubtype, f"{u} <: {ti}")
            self.fire("td-destr-iface-struct")

            def body(payload, *_):
                y = self.fresh()
                return Case(TVar(payload), (
                    Clause(con_name(u), (y,), App(Con(con_name(u)), TVar(y))),))

            return Lam(x, self.unpack(TVar(x), con_name(ti), n + 1, body))
        self.fire("td-destr-iface-iface")

        def body(payload, *_):
            clauses = []
            for ts in tab.structs():
                if subtype(tab, ts, u):
                    y = self.fresh()
                    rebuilt = App(Con(con_name(ts)), TVar(y))
                    clauses.append(Clause(
                        con_name(ts), (y,), App(self.build_upcast(ts, u), rebuilt)))
            return Case(TVar(payload), tuple(clauses))

        return Lam(x, self.unpack(TVar(x), con_name(ti), n + 1, body))

    def coerce(self, frm: str, to: str, e: TLExpr, where: str = "") -> TLExpr:
        if frm == to:
            return e
        self._need_type(to, where or "coercion")
        if not self.table.is_interface(to) or not subtype(self.table, frm, to):
            raise TranslationError(TKind.NotASubtype, f"{where}: {frm} <: {to}")
        self.fire("td-sub")
        return App(self.build_upcast(frm, to), e)

    # expressions

    def expr(self, env: dict[str, str], e: Expr) -> tuple[str, TLExpr]:
        tab = self.table
        match e:
            case Var(x):
                if x not in env:
                    raise TranslationError(TKind.UnknownVar, x)
                self.fire("td-var")
                return env[x], TVar(var_name(x))
            case StructLit(ts, args):
                self._need_type(ts, "struct literal")
                if not tab.is_struct(ts):
                    raise TranslationError(TKind.NotAStruct, ts)
                fields = tab.fields(ts)
                if len(fields) != len(args):
                    raise TranslationError(TKind.ArityMismatch, f"{ts}{{...}}")
                items = [self._demand(env, a, f.type, f"{ts}.{f.name}")
                         for f, a in zip(fields, args)]
                self.fire("td-struct")
                return ts, App(Con(con_name(ts)), mk_tuple(*items))
            case Select(recv, f):
                t, er = self.expr(env, recv)
                if not tab.is_struct(t):
                    raise TranslationError(TKind.NotAStruct, f"{t}.{f}")
                fields = tab.fields(t)
                for i, fd in enumerate(fields):
                    if fd.name == f:
                        break
                else:
                    raise TranslationError(TKind.NoSuchField, f"{t}.{f}")
                self.fire("td-access")
                return fd.type, self.unpack(er, con_name(t), len(fields), lambda *xs: TVar(xs[i]))
            case Call(recv, m, args):
                t, er = self.expr(env, recv)
                specs = methods(tab, t)
                for j, spec in enumerate(specs):
                    if spec.name == m:
                        break
                else:
                    raise TranslationError(TKind.NoSuchMethod, f"{t}.{m}")
                params = spec.sig.params
                if len(params) != len(args):
                    raise TranslationError(TKind.ArityMismatch, f"{t}.{m}")
                targs = [self._demand(env, a, p.type, f"{t}.{m}({p.name})")
                         for p, a in zip(params, args)]
                if tab.is_struct(t):
                    self.fire("td-call-struct")
                    return spec.sig.result, apply(
                        MethodVar(method_name(m, t)), er, mk_tuple(*targs))
                self.fire("td-call-iface")
                body = lambda payload, *slots: apply(
                    TVar(slots[j]), TVar(payload), mk_tuple(*targs))
                return spec.sig.result, self.unpack(er, con_name(t), len(specs) + 1, body)
            case Assert(recv, u):
                self._need_type(u, "assertion")
                t, er = self.expr(env, recv)
                if not tab.is_interface(t):
                    raise TranslationError(TKind.AssertOnStruct, f"{t}.({u})")
                self.fire("td-assert")
                return u, App(self.build_downcast(t, u), er)
        raise TypeError(f"not an FG expression: {e!r}")

    def _demand(self, env, e: Expr, want: str, where: str) -> TLExpr:
        t, te = self.expr(env, e)
        return self.coerce(t, want, te, where)

    # declarations

    def method(self, d: MethodDecl) -> tuple[str, Lam]:
        self._need_type(d.recv.type, "receiver")
        if not self.table.is_struct(d.recv.type):
            raise TranslationError(TKind.NotAStruct, f"receiver {d.recv.type}")
        env = {d.recv.name: d.recv.type}
        env.update((p.name, p.type) for p in d.sig.params)
        for p in d.sig.params:
            self._need_type(p.type, f"{d.recv.type}.{d.name}")
        body = self._demand(env, d.body, d.sig.result, f"{d.recv.type}.{d.name} result")
        self.fire("td-method")
        z = self.fresh()
        xs = tuple(var_name(p.name) for p in d.sig.params)
        params = Lam(z, Case(TVar(z), (Clause(tuple_con(len(xs)), xs, body),)))
        return method_name(d.name, d.recv.type), Lam(var_name(d.recv.name), params)

    def program(self, p: Program) -> tuple[str, TLProgram]:
        binds = tuple(self.method(d) for d in p.decls if isinstance(d, MethodDecl))
        t, main = self.expr({}, p.main)
        self.fire("td-prog")
        return t, TLProgram(binds, main)


def _checked_table(p: Program) -> DeclTable:
    table = build_table(p)
    violations = check_conditions(table)
    if violations:
        raise WellFormednessError(violations)
    return table


def translate_expr(table: DeclTable, env: dict[str, str], e: Expr, counts=None):
    return Translator(table, counts).expr(env, e)


def coerce(table: DeclTable, frm: str, to: str, e: TLExpr) -> TLExpr:
    return Translator(table).coerce(frm, to, e)


def build_upcast(table: DeclTable, t: str, ui: str) -> TLExpr:
    return Translator(table).build_upcast(t, ui)


def build_downcast(table: DeclTable, ti: str, u: str) -> TLExpr:
    return Translator(table).build_downcast(ti, u)


def translate_method(table: DeclTable, d: MethodDecl) -> tuple[str, Lam]:
    return Translator(table).method(d)


def translate_program(p: Program, counts: Counter | None = None) -> TLProgram:
    return translate_program_typed(p, counts)[1]


def translate_program_typed(
    p: Program, counts: Counter | None = None, translator=Translator,
) -> tuple[str, TLProgram]:
    """Translate `p`; also return the synthesized type of its main expression."""
    table = _checked_table(p)
    return translator(table, counts).program(p)


def dictionary_slots(table: DeclTable, ti: str, ts: str) -> list[str]:
    """Binding names that an interface value of `ti` over `ts` must carry."""
    slots = []
    for s in methods(table, ti):
        method_lookup(table, s.name, ts)
        slots.append(method_name(s.name, ts))
    return slots
