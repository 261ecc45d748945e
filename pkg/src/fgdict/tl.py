"""The untyped target calculus: lambda terms with constructors and case.

Evaluation contexts::

    E ::= [] | case E of {...} | E e | V E

A constructor applied to values (`K V1 ... Vn`, built with nested `App`)
is a value, as are lambdas and method names.  `App` nodes cache whether
they are values so that finding the active redex is linear in its depth.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Union

from . import outcome
from .outcome import AtValue, Panicked, Stepped, StepResult, Stuck


@dataclass(frozen=True, slots=True)
class Var:
    name: str


@dataclass(frozen=True, slots=True)
class MethodVar:
    name: str


@dataclass(frozen=True, slots=True)
class Con:
    name: str


@dataclass(frozen=True, slots=True)
class App:
    fun: TLExpr
    arg: TLExpr
    val: bool = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        f = self.fun
        object.__setattr__(
            self, "val", (type(f) is Con or (type(f) is App and f.val)) and is_value(self.arg))


@dataclass(frozen=True, slots=True)
class Lam:
    param: str
    body: TLExpr


@dataclass(frozen=True, slots=True)
class Clause:
    con: str
    vars: tuple[str, ...]
    body: TLExpr


@dataclass(frozen=True, slots=True)
class Case:
    scrut: TLExpr
    clauses: tuple[Clause, ...]


TLExpr = Union[Var, MethodVar, Con, App, Lam, Case]


def is_value(e: TLExpr) -> bool:
    t = type(e)
    return t is Lam or t is MethodVar or t is Con or (t is App and e.val)


# Value views, used for reporting and for checking correspondence.

@dataclass(frozen=True, slots=True)
class ConVal:
    con: str
    args: tuple[TLValue, ...] = ()


@dataclass(frozen=True, slots=True)
class LamVal:
    param: str
    body: TLExpr


@dataclass(frozen=True, slots=True)
class MethodName:
    name: str


TLValue = Union[ConVal, LamVal, MethodName]


def to_value(e: TLExpr) -> TLValue:
    if type(e) is Lam:
        return LamVal(e.param, e.body)
    if type(e) is MethodVar:
        return MethodName(e.name)
    head, args = spine(e)
    if type(head) is not Con or not is_value(e):
        raise ValueError(f"not a value: {e!r}")
    return ConVal(head.name, tuple(to_value(a) for a in args))


def from_value(v: TLValue) -> TLExpr:
    match v:
        case ConVal(k, args):
            return apply(Con(k), *(from_value(a) for a in args))
        case LamVal(x, body):
            return Lam(x, body)
        case MethodName(y):
            return MethodVar(y)
    raise TypeError(f"not a TL value: {v!r}")


def spine(e: TLExpr) -> tuple[TLExpr, list[TLExpr]]:
    args = []
    while type(e) is App:
        args.append(e.arg)
        e = e.fun
    args.reverse()
    return e, args


def apply(f: TLExpr, *args: TLExpr) -> TLExpr:
    for a in args:
        f = App(f, a)
    return f


def tuple_con(n: int) -> str:
    return f"Tuple{n}"


_TUPLE_RE = re.compile(r"Tuple(\d+)\Z")


def tuple_arity(con: str) -> int | None:
    m = _TUPLE_RE.match(con)
    return int(m.group(1)) if m else None


def mk_tuple(*items: TLExpr) -> TLExpr:
    return apply(Con(tuple_con(len(items))), *items)


@dataclass(frozen=True)
class TLProgram:
    bindings: tuple[tuple[str, Lam], ...]
    main: TLExpr

    @property
    def mu(self) -> dict[str, Lam]:
        return dict(self.bindings)


class UnboundMethodVar(LookupError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unbound method variable {name}")


class FreeTermVariable(Exception):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"free term variable {name}")


# Free variables and substitution

def tl_free_vars(e: TLExpr) -> tuple[set[str], set[str]]:
    """(free term variables, method variables) of `e`."""
    terms: set[str] = set()
    methods: set[str] = set()

    def go(e, bound):
        while True:
            t = type(e)
            if t is Var:
                if e.name not in bound:
                    terms.add(e.name)
                return
            if t is MethodVar:
                methods.add(e.name)
                return
            if t is Con:
                return
            if t is App:
                go(e.fun, bound)
                e = e.arg
            elif t is Lam:
                bound = bound | {e.param}
                e = e.body
            elif t is Case:
                go(e.scrut, bound)
                for cl in e.clauses:
                    go(cl.body, bound | set(cl.vars))
                return
            else:
                raise TypeError(f"not a TL expression: {e!r}")

    go(e, frozenset())
    return terms, methods


def _subst_closed(e: TLExpr, env: dict[str, TLExpr]) -> TLExpr:
    # Every substituted value is closed, so binders never capture.
    t = type(e)
    if t is Var:
        return env.get(e.name, e)
    if t is App:
        f = _subst_closed(e.fun, env)
        a = _subst_closed(e.arg, env)
        return e if f is e.fun and a is e.arg else App(f, a)
    if t is Lam:
        if e.param in env:
            env = {k: v for k, v in env.items() if k != e.param}
            if not env:
                return e
        b = _subst_closed(e.body, env)
        return e if b is e.body else Lam(e.param, b)
    if t is Case:
        s = _subst_closed(e.scrut, env)
        changed = s is not e.scrut
        cls = []
        for cl in e.clauses:
            inner = env
            if any(x in env for x in cl.vars):
                inner = {k: v for k, v in env.items() if k not in cl.vars}
            b = _subst_closed(cl.body, inner) if inner else cl.body
            if b is not cl.body:
                changed = True
                cl = Clause(cl.con, cl.vars, b)
            cls.append(cl)
        return Case(s, tuple(cls)) if changed else e
    return e


def _all_names(e: TLExpr) -> set[str]:
    names = set()
    stack = [e]
    while stack:
        e = stack.pop()
        t = type(e)
        if t is Var:
            names.add(e.name)
        elif t is App:
            stack += (e.fun, e.arg)
        elif t is Lam:
            names.add(e.param)
            stack.append(e.body)
        elif t is Case:
            stack.append(e.scrut)
            for cl in e.clauses:
                names.update(cl.vars)
                stack.append(cl.body)
    return names


def substitute(e: TLExpr, env: dict[str, TLExpr], fresh=None) -> TLExpr:
    """Capture-avoiding simultaneous substitution.

    Binders that would capture a free variable of a substituted term are
    renamed to `%k` names drawn from `fresh` (an iterator of ints).
    """
    avoid: set[str] = set()
    for v in env.values():
        avoid |= tl_free_vars(v)[0]
    if not avoid:
        return _subst_closed(e, env)
    if fresh is None:
        fresh = itertools.count()
    used = avoid | _all_names(e) | set(env)

    def rename(x):
        while True:
            y = f"%{next(fresh)}"
            if y not in used:
                used.add(y)
                return y

    def go(e, env):
        t = type(e)
        if t is Var:
            return env.get(e.name, e)
        if t is App:
            return App(go(e.fun, env), go(e.arg, env))
        if t is Lam:
            env = {k: v for k, v in env.items() if k != e.param}
            x = e.param
            if x in avoid:
                y = rename(x)
                env[x] = Var(y)
                x = y
            return Lam(x, go(e.body, env))
        if t is Case:
            cls = []
            for cl in e.clauses:
                inner = {k: v for k, v in env.items() if k not in cl.vars}
                xs = []
                for x in cl.vars:
                    if x in avoid:
                        y = rename(x)
                        inner[x] = Var(y)
                        x = y
                    xs.append(x)
                cls.append(Clause(cl.con, tuple(xs), go(cl.body, inner)))
            return Case(go(e.scrut, env), tuple(cls))
        return e

    return go(e, dict(env))


# Reduction

class _Panic(Exception):
    pass


class _Stuck(Exception):
    pass


def contract(mu: dict[str, Lam], redex: TLExpr) -> TLExpr:
    """tl-lambda, tl-method or tl-case on a redex whose parts are values."""
    t = type(redex)
    if t is App:
        f = redex.fun
        if type(f) is Lam:
            return _subst_closed(f.body, {f.param: redex.arg})
        if type(f) is MethodVar:
            body = mu.get(f.name)
            if body is None:
                raise UnboundMethodVar(f.name)
            return App(body, redex.arg)
    elif t is Case:
        head, args = spine(redex.scrut)
        if type(head) is Con:
            for cl in redex.clauses:
                if cl.con == head.name:
                    if len(cl.vars) != len(args):
                        raise _Stuck(redex)
                    return _subst_closed(cl.body, dict(zip(cl.vars, args)))
            raise _Panic(redex)
    raise _Stuck(redex)


def _step(mu: dict[str, Lam], e: TLExpr) -> TLExpr:
    # `e` is not a value
    t = type(e)
    if t is App:
        f = e.fun
        if not is_value(f):
            return App(_step(mu, f), e.arg)
        a = e.arg
        if not is_value(a):
            return App(f, _step(mu, a))
        return contract(mu, e)
    if t is Case:
        s = e.scrut
        if not is_value(s):
            return Case(_step(mu, s), e.clauses)
        return contract(mu, e)
    raise _Stuck(e)


def _step_result(mu: dict[str, Lam], e: TLExpr) -> StepResult:
    if is_value(e):
        return AtValue(to_value(e))
    try:
        return Stepped(_step(mu, e))
    except _Panic as p:
        return Panicked(p.args[0])
    except _Stuck as s:
        return Stuck(s.args[0])


def _require_closed(e: TLExpr):
    fv = tl_free_vars(e)[0]
    if fv:
        raise FreeTermVariable(min(fv))


def tl_step(mu: dict[str, Lam], e: TLExpr) -> StepResult:
    _require_closed(e)
    return _step_result(mu, e)


def tl_run(prog: TLProgram, budget: int, detect_cycles: bool = True, on_step=None):
    """Evaluate the main expression of `prog` for at most `budget` steps."""
    mu = prog.mu
    _require_closed(prog.main)
    for _, body in prog.bindings:
        _require_closed(body)
    return outcome.run_loop(
        lambda x: _step_result(mu, x), prog.main, budget, detect_cycles, on_step)


# Determinism oracle

class _HoleType:
    __slots__ = ()

    def __repr__(self):
        return "[]"


HOLE = _HoleType()


@dataclass(frozen=True)
class Decomposition:
    context: object
    redex: TLExpr


@dataclass(frozen=True)
class _AppCtx:
    fun: object
    arg: object


@dataclass(frozen=True)
class _CaseCtx:
    scrut: object
    clauses: tuple


def _redex_shape(e: TLExpr) -> bool:
    if type(e) is App:
        return type(e.fun) in (Lam, MethodVar) and is_value(e.arg)
    if type(e) is Case:
        return type(spine(e.scrut)[0]) is Con and is_value(e.scrut)
    return False


def tl_decompose_all(e: TLExpr) -> list[Decomposition]:
    """Every decomposition E[r] with `r` a lambda, method or case redex."""
    out = []
    if _redex_shape(e):
        out.append(Decomposition(HOLE, e))
    if type(e) is App:
        for d in tl_decompose_all(e.fun):
            out.append(Decomposition(_AppCtx(d.context, e.arg), d.redex))
        if is_value(e.fun):
            for d in tl_decompose_all(e.arg):
                out.append(Decomposition(_AppCtx(e.fun, d.context), d.redex))
    elif type(e) is Case:
        for d in tl_decompose_all(e.scrut):
            out.append(Decomposition(_CaseCtx(d.context, e.clauses), d.redex))
    return out


def plug(ctx, e: TLExpr) -> TLExpr:
    """Fill a context produced by `tl_decompose_all`."""
    if ctx is HOLE:
        return e
    if type(ctx) is _AppCtx:
        return App(plug(ctx.fun, e), plug(ctx.arg, e))
    if type(ctx) is _CaseCtx:
        return Case(plug(ctx.scrut, e), ctx.clauses)
    return ctx


def contract_in_context(mu: dict[str, Lam], d: Decomposition) -> StepResult:
    try:
        r = contract(mu, d.redex)
    except _Panic as p:
        return Panicked(p.args[0])
    except _Stuck as s:
        return Stuck(s.args[0])
    return Stepped(plug(d.context, r))
