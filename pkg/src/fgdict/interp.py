"""Small-step evaluation of FG expressions.

Evaluation contexts::

    E ::= [] | tS{v..., E, e...} | E.f | E.(t) | E.m(e...) | v.m(v..., E, e...)

so struct arguments go left to right, then the receiver of a call, then
its arguments left to right.  `fg_step` contracts the unique active redex;
`fg_decompose_all` enumerates every decomposition straight from the grammar
and serves as the determinism oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import outcome
from .outcome import AtValue, Panicked, Stepped, StepResult, Stuck
from .statics import DeclTable, NoSuchMethod, UndefinedTypeError, method_lookup, subtype
from .syntax import Assert, Call, Expr, Select, StructLit, Var, free_vars, is_value, substitute


class FreeVariable(Exception):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"free variable {name}")


class _Panic(Exception):
    pass


class _Stuck(Exception):
    pass


def contract(table: DeclTable, redex: Expr) -> Expr:
    """Apply fg-field, fg-call or fg-assert to a redex whose parts are values.

    Raises _Panic for a failed assertion and _Stuck for anything else that
    does not reduce.
    """
    match redex:
        case Select(StructLit(ts, vs) as v, f):
            try:
                fields = table.fields(ts)
            except (UndefinedTypeError, TypeError):
                raise _Stuck(redex) from None
            for i, fd in enumerate(fields):
                if fd.name == f and i < len(vs):
                    return vs[i]
            raise _Stuck(redex)
        case Call(StructLit(ts, _) as v, m, vs):
            try:
                d = method_lookup(table, m, ts)
            except NoSuchMethod:
                raise _Stuck(redex) from None
            if len(d.sig.params) != len(vs):
                raise _Stuck(redex)
            env = {d.recv.name: v}
            env.update((p.name, a) for p, a in zip(d.sig.params, vs))
            return substitute(d.body, env)
        case Assert(StructLit(ts, _) as v, t):
            try:
                ok = subtype(table, ts, t)
            except UndefinedTypeError:
                raise _Stuck(redex) from None
            if not ok:
                raise _Panic(redex)
            return v
    raise _Stuck(redex)


def _step(table: DeclTable, e: Expr) -> Expr | None:
    """One leftmost-innermost step, or None when `e` is a value."""
    match e:
        case StructLit(t, args):
            for i, a in enumerate(args):
                r = _step(table, a)
                if r is not None:
                    return StructLit(t, args[:i] + (r,) + args[i + 1:])
            return None
        case Select(recv, f):
            r = _step(table, recv)
            return Select(r, f) if r is not None else contract(table, e)
        case Assert(recv, t):
            r = _step(table, recv)
            return Assert(r, t) if r is not None else contract(table, e)
        case Call(recv, m, args):
            r = _step(table, recv)
            if r is not None:
                return Call(r, m, args)
            for i, a in enumerate(args):
                r = _step(table, a)
                if r is not None:
                    return Call(recv, m, args[:i] + (r,) + args[i + 1:])
            return contract(table, e)
        case Var(name):
            raise FreeVariable(name)
    raise TypeError(f"not an FG expression: {e!r}")


def _step_result(table: DeclTable, e: Expr) -> StepResult:
    try:
        r = _step(table, e)
    except _Panic as p:
        return Panicked(p.args[0])
    except _Stuck as s:
        return Stuck(s.args[0])
    return AtValue(e) if r is None else Stepped(r)


def _require_closed(e: Expr):
    fv = free_vars(e)
    if fv:
        raise FreeVariable(min(fv))


def fg_step(table: DeclTable, e: Expr) -> StepResult:
    _require_closed(e)
    return _step_result(table, e)


def fg_run(
    table: DeclTable,
    e: Expr,
    budget: int,
    detect_cycles: bool = True,
    on_step=None,
) -> outcome.Outcome:
    """Evaluate `e` for at most `budget` steps.

    `on_step(n, expr)` is called after every step (and turns off cycle
    skipping so that every intermediate state is observed).
    """
    _require_closed(e)
    return outcome.run_loop(
        lambda x: _step_result(table, x), e, budget, detect_cycles, on_step)


# Determinism oracle

class _HoleType:
    __slots__ = ()

    def __repr__(self):
        return "[]"


HOLE = _HoleType()


@dataclass(frozen=True)
class Decomposition:
    context: Expr
    redex: Expr


def plug(ctx, e: Expr) -> Expr:
    """Fill the hole of `ctx` with `e`."""
    if ctx is HOLE:
        return e
    match ctx:
        case StructLit(t, args):
            return StructLit(t, tuple(plug(a, e) for a in args))
        case Select(recv, f):
            return Select(plug(recv, e), f)
        case Assert(recv, t):
            return Assert(plug(recv, e), t)
        case Call(recv, m, args):
            return Call(plug(recv, e), m, tuple(plug(a, e) for a in args))
    return ctx


def _is_redex_shape(e: Expr) -> bool:
    match e:
        case Select(recv, _) | Assert(recv, _):
            return is_value(recv)
        case Call(recv, _, args):
            return is_value(recv) and all(is_value(a) for a in args)
    return False


def fg_decompose_all(e: Expr) -> list[Decomposition]:
    """Every way to write `e` as E[r] with `r` of redex shape.

    Redex shapes are `v.f`, `v.m(v...)` and `v.(t)`; whether the redex
    actually contracts or panics is up to the declarations.
    """
    out = []
    if _is_redex_shape(e):
        out.append(Decomposition(HOLE, e))
    match e:
        case StructLit(t, args):
            for i, a in enumerate(args):
                if all(is_value(b) for b in args[:i]):
                    for d in fg_decompose_all(a):
                        ctx = StructLit(t, args[:i] + (d.context,) + args[i + 1:])
                        out.append(Decomposition(ctx, d.redex))
        case Select(recv, f):
            out.extend(Decomposition(Select(d.context, f), d.redex) for d in fg_decompose_all(recv))
        case Assert(recv, t):
            out.extend(Decomposition(Assert(d.context, t), d.redex) for d in fg_decompose_all(recv))
        case Call(recv, m, args):
            out.extend(
                Decomposition(Call(d.context, m, args), d.redex) for d in fg_decompose_all(recv))
            if is_value(recv):
                for i, a in enumerate(args):
                    if all(is_value(b) for b in args[:i]):
                        for d in fg_decompose_all(a):
                            ctx = Call(recv, m, args[:i] + (d.context,) + args[i + 1:])
                            out.append(Decomposition(ctx, d.redex))
    return out


def contract_in_context(table: DeclTable, d: Decomposition) -> StepResult:
    """Contract the redex of `d` and plug the result back."""
    try:
        r = contract(table, d.redex)
    except _Panic as p:
        return Panicked(p.args[0])
    except _Stuck as s:
        return Stuck(s.args[0])
    return Stepped(plug(d.context, r))
