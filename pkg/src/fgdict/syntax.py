"""Abstract syntax of Featherweight Go.

All nodes are immutable and compare structurally, so two programs are equal
exactly when their trees are.  Sequences are stored as tuples.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True, slots=True)
class Var:
    name: str


@dataclass(frozen=True, slots=True)
class Call:
    recv: Expr
    method: str
    args: tuple[Expr, ...] = ()


@dataclass(frozen=True, slots=True)
class StructLit:
    tname: str
    args: tuple[Expr, ...] = ()


@dataclass(frozen=True, slots=True)
class Select:
    recv: Expr
    field: str


@dataclass(frozen=True, slots=True)
class Assert:
    recv: Expr
    tname: str


Expr = Union[Var, Call, StructLit, Select, Assert]

# Values are struct literals whose arguments are all values.
FGValue = StructLit


@dataclass(frozen=True, slots=True)
class Param:
    name: str
    type: str


@dataclass(frozen=True, slots=True)
class Signature:
    params: tuple[Param, ...]
    result: str


@dataclass(frozen=True, slots=True)
class MethodSpec:
    name: str
    sig: Signature


@dataclass(frozen=True, slots=True)
class Field:
    name: str
    type: str


@dataclass(frozen=True, slots=True)
class StructType:
    fields: tuple[Field, ...] = ()


@dataclass(frozen=True, slots=True)
class InterfaceType:
    specs: tuple[MethodSpec, ...] = ()


@dataclass(frozen=True, slots=True)
class TypeDecl:
    name: str
    literal: StructType | InterfaceType

    @property
    def is_struct(self) -> bool:
        return isinstance(self.literal, StructType)


@dataclass(frozen=True, slots=True)
class MethodDecl:
    recv: Param
    name: str
    sig: Signature
    body: Expr

    @property
    def spec(self) -> MethodSpec:
        return MethodSpec(self.name, self.sig)


Decl = Union[TypeDecl, MethodDecl]


@dataclass(frozen=True, slots=True)
class Program:
    decls: tuple[Decl, ...]
    main: Expr


def is_value(e: Expr) -> bool:
    return isinstance(e, StructLit) and all(is_value(a) for a in e.args)


def subexprs(e: Expr):
    """Yield `e` and every expression nested inside it, preorder."""
    stack = [e]
    while stack:
        e = stack.pop()
        yield e
        match e:
            case Call(recv, _, args):
                stack.extend(reversed(args))
                stack.append(recv)
            case StructLit(_, args):
                stack.extend(reversed(args))
            case Select(recv, _) | Assert(recv, _):
                stack.append(recv)


def expr_size(e: Expr) -> int:
    return sum(1 for _ in subexprs(e))


def free_vars(e: Expr) -> set[str]:
    return {s.name for s in subexprs(e) if isinstance(s, Var)}


def substitute(e: Expr, env: dict[str, Expr]) -> Expr:
    """Replace variables by the expressions in `env`.

    FG expressions contain no binders, so no renaming is ever needed.
    Unchanged subtrees are returned as-is to keep sharing.
    """
    match e:
        case Var(name):
            return env.get(name, e)
        case StructLit(t, args):
            new = tuple(substitute(a, env) for a in args)
            return e if all(x is y for x, y in zip(new, args)) else StructLit(t, new)
        case Call(recv, m, args):
            r = substitute(recv, env)
            new = tuple(substitute(a, env) for a in args)
            if r is recv and all(x is y for x, y in zip(new, args)):
                return e
            return Call(r, m, new)
        case Select(recv, f):
            r = substitute(recv, env)
            return e if r is recv else Select(r, f)
        case Assert(recv, t):
            r = substitute(recv, env)
            return e if r is recv else Assert(r, t)
    raise TypeError(f"not an FG expression: {e!r}")


def program_size(p: Program) -> int:
    n = expr_size(p.main)
    for d in p.decls:
        n += 1
        if isinstance(d, MethodDecl):
            n += len(d.sig.params) + expr_size(d.body)
        elif isinstance(d.literal, StructType):
            n += len(d.literal.fields)
        else:
            n += sum(1 + len(s.sig.params) for s in d.literal.specs)
    return n
