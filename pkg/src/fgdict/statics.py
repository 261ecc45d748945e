"""Declaration tables, well-formedness conditions, and structural subtyping.

The conditions checked here are the classic four for FG programs

* FG1: structs are non-recursive,
* FG2: struct field names are distinct,
* FG3: interface method names are distinct,
* FG4: a method declaration is identified by (method name, receiver type),

plus "every mentioned type is declared" and "receivers are structs".
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .syntax import (
    Assert,
    InterfaceType,
    MethodDecl,
    MethodSpec,
    Program,
    StructLit,
    StructType,
    TypeDecl,
    subexprs,
)


class WfKind(enum.Enum):
    RecursiveStruct = "RecursiveStruct"
    DupField = "DupField"
    DupMethodSpec = "DupMethodSpec"
    DupReceiverMethod = "DupReceiverMethod"
    UndefinedType = "UndefinedType"
    DupTypeDecl = "DupTypeDecl"
    ReceiverNotStruct = "ReceiverNotStruct"
    NameSetOverlap = "NameSetOverlap"
    DupParam = "DupParam"

    @property
    def condition(self) -> str:
        """The numbered condition this kind belongs to, or "wf" for the rest."""
        return _CONDITION.get(self, "wf")


_CONDITION = {
    WfKind.RecursiveStruct: "FG1",
    WfKind.DupField: "FG2",
    WfKind.DupMethodSpec: "FG3",
    WfKind.DupReceiverMethod: "FG4",
}


@dataclass(frozen=True)
class WfViolation:
    kind: WfKind
    location: str
    detail: str = ""

    def __str__(self) -> str:
        s = f"{self.kind.value}({self.location})"
        return f"{s}: {self.detail}" if self.detail else s

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "location": self.location, "detail": self.detail}


class WellFormednessError(Exception):
    def __init__(self, violations: list[WfViolation]):
        self.violations = violations
        super().__init__("; ".join(str(v) for v in violations))


class UndefinedTypeError(LookupError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"undefined type {name}")


class NoSuchMethod(LookupError):
    def __init__(self, method: str, tname: str):
        self.method = method
        self.tname = tname
        super().__init__(f"no method {method} for receiver {tname}")


@dataclass
class DeclTable:
    types: dict[str, TypeDecl]
    methods_by_receiver: dict[tuple[str, str], MethodDecl]
    decls: tuple
    main: object = None
    _struct_specs: dict[str, tuple[MethodSpec, ...]] = field(default_factory=dict, repr=False)
    _spec_sets: dict[str, frozenset[MethodSpec]] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        by_recv: dict[str, list[MethodSpec]] = {}
        for d in self.decls:
            if isinstance(d, MethodDecl):
                by_recv.setdefault(d.recv.type, []).append(d.spec)
        self._struct_specs = {t: tuple(v) for t, v in by_recv.items()}

    def decl(self, t: str) -> TypeDecl:
        try:
            return self.types[t]
        except KeyError:
            raise UndefinedTypeError(t) from None

    def is_struct(self, t: str) -> bool:
        return isinstance(self.decl(t).literal, StructType)

    def is_interface(self, t: str) -> bool:
        return isinstance(self.decl(t).literal, InterfaceType)

    def fields(self, t: str):
        lit = self.decl(t).literal
        if not isinstance(lit, StructType):
            raise TypeError(f"{t} is not a struct")
        return lit.fields

    def structs(self) -> list[str]:
        """Struct names in declaration order."""
        return [d.name for d in self.decls if isinstance(d, TypeDecl) and d.is_struct]

    def interfaces(self) -> list[str]:
        return [d.name for d in self.decls if isinstance(d, TypeDecl) and not d.is_struct]

    def spec_set(self, t: str) -> frozenset[MethodSpec]:
        s = self._spec_sets.get(t)
        if s is None:
            s = self._spec_sets[t] = frozenset(methods(self, t))
        return s


def build_table(p: Program) -> DeclTable:
    """Index the declarations of `p`; raise WellFormednessError on duplicates."""
    violations = []
    types: dict[str, TypeDecl] = {}
    meths: dict[tuple[str, str], MethodDecl] = {}
    for d in p.decls:
        if isinstance(d, TypeDecl):
            prev = types.get(d.name)
            if prev is None:
                types[d.name] = d
            elif prev.is_struct != d.is_struct:
                violations.append(WfViolation(
                    WfKind.NameSetOverlap, d.name, "declared as both struct and interface"))
            else:
                violations.append(WfViolation(WfKind.DupTypeDecl, d.name))
        else:
            key = (d.name, d.recv.type)
            if key in meths:
                violations.append(WfViolation(WfKind.DupReceiverMethod, f"{d.name},{d.recv.type}"))
            else:
                meths[key] = d
    if violations:
        raise WellFormednessError(violations)
    return DeclTable(types, meths, p.decls, p.main)


def _struct_graph(table: DeclTable, strict: bool) -> dict[str, list[str]]:
    graph: dict[str, list[str]] = {}
    for name, d in table.types.items():
        lit = d.literal
        if isinstance(lit, StructType):
            targets = [f.type for f in lit.fields]
        elif strict:
            targets = [t for s in lit.specs for t in (*(p.type for p in s.sig.params), s.sig.result)]
        else:
            continue
        graph[name] = [
            t for t in targets
            if t in table.types and (strict or table.types[t].is_struct)
        ]
    return graph


def _cyclic_nodes(graph: dict[str, list[str]]) -> list[str]:
    """Nodes lying on a cycle, in graph insertion order."""
    on_cycle = set()
    color: dict[str, int] = {}
    for root in graph:
        if root in color:
            continue
        stack = [(root, iter(graph.get(root, ())))]
        path = [root]
        color[root] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                path.pop()
                color[node] = 2
            elif color.get(nxt) == 1:
                on_cycle.update(path[path.index(nxt):])
            elif nxt not in color:
                color[nxt] = 1
                path.append(nxt)
                stack.append((nxt, iter(graph.get(nxt, ()))))
    return [n for n in graph if n in on_cycle]


def check_conditions(table: DeclTable, strict: bool = False) -> list[WfViolation]:
    """Return every violation of FG1-FG4, type definedness and receiver kind.

    With `strict`, cycles running through interface method signatures are
    also reported as recursive structs.
    """
    out: list[WfViolation] = []

    def need(t: str, where: str):
        if t not in table.types:
            out.append(WfViolation(WfKind.UndefinedType, where, t))

    for t in _cyclic_nodes(_struct_graph(table, strict)):
        if table.types[t].is_struct:
            out.append(WfViolation(WfKind.RecursiveStruct, t))

    for d in table.decls:
        if isinstance(d, TypeDecl):
            lit = d.literal
            if isinstance(lit, StructType):
                seen = set()
                for f in lit.fields:
                    if f.name in seen:
                        out.append(WfViolation(WfKind.DupField, f"{d.name},{f.name}"))
                    seen.add(f.name)
                    need(f.type, f"{d.name}.{f.name}")
            else:
                seen = set()
                for s in lit.specs:
                    if s.name in seen:
                        out.append(WfViolation(WfKind.DupMethodSpec, f"{d.name},{s.name}"))
                    seen.add(s.name)
                    _check_sig(s.name, [], s.sig, f"{d.name}.{s.name}", need, out)
        else:
            where = f"{d.recv.type}.{d.name}"
            if d.recv.type not in table.types:
                need(d.recv.type, where)
            elif not table.types[d.recv.type].is_struct:
                out.append(WfViolation(WfKind.ReceiverNotStruct, where))
            _check_sig(d.name, [d.recv.name], d.sig, where, need, out)
            _check_expr_types(d.body, where, need)
    if table.main is not None:
        _check_expr_types(table.main, "main", need)
    return out


def _check_sig(name, bound, sig, where, need, out):
    seen = set(bound)
    for p in sig.params:
        if p.name in seen:
            out.append(WfViolation(WfKind.DupParam, where, p.name))
        seen.add(p.name)
        need(p.type, where)
    need(sig.result, where)


def _check_expr_types(e, where, need):
    for s in subexprs(e):
        if isinstance(s, (StructLit, Assert)):
            need(s.tname, where)


def check_program(p: Program, strict: bool = False) -> tuple[DeclTable | None, list[WfViolation]]:
    """Build the table and run every check; the table is None on duplicates."""
    try:
        table = build_table(p)
    except WellFormednessError as e:
        return None, e.violations
    return table, check_conditions(table, strict)


def methods(table: DeclTable, t: str) -> tuple[MethodSpec, ...]:
    """Method specs of `t` in declaration order."""
    lit = table.decl(t).literal
    if isinstance(lit, InterfaceType):
        return lit.specs
    return table._struct_specs.get(t, ())


def subtype(table: DeclTable, t: str, u: str) -> bool:
    ud = table.decl(u)
    table.decl(t)
    if isinstance(ud.literal, StructType):
        return t == u
    return table.spec_set(t) >= table.spec_set(u)


def method_lookup(table: DeclTable, m: str, ts: str) -> MethodDecl:
    try:
        return table.methods_by_receiver[(m, ts)]
    except KeyError:
        raise NoSuchMethod(m, ts) from None


def param_name_warnings(table: DeclTable) -> list[str]:
    """Pairs of specs that differ only in parameter names.

    Such specs are distinct for subtyping, which is rarely what was meant.
    """
    seen: dict[tuple, MethodSpec] = {}
    out = []
    specs = [s for t in table.interfaces() for s in methods(table, t)]
    specs += [d.spec for d in table.decls if isinstance(d, MethodDecl)]
    for s in specs:
        key = (s.name, tuple(p.type for p in s.sig.params), s.sig.result)
        prev = seen.setdefault(key, s)
        if prev != s:
            out.append(f"{s.name}: parameter names {[p.name for p in prev.sig.params]} "
                       f"and {[p.name for p in s.sig.params]} make otherwise equal specs differ")
            seen[key] = s
    return out
