"""Random generation of well-formed FG programs, and a greedy shrinker.

Generation is goal directed: every expression is built against the type
it must synthesize, so the output needs no filtering.  A few invariants
keep every generated program terminating unless divergence is injected on
purpose:

* struct `S<i>` only has fields of lower-numbered structs, or of
  interfaces whose designated implementer is lower-numbered, so a value
  of every inhabited type can always be built bottom up;
* the body of a pool method `m<j>` only calls methods `m<i>` with i < j,
  and the number of calls per body is capped.

Assertions come from a "box" gadget `Box_J{e}.v.(t)`: the box forgets the
static type of `e`, so whether the assertion fails is known exactly from
the struct that `e` builds.  Panicking programs fail one such assertion on
purpose; diverging programs call a self-recursive `spin` method.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace

from .statics import WellFormednessError, build_table, subtype
from .syntax import (
    Assert,
    Call,
    Expr,
    Field,
    InterfaceType,
    MethodDecl,
    MethodSpec,
    Param,
    Program,
    Select,
    Signature,
    StructLit,
    StructType,
    TypeDecl,
    Var,
    program_size,
)
from .translate import TranslationError, translate_program_typed


class GenerationExhausted(Exception):
    pass


@dataclass(frozen=True)
class GenConfig:
    max_structs: int = 4
    max_ifaces: int = 3
    max_methods_per_iface: int = 3
    max_fields: int = 2
    max_expr_depth: int = 3
    max_call_fanout: int = 2
    panic_bias: float = 0.15
    diverge_bias: float = 0.1
    seed: int = 0

    def __post_init__(self):
        for name in ("max_structs", "max_ifaces", "max_methods_per_iface",
                     "max_fields", "max_expr_depth", "max_call_fanout"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        for name in ("panic_bias", "diverge_bias"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")


def derive_seed(seed: int, index: int) -> int:
    """Seed of the `index`-th program of a sweep starting at `seed`."""
    return random.Random(f"{seed}/{index}").getrandbits(64)


TOP = "Top"
NEVER = "Never"
BOX_FIELD = "v"
SPIN = "spin"
MAX_ATTEMPTS = 20


class _Gen:
    def __init__(self, cfg: GenConfig, rng: random.Random):
        self.cfg = cfg
        self.rng = rng
        self.boxes: dict[str, str] = {}
        self.extra: list[TypeDecl] = []

    # declarations

    def declare(self):
        cfg, rng = self.cfg, self.rng
        ns = rng.randint(1, max(1, cfg.max_structs))
        ni = rng.randint(0, cfg.max_ifaces)
        self.structs = [f"S{i}" for i in range(ns)]
        self.ifaces = [f"I{k}" for k in range(ni)]
        # designated implementer of each interface, or None if uninhabited
        self.owner = {i: (rng.randrange(ns) if rng.random() < 0.85 else None) for i in self.ifaces}
        self.inhabited = self.structs + [i for i in self.ifaces if self.owner[i] is not None]

        npool = rng.randint(0, cfg.max_methods_per_iface + cfg.max_ifaces) \
            if cfg.max_methods_per_iface else 0
        self.pool = []
        for j in range(npool):
            params = tuple(Param(f"p{k}", rng.choice(self.inhabited))
                           for k in range(rng.randint(0, cfg.max_call_fanout)))
            self.pool.append(MethodSpec(f"m{j}", Signature(params, rng.choice(self.inhabited))))

        self.iface_specs: dict[str, list[MethodSpec]] = {}
        for k, name in enumerate(self.ifaces):
            size = rng.randint(0, min(cfg.max_methods_per_iface, len(self.pool)))
            specs = set(rng.sample(self.pool, size))
            if k and rng.random() < 0.5:
                base = self.iface_specs[rng.choice(self.ifaces[:k])]
                if len(base) < cfg.max_methods_per_iface:
                    specs = set(base) | set(rng.sample(self.pool, min(
                        len(self.pool), rng.randint(0, cfg.max_methods_per_iface - len(base)))))
                    while len(specs) > cfg.max_methods_per_iface:
                        specs.discard(max(specs - set(base), key=lambda s: s.name))
            self.iface_specs[name] = sorted(specs, key=lambda s: s.name)

        self.struct_methods: dict[str, set[str]] = {s: set() for s in self.structs}
        for i, d in self.owner.items():
            if d is not None:
                self.struct_methods[self.structs[d]].update(s.name for s in self.iface_specs[i])
        for s in self.structs:
            for spec in self.pool:
                if rng.random() < 0.3:
                    self.struct_methods[s].add(spec.name)

        self.fields: dict[str, list[Field]] = {}
        for i, s in enumerate(self.structs):
            choices = self.structs[:i] + [
                t for t in self.ifaces if self.owner[t] is not None and self.owner[t] < i]
            n = rng.randint(0, cfg.max_fields) if choices else 0
            self.fields[s] = [Field(f"f{k}", rng.choice(choices)) for k in range(n)]

        self.spin_on = None
        if rng.random() < cfg.diverge_bias:
            self.spin_on = rng.choice(self.structs)
        self.rebuild_table()

    def type_decls(self) -> list[TypeDecl]:
        out = []
        for i in self.ifaces:
            out.append(TypeDecl(i, InterfaceType(tuple(self.iface_specs[i]))))
        for s in self.structs:
            out.append(TypeDecl(s, StructType(tuple(self.fields[s]))))
        return out + self.extra

    def rebuild_table(self):
        self.table = build_table(Program(tuple(self.type_decls()) + tuple(self.stub_methods()),
                                         StructLit(self.structs[0])))

    def stub_methods(self):
        by_name = {s.name: s for s in self.pool}
        for s in self.structs:
            for m in sorted(self.struct_methods[s]):
                yield MethodDecl(Param("x", s), m, by_name[m].sig, Var("x"))
        if self.spin_on:
            yield MethodDecl(Param("x", self.spin_on), SPIN, Signature((), self.spin_on), Var("x"))

    def ensure_box(self, iface: str) -> str:
        if iface not in self.boxes:
            self.ensure_iface(iface)
            name = f"Box{iface}"
            self.boxes[iface] = name
            self.extra.append(TypeDecl(name, StructType((Field(BOX_FIELD, iface),))))
            self.rebuild_table()
        return self.boxes[iface]

    def ensure_iface(self, name: str):
        if name in self.table.types:
            return
        specs = () if name == TOP else (
            MethodSpec("never", Signature((), TOP)),)
        if name == NEVER:
            self.ensure_iface(TOP)
        self.extra.append(TypeDecl(name, InterfaceType(specs)))
        self.rebuild_table()

    # expressions

    def subtypes_of(self, t: str) -> list[str]:
        return [s for s in self.inhabited if s != t and subtype(self.table, s, t)]

    def implementers(self, t: str) -> list[str]:
        return [s for s in self.structs if subtype(self.table, s, t)]

    def demand(self, t: str, env, depth: int) -> Expr:
        if depth > 0 and self.table.is_interface(t) and self.rng.random() < 0.5:
            subs = self.subtypes_of(t)
            if subs:
                return self.exact(self.rng.choice(subs), env, depth)
        return self.exact(t, env, depth)

    def exact(self, t: str, env, depth: int) -> Expr:
        """An expression whose synthesized type is exactly `t`."""
        rng = self.rng
        if self.pending and rng.random() < 0.3:
            e = self.inject(t, env, depth)
            if e is not None:
                return e
        vars_ = [x for x, u in env.items() if u == t]
        if depth <= 0:
            if vars_ and rng.random() < 0.7:
                return Var(rng.choice(vars_))
            return self.build(t, env, 0)
        forms = ["build"]
        if vars_:
            forms += ["var", "var"]
        selects = [(s, f) for s in self.structs for f in self.fields[s] if f.type == t]
        if selects:
            forms.append("select")
        calls = self.callable(t)
        if calls and self.calls_left > 0:
            forms += ["call", "call"]
        forms.append("assert")
        form = rng.choice(forms)
        if form == "var":
            return Var(rng.choice(vars_))
        if form == "select":
            s, f = rng.choice(selects)
            return Select(self.exact(s, env, depth - 1), f.name)
        if form == "call":
            self.calls_left -= 1
            spec, recv = rng.choice(calls)
            args = tuple(self.demand(p.type, env, depth - 1) for p in spec.sig.params)
            return Call(self.exact(recv, env, depth - 1), spec.name, args)
        if form == "assert":
            return self.assertion(t, env, depth)
        return self.build(t, env, depth)

    def build(self, t: str, env, depth: int) -> Expr:
        if self.table.is_struct(t):
            args = tuple(self.demand(f.type, env, depth - 1) for f in self.table.fields(t))
            return StructLit(t, args)
        box = self.ensure_box(t)
        # at the depth floor only the designated implementer is sure to bottom out
        s = self.rng.choice(self.implementers(t)) if depth > 0 else self.structs[self.owner[t]]
        inner = self.exact(s, env, depth - 1)
        return Select(StructLit(box, (inner,)), BOX_FIELD)

    def callable(self, t: str) -> list[tuple[MethodSpec, str]]:
        out = []
        for spec in self.pool[:self.mlimit]:
            if spec.sig.result != t:
                continue
            for r in self.inhabited:
                if spec in self.table.spec_set(r):
                    out.append((spec, r))
        return out

    def boxed(self, s: str, env, depth: int) -> tuple[str, Expr]:
        """`Box_J{e}.v` for an `e` of struct type `s`, with J an interface of `s`."""
        js = [j for j in self.ifaces if subtype(self.table, s, j)]
        j = self.rng.choice(js) if js and self.rng.random() < 0.7 else TOP
        self.ensure_iface(TOP)
        box = self.ensure_box(j)
        return j, Select(StructLit(box, (self.exact(s, env, depth - 1),)), BOX_FIELD)

    def assertion(self, t: str, env, depth: int) -> Expr:
        _, recv = self.boxed(self.rng.choice(self.implementers(t)), env, depth)
        return Assert(recv, t)

    def inject(self, t: str, env, depth: int) -> Expr | None:
        kind = self.pending
        if kind == "spin":
            if t != self.spin_on:
                return None
            self.pending = None
            return Call(self.exact(t, env, max(0, depth - 1)), SPIN)
        # a failing assertion: the boxed struct does not implement t
        wrong = [s for s in self.structs if not subtype(self.table, s, t)]
        if not wrong:
            return None
        self.pending = None
        _, recv = self.boxed(self.rng.choice(wrong), env, max(1, depth))
        return Assert(recv, t)

    def fallback(self, main: Expr, t: str) -> tuple[Expr, str]:
        """Force the pending gadget around `main` when no position took it."""
        if self.pending == "spin":
            s = self.spin_on
            self.pending = None
            return Call(self.exact(s, {}, 1), SPIN), s
        target = next((u for u in self.structs if u != t), None)
        if target is None or not self.table.is_struct(t):
            self.ensure_iface(NEVER)
            target = NEVER
        self.ensure_iface(TOP)
        box = self.ensure_box(TOP)
        self.pending = None
        return Assert(Select(StructLit(box, (main,)), BOX_FIELD), target), target

    # whole program

    def program(self) -> Program:
        self.declare()
        by_name = {s.name: (j, s) for j, s in enumerate(self.pool)}
        self.pending = None
        methods = []
        for s in self.structs:
            for m in sorted(self.struct_methods[s], key=lambda m: by_name[m][0]):
                j, spec = by_name[m]
                self.mlimit, self.calls_left = j, self.cfg.max_call_fanout
                env = {"x": s}
                env.update((p.name, p.type) for p in spec.sig.params)
                body = self.demand(spec.sig.result, env, self.cfg.max_expr_depth)
                methods.append(MethodDecl(Param("x", s), m, spec.sig, body))
        if self.spin_on:
            s = self.spin_on
            methods.append(MethodDecl(Param("x", s), SPIN, Signature((), s), Call(Var("x"), SPIN)))

        self.mlimit, self.calls_left = len(self.pool), 2 * self.cfg.max_call_fanout + 1
        if self.spin_on:
            self.pending = "spin"
        elif self.rng.random() < self.cfg.panic_bias:
            self.pending = "panic"
        t = self.rng.choice(self.structs + self.inhabited)
        main = self.exact(t, {}, self.cfg.max_expr_depth)
        if self.pending:
            main, t = self.fallback(main, t)
        return Program(tuple(self.type_decls()) + tuple(methods), main)


def accepted(p: Program) -> bool:
    """True when `p` passes the well-formedness checks and the translator."""
    try:
        translate_program_typed(p)
    except (TranslationError, WellFormednessError, LookupError):
        return False
    return True


def gen_program(cfg: GenConfig = GenConfig()) -> Program:
    rng = random.Random(cfg.seed)
    for _ in range(MAX_ATTEMPTS):
        p = _Gen(cfg, rng).program()
        if accepted(p):
            return p
    raise GenerationExhausted(f"no acceptable program after {MAX_ATTEMPTS} attempts")


# Shrinking

def _children(e: Expr) -> tuple[Expr, ...]:
    match e:
        case Call(recv, _, args):
            return (recv,) + args
        case StructLit(_, args):
            return args
        case Select(recv, _) | Assert(recv, _):
            return (recv,)
    return ()


def _with_children(e: Expr, kids: tuple[Expr, ...]) -> Expr:
    match e:
        case Call(_, m, _):
            return Call(kids[0], m, kids[1:])
        case StructLit(t, _):
            return StructLit(t, kids)
        case Select(_, f):
            return Select(kids[0], f)
        case Assert(_, t):
            return Assert(kids[0], t)
    return e


def _smaller_exprs(e: Expr, literals: list[Expr]):
    """Single-step shrinks of `e`: a child, a small literal, or a shrunk child."""
    kids = _children(e)
    yield from kids
    for lit in literals:
        if lit != e:
            yield lit
    for i, k in enumerate(kids):
        for k2 in _smaller_exprs(k, literals):
            yield _with_children(e, kids[:i] + (k2,) + kids[i + 1:])


def _min_literals(p: Program) -> list[Expr]:
    """Smallest literal of each struct whose fields are all structs."""
    try:
        table = build_table(p)
    except LookupError:
        return []
    memo: dict[str, Expr | None] = {}

    def lit(t, seen=()):
        if t in memo:
            return memo[t]
        if t in seen or t not in table.types or not table.is_struct(t):
            return None
        args = [lit(f.type, seen + (t,)) for f in table.fields(t)]
        memo[t] = None if any(a is None for a in args) else StructLit(t, tuple(args))
        return memo[t]

    out = [lit(t) for t in table.structs()]
    return sorted((e for e in out if e is not None), key=lambda e: len(repr(e)))


def _map_exprs(p: Program, f) -> Program:
    decls = tuple(replace(d, body=f(d.body)) if isinstance(d, MethodDecl) else d for d in p.decls)
    return Program(decls, f(p.main))


def _rewrite(e: Expr, f) -> Expr:
    return f(_with_children(e, tuple(_rewrite(k, f) for k in _children(e))))


def _drop_field(p: Program, t: str, i: int) -> Program:
    def fix(e):
        if isinstance(e, StructLit) and e.tname == t and len(e.args) > i:
            return StructLit(t, e.args[:i] + e.args[i + 1:])
        return e

    p = _map_exprs(p, lambda e: _rewrite(e, fix))
    decls = []
    for d in p.decls:
        if isinstance(d, TypeDecl) and d.name == t and d.is_struct:
            fs = d.literal.fields
            d = TypeDecl(t, StructType(fs[:i] + fs[i + 1:]))
        decls.append(d)
    return Program(tuple(decls), p.main)


def _drop_param(p: Program, m: str, i: int) -> Program:
    def sig(s: Signature) -> Signature:
        return Signature(s.params[:i] + s.params[i + 1:], s.result)

    def fix(e):
        if isinstance(e, Call) and e.method == m and len(e.args) > i:
            return Call(e.recv, m, e.args[:i] + e.args[i + 1:])
        return e

    p = _map_exprs(p, lambda e: _rewrite(e, fix))
    decls = []
    for d in p.decls:
        if isinstance(d, MethodDecl) and d.name == m:
            d = replace(d, sig=sig(d.sig))
        elif isinstance(d, TypeDecl) and not d.is_struct:
            d = TypeDecl(d.name, InterfaceType(tuple(
                MethodSpec(s.name, sig(s.sig)) if s.name == m else s for s in d.literal.specs)))
        decls.append(d)
    return Program(tuple(decls), p.main)


def _candidates(p: Program):
    for i in range(len(p.decls)):
        yield Program(p.decls[:i] + p.decls[i + 1:], p.main)
    lits = _min_literals(p)
    for e in _smaller_exprs(p.main, lits):
        yield Program(p.decls, e)
    for i, d in enumerate(p.decls):
        if isinstance(d, MethodDecl):
            for b in _smaller_exprs(d.body, lits):
                yield Program(p.decls[:i] + (replace(d, body=b),) + p.decls[i + 1:], p.main)
    for d in p.decls:
        if isinstance(d, TypeDecl) and d.is_struct:
            for i in range(len(d.literal.fields)):
                yield _drop_field(p, d.name, i)
    names = sorted({(d.name, len(d.sig.params)) for d in p.decls if isinstance(d, MethodDecl)})
    for m, n in names:
        for i in range(n):
            yield _drop_param(p, m, i)


def shrink(p: Program, failing) -> Program:
    """Greedily shrink `p` while keeping it acceptable and `failing`."""
    size = program_size(p)
    progress = True
    while progress:
        progress = False
        for c in _candidates(p):
            n = program_size(c)
            if n < size and accepted(c) and failing(c):
                p, size, progress = c, n, True
                break
    return p
