"""Text format for target programs.

::

    prog   := "let" [bind (";" bind)*] "in" expr
    bind   := MVAR "=" expr
    expr   := "\\" VAR "." expr
            | "case" expr "of" "{" [clause (";" clause)*] "}"
            | atom atom*                      -- left-nested application
    clause := CON "(" [VAR ("," VAR)*] ")" "->" expr
            | "(" [VAR ("," VAR)* [","]] ")" "->" expr   -- tuple pattern
    atom   := VAR | MVAR | CON "(" [expr ("," expr)*] ")"
            | "(" ")" | "(" expr ")" | "(" expr "," [expr ("," expr)*] ")"

Names containing `$` are method variables, names starting with `K_` or of
the form `Tuple<n>` are constructors, everything else is a term variable.
A one-element tuple is written `(e,)`.
"""

from __future__ import annotations

import re

from .tl import (
    App,
    Case,
    Clause,
    Con,
    ConVal,
    Lam,
    LamVal,
    MethodName,
    MethodVar,
    TLExpr,
    TLProgram,
    TLValue,
    Var,
    apply,
    spine,
    tuple_arity,
    tuple_con,
)

TL_KEYWORDS = frozenset({"let", "in", "case", "of"})

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)|(?P<name>[A-Za-z_%][A-Za-z0-9_%$]*)|(?P<arrow>->)|(?P<punct>[\\.(),;{}=])"
)


def name_kind(name: str) -> str:
    if "$" in name:
        return "mvar"
    if name.startswith("K_") or tuple_arity(name) is not None:
        return "con"
    if name in TL_KEYWORDS:
        return "kw"
    return "var"


class TLParseError(Exception):
    def __init__(self, pos: int, expected: str, found: str):
        self.pos = pos
        super().__init__(f"offset {pos}: expected {expected}, found {found}")


def _tokenize(src: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise TLParseError(pos, "a token", repr(src[pos]))
        kind, text = m.lastgroup, m.group()
        if kind == "name":
            out.append((name_kind(text), text, pos))
        elif kind != "ws":
            out.append(("punct", text, pos))
        pos = m.end()
    out.append(("eof", "", pos))
    return out


class _Parser:
    def __init__(self, src: str):
        self.toks = _tokenize(src)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def fail(self, expected: str):
        kind, text, pos = self.tok
        raise TLParseError(pos, expected, "end of input" if kind == "eof" else repr(text))

    def at(self, text: str) -> bool:
        kind, t, _ = self.tok
        return kind in ("punct", "kw") and t == text

    def expect(self, text: str):
        if not self.at(text):
            self.fail(repr(text))
        self.i += 1

    def take(self, kind: str) -> str:
        if self.tok[0] != kind:
            self.fail(kind)
        text = self.tok[1]
        self.i += 1
        return text

    def program(self) -> TLProgram:
        self.expect("let")
        binds = []
        if not self.at("in"):
            while True:
                name = self.take("mvar")
                self.expect("=")
                body = self.expr()
                if not isinstance(body, Lam):
                    self.fail("a lambda as method body")
                binds.append((name, body))
                if not self.at(";"):
                    break
                self.i += 1
        self.expect("in")
        main = self.expr()
        self.end()
        return TLProgram(tuple(binds), main)

    def end(self):
        if self.tok[0] != "eof":
            self.fail("end of input")

    def expr(self) -> TLExpr:
        if self.at("\\"):
            self.i += 1
            x = self.take("var")
            self.expect(".")
            return Lam(x, self.expr())
        if self.at("case"):
            self.i += 1
            scrut = self.expr()
            self.expect("of")
            self.expect("{")
            clauses = []
            if not self.at("}"):
                while True:
                    clauses.append(self.clause())
                    if not self.at(";"):
                        break
                    self.i += 1
            self.expect("}")
            return Case(scrut, tuple(clauses))
        e = self.atom()
        while self.tok[0] in ("var", "mvar", "con") or self.at("("):
            e = App(e, self.atom())
        return e

    def clause(self) -> Clause:
        if self.tok[0] == "con":
            con = self.take("con")
            self.expect("(")
            xs = self.var_list()
            self.expect(")")
        else:
            self.expect("(")
            xs = self.var_list(allow_trailing=True)
            self.expect(")")
            con = tuple_con(len(xs))
        self.expect("->")
        return Clause(con, tuple(xs), self.expr())

    def var_list(self, allow_trailing=False) -> list[str]:
        xs = []
        if self.tok[0] == "var":
            xs.append(self.take("var"))
            while self.at(","):
                self.i += 1
                if allow_trailing and self.at(")"):
                    break
                xs.append(self.take("var"))
        return xs

    def atom(self) -> TLExpr:
        kind, text, _ = self.tok
        if kind == "var":
            self.i += 1
            return Var(text)
        if kind == "mvar":
            self.i += 1
            return MethodVar(text)
        if kind == "con":
            self.i += 1
            self.expect("(")
            args = self.expr_list()
            self.expect(")")
            return apply(Con(text), *args)
        if self.at("("):
            self.i += 1
            if self.at(")"):
                self.i += 1
                return Con(tuple_con(0))
            first = self.expr()
            if self.at(")"):
                self.i += 1
                return first
            items = [first]
            while self.at(","):
                self.i += 1
                if self.at(")"):
                    break
                items.append(self.expr())
            self.expect(")")
            return apply(Con(tuple_con(len(items))), *items)
        self.fail("expression")

    def expr_list(self) -> list[TLExpr]:
        items = []
        if not self.at(")"):
            items.append(self.expr())
            while self.at(","):
                self.i += 1
                items.append(self.expr())
        return items


def parse_tl_program(src: str) -> TLProgram:
    return _Parser(src).program()


def parse_tl_expr(src: str) -> TLExpr:
    p = _Parser(src)
    e = p.expr()
    p.end()
    return e


def _tuple_text(items: list[str]) -> str:
    if len(items) == 1:
        return f"({items[0]},)"
    return f"({', '.join(items)})"


def print_tl_expr(e: TLExpr, atomic: bool = False) -> str:
    t = type(e)
    if t is Var or t is MethodVar:
        return e.name
    if t is Lam:
        s = f"\\{e.param}. {print_tl_expr(e.body)}"
        return f"({s})" if atomic else s
    if t is Case:
        cls = "; ".join(_print_clause(c) for c in e.clauses)
        s = f"case {print_tl_expr(e.scrut)} of {{ {cls} }}" if cls else \
            f"case {print_tl_expr(e.scrut)} of {{}}"
        return f"({s})" if atomic else s
    if t is not App and t is not Con:
        raise TypeError(f"not a TL expression: {e!r}")
    head, args = spine(e)
    if type(head) is Con:
        items = [print_tl_expr(a) for a in args]
        if tuple_arity(head.name) == len(args):
            return _tuple_text(items)
        return f"{head.name}({', '.join(items)})"
    s = " ".join([print_tl_expr(head, True)] + [print_tl_expr(a, True) for a in args])
    return f"({s})" if atomic else s


def _print_clause(c: Clause) -> str:
    if tuple_arity(c.con) == len(c.vars):
        pat = _tuple_text(list(c.vars))
    else:
        pat = f"{c.con}({', '.join(c.vars)})"
    return f"{pat} -> {print_tl_expr(c.body)}"


def print_tl_program(p: TLProgram) -> str:
    if not p.bindings:
        return f"let\nin\n  {print_tl_expr(p.main)}\n"
    binds = ";\n".join(f"  {y} = {print_tl_expr(body)}" for y, body in p.bindings)
    return f"let\n{binds}\nin\n  {print_tl_expr(p.main)}\n"


def print_tl_value(v: TLValue) -> str:
    match v:
        case ConVal(k, args):
            items = [print_tl_value(a) for a in args]
            if tuple_arity(k) == len(args):
                return _tuple_text(items)
            return f"{k}({', '.join(items)})"
        case LamVal(x, body):
            return print_tl_expr(Lam(x, body))
        case MethodName(y):
            return y
    raise TypeError(f"not a TL value: {v!r}")
