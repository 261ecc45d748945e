"""Concrete syntax for FG: lexer, recursive-descent parser, and printer.

Grammar (newline-insensitive, `//` comments)::

    program := ["package" "main"] decl* "func" "main" "(" ")" "{" "_" "=" expr "}"
    decl    := "type" id "struct" "{" (id id)* "}"
             | "type" id "interface" "{" (id "(" params ")" id)* "}"
             | "func" "(" id id ")" id "(" params ")" id "{" "return" expr "}"
    params  := [id id ("," id id)*]
    expr    := primary postfix*
    primary := id | id "{" [expr ("," expr)*] "}"
    postfix := "." id "(" args ")" | "." id | "." "(" id ")"
"""

from __future__ import annotations

import re
from dataclasses import dataclass

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
)

KEYWORDS = frozenset({"type", "struct", "interface", "func", "return", "package"})

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<comment>//[^\n]*)|(?P<id>[A-Za-z][A-Za-z0-9_]*)"
    r"|(?P<punct>[{}().,=_])"
)


@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # "id", "kw", "punct", "eof"
    text: str
    line: int
    col: int

    def describe(self) -> str:
        return "end of input" if self.kind == "eof" else repr(self.text)


class ParseError(Exception):
    def __init__(self, line: int, col: int, expected: list[str], found: str):
        self.line = line
        self.col = col
        self.expected = expected
        self.found = found
        super().__init__(f"{line}:{col}: expected {' or '.join(expected)}, found {found}")


def tokenize(source: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(line, col, ["a token"], repr(source[pos]))
        kind = m.lastgroup
        text = m.group()
        if kind == "id":
            tokens.append(Token("kw" if text in KEYWORDS else "id", text, line, col))
        elif kind == "punct":
            tokens.append(Token("punct", text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.toks = tokenize(source)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, *expected: str):
        t = self.tok
        raise ParseError(t.line, t.col, list(expected), t.describe())

    def at(self, text: str) -> bool:
        return self.tok.kind in ("punct", "kw") and self.tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(repr(text))
        t = self.tok
        self.i += 1
        return t

    def ident(self) -> str:
        if self.tok.kind != "id":
            self.error("identifier")
        t = self.tok
        self.i += 1
        return t.text

    def program(self) -> Program:
        if self.at("package"):
            self.i += 1
            if self.tok.kind != "id" or self.tok.text != "main":
                self.error("'main'")
            self.i += 1
        decls = []
        while True:
            if self.at("type"):
                decls.append(self.type_decl())
            elif self.at("func"):
                if self.peek().kind == "id" and self.peek().text == "main":
                    break
                decls.append(self.method_decl())
            else:
                self.error("'type'", "'func'")
        self.expect("func")
        self.i += 1  # main
        self.expect("(")
        self.expect(")")
        self.expect("{")
        self.expect("_")
        self.expect("=")
        main = self.expr()
        self.expect("}")
        if self.tok.kind != "eof":
            self.error("end of input")
        return Program(tuple(decls), main)

    def type_decl(self) -> TypeDecl:
        self.expect("type")
        name = self.ident()
        if self.at("struct"):
            self.i += 1
            self.expect("{")
            fields = []
            while not self.at("}"):
                fname = self.ident()
                fields.append(Field(fname, self.ident()))
            self.i += 1
            return TypeDecl(name, StructType(tuple(fields)))
        if self.at("interface"):
            self.i += 1
            self.expect("{")
            specs = []
            while not self.at("}"):
                mname = self.ident()
                specs.append(MethodSpec(mname, self.signature()))
            self.i += 1
            return TypeDecl(name, InterfaceType(tuple(specs)))
        self.error("'struct'", "'interface'")

    def signature(self) -> Signature:
        self.expect("(")
        params = []
        if not self.at(")"):
            while True:
                pname = self.ident()
                params.append(Param(pname, self.ident()))
                if not self.at(","):
                    break
                self.i += 1
        self.expect(")")
        return Signature(tuple(params), self.ident())

    def method_decl(self) -> MethodDecl:
        self.expect("func")
        self.expect("(")
        rname = self.ident()
        recv = Param(rname, self.ident())
        self.expect(")")
        name = self.ident()
        sig = self.signature()
        self.expect("{")
        self.expect("return")
        body = self.expr()
        self.expect("}")
        return MethodDecl(recv, name, sig, body)

    def args(self, close: str) -> tuple[Expr, ...]:
        out = []
        if not self.at(close):
            while True:
                out.append(self.expr())
                if not self.at(","):
                    break
                self.i += 1
        self.expect(close)
        return tuple(out)

    def expr(self) -> Expr:
        if self.tok.kind != "id":
            self.error("expression")
        name = self.ident()
        if self.at("{"):
            self.i += 1
            e: Expr = StructLit(name, self.args("}"))
        else:
            e = Var(name)
        while self.at("."):
            self.i += 1
            if self.at("("):
                self.i += 1
                e = Assert(e, self.ident())
                self.expect(")")
                continue
            member = self.ident()
            if self.at("("):
                self.i += 1
                e = Call(e, member, self.args(")"))
            else:
                e = Select(e, member)
        return e


def parse_program(source: str) -> Program:
    return _Parser(source).program()


def parse_expr(source: str) -> Expr:
    p = _Parser(source)
    e = p.expr()
    if p.tok.kind != "eof":
        p.error("end of input")
    return e


def print_expr(e: Expr) -> str:
    match e:
        case Var(name):
            return name
        case StructLit(t, args):
            return f"{t}{{{', '.join(print_expr(a) for a in args)}}}"
        case Call(recv, m, args):
            return f"{print_expr(recv)}.{m}({', '.join(print_expr(a) for a in args)})"
        case Select(recv, f):
            return f"{print_expr(recv)}.{f}"
        case Assert(recv, t):
            return f"{print_expr(recv)}.({t})"
    raise TypeError(f"not an FG expression: {e!r}")


def _print_sig(sig: Signature) -> str:
    params = ", ".join(f"{p.name} {p.type}" for p in sig.params)
    return f"({params}) {sig.result}"


def print_decl(d: TypeDecl | MethodDecl) -> str:
    if isinstance(d, MethodDecl):
        return (
            f"func ({d.recv.name} {d.recv.type}) {d.name}{_print_sig(d.sig)} {{\n"
            f"    return {print_expr(d.body)}\n}}"
        )
    lit = d.literal
    if isinstance(lit, StructType):
        if not lit.fields:
            return f"type {d.name} struct {{}}"
        body = "".join(f"    {f.name} {f.type}\n" for f in lit.fields)
        return f"type {d.name} struct {{\n{body}}}"
    if not lit.specs:
        return f"type {d.name} interface {{}}"
    body = "".join(f"    {s.name}{_print_sig(s.sig)}\n" for s in lit.specs)
    return f"type {d.name} interface {{\n{body}}}"


def print_program(p: Program) -> str:
    parts = [print_decl(d) for d in p.decls]
    parts.append(f"func main() {{\n    _ = {print_expr(p.main)}\n}}")
    return "\n".join(parts) + "\n"
