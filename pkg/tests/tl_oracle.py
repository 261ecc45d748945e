"""Alpha-equivalence oracle for target terms."""

from fgdict.tl import App, Case, Con, Lam, MethodVar, Var
from fgdict.tl_text import parse_tl_expr


def nameless(e, ctx=()):
    """Locally nameless form: bound variables become (group depth, position)."""
    match e:
        case Var(x):
            for depth, group in enumerate(reversed(ctx)):
                if x in group:
                    return ("b", depth, len(group) - 1 - group[::-1].index(x))
            return ("f", x)
        case MethodVar(y):
            return ("m", y)
        case Con(k):
            return ("k", k)
        case App(f, a):
            return ("app", nameless(f, ctx), nameless(a, ctx))
        case Lam(x, b):
            return ("lam", nameless(b, ctx + ((x,),)))
        case Case(s, cls):
            return ("case", nameless(s, ctx), tuple(
                (c.con, len(c.vars), nameless(c.body, ctx + (c.vars,))) for c in cls))


def subst_ln(t, x, v):
    if t == ("f", x):
        return v
    if t[0] in ("app",):
        return ("app", subst_ln(t[1], x, v), subst_ln(t[2], x, v))
    if t[0] == "lam":
        return ("lam", subst_ln(t[1], x, v))
    if t[0] == "case":
        return ("case", subst_ln(t[1], x, v), tuple((k, n, subst_ln(b, x, v)) for k, n, b in t[2]))
    return t


def alpha_eq(a, b) -> bool:
    """Equality up to renaming of bound variables; `b` may be TL text."""
    if isinstance(b, str):
        b = parse_tl_expr(b)
    return nameless(a) == nameless(b)
