"""Command line front end: check, translate, run, diff and fuzz."""

from __future__ import annotations

import argparse
import json
import os
import sys
from collections import Counter
from pathlib import Path

from . import outcome
from .equiv import DEFAULT_FG_BUDGET, DEFAULT_TL_BUDGET, Budgets, Verdict, diff_with_retry
from .genfuzz import GenConfig, GenerationExhausted, derive_seed, gen_program, shrink
from .interp import fg_run
from .parser import ParseError, parse_program, print_expr, print_program
from .statics import WellFormednessError, build_table, check_conditions, param_name_warnings
from .tl import FreeTermVariable, UnboundMethodVar, tl_run
from .tl_text import TLParseError, parse_tl_program, print_tl_expr, print_tl_program, print_tl_value
from .translate import TranslationError, translate_program_typed

OK, FAILED, USAGE = 0, 1, 2


class _InputError(Exception):
    """The input program is malformed; reported with exit status 1."""


def _load(path: str):
    try:
        src = Path(path).read_text()
    except OSError as exc:
        raise SystemExit(_usage_error(f"cannot read {path}: {exc.strerror}"))
    try:
        return parse_program(src)
    except ParseError as exc:
        raise _InputError(f"{path}:{exc}") from None


def _usage_error(msg: str) -> int:
    print(f"fgdict: {msg}", file=sys.stderr)
    return USAGE


def _translate(p):
    try:
        return translate_program_typed(p)
    except WellFormednessError as exc:
        raise _InputError("\n".join(str(v) for v in exc.violations)) from None
    except TranslationError as exc:
        raise _InputError(f"translation error: {exc}") from None


def cmd_check(args) -> int:
    p = _load(args.file)
    try:
        violations = check_conditions(build_table(p), strict=args.strict)
    except WellFormednessError as exc:
        violations = exc.violations
    if violations:
        for v in violations:
            print(f"{v.kind.condition} {v}")
        return FAILED
    for w in param_name_warnings(build_table(p)):
        print(f"warning: {w}", file=sys.stderr)
    t, _ = _translate(p)
    print(f"ok: main has type {t}")
    return OK


def cmd_translate(args) -> int:
    _, prog = _translate(_load(args.file))
    text = print_tl_program(prog)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return OK


def _describe(o: outcome.Outcome, show) -> str:
    if isinstance(o, outcome.Value):
        return f"Value {show(o.value)} after {o.steps} steps"
    if isinstance(o, outcome.Panic):
        return f"Panic after {o.steps} steps at {show(o.witness)}"
    return f"BudgetExhausted after {o.steps} steps"


def _load_tl(path: str):
    try:
        return parse_tl_program(Path(path).read_text())
    except OSError as exc:
        raise SystemExit(_usage_error(f"cannot read {path}: {exc.strerror}"))
    except TLParseError as exc:
        raise _InputError(f"{path}: {exc}") from None


def cmd_run(args) -> int:
    standalone_tl = args.file.endswith(".tl")
    if standalone_tl and args.lang != "tl":
        return _usage_error(".tl files can only be run with --lang tl")
    p = None if standalone_tl else _load(args.file)
    trace = None
    if args.trace:
        show_step = print_expr if args.lang == "fg" else print_tl_expr
        trace = lambda n, e: print(f"step {n}: {show_step(e)}")
    if args.lang == "fg":
        _translate(p)  # reject ill-formed input before running it
        o = fg_run(build_table(p), p.main, args.max_steps, on_step=trace)
        print(_describe(o, print_expr))
    else:
        prog = _load_tl(args.file) if standalone_tl else _translate(p)[1]
        try:
            o = tl_run(prog, args.max_steps, on_step=trace)
        except (UnboundMethodVar, FreeTermVariable) as exc:
            raise _InputError(str(exc)) from None
        print(_describe(o, lambda v: print_tl_value(v) if isinstance(o, outcome.Value)
                        else print_tl_expr(v)))
    return OK


def _budgets(args) -> Budgets:
    try:
        return Budgets(args.max_steps_fg, args.max_steps_tl)
    except ValueError as exc:
        raise SystemExit(_usage_error(str(exc)))


def cmd_diff(args) -> int:
    p = _load(args.file)
    _translate(p)
    v = diff_with_retry(p, _budgets(args))
    if args.json:
        print(json.dumps(v.to_json(args.file)))
    else:
        print(v.summary())
    return FAILED if v.verdict is Verdict.Violation else OK


def cmd_fuzz(args) -> int:
    budgets = _budgets(args)
    base = dict(
        max_structs=args.max_structs, max_ifaces=args.max_ifaces,
        max_methods_per_iface=args.max_methods_per_iface, max_fields=args.max_fields,
        max_expr_depth=args.max_expr_depth, max_call_fanout=args.max_call_fanout,
        panic_bias=args.panic_bias, diverge_bias=args.diverge_bias,
    )
    try:
        GenConfig(**base)
    except ValueError as exc:
        return _usage_error(str(exc))
    tally = Counter()
    for i in range(args.count):
        seed = derive_seed(args.seed, i)
        try:
            p = gen_program(GenConfig(**base, seed=seed))
        except GenerationExhausted as exc:
            print(f"seed {seed}: {exc}", file=sys.stderr)
            tally["GenerationExhausted"] += 1
            continue
        v = diff_with_retry(p, budgets)
        tally[v.verdict.value] += 1
        label = f"seed:{seed}"
        if args.json:
            print(json.dumps(v.to_json(label)), flush=True)
        else:
            print(f"{label} {v.summary()}", flush=True)
        if v.verdict is Verdict.Violation and args.save_failing:
            kind = v.violation
            small = shrink(p, lambda c: diff_with_retry(c, budgets).violation is kind)
            out = Path(args.save_failing)
            out.mkdir(parents=True, exist_ok=True)
            (out / f"seed-{seed}.fg").write_text(
                f"// {v.kind}: {v.detail}\n" + print_program(small))
    summary = " ".join(f"{k}={n}" for k, n in sorted(tally.items()))
    print(f"total={args.count} {summary}", file=sys.stderr if args.json else sys.stdout)
    return FAILED if tally[Verdict.Violation.value] or tally["GenerationExhausted"] else OK


def _default_seed() -> int:
    env = os.environ.get("FGDICT_SEED")
    if env is None:
        return 0
    try:
        return int(env, 0)
    except ValueError:
        raise SystemExit(_usage_error(f"FGDICT_SEED is not an integer: {env!r}"))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fgdict",
        description="Featherweight Go interpreter, dictionary-passing translator and "
                    "differential tester.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="check well-formedness and translatability")
    p.add_argument("file")
    p.add_argument("--strict", action="store_true",
                   help="also reject struct cycles through interface signatures")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("translate", help="print the translated target program")
    p.add_argument("file")
    p.add_argument("-o", "--output", help="write to this file instead of stdout")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("run", help="evaluate a program in FG or, translated, in TL")
    p.add_argument("file", help="an FG program, or a TL program ending in .tl")
    p.add_argument("--lang", choices=("fg", "tl"), default="fg")
    p.add_argument("--max-steps", type=int, default=None)
    p.add_argument("--trace", action="store_true", help="print every intermediate term")
    p.set_defaults(func=cmd_run)

    def budget_flags(p):
        p.add_argument("--max-steps-fg", type=int, default=DEFAULT_FG_BUDGET)
        p.add_argument("--max-steps-tl", type=int, default=DEFAULT_TL_BUDGET)
        p.add_argument("--json", action="store_true", help="one JSON record per program")

    p = sub.add_parser("diff", help="run FG and TL side by side and compare")
    p.add_argument("file")
    budget_flags(p)
    p.set_defaults(func=cmd_diff)

    d = GenConfig()
    p = sub.add_parser("fuzz", help="differentially test generated programs")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=lambda s: int(s, 0), default=None,
                   help="base seed (default: $FGDICT_SEED or 0)")
    p.add_argument("--save-failing", metavar="DIR",
                   help="write shrunk failing programs to DIR")
    for name in ("max_structs", "max_ifaces", "max_methods_per_iface", "max_fields",
                 "max_expr_depth", "max_call_fanout"):
        p.add_argument("--" + name.replace("_", "-"), type=int, default=getattr(d, name))
    for name in ("panic_bias", "diverge_bias"):
        p.add_argument("--" + name.replace("_", "-"), type=float, default=getattr(d, name))
    budget_flags(p)
    p.set_defaults(func=cmd_fuzz)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        if args.command == "run":
            if args.max_steps is None:
                args.max_steps = DEFAULT_FG_BUDGET if args.lang == "fg" else DEFAULT_TL_BUDGET
            if args.max_steps < 0:
                return _usage_error("--max-steps must be non-negative")
        if args.command == "fuzz":
            if args.seed is None:
                args.seed = _default_seed()
            if args.count < 0:
                return _usage_error("--count must be non-negative")
        return args.func(args)
    except _InputError as exc:
        print(exc, file=sys.stderr)
        return FAILED
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE
    except outcome.InternalStuck as exc:
        print(f"fgdict: internal error: {exc}", file=sys.stderr)
        return USAGE
