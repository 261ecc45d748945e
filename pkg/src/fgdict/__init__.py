"""Featherweight Go, its dictionary-passing translation, and a differential tester."""

from .equiv import Budgets, DiffVerdict, Verdict, ViolationKind, diff_run, value_corresponds
from .interp import fg_run, fg_step
from .parser import parse_program, print_program
from .statics import build_table, check_conditions, methods, subtype
from .tl import tl_run, tl_step
from .translate import RULES, translate_program

__all__ = [
    "Budgets", "DiffVerdict", "RULES", "Verdict", "ViolationKind", "build_table",
    "check_conditions", "diff_run", "fg_run", "fg_step", "methods", "parse_program",
    "print_program", "subtype", "tl_run", "tl_step", "translate_program", "value_corresponds",
]
