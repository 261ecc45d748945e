"""Results of single steps and of budgeted runs, shared by both calculi."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Union


@dataclass(frozen=True, slots=True)
class Stepped:
    expr: Any


@dataclass(frozen=True, slots=True)
class AtValue:
    value: Any


@dataclass(frozen=True, slots=True)
class Panicked:
    witness: Any


@dataclass(frozen=True, slots=True)
class Stuck:
    witness: Any


StepResult = Union[Stepped, AtValue, Panicked, Stuck]


@dataclass(frozen=True, slots=True)
class Value:
    value: Any
    steps: int
    kind = "Value"


@dataclass(frozen=True, slots=True)
class Panic:
    steps: int
    witness: Any
    kind = "Panic"


@dataclass(frozen=True, slots=True)
class BudgetExhausted:
    last: Any
    steps: int
    kind = "BudgetExhausted"


Outcome = Union[Value, Panic, BudgetExhausted]


class InternalStuck(RuntimeError):
    """Evaluation reached an irreducible non-value that is not a panic."""

    def __init__(self, witness, steps: int):
        self.witness = witness
        self.steps = steps
        super().__init__(f"stuck after {steps} steps at {witness!r}")


def run_loop(step, start, budget: int, detect_cycles: bool = True, on_step=None) -> Outcome:
    """Drive `step` until a value, a panic, or `budget` contractions.

    `step(e)` returns a StepResult.  Both calculi are deterministic, so once a
    state repeats the remainder of the run is periodic; with `detect_cycles`
    the loop jumps ahead by whole periods and replays only the remainder.
    Outcomes are identical to plain iteration.
    """
    if budget < 0:
        raise ValueError("budget must be non-negative")
    e = start
    steps = 0
    limit = budget
    snap, snap_at, power = e, 0, 1
    check = detect_cycles and on_step is None
    while True:
        r = step(e)
        if isinstance(r, AtValue):
            return Value(r.value, steps)
        if isinstance(r, Panicked):
            return Panic(steps, r.witness)
        if isinstance(r, Stuck):
            raise InternalStuck(r.witness, steps)
        if steps == limit:
            return BudgetExhausted(e, budget)
        e = r.expr
        steps += 1
        if on_step is not None:
            on_step(steps, e)
        if check:
            if e == snap:
                period = steps - snap_at
                remaining = (budget - steps) % period
                check = False
                limit = steps + remaining
            elif steps - snap_at == power:
                snap, snap_at = e, steps
                power *= 2
