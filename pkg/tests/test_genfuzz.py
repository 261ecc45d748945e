import pytest
from hypothesis import given, settings

from fgdict import genfuzz
from fgdict.equiv import Verdict, diff_run
from fgdict.genfuzz import GenConfig, GenerationExhausted, accepted, derive_seed, gen_program, shrink
from fgdict.parser import parse_program, print_program
from fgdict.syntax import program_size
from strategies import programs
from test_equiv import SwappedSlots

ZERO = GenConfig(max_structs=0, max_ifaces=0, max_methods_per_iface=0, max_fields=0,
                 max_expr_depth=0, max_call_fanout=0, panic_bias=0.0, diverge_bias=0.0)


def test_degenerate_config():
    p = gen_program(ZERO)
    assert print_program(p) == "type S0 struct {}\nfunc main() {\n    _ = S0{}\n}\n"


def test_same_seed_same_program():
    cfg = GenConfig(seed=12345)
    assert print_program(gen_program(cfg)) == print_program(gen_program(cfg))
    assert gen_program(cfg) != gen_program(GenConfig(seed=12346))


def test_derived_seeds_are_stable():
    assert derive_seed(0, 0) == derive_seed(0, 0)
    assert len({derive_seed(7, i) for i in range(100)}) == 100


@pytest.mark.parametrize("bad", [dict(max_structs=-1), dict(panic_bias=1.5), dict(diverge_bias=-0.1)])
def test_config_validation(bad):
    with pytest.raises(ValueError):
        GenConfig(**bad)


def test_exhaustion_is_reported(monkeypatch):
    monkeypatch.setattr(genfuzz, "accepted", lambda p: False)
    with pytest.raises(GenerationExhausted):
        gen_program(GenConfig(seed=1))


def test_biases_take_effect():
    kinds = {b: [diff_run(gen_program(GenConfig(seed=derive_seed(b, i), panic_bias=b == 1,
                                                diverge_bias=0.0))).verdict
                 for i in range(30)] for b in (0, 1)}
    assert Verdict.AgreePanic not in kinds[0]
    assert all(v is Verdict.AgreePanic for v in kinds[1])
    loops = [diff_run(gen_program(GenConfig(seed=derive_seed(9, i), diverge_bias=1.0))).verdict
             for i in range(30)]
    assert all(v is Verdict.Inconclusive for v in loops)


@settings(max_examples=200, deadline=None)
@given(programs())
def test_generated_programs_are_accepted(p):
    assert accepted(p)
    assert parse_program(print_program(p)) == p


def _violates(p):
    return accepted(p) and diff_run(p, translator=SwappedSlots).verdict is Verdict.Violation


def test_shrinks_a_seeded_bug():
    for i in range(200):
        p = gen_program(GenConfig(seed=derive_seed(3, i)))
        if _violates(p) and program_size(p) > 15:
            break
    else:
        pytest.fail("the slot-swapping bug was never triggered")
    small = shrink(p, _violates)
    assert program_size(small) < program_size(p)
    assert _violates(small)
    assert parse_program(print_program(small)) == small


def test_shrink_fixed_point():
    p = gen_program(GenConfig(seed=5))
    assert shrink(p, lambda c: c == p) == p
