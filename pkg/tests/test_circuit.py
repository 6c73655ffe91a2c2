import random
from fractions import Fraction as F

import pytest

from conftest import corpus_path
from synthcell.circuit import (
    Ampl,
    AndG,
    CircuitError,
    Dff,
    Input,
    Mff,
    Not,
    OrG,
    Trace,
    Trigger,
    canonical_slots,
    evaluate,
    from_output_term,
    inputs_of,
    oracle_evaluate,
    parse_trace,
    print_trace,
)
from synthcell.notation import parse_term, print_term
from synthcell.oracles import random_gate, random_trace
from synthcell.signature import Signature


def bits(pattern: str) -> list[F]:
    return [F(1) if ch == "-" else F(0) for ch in pattern]


def test_latch_follows_its_axiom_on_the_diagram_trace():
    # set channel high during steps 3..14, reset pulse at 11..12; the latch
    # holds from the set edge through the step of the reset edge
    ca = bits("___------------___")
    cb = bits("___________--_____")
    tr = Trace(18, {"ca": ca, "cb": cb})
    g = Dff(Input("ca"), Input("cb"))
    ev = evaluate(g, tr)
    assert ev == oracle_evaluate(g, tr)
    assert [t for t, v in enumerate(ev) if v == F(1)] == list(range(3, 12))


def test_trigger_definition():
    tr = Trace(1, {"c": [F(3)]})
    assert evaluate(Trigger(Input("c"), F(5)), tr) == [F(1)]
    assert evaluate(Trigger(Input("c"), F(3)), tr) == [F(0)]


def test_inverter_on_constant_one():
    tr = Trace(4, {"c": [F(1)] * 4})
    assert evaluate(Not(Input("c")), tr) == [F(0)] * 4


def test_non_unit_values_count_as_false_through_boolean_gates():
    tr = Trace(2, {"c": [F(2), F(0)]})
    assert evaluate(Not(Input("c")), tr) == [F(1), F(1)]
    assert evaluate(AndG(Input("c"), Input("c")), tr) == [F(0), F(0)]


def test_delay_identities():
    tr = Trace(5, {"c": [F(0), F(1), F(2), F(1), F(0)]})
    assert evaluate(Mff(Input("c"), 0), tr) == tr.channels["c"]
    assert evaluate(Mff(Input("c"), 2), tr) == [F(0), F(0), F(0), F(1), F(2)]
    # the literal reading of the delay axiom holds the initial sample
    lit = oracle_evaluate(Mff(Input("c"), 2), tr, literal_delay=True)
    assert lit == [F(0), F(0), F(2), F(2), F(2)]


def test_simultaneous_set_and_reset_edge():
    # the set edge wins at the edge step; the reset takes effect after it
    ca = bits("__-__")
    cb = bits("__-__")
    tr = Trace(5, {"ca": ca, "cb": cb})
    g = Dff(Input("ca"), Input("cb"))
    ev = evaluate(g, tr)
    assert ev == oracle_evaluate(g, tr)
    assert ev == [F(0), F(0), F(1), F(0), F(0)]


def test_dff_event_locality():
    rng = random.Random(11)
    for _ in range(50):
        tr = random_trace(rng, ["a", "b"], 24)
        g = Dff(Input("a"), Input("b"))
        out = evaluate(g, tr)
        ups_a = {t for t in range(24) if _up(tr.channels["a"], t)}
        ups_b = {t for t in range(24) if _up(tr.channels["b"], t)}
        for t in range(1, 24):
            if out[t] != out[t - 1]:
                assert t in ups_a or (t - 1) in ups_b


def _up(vals, t):
    return vals[t] == F(1) and (t == 0 or vals[t - 1] != F(1))


def test_double_negation_on_boolean_channels():
    rng = random.Random(3)
    tr = Trace(16, {"c": [F(rng.randint(0, 1)) for _ in range(16)]})
    assert evaluate(Not(Not(Input("c"))), tr) == tr.channels["c"]


def test_eval_matches_oracle_on_random_dags():
    rng = random.Random(20260810)
    from synthcell.oracles import random_gate_cases

    assert random_gate_cases(rng, 300) == 0


def test_from_output_term_module1_slot():
    sig = Signature()
    text = "".join(l.split("#")[0] for l in open(corpus_path("robot_circuit.term")))
    term = parse_term(text, sig, lenient=True)
    geometry = {"dxy(d4,d5)": F(4, 5), "wxy(d4,d5)": F(270)}

    def geo(node):
        return geometry[print_term(node)]

    slot2 = from_output_term(term.args[1], geometry=geo)
    assert slot2 == OrG(
        Input("cfe1"),
        AndG(
            Dff(
                Input("ci"),
                Not(OrG(Trigger(Ampl(Input("s22"), F(-1)), F(-4, 5)),
                        Trigger(Input("s10"), F(270)))),
            ),
            Trigger(Ampl(Input("s22"), F(-1)), F(-4, 5)),
        ),
    )
    assert inputs_of(slot2) == {"cfe1", "ci", "s22", "s10"}
    # single channel slots pass through; unknown structure is rejected
    assert from_output_term(term.args[0], geometry=geo) == Input("cfa1")
    with pytest.raises(CircuitError):
        from_output_term(parse_term("mystery(a,b)", sig, lenient=True))


def test_canonical_slot_naming():
    sig = Signature()
    term = parse_term("r(trg(x9,dxy(d4,d3)),x2,x3,x4,x5,x6,x7,x8,x9,x10,x11)", sig, lenient=True)
    canon = canonical_slots(term, 8, 3)
    assert print_term(canon.args[0]) == "trg(s1,dxy(d4,d3))"


def test_trace_file_roundtrip():
    tr = Trace(3, {"a": [F(0), F(1), F(1, 2)], "b": [F(2), F(0), F(-1)]})
    again = parse_trace(print_trace(tr))
    assert again.length == 3 and again.channels == tr.channels
    with pytest.raises(CircuitError):
        parse_trace("a b\n1\n")


def test_missing_channel_reported():
    tr = Trace(2, {"a": [F(0), F(1)]})
    with pytest.raises(CircuitError):
        evaluate(Input("zz"), tr)
