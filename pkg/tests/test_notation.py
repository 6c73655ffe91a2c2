import random

import pytest

from conftest import corpus_path
from synthcell.formulas import (
    And,
    Atom,
    Formula,
    Imp,
    Neg,
    Or,
)
from synthcell.notation import (
    ParseError,
    ProofTerm,
    parse_axiom_file,
    parse_axiom_text,
    parse_formula,
    parse_proof_term,
    print_formula,
    print_proof_term,
)
from synthcell.signature import Signature
from synthcell.terms import App, Symbol, Var


def test_precedence_relations_bind_tighter_than_connectives():
    sig = Signature()
    sig.declare_fun("val", 2)
    sig.declare_fun("trg", 2)
    f = parse_formula("val(trg(c,v),t) = 1 <-> val(c,t) < v", sig)
    # both relation atoms are intact operands of the equivalence
    assert type(f).__name__ == "_Equiv"
    assert isinstance(f.left, Atom) and isinstance(f.right, Atom)


def test_precedence_and_tighter_than_or():
    sig = Signature()
    f = parse_formula("aa = 1 & bb = 1 ! cc = 1", sig)
    assert isinstance(f, Or) and isinstance(f.left, And)


def test_precedence_neg_tighter_than_imp():
    sig = Signature()
    f = parse_formula("~aa = 1 -> bb = 1", sig)
    assert isinstance(f, Imp) and isinstance(f.left, Neg)


def test_imp_right_associative_and_reverse_arrow():
    sig = Signature()
    f = parse_formula("aa = 1 -> bb = 1 -> cc = 1", sig)
    assert isinstance(f.right, Imp)
    g = parse_formula("aa = 1 <- bb = 1", sig)
    assert isinstance(g, Imp) and print_formula(g.left) == "bb = 1"


def test_negative_literals_and_binary_minus():
    sig = Signature()
    f = parse_formula("aa * -1 < bb * -1", sig)
    assert print_formula(f) == "aa*-1 < bb*-1"
    g = parse_formula("270-90 = 180", sig)
    assert print_formula(g) == "270-90 = 180"


def test_syntax_error_position():
    with pytest.raises(ParseError):
        parse_formula("aa = ", Signature())


def test_roundtrip_full_corpus():
    axf = parse_axiom_file(corpus_path("cell.ax"))
    assert len(axf.axioms) == 85
    for name, side, raw in axf.axioms:
        again = parse_formula(print_formula(raw), axf.sig)
        assert again == raw, name


def _random_ast(rng: random.Random, sig: Signature, depth: int = 4) -> Formula:
    if depth == 0 or rng.random() < 0.3:
        rel = sig.rels["="] if rng.random() < 0.6 else sig.rels["=<"]
        terms = [Var("x"), Var("y"), App(sig.numeral("1")), App(sig.funcs["k"]),
                 App(sig.funcs["h"], (Var("x"),))]
        return Atom(rel, (rng.choice(terms), rng.choice(terms)))
    kind = rng.randrange(4)
    if kind == 0:
        return Neg(_random_ast(rng, sig, depth - 1))
    cls = [And, Or, Imp][kind - 1]
    return cls(_random_ast(rng, sig, depth - 1), _random_ast(rng, sig, depth - 1))


def test_roundtrip_random_asts():
    sig = Signature()
    sig.declare_fun("k", 0)
    sig.declare_fun("h", 1)
    rng = random.Random(987)
    for _ in range(1000):
        f = _random_ast(rng, sig)
        assert parse_formula(print_formula(f), sig) == f


def test_axiom_file_duplicate_names_detected():
    text = "axiom a1 assertion: x = 1.\naxiom a1 assertion: y = 1.\n"
    axf = parse_axiom_text(text)
    from synthcell.database import Session, SessionError

    s = Session(axf.sig)
    with pytest.raises(SessionError):
        s.load_axiom_file(axf)


def test_axiom_file_error_carries_line_number():
    with pytest.raises(ParseError) as e:
        parse_axiom_text("axiom a1 assertion: x = .\n")
    assert "line 1" in str(e.value)


def test_empty_axiom_file():
    assert parse_axiom_text("# nothing here\n").axioms == []


def test_parse_proof_term_nested_with_sharing():
    text = ("rs(rp(rs(rs(sp(lab(l1,rs(rs(rs(user(u20),user(r11)),user(Vor)),"
            "user(u47b)))),user(u30)),user(u73)),user(u30)),sp(ref(l1)))")
    pt = parse_proof_term(text)
    assert pt.op == "rs"
    labs = []

    def walk(n, depth):
        labs.append((n.op, depth))
        for a in n.args:
            walk(a, depth + 1)

    walk(pt, 0)
    assert ("lab", 5) in labs
    assert ("ref", 2) in labs
    assert max(d for _, d in labs) >= 6


def test_parse_proof_term_leaf_and_annotations():
    pt = parse_proof_term("user(u47)")
    assert pt == ProofTerm("user", name="u47")
    pt = parse_proof_term("rs@[h:1.2, o:2](user(a), user(b))")
    assert pt.annotations() == {"h": ["1.2"], "o": ["2"]}
    again = parse_proof_term(print_proof_term(pt))
    assert again == pt


def test_dangling_ref_rejected():
    from synthcell.database import Session, SessionError

    pt = parse_proof_term("sp(ref(l9))")
    with pytest.raises(SessionError):
        Session().replay(pt)


def test_rm_arity_dispatch():
    assert parse_proof_term("rm(user(a))").op == "rm1"
    assert parse_proof_term("rm(user(a), user(b))").op == "rm2"
