"""Randomized cross-checking suites.

Gate semantics: random gate DAGs against random traces, incremental
evaluator vs the literal quantifier evaluator.

Calculus soundness: random rule applications over ground formulas in a tiny
universe (two constants, one unary function, two unary predicates, equality
and a linear order over a two-element domain); every derived entry must be
entailed by the database state, checked over all interpretations.
"""
from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Optional

from . import rules
from .circuit import (
    Ampl,
    AndG,
    Dff,
    Gate,
    Input,
    Mff,
    Not,
    OrG,
    Trace,
    Trigger,
    evaluate,
    oracle_evaluate,
)
from .formulas import (
    And,
    Atom,
    Formula,
    Imp,
    Neg,
    Or,
    Truth,
    formula_positions,
    polarity_at,
    positions,
    unify,
)
from .rules import ASSERTION, GOAL, premise_polarity
from .signature import Signature
from .simplify import simplify
from .terms import App, Symbol, Term, Var


def random_gate(rng: random.Random, channels: list[str], depth: int = 5) -> Gate:
    if depth == 0 or rng.random() < 0.25:
        return Input(rng.choice(channels))
    kind = rng.choice(["trg", "ampl", "neg", "and", "or", "dff", "mff"])
    a = random_gate(rng, channels, depth - 1)
    if kind == "trg":
        return Trigger(a, Fraction(rng.randint(-4, 8), rng.choice([1, 2])))
    if kind == "ampl":
        return Ampl(a, Fraction(rng.randint(-3, 3)))
    if kind == "neg":
        return Not(a)
    if kind == "mff":
        return Mff(a, rng.randint(0, 4))
    b = random_gate(rng, channels, depth - 1)
    if kind == "and":
        return AndG(a, b)
    if kind == "or":
        return OrG(a, b)
    return Dff(a, b)


def random_trace(rng: random.Random, channels: list[str], length: int = 32) -> Trace:
    rows = {}
    for c in channels:
        vals = []
        cur = Fraction(rng.randint(0, 1))
        for _ in range(length):
            if rng.random() < 0.3:
                cur = rng.choice(
                    [Fraction(0), Fraction(1), Fraction(1), Fraction(rng.randint(-2, 5)),
                     Fraction(rng.randint(1, 7), 2)]
                )
            vals.append(cur)
        rows[c] = vals
    return Trace(length, rows)


def random_gate_cases(rng: random.Random, n: int, length: int = 32) -> int:
    channels = ["a", "b", "c"]
    bad = 0
    for _ in range(n):
        g = random_gate(rng, channels)
        tr = random_trace(rng, channels, length)
        if evaluate(g, tr) != oracle_evaluate(g, tr):
            bad += 1
    return bad


# ---------------------------------------------------------------------------
# calculus soundness

_SIG = Signature()
_P = Symbol("p", 1, "bool")
_Q = Symbol("q", 1, "bool")
_EQ = _SIG.rels["="]
_LE = _SIG.rels["=<"]
_A = Symbol("a", 0)
_B = Symbol("b", 0)
_F = Symbol("f", 1)

_TERMS: list[Term] = [App(_A), App(_B), App(_F, (App(_A),)), App(_F, (App(_B),))]


def _interviews() -> list[dict]:
    out = []
    for av, bv in itertools.product((0, 1), repeat=2):
        for f0, f1 in itertools.product((0, 1), repeat=2):
            for pmask in range(4):
                for qmask in range(4):
                    out.append({"a": av, "b": bv, "f": (f0, f1), "p": pmask, "q": qmask})
    return out


_INTERPS = _interviews()


def _tval(t: Term, i: dict) -> int:
    if isinstance(t, App):
        if t.sym.name == "a":
            return i["a"]
        if t.sym.name == "b":
            return i["b"]
        if t.sym.name == "f":
            return i["f"][_tval(t.args[0], i)]
    raise ValueError(f"not a ground term of the test universe: {t}")


def eval_ground(f: Formula, i: dict) -> bool:
    if isinstance(f, Truth):
        return f.value
    if isinstance(f, Atom):
        if f.rel.name == "=":
            return _tval(f.args[0], i) == _tval(f.args[1], i)
        if f.rel.name == "=<":
            return _tval(f.args[0], i) <= _tval(f.args[1], i)
        if f.rel.name == "<":
            return _tval(f.args[0], i) < _tval(f.args[1], i)
        if f.rel.name == "p":
            return bool((i["p"] >> _tval(f.args[0], i)) & 1)
        if f.rel.name == "q":
            return bool((i["q"] >> _tval(f.args[0], i)) & 1)
    if isinstance(f, Neg):
        return not eval_ground(f.body, i)
    if isinstance(f, And):
        return eval_ground(f.left, i) and eval_ground(f.right, i)
    if isinstance(f, Or):
        return eval_ground(f.left, i) or eval_ground(f.right, i)
    if isinstance(f, Imp):
        return (not eval_ground(f.left, i)) or eval_ground(f.right, i)
    raise ValueError(f"cannot evaluate {f!r}")


def random_atom(rng: random.Random) -> Formula:
    kind = rng.random()
    if kind < 0.35:
        return Atom(rng.choice([_P, _Q]), (rng.choice(_TERMS),))
    rel = _EQ if kind < 0.8 else _LE
    return Atom(rel, (rng.choice(_TERMS), rng.choice(_TERMS)))


def random_ground_formula(rng: random.Random, atoms: int = 3) -> Formula:
    pool = [random_atom(rng) for _ in range(rng.randint(1, atoms))]

    def build(lo: int, hi: int) -> Formula:
        if hi - lo == 1:
            f: Formula = pool[lo]
            return Neg(f) if rng.random() < 0.3 else f
        mid = rng.randint(lo + 1, hi - 1)
        l, r = build(lo, mid), build(mid, hi)
        return rng.choice([And, Or, Imp])(l, r)

    return build(0, len(pool))


def _state_holds(entries: list[tuple[Formula, str]], i: dict) -> bool:
    for f, side in entries:
        v = eval_ground(f, i)
        if side == GOAL:
            v = not v
        if not v:
            return False
    return True


def _entailed(before: list[tuple[Formula, str]], new: tuple[Formula, str]) -> bool:
    for i in _INTERPS:
        if _state_holds(before, i) and not _state_holds([new], i):
            return False
    return True


def random_rule_soundness(rng: random.Random, n: int, report: Optional[list] = None) -> int:
    """Apply n random rule instances; count results not entailed by their
    parents.  Inapplicable picks are retried, not counted."""
    bad = 0
    done = 0
    guard = 0
    while done < n and guard < n * 60:
        guard += 1
        op = rng.choice(["rs", "rs", "rs", "rm1", "rp", "un", "sp", "tf"])
        try:
            entries, new = _random_step(rng, op)
        except (rules.RuleError, ValueError, StopIteration, Exception):
            continue
        done += 1
        if not _entailed(entries, new):
            bad += 1
            if report is not None:
                report.append((op, entries, new))
    if done < n:
        raise RuntimeError(f"only {done} of {n} random applications were applicable")
    return bad


def _random_step(rng: random.Random, op: str):
    if op == "rs":
        fa = random_ground_formula(rng)
        fb = random_ground_formula(rng)
        sa = rng.choice([ASSERTION, ASSERTION, GOAL])
        sb = rng.choice([ASSERTION, GOAL]) if sa == ASSERTION else ASSERTION
        cands = []
        for hp, hn in formula_positions(fa):
            if not isinstance(hn, Atom):
                continue
            m = premise_polarity(sa, polarity_at(fa, hp))
            for op_, on in formula_positions(fb):
                if not isinstance(on, Atom) or on != hn:
                    continue
                if premise_polarity(sb, polarity_at(fb, op_)) == -m:
                    cands.append((hp, op_))
        if not cands:
            raise ValueError("no resolvable pair")
        hp, op_ = rng.choice(cands)
        result, side, _ = rules.resolve(fa, sa, [hp], fb, sb, [op_])
        return [(fa, sa), (fb, sb)], (simplify(result, sig=_SIG), side)
    if op == "rm1":
        t1, t2 = rng.choice(_TERMS[:2]), rng.choice(_TERMS[:2])
        atom = Atom(_EQ, (App(_F, (t1,)), App(_F, (t2,))))
        host = rng.choice([atom, Imp(atom, random_atom(rng)), And(random_atom(rng), atom)])
        side = rng.choice([ASSERTION, GOAL])
        cands = [p for p, x in formula_positions(host) if x == atom]
        for p in cands:
            try:
                result, s2 = rules.monotonicity(host, side, p, _SIG)
                return [(host, side)], (simplify(result, sig=_SIG), s2)
            except rules.RuleError:
                continue
        raise ValueError("monotonicity inapplicable")
    if op == "rp":
        eq = Atom(_EQ, (rng.choice(_TERMS), rng.choice(_TERMS)))
        src_side = ASSERTION
        src = rng.choice([eq, Imp(random_atom(rng), eq)])
        tgt = random_ground_formula(rng)
        tgt_side = rng.choice([ASSERTION, GOAL])
        tpos = [p for p, x in positions(tgt) if isinstance(x, Term)]
        rng.shuffle(tpos)
        eq_path = next(p for p, x in formula_positions(src) if x == eq)
        for p in tpos:
            for d in (1, -1):
                try:
                    result, s2, _ = rules.relation_replace(
                        src, src_side, eq_path, tgt, tgt_side, [p], _SIG, [d]
                    )
                    return [(src, src_side), (tgt, tgt_side)], (simplify(result, sig=_SIG), s2)
                except (rules.RuleError, Exception):
                    continue
        raise ValueError("no replaceable position")
    if op == "un":
        f = random_ground_formula(rng)
        side = rng.choice([ASSERTION, GOAL])
        cands = list(formula_positions(f))
        rng.shuffle(cands)
        for (p1, n1), (p2, n2) in itertools.combinations(cands, 2):
            if n1 == n2 and p1[: len(p2)] != p2 and p2[: len(p1)] != p1:
                result, s2, _ = rules.unify_subformulas(f, side, p1, p2)
                return [(f, side)], (simplify(result, sig=_SIG), s2)
        raise ValueError("nothing to unify")
    if op == "sp":
        side = rng.choice([ASSERTION, GOAL])
        a, b = random_ground_formula(rng, 2), random_ground_formula(rng, 2)
        f = And(a, b) if side == ASSERTION else Or(a, b)
        if side == ASSERTION and rng.random() < 0.5:
            f = Imp(random_atom(rng), f)
            which = (2, rng.choice([1, 2]))
        else:
            which = (rng.choice([1, 2]),)
        result, s2 = rules.split(f, side, which)
        return [(f, side)], (simplify(result, sig=_SIG), s2)
    if op == "tf":
        f = random_ground_formula(rng)
        side = rng.choice([ASSERTION, GOAL])
        rule = rng.choice(rules._TF_RULES)
        cands = [p for p, x in formula_positions(f)]
        rng.shuffle(cands)
        for p in cands:
            try:
                result, s2 = rules.transform(f, side, rule, p)
                return [(f, side)], (simplify(result, sig=_SIG), s2)
            except rules.RuleError:
                continue
        raise ValueError("transform inapplicable")
    raise ValueError(op)
