"""Post-step normalization applied to every inference result before storage.

Beyond the truth-constant laws, idempotence and absorption, the default
configuration keeps formulas in the implication form the derived corpus
uses: negation is pushed through connectives (``~(a & b)`` becomes
``a -> ~b``), nested implications collapse (``a -> (b -> c)`` becomes
``a & b -> c``), and conjunction/disjunction chains re-associate to the
left.  Within an implication, occurrences of antecedent conjuncts in the
consequent reduce to ``true``; reflexive relations on syntactically equal
arguments reduce to ``true`` as well.  Every rule preserves logical
equivalence (checked by the exhaustive valuation oracle in the tests).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .formulas import (
    FALSE,
    TRUE,
    And,
    Atom,
    Formula,
    Imp,
    Neg,
    Or,
    Truth,
    and_spine,
    children,
    or_spine,
    with_children,
)
from .signature import Signature


@dataclass(frozen=True)
class SimpConfig:
    nnf_left_assoc: bool = True
    max_passes: int = 50

    def __post_init__(self) -> None:
        if self.max_passes < 1:
            raise ValueError("max_passes must be at least 1")


DEFAULT = SimpConfig()


def _rebuild(cls, parts: list[Formula]) -> Formula:
    out = parts[0]
    for p in parts[1:]:
        out = cls(out, p)
    return out


def _dedupe(parts: list[Formula]) -> list[Formula]:
    seen: list[Formula] = []
    for p in parts:
        if p not in seen:
            seen.append(p)
    return seen


def _simplify_node(f: Formula, cfg: SimpConfig, sig: Optional[Signature]) -> Formula:
    if isinstance(f, Neg):
        b = f.body
        if isinstance(b, Truth):
            return FALSE if b.value else TRUE
        if isinstance(b, Neg):
            return b.body
        if cfg.nnf_left_assoc:
            if isinstance(b, Imp):
                return And(b.left, Neg(b.right))
            if isinstance(b, And):
                return Imp(b.left, Neg(b.right))
            if isinstance(b, Or):
                return And(Neg(b.left), Neg(b.right))
        return f
    if isinstance(f, Atom) and sig is not None and len(f.args) == 2:
        decl = sig.relation_decls.get(f.rel.name)
        if decl is not None and decl.reflexive and f.args[0] == f.args[1]:
            return TRUE
    if isinstance(f, And):
        parts = _dedupe(and_spine(f))
        out: list[Formula] = []
        for p in parts:
            if isinstance(p, Truth):
                if not p.value:
                    return FALSE
                continue
            out.append(p)
        if not out:
            return TRUE
        # absorption: drop a disjunction containing a sibling conjunct
        kept: list[Formula] = []
        for p in out:
            if isinstance(p, Or) and any(d in out and d is not p for d in or_spine(p)):
                if any(d != p and d in out for d in or_spine(p)):
                    continue
            kept.append(p)
        # unit propagation: a sibling satisfying an implication's antecedent
        final: list[Formula] = []
        others = kept
        for p in kept:
            if isinstance(p, Imp):
                hyp = and_spine(p.left)
                rest = [q for q in others if q is not p]
                if hyp and all(h in rest for h in hyp):
                    final.append(p.right)
                    continue
                # sibling conjuncts hold besides the antecedent: occurrences
                # inside the consequent reduce to true
                r2 = _discharge(p.right, rest + hyp)
                if r2 is not p.right:
                    final.append(Imp(p.left, r2))
                    continue
            final.append(p)
        final = _dedupe(final)
        if not final:
            return TRUE
        return _rebuild(And, final)
    if isinstance(f, Or):
        parts = _dedupe(or_spine(f))
        out = []
        for p in parts:
            if isinstance(p, Truth):
                if p.value:
                    return TRUE
                continue
            out.append(p)
        if not out:
            return FALSE
        kept = []
        for p in out:
            if isinstance(p, And) and any(d != p and d in out for d in and_spine(p)):
                continue
            kept.append(p)
        return _rebuild(Or, kept)
    if isinstance(f, Imp):
        l, r = f.left, f.right
        if isinstance(r, Truth) and r.value:
            return TRUE
        if isinstance(l, Truth):
            return r if l.value else TRUE
        if isinstance(r, Truth) and not r.value:
            return Neg(l)
        if l == r:
            return TRUE
        if cfg.nnf_left_assoc and isinstance(r, Imp):
            return Imp(And(l, r.left), r.right)
        hyps = and_spine(l)
        r2 = _discharge(r, hyps)
        if r2 is not r:
            return Imp(l, r2)
        return f
    return f


def _discharge(f: Formula, hyps: list[Formula]) -> Formula:
    """Replace occurrences of antecedent conjuncts with true (sound inside the
    consequent of the implication whose antecedent they come from)."""
    if f in hyps:
        return TRUE
    if isinstance(f, (And, Or, Neg, Imp)):
        kids = tuple(
            _discharge(k, hyps) if isinstance(k, Formula) else k for k in children(f)
        )
        return with_children(f, kids)
    return f


def _walk(f: Formula, cfg: SimpConfig, sig: Optional[Signature]) -> Formula:
    kids = children(f)
    if kids and any(isinstance(k, Formula) for k in kids):
        new = tuple(
            _walk(k, cfg, sig) if isinstance(k, Formula) else k for k in kids
        )
        if new != kids:
            f = with_children(f, new)
    return _simplify_node(f, cfg, sig)


def simplify(f: Formula, cfg: SimpConfig = DEFAULT, sig: Optional[Signature] = None) -> Formula:
    for _ in range(cfg.max_passes):
        g = _walk(f, cfg, sig)
        if g == f:
            return g
        f = g
    return f


def factorize(f: Formula, sig: Optional[Signature] = None) -> Formula:
    """Merge repeated subformula occurrences via idempotence and absorption."""
    return simplify(f, SimpConfig(nnf_left_assoc=False), sig)
