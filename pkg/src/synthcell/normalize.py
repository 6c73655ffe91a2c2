"""Ingestion normalization: equivalence elimination and skolemization.

Assertion-side universals become free variables and existentials become
skolem applications over the governing universals; the goal side is
dualized (existentials free, universals skolemized).  Polarity swaps the
roles under an odd number of effective negations.  No equivalence and no
quantifier survives normalization.
"""
from __future__ import annotations

from typing import Optional

from .formulas import (
    All,
    And,
    Ex,
    Formula,
    Imp,
    Lam,
    and_spine,
    apply_subst,
    children,
    fresh_name,
    with_children,
)
from .notation import _Equiv
from .rules import ASSERTION, GOAL
from .signature import Signature
from .terms import App, Subst, Term, Var


class NormalizeError(Exception):
    pass


def expand_equivalences(f: Formula) -> Formula:
    if isinstance(f, _Equiv):
        l = expand_equivalences(f.left)
        r = expand_equivalences(f.right)
        return And(Imp(l, r), Imp(r, l))
    kids = tuple(
        expand_equivalences(k) if isinstance(k, Formula) else k for k in children(f)
    )
    return with_children(f, kids)


def skolemize(f: Formula, side: str, sig: Signature) -> Formula:
    """Remove quantifiers per the two-column convention."""

    def go(g: Formula, pol: int, scope: tuple[Var, ...], s: Subst) -> Formula:
        if isinstance(g, (All, Ex)):
            body = g.body
            free_like = (isinstance(g, All) == (pol > 0)) if side == ASSERTION else (
                isinstance(g, Ex) == (pol > 0)
            )
            ren = Subst(dict(s.mapping))
            new_scope = scope
            for v in g.vars:
                if free_like:
                    name = v
                    if v in sig.globals or any(w.name == v for w in new_scope):
                        name = fresh_name(v)
                    var = Var(name)
                    if name != v:
                        ren.mapping[Var(v)] = var
                    new_scope = new_scope + (var,)
                else:
                    sym = sig.skolem(v, len(new_scope))
                    ren.mapping[Var(v)] = App(sym, tuple(new_scope))
            return go(body, pol, new_scope, ren)
        if isinstance(g, Lam):
            for _, n in _quantifiers(g.body):
                raise NormalizeError("quantifiers inside predicate arguments are not supported")
            return apply_subst(s, g)
        kids = []
        for i, k in enumerate(children(g), 1):
            if isinstance(k, Formula):
                kpol = pol
                from .formulas import Neg

                if isinstance(g, Neg) or (isinstance(g, Imp) and i == 1):
                    kpol = -pol
                kids.append(go(k, kpol, scope, s))
            else:
                kids.append(s.apply_term(k))
        return with_children(g, tuple(kids))

    return go(f, 1, (), Subst())


def _quantifiers(f: Formula):
    if isinstance(f, (All, Ex)):
        yield (), f
    for k in children(f):
        if isinstance(k, Formula):
            yield from _quantifiers(k)


def normalize_axiom(
    raw: Formula, side: str, sig: Signature, split_conjuncts: bool = False
) -> list[Formula]:
    """Equivalences expanded, quantifiers removed; optionally split the
    top-level conjunction into separate formulas."""
    if side not in (ASSERTION, GOAL):
        raise NormalizeError(f"unknown side {side!r}")
    g = skolemize(expand_equivalences(raw), side, sig)
    if split_conjuncts and side == ASSERTION:
        return and_spine(g)
    return [g]
