"""Quantifier-free formulas with polarity-addressable positions.

Stored formulas contain no quantifiers and no equivalences (both are removed
at ingestion).  ``All``/``Ex`` nodes exist only for raw, just-parsed input.
Second-order until/leads-to atoms (``HoAtom``) carry one time term and two
unary predicate arguments, kept in a canonical lambda form.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Union

from .terms import (
    App,
    Path,
    Subst,
    Symbol,
    Term,
    TermError,
    UnifyError,
    Var,
    term_positions,
    term_replace_at,
    term_vars,
    unify_terms,
)


@dataclass(frozen=True)
class Formula:
    pass


@dataclass(frozen=True)
class Truth(Formula):
    value: bool


TRUE = Truth(True)
FALSE = Truth(False)


@dataclass(frozen=True)
class Atom(Formula):
    rel: Symbol
    args: tuple[Term, ...] = ()


@dataclass(frozen=True)
class PropVar(Formula):
    """Formula metavariable (the corpus' aaa, bbb); unifies with any formula."""

    name: str


@dataclass(frozen=True)
class PApp(Formula):
    """A predicate variable applied to a time term (only inside lambdas)."""

    pred: str
    arg: Term


@dataclass(frozen=True)
class Neg(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Imp(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Lam(Formula):
    """Unary predicate argument of unt/ldt, binding one time variable."""

    var: str
    body: Formula


@dataclass(frozen=True)
class HoAtom(Formula):
    op: str  # "unt" | "ldt"
    time: Term
    p: Lam
    q: Lam


@dataclass(frozen=True)
class _Equiv(Formula):
    """Parse-time equivalence; eliminated by normalization."""

    left: Formula
    right: Formula


@dataclass(frozen=True)
class All(Formula):
    vars: tuple[str, ...]
    body: Formula


@dataclass(frozen=True)
class Ex(Formula):
    vars: tuple[str, ...]
    body: Formula


Node = Union[Formula, Term]

PLUS = 1
MINUS = -1


def pvar(name: str) -> Lam:
    return Lam("_t", PApp(name, Var("_t")))


def npvar(name: str) -> Lam:
    return Lam("_t", Neg(PApp(name, Var("_t"))))


def children(f: Formula) -> tuple[Node, ...]:
    if isinstance(f, (Truth, PropVar)):
        return ()
    if isinstance(f, Atom):
        return f.args
    if isinstance(f, PApp):
        return (f.arg,)
    if isinstance(f, Neg):
        return (f.body,)
    if isinstance(f, (And, Or, Imp, _Equiv)):
        return (f.left, f.right)
    if isinstance(f, Lam):
        return (f.body,)
    if isinstance(f, HoAtom):
        return (f.time, f.p, f.q)
    if isinstance(f, (All, Ex)):
        return (f.body,)
    raise TermError(f"unknown node {f!r}")


def with_children(f: Formula, kids: tuple[Node, ...]) -> Formula:
    if isinstance(f, Atom):
        return Atom(f.rel, tuple(kids))  # type: ignore[arg-type]
    if isinstance(f, PApp):
        return PApp(f.pred, kids[0])  # type: ignore[arg-type]
    if isinstance(f, Neg):
        return Neg(kids[0])  # type: ignore[arg-type]
    if isinstance(f, And):
        return And(kids[0], kids[1])  # type: ignore[arg-type]
    if isinstance(f, Or):
        return Or(kids[0], kids[1])  # type: ignore[arg-type]
    if isinstance(f, Imp):
        return Imp(kids[0], kids[1])  # type: ignore[arg-type]
    if isinstance(f, _Equiv):
        return _Equiv(kids[0], kids[1])  # type: ignore[arg-type]
    if isinstance(f, Lam):
        return Lam(f.var, kids[0])  # type: ignore[arg-type]
    if isinstance(f, HoAtom):
        return HoAtom(f.op, kids[0], kids[1], kids[2])  # type: ignore[arg-type]
    if isinstance(f, All):
        return All(f.vars, kids[0])  # type: ignore[arg-type]
    if isinstance(f, Ex):
        return Ex(f.vars, kids[0])  # type: ignore[arg-type]
    return f


def node_at(f: Formula, path: Path) -> Node:
    node: Node = f
    for i in path:
        kids = children(node) if isinstance(node, Formula) else (
            node.args if isinstance(node, App) else ()
        )
        if not 1 <= i <= len(kids):
            raise TermError(f"invalid path {path} in formula")
        node = kids[i - 1]
    return node


def replace_at(f: Formula, path: Path, new: Node) -> Formula:
    """Replace the node at ``path``; formula positions take formulas, term
    positions take terms."""
    if not path:
        if not isinstance(new, Formula):
            raise TermError("cannot replace a formula root with a term")
        return new
    node = f
    i = path[0]
    kids = list(children(node))
    if not 1 <= i <= len(kids):
        raise TermError(f"invalid path {path}")
    child = kids[i - 1]
    if isinstance(child, Formula):
        kids[i - 1] = replace_at(child, path[1:], new)
    else:
        if not isinstance(new, Term):
            raise TermError("term position requires a term replacement")
        kids[i - 1] = term_replace_at(child, path[1:], new)
    return with_children(node, tuple(kids))


def positions(f: Formula, prefix: Path = ()) -> Iterator[tuple[Path, Node]]:
    """All positions, formula nodes first at each prefix, then term nodes."""
    yield prefix, f
    kids = children(f)
    for i, k in enumerate(kids, 1):
        if isinstance(k, Formula):
            yield from positions(k, prefix + (i,))
        else:
            yield from term_positions(k, prefix + (i,))


def formula_positions(f: Formula, prefix: Path = ()) -> Iterator[tuple[Path, Formula]]:
    for p, n in positions(f, prefix):
        if isinstance(n, Formula):
            yield p, n


def polarity_at(f: Formula, path: Path) -> int:
    """+1 under an even number of effective negations, -1 otherwise."""
    node: Node = f
    pol = PLUS
    for i in path:
        if isinstance(node, Neg) or (isinstance(node, Imp) and i == 1):
            pol = -pol
        kids = children(node) if isinstance(node, Formula) else (
            node.args if isinstance(node, App) else ()
        )
        if not 1 <= i <= len(kids):
            raise TermError(f"invalid path {path}")
        node = kids[i - 1]
    if not isinstance(node, Formula):
        raise TermError(f"path {path} addresses a term, not a formula")
    return pol


def formula_vars(f: Formula) -> set[Var]:
    out: set[Var] = set()
    for _, n in positions(f):
        if isinstance(n, Var):
            out.add(n)
        elif isinstance(n, Lam):
            out.discard(Var(n.var))
    # Lambda-bound variables are not free; recompute precisely.
    return _free_vars(f)


def _free_vars(f: Formula, bound: frozenset[str] = frozenset()) -> set[Var]:
    if isinstance(f, Atom):
        out: set[Var] = set()
        for a in f.args:
            out |= {v for v in term_vars(a) if v.name not in bound}
        return out
    if isinstance(f, PApp):
        return {v for v in term_vars(f.arg) if v.name not in bound}
    if isinstance(f, Lam):
        return _free_vars(f.body, bound | {f.var})
    if isinstance(f, (All, Ex)):
        return _free_vars(f.body, bound | set(f.vars))
    if isinstance(f, HoAtom):
        out = {v for v in term_vars(f.time) if v.name not in bound}
        out |= _free_vars(f.p, bound)
        out |= _free_vars(f.q, bound)
        return out
    out = set()
    for k in children(f):
        if isinstance(k, Formula):
            out |= _free_vars(k, bound)
    return out


def prop_vars(f: Formula) -> set[str]:
    return {n.name for _, n in positions(f) if isinstance(n, PropVar)}


def pred_vars(f: Formula) -> set[str]:
    return {n.pred for _, n in positions(f) if isinstance(n, PApp)}


class Bindings:
    """Combined unifier: term bindings plus formula/predicate metavariables."""

    def __init__(self) -> None:
        self.terms = Subst()
        self.props: dict[str, Formula] = {}
        self.preds: dict[str, Lam] = {}

    def __repr__(self) -> str:
        return f"Bindings({self.terms!r}, props={self.props}, preds={self.preds})"

    def apply(self, f: Formula) -> Formula:
        return apply_bindings(self, f)

    def apply_term(self, t: Term) -> Term:
        return self.terms.apply_term(t)


def apply_subst(s: Subst, f: Formula) -> Formula:
    b = Bindings()
    b.terms = s
    return apply_bindings(b, f)


_fresh_counter = itertools.count(1)


def fresh_name(base: str) -> str:
    return f"{base}#{next(_fresh_counter)}"


def apply_bindings(b: Bindings, f: Formula, bound: frozenset[str] = frozenset()) -> Formula:
    if isinstance(f, Truth):
        return f
    if isinstance(f, Atom):
        return Atom(f.rel, tuple(b.terms.apply_term(a) for a in f.args))
    if isinstance(f, PropVar):
        return b.props.get(f.name, f)
    if isinstance(f, PApp):
        arg = b.terms.apply_term(f.arg)
        lam = b.preds.get(f.pred)
        if lam is None:
            return PApp(f.pred, arg)
        return beta(lam, arg)
    if isinstance(f, Lam):
        # Rename the bound variable apart before substituting below it.
        if any(Var(f.var) in term_vars(t) for t in b.terms.mapping.values()) or Var(
            f.var
        ) in b.terms.mapping:
            new = fresh_name(f.var.rstrip("0123456789#") or "t")
            renamed = apply_subst(Subst({Var(f.var): Var(new)}), f.body)
            return Lam(new, apply_bindings(b, renamed, bound | {new}))
        return Lam(f.var, apply_bindings(b, f.body, bound | {f.var}))
    if isinstance(f, (All, Ex)):
        inner = apply_bindings(b, f.body, bound | set(f.vars))
        return type(f)(f.vars, inner)
    kids = tuple(
        apply_bindings(b, k, bound) if isinstance(k, Formula) else b.terms.apply_term(k)
        for k in children(f)
    )
    return with_children(f, kids)


def beta(lam: Lam, arg: Term) -> Formula:
    return apply_subst(Subst({Var(lam.var): arg}), lam.body)


def unify(a: Node, b: Node, binds: Optional[Bindings] = None) -> Bindings:
    """Most general unifier of two terms or two formulas.

    Formula metavariables (PropVar) bind to whole formulas.  Predicate
    variables follow the pattern fragment only: ``P`` applied to the
    lambda-bound time variable matches a lambda body over that variable.
    """
    bs = binds if binds is not None else Bindings()
    if isinstance(a, Term) and isinstance(b, Term):
        unify_terms(a, b, bs.terms)
        return bs
    if not (isinstance(a, Formula) and isinstance(b, Formula)):
        raise UnifyError("cannot unify a term with a formula")
    _unify_f(bs.apply(a), bs.apply(b), bs, frozenset())
    return bs


def _unify_f(a: Formula, b: Formula, bs: Bindings, scope: frozenset[str]) -> None:
    a = bs.apply(a)
    b = bs.apply(b)
    if isinstance(a, PropVar) or isinstance(b, PropVar):
        if isinstance(b, PropVar) and not isinstance(a, PropVar):
            a, b = b, a
        assert isinstance(a, PropVar)
        if a == b:
            return
        if a.name in prop_vars(b):
            raise UnifyError(f"occurs check on formula variable {a.name}")
        bs.props = {k: _subst_prop(v, a.name, b) for k, v in bs.props.items()}
        bs.props[a.name] = b
        return
    if _try_pattern(a, b, bs, scope) or _try_pattern(b, a, bs, scope):
        return
    if type(a) is not type(b):
        raise UnifyError(f"formula clash: {type(a).__name__} vs {type(b).__name__}")
    if isinstance(a, Truth):
        if a != b:
            raise UnifyError("true vs false")
        return
    if isinstance(a, Atom):
        assert isinstance(b, Atom)
        if a.rel.name != b.rel.name or len(a.args) != len(b.args):
            raise UnifyError(f"relation clash: {a.rel.name} vs {b.rel.name}")
        for x, y in zip(a.args, b.args):
            unify_terms(x, y, bs.terms)
        return
    if isinstance(a, PApp):
        assert isinstance(b, PApp)
        if a.pred != b.pred:
            raise UnifyError(f"predicate variable clash: {a.pred} vs {b.pred}")
        unify_terms(a.arg, b.arg, bs.terms)
        return
    if isinstance(a, Lam):
        assert isinstance(b, Lam)
        u = fresh_name("u")
        ab = apply_subst(Subst({Var(a.var): Var(u)}), a.body)
        bb = apply_subst(Subst({Var(b.var): Var(u)}), b.body)
        _unify_f(ab, bb, bs, scope | {u})
        return
    if isinstance(a, HoAtom):
        assert isinstance(b, HoAtom)
        if a.op != b.op:
            raise UnifyError(f"operator clash: {a.op} vs {b.op}")
        unify_terms(a.time, b.time, bs.terms)
        _unify_f(a.p, b.p, bs, scope)
        _unify_f(a.q, b.q, bs, scope)
        return
    if isinstance(a, (All, Ex)):
        raise UnifyError("cannot unify quantified formulas")
    for x, y in zip(children(a), children(b)):
        if isinstance(x, Formula):
            _unify_f(x, y, bs, scope)  # type: ignore[arg-type]
        else:
            unify_terms(x, y, bs.terms)  # type: ignore[arg-type]


def _try_pattern(a: Formula, b: Formula, bs: Bindings, scope: frozenset[str]) -> bool:
    """Pattern-fragment predicate binding: P(u) or ~P(u) against a body."""
    inner = a
    negated = False
    if isinstance(inner, Neg) and isinstance(inner.body, PApp):
        inner, negated = inner.body, True
    if not isinstance(inner, PApp):
        return False
    if isinstance(b, PApp) and not negated:
        return False  # handled structurally
    if not isinstance(inner.arg, Var) or inner.arg.name not in scope:
        if isinstance(b, (PApp, Neg)):
            return False
        raise UnifyError(
            f"predicate variable {inner.pred} applied outside the pattern fragment"
        )
    u = inner.arg.name
    body = b
    if negated:
        body = b.body if isinstance(b, Neg) else Neg(b)
    prev = bs.preds.get(inner.pred)
    cand = Lam(u, body)
    if prev is not None:
        if not alpha_equal(prev, cand, strip_double_neg=True):
            raise UnifyError(f"inconsistent bindings for predicate variable {inner.pred}")
        return True
    bs.preds[inner.pred] = cand
    return True


def _subst_prop(f: Formula, name: str, repl: Formula) -> Formula:
    if isinstance(f, PropVar) and f.name == name:
        return repl
    kids = tuple(
        _subst_prop(k, name, repl) if isinstance(k, Formula) else k for k in children(f)
    )
    return with_children(f, kids)


def strip_double_neg(f: Formula) -> Formula:
    if isinstance(f, Neg) and isinstance(f.body, Neg):
        return strip_double_neg(f.body.body)
    kids = tuple(
        strip_double_neg(k) if isinstance(k, Formula) else k for k in children(f)
    )
    return with_children(f, kids)


def alpha_equal(a: Formula, b: Formula, strip_double_neg_: bool = False, **kw) -> bool:
    if strip_double_neg_ or kw.pop("strip_double_neg", False):
        a = strip_double_neg(a)
        b = strip_double_neg(b)
    return compare(a, b, reassoc=False)


def and_spine(f: Formula) -> list[Formula]:
    if isinstance(f, And):
        return and_spine(f.left) + and_spine(f.right)
    return [f]


def or_spine(f: Formula) -> list[Formula]:
    if isinstance(f, Or):
        return or_spine(f.left) + or_spine(f.right)
    return [f]


class _Match:
    """Backtracking matcher for alpha equivalence with optional unordered
    and/or spines and optional suppressed-argument wildcards."""

    def __init__(self, reassoc: bool, suppressed_ok: bool):
        self.reassoc = reassoc
        self.suppressed_ok = suppressed_ok

    def match(self, a: Node, b: Node, env: dict[str, str]) -> Iterator[dict[str, str]]:
        if isinstance(a, Term) and isinstance(b, Term):
            yield from self.match_term(a, b, env)
            return
        if not (isinstance(a, Formula) and isinstance(b, Formula)):
            return
        if isinstance(a, (And, Or)) and self.reassoc:
            if type(a) is not type(b):
                return
            xs = and_spine(a) if isinstance(a, And) else or_spine(a)
            ys = and_spine(b) if isinstance(b, And) else or_spine(b)
            if len(xs) != len(ys):
                return
            yield from self.match_multiset(xs, ys, env)
            return
        if type(a) is not type(b):
            return
        if isinstance(a, Truth):
            if a == b:
                yield env
            return
        if isinstance(a, PropVar):
            if a == b:
                yield env
            return
        if isinstance(a, Atom):
            assert isinstance(b, Atom)
            if a.rel.name != b.rel.name or len(a.args) != len(b.args):
                return
            yield from self.match_seq(list(a.args), list(b.args), env)
            return
        if isinstance(a, PApp):
            assert isinstance(b, PApp)
            if a.pred != b.pred:
                return
            yield from self.match_term(a.arg, b.arg, env)
            return
        if isinstance(a, Lam):
            assert isinstance(b, Lam)
            u = fresh_name("cmp")
            ab = apply_subst(Subst({Var(a.var): Var(u)}), a.body)
            bb = apply_subst(Subst({Var(b.var): Var(u)}), b.body)
            yield from self.match(ab, bb, env)
            return
        if isinstance(a, (All, Ex)):
            assert isinstance(b, (All, Ex))
            if len(a.vars) != len(b.vars):
                return
            names = [fresh_name("cmp") for _ in a.vars]
            sa = Subst({Var(v): Var(n) for v, n in zip(a.vars, names)})
            sb = Subst({Var(v): Var(n) for v, n in zip(b.vars, names)})
            yield from self.match(apply_subst(sa, a.body), apply_subst(sb, b.body), env)
            return
        yield from self.match_seq(list(children(a)), list(children(b)), env)

    def match_seq(self, xs: list[Node], ys: list[Node], env: dict[str, str]) -> Iterator[dict[str, str]]:
        if len(xs) != len(ys):
            return
        if not xs:
            yield env
            return
        for env2 in self.match(xs[0], ys[0], env):
            yield from self.match_seq(xs[1:], ys[1:], env2)

    def match_multiset(self, xs: list[Node], ys: list[Node], env: dict[str, str]) -> Iterator[dict[str, str]]:
        if not xs:
            yield env
            return
        x = xs[0]
        for j, y in enumerate(ys):
            for env2 in self.match(x, y, env):
                yield from self.match_multiset(xs[1:], ys[:j] + ys[j + 1 :], env2)

    def match_term(self, a: Term, b: Term, env: dict[str, str]) -> Iterator[dict[str, str]]:
        if isinstance(a, Var) and isinstance(b, Var):
            key = "v:" + a.name
            if key in env:
                if env[key] == b.name:
                    yield env
                return
            if "r:" + b.name in env:
                return
            env2 = dict(env)
            env2[key] = b.name
            env2["r:" + b.name] = a.name
            yield env2
            return
        if isinstance(a, App) and isinstance(b, App):
            an, bn = a.sym.name, b.sym.name
            if a.sym.is_skolem and b.sym.is_skolem:
                key = "s:" + an
                if key in env:
                    if env[key] != bn:
                        return
                elif "t:" + bn in env:
                    return
                env2 = dict(env)
                env2.setdefault(key, bn)
                env2.setdefault("t:" + bn, an)
                if self.suppressed_ok and (not a.args or not b.args):
                    yield env2
                    return
                yield from self.match_seq(list(a.args), list(b.args), env2)
                return
            if an != bn:
                return
            if self.suppressed_ok and len(a.args) != len(b.args) and (
                not a.args or not b.args
            ):
                yield env
                return
            yield from self.match_seq(list(a.args), list(b.args), env)
            return
        return


def compare(
    a: Node,
    b: Node,
    reassoc: bool = True,
    suppressed_ok: bool = False,
) -> bool:
    """Alpha equivalence; with ``reassoc`` the and/or spines are compared as
    multisets.  ``suppressed_ok`` lets zero-argument applications stand for a
    display-suppressed application of the same symbol."""
    m = _Match(reassoc, suppressed_ok)
    return next(m.match(a, b, {}), None) is not None


class _InstanceMatch:
    """One-way matcher: variables of the general side bind to subterms of the
    specific side (not necessarily injectively); specific-side variables are
    rigid.  Skolem heads map consistently; zero-argument applications stand
    for display-suppressed ones."""

    def __init__(self, reassoc: bool, suppressed_ok: bool):
        self.reassoc = reassoc
        self.suppressed_ok = suppressed_ok

    def match(self, a: Node, b: Node, env: dict) -> Iterator[dict]:
        if isinstance(a, Term) and isinstance(b, Term):
            yield from self.match_term(a, b, env)
            return
        if not (isinstance(a, Formula) and isinstance(b, Formula)):
            return
        if isinstance(a, (And, Or)) and self.reassoc and type(a) is type(b):
            xs = and_spine(a) if isinstance(a, And) else or_spine(a)
            ys = and_spine(b) if isinstance(b, And) else or_spine(b)
            if len(xs) != len(ys):
                return
            yield from self.match_multiset(xs, ys, env)
            return
        if type(a) is not type(b):
            return
        if isinstance(a, (Truth, PropVar)):
            if a == b:
                yield env
            return
        if isinstance(a, Atom):
            assert isinstance(b, Atom)
            if a.rel.name != b.rel.name or len(a.args) != len(b.args):
                return
            yield from self.match_seq(list(a.args), list(b.args), env)
            return
        yield from self.match_seq(list(children(a)), list(children(b)), env)

    def match_seq(self, xs, ys, env):
        if len(xs) != len(ys):
            return
        if not xs:
            yield env
            return
        for env2 in self.match(xs[0], ys[0], env):
            yield from self.match_seq(xs[1:], ys[1:], env2)

    def match_multiset(self, xs, ys, env):
        if not xs:
            yield env
            return
        for j, y in enumerate(ys):
            for env2 in self.match(xs[0], y, env):
                yield from self.match_multiset(xs[1:], ys[:j] + ys[j + 1 :], env2)

    def match_term(self, a: Term, b: Term, env: dict) -> Iterator[dict]:
        if isinstance(a, Var):
            key = "v:" + a.name
            if key in env:
                if env[key] == b:
                    yield env
                return
            env2 = dict(env)
            env2[key] = b
            yield env2
            return
        if isinstance(a, App) and isinstance(b, App):
            if a.sym.is_skolem and b.sym.is_skolem:
                key = "s:" + a.sym.name
                if key in env and env[key] != b.sym.name:
                    return
                env2 = dict(env)
                env2.setdefault(key, b.sym.name)
                if self.suppressed_ok and (not a.args or not b.args):
                    yield env2
                    return
                yield from self.match_seq(list(a.args), list(b.args), env2)
                return
            if a.sym.name != b.sym.name:
                return
            if self.suppressed_ok and len(a.args) != len(b.args) and (
                not a.args or not b.args
            ):
                yield env
                return
            yield from self.match_seq(list(a.args), list(b.args), env)
            return
        return


def instance_bindings(
    general: Node,
    specific: Node,
    reassoc: bool = True,
    suppressed_ok: bool = True,
) -> Optional[dict]:
    """Bindings making ``specific`` an instance of ``general``, or None."""
    m = _InstanceMatch(reassoc, suppressed_ok)
    return next(m.match(general, specific, {}), None)


def rename_vars(f: Formula, avoid_globals: set[str]) -> tuple[Formula, Subst]:
    """Rename all free variables not listed in ``avoid_globals`` to fresh ones."""
    fv = sorted(_free_vars(f), key=lambda v: v.name)
    mapping = {}
    for v in fv:
        if v.name in avoid_globals:
            continue
        base = v.name.split("#")[0] or "v"
        mapping[v] = Var(fresh_name(base))
    s = Subst(mapping)
    return apply_subst(s, f), s
