"""The database inference operations: rs, rp, rm/2, rm/1, un, sp, tf, co.

Sign conventions.  Goals are implicitly negated, so the proof state reads
``(/\\ assertions) /\\ (/\\ ~goals)``.  We track the *premise polarity* of an
occurrence: its syntactic polarity, flipped when the entry is an assertion
(assertions act as premises, goals as negated premises, which flips the
other way; the net effect is that two occurrences may resolve when their
premise polarities differ).  The replacement planted into the host follows
one schema for every side combination:

    R  =  neg_if(m is plus, content(other)[occ := neg_if(m is plus, true)])

with ``m`` the premise polarity of the host occurrence and ``content``
negating goal-side formulas.  The stored result negates the combination
once more when an assertion host meets a goal parent, keeping the stored
goal in positive display form.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .formulas import (
    FALSE,
    TRUE,
    And,
    Atom,
    Bindings,
    Formula,
    Imp,
    Neg,
    Or,
    PropVar,
    and_spine,
    apply_bindings,
    fresh_name,
    node_at,
    polarity_at,
    positions,
    replace_at,
    unify,
)
from .signature import EQ, DOWN, NONE, Signature, UP
from .terms import App, Path, Subst, Symbol, Term, TermError, UnifyError, Var

ASSERTION = "assertion"
GOAL = "goal"

PLUS = 1
MINUS = -1


class RuleError(Exception):
    pass


def premise_polarity(side: str, syntactic: int) -> int:
    return syntactic if side == GOAL else -syntactic


def _neg_if(flag: bool, f: Formula) -> Formula:
    return Neg(f) if flag else f


def result_side(side_a: str, side_b: str) -> str:
    return GOAL if GOAL in (side_a, side_b) else ASSERTION


def _occurrence_polarity(f: Formula, paths: Sequence[Path]) -> int:
    pols = {polarity_at(f, p) for p in paths}
    if len(pols) != 1:
        raise RuleError("selected occurrences have mixed polarity")
    return pols.pop()


def _replace_all(f: Formula, paths: Sequence[Path], new: Formula) -> Formula:
    for p in sorted(paths, key=len, reverse=True):
        f = replace_at(f, p, new)
    return f


def resolve(
    host: Formula,
    host_side: str,
    host_paths: Sequence[Path],
    other: Formula,
    other_side: str,
    other_paths: Sequence[Path],
) -> tuple[Formula, str, Bindings]:
    """Non-clausal resolution; the host keeps its structure.

    Simultaneous occurrence sets on either side are supported; all selected
    subformulas are unified by one mgu.
    """
    if host_side == GOAL and other_side == GOAL:
        raise RuleError("resolution between two goals is not supported")
    if not host_paths or not other_paths:
        raise RuleError("resolution needs at least one occurrence on each side")
    m_syn = _occurrence_polarity(host, host_paths)
    n_syn = _occurrence_polarity(other, other_paths)
    m = premise_polarity(host_side, m_syn)
    n = premise_polarity(other_side, n_syn)
    if m != -n:
        raise RuleError(
            f"polarity mismatch: host occurrence is {'+' if m_syn > 0 else '-'}, "
            f"other occurrence is {'+' if n_syn > 0 else '-'} "
            f"({host_side} vs {other_side})"
        )
    nodes = [node_at(host, p) for p in host_paths] + [node_at(other, p) for p in other_paths]
    binds = Bindings()
    first = nodes[0]
    for nd in nodes[1:]:
        if not isinstance(nd, Formula) or not isinstance(first, Formula):
            raise RuleError("selected path addresses a term, not a formula")
        unify(first, nd, binds)
    plant = _neg_if(m == PLUS, TRUE)
    other_t = _replace_all(other, other_paths, plant)
    other_t = apply_bindings(binds, other_t)
    r = _neg_if((m == PLUS) != (other_side == GOAL), other_t)
    result = _replace_all(host, host_paths, r)
    result = apply_bindings(binds, result)
    side = result_side(host_side, other_side)
    if host_side == ASSERTION and side == GOAL:
        result = Neg(result)
    return result, side, binds


def _term_direction(
    sig: Signature, rel: str, f: Formula, path: Path
) -> Optional[int]:
    """Net monotone direction of the term position w.r.t. ``rel``.

    Returns +1 (increasing), -1 (decreasing) or None for congruent positions
    (both directions allowed).  Raises when a crossed symbol has no tag.
    """
    node = f
    direction = 1
    congruent = True
    atom_seen = False
    for i in path:
        if isinstance(node, Atom):
            tags = sig.mono_tags(rel, node.rel, len(node.args))
            tag = tags[i - 1]
            atom_seen = True
        elif isinstance(node, App):
            tags = sig.mono_tags(rel, node.sym, len(node.args))
            tag = tags[i - 1]
        elif isinstance(node, Formula):
            if isinstance(node, Neg) or (isinstance(node, Imp) and i == 1):
                direction = -direction
            tag = EQ
        else:
            raise RuleError(f"invalid term path {path}")
        if isinstance(node, (Atom, App)):
            if tag == NONE:
                raise RuleError(
                    f"no monotonicity tag for position {i} of "
                    f"{(node.rel if isinstance(node, Atom) else node.sym).name} w.r.t. {rel}"
                )
            if tag == UP:
                congruent = False
            elif tag == DOWN:
                congruent = False
                direction = -direction
        from .formulas import children as fchildren

        kids = fchildren(node) if isinstance(node, Formula) else node.args
        if not 1 <= i <= len(kids):
            raise RuleError(f"invalid term path {path}")
        node = kids[i - 1]
    if not atom_seen:
        raise RuleError(f"path {path} does not cross an atom")
    if not isinstance(node, Term):
        raise RuleError(f"path {path} does not address a term")
    return None if congruent else direction


def relation_replace(
    src: Formula,
    src_side: str,
    eq_path: Path,
    target: Formula,
    target_side: str,
    term_paths: Sequence[Path],
    sig: Signature,
    directions: Optional[Sequence[int]] = None,
) -> tuple[Formula, str, Bindings]:
    """Paramodulation over a declared transitive relation.

    ``directions[i]`` picks the rewrite orientation at ``term_paths[i]``:
    +1 unifies the target subterm with the left side and plants the right,
    -1 the reverse.  ``None`` lets the monotonicity tags decide.
    """
    atom = node_at(src, eq_path)
    if not isinstance(atom, Atom) or len(atom.args) != 2:
        raise RuleError("relation replacement needs a binary relation atom in the source")
    rel = atom.rel.name
    decl = sig.rel_decl(rel)
    if len(term_paths) > 1 and not decl.transitive:
        raise RuleError(f"multiple replacements need a transitive relation, {rel} is not")
    src_content = Neg(src) if src_side == GOAL else src
    eq_content_path = (1,) + tuple(eq_path) if src_side == GOAL else tuple(eq_path)
    if polarity_at(src_content, eq_content_path) != PLUS:
        raise RuleError("the relation atom must occur with positive effective polarity")
    s_term, t_term = atom.args
    binds = Bindings()
    rewritten = target
    planned: list[tuple[Path, Term]] = []
    for k, path in enumerate(term_paths):
        sub = node_at(target, path)
        if not isinstance(sub, Term):
            raise RuleError(f"path {path} does not address a term")
        want = directions[k] if directions is not None and k < len(directions) else None
        net = _term_direction(sig, rel, target, path)
        # net direction: +1 means the position admits replacing larger by
        # smaller in a goal; assertions flip.
        choices: list[int]
        if net is None:
            choices = [want] if want in (1, -1) else [1, -1]
        else:
            eff = net if target_side == GOAL else -net
            choices = [1] if eff > 0 else [-1]
            if want is not None and want not in choices:
                raise RuleError("requested rewrite direction violates monotonicity")
        err: Optional[Exception] = None
        for c in choices:
            frm, to = (t_term, s_term) if c > 0 else (s_term, t_term)
            try:
                trial = Bindings()
                trial.terms = Subst(dict(binds.terms.mapping))
                trial.props = dict(binds.props)
                trial.preds = dict(binds.preds)
                unify(sub, frm, trial)
                binds = trial
                planned.append((path, to))
                err = None
                break
            except (UnifyError, TermError) as e:
                err = e
        if err is not None:
            raise RuleError(f"cannot unify replacement position {path}: {err}")
    for path, to in planned:
        rewritten = replace_at(rewritten, path, to)
    rewritten = apply_bindings(binds, rewritten)
    cond = Neg(apply_bindings(binds, replace_at(src_content, eq_content_path, FALSE)))
    side = result_side(src_side, target_side)
    if target_side == GOAL:
        result: Formula = And(cond, rewritten)
        if side != GOAL:  # pragma: no cover - goals always dominate
            result = Neg(result)
    else:
        result = Imp(cond, rewritten)
        if side == GOAL:
            result = Neg(result)
    return result, side, binds


def relation_match(
    host: Formula,
    host_side: str,
    host_path: Path,
    other: Formula,
    other_side: str,
    other_path: Path,
    sig: Signature,
    residual_rel: str = "=",
    unify_args: Optional[Iterable[int]] = None,
) -> tuple[Formula, str, Bindings]:
    """Relation matching (E-resolution): resolve two atoms of the same
    relation, planting residual conditions between mismatched arguments.

    ``unify_args`` lists argument positions to unify away; ``None`` unifies
    whatever unifies and residualizes the rest; an empty list residualizes
    every position.
    """
    if host_side == GOAL and other_side == GOAL:
        raise RuleError("relation matching between two goals is not supported")
    a = node_at(host, host_path)
    b = node_at(other, other_path)
    if not isinstance(a, Atom) or not isinstance(b, Atom):
        raise RuleError("relation matching needs two relation atoms")
    if a.rel.name != b.rel.name or len(a.args) != len(b.args):
        raise RuleError(f"relation mismatch: {a.rel.name} vs {b.rel.name}")
    m_syn = polarity_at(host, host_path)
    n_syn = polarity_at(other, other_path)
    m = premise_polarity(host_side, m_syn)
    n = premise_polarity(other_side, n_syn)
    if m != -n:
        raise RuleError("polarity mismatch for relation matching")
    binds = Bindings()
    chosen: Optional[set[int]] = set(unify_args) if unify_args is not None else None
    residual_positions: list[int] = []
    for i, (x, y) in enumerate(zip(a.args, b.args), 1):
        if chosen is not None and i not in chosen:
            residual_positions.append(i)
            continue
        try:
            trial = Bindings()
            trial.terms = Subst(dict(binds.terms.mapping))
            unify(x, y, trial)
            binds = trial
        except (UnifyError, TermError):
            if chosen is not None:
                raise RuleError(f"argument {i} does not unify")
            residual_positions.append(i)
    tags = sig.mono_tags(residual_rel, a.rel, len(a.args))
    residuals: list[Formula] = []
    rel_sym = sig.rels.setdefault(residual_rel, Symbol(residual_rel, 2, "bool"))
    for i in residual_positions:
        tag = tags[i - 1]
        if tag == NONE:
            raise RuleError(
                f"position {i} of {a.rel.name} has no monotonicity tag w.r.t. {residual_rel}"
            )
        ax = binds.apply_term(a.args[i - 1])
        bx = binds.apply_term(b.args[i - 1])
        if ax == bx:
            continue
        if tag == EQ:
            residuals.append(Atom(rel_sym, (ax, bx)))
            continue
        # the providing side's witness must relate to the demanding side's term
        if (m == PLUS) == (tag == UP):
            residuals.append(Atom(rel_sym, (bx, ax)))
        else:
            residuals.append(Atom(rel_sym, (ax, bx)))
    residual: Formula = TRUE
    if residuals:
        residual = residuals[0]
        for extra in residuals[1:]:
            residual = And(residual, extra)
    plant = _neg_if(m == PLUS, residual)
    other_t = replace_at(other, other_path, plant)
    other_t = apply_bindings(binds, other_t)
    r = _neg_if((m == PLUS) != (other_side == GOAL), other_t)
    result = replace_at(host, host_path, r)
    result = apply_bindings(binds, result)
    side = result_side(host_side, other_side)
    if host_side == ASSERTION and side == GOAL:
        result = Neg(result)
    return result, side, binds


def monotonicity(
    f: Formula,
    side: str,
    atom_path: Path,
    sig: Signature,
) -> tuple[Formula, str]:
    """Decompose ``g(s...) REL g(u...)`` into per-argument relations."""
    atom = node_at(f, atom_path)
    if not isinstance(atom, Atom) or len(atom.args) != 2:
        raise RuleError("monotonicity rule needs a binary relation atom")
    l, r = atom.args
    if not isinstance(l, App) or not isinstance(r, App) or l.sym != r.sym:
        raise RuleError("monotonicity rule needs the same outer symbol on both sides")
    if premise_polarity(side, polarity_at(f, atom_path)) != PLUS:
        raise RuleError("monotonicity strengthening only applies at this polarity on the other side")
    rel = atom.rel
    tags = sig.mono_tags(rel.name, l.sym, len(l.args))
    conds: list[Formula] = []
    for i, (x, y) in enumerate(zip(l.args, r.args)):
        tag = tags[i]
        if x == y:
            continue
        if tag == EQ:
            eq = sig.rels["="]
            conds.append(Atom(eq, (x, y)))
        elif tag == UP:
            conds.append(Atom(rel, (x, y)))
        elif tag == DOWN:
            conds.append(Atom(rel, (y, x)))
        else:
            raise RuleError(f"argument {i + 1} of {l.sym.name} has no monotonicity tag")
    new: Formula = TRUE
    if conds:
        new = conds[0]
        for c in conds[1:]:
            new = And(new, c)
    return replace_at(f, atom_path, new), side


def unify_subformulas(
    f: Formula, side: str, p1: Path, p2: Path
) -> tuple[Formula, str, Bindings]:
    a = node_at(f, p1)
    b = node_at(f, p2)
    binds = unify(a, b)
    return apply_bindings(binds, f), side, binds


def split(f: Formula, side: str, which: Path) -> tuple[Formula, str]:
    """Extract one component through an implication-and-conjunction spine
    (assertions) or a disjunction spine (goals), keeping hypotheses."""
    if not which:
        raise RuleError("splitting needs a proper component position")
    hyps: list[Formula] = []
    node = f
    for i in which:
        if side == ASSERTION and isinstance(node, And) and i in (1, 2):
            node = node.left if i == 1 else node.right
        elif side == ASSERTION and isinstance(node, Imp) and i == 2:
            hyps.append(node.left)
            node = node.right
        elif side == GOAL and isinstance(node, Or) and i in (1, 2):
            node = node.left if i == 1 else node.right
        else:
            raise RuleError(f"position {which} is not splittable on the {side} side")
    result = node
    for h in reversed(hyps):
        result = Imp(h, result)
    return result, side


_TF_RULES = (
    "commute-and",
    "commute-or",
    "assoc-left",
    "assoc-right",
    "contrapose",
    "expand-imp",
    "collapse-imp",
    "push-neg",
    "pull-neg",
)


def transform(f: Formula, side: str, rule: str, path: Path) -> tuple[Formula, str]:
    if rule not in _TF_RULES:
        raise RuleError(f"unknown transformation {rule!r}")
    node = node_at(f, path)
    if not isinstance(node, Formula):
        raise RuleError("transformation paths must address formulas")
    new = _apply_tf(rule, node)
    return replace_at(f, path, new), side


def _apply_tf(rule: str, g: Formula) -> Formula:
    if rule == "commute-and" and isinstance(g, And):
        return And(g.right, g.left)
    if rule == "commute-or" and isinstance(g, Or):
        return Or(g.right, g.left)
    if rule == "assoc-left":
        if isinstance(g, And) and isinstance(g.right, And):
            return And(And(g.left, g.right.left), g.right.right)
        if isinstance(g, Or) and isinstance(g.right, Or):
            return Or(Or(g.left, g.right.left), g.right.right)
    if rule == "assoc-right":
        if isinstance(g, And) and isinstance(g.left, And):
            return And(g.left.left, And(g.left.right, g.right))
        if isinstance(g, Or) and isinstance(g.left, Or):
            return Or(g.left.left, Or(g.left.right, g.right))
    if rule == "contrapose" and isinstance(g, Imp):
        return Imp(Neg(g.right), Neg(g.left))
    if rule == "expand-imp" and isinstance(g, Imp):
        return Or(Neg(g.left), g.right)
    if rule == "collapse-imp" and isinstance(g, Or) and isinstance(g.left, Neg):
        return Imp(g.left.body, g.right)
    if rule == "push-neg" and isinstance(g, Neg):
        b = g.body
        if isinstance(b, And):
            return Or(Neg(b.left), Neg(b.right))
        if isinstance(b, Or):
            return And(Neg(b.left), Neg(b.right))
        if isinstance(b, Imp):
            return And(b.left, Neg(b.right))
        if isinstance(b, Neg):
            return b.body
    if rule == "pull-neg":
        if isinstance(g, And) and isinstance(g.left, Neg) and isinstance(g.right, Neg):
            return Neg(Or(g.left.body, g.right.body))
        if isinstance(g, Or) and isinstance(g.left, Neg) and isinstance(g.right, Neg):
            return Neg(And(g.left.body, g.right.body))
    raise RuleError(f"{rule} not applicable here")


def concretize(
    f: Formula,
    side: str,
    path: Path,
    sig: Signature,
    sort: str,
) -> tuple[Formula, str, tuple[Symbol, Term]]:
    """Replace a skolem constant by its sort's constructor over fresh flagged
    constants; returns the recorded binding."""
    node = node_at(f, path)
    if not isinstance(node, App) or not node.sym.is_skolem or node.args:
        raise RuleError("concretization needs a skolem constant")
    if sort not in sig.constructors:
        raise RuleError(f"no constructor declared for sort {sort!r}")
    ctor_name, channels, sensors = sig.constructors[sort]
    ctor = sig.funcs[ctor_name]
    fresh: list[Term] = []
    for i in range(channels):
        fresh.append(App(sig.skolem(f"c{i + 1}", 0)))
    for i in range(sensors):
        fresh.append(App(sig.skolem(f"s{i + 1}", 0)))
    if len(fresh) != ctor.arity:
        raise RuleError(
            f"constructor {ctor_name}/{ctor.arity} does not take {len(fresh)} arguments"
        )
    term = App(ctor, tuple(fresh))
    replaced = _replace_symbol(f, node.sym, term)
    return replaced, side, (node.sym, term)


def _replace_symbol(f: Formula, sym: Symbol, term: Term) -> Formula:
    def in_term(t: Term) -> Term:
        if isinstance(t, App):
            if t.sym == sym and not t.args:
                return term
            return App(t.sym, tuple(in_term(a) for a in t.args))
        return t

    from .formulas import children as fchildren, with_children

    kids = tuple(
        _replace_symbol(k, sym, term) if isinstance(k, Formula) else in_term(k)
        for k in fchildren(f)
    )
    return with_children(f, kids)
