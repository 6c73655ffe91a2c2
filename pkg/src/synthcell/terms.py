"""First-order terms, symbols, and substitutions.

Variables are plain names; everything else is an application of a declared
symbol.  Symbols carry a skolem flag (printed with a ``$`` suffix) and a
display-suppression flag (printed ``name()`` with the arguments hidden).
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator, Optional

Path = tuple[int, ...]


class TermError(Exception):
    pass


class UnifyError(TermError):
    """Raised on clash or occurs-check violation."""


@dataclass(frozen=True)
class Symbol:
    name: str
    arity: int
    sort: str = ""
    is_skolem: bool = False
    suppress_args: bool = False

    def __call__(self, *args: "Term") -> "Term":
        return App(self, tuple(args))


@dataclass(frozen=True)
class Term:
    pass


@dataclass(frozen=True)
class Var(Term):
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class App(Term):
    sym: Symbol
    args: tuple[Term, ...] = ()

    def __post_init__(self) -> None:
        if len(self.args) != self.sym.arity:
            raise TermError(
                f"{self.sym.name}/{self.sym.arity} applied to {len(self.args)} arguments"
            )

    def __str__(self) -> str:
        if not self.args:
            return self.sym.name
        return f"{self.sym.name}({', '.join(str(a) for a in self.args)})"


def term_vars(t: Term) -> set[Var]:
    if isinstance(t, Var):
        return {t}
    out: set[Var] = set()
    for a in t.args:  # type: ignore[union-attr]
        out |= term_vars(a)
    return out


def term_at(t: Term, path: Path) -> Term:
    node = t
    for i in path:
        if not isinstance(node, App) or not 1 <= i <= len(node.args):
            raise TermError(f"invalid term path {path}")
        node = node.args[i - 1]
    return node


def term_replace_at(t: Term, path: Path, new: Term) -> Term:
    if not path:
        return new
    if not isinstance(t, App) or not 1 <= path[0] <= len(t.args):
        raise TermError(f"invalid term path {path}")
    i = path[0] - 1
    args = list(t.args)
    args[i] = term_replace_at(args[i], path[1:], new)
    return App(t.sym, tuple(args))


def term_positions(t: Term, prefix: Path = ()) -> Iterator[tuple[Path, Term]]:
    yield prefix, t
    if isinstance(t, App):
        for i, a in enumerate(t.args, 1):
            yield from term_positions(a, prefix + (i,))


class Subst:
    """Idempotent substitution: domain variables never occur in range terms."""

    def __init__(self, mapping: Optional[dict[Var, Term]] = None):
        self.mapping: dict[Var, Term] = dict(mapping or {})

    def __bool__(self) -> bool:
        return bool(self.mapping)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Subst) and self.mapping == other.mapping

    def __repr__(self) -> str:
        inner = ", ".join(f"{v.name} -> {t}" for v, t in sorted(self.mapping.items(), key=lambda kv: kv[0].name))
        return "{" + inner + "}"

    def get(self, v: Var) -> Optional[Term]:
        return self.mapping.get(v)

    def apply_term(self, t: Term) -> Term:
        if isinstance(t, Var):
            return self.mapping.get(t, t)
        if not t.args:  # type: ignore[union-attr]
            return t
        return App(t.sym, tuple(self.apply_term(a) for a in t.args))  # type: ignore[union-attr]

    def bind(self, v: Var, t: Term) -> None:
        """Destructively add v -> t, keeping the substitution idempotent."""
        t = self.apply_term(t)
        if t == v:
            return
        if v in term_vars(t):
            raise UnifyError(f"occurs check: {v.name} in {t}")
        one = Subst({v: t})
        for w in list(self.mapping):
            self.mapping[w] = one.apply_term(self.mapping[w])
        self.mapping[v] = t

    def compose(self, later: "Subst") -> "Subst":
        """Return the substitution equivalent to applying self, then later."""
        out = Subst({v: later.apply_term(t) for v, t in self.mapping.items()})
        for v, t in later.mapping.items():
            if v not in out.mapping:
                out.mapping[v] = t
        return out

    def restrict(self, keep: set[Var]) -> "Subst":
        return Subst({v: t for v, t in self.mapping.items() if v in keep})


def unify_terms(a: Term, b: Term, subst: Optional[Subst] = None) -> Subst:
    """Most general unifier of two terms, extending ``subst`` if given."""
    s = subst if subst is not None else Subst()
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        x = s.apply_term(x)
        y = s.apply_term(y)
        if x == y:
            continue
        if isinstance(x, Var):
            s.bind(x, y)
        elif isinstance(y, Var):
            s.bind(y, x)
        elif x.sym == y.sym:
            stack.extend(zip(x.args, y.args))
        else:
            raise UnifyError(f"clash: {x.sym.name} vs {y.sym.name}")
    return s


def rename_symbol(sym: Symbol, name: str) -> Symbol:
    return replace(sym, name=name)
