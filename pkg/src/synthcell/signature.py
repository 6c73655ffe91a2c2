"""Symbol tables: sorts, arities, relation properties, monotonicity tags.

A signature is loaded from line-oriented ASCII directives (usually embedded
in an axiom file).  Undeclared lowercase names encountered by the parser are
variables; everything applied to arguments must be declared, except skolem
names (``$`` suffix), which are registered on first sight.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .terms import Symbol, TermError

UP = "up"
DOWN = "down"
EQ = "eq"
NONE = "none"


@dataclass
class RelationDecl:
    name: str
    transitive: bool = False
    reflexive: bool = False
    # (function or relation symbol name) -> per-argument tags
    mono: dict[str, tuple[str, ...]] = field(default_factory=dict)


class SignatureError(TermError):
    pass


class Signature:
    def __init__(self) -> None:
        self.funcs: dict[str, Symbol] = {}
        self.rels: dict[str, Symbol] = {}
        self.prop_vars: set[str] = set()
        self.pred_vars: set[str] = set()
        self.globals: set[str] = set()  # session variables never renamed apart
        self.outputs: list[str] = []
        self.relation_decls: dict[str, RelationDecl] = {}
        self.constructors: dict[str, tuple[str, int, int]] = {}
        # sort -> (constructor symbol, n channel args, n sensor args)
        for rel, (tr, rf) in {"=": (True, True), "=<": (True, True), "<": (True, False)}.items():
            self.rels[rel] = Symbol(rel, 2, "bool")
            self.relation_decls[rel] = RelationDecl(rel, transitive=tr, reflexive=rf)
        # the order relations are antitone in their first and monotone in
        # their second argument with respect to each other
        for rel in ("=<", "<"):
            for sym in ("=<", "<"):
                self.relation_decls[rel].mono[sym] = (DOWN, UP)

    # -- declarations ------------------------------------------------------

    def declare_fun(self, name: str, arity: int, sort: str = "", skolem: bool = False,
                    suppress: bool = False) -> Symbol:
        sym = Symbol(name, arity, sort, is_skolem=skolem, suppress_args=suppress)
        old = self.funcs.get(name)
        if old is not None and old.arity != arity:
            raise SignatureError(f"{name} redeclared with arity {arity} (was {old.arity})")
        self.funcs[name] = sym
        return sym

    def declare_rel(self, name: str, arity: int) -> Symbol:
        sym = Symbol(name, arity, "bool")
        old = self.rels.get(name)
        if old is not None and old.arity != arity:
            raise SignatureError(f"{name} redeclared with arity {arity} (was {old.arity})")
        self.rels.setdefault(name, sym)
        self.relation_decls.setdefault(name, RelationDecl(name))
        return self.rels[name]

    def declare_mono(self, rel: str, sym: str, tags: tuple[str, ...]) -> None:
        decl = self.relation_decls.setdefault(rel, RelationDecl(rel))
        decl.mono[sym] = tags

    def declare_constructor(self, sort: str, sym: str, channels: int, sensors: int) -> None:
        self.constructors[sort] = (sym, channels, sensors)

    def numeral(self, text: str) -> Symbol:
        return self.funcs.setdefault(text, Symbol(text, 0, "num"))

    def skolem(self, base: str, arity: int) -> Symbol:
        """Register a fresh skolem symbol derived from ``base``."""
        stem = base.rstrip("$")
        n = 0
        name = stem + "$"
        while name in self.funcs:
            n += 1
            name = f"{stem}{n}$"
        sym = Symbol(name, arity, "", is_skolem=True, suppress_args=True)
        self.funcs[name] = sym
        return sym

    def lookup_skolem(self, name: str, arity: int) -> Symbol:
        if name not in self.funcs:
            self.funcs[name] = Symbol(name, arity, "", is_skolem=True, suppress_args=True)
        return self.funcs[name]

    # -- queries -----------------------------------------------------------

    def is_fun(self, name: str) -> bool:
        return name in self.funcs

    def is_rel(self, name: str) -> bool:
        return name in self.rels

    def rel_decl(self, name: str) -> RelationDecl:
        if name not in self.relation_decls:
            raise SignatureError(f"no relation declaration for {name}")
        return self.relation_decls[name]

    def mono_tags(self, rel: str, sym: Symbol, arity: int) -> tuple[str, ...]:
        """Per-argument monotonicity of ``sym`` w.r.t. relation ``rel``.

        Everything is congruent w.r.t. equality; other relations need explicit
        declarations (missing symbols get ``none`` everywhere).
        """
        if rel == "=":
            return (EQ,) * arity
        decl = self.relation_decls.get(rel)
        if decl is None:
            return (NONE,) * arity
        return decl.mono.get(sym.name, (NONE,) * arity)
