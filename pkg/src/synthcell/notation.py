"""ASCII surface syntax: formulas, axiom files, proof terms.

Operator tiers, tightest first: ``=``, ``=<``, ``<``, ``~``, ``&``, ``!``,
``->``, ``<-``/``<->``.  Inside terms, ``*`` binds tighter than binary
``-``/``+``.  ``all([x,y], F)`` and ``ex([x,y], F)`` quantify; ``unt``,
``ldt`` and ``lam`` build the second-order operators.  ``name$`` marks a
skolem symbol.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

from .formulas import (
    FALSE,
    TRUE,
    _Equiv,
    All,
    And,
    Atom,
    Ex,
    Formula,
    HoAtom,
    Imp,
    Lam,
    Neg,
    Or,
    PApp,
    PropVar,
    Truth,
    children,
)
from .signature import Signature, SignatureError
from .terms import App, Path, Symbol, Term, Var


class ParseError(Exception):
    def __init__(self, msg: str, line: Optional[int] = None, col: Optional[int] = None):
        loc = "" if line is None else f" at line {line}" + ("" if col is None else f", column {col}")
        super().__init__(msg + loc)
        self.line = line
        self.col = col


_TOKEN = re.compile(
    r"""\s*(?:
        (?P<num>-?\d+)
      | (?P<name>[A-Za-z_][A-Za-z0-9_]*\$?)
      | (?P<op><->|<-|->|=<|~|=|<|&|!|\*|\+|-|\(|\)|\[|\]|,|\.|@|;|:)
    )""",
    re.VERBOSE,
)


def tokenize(text: str) -> list[tuple[str, str, int]]:
    toks: list[tuple[str, str, int]] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            rest = text[pos:].lstrip()
            if not rest:
                break
            raise ParseError(f"unexpected character {rest[0]!r}", col=pos)
        pos = m.end()
        if m.group("num") is not None:
            # A '-' directly after an operand is binary minus, not a sign.
            if m.group("num").startswith("-") and toks and toks[-1][0] in ("num", "name") or (
                m.group("num").startswith("-") and toks and toks[-1][1] == ")"
            ):
                toks.append(("op", "-", m.start()))
                toks.append(("num", m.group("num")[1:], m.start() + 1))
            else:
                toks.append(("num", m.group("num"), m.start()))
        elif m.group("name") is not None:
            toks.append(("name", m.group("name"), m.start()))
        else:
            toks.append(("op", m.group("op"), m.start()))
    return toks


# Raw expression tree (category-free); elaboration picks term vs formula.
@dataclass
class RNode:
    kind: str  # "name" | "num" | "bin" | "neg" | "quant" | "lam"
    text: str = ""
    args: Optional[list["RNode"]] = None
    left: Optional["RNode"] = None
    right: Optional["RNode"] = None
    vars: tuple[str, ...] = ()


_FORMULA_BIN = {"<->": 1, "<-": 1, "->": 2, "!": 3, "&": 4}
_REL_BIN = {"<": 6, "=<": 7, "=": 8}
_TERM_BIN = {"+": 9, "-": 9, "*": 10}
_BINARY = {**_FORMULA_BIN, **_REL_BIN, **_TERM_BIN}
_NEG_PREC = 5


class _Parser:
    def __init__(self, toks: list[tuple[str, str, int]], line: Optional[int] = None):
        self.toks = toks
        self.i = 0
        self.line = line

    def peek(self) -> Optional[tuple[str, str, int]]:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self) -> tuple[str, str, int]:
        if self.i >= len(self.toks):
            raise ParseError("unexpected end of input", self.line)
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value: str) -> None:
        t = self.next()
        if t[1] != value:
            raise ParseError(f"expected {value!r}, found {t[1]!r}", self.line, t[2])

    def parse_expr(self, min_prec: int = 0) -> RNode:
        node = self.parse_unary(min_prec)
        while True:
            t = self.peek()
            if t is None or t[0] != "op" or t[1] not in _BINARY:
                return node
            op = t[1]
            prec = _BINARY[op]
            if prec < min_prec:
                return node
            self.next()
            right_min = prec + 1 if op != "->" and op != "<-" and op != "<->" else prec
            right = self.parse_expr(right_min)
            node = RNode("bin", op, left=node, right=right)

    def parse_unary(self, min_prec: int) -> RNode:
        t = self.peek()
        if t is None:
            raise ParseError("unexpected end of input", self.line)
        if t[0] == "op" and t[1] == "~":
            self.next()
            body = self.parse_expr(_NEG_PREC + 1)
            return RNode("neg", left=body)
        if t[0] == "op" and t[1] == "(":
            self.next()
            inner = self.parse_expr(0)
            self.expect(")")
            return inner
        if t[0] == "num":
            self.next()
            return RNode("num", t[1])
        if t[0] == "name":
            self.next()
            name = t[1]
            if name in ("all", "ex") and self.peek() and self.peek()[1] == "(":
                self.next()
                self.expect("[")
                vs = []
                while True:
                    tok = self.next()
                    if tok[1] == "]":
                        break
                    if tok[1] == ",":
                        continue
                    vs.append(tok[1])
                self.expect(",")
                body = self.parse_expr(0)
                self.expect(")")
                return RNode("quant", name, left=body, vars=tuple(vs))
            if name == "lam" and self.peek() and self.peek()[1] == "(":
                self.next()
                v = self.next()[1]
                self.expect(",")
                body = self.parse_expr(0)
                self.expect(")")
                return RNode("lam", left=body, vars=(v,))
            if self.peek() and self.peek()[1] == "(":
                self.next()
                args: list[RNode] = []
                if self.peek() and self.peek()[1] == ")":
                    self.next()
                else:
                    while True:
                        args.append(self.parse_expr(0))
                        tok = self.next()
                        if tok[1] == ")":
                            break
                        if tok[1] != ",":
                            raise ParseError(f"expected ',' in argument list, found {tok[1]!r}", self.line, tok[2])
                return RNode("name", name, args=args)
            return RNode("name", name, args=None)
        raise ParseError(f"unexpected token {t[1]!r}", self.line, t[2])


class Elaborator:
    def __init__(self, sig: Signature, lenient: bool = False):
        self.sig = sig
        self.lenient = lenient
        self.bound: list[str] = []

    def formula(self, r: RNode) -> Formula:
        if r.kind == "bin":
            if r.text in _FORMULA_BIN:
                l, rr = r.left, r.right
                if r.text == "&":
                    return And(self.formula(l), self.formula(rr))
                if r.text == "!":
                    return Or(self.formula(l), self.formula(rr))
                if r.text == "->":
                    return Imp(self.formula(l), self.formula(rr))
                if r.text == "<-":
                    return Imp(self.formula(rr), self.formula(l))
                # a <-> b expands at normalization; keep as And of both arrows
                return _Equiv(self.formula(l), self.formula(rr))
            if r.text in _REL_BIN:
                rel = self.sig.declare_rel(r.text, 2)
                return Atom(rel, (self.term(r.left), self.term(r.right)))
            raise ParseError(f"term operator {r.text!r} used as a formula")
        if r.kind == "neg":
            return Neg(self.formula(r.left))
        if r.kind == "quant":
            self.bound.extend(r.vars)
            body = self.formula(r.left)
            del self.bound[len(self.bound) - len(r.vars):]
            return All(r.vars, body) if r.text == "all" else Ex(r.vars, body)
        if r.kind == "name":
            name = r.text
            if name == "true":
                return TRUE
            if name == "false":
                return FALSE
            if name in ("unt", "ldt"):
                if r.args is None or len(r.args) != 3:
                    raise ParseError(f"{name} expects 3 arguments")
                return HoAtom(
                    name,
                    self.term(r.args[0]),
                    self.pred_arg(r.args[1]),
                    self.pred_arg(r.args[2]),
                )
            if name in self.sig.prop_vars and r.args is None:
                return PropVar(name)
            if name in self.sig.pred_vars:
                if r.args is None or len(r.args) != 1:
                    raise ParseError(f"predicate variable {name} expects one argument")
                return PApp(name, self.term(r.args[0]))
            if self.sig.is_rel(name):
                rel = self.sig.rels[name]
                args = tuple(self.term(a) for a in r.args or [])
                if len(args) != rel.arity and not self.lenient:
                    raise ParseError(f"{name}/{rel.arity} applied to {len(args)} arguments")
                if len(args) != rel.arity:
                    rel = Symbol(rel.name, len(args), rel.sort)
                return Atom(rel, args)
            if self.lenient and r.args is not None:
                rel = self.sig.declare_rel(name, len(r.args))
                return Atom(Symbol(name, len(r.args), "bool"), tuple(self.term(a) for a in r.args))
            if self.lenient and r.args is None:
                return PropVar(name)
            raise ParseError(f"undeclared relation {name!r}")
        if r.kind == "lam":
            raise ParseError("lam(...) only occurs inside unt/ldt")
        raise ParseError(f"cannot read a formula from {r.kind}")

    def pred_arg(self, r: RNode) -> Lam:
        if r.kind == "lam":
            self.bound.append(r.vars[0])
            body = self.formula(r.left)
            self.bound.pop()
            return Lam(r.vars[0], body)
        # boolean combination of predicate variables / constants
        u = "_t"
        body = self._pred_body(r, u)
        return Lam(u, body)

    def _pred_body(self, r: RNode, u: str) -> Formula:
        if r.kind == "name" and r.args is None:
            if r.text == "true":
                return TRUE
            if r.text == "false":
                return FALSE
            self.sig.pred_vars.add(r.text)
            return PApp(r.text, Var(u))
        if r.kind == "neg":
            return Neg(self._pred_body(r.left, u))
        if r.kind == "bin" and r.text in ("&", "!"):
            cls = And if r.text == "&" else Or
            return cls(self._pred_body(r.left, u), self._pred_body(r.right, u))
        raise ParseError("predicate argument must be a lam(...) or a boolean combination of predicate names")

    def term(self, r: RNode) -> Term:
        if r.kind == "num":
            return App(self.sig.numeral(r.text))
        if r.kind == "bin":
            if r.text in _TERM_BIN:
                sym = self.sig.funcs.setdefault(r.text, Symbol(r.text, 2, "num"))
                return App(sym, (self.term(r.left), self.term(r.right)))
            raise ParseError(f"formula operator {r.text!r} used inside a term")
        if r.kind == "name":
            name = r.text
            args = tuple(self.term(a) for a in r.args) if r.args is not None else ()
            if r.args is None and (name in self.bound or name in self.sig.globals):
                # bound and session variables shadow same-named constructors
                return Var(name)
            if name.endswith("$"):
                sym = self.sig.lookup_skolem(name, len(args))
                if sym.arity != len(args):
                    sym = Symbol(sym.name, len(args), sym.sort, is_skolem=True, suppress_args=True)
                return App(sym, args)
            if self.sig.is_fun(name):
                sym = self.sig.funcs[name]
                if sym.arity != len(args):
                    if r.args is None and sym.arity > 0:
                        raise ParseError(f"function {name}/{sym.arity} used without arguments")
                    if not self.lenient:
                        raise ParseError(f"{name}/{sym.arity} applied to {len(args)} arguments")
                    sym = Symbol(name, len(args), sym.sort, sym.is_skolem, sym.suppress_args)
                return App(sym, args)
            if r.args is not None:
                if self.lenient:
                    return App(Symbol(name, len(args)), args)
                raise ParseError(f"undeclared function {name!r}")
            return Var(name)
        if r.kind == "neg":
            raise ParseError("negation inside a term")
        raise ParseError(f"cannot read a term from {r.kind}")


def parse_formula(text: str, sig: Signature, lenient: bool = False) -> Formula:
    p = _Parser(tokenize(text))
    raw = p.parse_expr(0)
    if p.peek() is not None:
        t = p.peek()
        raise ParseError(f"trailing input {t[1]!r}", col=t[2])
    return Elaborator(sig, lenient).formula(raw)


def parse_term(text: str, sig: Signature, lenient: bool = False) -> Term:
    p = _Parser(tokenize(text))
    raw = p.parse_expr(0)
    if p.peek() is not None:
        raise ParseError("trailing input")
    return Elaborator(sig, lenient).term(raw)


# ---------------------------------------------------------------------------
# printing

_PREC = {
    _Equiv: 1,
    Imp: 2,
    Or: 3,
    And: 4,
    Neg: 5,
}


def print_term(t: Term, show_skolem_args: bool = True) -> str:
    if isinstance(t, Var):
        return t.name
    assert isinstance(t, App)
    name = t.sym.name
    if t.sym.name in ("*", "-", "+"):
        l, r = t.args
        ls = print_term(l, show_skolem_args)
        rs = print_term(r, show_skolem_args)
        if isinstance(l, App) and l.sym.name in ("-", "+") and name == "*":
            ls = f"({ls})"
        if isinstance(r, App) and r.sym.name in ("-", "+", "*") and name in ("-", "*"):
            if not (name == "*" and r.sym.name == "*"):
                rs = f"({rs})"
        return f"{ls}{name}{rs}"
    if t.sym.is_skolem and not show_skolem_args:
        return name
    if t.sym.suppress_args and t.args:
        return f"{name}()"
    if not t.args:
        return name
    return f"{name}({','.join(print_term(a, show_skolem_args) for a in t.args)})"


def _print_pred_arg(p: Lam, show_skolem_args: bool) -> str:
    body = p.body
    if isinstance(body, Truth):
        return "true" if body.value else "false"
    if isinstance(body, PApp) and body.arg == Var(p.var):
        return body.pred
    if isinstance(body, Neg) and isinstance(body.body, PApp) and body.body.arg == Var(p.var):
        return "~" + body.body.pred
    return f"lam({p.var}, {print_formula(body, show_skolem_args=show_skolem_args)})"


def display_renaming(f: Formula) -> dict[str, str]:
    """Display-only renaming of generated variable names (x#12 -> x2)."""
    from .formulas import positions

    seen: dict[str, str] = {}
    taken: set[str] = set()
    for _, node in positions(f):
        if isinstance(node, Var) and node.name not in seen:
            base = node.name.split("#")[0] or "v"
            cand = base
            n = 1
            while cand in taken:
                n += 1
                cand = f"{base}{n}"
            seen[node.name] = cand
            taken.add(cand)
    return seen


def print_formula(f: Formula, show_skolem_args: bool = True, pretty: bool = False) -> str:
    if pretty:
        ren = display_renaming(f)
        if any(k != v for k, v in ren.items()):
            from .formulas import apply_subst
            from .terms import Subst

            f = apply_subst(Subst({Var(k): Var(v) for k, v in ren.items() if k != v}), f)

    def go(g: Formula, parent_prec: int, right_of_same: bool = False) -> str:
        if isinstance(g, Truth):
            return "true" if g.value else "false"
        if isinstance(g, PropVar):
            return g.name
        if isinstance(g, Atom):
            if g.rel.name in ("=", "=<", "<"):
                l, r = g.args
                return f"{print_term(l, show_skolem_args)} {g.rel.name} {print_term(r, show_skolem_args)}"
            if not g.args:
                return g.rel.name
            return f"{g.rel.name}({','.join(print_term(a, show_skolem_args) for a in g.args)})"
        if isinstance(g, PApp):
            return f"{g.pred}({print_term(g.arg, show_skolem_args)})"
        if isinstance(g, HoAtom):
            return (
                f"{g.op}({print_term(g.time, show_skolem_args)}, "
                f"{_print_pred_arg(g.p, show_skolem_args)}, "
                f"{_print_pred_arg(g.q, show_skolem_args)})"
            )
        if isinstance(g, (All, Ex)):
            kw = "all" if isinstance(g, All) else "ex"
            return f"{kw}([{','.join(g.vars)}], {go(g.body, 0)})"
        if isinstance(g, Neg):
            return "~" + go(g.body, _PREC[Neg] + 1)
        if isinstance(g, (And, Or, Imp, _Equiv)):
            prec = _PREC[type(g)]
            op = {And: " & ", Or: " ! ", Imp: " -> ", _Equiv: " <-> "}[type(g)]
            if isinstance(g, Imp):  # right-associative
                s = go(g.left, prec + 1) + op.rstrip() + " " + go(g.right, prec)
            else:  # left-associative
                s = go(g.left, prec) + op.rstrip() + " " + go(g.right, prec + 1)
            if prec < parent_prec:
                return f"({s})"
            return s
        raise SignatureError(f"cannot print {g!r}")

    return go(f, 0)


# ---------------------------------------------------------------------------
# axiom files

@dataclass
class AxiomFile:
    sig: Signature
    axioms: list[tuple[str, str, Formula]] = field(default_factory=list)  # name, side, raw formula


def parse_axiom_text(text: str, sig: Optional[Signature] = None) -> AxiomFile:
    sig = sig or Signature()
    out = AxiomFile(sig)
    pending = ""
    pending_start = 0
    for lineno, raw_line in enumerate(text.splitlines(), 1):
        line = raw_line.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        pending = (pending + " " + line).strip() if pending else line.strip()
        if not pending_start:
            pending_start = lineno
        if not pending.endswith("."):
            continue
        stmt, pending, start = pending[:-1].strip(), "", pending_start
        pending_start = 0
        try:
            _parse_statement(stmt, out)
        except (ParseError, SignatureError) as e:
            raise ParseError(f"{e}", line=start) from e
    if pending:
        raise ParseError("unterminated statement (missing '.')", line=pending_start)
    return out


def _parse_statement(stmt: str, out: AxiomFile) -> None:
    sig = out.sig
    words = stmt.split(None, 1)
    head = words[0]
    rest = words[1] if len(words) > 1 else ""
    if head == "sort":
        return
    if head in ("fun", "skolemconst"):
        for part in rest.split(","):
            part = part.strip()
            m = re.match(r"([A-Za-z_][A-Za-z0-9_]*\$?)\s*/\s*(\d+)(?:\s*:\s*(\S+))?", part)
            if not m:
                raise ParseError(f"bad fun declaration {part!r}")
            name, arity, sort = m.group(1), int(m.group(2)), m.group(3) or ""
            skolem = name.endswith("$") or head == "skolemconst"
            sig.declare_fun(name, arity, sort, skolem=skolem, suppress=skolem)
        return
    if head == "rel":
        for part in rest.split(","):
            part = part.strip()
            m = re.match(r"([A-Za-z_][A-Za-z0-9_]*)\s*/\s*(\d+)", part)
            if not m:
                raise ParseError(f"bad rel declaration {part!r}")
            sig.declare_rel(m.group(1), int(m.group(2)))
        return
    if head == "prop":
        sig.prop_vars.update(w.strip() for w in rest.split(",") if w.strip())
        return
    if head == "predvar":
        sig.pred_vars.update(w.strip() for w in rest.split(",") if w.strip())
        return
    if head == "global":
        sig.globals.update(w.strip() for w in rest.split(",") if w.strip())
        return
    if head == "outputs":
        names = [w.strip() for w in rest.split(",") if w.strip()]
        sig.outputs.extend(names)
        sig.globals.update(names)
        return
    if head == "mono":
        parts = rest.split()
        if len(parts) < 3:
            raise ParseError(f"bad mono declaration {rest!r}")
        rel, sym, tags = parts[0], parts[1], tuple(parts[2:])
        sig.declare_mono(rel, sym, tags)
        return
    if head == "reldecl":
        parts = rest.split()
        decl = sig.relation_decls.setdefault(parts[0], type(sig.rel_decl("="))(parts[0]))
        decl.transitive = "transitive" in parts[1:]
        decl.reflexive = "reflexive" in parts[1:]
        return
    if head == "constructor":
        # constructor SORT SYMBOL/ARITY CHANNELS SENSORS
        parts = rest.split()
        m = re.match(r"([A-Za-z_][A-Za-z0-9_]*)\s*/\s*(\d+)", parts[1])
        if not m:
            raise ParseError(f"bad constructor declaration {rest!r}")
        sig.declare_constructor(parts[0], m.group(1), int(parts[2]), int(parts[3]))
        sig.declare_fun(m.group(1), int(m.group(2)))
        return
    if head == "axiom":
        m = re.match(r"([A-Za-z_][A-Za-z0-9_]*)\s+(assertion|goal)\s*:\s*(.*)$", rest, re.S)
        if not m:
            raise ParseError(f"bad axiom statement {rest[:40]!r}")
        name, side, body = m.group(1), m.group(2), m.group(3)
        out.axioms.append((name, side, parse_formula(body, sig)))
        return
    raise ParseError(f"unknown directive {head!r}")


def parse_axiom_file(path: str, sig: Optional[Signature] = None) -> AxiomFile:
    with open(path, "r", encoding="ascii") as fh:
        return parse_axiom_text(fh.read(), sig)


# ---------------------------------------------------------------------------
# proof terms

@dataclass(frozen=True)
class ProofTerm:
    op: str  # user/rs/rp/rm2/rm1/un/sp/tf/co/lab/ref
    name: str = ""  # axiom name, or label for lab/ref
    args: tuple["ProofTerm", ...] = ()
    ann: tuple[tuple[str, str], ...] = ()

    def annotations(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {}
        for k, v in self.ann:
            out.setdefault(k, []).append(v)
        return out


def parse_path(text: str) -> Path:
    text = text.strip()
    if text in ("e", ""):
        return ()
    return tuple(int(x) for x in text.split("."))


def print_path(p: Path) -> str:
    return ".".join(str(i) for i in p) if p else "e"


def parse_proof_term(text: str) -> ProofTerm:
    toks = tokenize(text)
    parser = _Parser(toks)

    def annotation() -> tuple[tuple[str, str], ...]:
        if not (parser.peek() and parser.peek()[1] == "@"):
            return ()
        parser.next()
        parser.expect("[")
        items: list[tuple[str, str]] = []
        buf: list[str] = []

        def flush() -> None:
            if not buf:
                return
            joined = "".join(buf)
            if ":" in joined:
                k, v = joined.split(":", 1)
            else:
                k, v = "p", joined
            items.append((k, v))
            buf.clear()

        depth = 0
        while True:
            t = parser.next()
            if t[1] == "]" and depth == 0:
                flush()
                break
            if t[1] == ",":
                flush()
                continue
            buf.append(t[1])
        return tuple(items)

    def node() -> ProofTerm:
        t = parser.next()
        if t[0] != "name":
            raise ParseError(f"expected a proof operator, found {t[1]!r}", col=t[2])
        op = t[1]
        ann = annotation()
        if op in ("user", "ref"):
            parser.expect("(")
            name = parser.next()[1]
            parser.expect(")")
            return ProofTerm(op, name=name, ann=ann)
        if op == "lab":
            parser.expect("(")
            label = parser.next()[1]
            parser.expect(",")
            arg = node()
            parser.expect(")")
            return ProofTerm("lab", name=label, args=(arg,), ann=ann)
        parser.expect("(")
        args = [node()]
        while parser.peek() and parser.peek()[1] == ",":
            parser.next()
            args.append(node())
        parser.expect(")")
        if op == "rm":
            op = "rm2" if len(args) == 2 else "rm1"
        arity = {"rs": 2, "rp": 2, "rm2": 2, "rm1": 1, "un": 1, "sp": 1, "tf": 1, "co": 1}
        if op not in arity:
            raise ParseError(f"unknown proof operator {op!r}")
        if len(args) != arity[op]:
            raise ParseError(f"{op} expects {arity[op]} argument(s), found {len(args)}")
        return ProofTerm(op, args=tuple(args), ann=ann)

    result = node()
    if parser.peek() is not None:
        raise ParseError("trailing input after proof term")
    return result


def print_proof_term(pt: ProofTerm, indent: int = 0) -> str:
    ann = ""
    if pt.ann:
        ann = "@[" + ", ".join(f"{k}:{v}" for k, v in pt.ann) + "]"
    op = "rm" if pt.op in ("rm1", "rm2") else pt.op
    if pt.op in ("user", "ref"):
        return f"{op}{ann}({pt.name})"
    if pt.op == "lab":
        return f"lab{ann}({pt.name}, {print_proof_term(pt.args[0])})"
    inner = ", ".join(print_proof_term(a) for a in pt.args)
    return f"{op}{ann}({inner})"
