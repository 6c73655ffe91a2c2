"""The formula database: numbered entries, session operations, answer
substitution tracking, proof-term extraction and replay."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from . import rules
from .formulas import (
    Atom,
    Bindings,
    Formula,
    HoAtom,
    Neg,
    PropVar,
    apply_bindings,
    compare,
    formula_positions,
    polarity_at,
    rename_vars,
)
from .normalize import normalize_axiom
from .notation import ProofTerm, parse_path, print_path
from .rules import ASSERTION, GOAL, RuleError, premise_polarity
from .signature import Signature
from .simplify import SimpConfig, simplify
from .terms import Path, Subst, Term, Var


class SessionError(Exception):
    pass


@dataclass
class Origin:
    op: str  # "user" or a rule name
    parents: tuple[int, ...] = ()
    ann: tuple[tuple[str, str], ...] = ()
    binds: Optional[Bindings] = None


@dataclass
class DbEntry:
    nr: int
    side: str
    formula: Formula
    orig: Origin
    name: Optional[str] = None  # stable axiom name
    output: dict[str, Term] = field(default_factory=dict)


class Session:
    def __init__(self, sig: Optional[Signature] = None, cfg: Optional[SimpConfig] = None):
        self.sig = sig or Signature()
        self.cfg = cfg or SimpConfig()
        self.entries: dict[int, DbEntry] = {}
        self.names: dict[str, int] = {}
        self.next_nr = 1

    @property
    def answer(self) -> dict[str, Term]:
        """Output terms of the newest entry that carries any."""
        for nr in sorted(self.entries, reverse=True):
            if self.entries[nr].output:
                return self.entries[nr].output
        return {}

    # -- access -------------------------------------------------------------

    def entry(self, nr: int) -> DbEntry:
        if nr not in self.entries:
            raise SessionError(f"no entry {nr}")
        return self.entries[nr]

    def by_name(self, name: str) -> DbEntry:
        if name not in self.names:
            raise SessionError(f"no axiom named {name!r}")
        return self.entries[self.names[name]]

    def _store(
        self,
        side: str,
        formula: Formula,
        orig: Origin,
        name: Optional[str] = None,
        output: Optional[dict[str, Term]] = None,
    ) -> int:
        nr = self.next_nr
        self.next_nr += 1
        entry = DbEntry(nr, side, formula, orig, name=name, output=dict(output or {}))
        self.entries[nr] = entry
        return nr

    # -- axioms ---------------------------------------------------------------

    def add_axiom(self, name: str, raw: Formula, side: str, split: bool = False) -> list[int]:
        if name in self.names:
            raise SessionError(f"axiom name {name!r} already used")
        # Axioms are stored normalized but unsimplified: tautology schemas
        # (aaa & bbb -> aaa, aa = aa) must survive ingestion verbatim.
        formulas = normalize_axiom(raw, side, self.sig, split_conjuncts=split)
        nrs = []
        for i, f in enumerate(formulas):
            f, _ = rename_vars(f, self.sig.globals)
            output: dict[str, Term] = {}
            if side == GOAL:
                output = {v: Var(v) for v in self.sig.outputs}
            nr = self._store(
                side, f, Origin("user"), name=name if i == 0 else f"{name}.{i + 1}",
                output=output,
            )
            if i == 0:
                self.names[name] = nr
            else:
                self.names[f"{name}.{i + 1}"] = nr
            nrs.append(nr)
        return nrs

    def load_axiom_file(self, axfile) -> list[int]:
        out = []
        for name, side, raw in axfile.axioms:
            out.extend(self.add_axiom(name, raw, side))
        return out

    # -- applying operations --------------------------------------------------

    def _fresh_copy(self, entry: DbEntry) -> tuple[Formula, Subst]:
        return rename_vars(entry.formula, self.sig.globals)

    def _outputs(self, parents: Sequence[DbEntry], renamed: dict[int, Subst],
                 binds: Optional[Bindings]) -> dict[str, Term]:
        """Merge parent output terms through the per-use renaming and the
        step's unifier; conflicting terms are unified into the binder."""
        subst = binds.terms if binds is not None else Subst()
        out: dict[str, Term] = {}
        for p in parents:
            rho = renamed.get(p.nr, Subst())
            for v, t in p.output.items():
                t2 = subst.apply_term(rho.apply_term(t))
                if v in out and out[v] != t2:
                    try:
                        from .terms import unify_terms

                        unify_terms(out[v], t2, subst)
                        out = {k: subst.apply_term(x) for k, x in out.items()}
                        t2 = subst.apply_term(t2)
                    except Exception:
                        pass
                out[v] = t2
        return out

    def _record(
        self,
        side: str,
        result: Formula,
        orig: Origin,
        parents: Sequence[DbEntry] = (),
        renamed: Optional[dict[int, Subst]] = None,
    ) -> int:
        simplified = simplify(result, self.cfg, self.sig)
        output = self._outputs(parents, renamed or {}, orig.binds)
        return self._store(side, simplified, orig, output=output)

    def apply(
        self,
        op: str,
        parents: Sequence[int],
        ann: Optional[dict[str, list[str]]] = None,
    ) -> int:
        ann = ann or {}
        return self._apply(op, parents, ann)

    def _apply(self, op: str, parents: Sequence[int], ann: dict[str, list[str]]) -> int:
        sig = self.sig
        ps = [self.entry(p) for p in parents]
        annpairs = tuple((k, v) for k, vs in ann.items() for v in vs)
        if op == "rs":
            host, other = ps
            other_f, rho = self._fresh_copy(other)
            hp = [parse_path(v) for v in ann.get("h", [])]
            op_ = [parse_path(v) for v in ann.get("o", [])]
            if not hp or not op_:
                hp, op_ = self._search_resolve(host, other_f, other.side)
            result, side, binds = rules.resolve(
                host.formula, host.side, hp, other_f, other.side, op_
            )
            orig = Origin("rs", (host.nr, other.nr), annpairs, binds)
            return self._record(side, result, orig, ps, {other.nr: rho})
        if op == "rp":
            src, target = ps
            src_f, rho = self._fresh_copy(src)
            eq = parse_path(ann["eq"][0]) if "eq" in ann else None
            ats = [parse_path(v) for v in ann.get("at", [])]
            dirs = [int(v) for v in ann.get("dir", [])] or None
            if eq is None or not ats:
                eq, ats = self._search_rp(src_f, src.side, target)
            result, side, binds = rules.relation_replace(
                src_f, src.side, eq, target.formula, target.side, ats, sig, dirs
            )
            orig = Origin("rp", (src.nr, target.nr), annpairs, binds)
            return self._record(side, result, orig, ps, {src.nr: rho})
        if op == "rm2":
            host, other = ps
            other_f, rho = self._fresh_copy(other)
            hp = parse_path(ann["h"][0]) if "h" in ann else None
            op_ = parse_path(ann["o"][0]) if "o" in ann else None
            uargs: Optional[list[int]] = None
            if "uargs" in ann:
                v = ann["uargs"][0]
                uargs = [] if v == "none" else [int(x) for x in v.split(".")]
            if hp is None or op_ is None:
                raise SessionError("rm/2 needs h: and o: occurrence annotations")
            result, side, binds = rules.relation_match(
                host.formula, host.side, hp, other_f, other.side, op_, sig,
                residual_rel=ann.get("rel", ["="])[0], unify_args=uargs,
            )
            orig = Origin("rm2", (host.nr, other.nr), annpairs, binds)
            return self._record(side, result, orig, ps, {other.nr: rho})
        if op == "rm1":
            (entry,) = ps
            at = parse_path(ann["at"][0]) if "at" in ann else self._search_rm1(entry)
            result, side = rules.monotonicity(entry.formula, entry.side, at, sig)
            return self._record(side, result, Origin("rm1", (entry.nr,), annpairs), ps)
        if op == "un":
            (entry,) = ps
            paths = [parse_path(v) for v in ann.get("p", [])]
            if len(paths) != 2:
                raise SessionError("un needs exactly two paths")
            result, side, binds = rules.unify_subformulas(
                entry.formula, entry.side, paths[0], paths[1]
            )
            orig = Origin("un", (entry.nr,), annpairs, binds)
            return self._record(side, result, orig, ps)
        if op == "sp":
            (entry,) = ps
            which = parse_path(ann["p"][0]) if "p" in ann else ()
            result, side = rules.split(entry.formula, entry.side, which)
            return self._record(side, result, Origin("sp", (entry.nr,), annpairs), ps)
        if op == "tf":
            (entry,) = ps
            rule = ann["rule"][0]
            at = parse_path(ann["at"][0]) if "at" in ann else ()
            result, side = rules.transform(entry.formula, entry.side, rule, at)
            return self._record(side, result, Origin("tf", (entry.nr,), annpairs), ps)
        if op == "co":
            (entry,) = ps
            at = parse_path(ann["at"][0]) if "at" in ann else ()
            sort = ann["sort"][0]
            result, side, (sym, term) = rules.concretize(
                entry.formula, entry.side, at, sig, sort
            )
            nr = self._record(side, result, Origin("co", (entry.nr,), annpairs), ps)
            e = self.entries[nr]
            e.output = {
                k: _replace_sym_term(t, sym, term) for k, t in e.output.items()
            }
            return nr
        raise SessionError(f"unknown operation {op!r}")

    # -- occurrence search ----------------------------------------------------

    def _search_resolve(
        self, host: DbEntry, other_f: Formula, other_side: str
    ) -> tuple[list[Path], list[Path]]:
        """Find the unique applicable occurrence pair; ambiguity is an error
        listing the candidates (the stored proof-term format can pin them
        with h:/o: path annotations)."""
        from .formulas import unify

        host_cands = [
            (p, n)
            for p, n in formula_positions(host.formula)
            if isinstance(n, (Atom, PropVar, HoAtom))
        ]
        other_cands = list(formula_positions(other_f))
        found: list[tuple[Path, Path]] = []
        results: list[Formula] = []
        for hp, hn in host_cands:
            m = premise_polarity(host.side, polarity_at(host.formula, hp))
            for op_, on in other_cands:
                if not isinstance(on, (Atom, PropVar, HoAtom)):
                    continue
                if premise_polarity(other_side, polarity_at(other_f, op_)) != -m:
                    continue
                try:
                    unify(hn, on)
                    result, _, _ = rules.resolve(
                        host.formula, host.side, [hp], other_f, other_side, [op_]
                    )
                except Exception:
                    continue
                simplified = simplify(result, self.cfg, self.sig)
                if any(entries_equal(simplified, r) for r in results):
                    continue
                found.append((hp, op_))
                results.append(simplified)
        if len(found) == 1:
            return [found[0][0]], [found[0][1]]
        if not found:
            raise SessionError("no resolvable occurrence pair found")
        raise SessionError(
            "resolution without occurrence annotations is ambiguous here; "
            f"candidates: {[(print_path(a), print_path(b)) for a, b in found][:8]}"
        )

    def _search_rp(self, src: Formula, src_side: str, target: DbEntry):
        """Unique applicable (equation, position) pair, or an ambiguity error."""
        from .formulas import positions as all_positions

        src_content = Neg(src) if src_side == GOAL else src
        eq_cands = []
        for p, n in formula_positions(src):
            if isinstance(n, Atom) and len(n.args) == 2 and n.rel.name in self.sig.relation_decls:
                content_path = ((1,) + tuple(p)) if src_side == GOAL else p
                if polarity_at(src_content, content_path) == 1:
                    eq_cands.append(p)
        found = []
        results: list[Formula] = []
        for eq in eq_cands:
            for tp, tn in all_positions(target.formula):
                if isinstance(tn, Formula):
                    continue
                try:
                    result, _, _ = rules.relation_replace(
                        src, src_side, eq, target.formula, target.side, [tp], self.sig
                    )
                except Exception:
                    continue
                simplified = simplify(result, self.cfg, self.sig)
                if any(entries_equal(simplified, r) for r in results):
                    continue
                found.append((eq, [tp]))
                results.append(simplified)
        if len(found) == 1:
            return found[0]
        if not found:
            raise SessionError("no applicable relation replacement found")
        raise SessionError(
            "relation replacement without annotations is ambiguous here; "
            f"candidates: {[(print_path(e), [print_path(q) for q in t]) for e, t in found][:8]}"
        )

    def _search_rm1(self, entry: DbEntry) -> Path:
        from .terms import App

        cands = []
        for p, n in formula_positions(entry.formula):
            if (
                isinstance(n, Atom)
                and len(n.args) == 2
                and isinstance(n.args[0], App)
                and isinstance(n.args[1], App)
                and n.args[0].sym == n.args[1].sym
            ):
                cands.append(p)
        if len(cands) != 1:
            raise SessionError(f"rm/1 needs an at: annotation; candidates {cands}")
        return cands[0]

    # -- undo -----------------------------------------------------------------

    def undo(self) -> int:
        derived = [nr for nr, e in self.entries.items() if e.orig.op != "user"]
        if not derived:
            raise SessionError("nothing to undo")
        last = max(self.entries)
        if self.entries[last].orig.op == "user":
            raise SessionError("axioms cannot be undone")
        del self.entries[last]
        self.next_nr = last
        return last

    # -- proof terms ------------------------------------------------------------

    def extract_proof_term(self, nr: int) -> ProofTerm:
        uses: dict[int, int] = {}

        def count(n: int) -> None:
            uses[n] = uses.get(n, 0) + 1
            if uses[n] == 1:
                for p in self.entries[n].orig.parents:
                    count(p)

        count(nr)
        labels: dict[int, str] = {}
        emitted: set[int] = set()
        counter = [0]

        def build(n: int) -> ProofTerm:
            e = self.entries[n]
            if n in emitted:
                return ProofTerm("ref", name=labels[n])
            inner: ProofTerm
            if e.orig.op == "user":
                inner = ProofTerm("user", name=e.name or str(n))
            else:
                inner = ProofTerm(
                    e.orig.op,
                    args=tuple(build(p) for p in e.orig.parents),
                    ann=e.orig.ann,
                )
            if uses.get(n, 0) > 1 and e.orig.op != "user":
                counter[0] += 1
                labels[n] = f"l{counter[0]}"
                emitted.add(n)
                return ProofTerm("lab", name=labels[n], args=(inner,))
            return inner

        return build(nr)

    def replay(self, pt: ProofTerm) -> int:
        labels: dict[str, int] = {}

        def go(node: ProofTerm) -> int:
            if node.op == "user":
                return self.by_name(node.name).nr
            if node.op == "ref":
                if node.name not in labels:
                    raise SessionError(f"ref({node.name}) without a dominating lab")
                return labels[node.name]
            if node.op == "lab":
                nr = go(node.args[0])
                labels[node.name] = nr
                return nr
            parents = [go(a) for a in node.args]
            try:
                return self.apply(node.op, parents, node.annotations())
            except (RuleError, SessionError) as e:
                raise SessionError(
                    f"replay failed at {node.op}({', '.join(map(str, parents))}): {e}"
                ) from e

        return go(pt)


def _replace_sym_term(t: Term, sym, term: Term) -> Term:
    from .terms import App

    if isinstance(t, App):
        if t.sym == sym and not t.args:
            return term
        return App(t.sym, tuple(_replace_sym_term(a, sym, term) for a in t.args))
    return t


def entries_equal(a: Formula, b: Formula, suppressed_ok: bool = False) -> bool:
    """Replay comparison: alpha equivalence with and/or spines compared as
    multisets."""
    return compare(a, b, reassoc=True, suppressed_ok=suppressed_ok)
