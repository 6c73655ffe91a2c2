"""Local HTTP/JSON API: the transport for the interactive UI.

Sessions live in process memory; each session serializes its mutations.
Entry formulas cross the wire as printed text plus a structural tree
(node kind, label, children, path) so clients never re-parse.
"""
from __future__ import annotations

import importlib.resources
import threading
from typing import Any, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .database import Session, SessionError
from .formulas import (
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
from .notation import (
    ParseError,
    parse_axiom_text,
    print_formula,
    print_proof_term,
    print_term,
)
from .render import render_proof_tree
from .rules import RuleError
from .terms import App, Term, Var


def formula_tree(node: Any, path: tuple[int, ...] = ()) -> dict:
    label: str
    kind: str
    if isinstance(node, Term):
        kind = "term"
        label = print_term(node)
        kids = list(node.args) if isinstance(node, App) else []
    else:
        assert isinstance(node, Formula)
        kids = list(children(node))
        if isinstance(node, Truth):
            kind, label = "truth", ("true" if node.value else "false")
        elif isinstance(node, Atom):
            kind, label = "atom", print_formula(node)
        elif isinstance(node, PropVar):
            kind, label = "propvar", node.name
        elif isinstance(node, PApp):
            kind, label = "papp", print_formula(node)
        elif isinstance(node, Neg):
            kind, label = "neg", "~"
        elif isinstance(node, And):
            kind, label = "and", "&"
        elif isinstance(node, Or):
            kind, label = "or", "!"
        elif isinstance(node, Imp):
            kind, label = "imp", "->"
        elif isinstance(node, HoAtom):
            kind, label = "hoatom", node.op
        elif isinstance(node, Lam):
            kind, label = "lam", f"lam {node.var}"
        elif isinstance(node, (All, Ex)):
            kind = "all" if isinstance(node, All) else "ex"
            label = f"{kind}[{','.join(node.vars)}]"
        else:
            kind, label = "node", type(node).__name__
    return {
        "kind": kind,
        "label": label,
        "path": ".".join(str(i) for i in path) or "e",
        "children": [formula_tree(k, path + (i,)) for i, k in enumerate(kids, 1)],
    }


class CreateSession(BaseModel):
    corpus: Optional[str] = None  # name of a shipped corpus file
    axioms: Optional[str] = None  # or inline axiom-file text


class ApplyRequest(BaseModel):
    op: str
    parents: list[int]
    paths: dict[str, list[str]] = {}


class _Held:
    def __init__(self, session: Session):
        self.session = session
        self.lock = threading.Lock()


def corpus_text(name: str) -> str:
    if "/" in name or "\\" in name or ".." in name:
        raise HTTPException(400, "bad corpus name")
    try:
        return importlib.resources.files("synthcell.corpus").joinpath(name).read_text()
    except FileNotFoundError:
        raise HTTPException(404, f"no corpus {name!r}")


def entry_json(session: Session, nr: int) -> dict:
    e = session.entry(nr)
    from .formulas import apply_subst
    from .notation import display_renaming
    from .terms import Subst

    ren = display_renaming(e.formula)
    shown = apply_subst(
        Subst({Var(k): Var(v) for k, v in ren.items() if k != v}), e.formula
    )
    return {
        "nr": e.nr,
        "side": e.side,
        "name": e.name,
        "formula": print_formula(shown),
        "tree": formula_tree(shown),
        "output": {k: print_term(t) for k, t in e.output.items()},
        "orig": {
            "op": e.orig.op,
            "parents": list(e.orig.parents),
            "annotations": [list(kv) for kv in e.orig.ann],
        },
    }


def create_app() -> FastAPI:
    app = FastAPI(title="synthcell", version="0.1.0")
    sessions: dict[int, _Held] = {}
    counter = [0]

    def held(sid: int) -> _Held:
        if sid not in sessions:
            raise HTTPException(404, f"no session {sid}")
        return sessions[sid]

    @app.get("/corpora")
    def corpora() -> list[str]:
        root = importlib.resources.files("synthcell.corpus")
        return sorted(p.name for p in root.iterdir() if p.name.endswith(".ax"))

    @app.post("/sessions")
    def create_session(req: CreateSession) -> dict:
        text = ""
        if req.corpus:
            text = corpus_text(req.corpus)
        elif req.axioms:
            text = req.axioms
        try:
            axf = parse_axiom_text(text) if text else None
        except ParseError as e:
            raise HTTPException(422, f"axiom file rejected: {e}")
        session = Session(axf.sig if axf else None)
        if axf:
            session.load_axiom_file(axf)
        counter[0] += 1
        sessions[counter[0]] = _Held(session)
        return {"id": counter[0], "entries": len(session.entries)}

    @app.get("/sessions/{sid}/entries")
    def list_entries(sid: int) -> list[dict]:
        h = held(sid)
        with h.lock:
            return [entry_json(h.session, nr) for nr in sorted(h.session.entries)]

    @app.get("/sessions/{sid}/entries/{nr}")
    def get_entry(sid: int, nr: int) -> dict:
        h = held(sid)
        with h.lock:
            try:
                return entry_json(h.session, nr)
            except SessionError as e:
                raise HTTPException(404, str(e))

    @app.post("/sessions/{sid}/apply")
    def apply_op(sid: int, req: ApplyRequest) -> dict:
        h = held(sid)
        with h.lock:
            try:
                nr = h.session.apply(req.op, req.parents, req.paths)
            except (RuleError, SessionError) as e:
                raise HTTPException(422, f"{type(e).__name__}: {e}")
            return entry_json(h.session, nr)

    @app.post("/sessions/{sid}/undo")
    def undo(sid: int) -> dict:
        h = held(sid)
        with h.lock:
            try:
                removed = h.session.undo()
            except SessionError as e:
                raise HTTPException(422, str(e))
            return {"removed": removed}

    @app.get("/sessions/{sid}/export")
    def export(sid: int, format: str = "proof-term", root: Optional[int] = None) -> dict:
        h = held(sid)
        with h.lock:
            session = h.session
            target = root if root is not None else (max(session.entries) if session.entries else None)
            if target is None:
                raise HTTPException(422, "empty session")
            if format == "proof-term":
                return {"root": target, "text": print_proof_term(session.extract_proof_term(target))}
            if format == "proof-tree":
                return {"root": target, "text": render_proof_tree(session, target)}
            raise HTTPException(422, f"unknown export format {format!r}")

    return app
