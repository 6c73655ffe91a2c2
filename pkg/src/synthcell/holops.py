"""The until/leads-to operators: first-order expansion, pattern unification,
background theory, and an exhaustive finite-model oracle.

``unt(t0,P,Q)``: P holds from t0 on until Q occurs (possibly never); an
occurrence of Q releases P from that point on (inclusive).  ``ldt(t0,P,Q)``:
if P holds long enough from t0, Q eventually occurs, and there is an
earliest such time (strict earliness: no Q strictly before the witness).
"""
from __future__ import annotations

import importlib.resources
from typing import Optional

import numpy as np

from .database import Session
from .formulas import (
    All,
    And,
    Atom,
    Bindings,
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
    beta,
    children,
    fresh_name,
    pred_vars,
    unify,
    with_children,
)
from .formulas import _Equiv
from .notation import parse_axiom_text
from .signature import DOWN, Signature, UP
from .terms import App, Subst, Symbol, Term, Var

class ModelCheckError(Exception):
    pass


LE = Symbol("=<", 2, "bool")
LT = Symbol("<", 2, "bool")


def _le(a: Term, b: Term) -> Formula:
    return Atom(LE, (a, b))


def _lt(a: Term, b: Term) -> Formula:
    return Atom(LT, (a, b))


def expand(f: Formula) -> Formula:
    """Replace every unt/ldt atom by its first-order definition.

    unt(t0,P,Q)  =  all t1: t1 < t0  or  (ex t: t0 =< t =< t1 and Q(t))
                    or P(t1)
    ldt(t0,P,Q)  =  ex t1: t0 =< t1 and ((all t: t0 =< t =< t1 -> P(t))
                    -> Q(t1)) and (all t: t0 =< t < t1 -> ~Q(t))
    """
    if isinstance(f, HoAtom):
        t0 = f.time
        p = Lam(f.p.var, expand(f.p.body))
        q = Lam(f.q.var, expand(f.q.body))
        t1 = fresh_name("t1")
        t = fresh_name("t")
        v1, v = Var(t1), Var(t)
        if f.op == "unt":
            release = Ex((t,), And(And(_le(t0, v), _le(v, v1)), beta(q, v)))
            return All((t1,), Or(Or(_lt(v1, t0), release), beta(p, v1)))
        if f.op == "ldt":
            held = All((t,), Imp(And(_le(t0, v), _le(v, v1)), beta(p, v)))
            earliest = All((t,), Imp(And(_le(t0, v), _lt(v, v1)), Neg(beta(q, v))))
            return Ex((t1,), And(And(_le(t0, v1), Imp(held, beta(q, v1))), earliest))
        raise ModelCheckError(f"unknown operator {f.op}")
    kids = tuple(expand(k) if isinstance(k, Formula) else k for k in children(f))
    return with_children(f, kids)


def ho_unify(a: Formula, b: Formula, binds: Optional[Bindings] = None) -> Bindings:
    """Pattern-fragment unification of two atoms, possibly second-order.

    Predicate variables applied to the bound time variable match lambda
    bodies over that variable; anything outside the pattern fragment is
    rejected rather than guessed.
    """
    return unify(a, b, binds)


class FiniteTimeModel:
    """Domain {0..n} with one bitmask per predicate symbol."""

    def __init__(self, n: int, valuation: dict[str, int]):
        if n < 1:
            raise ModelCheckError("domain must contain at least two points")
        self.n = n
        self.valuation = valuation

    def holds(self, pred: str, t: int) -> bool:
        return bool((self.valuation.get(pred, 0) >> t) & 1)


def _tables(n: int) -> tuple[np.ndarray, np.ndarray]:
    """unt/ldt truth tables over all (t0, P-mask, Q-mask)."""
    size = 1 << (n + 1)
    unt = np.zeros((n + 1, size, size), dtype=bool)
    ldt = np.zeros((n + 1, size, size), dtype=bool)
    for t0 in range(n + 1):
        for pm in range(size):
            for qm in range(size):
                ok = True
                for t1 in range(t0, n + 1):
                    if any((qm >> t) & 1 for t in range(t0, t1 + 1)):
                        continue
                    if not (pm >> t1) & 1:
                        ok = False
                        break
                unt[t0, pm, qm] = ok
                fires = False
                for t1 in range(t0, n + 1):
                    if any((qm >> t) & 1 for t in range(t0, t1)):
                        break
                    held = all((pm >> t) & 1 for t in range(t0, t1 + 1))
                    if (not held) or (qm >> t1) & 1:
                        fires = True
                        break
                ldt[t0, pm, qm] = fires
    return unt, ldt


_table_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def model_check(
    axiom: Formula,
    n: int = 4,
    max_pred_vars: int = 3,
) -> tuple[bool, Optional[dict[str, int]]]:
    """Evaluate ``axiom`` over the time domain {0..n} for every valuation of
    its predicate variables; returns (holds, counterexample valuation).

    The evaluation is vectorized over the valuation space: each subformula
    evaluates to a boolean array indexed by the predicate masks.
    """
    pvars = sorted(pred_vars(axiom))
    if len(pvars) > max_pred_vars:
        raise ModelCheckError(
            f"{len(pvars)} predicate variables exceed the exhaustive limit {max_pred_vars}"
        )
    if n not in _table_cache:
        _table_cache[n] = _tables(n)
    unt_t, ldt_t = _table_cache[n]
    size = 1 << (n + 1)
    shape = (size,) * len(pvars)
    axes = {}
    for i, p in enumerate(pvars):
        # lazily broadcast: subformulas over few predicate variables stay small
        axes[p] = np.arange(size, dtype=np.int64).reshape(
            tuple(size if j == i else 1 for j in range(len(pvars)))
        )

    def term_val(t: Term, env: dict[str, int]) -> int:
        if isinstance(t, Var):
            if t.name not in env:
                raise ModelCheckError(f"free time variable {t.name} in model check")
            return env[t.name]
        assert isinstance(t, App)
        name = t.sym.name
        if name.lstrip("-").isdigit():
            return int(name)
        if name == "+":
            return term_val(t.args[0], env) + term_val(t.args[1], env)
        if name == "-":
            return term_val(t.args[0], env) - term_val(t.args[1], env)
        if name == "*":
            return term_val(t.args[0], env) * term_val(t.args[1], env)
        raise ModelCheckError(f"uninterpreted symbol {name} in model check")

    def mask_array(lam: Lam, env: dict[str, int]):
        out = np.zeros((1,) * len(pvars), dtype=np.int64)
        for t in range(n + 1):
            env2 = dict(env)
            env2[lam.var] = t
            out = out | (ev(lam.body, env2).astype(np.int64) << t)
        return out

    def ev(g: Formula, env: dict[str, int]):
        if isinstance(g, Truth):
            return np.full((1,) * len(pvars), g.value, dtype=bool)
        if isinstance(g, PApp):
            t = term_val(g.arg, env)
            if g.pred not in axes:
                raise ModelCheckError(f"unknown predicate variable {g.pred}")
            return ((axes[g.pred] >> t) & 1).astype(bool)
        if isinstance(g, Atom):
            if g.rel.name not in ("=", "=<", "<"):
                raise ModelCheckError(f"uninterpreted relation {g.rel.name}")
            a = term_val(g.args[0], env)
            b = term_val(g.args[1], env)
            val = a == b if g.rel.name == "=" else (a <= b if g.rel.name == "=<" else a < b)
            return np.full((1,) * len(pvars), val, dtype=bool)
        if isinstance(g, HoAtom):
            t0 = term_val(g.time, env)
            if not 0 <= t0 <= n:
                return np.full((1,) * len(pvars), g.op == "unt", dtype=bool)
            pm = mask_array(g.p, env)
            qm = mask_array(g.q, env)
            table = unt_t if g.op == "unt" else ldt_t
            return table[t0][pm, qm]
        if isinstance(g, Neg):
            return ~ev(g.body, env)
        if isinstance(g, And):
            return ev(g.left, env) & ev(g.right, env)
        if isinstance(g, Or):
            return ev(g.left, env) | ev(g.right, env)
        if isinstance(g, Imp):
            return ~ev(g.left, env) | ev(g.right, env)
        if isinstance(g, _Equiv):
            return ev(g.left, env) == ev(g.right, env)
        if isinstance(g, (All, Ex)):
            acc = None
            combine = np.logical_and if isinstance(g, All) else np.logical_or
            base = ev  # noqa: F841 - clarity
            for values in _assignments(len(g.vars), n):
                env2 = dict(env)
                env2.update(zip(g.vars, values))
                cur = ev(g.body, env2)
                acc = cur if acc is None else combine(acc, cur)
            return acc
        raise ModelCheckError(f"cannot evaluate {type(g).__name__} in model check")

    result = np.broadcast_to(ev(axiom, {}), shape)
    if bool(result.all()):
        return True, None
    flat = int(np.argmax(~result.reshape(-1)))
    witness = {}
    rem = flat
    for p in reversed(pvars):
        witness[p] = rem % size
        rem //= size
    return False, witness


def _assignments(k: int, n: int):
    if k == 0:
        yield ()
        return
    for v in range(n + 1):
        for rest in _assignments(k - 1, n):
            yield (v,) + rest


BG_FILE = "bg_unt_ldt.ax"


def load_background_theory(session: Session) -> list[int]:
    """Insert the 21 until/leads-to axioms as assertions bg01..bg21 and
    register the operators' monotonicity."""
    text = (
        importlib.resources.files("synthcell.corpus").joinpath(BG_FILE).read_text()
    )
    axfile = parse_axiom_text(text, session.sig)
    nrs = []
    for name, side, raw in axfile.axioms:
        nrs.extend(session.add_axiom(name, raw, side))
    for rel in ("=<", "<"):
        session.sig.declare_mono(rel, "unt", ("none", UP, UP))
        session.sig.declare_mono(rel, "ldt", ("none", DOWN, UP))
    return nrs
