"""Gate-term algebra and discrete-time trace semantics for synthesized
controllers.

Two independent evaluators: ``evaluate`` runs incrementally (edge flags and
latch state per step); ``oracle_evaluate`` computes every step by literally
quantifying over the step domain per the gate axioms.  They must agree
exactly on every input.

Edge conventions: a rising edge at step 0 is a value that starts at 1 (the
witness point of the edge axiom lies before the trace).  The set/reset
latch ``dff(ca,cb)`` holds from a ca-edge up to and *including* the step of
the next cb-edge (the reset window of its axiom is right-open); a hand-drawn timing sketch of the same latch would drop the output one
step earlier; the right-open window is the normative reading.  The delay gate's right-hand side is
read as a delay line (``val(c,t)``); the literal reading is available
behind ``literal_delay``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Union

from .terms import App, Symbol, Term, Var

Value = Fraction


class CircuitError(Exception):
    pass


@dataclass(frozen=True)
class Gate:
    pass


@dataclass(frozen=True)
class Input(Gate):
    name: str


@dataclass(frozen=True)
class Trigger(Gate):
    src: Gate
    threshold: Value


@dataclass(frozen=True)
class Ampl(Gate):
    src: Gate
    gain: Value


@dataclass(frozen=True)
class Not(Gate):
    src: Gate


@dataclass(frozen=True)
class AndG(Gate):
    left: Gate
    right: Gate


@dataclass(frozen=True)
class OrG(Gate):
    left: Gate
    right: Gate


@dataclass(frozen=True)
class Dff(Gate):
    set_: Gate
    reset: Gate


@dataclass(frozen=True)
class Mff(Gate):
    src: Gate
    delay: int


@dataclass
class Trace:
    length: int
    channels: dict[str, list[Value]]

    def __post_init__(self) -> None:
        for name, vals in self.channels.items():
            if len(vals) != self.length:
                raise CircuitError(f"channel {name} has {len(vals)} of {self.length} steps")

    @classmethod
    def from_rows(cls, names: list[str], rows: list[list[Value]]) -> "Trace":
        chans = {n: [row[i] for row in rows] for i, n in enumerate(names)}
        return cls(len(rows), chans)


ONE = Fraction(1)
ZERO = Fraction(0)


def _bool(v: bool) -> Value:
    return ONE if v else ZERO


def _is_true(v: Value) -> bool:
    return v == ONE


def inputs_of(g: Gate) -> set[str]:
    if isinstance(g, Input):
        return {g.name}
    out: set[str] = set()
    for f in getattr(g, "__dataclass_fields__", {}):
        v = getattr(g, f)
        if isinstance(v, Gate):
            out |= inputs_of(v)
    return out


def evaluate(g: Gate, trace: Trace, memo: Optional[dict[int, list[Value]]] = None) -> list[Value]:
    """Incremental evaluation over the whole trace."""
    memo = memo if memo is not None else {}
    key = id(g)
    if key in memo:
        return memo[key]
    T = trace.length
    if isinstance(g, Input):
        if g.name not in trace.channels:
            raise CircuitError(f"missing input channel {g.name!r}")
        out = list(trace.channels[g.name])
    elif isinstance(g, Trigger):
        src = evaluate(g.src, trace, memo)
        out = [_bool(v < g.threshold) for v in src]
    elif isinstance(g, Ampl):
        src = evaluate(g.src, trace, memo)
        out = [v * g.gain for v in src]
    elif isinstance(g, Not):
        src = evaluate(g.src, trace, memo)
        out = [_bool(not _is_true(v)) for v in src]
    elif isinstance(g, AndG):
        a = evaluate(g.left, trace, memo)
        b = evaluate(g.right, trace, memo)
        out = [_bool(_is_true(x) and _is_true(y)) for x, y in zip(a, b)]
    elif isinstance(g, OrG):
        a = evaluate(g.left, trace, memo)
        b = evaluate(g.right, trace, memo)
        out = [_bool(_is_true(x) or _is_true(y)) for x, y in zip(a, b)]
    elif isinstance(g, Dff):
        ca = evaluate(g.set_, trace, memo)
        cb = evaluate(g.reset, trace, memo)
        up_a = _edges(ca)
        up_b = _edges(cb)
        out = []
        held = False
        for t in range(T):
            # reset edges strictly before t kill earlier set edges
            if t > 0 and up_b[t - 1]:
                held = False
            if up_a[t]:
                held = True
            out.append(_bool(held))
    elif isinstance(g, Mff):
        src = evaluate(g.src, trace, memo)
        out = [src[t - g.delay] if t >= g.delay else ZERO for t in range(T)]
    else:
        raise CircuitError(f"unknown gate {g!r}")
    memo[key] = out
    return out


def _edges(vals: list[Value]) -> list[bool]:
    out = []
    for t, v in enumerate(vals):
        if t == 0:
            out.append(_is_true(v))
        else:
            out.append(_is_true(v) and not _is_true(vals[t - 1]))
    return out


def oracle_evaluate(
    g: Gate, trace: Trace, literal_delay: bool = False,
    memo: Optional[dict[int, list[Value]]] = None,
) -> list[Value]:
    """Literal per-step evaluation of the gate axioms' quantifier bodies."""
    memo = memo if memo is not None else {}
    key = id(g)
    if key in memo:
        return memo[key]
    T = trace.length

    def up(vals: list[Value], t: int) -> bool:
        # Discretized rising edge: value 1 with a non-1 predecessor (a step
        # earlier than the trace counts as non-1).  The edge axiom's literal
        # quantifier body is degenerate over adjacent steps (the open window
        # between t-1 and t is empty), so the edge primitive is shared and
        # the independent quantifier evaluation happens at the latch level.
        if not _is_true(vals[t]):
            return False
        return t == 0 or not _is_true(vals[t - 1])

    if isinstance(g, Input):
        if g.name not in trace.channels:
            raise CircuitError(f"missing input channel {g.name!r}")
        out = list(trace.channels[g.name])
    elif isinstance(g, Trigger):
        src = oracle_evaluate(g.src, trace, literal_delay, memo)
        out = [_bool(src[t] < g.threshold) for t in range(T)]
    elif isinstance(g, Ampl):
        src = oracle_evaluate(g.src, trace, literal_delay, memo)
        out = [src[t] * g.gain for t in range(T)]
    elif isinstance(g, Not):
        src = oracle_evaluate(g.src, trace, literal_delay, memo)
        out = [_bool(not _is_true(src[t])) for t in range(T)]
    elif isinstance(g, AndG):
        a = oracle_evaluate(g.left, trace, literal_delay, memo)
        b = oracle_evaluate(g.right, trace, literal_delay, memo)
        out = [_bool(_is_true(a[t]) and _is_true(b[t])) for t in range(T)]
    elif isinstance(g, OrG):
        a = oracle_evaluate(g.left, trace, literal_delay, memo)
        b = oracle_evaluate(g.right, trace, literal_delay, memo)
        out = [_bool(_is_true(a[t]) or _is_true(b[t])) for t in range(T)]
    elif isinstance(g, Dff):
        ca = oracle_evaluate(g.set_, trace, literal_delay, memo)
        cb = oracle_evaluate(g.reset, trace, literal_delay, memo)
        out = []
        for t2 in range(T):
            fired = any(
                up(ca, t) and all(not up(cb, t1) for t1 in range(t, t2))
                for t in range(t2 + 1)
            )
            out.append(_bool(fired))
    elif isinstance(g, Mff):
        src = oracle_evaluate(g.src, trace, literal_delay, memo)
        if literal_delay:
            base = src[g.delay] if g.delay < T else ZERO
            out = [base if t >= g.delay else ZERO for t in range(T)]
        else:
            out = [src[t - g.delay] if t >= g.delay else ZERO for t in range(T)]
    else:
        raise CircuitError(f"unknown gate {g!r}")
    memo[key] = out
    return out


GATE_NAMES = {"trg", "trigger", "ampl", "neg", "and", "or", "dff", "mff"}


def from_output_term(
    t: Term,
    geometry: Optional[Callable[[Term], Value]] = None,
) -> Gate:
    """Turn a synthesized answer term into a gate network; geometry
    subexpressions fold to numbers via the supplied valuation."""

    def build(node: Term) -> Gate:
        if isinstance(node, Var):
            return Input(node.name)
        assert isinstance(node, App)
        name = node.sym.name
        if name in ("trg", "trigger"):
            return Trigger(build(node.args[0]), number(node.args[1]))
        if name == "ampl":
            return Ampl(build(node.args[0]), number(node.args[1]))
        if name == "neg":
            return Not(build(node.args[0]))
        if name == "and":
            return AndG(build(node.args[0]), build(node.args[1]))
        if name == "or":
            return OrG(build(node.args[0]), build(node.args[1]))
        if name == "dff":
            return Dff(build(node.args[0]), build(node.args[1]))
        if name == "mff":
            d = number(node.args[1])
            if d.denominator != 1 or d < 0:
                raise CircuitError(f"delay must be a whole number of steps, got {d}")
            return Mff(build(node.args[0]), int(d))
        if node.args:
            raise CircuitError(f"unknown symbol {name!r} in circuit term")
        return Input(name)

    def number(node: Term) -> Value:
        if isinstance(node, App):
            name = node.sym.name
            if not node.args and name.lstrip("-").isdigit():
                return Fraction(int(name))
            if name == "*":
                return number(node.args[0]) * number(node.args[1])
            if name == "+":
                return number(node.args[0]) + number(node.args[1])
            if name == "-":
                return number(node.args[0]) - number(node.args[1])
        if geometry is not None:
            try:
                return geometry(node)
            except KeyError:
                pass
        raise CircuitError(f"cannot evaluate geometry expression {node}")

    return build(t)


def canonical_slots(term: Term, channels: int, sensors: int) -> Term:
    """Rename the free variables of a constructor answer term by their slot
    roles (c1..cN, s1..sM); purely cosmetic for display."""
    if not isinstance(term, App) or len(term.args) != channels + sensors:
        return term
    mapping: dict[str, str] = {}
    for i, arg in enumerate(term.args):
        if isinstance(arg, Var):
            name = f"c{i + 1}" if i < channels else f"s{i - channels + 1}"
            mapping.setdefault(arg.name, name)

    def rn(t: Term) -> Term:
        if isinstance(t, Var):
            return Var(mapping.get(t.name, t.name))
        assert isinstance(t, App)
        return App(t.sym, tuple(rn(a) for a in t.args))

    return rn(term)


def parse_trace(text: str) -> Trace:
    """Trace files: a header line of channel names, then one whitespace
    separated row of rationals per step."""
    lines = [l for l in text.splitlines() if l.strip() and not l.lstrip().startswith("#")]
    if not lines:
        raise CircuitError("empty trace file")
    names = lines[0].split()
    rows = []
    for ln in lines[1:]:
        cells = ln.split()
        if len(cells) != len(names):
            raise CircuitError(f"row has {len(cells)} cells, header has {len(names)}")
        rows.append([Fraction(c) for c in cells])
    return Trace.from_rows(names, rows)


def print_trace(trace: Trace) -> str:
    names = sorted(trace.channels)
    out = [" ".join(names)]
    for t in range(trace.length):
        out.append(" ".join(str(trace.channels[n][t]) for n in names))
    return "\n".join(out) + "\n"
