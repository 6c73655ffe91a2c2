"""Linearized proof-tree rendering.

Each formula sits two columns right of its result; the more distant parent
of a binary step is connected by vertical bars; re-used entries appear as
``NNN**``.  Assertions are suffixed ``, -`` and goals prefixed ``- ,``.
Long formulas wrap at a deterministic width.
"""
from __future__ import annotations

from .database import Session
from .notation import print_formula
from .rules import GOAL

_OP_TAG = {"rs": "re", "rp": "rp", "rm2": "rm", "rm1": "rm", "un": "un",
           "sp": "sp", "tf": "tf", "co": "co"}


def render_proof_tree(session: Session, root: int, width: int = 100,
                      show_skolem_args: bool = False) -> str:
    seen: set[int] = set()
    lines: list[tuple[int, str]] = []
    bars: dict[int, set[int]] = {}

    def emit(nr: int, col: int) -> tuple[int, int]:
        e = session.entry(nr)
        if nr in seen:
            lines.append((col, f"{nr}**"))
            i = len(lines) - 1
            return i, i
        seen.add(nr)
        first = len(lines)
        parents = e.orig.parents
        bar_range: tuple[int, int] | None = None
        if len(parents) == 2:
            _, a_last = emit(parents[0], col + 2)
            _, b_last = emit(parents[1], col + 2)
            bar_range = (a_last + 1, b_last)
        elif len(parents) == 1:
            emit(parents[0], col + 2)
        tag = e.name if e.orig.op == "user" else _OP_TAG.get(e.orig.op, e.orig.op)
        body = print_formula(e.formula, show_skolem_args=show_skolem_args, pretty=True)
        text = f"- , {body}" if e.side == GOAL else f"{body} , -"
        for w in _wrap(f"{nr}{tag}  ", text, width - col):
            lines.append((col, w))
        last = len(lines) - 1
        if bar_range is not None:
            for i in range(*bar_range):
                bars.setdefault(i, set()).add(col)
            bars.setdefault(bar_range[1], set()).add(col)
        return first, last

    emit(root, 0)
    max_col = max(c for c, _ in lines) + 2
    out = []
    for i, (col, text) in enumerate(lines):
        cells = [" "] * max_col
        for bc in bars.get(i, ()):
            if bc < col:
                cells[bc] = "|"
        out.append("".join(cells[:col]) + text)
    return "\n".join(out) + "\n"


def _wrap(head: str, text: str, width: int) -> list[str]:
    width = max(width, 40)
    full = head + text
    if len(full) <= width:
        return [full]
    out = []
    indent = " " * len(head)
    cur = head + ""
    first = True
    for token in text.split(" "):
        sep = "" if first else " "
        if len(cur) + len(sep) + len(token) > width and not first:
            out.append(cur)
            cur = indent + token
        else:
            cur += sep + token
        first = False
    out.append(cur)
    return out
