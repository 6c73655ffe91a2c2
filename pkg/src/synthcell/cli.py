"""Command line interface.

Subcommands: check (parse and validate axiom files), replay (axioms plus a
recorded proof term), prove (interactive REPL), simulate (scenario run with
safety monitors), oracle (property suites), serve (HTTP API).
"""
from __future__ import annotations

import argparse
import random
import sys
import time
from fractions import Fraction

from .database import Session, SessionError
from .notation import (
    ParseError,
    parse_axiom_file,
    parse_path,
    parse_proof_term,
    print_formula,
    print_proof_term,
    print_term,
)
from .render import render_proof_tree
from .rules import GOAL, RuleError


def _load_session(ax_path: str) -> Session:
    axf = parse_axiom_file(ax_path)
    session = Session(axf.sig)
    session.load_axiom_file(axf)
    return session


def cmd_check(args: argparse.Namespace) -> int:
    status = 0
    for path in args.files:
        try:
            axf = parse_axiom_file(path)
            names = [n for n, _, _ in axf.axioms]
            if len(names) != len(set(names)):
                dupes = sorted({n for n in names if names.count(n) > 1})
                raise ParseError(f"duplicate axiom names: {', '.join(dupes)}")
            session = Session(axf.sig)
            session.load_axiom_file(axf)
            print(f"{path}: ok ({len(axf.axioms)} axioms)")
        except (ParseError, SessionError, OSError) as e:
            print(f"{path}: error: {e}")
            status = 1
    return status


def cmd_replay(args: argparse.Namespace) -> int:
    try:
        session = _load_session(args.axioms)
        with open(args.proof, "r", encoding="ascii") as fh:
            text = "\n".join(l for l in fh.read().splitlines() if not l.lstrip().startswith("#"))
        pt = parse_proof_term(text)
        t0 = time.time()
        nr = session.replay(pt)
        dt = time.time() - t0
    except (ParseError, SessionError, RuleError, OSError) as e:
        print(f"replay failed: {e}")
        return 1
    e = session.entry(nr)
    print(f"replayed {sum(1 for x in session.entries.values() if x.orig.op != 'user')} "
          f"steps in {dt:.2f}s; final entry {nr} ({e.side}):")
    print(f"  {print_formula(e.formula, show_skolem_args=False, pretty=True)}")
    if e.output:
        from .circuit import canonical_slots
        for k in session.sig.outputs:
            if k in e.output:
                term = e.output[k]
                ctor = session.sig.constructors.get("robot")
                if ctor:
                    term = canonical_slots(term, ctor[1], ctor[2])
                print(f"  {k} = {print_term(term)}")
    if args.tree:
        print(render_proof_tree(session, nr))
    return 0


def cmd_prove(args: argparse.Namespace) -> int:
    session = _load_session(args.axioms)
    print(f"loaded {len(session.entries)} axioms; "
          "commands: tab | show NR | OP NR.. [key:val..] | out | tree NR | undo | quit")
    ops = {"rs", "rp", "rm", "rm1", "rm2", "un", "sp", "tf", "co"}
    while True:
        try:
            line = input("> ").strip()
        except EOFError:
            return 0
        if not line:
            continue
        words = line.split()
        cmd = words[0]
        try:
            if cmd in ("quit", "exit"):
                return 0
            if cmd == "tab":
                for nr in sorted(session.entries):
                    e = session.entries[nr]
                    name = e.name or e.orig.op
                    body = print_formula(e.formula, show_skolem_args=False, pretty=True)
                    if len(body) > 90:
                        body = body[:87] + "..."
                    print(f"{nr:4} {e.side[:6]:6} {name:8} {body}")
            elif cmd == "show":
                e = session.entry(int(words[1]))
                print(f"{e.nr} {e.side} orig={e.orig.op}{e.orig.parents}")
                print(print_formula(e.formula))
            elif cmd == "out":
                for k, t in session.answer.items():
                    print(f"{k} = {print_term(t)}")
            elif cmd == "tree":
                print(render_proof_tree(session, int(words[1])))
            elif cmd == "undo":
                print(f"removed {session.undo()}")
            elif cmd in ops:
                parents = [int(w) for w in words[1:] if w.isdigit()]
                ann: dict[str, list[str]] = {}
                for w in words[1 + len(parents):]:
                    if ":" not in w:
                        raise SessionError(f"bad annotation {w!r}")
                    k, v = w.split(":", 1)
                    ann.setdefault(k, []).append(v)
                op = {"rm": "rm2" if len(parents) == 2 else "rm1"}.get(cmd, cmd)
                nr = session.apply(op, parents, ann)
                e = session.entry(nr)
                print(f"{nr} {e.side}: {print_formula(e.formula, show_skolem_args=False)}")
            else:
                print(f"unknown command {cmd!r}")
        except (RuleError, SessionError, ParseError, ValueError, IndexError) as e:
            print(f"error: {e}")


def cmd_simulate(args: argparse.Namespace) -> int:
    from .circuit import print_trace
    from .plant import run_closed_loop
    from .scenario import load_scenario

    try:
        sc = load_scenario(args.scenario)
    except (ParseError, OSError) as e:
        print(f"scenario rejected: {e}")
        return 1
    res = run_closed_loop(
        sc.cfg, sc.state, sc.circuits, sc.horizon,
        inputs={k: (lambda t, v=v: v) for k, v in sc.inputs.items()},
        extra_probes=sc.probes, halt_on_violation=sc.halt_on_violation,
    )
    final = res.states[-1]
    print(f"ran {len(res.states) - 1} steps (dt={sc.cfg.dt}s)")
    print(f"final: angle={final.angle:.3f} arm1={final.arm1_len:.3f} "
          f"arm2={final.arm2_len:.3f} press={final.press_height:.3f}")
    for p in final.plates:
        print(f"plate {p.ident}: pos=({p.pos[0]:.3f},{p.pos[1]:.3f},{p.pos[2]:.3f}) "
              f"angle={p.angle:.3f} state={p.state} held_by={p.held_by}")
    if args.trace:
        with open(args.trace, "w") as fh:
            fh.write(print_trace(res.trace))
        print(f"trace written to {args.trace}")
    if res.violations:
        print(f"{len(res.violations)} safety violations:")
        for v in res.violations[:20]:
            print(f"  step {v.step} (t={v.time:.2f}s) rule {v.rule}: {v.message}")
        return 1
    print("no safety violations")
    return 0


def cmd_oracle(args: argparse.Namespace) -> int:
    status = 0
    rng = random.Random(args.seed)
    if args.suite in ("gates", "all"):
        from .oracles import random_gate_cases
        bad = random_gate_cases(rng, args.cases)
        print(f"gate semantics: eval vs oracle_eval on {args.cases} random cases: "
              f"{'ok' if not bad else f'{bad} mismatches'}")
        status |= 1 if bad else 0
    if args.suite in ("bg", "all"):
        from .holops import model_check
        from .notation import parse_axiom_text
        import importlib.resources
        text = importlib.resources.files("synthcell.corpus").joinpath("bg_unt_ldt.ax").read_text()
        axf = parse_axiom_text(text)
        fails = []
        for name, _, raw in axf.axioms:
            ok, wit = model_check(raw, n=args.domain, max_pred_vars=4)
            if not ok:
                fails.append((name, wit))
        print(f"background theory: {len(axf.axioms)} axioms at domain size {args.domain}: "
              f"{'ok' if not fails else fails}")
        status |= 1 if fails else 0
    if args.suite in ("soundness", "all"):
        from .oracles import random_rule_soundness
        bad = random_rule_soundness(rng, args.cases)
        print(f"calculus soundness: {args.cases} random rule applications: "
              f"{'ok' if not bad else f'{bad} unsound results'}")
        status |= 1 if bad else 0
    return status


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="warning")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="synthcell")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse and validate axiom files")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("replay", help="replay a recorded proof term")
    p.add_argument("axioms")
    p.add_argument("proof")
    p.add_argument("--tree", action="store_true", help="print the proof tree")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("prove", help="interactive session")
    p.add_argument("axioms")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("simulate", help="closed-loop plant run from a scenario file")
    p.add_argument("scenario")
    p.add_argument("--trace", help="write the recorded trace to this file")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("oracle", help="property suites (gates, bg, soundness)")
    p.add_argument("suite", choices=["gates", "bg", "soundness", "all"])
    p.add_argument("--cases", type=int, default=1000)
    p.add_argument("--domain", type=int, default=5)
    p.add_argument("--seed", type=int, default=20260810)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("serve", help="start the local JSON API")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8750)
    p.set_defaults(func=cmd_serve)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
