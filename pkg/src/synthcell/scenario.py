"""Scenario files: initial plant state, circuit bindings and horizon in a
line-oriented key/value format.

    horizon 80
    config dt 0.1
    state angle 150
    plate s0 at d3 angle 60 state unbearbeitet
    input ci 1
    circuit drv or(cdrv,and(dff(ci,neg(...)),trg(rob_s3,wxy(d4,d5))))
    probe co neg(or(...))

Geometry expressions inside circuit terms (dxy(d4,d5), wxy(d4,d5), plant
constants) fold to numbers against the configuration.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Callable, Optional

from .circuit import Gate, from_output_term
from .notation import ParseError, parse_term
from .plant import ACTUATORS, Plate, PlantConfig, PlantState, dist_xy, winkel_xy
from .signature import Signature


@dataclass
class Scenario:
    cfg: PlantConfig
    state: PlantState
    horizon: int
    circuits: dict[str, Gate] = field(default_factory=dict)
    inputs: dict[str, float] = field(default_factory=dict)
    probes: dict[str, Gate] = field(default_factory=dict)
    halt_on_violation: bool = False


def parse_scenario(text: str) -> Scenario:
    cfg = PlantConfig()
    state = PlantState()
    horizon = 100
    circuits: dict[str, str] = {}
    probes: dict[str, str] = {}
    inputs: dict[str, float] = {}
    plates: list[tuple[str, str, float, str]] = []
    halt = False
    state_sets: dict[str, float] = {}
    cfg_sets: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split(None, 1)
        key, rest = words[0], (words[1] if len(words) > 1 else "")
        try:
            if key == "horizon":
                horizon = int(rest)
            elif key == "halt_on_violation":
                halt = rest.strip() in ("1", "true", "yes")
            elif key == "config":
                k, v = rest.split(None, 1)
                cfg_sets[k] = float(v)
            elif key == "state":
                k, v = rest.split(None, 1)
                state_sets[k] = float(v)
            elif key == "plate":
                parts = rest.split()
                ident = parts[0]
                at = parts[parts.index("at") + 1]
                angle = float(parts[parts.index("angle") + 1]) if "angle" in parts else 0.0
                pstate = parts[parts.index("state") + 1] if "state" in parts else "unbearbeitet"
                plates.append((ident, at, angle, pstate))
            elif key == "input":
                k, v = rest.split(None, 1)
                inputs[k] = float(v)
            elif key == "circuit":
                k, v = rest.split(None, 1)
                if k not in ACTUATORS:
                    raise ParseError(f"unknown actuator {k!r}")
                circuits[k] = v
            elif key == "probe":
                k, v = rest.split(None, 1)
                probes[k] = v
            else:
                raise ParseError(f"unknown scenario directive {key!r}")
        except (ValueError, IndexError) as e:
            raise ParseError(f"bad scenario line: {raw.strip()!r}", line=lineno) from e
    for k, v in cfg_sets.items():
        if not hasattr(cfg, k):
            raise ParseError(f"unknown config field {k!r}")
        setattr(cfg, k, v)
    for k, v in state_sets.items():
        if not hasattr(state, k):
            raise ParseError(f"unknown state field {k!r}")
        setattr(state, k, v)
    points = {"d1": cfg.d1, "d2": cfg.d2, "d3": cfg.d3, "d4": cfg.d4,
              "d5": cfg.d5, "d6": cfg.d6, "d7": cfg.d7}
    for ident, at, angle, pstate in plates:
        if at not in points:
            raise ParseError(f"unknown point {at!r}")
        x, y, _ = points[at]
        z = state.table_height if at == "d3" else points[at][2]
        state.plates.append(Plate(ident, (x, y, z), angle, pstate))
    sig = Signature()
    sc = Scenario(cfg, state, horizon, halt_on_violation=halt, inputs=inputs)
    for k, v in circuits.items():
        sc.circuits[k] = from_output_term(parse_term(v, sig, lenient=True), geometry=cfg.geometry)
    for k, v in probes.items():
        sc.probes[k] = from_output_term(parse_term(v, sig, lenient=True), geometry=cfg.geometry)
    return sc


def load_scenario(path: str) -> Scenario:
    with open(path, "r", encoding="ascii") as fh:
        return parse_scenario(fh.read())
