"""Executable discrete-time model of the production cell.

Machines: press, two-armed robot (arm 2 offset 90 degrees from arm 1),
lift-rotate table, feed and deposit belts.  Continuous behavior integrates
rate * dt per step, clamped at travel limits; under constant actuation a
controlled quantity approaches its target monotonically and stops within
one step of it.  Plates obey gravity when not held, move only when a
machine moves them, and are processed exactly during a press stroke.

Ten runtime safety monitors watch the cell's operating requirements:
violations are recorded, never thrown.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

from .circuit import Gate, Trace, evaluate
from .terms import App, Term

XY = tuple[float, float]
XYZ = tuple[float, float, float]


def dist_xy(a: XYZ | XY, b: XYZ | XY) -> float:
    return math.hypot(b[0] - a[0], b[1] - a[1])


def winkel_xy(a: XYZ | XY, b: XYZ | XY) -> float:
    """Angle of the segment a->b against the zero direction, in degrees,
    normalized to [0, 360)."""
    deg = math.degrees(math.atan2(b[1] - a[1], b[0] - a[0]))
    return deg % 360.0


def polar(center: XYZ, radius: float, angle_deg: float, z: float) -> XYZ:
    rad = math.radians(angle_deg)
    return (center[0] + radius * math.cos(rad), center[1] + radius * math.sin(rad), z)


@dataclass
class PlantConfig:
    d1: XYZ = (-2.0, 1.5, 0.4)   # feed belt start
    d2: XYZ = (-1.2, 1.5, 0.4)   # feed belt end
    d3: XYZ = (0.0, 0.0, 0.0)    # table center (z varies)
    d4: XYZ = (0.0, 0.0, 0.0)    # robot column
    d5: XYZ = (0.0, 0.0, 0.0)    # press center
    d6: XYZ = (1.5, -1.0, 0.3)   # deposit belt start
    d7: XYZ = (2.5, -1.0, 0.3)   # deposit belt end
    maxlg1: float = 1.2
    maxlg2: float = 1.2
    minlg1: float = 0.5
    minlg2: float = 0.5
    zh_oben: float = 0.6
    zh_unten: float = 0.2
    zp_oben: float = 1.0
    zp_mitte: float = 0.6
    zp_unten: float = 0.3
    arm_rate: float = 0.2        # length units per second
    rot_rate: float = 30.0       # degrees per second
    press_rate: float = 0.35
    table_lift_rate: float = 0.2
    table_rot_rate: float = 45.0
    belt_rate: float = 0.4
    dt: float = 0.1

    def __post_init__(self) -> None:
        # default layout: table at angle 150 distance 1, press at 270/0.8
        if self.d3 == (0.0, 0.0, 0.0):
            self.d3 = polar(self.d4, 1.0, 150.0, self.zh_oben)
        if self.d5 == (0.0, 0.0, 0.0):
            self.d5 = polar(self.d4, 0.8, 270.0, self.zp_mitte)

    @property
    def eps(self) -> float:
        return max(self.arm_rate, self.belt_rate, self.table_lift_rate, self.press_rate) * self.dt

    def geometry(self, term: Term) -> float:
        """Valuation of build-time geometry expressions in circuit terms."""
        if isinstance(term, App):
            name = term.sym.name
            points = {"d1": self.d1, "d2": self.d2, "d3": self.d3, "d4": self.d4,
                      "d5": self.d5, "d6": self.d6, "d7": self.d7}
            if name in ("dxy", "dist_xy") and len(term.args) == 2:
                a, b = (self._point(x, points) for x in term.args)
                return dist_xy(a, b)
            if name in ("wxy", "winkel_xy") and len(term.args) == 2:
                a, b = (self._point(x, points) for x in term.args)
                return winkel_xy(a, b)
            consts = {"mx1": self.maxlg1, "mx2": self.maxlg2, "mn1": self.minlg1,
                      "mn2": self.minlg2, "zho": self.zh_oben, "zhu": self.zh_unten,
                      "zpo": self.zp_oben, "zpm": self.zp_mitte, "zpu": self.zp_unten}
            if name in consts and not term.args:
                return consts[name]
        raise KeyError(term)

    def _point(self, term: Term, points: dict[str, XYZ]) -> XYZ:
        from .terms import Var

        name = term.sym.name if isinstance(term, App) and not term.args else (
            term.name if isinstance(term, Var) else None
        )
        if name in points:
            return points[name]
        raise KeyError(term)


UNPROCESSED = "unbearbeitet"
PROCESSED = "bearbeitet"


@dataclass
class Plate:
    ident: str
    pos: XYZ
    angle: float
    state: str = UNPROCESSED
    held_by: str = "none"  # none | arm1 | arm2 | gripper


@dataclass
class PlantState:
    time: float = 0.0
    press_height: float = 0.6
    arm1_len: float = 1.0
    arm2_len: float = 0.5
    angle: float = 150.0          # arm 1; arm 2 is angle + 90
    table_height: float = 0.6
    table_angle: float = 60.0
    feed_running: bool = False
    deposit_running: bool = False
    plates: list[Plate] = field(default_factory=list)

    def pos1(self, cfg: PlantConfig) -> XYZ:
        return polar(cfg.d4, self.arm1_len, self.angle, cfg.zp_mitte)

    def pos2(self, cfg: PlantConfig) -> XYZ:
        return polar(cfg.d4, self.arm2_len, (self.angle + 90.0) % 360.0, cfg.zp_unten)


@dataclass
class Violation:
    step: int
    time: float
    rule: int
    message: str


ACTUATORS = (
    "fa1", "fe1", "fa2", "fe2", "gr1", "gr2", "drv", "drz",
    "press_up", "press_down", "table_up", "table_down", "table_fwd", "table_back",
    "feed_run", "deposit_run",
)


def _toward(value: float, delta: float, lo: float, hi: float) -> float:
    return min(hi, max(lo, value + delta))


def surface_height(state: PlantState, cfg: PlantConfig, xy: XY, skip: Optional[Plate] = None) -> Optional[float]:
    """Height of the working surface at a plan position, if any."""
    if dist_xy(xy, cfg.d3) <= 3 * cfg.eps:
        return state.table_height
    if dist_xy(xy, cfg.d5) <= 3 * cfg.eps:
        return state.press_height
    for seg in ((cfg.d1, cfg.d2), (cfg.d6, cfg.d7)):
        if _on_segment(xy, seg, 3 * cfg.eps):
            return seg[0][2]
    return None


def _on_segment(xy: XY, seg: tuple[XYZ, XYZ], eps: float) -> bool:
    (x1, y1, _), (x2, y2, _) = seg
    px, py = xy[0], xy[1]
    L2 = (x2 - x1) ** 2 + (y2 - y1) ** 2
    if L2 == 0:
        return math.hypot(px - x1, py - y1) <= eps
    t = ((px - x1) * (x2 - x1) + (py - y1) * (y2 - y1)) / L2
    t = max(0.0, min(1.0, t))
    cx, cy = x1 + t * (x2 - x1), y1 + t * (y2 - y1)
    return math.hypot(px - cx, py - cy) <= eps


def step(state: PlantState, cfg: PlantConfig, act: dict[str, float]) -> PlantState:
    """One dt of plant motion under the given actuator values (0/1)."""
    on = lambda k: act.get(k, 0) == 1
    s = replace(state, plates=[replace(p) for p in state.plates])
    s.time = round(state.time + cfg.dt, 9)
    if on("drv") != on("drz"):
        delta = cfg.rot_rate * cfg.dt * (1 if on("drv") else -1)
        s.angle = _toward(s.angle, delta, 90.0, 360.0)
    if on("fa1") != on("fe1"):
        delta = cfg.arm_rate * cfg.dt * (1 if on("fa1") else -1)
        s.arm1_len = _toward(s.arm1_len, delta, cfg.minlg1, cfg.maxlg1)
    if on("fa2") != on("fe2"):
        delta = cfg.arm_rate * cfg.dt * (1 if on("fa2") else -1)
        s.arm2_len = _toward(s.arm2_len, delta, cfg.minlg2, cfg.maxlg2)
    if on("press_up") != on("press_down"):
        delta = cfg.press_rate * cfg.dt * (1 if on("press_up") else -1)
        s.press_height = _toward(s.press_height, delta, cfg.zp_unten, cfg.zp_oben)
    if on("table_up") != on("table_down"):
        delta = cfg.table_lift_rate * cfg.dt * (1 if on("table_up") else -1)
        s.table_height = _toward(s.table_height, delta, cfg.zh_unten, cfg.zh_oben)
    if on("table_fwd") != on("table_back"):
        delta = cfg.table_rot_rate * cfg.dt * (1 if on("table_fwd") else -1)
        s.table_angle = _toward(s.table_angle, delta, 0.0, 360.0)
    s.feed_running = on("feed_run")
    s.deposit_running = on("deposit_run")

    grab_eps = 2 * cfg.eps
    for p in s.plates:
        if p.held_by == "arm1":
            if on("gr1"):
                p.pos = s.pos1(cfg)
                p.angle = (s.angle - 90.0) % 360.0
            else:
                p.held_by = "none"
                # the plate settles on whatever surface is below
                h = surface_height(s, cfg, p.pos[:2], skip=p)
                p.pos = (p.pos[0], p.pos[1], h if h is not None else 0.0)
        elif p.held_by == "arm2":
            if on("gr2"):
                p.pos = s.pos2(cfg)
                p.angle = (s.angle + 90.0 - 90.0) % 360.0
            else:
                p.held_by = "none"
                h = surface_height(s, cfg, p.pos[:2], skip=p)
                p.pos = (p.pos[0], p.pos[1], h if h is not None else 0.0)
    if on("gr1") and not any(p.held_by == "arm1" for p in s.plates):
        tip = s.pos1(cfg)
        for p in s.plates:
            if p.held_by != "none":
                continue
            if dist_xy(p.pos, tip) <= grab_eps and abs(p.pos[2] - tip[2]) <= grab_eps and \
                    _angles_close(p.angle, s.angle - 90.0, cfg.rot_rate * cfg.dt):
                p.held_by = "arm1"
                p.pos = tip
                break
    if on("gr2") and not any(p.held_by == "arm2" for p in s.plates):
        tip = s.pos2(cfg)
        for p in s.plates:
            if p.held_by != "none":
                continue
            if dist_xy(p.pos, tip) <= grab_eps and abs(p.pos[2] - tip[2]) <= grab_eps and \
                    _angles_close(p.angle, s.angle + 90.0 - 90.0, cfg.rot_rate * cfg.dt):
                p.held_by = "arm2"
                p.pos = tip
                break

    # belts transport free plates lying on them
    for p in s.plates:
        if p.held_by != "none":
            continue
        for running, seg in ((s.feed_running, (cfg.d1, cfg.d2)),
                             (s.deposit_running, (cfg.d6, cfg.d7))):
            if running and _on_segment(p.pos[:2], seg, 2 * cfg.eps):
                dx, dy = seg[1][0] - seg[0][0], seg[1][1] - seg[0][1]
                L = math.hypot(dx, dy)
                if L > 0:
                    adv = min(cfg.belt_rate * cfg.dt, L - _progress(p.pos[:2], seg))
                    p.pos = (p.pos[0] + dx / L * adv, p.pos[1] + dy / L * adv, p.pos[2])

    # free plates ride the working surface below them (table, press bed)
    for p in s.plates:
        if p.held_by != "none":
            continue
        if dist_xy(p.pos, cfg.d3) <= 3 * cfg.eps:
            p.pos = (p.pos[0], p.pos[1], s.table_height)
            p.angle = (p.angle + (s.table_angle - state.table_angle)) % 360.0
        elif dist_xy(p.pos, cfg.d5) <= 3 * cfg.eps:
            p.pos = (p.pos[0], p.pos[1], s.press_height)

    # the press processes an aligned unprocessed plate at the top position
    if s.press_height >= cfg.zp_oben - 1e-9:
        for p in s.plates:
            if (
                p.held_by == "none"
                and p.state == UNPROCESSED
                and dist_xy(p.pos, cfg.d5) <= 3 * cfg.eps
                and _angles_close(p.angle, 180.0, 1.0)
            ):
                p.state = PROCESSED
    return s


def _progress(xy: XY, seg: tuple[XYZ, XYZ]) -> float:
    (x1, y1, _), (x2, y2, _) = seg
    return math.hypot(xy[0] - x1, xy[1] - y1)


def _angles_close(a: float, b: float, tol: float) -> bool:
    d = abs((a - b) % 360.0)
    return min(d, 360.0 - d) <= tol + 1e-9


def read_sensors(state: PlantState, cfg: PlantConfig) -> dict[str, float]:
    """Sensor channels: arm lengths and angle, press position booleans,
    table booleans and angle, belt end photocells."""
    eps = cfg.eps
    end_feed = any(
        p.held_by == "none" and dist_xy(p.pos, cfg.d2) <= 2 * eps for p in state.plates
    )
    end_dep = any(
        p.held_by == "none" and dist_xy(p.pos, cfg.d7) <= 2 * eps for p in state.plates
    )
    return {
        "rob_s1": state.arm1_len,
        "rob_s2": state.arm2_len,
        "rob_s3": state.angle,
        "prs_s1": 1.0 if abs(state.press_height - cfg.zp_unten) <= eps else 0.0,
        "prs_s2": 1.0 if abs(state.press_height - cfg.zp_mitte) <= eps else 0.0,
        "prs_s3": 1.0 if abs(state.press_height - cfg.zp_oben) <= eps else 0.0,
        "hub_s1": 1.0 if abs(state.table_height - cfg.zh_unten) <= eps else 0.0,
        "hub_s2": 1.0 if abs(state.table_height - cfg.zh_oben) <= eps else 0.0,
        "hub_s3": state.table_angle,
        "feed_s1": 1.0 if end_feed else 0.0,
        "dep_s1": 1.0 if end_dep else 0.0,
    }


def check_safety(
    state: PlantState,
    cfg: PlantConfig,
    act: dict[str, float],
    stepno: int,
) -> list[Violation]:
    """The runtime monitors for the cell's safety requirements 1..10."""
    out: list[Violation] = []
    eps = cfg.eps
    on = lambda k: act.get(k, 0) == 1

    def arm_in_press(length: float, angle: float) -> bool:
        pos = polar(cfg.d4, length, angle, 0.0)
        return dist_xy(pos, cfg.d5) <= 4 * eps

    arm1_in = arm_in_press(state.arm1_len, state.angle)
    arm2_in = arm_in_press(state.arm2_len, state.angle + 90.0)
    if on("press_down") and (arm1_in or arm2_in):
        out.append(Violation(stepno, state.time, 1, "press closing with a robot arm inside"))
    press_parked = (
        abs(state.press_height - cfg.zp_mitte) <= eps
        or abs(state.press_height - cfg.zp_unten) <= eps
    )
    if (arm1_in or arm2_in) and not press_parked:
        out.append(Violation(stepno, state.time, 2, "arm in the press zone while the press is not in an admissible position"))
    if state.angle < 90.0 - 1e-9 or state.angle > 360.0 + 1e-9:
        out.append(Violation(stepno, state.time, 3, "rotation beyond the allowed range"))
    for name, value, lo, hi in (
        ("arm1", state.arm1_len, cfg.minlg1, cfg.maxlg1),
        ("arm2", state.arm2_len, cfg.minlg2, cfg.maxlg2),
        ("press", state.press_height, cfg.zp_unten, cfg.zp_oben),
        ("table", state.table_height, cfg.zh_unten, cfg.zh_oben),
    ):
        if value < lo - 1e-9 or value > hi + 1e-9:
            out.append(Violation(stepno, state.time, 4, f"{name} moved past its travel limit"))
    if state.table_height < cfg.zh_unten - 1e-9:
        out.append(Violation(stepno, state.time, 5, "table below belt level"))
    if (on("table_fwd") or on("table_back")) and state.table_height < cfg.zh_oben - eps:
        out.append(Violation(stepno, state.time, 5, "table rotating while low"))
    # 6 concerns the handling device, which is modeled only as a plate
    # source/sink; its collision monitor has nothing to check here.
    for p in state.plates:
        if p.held_by == "arm1" and not on("gr1") or p.held_by == "arm2" and not on("gr2"):
            h = surface_height(state, cfg, p.pos[:2], skip=p)
            if h is None or p.pos[2] - h > 2 * eps:
                out.append(Violation(stepno, state.time, 7, "magnet released with no surface close below"))
    if on("deposit_run"):
        for p in state.plates:
            if p.held_by == "none" and dist_xy(p.pos, cfg.d7) <= 2 * eps:
                out.append(Violation(stepno, state.time, 8, "deposit belt moving while its pickup area is occupied"))
                break
    if on("feed_run"):
        aligned = abs(state.table_height - cfg.zh_unten) <= eps
        occupied = any(
            p.held_by == "none" and dist_xy(p.pos, cfg.d3) <= 3 * eps for p in state.plates
        )
        near_end = any(
            p.held_by == "none" and dist_xy(p.pos, cfg.d2) <= 2 * eps for p in state.plates
        )
        if near_end and (not aligned or occupied):
            out.append(Violation(stepno, state.time, 9, "feed belt delivering while the table is misaligned or occupied"))
        if occupied and near_end:
            out.append(Violation(stepno, state.time, 10, "feed belt transporting while the table is not empty"))
    return out


@dataclass
class ClosedLoopResult:
    trace: Trace
    states: list[PlantState]
    violations: list[Violation]


def run_closed_loop(
    cfg: PlantConfig,
    initial: PlantState,
    circuits: dict[str, Gate],
    horizon: int,
    inputs: Optional[dict[str, Callable[[int], float]]] = None,
    extra_probes: Optional[dict[str, Gate]] = None,
    halt_on_violation: bool = False,
) -> ClosedLoopResult:
    """Per step: read sensors, evaluate the bound circuits on the trace so
    far, apply the actuator values, advance the plant; monitors run every
    step and record violations."""
    inputs = inputs or {}
    extra_probes = extra_probes or {}
    state = initial
    states = [state]
    names = sorted(
        set(read_sensors(state, cfg)) | set(inputs) | {"step"}
    )
    rows: dict[str, list[float]] = {n: [] for n in names}
    probe_rows: dict[str, list[float]] = {n: [] for n in set(circuits) | set(extra_probes)}
    violations: list[Violation] = []
    for stepno in range(horizon):
        sensors = read_sensors(state, cfg)
        for n in names:
            if n == "step":
                rows[n].append(float(stepno))
            elif n in sensors:
                rows[n].append(sensors[n])
            else:
                rows[n].append(inputs[n](stepno))
        trace = Trace(stepno + 1, {n: rows[n] for n in names})
        act: dict[str, float] = {}
        memo: dict[int, list] = {}
        for chan, gate in circuits.items():
            act[chan] = float(evaluate(gate, trace, memo)[-1])
        for chan, gate in extra_probes.items():
            probe_rows[chan].append(float(evaluate(gate, trace, memo)[-1]))
        for chan, gate in circuits.items():
            probe_rows[chan].append(act[chan])
        violations.extend(check_safety(state, cfg, act, stepno))
        if violations and halt_on_violation:
            break
        state = step(state, cfg, act)
        states.append(state)
    full = {n: rows[n] for n in names}
    for n, vals in probe_rows.items():
        full[f"out_{n}"] = vals + [0.0] * (len(rows["step"]) - len(vals))
    return ClosedLoopResult(Trace(len(rows["step"]), full), states, violations)


def predict_event_time(
    state: PlantState, cfg: PlantConfig, event: str, target: float
) -> float:
    """Earliest time at which constant actuation reaches the target."""
    now = state.time
    if event in ("trv1", "trv2"):
        angle = state.angle if event == "trv1" else (state.angle + 90.0) % 360.0
        if not angle - 1e-9 <= target <= (270.0 if event == "trv1" else 360.0) + 1e-9:
            raise ValueError(f"target angle {target} out of range for {event}")
        return now + (target - angle) / cfg.rot_rate
    if event in ("trz1", "trz2"):
        angle = state.angle if event == "trz1" else (state.angle + 90.0) % 360.0
        if not (90.0 if event == "trz1" else 180.0) - 1e-9 <= target <= angle + 1e-9:
            raise ValueError(f"target angle {target} out of range for {event}")
        return now + (angle - target) / cfg.rot_rate
    if event in ("tra1", "tra2", "tre1", "tre2"):
        length = state.arm1_len if event.endswith("1") else state.arm2_len
        lo = cfg.minlg1 if event.endswith("1") else cfg.minlg2
        hi = cfg.maxlg1 if event.endswith("1") else cfg.maxlg2
        if event.startswith("tra"):
            if not length - 1e-9 <= target <= hi + 1e-9:
                raise ValueError(f"target length {target} out of range for {event}")
            return now + (target - length) / cfg.arm_rate
        if not lo - 1e-9 <= target <= length + 1e-9:
            raise ValueError(f"target length {target} out of range for {event}")
        return now + (length - target) / cfg.arm_rate
    raise ValueError(f"unknown event {event!r}")
