"""Constructive planner for the frozen gadget geometries.

Every builder here assembles a gadget from explicit constants (derived once
with the bounce planner below) and then proves it by simulation: the
extracted gate matrix must equal the reference gate and the scaffold alone
must recur byte-identically.  A builder raising GadgetError means a frozen
constant was corrupted, not a runtime condition to handle.

Planner kinematics, for reference when reading the constants:
  * a lone signal at local cell (x,y,z) of its current block moves to the
    antipodal cell, i.e. with velocity 1-2*coordinate per axis;
  * a wall bounce during one step freezes the wall-normal coordinate,
    advances the other two, and reverses the normal velocity afterwards;
  * a signal and a wall face interact only when the signal sits in the
    face-adjacent layer of the same partition block, so bounce timing is
    controlled by the anchor parities of the wall cube.
"""
from __future__ import annotations

from . import block_space as bs
from .gadgets import (
    CNOT_GATE,
    CPHASE_GATE,
    CZ_GATE,
    Gadget,
    GadgetError,
    HADAMARD_GATE,
    LogicalQubit,
    PHASE_GATE,
    TrackRef,
    extract_gate_matrix,
    gate_distance,
    scaffold_is_stable,
    transform_gadget,
)
from .scattering import ScatteringOperator

Cell = tuple[int, int, int]

GATE_TOL = 1e-9


def _add(a: Cell, b: Cell) -> Cell:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def _scale(v: Cell, k: int) -> Cell:
    return (v[0] * k, v[1] * k, v[2] * k)


def block_corner(pos: Cell, t: int) -> Cell:
    o = t & 1
    return tuple(((c - o) >> 1) * 2 + o for c in pos)


def plan_bounce(pos: Cell, t: int, v: Cell, axis: int):
    """Wall cube for a bounce during step t -> t+1, and the state after it.

    The signal must be ballistically placed (about to move with velocity v
    inside its current block); the planner puts the 2x2x2 cube so that its
    near face fills the block layer the signal is heading into.  The anchor
    parity that makes the cube bounce-active at this step's partition comes
    out automatically.
    """
    corner = block_corner(pos, t)
    local = tuple(p - c for p, c in zip(pos, corner))
    expected = tuple(0 if vc > 0 else 1 for vc in v)
    if local != expected:
        raise GadgetError(
            f"signal at {pos} (t={t}) is not ballistic for velocity {v}"
        )
    face_layer = corner[axis] + (1 - local[axis])
    beyond = face_layer + v[axis]
    cube = []
    for i in (0, 1):
        for j in (0, 1):
            c = [corner[0], corner[1], corner[2]]
            c[axis] = min(face_layer, beyond)
            span = [a for a in range(3) if a != axis]
            c[span[0]] += i
            c[span[1]] += j
            cube.append(tuple(c))
            c2 = list(c)
            c2[axis] += 1
            cube.append(tuple(c2))
    new_pos = tuple(
        p + (0 if k == axis else v[k]) for k, p in enumerate(pos)
    )
    new_v = tuple(-vc if k == axis else vc for k, vc in enumerate(v))
    return tuple(sorted(set(cube))), (new_pos, new_v)


class TrackPlan:
    """Trajectory of one signal through a bounce schedule."""

    def __init__(self, anchor: Cell, t0: int, v: Cell, schedule, t_end: int):
        self.positions: dict[int, Cell] = {t0: anchor}
        self.velocities: dict[int, Cell] = {t0: v}
        self.cubes: list[tuple[Cell, ...]] = []
        sched = dict(schedule)
        pos, vel = anchor, v
        for t in range(t0, t_end):
            if t in sched:
                cube, (pos, vel) = plan_bounce(pos, t, vel, sched.pop(t))
                self.cubes.append(cube)
            else:
                pos = _add(pos, vel)
            self.positions[t + 1] = pos
            self.velocities[t + 1] = vel
        if sched:
            raise GadgetError(f"unused bounce times {sorted(sched)}")

    def at(self, t: int) -> Cell:
        return self.positions[t]

    def v_at(self, t: int) -> Cell:
        return self.velocities[t]

    def all_cube_cells(self):
        return [c for cube in self.cubes for c in cube]


def _assert_tracks_clear(plan: TrackPlan, cells) -> None:
    occupied = set(cells)
    for t, p in plan.positions.items():
        if p in occupied:
            raise GadgetError(f"track collides with scaffold cell {p} at t={t}")


def _assert_crossing(a: TrackPlan, b: TrackPlan, t: int) -> None:
    pa, pb = a.at(t), b.at(t)
    if block_corner(pa, t) != block_corner(pb, t):
        raise GadgetError(f"planned crossing at t={t} misses: {pa} vs {pb}")
    if sum(1 for k in range(3) if pa[k] != pb[k]) != 2:
        raise GadgetError(f"crossing at t={t} is not a diagonal pair: {pa} vs {pb}")


def _verify(g: Gadget, op: ScatteringOperator, reference, stability_steps: int) -> Gadget:
    if not scaffold_is_stable(g, stability_steps, op):
        raise GadgetError(f"{g.name}: scaffold is not stable")
    got = extract_gate_matrix(g, op)
    dist = gate_distance(got, reference)
    if dist > GATE_TOL:
        raise GadgetError(f"{g.name}: extracted gate off by {dist:g}")
    return g


# --- Hadamard ----------------------------------------------------------------
# Scatter block [0,2)^3 at t=2.  The stable barrier half inside the block is
# the canonical barrier; the companion wall above-far redirects the incoming
# track1 signal down onto the dislocated input cell, and the wall below the
# exits redirects the |0> output up, parallel to the |1> output.

_H_SLAB = ((0, 0, -1), (1, 0, -1), (0, 0, 0), (1, 0, 0))
_H_WALL_IN = tuple(
    (x, y, z) for x in (-1, 0) for y in (1, 2) for z in (2, 3)
)
_H_WALL_OUT = tuple(
    (x, y, z) for x in (1, 2) for y in (-2, -1) for z in (1, 2)
)
_H_IN_DIR = (1, -1, 1)
_H_OUT_DIR = (1, 1, 1)


def build_hadamard(op: ScatteringOperator) -> Gadget:
    cells = tuple(sorted(_H_SLAB + _H_WALL_IN + _H_WALL_OUT))
    g = Gadget(
        name="hadamard",
        cells=cells,
        inputs=(
            LogicalQubit(
                qid=0,
                track0=TrackRef((-2, 3, -2), _H_IN_DIR, "track0"),
                track1=TrackRef((-2, 3, 0), _H_IN_DIR, "track1"),
                time=0,
            ),
        ),
        outputs=(
            LogicalQubit(
                qid=0,
                track0=TrackRef((2, 0, 2), _H_OUT_DIR, "track0"),
                track1=TrackRef((2, 2, 2), _H_OUT_DIR, "track1"),
                time=4,
            ),
        ),
        latency=4,
        meta=(
            ("scatter_block", (0, 0, 0)),
            ("scatter_time", 2),
            ("track_separation_in", (0, 0, 2)),
            ("track_separation_out", (0, 2, 0)),
        ),
    )
    return _verify(g, op, HADAMARD_GATE, 16)


# --- crossing (controlled phase) ----------------------------------------------
# Two qubits co-moving in x, head-on in y and z; only the two track1 signals
# share a block (at t=2, as a diagonal pair), so exactly the |11> branch
# picks up the exp(i*pi/4) phase.  No walls at all; routing is the gadget.

def build_crossing(op: ScatteringOperator) -> Gadget:
    g = Gadget(
        name="cphase",
        cells=(),
        inputs=(
            LogicalQubit(
                qid=0,
                track0=TrackRef((0, -2, -2), (1, 1, 1), "track0"),
                track1=TrackRef((-2, -2, -2), (1, 1, 1), "track1"),
                time=0,
            ),
            LogicalQubit(
                qid=1,
                track0=TrackRef((-4, 3, 3), (1, -1, -1), "track0"),
                track1=TrackRef((-2, 3, 3), (1, -1, -1), "track1"),
                time=0,
            ),
        ),
        outputs=(
            LogicalQubit(
                qid=0,
                track0=TrackRef((4, 2, 2), (1, 1, 1), "track0"),
                track1=TrackRef((2, 2, 2), (1, 1, 1), "track1"),
                time=4,
            ),
            LogicalQubit(
                qid=1,
                track0=TrackRef((0, -1, -1), (1, -1, -1), "track0"),
                track1=TrackRef((2, -1, -1), (1, -1, -1), "track1"),
                time=4,
            ),
        ),
        latency=4,
        meta=(("crossing_block", (0, 0, 0)), ("crossing_time", 2)),
    )
    return _verify(g, op, CPHASE_GATE, 8)


# --- four-crossing dance (controlled-Z) ---------------------------------------
# The two track1 signals cross four times; between crossings each reverses
# its transverse velocity with one y-wall and one z-wall per interval.  The
# control's track0 flies straight far off the dance corridor; the target's
# track0 mirrors the dance two cells behind in x (its own wall set) so the
# target qubit stays parallel and synchronized for downstream composition.

_CZ_CROSSINGS = (2, 10, 18, 26)
_CZ_END = 28
_CZ_A1_ANCHOR = (-2, -2, -2)
_CZ_B1_ANCHOR = (-2, 3, 3)
_CZ_A0_OFFSET = (0, -8, 8)   # control track0: clear of the corridor
_CZ_B_SEP = (2, 0, 0)        # target track1 = track0 + this
_CZ_A_SCHED = ((5, 2), (7, 1), (13, 1), (15, 2), (21, 2), (23, 1))
_CZ_B_SCHED = ((5, 1), (7, 2), (13, 2), (15, 1), (21, 1), (23, 2))


def _cz_plans():
    a1 = TrackPlan(_CZ_A1_ANCHOR, 0, (1, 1, 1), _CZ_A_SCHED, _CZ_END)
    b1 = TrackPlan(_CZ_B1_ANCHOR, 0, (1, -1, -1), _CZ_B_SCHED, _CZ_END)
    b0 = TrackPlan(
        _add(_CZ_B1_ANCHOR, _scale(_CZ_B_SEP, -1)),
        0,
        (1, -1, -1),
        _CZ_B_SCHED,
        _CZ_END,
    )
    for t in _CZ_CROSSINGS:
        _assert_crossing(a1, b1, t)
    return a1, b1, b0


def build_cz(op: ScatteringOperator) -> Gadget:
    a1, b1, b0 = _cz_plans()
    cells = tuple(
        sorted(set(a1.all_cube_cells() + b1.all_cube_cells() + b0.all_cube_cells()))
    )
    for plan in (a1, b1, b0):
        _assert_tracks_clear(plan, cells)
    a0_anchor = _add(_CZ_A1_ANCHOR, _CZ_A0_OFFSET)
    g = Gadget(
        name="cz",
        cells=cells,
        inputs=(
            LogicalQubit(
                qid=0,
                track0=TrackRef(a0_anchor, (1, 1, 1), "track0"),
                track1=TrackRef(_CZ_A1_ANCHOR, (1, 1, 1), "track1"),
                time=0,
            ),
            LogicalQubit(
                qid=1,
                track0=TrackRef(b0.at(0), (1, -1, -1), "track0"),
                track1=TrackRef(_CZ_B1_ANCHOR, (1, -1, -1), "track1"),
                time=0,
            ),
        ),
        outputs=(
            LogicalQubit(
                qid=0,
                track0=TrackRef(
                    _add(a0_anchor, _scale((1, 1, 1), _CZ_END)), (1, 1, 1), "track0"
                ),
                track1=TrackRef(a1.at(_CZ_END), a1.v_at(_CZ_END), "track1"),
                time=_CZ_END,
            ),
            LogicalQubit(
                qid=1,
                track0=TrackRef(b0.at(_CZ_END), b0.v_at(_CZ_END), "track0"),
                track1=TrackRef(b1.at(_CZ_END), b1.v_at(_CZ_END), "track1"),
                time=_CZ_END,
            ),
        ),
        latency=_CZ_END,
        meta=(("crossing_times", _CZ_CROSSINGS),),
    )
    return _verify(g, op, CZ_GATE, 8)


# --- composition solver --------------------------------------------------------

def attachment_solutions(out_q: LogicalQubit, in_q: LogicalQubit, d_min: int = 0):
    """Transforms placing a gadget so its input tracks continue out_q's.

    Yields (rotation index, even translation, even time offset) with the
    smallest flight slack first.  Rotations are about block centres, so the
    attached gadget keeps its internal partition phases.
    """
    out_dir = out_q.track0.direction
    sols = []
    for ri, mat in enumerate(bs.ROTATION_MATRICES):
        if bs.rotate_vector(mat, in_q.track0.direction) != out_dir:
            continue
        if bs.rotate_vector(mat, in_q.separation) != out_q.separation:
            continue
        from .gadgets import rotate_point

        base = rotate_point(mat, in_q.track0.anchor)
        u0 = tuple(o - b for o, b in zip(out_q.track0.anchor, base))
        parities = {(u0[k] % 2) for k in range(3)}
        if len(parities) != 1:
            continue
        d_parity = next(iter(parities))
        dt_parity = (out_q.time - in_q.time) % 2
        if d_parity != dt_parity:
            continue
        d = d_min + ((d_parity - d_min) % 2)
        u = tuple(u0[k] + d * out_dir[k] for k in range(3))
        dt = out_q.time + d - in_q.time
        sols.append((d, ri, u, dt))
    for d, ri, u, dt in sorted(sols):
        yield ri, u, dt


def attach(proto: Gadget, out_q: LogicalQubit, which_input: int = 0, d_min: int = 0) -> Gadget:
    """Place proto so that its input port continues the given output qubit."""
    for ri, u, dt in attachment_solutions(out_q, proto.inputs[which_input], d_min):
        return transform_gadget(proto, ri, u, dt)
    raise GadgetError(
        f"no parity-consistent attachment of {proto.name} to the given port"
    )


def chain_single_qubit(op: ScatteringOperator, first: Gadget, proto: Gadget, d_min: int = 0) -> Gadget:
    """Serial composition of single-qubit gadgets along one logical line."""
    second = attach(proto, first.outputs[0], 0, d_min)
    overlap = set(first.cells) & set(second.cells)
    if overlap:
        raise GadgetError(f"chained gadgets overlap at {sorted(overlap)[:4]}")
    return Gadget(
        name=f"{first.name}+{second.name}",
        cells=tuple(sorted(first.cells + second.cells)),
        inputs=first.inputs,
        outputs=second.outputs,
        latency=second.outputs[0].time - first.inputs[0].time,
        meta=(),
    )


# --- controlled-NOT -------------------------------------------------------------
# (I (x) H) . cR(pi/4)^4 . (I (x) H) on the target qubit: a Hadamard feeds the
# dance, whose target output feeds a second Hadamard.  The control qubit flies
# through the dance only.

def build_cnot(op: ScatteringOperator) -> Gadget:
    h = build_hadamard(op)
    cz_proto = build_cz(op)

    # Hadamard variant whose output format matches the dance's target input.
    hpre = None
    for ri, mat in enumerate(bs.ROTATION_MATRICES):
        out_dir = bs.rotate_vector(mat, h.outputs[0].track0.direction)
        out_sep = bs.rotate_vector(mat, h.outputs[0].separation)
        if out_dir == cz_proto.inputs[1].track0.direction and out_sep == cz_proto.inputs[1].separation:
            hpre = transform_gadget(h, ri, (0, 0, 0), 0)
            break
    if hpre is None:
        raise GadgetError("no Hadamard orientation feeds the dance target input")

    dance = attach(cz_proto, hpre.outputs[0], which_input=1, d_min=0)
    hpost = attach(h, dance.outputs[1], which_input=0, d_min=0)

    t_end = hpost.outputs[0].time
    # Control ports: extend the dance's control lines to the composite window.
    a_in = dance.inputs[0]
    a_out = dance.outputs[0]
    dt_in = a_in.time - 0
    control_in = LogicalQubit(
        qid=0,
        track0=TrackRef(
            _add(a_in.track0.anchor, _scale(a_in.track0.direction, -dt_in)),
            a_in.track0.direction,
            "track0",
        ),
        track1=TrackRef(
            _add(a_in.track1.anchor, _scale(a_in.track1.direction, -dt_in)),
            a_in.track1.direction,
            "track1",
        ),
        time=0,
    )
    dt_out = t_end - a_out.time
    control_out = LogicalQubit(
        qid=0,
        track0=TrackRef(
            _add(a_out.track0.anchor, _scale(a_out.track0.direction, dt_out)),
            a_out.track0.direction,
            "track0",
        ),
        track1=TrackRef(
            _add(a_out.track1.anchor, _scale(a_out.track1.direction, dt_out)),
            a_out.track1.direction,
            "track1",
        ),
        time=t_end,
    )

    pieces = [hpre.cells, dance.cells, hpost.cells]
    cells: set[Cell] = set()
    for p in pieces:
        if cells & set(p):
            raise GadgetError("cnot pieces overlap")
        cells.update(p)
    target_in = LogicalQubit(
        qid=1,
        track0=hpre.inputs[0].track0,
        track1=hpre.inputs[0].track1,
        time=hpre.inputs[0].time,
    )
    target_out = LogicalQubit(
        qid=1,
        track0=hpost.outputs[0].track0,
        track1=hpost.outputs[0].track1,
        time=t_end,
    )
    g = Gadget(
        name="cnot",
        cells=tuple(sorted(cells)),
        inputs=(control_in, target_in),
        outputs=(control_out, target_out),
        latency=t_end,
        meta=(("structure", "hadamard, four crossings, hadamard"),),
    )
    return _verify(g, op, CNOT_GATE, 8)


# --- single-qubit phase via a looping control -----------------------------------
# A control signal circulates on a closed six-wall billiard orbit of period
# 12; the qubit's track1 crosses it exactly once per pass, adding the
# exp(i*pi/4) phase to the |1> branch.  The loop is part of the scaffold, so
# the gadget's scaffold recurrence period is 12 rather than 1.

_LOOP_CONTROL_START = (0, 0, 0)
_LOOP_SCHEDULE = ((1, 0), (3, 1), (5, 2), (7, 0), (9, 1), (11, 2))
_LOOP_PERIOD = 12
_PHASE_CROSS_T = 2
_PHASE_TRACK1_AT_CROSS = (0, 2, 3)
_PHASE_TRACK_DIR = (1, 1, -1)
_PHASE_TRACK_SEP = (0, 0, 2)  # track1 = track0 + this


def _loop_plan() -> TrackPlan:
    return TrackPlan(_LOOP_CONTROL_START, 0, (1, 1, 1), _LOOP_SCHEDULE, _LOOP_PERIOD)


def build_phase_loop(op: ScatteringOperator) -> Gadget:
    loop = _loop_plan()
    if loop.at(_LOOP_PERIOD) != _LOOP_CONTROL_START or loop.v_at(_LOOP_PERIOD) != (1, 1, 1):
        raise GadgetError("control loop does not close on its period")
    cubes = tuple(sorted(set(loop.all_cube_cells())))
    cells = tuple(sorted(cubes + (_LOOP_CONTROL_START,)))

    t1_anchor = _add(
        _PHASE_TRACK1_AT_CROSS, _scale(_PHASE_TRACK_DIR, -_PHASE_CROSS_T)
    )
    t0_anchor = _add(t1_anchor, _scale(_PHASE_TRACK_SEP, -1))
    out_t1 = _add(
        _PHASE_TRACK1_AT_CROSS,
        _scale(_PHASE_TRACK_DIR, _LOOP_PERIOD - _PHASE_CROSS_T),
    )
    out_t0 = _add(out_t1, _scale(_PHASE_TRACK_SEP, -1))
    g = Gadget(
        name="phase_loop",
        cells=cells,
        inputs=(
            LogicalQubit(
                qid=0,
                track0=TrackRef(t0_anchor, _PHASE_TRACK_DIR, "track0"),
                track1=TrackRef(t1_anchor, _PHASE_TRACK_DIR, "track1"),
                time=0,
            ),
        ),
        outputs=(
            LogicalQubit(
                qid=0,
                track0=TrackRef(out_t0, _PHASE_TRACK_DIR, "track0"),
                track1=TrackRef(out_t1, _PHASE_TRACK_DIR, "track1"),
                time=_LOOP_PERIOD,
            ),
        ),
        latency=_LOOP_PERIOD,
        period=_LOOP_PERIOD,
        meta=(("loop_period", _LOOP_PERIOD), ("crossing_time", _PHASE_CROSS_T)),
    )
    return _verify(g, op, PHASE_GATE, 2 * _LOOP_PERIOD)
