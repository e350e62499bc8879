"""Composite patterns and the harness that reads logical gates off them.

A gadget is a frozen arrangement of scaffold cells (stable barriers, walls,
and for the phase loop a circulating control signal) plus logical port
metadata: where each qubit's two signal tracks enter and leave, and after
how many steps.  Gadget geometries were synthesized by the constructive
planner in gadget_build and are validated by simulation every time they are
built; tests re-validate the frozen constants.

Qubit convention: a logical qubit is a pair of parallel diagonal tracks;
a signal on track0 encodes |0>, on track1 encodes |1>.  The canonical track
separation (the smallest offset for which two parallel tracks never share a
partition block in free flight) is 2 along a single axis; each port records
its own separation vector since gadget instances are rotated.
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass

import numpy as np

from . import block_space as bs
from .evolution import SimClock, run
from .scattering import ScatteringOperator
from .state import Superposition, make_configuration, write_snapshot

Cell = tuple[int, int, int]

TRACK_SEPARATION: Cell = (0, 0, 2)
EXTRACT_UNITARITY_TOL = 1e-6


@dataclass(frozen=True)
class TrackRef:
    anchor: Cell
    direction: Cell
    role: str  # "track0" | "track1"


@dataclass(frozen=True)
class LogicalQubit:
    qid: int
    track0: TrackRef
    track1: TrackRef
    time: int

    def track(self, bit: int) -> TrackRef:
        return self.track1 if bit else self.track0

    @property
    def separation(self) -> Cell:
        return tuple(
            a - b for a, b in zip(self.track1.anchor, self.track0.anchor)
        )


@dataclass(frozen=True)
class Gadget:
    name: str
    cells: tuple[Cell, ...]
    inputs: tuple[LogicalQubit, ...]
    outputs: tuple[LogicalQubit, ...]
    latency: int
    period: int = 1  # scaffold recurrence period; 1 for static scaffolds
    meta: tuple = ()

    @property
    def n_qubits(self) -> int:
        return len(self.inputs)


class GadgetError(ValueError):
    pass


def _rotation_offset(mat) -> Cell:
    ones = bs.rotate_vector(mat, (1, 1, 1))
    return tuple((1 - v) // 2 for v in ones)


def rotate_point(mat, p: Cell) -> Cell:
    """Rotate a cell about the centre of the block at the origin.

    Rotations about block centres map both partition grids to themselves,
    so a rotated gadget stays phase-consistent with the global clock.
    """
    off = _rotation_offset(mat)
    r = bs.rotate_vector(mat, p)
    return (r[0] + off[0], r[1] + off[1], r[2] + off[2])


def _shift(p: Cell, u: Cell) -> Cell:
    return (p[0] + u[0], p[1] + u[1], p[2] + u[2])


def transform_track(tr: TrackRef, mat, u: Cell) -> TrackRef:
    return TrackRef(
        anchor=_shift(rotate_point(mat, tr.anchor), u),
        direction=bs.rotate_vector(mat, tr.direction),
        role=tr.role,
    )


def transform_gadget(
    g: Gadget, rot_index: int = None, translation: Cell = (0, 0, 0), dt: int = 0
) -> Gadget:
    """Rotate about the origin block centre, then translate in space and time.

    The translation must be even per axis and the time offset even, so every
    internal event keeps its designed partition parity.
    """
    if any(v % 2 for v in translation):
        raise GadgetError(f"gadget translation must be even, got {translation}")
    if dt % 2:
        raise GadgetError(f"gadget time offset must be even, got {dt}")
    mat = (
        bs.ROTATION_MATRICES[rot_index]
        if rot_index is not None
        else bs.ROTATION_MATRICES[bs.IDENTITY_ROTATION]
    )
    qubits = []
    for q in g.inputs + g.outputs:
        qubits.append(
            LogicalQubit(
                qid=q.qid,
                track0=transform_track(q.track0, mat, translation),
                track1=transform_track(q.track1, mat, translation),
                time=q.time + dt,
            )
        )
    n_in = len(g.inputs)
    return Gadget(
        name=g.name,
        cells=tuple(sorted(_shift(rotate_point(mat, c), translation) for c in g.cells)),
        inputs=tuple(qubits[:n_in]),
        outputs=tuple(qubits[n_in:]),
        latency=g.latency,
        period=g.period,
        meta=g.meta,
    )


# --- primitive stable structures -------------------------------------------

def stable_barrier(anchor: Cell, normal_axis: int = 2) -> Gadget:
    """2x2x1 slab straddling the aligned partition along exactly one axis.

    anchor is the minimum corner; the slab is one cell thick along
    normal_axis and spans two cells along the other two axes, of which
    exactly one must start on an odd coordinate (that is the straddle).
    A slab contained in a single block would be a wall there and scatter
    into lone corners on the next partition, so it is rejected.
    """
    span_axes = [a for a in range(3) if a != normal_axis]
    odd = [a for a in span_axes if anchor[a] % 2]
    if len(odd) != 1:
        raise GadgetError(
            "misaligned barrier anchor: the slab must straddle the aligned "
            "partition along exactly one axis or it will scatter"
        )
    cells = []
    for i in (0, 1):
        for j in (0, 1):
            c = list(anchor)
            c[span_axes[0]] += i
            c[span_axes[1]] += j
            cells.append(tuple(c))
    return Gadget(
        name="stable_barrier",
        cells=tuple(sorted(cells)),
        inputs=(),
        outputs=(),
        latency=0,
        meta=(("anchor", anchor), ("normal_axis", normal_axis)),
    )


def stable_wall(anchor: Cell, normal_axis: int) -> Gadget:
    """2x2x2 cube whose faces reflect signals along normal_axis.

    One partition sees two wall faces (the bounce-active parity), the other
    four barriers.  The anchor parity decides which: exactly one odd anchor
    axis means the wall faces appear on the aligned partition and that axis
    is the normal; exactly two odd axes put the faces on the shifted
    partition with the remaining even axis as the normal.  Zero or three odd
    axes decompose into lone corners on one partition and are rejected.
    """
    odd = [a for a in range(3) if anchor[a] % 2]
    if len(odd) == 1:
        implied, parity = odd[0], "aligned"
    elif len(odd) == 2:
        implied, parity = next(a for a in range(3) if a not in odd), "shifted"
    else:
        raise GadgetError(
            "wall anchor decomposes into lone corners on one partition; "
            "it would scatter"
        )
    if implied != normal_axis:
        raise GadgetError(
            f"wall anchor parity implies normal axis {implied}, not {normal_axis}"
        )
    cells = tuple(
        sorted(
            (anchor[0] + i, anchor[1] + j, anchor[2] + k)
            for i in (0, 1)
            for j in (0, 1)
            for k in (0, 1)
        )
    )
    return Gadget(
        name="stable_wall",
        cells=cells,
        inputs=(),
        outputs=(),
        latency=0,
        meta=(("anchor", anchor), ("normal_axis", normal_axis), ("active_parity", parity)),
    )


def qubit(tracks: tuple[TrackRef, TrackRef], bit: int) -> tuple[Cell, ...]:
    """Configuration fragment encoding |bit> on a pair of tracks."""
    if bit not in (0, 1):
        raise GadgetError("bit must be 0 or 1")
    return (tracks[bit].anchor,)


# --- gate extraction ---------------------------------------------------------

def _simulate(cells, t0: int, steps: int, op: ScatteringOperator) -> Superposition:
    s: Superposition = {make_configuration(cells): 1.0 + 0j}
    return run(s, steps, SimClock(t0), op)


def scaffold_at(g: Gadget, t: int, op: ScatteringOperator) -> tuple[Cell, ...]:
    """Scaffold occupancy at time t (the control of a loop moves)."""
    if not g.cells:
        return ()
    if g.period == 1:
        return g.cells
    s = _simulate(g.cells, 0, t, op)
    if len(s) != 1:
        raise GadgetError("gadget scaffold did not evolve classically")
    return next(iter(s))


def extract_gate_matrix(
    g: Gadget,
    op: ScatteringOperator,
    latency_override: int | None = None,
) -> np.ndarray:
    """Simulate all logical basis inputs and assemble the gate matrix.

    Basis index packs qubit bits most-significant-first in input order.
    Raises GadgetError on off-port occupancy at readout (desynchronization)
    or if the extracted matrix is not unitary to 1e-6.
    """
    n = g.n_qubits
    if n not in (1, 2):
        raise GadgetError("extraction supports 1- or 2-qubit gadgets")
    t0 = g.inputs[0].time
    if any(q.time != t0 for q in g.inputs):
        raise GadgetError("all input ports must share one reference time")
    latency = g.latency if latency_override is None else latency_override
    t_read = t0 + latency
    if latency_override is None and any(
        q.time != t_read for q in g.outputs
    ):
        raise GadgetError("output port times disagree with the gadget latency")

    scaffold_read = frozenset(scaffold_at(g, t_read - t0, op))
    expected = {}
    for combo in range(2**n):
        cells = set(scaffold_read)
        for q_i, q in enumerate(g.outputs):
            bit = combo >> (n - 1 - q_i) & 1
            cells.add(q.track(bit).anchor)
        expected[frozenset(cells)] = combo

    dim = 2**n
    matrix = np.zeros((dim, dim), dtype=complex)
    for combo in range(dim):
        cells = set(g.cells)
        for q_i, q in enumerate(g.inputs):
            bit = combo >> (n - 1 - q_i) & 1
            anchor = q.track(bit).anchor
            if anchor in cells:
                raise GadgetError(f"input port {anchor} collides with the scaffold")
            cells.add(anchor)
        final = _simulate(cells, t0, latency, op)
        for config, amp in final.items():
            key = frozenset(config)
            if key not in expected:
                raise GadgetError(
                    f"off-port occupancy at readout for input {combo:0{n}b}: "
                    f"{sorted(set(config) - scaffold_read)}"
                )
            matrix[expected[key], combo] += amp
    if not bs.operator_is_unitary(matrix, EXTRACT_UNITARITY_TOL):
        raise GadgetError("extracted matrix is not unitary to 1e-6")
    return matrix


def canonical_phase(m: np.ndarray) -> np.ndarray:
    """Fix global phase: the largest-magnitude entry becomes real positive."""
    idx = np.unravel_index(np.argmax(np.abs(m)), m.shape)
    v = m[idx]
    if abs(v) == 0:
        return m.copy()
    return m * (abs(v) / v)


def gate_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Max-norm distance after canonical global-phase alignment."""
    return float(np.abs(canonical_phase(a) - canonical_phase(b)).max())


_SQ2 = 1.0 / math.sqrt(2.0)
HADAMARD_GATE = np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex)
PHASE_GATE = np.diag([1.0, cmath.exp(1j * math.pi / 4)]).astype(complex)
CPHASE_GATE = np.diag([1.0, 1.0, 1.0, cmath.exp(1j * math.pi / 4)]).astype(complex)
CZ_GATE = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)
CNOT_GATE = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)

REFERENCE_GATES = {
    "hadamard": HADAMARD_GATE,
    "cphase": CPHASE_GATE,
    "cz": CZ_GATE,
    "cnot": CNOT_GATE,
    "phase_loop": PHASE_GATE,
}


# --- catalogue ---------------------------------------------------------------

_CATALOGUE_CACHE: dict[str, dict[str, Gadget]] = {}


def catalogue(op: ScatteringOperator) -> dict[str, Gadget]:
    """All frozen gadgets, validated by simulation against this operator."""
    cached = _CATALOGUE_CACHE.get(op.checksum)
    if cached is not None:
        return cached
    from . import gadget_build as gb

    cat = {
        "hadamard": gb.build_hadamard(op),
        "cphase": gb.build_crossing(op),
        "cz": gb.build_cz(op),
        "cnot": gb.build_cnot(op),
        "phase_loop": gb.build_phase_loop(op),
        "stable_barrier": stable_barrier((0, 1, 0)),
        "stable_wall": stable_wall((1, 0, 0), 0),
    }
    _CATALOGUE_CACHE[op.checksum] = cat
    return cat


def _track_dict(tr: TrackRef) -> dict:
    return {"anchor": list(tr.anchor), "direction": list(tr.direction), "role": tr.role}


def _qubit_dict(q: LogicalQubit) -> dict:
    return {
        "qid": q.qid,
        "track0": _track_dict(q.track0),
        "track1": _track_dict(q.track1),
        "time": q.time,
    }


def gadget_dict(g: Gadget) -> dict:
    return {
        "name": g.name,
        "cells": [list(c) for c in g.cells],
        "inputs": [_qubit_dict(q) for q in g.inputs],
        "outputs": [_qubit_dict(q) for q in g.outputs],
        "latency": g.latency,
        "period": g.period,
        "constants": {k: (list(v) if isinstance(v, tuple) else v) for k, v in g.meta},
    }


def catalogue_json(op: ScatteringOperator) -> str:
    cat = catalogue(op)
    payload = {
        "track_separation": list(TRACK_SEPARATION),
        "gadgets": [gadget_dict(g) for _, g in sorted(cat.items())],
    }
    return json.dumps(payload, indent=2, sort_keys=True)


def scaffold_is_stable(g: Gadget, steps: int, op: ScatteringOperator) -> bool:
    """Scaffold alone recurs byte-identically at multiples of its period."""
    if not g.cells:
        return True
    s0: Superposition = {make_configuration(g.cells): 1.0 + 0j}
    ref = write_snapshot(s0)
    s = dict(s0)
    clock = SimClock(0)
    periods = max(1, steps // g.period)
    for _ in range(periods):
        s = run(s, g.period, clock, op)
        if write_snapshot(s) != ref:
            return False
    return True
