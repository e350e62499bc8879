"""Gadget constructors, gate extraction, interference, port discipline."""
import cmath
import itertools
import math

import numpy as np
import pytest

from qgol import evolution as ev, gadget_build as gb, state as st
from qgol.gadgets import (
    CNOT_GATE,
    CPHASE_GATE,
    CZ_GATE,
    GadgetError,
    HADAMARD_GATE,
    PHASE_GATE,
    canonical_phase,
    extract_gate_matrix,
    gate_distance,
    qubit,
    scaffold_is_stable,
    stable_barrier,
    stable_wall,
    transform_gadget,
)

SQ2 = 1 / math.sqrt(2)


def run_cells(cells, steps, op, t0=0):
    s = {st.make_configuration(cells): 1.0 + 0j}
    return ev.run(s, steps, ev.SimClock(t0), op)


# --- stable structures --------------------------------------------------------

def test_stable_barrier_holds_for_ten_steps(op):
    g = stable_barrier((1, 0, 0))
    assert len(g.cells) == 4
    out = run_cells(g.cells, 10, op)
    assert out == {st.make_configuration(g.cells): 1.0 + 0j}


def test_misaligned_barrier_anchor_rejected():
    with pytest.raises(GadgetError):
        stable_barrier((0, 0, 0))  # fully inside one aligned block
    with pytest.raises(GadgetError):
        stable_barrier((1, 1, 0))  # straddles two axes


def test_block_aligned_slab_scatters_at_step_two(op):
    # Inside one block the 4-cell slab is a wall (fixed), but the next
    # partition slices it into lone corners that fly apart.
    cells = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0)]
    s1 = ev.step({st.make_configuration(cells): 1.0 + 0j}, ev.ALIGNED, op)
    assert s1 == {st.make_configuration(cells): 1.0 + 0j}
    s2 = ev.step(s1, ev.SHIFTED, op)
    (config,) = s2
    assert config != st.make_configuration(cells)
    assert len(config) == 4
    # strictly diverging afterwards
    s3 = ev.step(s2, ev.ALIGNED, op)
    (config3,) = s3
    assert min(c[0] for c in config3) < min(c[0] for c in config)


def test_two_disjoint_slabs_coexist(op):
    a = stable_barrier((1, 0, 0))
    b = stable_barrier((1, 6, 0))
    cells = a.cells + b.cells
    out = run_cells(cells, 10, op)
    assert out == {st.make_configuration(cells): 1.0 + 0j}


@pytest.mark.parametrize("anchor,normal", [((1, 0, 0), 0), ((1, 2, 0), 0), ((1, 1, 0), 2)])
def test_stable_wall_variants_hold(op, anchor, normal):
    g = stable_wall(anchor, normal)
    out = run_cells(g.cells, 10, op)
    assert out == {st.make_configuration(g.cells): 1.0 + 0j}


def test_wall_anchor_guards():
    with pytest.raises(GadgetError):
        stable_wall((0, 0, 0), 0)  # no straddle: lone corners next step
    with pytest.raises(GadgetError):
        stable_wall((1, 1, 1), 0)  # all axes straddle: lone corners now
    with pytest.raises(GadgetError):
        stable_wall((1, 0, 0), 1)  # parity implies normal 0, not 1


def test_wall_bounces_an_approaching_signal(op):
    wall = stable_wall((1, 0, 0), 0)
    signal = (-2, -2, -2)  # ballistic toward the wall's x=1 face
    s = {st.make_configuration(wall.cells + (signal,)): 1.0 + 0j}
    clock = ev.SimClock(0)
    positions = [signal]
    for _ in range(6):
        s = ev.step(s, clock.parity, op)
        clock.t += 1
        (config,) = s
        sig = set(config) - set(wall.cells)
        assert len(sig) == 1
        positions.append(next(iter(sig)))
    xs = [p[0] for p in positions]
    # approach, contact, reflection along the wall normal
    assert xs[:3] == [-2, -1, 0]
    assert max(xs) == 0
    assert xs[-1] < 0
    ys = [p[1] for p in positions]
    assert ys == sorted(ys)  # transverse motion never reverses


def test_wall_regression_100_steps_byte_identical(op):
    g = stable_wall((1, 0, 0), 0)
    s0 = {st.make_configuration(g.cells): 1.0 + 0j}
    ref = st.write_snapshot(s0)
    s = dict(s0)
    clock = ev.SimClock(0)
    for _ in range(100):
        s = ev.step(s, clock.parity, op)
        clock.t += 1
        assert st.write_snapshot(s) == ref


# --- qubit tracks --------------------------------------------------------------

def test_qubit_encoding_and_free_flight(op, cat):
    h = cat["hadamard"]
    tracks = (h.inputs[0].track0, h.inputs[0].track1)
    assert qubit(tracks, 0) == (tracks[0].anchor,)
    assert qubit(tracks, 1) == (tracks[1].anchor,)
    for bit in (0, 1):
        anchor = tracks[bit].anchor
        d = tracks[bit].direction
        out = run_cells([anchor], 5, op)
        (config,) = out
        assert config[0] == tuple(a + 5 * v for a, v in zip(anchor, d))


def test_track_separation_is_minimal_by_search(op):
    # Smallest even offset whose two parallel ballistic tracks never share a
    # partition block.  Any nonzero even offset works (blocks differ on the
    # offset axis forever), so the minimum norm is 2; odd offsets are not
    # track-preserving (the offset signal is not ballistic in phase).
    def shares_block(delta):
        for t in range(12):
            p = (t, t, t)
            q = tuple(a + d for a, d in zip(p, delta))
            o = t & 1
            bp = tuple(((c - o) >> 1) * 2 + o for c in p)
            bq = tuple(((c - o) >> 1) * 2 + o for c in q)
            if bp == bq:
                return True
        return False

    valid = [
        d
        for d in itertools.product((-2, 0, 2), repeat=3)
        if d != (0, 0, 0) and not shares_block(d)
    ]
    assert (0, 0, 2) in valid
    assert min(sum(map(abs, d)) for d in valid) == 2


# --- gate extraction ------------------------------------------------------------

def test_hadamard_gate(op, cat):
    m = extract_gate_matrix(cat["hadamard"], op)
    assert gate_distance(m, HADAMARD_GATE) <= 1e-9


def test_hadamard_port_amplitudes(op, cat):
    h = cat["hadamard"]
    for bit, sign in ((0, 1.0), (1, -1.0)):
        cells = h.cells + qubit((h.inputs[0].track0, h.inputs[0].track1), bit)
        out = run_cells(cells, h.latency, op)
        amps = {}
        for config, amp in out.items():
            sig = set(config) - set(h.cells)
            amps[next(iter(sig))] = amp
        assert abs(amps[h.outputs[0].track0.anchor] - SQ2) < 1e-12
        assert abs(amps[h.outputs[0].track1.anchor] - sign * SQ2) < 1e-12


def test_double_hadamard_interference(op, cat):
    hh = gb.chain_single_qubit(op, cat["hadamard"], cat["hadamard"])
    m = extract_gate_matrix(hh, op)
    assert gate_distance(m, np.eye(2, dtype=complex)) <= 1e-9
    # direct simulation of |0>: the |1> branch cancels exactly
    cells = hh.cells + (hh.inputs[0].track0.anchor,)
    out = run_cells(cells, hh.latency, op)
    scaffold = set(hh.cells)
    leak = sum(
        abs(a) ** 2
        for config, a in out.items()
        if (set(config) - scaffold) != {hh.outputs[0].track0.anchor}
    )
    assert leak <= 1e-9
    main = [
        a
        for config, a in out.items()
        if (set(config) - scaffold) == {hh.outputs[0].track0.anchor}
    ]
    assert len(main) == 1 and abs(abs(main[0]) - 1.0) <= 1e-9


def test_crossing_gate(op, cat):
    m = extract_gate_matrix(cat["cphase"], op)
    assert gate_distance(m, CPHASE_GATE) <= 1e-9
    # identity on the other three basis states, phase on |11>
    assert abs(m[3, 3] - SQ2 * (1 + 1j)) < 1e-12
    for k in range(3):
        assert abs(m[k, k] - 1.0) < 1e-12


def test_four_crossings_give_controlled_z(op, cat):
    m = extract_gate_matrix(cat["cz"], op)
    assert gate_distance(m, CZ_GATE) <= 1e-9
    assert abs(m[3, 3] + 1.0) < 1e-12  # e^{i pi} after four eighth turns


def test_cnot_composite(op, cat):
    m = extract_gate_matrix(cat["cnot"], op)
    assert gate_distance(m, CNOT_GATE) <= 1e-9


def test_phase_loop_gate(op, cat):
    pl = cat["phase_loop"]
    m = extract_gate_matrix(pl, op)
    assert gate_distance(m, PHASE_GATE) <= 1e-9
    # |0> passes untouched
    assert abs(m[0, 0] - 1.0) < 1e-12


def test_phase_loop_control_is_periodic(op, cat):
    pl = cat["phase_loop"]
    s0 = {st.make_configuration(pl.cells): 1.0 + 0j}
    out = ev.run(dict(s0), pl.period, ev.SimClock(0), op)
    assert out == s0
    mid = ev.run(dict(s0), pl.period // 2, ev.SimClock(0), op)
    assert mid != s0


def test_every_gadget_scaffold_is_stable(op, cat):
    for name, g in cat.items():
        assert scaffold_is_stable(g, max(4 * max(g.latency, 1), 8), op), name


def test_every_extracted_matrix_is_unitary(op, cat):
    for name, g in cat.items():
        if not g.inputs:
            continue
        m = extract_gate_matrix(g, op)
        assert np.abs(m.conj().T @ m - np.eye(m.shape[0])).max() <= 1e-6, name


@pytest.mark.parametrize("delta", [-1, 1])
def test_latency_off_by_one_is_detected(op, cat, delta):
    with pytest.raises(GadgetError, match="off-port"):
        extract_gate_matrix(cat["hadamard"], op, latency_override=cat["hadamard"].latency + delta)


def test_global_phase_canonicalization():
    phased = cmath.exp(0.77j) * HADAMARD_GATE
    assert gate_distance(phased, HADAMARD_GATE) < 1e-15
    assert np.allclose(canonical_phase(phased), HADAMARD_GATE)


def test_transform_gadget_preserves_gates(op, cat):
    h = cat["hadamard"]
    for ri in (3, 17):
        moved = transform_gadget(h, ri, (4, -2, 6), 2)
        m = extract_gate_matrix(moved, op)
        assert gate_distance(m, HADAMARD_GATE) <= 1e-9
    with pytest.raises(GadgetError):
        transform_gadget(h, 0, (1, 0, 0), 0)
    with pytest.raises(GadgetError):
        transform_gadget(h, 0, (0, 0, 0), 1)


def test_input_port_collision_detected(op, cat):
    h = cat["hadamard"]
    bad = gb.Gadget(
        name="bad",
        cells=h.cells + (h.inputs[0].track0.anchor,),
        inputs=h.inputs,
        outputs=h.outputs,
        latency=h.latency,
    )
    with pytest.raises(GadgetError, match="collides"):
        extract_gate_matrix(bad, op)
